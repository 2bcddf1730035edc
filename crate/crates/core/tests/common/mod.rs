#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use xxz_roots::{Complex64, ModelParams};

pub const FIG1_THETAS: [f64; 9] = [0.14, 0.32, -0.43, 0.54, -0.25, 0.63, 0.47, -0.78, 0.19];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn params(n: usize, antiferro: bool) -> ModelParams {
    if antiferro {
        ModelParams::antiferromagnetic(n, 0.75).unwrap()
    } else {
        ModelParams::ferromagnetic(n, 0.75).unwrap()
    }
}

fn pauli(which: char) -> DMatrix<Complex64> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match which {
        'x' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => DMatrix::identity(2, 2),
    }
}

/// `op` on `site` (1-based, site 1 most significant) of an `n`-site chain.
fn embed(n: usize, site: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::identity(1, 1);
    for j in 1..=n {
        let f = if j == site { op.clone() } else { DMatrix::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

/// Dense Hamiltonian from Pauli strings with the twisted bond `σ^x σ^α_{N+1} σ^x`.
pub fn pauli_hamiltonian(n: usize, eta: Complex64) -> DMatrix<Complex64> {
    let x = pauli('x');
    let d = 1 << n;
    let mut h = DMatrix::<Complex64>::zeros(d, d);
    for j in 1..=n {
        for (a, coef) in [('x', c(1.0, 0.0)), ('y', c(1.0, 0.0)), ('z', eta.cosh())] {
            let op = pauli(a);
            let right = if j == n {
                embed(n, 1, &(&x * &op * &x))
            } else {
                embed(n, j + 1, &op)
            };
            h -= embed(n, j, &op) * right * coef;
        }
    }
    h
}

/// Sorted eigenvalues of the dense Hermitian Hamiltonian.
pub fn ed_energies(n: usize, eta: Complex64) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(pauli_hamiltonian(n, eta))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Transfer matrix assembled from explicit `2^{N+1}` R-matrix products and a partial trace.
pub fn dense_transfer(p: &ModelParams, u: Complex64) -> DMatrix<Complex64> {
    let n = p.n_sites();
    let eta = p.eta();
    let full = |aux: &DMatrix<Complex64>, site: usize, op: &DMatrix<Complex64>| aux.kronecker(&embed(n, site, op));
    let mut mono = DMatrix::<Complex64>::identity(2 << n, 2 << n);
    for (j, th) in p.thetas().iter().enumerate() {
        let r = xxz_roots::model::r_matrix(u - th, eta).unwrap();
        let mut rj = DMatrix::<Complex64>::zeros(2 << n, 2 << n);
        for a in 0..2 {
            for b in 0..2 {
                let mut e = DMatrix::<Complex64>::zeros(2, 2);
                e[(a, b)] = c(1.0, 0.0);
                let blk = DMatrix::from_fn(2, 2, |i, k| r[(2 * a + i, 2 * b + k)]);
                rj += full(&e, j + 1, &blk);
            }
        }
        mono = rj * mono;
    }
    let twisted = pauli('x').kronecker(&DMatrix::<Complex64>::identity(1 << n, 1 << n)) * mono;
    let d = 1 << n;
    twisted.view((0, 0), (d, d)) + twisted.view((d, d), (d, d))
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest distance from a root in `a` to its greedy match in `b`; strip periodicity included.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let dist = |x: Complex64, y: Complex64| {
        let d = x - y;
        let im = d.im - std::f64::consts::PI * (d.im / std::f64::consts::PI).round();
        c(d.re, im).norm()
    };
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &y)| (k, dist(x, y)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Largest gap between two sorted level lists.
pub fn level_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

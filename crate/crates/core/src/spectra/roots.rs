use nalgebra::{DMatrix, DVector, Schur, SVD};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::eigen::EigenRecord;
use super::SpectraError;
use crate::model::ModelParams;
use crate::scalar::reduce_half_strip;

const RECONSTRUCTION_LIMIT: f64 = 1e-6;
const NEWTON_ITERS: usize = 60;

/// `Λ_0` and the `N-1` zero roots of one eigenvalue, `Λ(u) = Λ_0 ∏ sinh(u - z_j + η/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub lambda0: Complex64,
    /// Roots reduced to `Im z ∈ [-π/2, π/2)`.
    pub roots: Vec<Complex64>,
    /// Relative reconstruction residual on the validation grid.
    pub residual: f64,
    pub classification: Option<Classification>,
}

impl RootSet {
    pub fn new(lambda0: Complex64, roots: Vec<Complex64>) -> Self {
        Self {
            lambda0,
            roots,
            residual: 0.0,
            classification: None,
        }
    }

    /// `Λ_0 ∏ sinh(u - z_j + η/2)`.
    pub fn reconstruct(&self, eta: Complex64, u: Complex64) -> Complex64 {
        self.roots
            .iter()
            .fold(self.lambda0, |acc, z| acc * (u - z + eta / 2.0).sinh())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RootTag {
    /// `Re z = 0` within tolerance.
    Imaginary,
    /// Anti-conjugate partner `Re z_j + Re z_l = 0`, `Im z_j = Im z_l`.
    ///
    /// `string` is `n` in `|Re z| = (n+1) Re η / 2`; `shifted_label` is the
    /// same pair labelled by `|Re z| = n' Re η / 2`, `n' = n + 1`.
    Pair {
        partner: usize,
        string: i64,
        shifted_label: i64,
    },
    Unpaired,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tags: Vec<RootTag>,
    pub tolerance: f64,
    pub imaginary: usize,
    pub pairs: usize,
    pub unpaired: usize,
}

impl Classification {
    /// Real parts `|Re z|` of every paired root, one entry per pair.
    pub fn pair_offsets(&self, roots: &[Complex64]) -> Vec<f64> {
        self.tags
            .iter()
            .enumerate()
            .filter_map(|(j, t)| match t {
                RootTag::Pair { partner, .. } if *partner > j => Some(roots[j].re.abs()),
                _ => None,
            })
            .collect()
    }
}

/// `min(10 e^{-Re(η) N / 2}, Re(η) / 2)`.
pub fn default_pair_tolerance(params: &ModelParams<f64>) -> f64 {
    let e = params.eta_re().abs();
    (10.0 * (-e * params.n_sites() as f64 / 2.0).exp()).min(e / 2.0)
}

/// Signed offset of `x` from the nearest multiple of `π`.
fn wrap_pi(x: f64) -> f64 {
    reduce_half_strip(x)
}

/// Tags each root as imaginary, paired or unpaired.
pub fn classify_roots(rootset: &RootSet, params: &ModelParams<f64>, tol: f64) -> Classification {
    let roots = &rootset.roots;
    let m = roots.len();
    let eta_re = params.eta_re().abs();
    let mut tags = vec![RootTag::Unpaired; m];
    let mut free = Vec::new();
    for (j, z) in roots.iter().enumerate() {
        if z.re.abs() <= tol {
            tags[j] = RootTag::Imaginary;
        } else {
            free.push(j);
        }
    }
    let mut candidates = Vec::new();
    for (a, &j) in free.iter().enumerate() {
        for &l in &free[a + 1..] {
            let d = (roots[j].re + roots[l].re).hypot(wrap_pi(roots[j].im - roots[l].im));
            candidates.push((d, j, l));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; m];
    for (d, j, l) in candidates {
        if d > tol || used[j] || used[l] {
            continue;
        }
        used[j] = true;
        used[l] = true;
        let offset = 0.5 * (roots[j].re.abs() + roots[l].re.abs());
        let string = (2.0 * offset / eta_re - 1.0).round() as i64;
        tags[j] = RootTag::Pair {
            partner: l,
            string,
            shifted_label: string + 1,
        };
        tags[l] = RootTag::Pair {
            partner: j,
            string,
            shifted_label: string + 1,
        };
    }
    let count = |f: fn(&RootTag) -> bool| tags.iter().filter(|t| f(t)).count();
    let imaginary = count(|t| matches!(t, RootTag::Imaginary));
    let pairs = count(|t| matches!(t, RootTag::Pair { .. })) / 2;
    let unpaired = count(|t| matches!(t, RootTag::Unpaired));
    Classification {
        tags,
        tolerance: tol,
        imaginary,
        pairs,
        unpaired,
    }
}

/// Roots of `Σ c_j w^j` from the companion matrix.
fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, SpectraError> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(SpectraError::Companion);
    }
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = Schur::try_new(comp, 1e-15, 10_000).ok_or(SpectraError::Companion)?;
    let (_, t) = schur.unpack();
    Ok((0..deg).map(|i| t[(i, i)]).collect())
}

fn newton_polish(record: &EigenRecord, mut u: Complex64) -> Complex64 {
    for _ in 0..NEWTON_ITERS {
        let f = record.lambda_at(u);
        let df = record.lambda.derivative(u);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        u -= step;
        if step.norm() <= 1e-15 * (1.0 + u.norm()) {
            break;
        }
    }
    u
}

fn sample_grid(n_points: usize, re: f64, offset: f64) -> Vec<Complex64> {
    let pi = std::f64::consts::PI;
    (0..n_points)
        .map(|k| Complex64::new(re, -pi / 2.0 + pi * (k as f64 + offset) / n_points as f64))
        .collect()
}

/// Extracts `Λ_0` and the zero roots of one record.
///
/// Samples `Λ` on `4N` points of `Re u = 0`, least-squares fits the
/// polynomial `e^{(N-1)u} Λ(u)` in `w = e^{2u}`, takes companion-matrix roots,
/// Newton-polishes them on `Λ`, maps `z = ln(w)/2 + η/2` into the strip and
/// checks the reconstruction on a disjoint grid.
pub fn extract_roots(record: &EigenRecord, params: &ModelParams<f64>) -> Result<RootSet, SpectraError> {
    let n = params.n_sites();
    let eta = params.eta();
    let grid = sample_grid(4 * n, 0.0, 0.0);
    let values: Vec<Complex64> = grid.iter().map(|&u| record.lambda_at(u)).collect();

    let a = DMatrix::from_fn(grid.len(), n, |k, j| (grid[k] * (2.0 * j as f64)).exp());
    let b = DVector::from_iterator(
        grid.len(),
        grid.iter()
            .zip(&values)
            .map(|(u, v)| v * (u * (n as f64 - 1.0)).exp()),
    );
    let svd = SVD::new(a, true, true);
    let coeffs = svd.solve(&b, 1e-14).map_err(|_| SpectraError::Companion)?;
    let coeffs: Vec<Complex64> = coeffs.iter().copied().collect();

    let ws = polynomial_roots(&coeffs)?;
    if ws.len() != n - 1 {
        return Err(SpectraError::RootCount {
            expected: n - 1,
            got: ws.len(),
        });
    }
    let roots: Vec<Complex64> = ws
        .iter()
        .map(|w| {
            let u = newton_polish(record, w.ln() / 2.0);
            let z = u + eta / 2.0;
            Complex64::new(z.re, reduce_half_strip(z.im))
        })
        .collect();

    // Λ_0 by least squares against the sampled values
    let mut rs = RootSet::new(Complex64::new(1.0, 0.0), roots);
    let (mut num, mut den) = (Complex64::zero(), 0.0);
    for (&u, v) in grid.iter().zip(&values) {
        let p = rs.reconstruct(eta, u);
        num += p.conj() * v;
        den += p.norm_sqr();
    }
    rs.lambda0 = num / den;

    let check = sample_grid(4 * n, 0.05, 0.5);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for &u in &check {
        let l = record.lambda_at(u);
        worst = worst.max((rs.reconstruct(eta, u) - l).norm());
        scale = scale.max(l.norm());
    }
    rs.residual = worst / scale;
    if rs.residual > RECONSTRUCTION_LIMIT {
        return Err(SpectraError::Reconstruction {
            residual: rs.residual,
            limit: RECONSTRUCTION_LIMIT,
        });
    }
    Ok(rs)
}

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::newton::{newton, numeric_jacobian, NewtonOptions};
use super::BetheError;
use crate::model::{ad_functions, ModelParams};
use crate::spectra::{joint_eigenbasis, DEFAULT_PROBE};

const Q_FLOOR: f64 = 1e-12;
const COINCIDE: f64 = 1e-10;
const DEDUP: f64 = 1e-6;
const VALIDATE: f64 = 1e-6;
const MAX_SITES: usize = 6;
/// Base seed of the multi-start generator in [`solve_bae`], mixed with `N`.
pub const BAE_SEED: u64 = 0x5eed_b4e5;

/// Position of a Bethe root inside a string: `u = center + i(length - 1 - 2 position) η / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringTag {
    pub string: usize,
    pub length: usize,
    pub position: usize,
}

/// Bethe roots `λ_j = i u_j - η/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheRoots {
    pub lambdas: Vec<Complex64>,
    pub string_tags: Option<Vec<StringTag>>,
}

impl BetheRoots {
    pub fn new(lambdas: Vec<Complex64>) -> Self {
        Self {
            lambdas,
            string_tags: None,
        }
    }

    pub fn from_u(us: &[Complex64], eta: Complex64) -> Self {
        Self::new(us.iter().map(|u| Complex64::i() * u - eta / 2.0).collect())
    }

    /// `u_j = (λ_j + η/2) / i`.
    pub fn u(&self, eta: Complex64) -> Vec<Complex64> {
        self.lambdas.iter().map(|l| -(l + eta / 2.0) * Complex64::i()).collect()
    }

    /// Groups roots whose real parts agree within `tol` and whose imaginary
    /// parts step by `Re η` within `tol`.
    pub fn tag_strings(&mut self, eta: Complex64, tol: f64) {
        let us = self.u(eta);
        let step = eta.re;
        let mut order: Vec<usize> = (0..us.len()).collect();
        order.sort_by(|&a, &b| us[a].re.total_cmp(&us[b].re).then(us[b].im.total_cmp(&us[a].im)));
        let mut tags = vec![
            StringTag {
                string: 0,
                length: 1,
                position: 0
            };
            us.len()
        ];
        let mut string = 0;
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() {
                let (prev, cur) = (us[order[end - 1]], us[order[end]]);
                if (cur.re - us[order[start]].re).abs() > tol || (prev.im - cur.im - step).abs() > tol {
                    break;
                }
                end += 1;
            }
            for (pos, &i) in order[start..end].iter().enumerate() {
                tags[i] = StringTag {
                    string,
                    length: end - start,
                    position: pos,
                };
            }
            string += 1;
            start = end;
        }
        self.string_tags = Some(tags);
    }
}

fn q_value(lambdas: &[Complex64], eta: Complex64, u: Complex64) -> Complex64 {
    let s = eta.sinh();
    lambdas.iter().map(|l| (u - l).sinh() / s).product()
}

/// `Λ(u)` from the inhomogeneous T-Q relation.
pub fn tq_lambda(bethe: &BetheRoots, params: &ModelParams<f64>, u: Complex64) -> Result<Complex64, BetheError> {
    let eta = params.eta();
    let n = params.n_sites() as f64;
    let q = q_value(&bethe.lambdas, eta, u);
    if q.norm() < Q_FLOOR {
        return Err(BetheError::QZero(u));
    }
    let shift: Complex64 = params
        .thetas()
        .iter()
        .zip(&bethe.lambdas)
        .map(|(t, l)| t - l)
        .sum();
    let c = (u - eta * n + shift).exp() - (-u - eta - shift).exp();
    let (a, d) = ad_functions(params, u);
    let qm = q_value(&bethe.lambdas, eta, u - eta);
    let qp = q_value(&bethe.lambdas, eta, u + eta);
    Ok(u.exp() * a * qm / q - (-u - eta).exp() * d * qp / q - c * a * d / q)
}

/// Both sides of every Bethe equation.
fn sides(us: &[Complex64], eta: Complex64) -> Vec<(Complex64, Complex64)> {
    let n = us.len();
    let i = Complex64::i();
    let half = i * eta / 2.0;
    let total: Complex64 = us.iter().sum();
    let damp = (-eta * n as f64 / 2.0).exp();
    us.iter()
        .map(|&uj| {
            let ratio = ((uj - half).sin() / (uj + half).sin()).powu(n as u32);
            let lhs = (i * uj).exp() * ratio;
            let mut scatter = Complex64::new(1.0, 0.0);
            let mut extra = Complex64::new(1.0, 0.0);
            for &ul in us {
                let den = (uj - ul + i * eta).sin();
                scatter *= (uj - ul - i * eta).sin() / den;
                extra *= (uj - half).sin() / den;
            }
            let rhs = (-i * uj).exp() * scatter + i * 2.0 * damp * (uj - total).sin() * extra;
            (lhs, rhs)
        })
        .collect()
}

fn residual_u(us: &[Complex64], eta: Complex64) -> Vec<Complex64> {
    sides(us, eta).into_iter().map(|(l, r)| l - r).collect()
}

/// `RHS / LHS - 1`; scale free where both sides grow exponentially.
fn ratio_u(us: &[Complex64], eta: Complex64) -> Vec<Complex64> {
    sides(us, eta).into_iter().map(|(l, r)| r / l - 1.0).collect()
}

/// Bethe equations multiplied through by their denominators and divided by
/// `sin^N(u_j - iη/2) + sin^N(u_j + iη/2)`; pole free, used for the search.
fn cleared_u(us: &[Complex64], eta: Complex64) -> Vec<Complex64> {
    let n = us.len();
    let i = Complex64::i();
    let half = i * eta / 2.0;
    let total: Complex64 = us.iter().sum();
    let damp = (-eta * n as f64 / 2.0).exp();
    us.iter()
        .enumerate()
        .map(|(j, &uj)| {
            let minus = (uj - half).sin().powu(n as u32);
            let plus = (uj + half).sin().powu(n as u32);
            let (mut den, mut num) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
            for (l, &ul) in us.iter().enumerate() {
                if l != j {
                    den *= (uj - ul + i * eta).sin();
                    num *= (uj - ul - i * eta).sin();
                }
            }
            let t1 = (i * uj).exp() * minus * den;
            let t2 = -(-i * uj).exp() * num * plus;
            let t3 = i * 2.0 * damp * (uj - total).sin() * minus * plus / (i * eta).sin();
            (t1 - t2 - t3) / (minus + plus)
        })
        .collect()
}

/// Bethe equations in the `u_j` variables, left minus right hand side.
pub fn bae_residual(bethe: &BetheRoots, params: &ModelParams<f64>) -> Result<Vec<Complex64>, BetheError> {
    if !params.is_homogeneous() {
        return Err(BetheError::Inhomogeneous);
    }
    let n = params.n_sites();
    if bethe.lambdas.len() != n {
        return Err(BetheError::Unknowns {
            expected: n,
            got: bethe.lambdas.len(),
        });
    }
    for a in 0..n {
        for b in a + 1..n {
            if (bethe.lambdas[a] - bethe.lambdas[b]).norm() < COINCIDE {
                return Err(BetheError::Coinciding(a, b));
            }
        }
    }
    Ok(residual_u(&bethe.u(params.eta()), params.eta()))
}

/// Outcome of a multi-start solve.
#[derive(Clone, Debug)]
pub struct BaeReport {
    /// Distinct validated solutions.
    pub solutions: Vec<BetheRoots>,
    /// Index of the matching spectrum record for each solution.
    pub matched_records: Vec<usize>,
    /// Fraction of the `2^N` records reproduced by some solution.
    pub coverage: f64,
    pub starts: usize,
    /// Newton runs that converged, before deduplication and validation.
    pub converged: usize,
}

fn reduce_u(u: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let re = (u.re + pi / 2.0).rem_euclid(pi) - pi / 2.0;
    Complex64::new(re, u.im)
}

fn canonical(us: &[Complex64]) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = us.iter().map(|&u| reduce_u(u)).collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn same_multiset(a: &[Complex64], b: &[Complex64]) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = b.iter().enumerate().find(|(k, y)| !used[*k] && {
            let d = x - *y;
            let pi = std::f64::consts::PI;
            let re = (d.re + pi / 2.0).rem_euclid(pi) - pi / 2.0;
            Complex64::new(re, d.im).norm() < DEDUP
        });
        match hit {
            Some((k, _)) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}

fn seeds(n: usize, eta_re: f64, n_starts: usize) -> Vec<Vec<Complex64>> {
    let h = std::f64::consts::FRAC_PI_2;
    let w = 2.0 * eta_re;
    let mut rng = ChaCha8Rng::seed_from_u64(BAE_SEED ^ n as u64);
    (0..n_starts)
        .map(|k| {
            let mut us: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-h..h), rng.random_range(-w..=w)))
                .collect();
            if k % 3 != 0 {
                for j in 0..n / 2 {
                    us[n - 1 - j] = us[j].conj();
                }
                if n % 2 == 1 {
                    us[n / 2].im = 0.0;
                }
            }
            if k % 3 == 2 {
                us = string_seed(n, eta_re, &mut rng);
            }
            us
        })
        .collect()
}

/// Strings `c + i Re η (m - (L-1)/2)` over a random partition of `n`, slightly
/// perturbed.
fn string_seed(n: usize, eta_re: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = rng.random_range(1..=n - out.len());
        let center = rng.random_range(-h..h);
        for m in 0..len {
            let im = eta_re * (m as f64 - (len - 1) as f64 / 2.0);
            out.push(Complex64::new(
                center + rng.random_range(-1e-3..1e-3),
                im + rng.random_range(-1e-3..1e-3),
            ));
        }
    }
    out
}

/// Multi-start Newton on the Bethe equations.
///
/// A third of the seeds are drawn on `Re u ∈ [-π/2, π/2)`,
/// `Im u ∈ [-2 Re η, 2 Re η]`, a third are the same draws made conjugate
/// symmetric, and the rest are perturbed strings.
/// Every distinct solution is checked against the joint eigenbasis at the
/// probe point; only those reproducing some `Λ(u0)` are kept.
pub fn solve_bae(params: &ModelParams<f64>, n_starts: usize) -> Result<BaeReport, BetheError> {
    if !params.is_homogeneous() {
        return Err(BetheError::Inhomogeneous);
    }
    params.check_dense_cap(MAX_SITES)?;
    let eta = params.eta();
    let n = params.n_sites();
    let opts = NewtonOptions {
        tolerance: 1e-11,
        max_iterations: 80,
        ..NewtonOptions::default()
    };
    let printed = |x: &[Complex64]| residual_u(x, eta);
    let cleared = |x: &[Complex64]| cleared_u(x, eta);
    let ratio = |x: &[Complex64]| ratio_u(x, eta);
    let mut converged: Vec<Vec<Complex64>> = seeds(n, eta.re, n_starts)
        .into_par_iter()
        .flat_map_iter(|s| {
            let a = newton(s.clone(), printed, |x| numeric_jacobian(x, &printed), opts);
            let b = newton(s.clone(), cleared, |x| numeric_jacobian(x, &cleared), opts);
            let c = newton(s, ratio, |x| numeric_jacobian(x, &ratio), opts);
            a.into_iter().chain(b).chain(c).map(|r| r.x)
        })
        .collect();
    // a root pair on the zeros of a(λ) and d(λ) cancels in the T-Q relation
    // but makes the equations 0/0; only the remaining roots are solved for
    let pair = [Complex64::i() * eta / 2.0, -Complex64::i() * eta / 2.0];
    let full = |free: &[Complex64]| -> Vec<Complex64> { pair.iter().chain(free).copied().collect() };
    let res_free = |x: &[Complex64]| cleared_u(&full(x), eta)[2..].to_vec();
    if n == 2 {
        converged.push(pair.to_vec());
    } else {
        converged.extend(
            seeds(n - 2, eta.re, n_starts / 2)
                .into_par_iter()
                .filter_map(|s| newton(s, res_free, |x| numeric_jacobian(x, &res_free), opts).ok())
                .map(|r| full(&r.x))
                .collect::<Vec<_>>(),
        );
    }
    let converged: Vec<Vec<Complex64>> = converged
        .into_iter()
        .map(|x| canonical(&x))
        .filter(|us| {
            (0..us.len()).all(|a| (a + 1..us.len()).all(|b| (us[a] - us[b]).norm() > COINCIDE))
        })
        .collect();
    let n_converged = converged.len();
    let mut distinct: Vec<Vec<Complex64>> = Vec::new();
    for us in converged {
        if !distinct.iter().any(|d| same_multiset(d, &us)) {
            distinct.push(us);
        }
    }

    let spectrum = joint_eigenbasis(params, DEFAULT_PROBE)?;
    let probe = spectrum.probe();
    let targets: Vec<Complex64> = spectrum.records().iter().map(|r| r.lambda_at(probe)).collect();
    let mut hit = vec![false; targets.len()];
    let mut solutions = Vec::new();
    let mut matched_records = Vec::new();
    for us in distinct {
        let roots = BetheRoots::from_u(&us, eta);
        let Ok(value) = tq_lambda(&roots, params, probe) else {
            continue;
        };
        let best = targets
            .iter()
            .enumerate()
            .map(|(k, t)| (k, (value - t).norm() / t.norm().max(1.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((k, err)) = best {
            if err <= VALIDATE {
                hit[k] = true;
                solutions.push(roots);
                matched_records.push(k);
            }
        }
    }
    let coverage = hit.iter().filter(|h| **h).count() as f64 / targets.len() as f64;
    if coverage < 1.0 {
        log::warn!("Bethe equations: coverage {coverage:.3} of {} levels", targets.len());
    }
    Ok(BaeReport {
        solutions,
        matched_records,
        coverage,
        starts: n_starts,
        converged: n_converged,
    })
}

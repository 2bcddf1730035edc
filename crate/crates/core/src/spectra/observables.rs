use std::f64::consts::PI;

use num_complex::Complex64;

use super::roots::RootSet;
use super::SpectraError;
use crate::model::ModelParams;

const POLE: f64 = 1e-12;
const IMAG_RESIDUE: f64 = 1e-8;

/// Reduces a momentum into `[0, 2π)`.
pub fn reduce_momentum(k: f64) -> f64 {
    let r = k.rem_euclid(2.0 * PI);
    if 2.0 * PI - r < 1e-12 {
        0.0
    } else {
        r
    }
}

fn check_poles(rootset: &RootSet, params: &ModelParams<f64>) -> Result<(), SpectraError> {
    let half = params.eta() / 2.0;
    for (index, z) in rootset.roots.iter().enumerate() {
        let s = (z - half).sinh();
        if s.norm() < POLE || (z + half).sinh().norm() < POLE {
            return Err(SpectraError::Pole { index });
        }
    }
    Ok(())
}

/// `E = 2 sinh η Σ coth(z_j - η/2) + N cosh η`.
pub fn energy_from_roots(rootset: &RootSet, params: &ModelParams<f64>) -> Result<f64, SpectraError> {
    check_poles(rootset, params)?;
    let eta = params.eta();
    let sum: Complex64 = rootset
        .roots
        .iter()
        .map(|z| {
            let w = z - eta / 2.0;
            w.cosh() / w.sinh()
        })
        .sum();
    let e = eta.sinh() * 2.0 * sum + eta.cosh() * params.n_sites() as f64;
    if e.im.abs() > IMAG_RESIDUE * (1.0 + e.re.abs()) {
        return Err(SpectraError::ComplexEnergy(e.im));
    }
    Ok(e.re)
}

/// Momentum from the roots, in `[0, 2π)`.
///
/// The roots fix `Λ(0)^2 = (-1)^{N-1} ∏ sinh(z_l - η/2) / sinh(z_l + η/2)` and
/// hence `k` modulo `π`; the branch is chosen by the sign of `Λ_0`, so the
/// result equals `-i ln Λ(0)`.
pub fn momentum_from_roots(rootset: &RootSet, params: &ModelParams<f64>) -> Result<f64, SpectraError> {
    check_poles(rootset, params)?;
    let half = params.eta() / 2.0;
    let n = params.n_sites();
    let log_ratio: Complex64 = rootset
        .roots
        .iter()
        .map(|z| ((z - half).sinh() / (z + half).sinh()).ln())
        .sum();
    let parity = if n % 2 == 0 { PI / 2.0 } else { 0.0 };
    let base = log_ratio.im / 2.0 + parity;
    let lambda_at_zero = rootset
        .roots
        .iter()
        .fold(rootset.lambda0, |acc, z| acc * (half - z).sinh());
    let target = lambda_at_zero.arg();
    let distance = |k: f64| (Complex64::from_polar(1.0, k) - Complex64::from_polar(1.0, target)).norm();
    let k = if distance(base) <= distance(base + PI) {
        base
    } else {
        base + PI
    };
    Ok(reduce_momentum(k))
}

use serde::{Deserialize, Serialize};

use super::density::{DensityProfile, ExcitationSpec};
use super::energy::epsilon;
use super::quadrature::GaussLegendre;
use super::{check_eta, series, ThermoError};
use crate::scalar::{cx, Cx, Real};

fn zeta_series<T: Real>(t: T, ep: T) -> T {
    series(|k| {
        let kf = T::lit(k as f64);
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        sign * (T::two() * kf * t).sin() / kf * (-ep * kf).exp() * (ep * kf).tanh()
    })
}

/// `-(i/2) ln[-cosh(it + η₊/2) / cosh(it - η₊/2)]` on the principal branch.
fn log_term_principal<T: Real>(t: T, ep: T) -> T {
    let h = ep / T::two();
    let ratio = -(cx(h, t).cosh() / cx(-h, t).cosh());
    (cx(T::zero(), -T::one() / T::two()) * ratio.ln()).re
}

/// Single-hole momentum `ζ(t)` on the branch continuous from `ζ(0) = π/2`.
pub fn zeta<T: Real>(t: T, ep: T) -> T {
    let h = ep / T::two();
    let phase = (t.sin() * h.sinh()).atan2(t.cos() * h.cosh());
    zeta_series(t, ep) + T::FRAC_PI_2() + phase
}

/// `ζ(t)` with the principal logarithm, before unwrapping.
pub fn zeta_principal<T: Real>(t: T, ep: T) -> T {
    zeta_series(t, ep) + log_term_principal(t, ep)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint<T> {
    pub t: T,
    pub epsilon: T,
    pub zeta: T,
}

/// `(t, ε(t), ζ(t))` on `points` uniform nodes of `[-π/2, π/2]`.
///
/// `ζ` is evaluated on the principal branch and unwrapped by multiples of `π`
/// outward from the node nearest `t = 0`, where `ζ = π/2`.
pub fn dispersion<T: Real>(ep: T, points: usize) -> Result<Vec<DispersionPoint<T>>, ThermoError> {
    check_eta(ep)?;
    if points == 0 {
        return Ok(Vec::new());
    }
    let ts: Vec<T> = if points == 1 {
        vec![T::zero()]
    } else {
        let step = T::PI() / T::lit((points - 1) as f64);
        (0..points)
            .map(|j| -T::FRAC_PI_2() + step * T::lit(j as f64))
            .collect()
    };
    let raw: Vec<T> = ts.iter().map(|&t| zeta_principal(t, ep)).collect();
    let centre = ts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite grid"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let pi = T::PI();
    let mut zetas = raw.clone();
    let shift_to = |value: T, reference: T| value + pi * ((reference - value) / pi).round();
    zetas[centre] = shift_to(raw[centre], zeta(ts[centre], ep));
    for i in centre + 1..points {
        zetas[i] = shift_to(raw[i], zetas[i - 1]);
    }
    for i in (0..centre).rev() {
        zetas[i] = shift_to(raw[i], zetas[i + 1]);
    }
    Ok(ts
        .iter()
        .zip(&zetas)
        .map(|(&t, &z)| DispersionPoint {
            t,
            epsilon: epsilon(t, ep),
            zeta: z,
        })
        .collect())
}

/// Thermodynamic momentum of an odd-`N` state from its density and hole positions.
///
/// `-(i/2) N ∫ ln[R(x)] ρ(x) dx - (i/2) Σ_t ln r(t)` with principal logarithms,
/// where `R` pairs the roots `±η₊ + ix` and `r(t)` is the factor of an
/// imaginary root `it`.
pub fn finite_momentum_limit<T: Real>(
    profile: &DensityProfile<T>,
    ep: T,
    n_sites: usize,
    quad: &GaussLegendre<T>,
) -> Result<T, ThermoError> {
    check_eta(ep)?;
    let holes: Vec<T> = match profile.spec {
        ExcitationSpec::AfOddGround => Vec::new(),
        ExcitationSpec::AfOddExcited { p, q } => vec![p, q],
        other => {
            return Err(ThermoError::CaseMismatch {
                case: other.name(),
                detail: "the odd-N momentum".into(),
            })
        }
    };
    let eta = cx(ep, T::PI());
    let half = eta / T::two();
    let factor = |z: Cx<T>| (z + half).sinh() / (z - half).sinh();
    let minus_half_i = cx(T::zero(), -T::one() / T::two());
    let bulk: Cx<T> = quad.try_over_strip(|x| {
        let r = factor(cx(ep, x)) * factor(cx(-ep, x));
        Ok::<_, ThermoError>(r.ln() * profile.density_at(x)?)
    })?;
    let n = T::lit(n_sites as f64);
    let mut k = minus_half_i * bulk * n;
    for t in holes {
        k = k + minus_half_i * factor(cx(T::zero(), t)).ln();
    }
    Ok(k.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_branch_at_origin() {
        assert!((zeta(0.0, 0.75) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        // the principal value sits on the cut of ln(-1), so only the class mod π is fixed
        let r = zeta_principal(0.0f64, 0.75).rem_euclid(std::f64::consts::PI);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn single_point_dispersion() {
        let d = dispersion(1.31696, 1).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].t, 0.0);
        assert!((2.0 * d[0].zeta - std::f64::consts::PI).abs() < 1e-14);
    }
}

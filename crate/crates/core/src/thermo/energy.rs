use serde::{Deserialize, Serialize};

use super::density::{DensityProfile, ExcitationSpec};
use super::quadrature::GaussLegendre;
use super::{check_eta, series, series_fixed, ThermoError};
use crate::model::{ModelParams, Regime};
use crate::scalar::{coth, cx, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundCase {
    Ferro,
    AfEven,
    AfOdd,
}

impl GroundCase {
    pub fn for_params<T: Real>(params: &ModelParams<T>) -> Self {
        match (params.regime(), params.n_sites() % 2) {
            (Regime::Ferromagnetic, _) => Self::Ferro,
            (Regime::Antiferromagnetic, 0) => Self::AfEven,
            _ => Self::AfOdd,
        }
    }
}

/// Denominator of the ferromagnetic pair gap `4 sinh η sinh((n-1)η) / (cosh((n-1)η) - c cos 2α)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapVariant {
    /// `c = 2`.
    Printed,
    /// `c = 1`, whose minimum at `n = 2`, `α = π/2` is `4 sinh η tanh(η/2)`.
    UnitCoefficient,
}

/// `-N cosh η + 2 sinh η`.
pub fn ferro_ground_energy<T: Real>(n_sites: usize, eta: T) -> T {
    -T::lit(n_sites as f64) * eta.cosh() + T::two() * eta.sinh()
}

fn alternating_tanh<T: Real>(k: usize, ep: T) -> T {
    let kf = T::lit(k as f64);
    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
    sign * (-ep * kf).exp() * (ep * kf).tanh()
}

fn bulk_series<T: Real>(ep: T) -> T {
    series(|k| {
        let kf = T::lit(k as f64);
        (-T::two() * ep * kf).exp() * (ep * kf).tanh()
    })
}

/// Even-`N` antiferromagnetic ground energy (`η = η₊ + iπ`).
pub fn af_even_ground_energy<T: Real>(n_sites: usize, ep: T) -> T {
    let n = T::lit(n_sites as f64);
    let four = T::lit(4.0);
    let s = ep.sinh();
    -four * n * s * bulk_series(ep) - four * s * series(|k| alternating_tanh(k, ep))
        + T::two() * s * (ep / T::two()).tanh()
        - n * ep.cosh()
}

/// Odd-`N` antiferromagnetic ground energy.
pub fn af_odd_ground_energy<T: Real>(n_sites: usize, ep: T) -> T {
    let n = T::lit(n_sites as f64);
    -T::lit(4.0) * n * ep.sinh() * bulk_series(ep) - n * ep.cosh()
}

/// Thermodynamic ground energy for the case, checked against the chain.
pub fn ground_energy<T: Real>(case: GroundCase, params: &ModelParams<T>) -> Result<T, ThermoError> {
    let expected = GroundCase::for_params(params);
    if case != expected {
        return Err(ThermoError::CaseMismatch {
            case: match case {
                GroundCase::Ferro => "ferro",
                GroundCase::AfEven => "af-even",
                GroundCase::AfOdd => "af-odd",
            },
            detail: format!("N = {} in the {} regime", params.n_sites(), params.regime()),
        });
    }
    let n = params.n_sites();
    let ep = params.eta_re();
    check_eta(ep)?;
    Ok(match case {
        GroundCase::Ferro => ferro_ground_energy(n, ep),
        GroundCase::AfEven => af_even_ground_energy(n, ep),
        GroundCase::AfOdd => af_odd_ground_energy(n, ep),
    })
}

/// Ferromagnetic pair gap `ΔE₁(n, α)`.
pub fn ferro_gap<T: Real>(n: u32, alpha: T, eta: T, variant: GapVariant) -> T {
    let m = T::lit(n as f64 - 1.0) * eta;
    let c = match variant {
        GapVariant::Printed => T::two(),
        GapVariant::UnitCoefficient => T::one(),
    };
    T::lit(4.0) * eta.sinh() * m.sinh() / (m.cosh() - c * (T::two() * alpha).cos())
}

/// Even-`N` gapless branch `ΔE₂(β)`.
pub fn delta_e2<T: Real>(beta: T, ep: T) -> T {
    let s = ep.sinh();
    let two_beta = T::two() * beta;
    let sum = series(|k| alternating_tanh(k, ep) * ((two_beta * T::lit(k as f64)).cos() - T::one()));
    -T::lit(4.0) * s * sum - T::two() * s * ((ep / T::two()).tanh() - s / (ep.cosh() + two_beta.cos()))
}

/// Single-hole energy `ε(t)` for odd `N`.
pub fn epsilon<T: Real>(t: T, ep: T) -> T {
    let s = ep.sinh();
    let two_t = T::two() * t;
    let sum = series(|k| alternating_tanh(k, ep) * (two_t * T::lit(k as f64)).cos());
    -T::lit(4.0) * s * sum + T::two() * s * s / (ep.cosh() + two_t.cos())
}

/// `ΔE₃` at `p = q = 0`; `truncation = None` sums to the series floor.
pub fn delta_e3_min<T: Real>(ep: T, truncation: Option<usize>) -> T {
    let s = ep.sinh();
    let sum = match truncation {
        Some(k) => series_fixed(|k| alternating_tanh(k, ep), k),
        None => series(|k| alternating_tanh(k, ep)),
    };
    -T::lit(8.0) * s * sum + T::lit(4.0) * s * (ep / T::two()).tanh()
}

/// Excitation energy above the ground state of the same case.
///
/// `eta` is the full anisotropy; the regime must match the case.
pub fn excitation_energy<T: Real>(
    spec: ExcitationSpec<T>,
    eta: Cx<T>,
    variant: GapVariant,
) -> Result<T, ThermoError> {
    spec.validate()?;
    let regime = Regime::classify(eta).map_err(|e| ThermoError::CaseMismatch {
        case: spec.name(),
        detail: e.to_string(),
    })?;
    let ferro = matches!(spec, ExcitationSpec::FerroGround | ExcitationSpec::FerroExcited { .. });
    if ferro != (regime == Regime::Ferromagnetic) {
        return Err(ThermoError::CaseMismatch {
            case: spec.name(),
            detail: format!("the {regime} regime"),
        });
    }
    let ep = eta.re;
    check_eta(ep)?;
    Ok(match spec {
        ExcitationSpec::FerroGround | ExcitationSpec::AfOddGround => T::zero(),
        ExcitationSpec::FerroExcited { n, alpha } => ferro_gap(n, alpha, ep, variant),
        ExcitationSpec::AfEven { beta } => delta_e2(beta, ep),
        ExcitationSpec::AfOddExcited { p, q } => epsilon(p, ep) + epsilon(q, ep),
    })
}

fn bulk_integral<T: Real>(profile: &DensityProfile<T>, quad: &GaussLegendre<T>) -> Result<T, ThermoError> {
    let eta = profile.eta;
    let half = cx(-eta / T::two(), T::zero());
    let v: Cx<T> = quad.try_over_strip(|x| Ok(coth(cx(T::zero(), x) + half) * profile.density_at(x)?))?;
    let n = T::lit(profile.n_sites as f64);
    Ok((v * (T::two() * n * eta.sinh())).re + n * eta.cosh())
}

/// `2N sinh η ∫ coth(ix - η/2) ρ(x) dx + N cosh η` over a ferromagnetic ground density.
pub fn ferro_ground_integral_energy<T: Real>(
    profile: &DensityProfile<T>,
    quad: &GaussLegendre<T>,
) -> Result<T, ThermoError> {
    bulk_integral(profile, quad)
}

/// Integral energy of a ferromagnetic pair state, bulk plus the two pair roots.
pub fn ferro_excited_integral_energy<T: Real>(
    profile: &DensityProfile<T>,
    quad: &GaussLegendre<T>,
) -> Result<T, ThermoError> {
    let ExcitationSpec::FerroExcited { n, alpha } = profile.spec else {
        return Err(ThermoError::CaseMismatch {
            case: profile.spec.name(),
            detail: "a pair-excited integral".into(),
        });
    };
    let eta = profile.eta;
    let shift = T::lit(n as f64) * eta / T::two();
    let pair = coth(cx(shift - eta / T::two(), alpha)) + coth(cx(-shift - eta / T::two(), alpha));
    Ok(bulk_integral(profile, quad)? + T::two() * eta.sinh() * pair.re)
}

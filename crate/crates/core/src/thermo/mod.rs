//! Thermodynamic-limit densities, energies, gaps and dispersion.
//!
//! Everything here is a pure function of its inputs and generic over the
//! scalar type. Antiferromagnetic formulas take `η₊ = Re η`.

mod density;
mod energy;
mod kernels;
mod momentum;
mod quadrature;

use thiserror::Error;

pub use density::{closed_form_density, solve_density, DensityProfile, ExcitationSpec};
pub use energy::{
    af_even_ground_energy, af_odd_ground_energy, delta_e2, delta_e3_min, epsilon, excitation_energy,
    ferro_excited_integral_energy, ferro_gap, ferro_ground_energy, ferro_ground_integral_energy,
    ground_energy, GapVariant, GroundCase,
};
pub use kernels::{kernel_fourier, kernels, KernelKind, KernelValues};
pub use momentum::{dispersion, finite_momentum_limit, zeta, zeta_principal, DispersionPoint};
pub use quadrature::GaussLegendre;

use crate::scalar::Real;

/// Terms below this magnitude end a series.
pub const SERIES_FLOOR: f64 = 1e-15;
/// Hard cap on series length.
pub const SERIES_CAP: usize = 10_000;
/// Default Gauss-Legendre order for density integrals.
pub const QUADRATURE_NODES: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("kernel pole within {distance:e} of x = {x}")]
    Pole { x: f64, distance: f64 },
    #[error("kernel coefficient vanishes at k = {0}")]
    VanishingKernel(i64),
    #[error("{name} = {value} outside [-π/2, π/2)")]
    OutOfStrip { name: &'static str, value: f64 },
    #[error("string length n = {0} must be at least 2")]
    StringLength(u32),
    #[error("case {case} does not apply to {detail}")]
    CaseMismatch { case: &'static str, detail: String },
    #[error("η₊ must be positive, got {0}")]
    Eta(f64),
    #[error("density has imaginary part {0:e}")]
    ComplexDensity(f64),
}

/// `Σ_{k≥1} f(k)`, stopped after three consecutive `|f(k)| < SERIES_FLOOR`
/// or at `SERIES_CAP`.
///
/// A single small term is not enough: at `t = π/4` every odd term of a
/// `cos 2kt` series vanishes.
pub fn series<T: Real>(f: impl Fn(usize) -> T) -> T {
    let floor = T::lit(SERIES_FLOOR);
    let mut acc = T::zero();
    let mut quiet = 0;
    for k in 1..=SERIES_CAP {
        let term = f(k);
        acc = acc + term;
        quiet = if term.abs() < floor { quiet + 1 } else { 0 };
        if quiet == 3 {
            break;
        }
    }
    acc
}

/// `Σ_{k=1}^{K} f(k)`.
pub fn series_fixed<T: Real>(f: impl Fn(usize) -> T, k_max: usize) -> T {
    (1..=k_max).fold(T::zero(), |acc, k| acc + f(k))
}

pub(crate) fn check_eta<T: Real>(eta: T) -> Result<(), ThermoError> {
    if eta > T::zero() && eta.is_finite() {
        Ok(())
    } else {
        Err(ThermoError::Eta(eta.to_f64().unwrap_or(f64::NAN)))
    }
}

pub(crate) fn check_strip<T: Real>(name: &'static str, v: T) -> Result<(), ThermoError> {
    let half = T::FRAC_PI_2();
    if v >= -half && v < half {
        Ok(())
    } else {
        Err(ThermoError::OutOfStrip {
            name,
            value: v.to_f64().unwrap_or(f64::NAN),
        })
    }
}

use serde::{Deserialize, Serialize};

use super::kernels::{kernel_fourier, KernelKind};
use super::{check_eta, check_strip, ThermoError};
use crate::scalar::{cx, cre, Cx, Real};

const IMAG_FLOOR: f64 = 1e-12;

/// Which root configuration a density describes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum ExcitationSpec<T> {
    FerroGround,
    /// Pair at `±nη/2 + iα`, `n ≥ 2`.
    FerroExcited { n: u32, alpha: T },
    /// Even `N`, lone imaginary root `iβ`; `β = 0` is the ground state.
    AfEven { beta: T },
    AfOddGround,
    /// Odd `N`, imaginary roots `ip`, `iq`.
    AfOddExcited { p: T, q: T },
}

impl<T: Real> ExcitationSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FerroGround => "ferro-ground",
            Self::FerroExcited { .. } => "ferro-excited",
            Self::AfEven { .. } => "af-even",
            Self::AfOddGround => "af-odd-ground",
            Self::AfOddExcited { .. } => "af-odd-excited",
        }
    }

    pub fn validate(&self) -> Result<(), ThermoError> {
        match *self {
            Self::FerroExcited { n, alpha } => {
                if n < 2 {
                    return Err(ThermoError::StringLength(n));
                }
                check_strip("alpha", alpha)
            }
            Self::AfEven { beta } => check_strip("beta", beta),
            Self::AfOddExcited { p, q } => {
                check_strip("p", p)?;
                check_strip("q", q)
            }
            _ => Ok(()),
        }
    }

    /// `ρ̃(0)`, the integral of the density.
    pub fn normalization(&self, n_sites: usize) -> T {
        let n = T::lit(n_sites as f64);
        match self {
            Self::FerroGround => (n - T::one()) / n,
            Self::FerroExcited { .. } => (n - T::lit(3.0)) / n,
            Self::AfEven { .. } => T::lit(0.5) - T::one() / n,
            Self::AfOddGround => (n - T::one()) / (T::two() * n),
            Self::AfOddExcited { .. } => (n - T::lit(3.0)) / (T::two() * n),
        }
    }

    /// Sum of `e^{-2ikt}` over the isolated roots driving the density.
    fn phases(&self, k: i64) -> Cx<T> {
        let ph = |t: T| cx(T::zero(), -T::two() * T::lit(k as f64) * t).exp();
        match *self {
            Self::FerroExcited { alpha, .. } => ph(alpha),
            Self::AfEven { beta } => ph(beta),
            Self::AfOddExcited { p, q } => ph(p) + ph(q),
            _ => cre(T::zero()),
        }
    }
}

/// Fourier coefficients `ρ̃(k)`, `|k| ≤ K`, of a root density on `[-π/2, π/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile<T> {
    pub spec: ExcitationSpec<T>,
    pub n_sites: usize,
    pub eta: T,
    truncation: usize,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> DensityProfile<T> {
    fn from_fn(
        spec: ExcitationSpec<T>,
        n_sites: usize,
        eta: T,
        truncation: usize,
        f: impl Fn(i64) -> Result<Cx<T>, ThermoError>,
    ) -> Result<Self, ThermoError> {
        let kk = truncation as i64;
        let coeffs = (-kk..=kk).map(f).collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            spec,
            n_sites,
            eta,
            truncation,
            coeffs,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `ρ̃(k)`; zero beyond the truncation.
    pub fn coeff(&self, k: i64) -> Cx<T> {
        let kk = self.truncation as i64;
        if k.abs() > kk {
            cre(T::zero())
        } else {
            self.coeffs[(k + kk) as usize]
        }
    }

    /// `ρ(x) = (1/π) Σ_k ρ̃(k) e^{2ikx}`.
    pub fn density_at(&self, x: T) -> Result<T, ThermoError> {
        let kk = self.truncation as i64;
        let mut acc = cre(T::zero());
        for k in -kk..=kk {
            acc = acc + self.coeff(k) * cx(T::zero(), T::two() * T::lit(k as f64) * x).exp();
        }
        let v = acc / T::PI();
        let scale = T::one() + v.re.abs();
        if v.im.abs() > T::lit(IMAG_FLOOR) * scale * T::lit(self.truncation.max(1) as f64) {
            return Err(ThermoError::ComplexDensity(v.im.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(v.re)
    }

    /// Largest `|ρ̃(-k) - ρ̃(k)*|`.
    pub fn hermiticity_defect(&self) -> T {
        let kk = self.truncation as i64;
        (0..=kk).fold(T::zero(), |m, k| m.max((self.coeff(-k) - self.coeff(k).conj()).norm()))
    }
}

/// Closed-form coefficients for each case.
pub fn closed_form_density<T: Real>(
    spec: ExcitationSpec<T>,
    eta: T,
    n_sites: usize,
    truncation: usize,
) -> Result<DensityProfile<T>, ThermoError> {
    check_eta(eta)?;
    spec.validate()?;
    let nf = T::lit(n_sites as f64);
    let norm = spec.normalization(n_sites);
    DensityProfile::from_fn(spec, n_sites, eta, truncation, |k| {
        if k == 0 {
            return Ok(cre(norm));
        }
        let ka = T::lit(k.unsigned_abs() as f64);
        let e = |m: T| (-m * eta * ka).exp();
        let alt = if k.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        let bulk_af = alt * e(T::one()) / (T::one() + e(T::two()));
        Ok(match spec {
            ExcitationSpec::FerroGround => cre(e(T::one())),
            ExcitationSpec::FerroExcited { n, .. } => {
                let nn = T::lit(n as f64);
                cre(e(T::one())) - spec.phases(k) * ((e(nn) + e(nn - T::two())) / nf)
            }
            ExcitationSpec::AfEven { .. } | ExcitationSpec::AfOddGround | ExcitationSpec::AfOddExcited { .. } => {
                cre(bulk_af) - spec.phases(k) / (nf * (T::one() + e(T::two())))
            }
        })
    })
}

/// Solves the Fourier-space density relation mode by mode.
///
/// `sigma(k)` is `σ̃(k)` of the inhomogeneity density (`1` for all `k` in the
/// homogeneous limit). The `k = 0` mode is fixed by the normalization.
pub fn solve_density<T: Real>(
    spec: ExcitationSpec<T>,
    sigma: impl Fn(i64) -> Cx<T>,
    eta: T,
    n_sites: usize,
    truncation: usize,
) -> Result<DensityProfile<T>, ThermoError> {
    check_eta(eta)?;
    spec.validate()?;
    let nf = T::lit(n_sites as f64);
    let norm = spec.normalization(n_sites);
    let b = |n: u32, k: i64| kernel_fourier(KernelKind::B, n, k, eta);
    let c = |n: u32, k: i64| kernel_fourier(KernelKind::C, n, k, eta);
    DensityProfile::from_fn(spec, n_sites, eta, truncation, |k| {
        if k == 0 {
            return Ok(cre(norm));
        }
        let drive = b(2, k) * sigma(k) * nf;
        let (num, den) = match spec {
            // N b̃₁ρ̃ + e^{-2ikα}(b̃_{n-1} + b̃_{n+1}) = N b̃₂σ̃
            ExcitationSpec::FerroGround => (drive, b(1, k) * nf),
            ExcitationSpec::FerroExcited { n, .. } => {
                (drive - spec.phases(k) * (b(n - 1, k) + b(n + 1, k)), b(1, k) * nf)
            }
            // -N(c̃₁ + c̃₃)ρ̃ - Σ e^{-2ikt} c̃₁ = N b̃₂σ̃
            _ => (-(drive + spec.phases(k) * c(1, k)), (c(1, k) + c(3, k)) * nf),
        };
        if den.norm() == T::zero() || !den.norm().is_finite() {
            return Err(ThermoError::VanishingKernel(k));
        }
        Ok(num / den)
    })
}

//! Eigenvalue functions `Λ(u)` as trigonometric polynomials.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// `Λ(u) = Σ_m c_m exp((2m - N + 1) u)` for `m = 0..N`.
///
/// Degree `N - 1` in `e^u` with only the parity-compatible powers, which is the
/// exact functional form of every transfer-matrix eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoly {
    coeffs: Vec<Complex64>,
}

impl LambdaPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    /// Interpolates from values at the nodes `u_k = iπk/N`, `k = 0..N`.
    ///
    /// With `w = e^{2u}` the nodes are the `N`-th roots of unity, so the
    /// coefficients follow from an inverse DFT.
    pub fn from_unit_circle_samples(values: &[Complex64]) -> Self {
        let n = values.len();
        let nodes = Self::unit_circle_nodes(n);
        let scaled: Vec<Complex64> = values
            .iter()
            .zip(&nodes)
            .map(|(v, u)| v * (u * (n as f64 - 1.0)).exp())
            .collect();
        let coeffs = (0..n)
            .map(|m| {
                scaled
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let angle = -2.0 * std::f64::consts::PI * ((m * k) % n) as f64 / n as f64;
                        p * Complex64::from_polar(1.0, angle)
                    })
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect();
        Self { coeffs }
    }

    pub fn unit_circle_nodes(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::new(0.0, std::f64::consts::PI * k as f64 / n as f64))
            .collect()
    }

    /// Number of sites `N` (one more than the degree).
    pub fn n_sites(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn exponent(&self, m: usize) -> f64 {
        2.0 * m as f64 - (self.coeffs.len() as f64 - 1.0)
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Complex64::zero(), |acc, (m, c)| {
                acc + c * (u * self.exponent(m)).exp()
            })
    }

    pub fn derivative(&self, u: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Complex64::zero(), |acc, (m, c)| {
                let p = self.exponent(m);
                acc + c * p * (u * p).exp()
            })
    }
}

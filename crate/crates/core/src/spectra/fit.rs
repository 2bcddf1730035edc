use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::SpectraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    /// `A e^{-bN}`
    Exponential,
    /// `A N^{-b}`
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: DecayModel,
    pub amplitude: f64,
    pub rate: f64,
    /// RMS residual of `ln δ`.
    pub rms_residual: f64,
}

impl FitResult {
    pub fn eval(&self, n: f64) -> f64 {
        match self.model {
            DecayModel::Exponential => self.amplitude * (-self.rate * n).exp(),
            DecayModel::Power => self.amplitude * n.powf(-self.rate),
        }
    }
}

/// Least-squares fit of `ln δ` against `N` (exponential) or `ln N` (power).
pub fn fit_decay(data: &[(f64, f64)], model: DecayModel) -> Result<FitResult, SpectraError> {
    if data.len() < 3 {
        return Err(SpectraError::TooFewPoints(data.len()));
    }
    if let Some(&(n, value)) = data.iter().find(|(n, d)| !(*d > 0.0) || !(*n > 0.0)) {
        return Err(SpectraError::NonPositive { n, value });
    }
    let xs: Vec<f64> = data
        .iter()
        .map(|&(n, _)| match model {
            DecayModel::Exponential => n,
            DecayModel::Power => n.ln(),
        })
        .collect();
    let ys: Vec<f64> = data.iter().map(|&(_, d)| d.ln()).collect();
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let normal = Matrix2::new(m, sx, sx, sxx);
    let sol = normal
        .lu()
        .solve(&Vector2::new(sy, sxy))
        .ok_or(SpectraError::TooFewPoints(data.len()))?;
    let (intercept, slope) = (sol[0], sol[1]);
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(FitResult {
        model,
        amplitude: intercept.exp(),
        rate: -slope,
        rms_residual: rms,
    })
}

//! JSON document for a list of eigen records.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::Spectrum;
use super::roots::RootTag;
use crate::model::{ModelError, ModelParams, Regime};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDoc {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexDoc> for Complex64 {
    fn from(z: ComplexDoc) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub n_sites: usize,
    pub eta: ComplexDoc,
    pub regime: Regime,
    /// Imaginary parts of the inhomogeneities.
    pub thetas: Vec<f64>,
}

impl From<&ModelParams<f64>> for ParamsDoc {
    fn from(p: &ModelParams<f64>) -> Self {
        Self {
            n_sites: p.n_sites(),
            eta: p.eta().into(),
            regime: p.regime(),
            thetas: p.thetas().iter().map(|t| t.im).collect(),
        }
    }
}

impl ParamsDoc {
    pub fn to_params(&self) -> Result<ModelParams<f64>, ModelError> {
        let thetas = self.thetas.iter().map(|&t| Complex64::new(0.0, t)).collect();
        ModelParams::new(self.n_sites, self.eta.into(), thetas)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordDoc {
    pub index: usize,
    pub energy: f64,
    pub momentum: f64,
    pub lambda0: Option<ComplexDoc>,
    pub roots: Vec<ComplexDoc>,
    pub classification: Vec<RootTag>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub params: ParamsDoc,
    pub records: Vec<RecordDoc>,
}

impl From<&Spectrum> for SpectrumDoc {
    fn from(s: &Spectrum) -> Self {
        let records = s
            .records()
            .iter()
            .map(|r| {
                let (lambda0, roots, classification) = match &r.roots {
                    Some(rs) => (
                        Some(rs.lambda0.into()),
                        rs.roots.iter().map(|&z| z.into()).collect(),
                        rs.classification
                            .as_ref()
                            .map(|c| c.tags.clone())
                            .unwrap_or_default(),
                    ),
                    None => (None, Vec::new(), Vec::new()),
                };
                RecordDoc {
                    index: r.index,
                    energy: r.energy,
                    momentum: r.momentum,
                    lambda0,
                    roots,
                    classification,
                }
            })
            .collect();
        Self {
            params: s.params().into(),
            records,
        }
    }
}

impl SpectrumDoc {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

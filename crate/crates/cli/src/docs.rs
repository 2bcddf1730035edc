//! JSON documents written by the subcommands.
//!
//! The shipped schema (`schema/xxz-output.schema.json`) describes every type
//! here plus the spectrum document of the core crate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use xxz_roots::spectra::json::{ComplexDoc, ParamsDoc};
use xxz_roots::spectra::FitResult;
use xxz_roots::ExcitationSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdMatch {
    pub record: usize,
    pub energy: f64,
    pub energy_delta: f64,
    pub root_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationDoc {
    pub kind: String,
    pub params: ParamsDoc,
    pub record: usize,
    pub steps: usize,
    pub start_lambda0: ComplexDoc,
    pub start_roots: Vec<ComplexDoc>,
    pub lambda0: ComplexDoc,
    pub roots: Vec<ComplexDoc>,
    /// Largest scaled functional-relation residual at `θ = 0`.
    pub residual: f64,
    pub energy: f64,
    pub ed_match: EdMatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaeSolution {
    pub lambdas: Vec<ComplexDoc>,
    pub u: Vec<ComplexDoc>,
    pub record: usize,
    pub energy: f64,
    /// `None` for solutions on which the equations are `0/0`.
    pub max_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaeDoc {
    pub kind: String,
    pub params: ParamsDoc,
    pub seed: u64,
    pub starts: usize,
    pub converged: usize,
    pub coverage: f64,
    pub solutions: Vec<BaeSolution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoDoc {
    pub kind: String,
    pub spec: ExcitationSpec,
    pub n_sites: usize,
    /// `Re η` (ferro) or `η₊` (af).
    pub eta: f64,
    pub truncation: usize,
    pub variant: String,
    pub ground_energy: f64,
    pub excitation_energy: f64,
    /// Quadrature energy of the density, ferromagnetic cases only.
    pub integral_energy: Option<f64>,
    /// Largest `|ρ̃_solve(k) - ρ̃_closed(k)|`.
    pub solve_closed_gap: f64,
    pub coefficients: Vec<Coefficient>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: usize,
    pub record: usize,
    /// `Im z` of the pair, ferro-excited only.
    pub alpha: Option<f64>,
    pub energy_ed: f64,
    pub energy_formula: f64,
    pub deviation: f64,
    pub included: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDoc {
    pub kind: String,
    pub case: String,
    pub eta: f64,
    pub points: Vec<FitPoint>,
    pub fit: FitResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: Option<f64>,
    pub expected: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub figure: String,
    pub version: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Manifest {
    pub fn new(figure: &str) -> Self {
        Self {
            kind: "manifest".into(),
            figure: figure.into(),
            version: xxz_roots::VERSION.into(),
            parameters: BTreeMap::new(),
            seeds: BTreeMap::new(),
            outputs: Vec::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.into(), v);
    }

    /// Records a check; `measured` is dropped when not finite.
    pub fn check(&mut self, name: &str, measured: Option<f64>, expected: &str, detail: String, passed: bool) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            measured: measured.filter(|m| m.is_finite()),
            expected: expected.into(),
            detail,
            passed,
        });
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

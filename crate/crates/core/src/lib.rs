//! Finite-size and thermodynamic-limit analysis of the antiperiodic XXZ chain.
//!
//! [`model`] and [`thermo`] are generic over the scalar type; [`spectra`] and
//! [`bethe`] work in `f64`. The aliases below fix the scalar to `f64`.

pub mod bethe;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod spectra;
pub mod thermo;

pub use num_complex::Complex64;

/// Crate version, part of every cache key.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type ModelParams = model::ModelParams<f64>;
pub type LinearOperator = model::LinearOperator<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
pub type DensityProfile = thermo::DensityProfile<f64>;
pub type ExcitationSpec = thermo::ExcitationSpec<f64>;

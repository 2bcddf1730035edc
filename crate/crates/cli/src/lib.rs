//! Command-line front end for `xxz-roots`: configuration, cached ED runs,
//! sweeps, fits and figure pipelines.

pub mod cache;
pub mod commands;
pub mod config;
pub mod docs;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod reproduce;

/// JSON Schema covering every document the binary writes.
pub const SCHEMA: &str = include_str!("../schema/xxz-output.schema.json");

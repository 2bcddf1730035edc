//! Per-command configuration.
//!
//! A config file holds one flat table per subcommand (`[spectrum]`, `[fit]`,
//! ...). Every key of a table is also a flag of the same name; flags win.
//! Keys are merged as TOML values and then deserialized once, so a typo in
//! either source is rejected the same way.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use xxz_roots::model::{DEFAULT_DENSE_CAP, MAX_SITES};
use xxz_roots::ModelParams;

use crate::error::{CliError, Result};

/// Overrides the cache directory unless `--cache-dir` is given.
pub const CACHE_ENV: &str = "XXZ_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".xxz-cache";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKey {
    /// `η` real.
    Ferro,
    /// `η = η₊ + iπ`.
    Af,
}

macro_rules! config_table {
    (
        $(#[$meta:meta])*
        $name:ident { $( $(#[$fmeta:meta])* $field:ident : $ty:ty ),* $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
        #[serde(rename_all = "kebab-case", deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[arg(long)]
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
            /// Output directory [default: .]
            #[arg(long)]
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub out: Option<PathBuf>,
            /// Cache directory [default: $XXZ_CACHE_DIR, then .xxz-cache]
            #[arg(long)]
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub cache_dir: Option<PathBuf>,
            /// Skip reading and writing the cache
            #[arg(long)]
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub no_cache: Option<bool>,
        }
    };
}

macro_rules! model_table {
    (
        $(#[$meta:meta])*
        $name:ident { $( $(#[$fmeta:meta])* $field:ident : $ty:ty ),* $(,)? }
    ) => {
        config_table! {
            $(#[$meta])*
            $name {
                /// Chain length N
                n: usize,
                /// Re η in the ferro regime, η₊ in the af regime [default: 0.75]
                eta: f64,
                /// ferro or af [default: ferro]
                #[arg(value_enum)]
                regime: RegimeKey,
                /// Imaginary parts of θ_1..θ_N, comma separated
                #[arg(value_delimiter = ',', allow_hyphen_values = true)]
                thetas: Vec<f64>,
                /// Draw Im θ_j uniformly from [-theta-spread, theta-spread) with this seed
                theta_seed: u64,
                /// Half width for random θ [default: 0.8]
                theta_spread: f64,
                /// Largest N accepted [default: 12]
                cap: usize,
                /// Pair classification tolerance [default: min(10 e^{-Re η N/2}, Re η / 2)]
                pair_tol: f64,
                $( $(#[$fmeta])* $field: $ty, )*
            }
        }

        impl $name {
            pub fn model(&self) -> ModelKeys {
                ModelKeys {
                    n: self.n,
                    eta: self.eta,
                    regime: self.regime,
                    thetas: self.thetas.clone(),
                    theta_seed: self.theta_seed,
                    theta_spread: self.theta_spread,
                    cap: self.cap,
                    pair_tol: self.pair_tol,
                }
            }
        }
    };
}

model_table! {
    SpectrumConfig {}
}

model_table! {
    RootsConfig {
        /// Record indices to export [default: 0]
        #[arg(value_delimiter = ',')]
        records: Vec<usize>,
        /// Export every record
        all: bool,
    }
}

model_table! {
    ContinueConfig {
        /// Record of the inhomogeneous spectrum used as the seed [default: 0]
        record: usize,
        /// Linear steps from θ to 0 [default: 8]
        steps: usize,
    }
}

model_table! {
    BaeConfig {
        /// Multi-start count [default: 200]
        starts: usize,
    }
}

config_table! {
    ThermoConfig {
        /// ferro-ground, ferro-excited, af-even, af-odd-ground or af-odd-excited
        case: String,
        /// Chain length N used for normalization [default: 10]
        n: usize,
        /// Re η or η₊ [default: 0.75]
        eta: f64,
        /// String length of the ferro pair [default: 2]
        string: u32,
        /// Im of the ferro pair [default: -π/2]
        #[arg(allow_hyphen_values = true)]
        alpha: f64,
        /// Lone imaginary root of the af-even case [default: 0]
        #[arg(allow_hyphen_values = true)]
        beta: f64,
        /// First imaginary root of the af-odd excitation [default: 0]
        #[arg(allow_hyphen_values = true)]
        p: f64,
        /// Second imaginary root of the af-odd excitation [default: 0]
        #[arg(allow_hyphen_values = true)]
        q: f64,
        /// Fourier truncation K [default: 100]
        truncation: usize,
        /// Ferro gap form: printed or unit-coefficient [default: unit-coefficient]
        variant: String,
        /// Density samples on [-π/2, π/2) [default: 201]
        points: usize,
    }
}

config_table! {
    FitConfig {
        /// ferro-ground, ferro-excited, af-even or af-odd
        case: String,
        /// Chain lengths, comma separated [default: 6,8,10,12 or 5,7,9,11 for af-odd]
        #[arg(value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Re η or η₊ [default: 0.75]
        eta: f64,
        /// exponential or power [default: exponential for ferro, power for af]
        model: String,
        /// Largest N accepted [default: 12]
        cap: usize,
    }
}

config_table! {
    DispersionConfig {
        /// η₊ [default: 1.31696]
        eta: f64,
        /// Grid points on [-π/2, π/2] [default: 201]
        points: usize,
    }
}

config_table! {
    ReproduceConfig {
        /// fig1a, fig1b, fig2, ..., fig7 or all
        figure: String,
    }
}

/// Model keys shared by the ED-backed commands.
#[derive(Clone, Debug, Default)]
pub struct ModelKeys {
    pub n: Option<usize>,
    pub eta: Option<f64>,
    pub regime: Option<RegimeKey>,
    pub thetas: Option<Vec<f64>>,
    pub theta_seed: Option<u64>,
    pub theta_spread: Option<f64>,
    pub cap: Option<usize>,
    pub pair_tol: Option<f64>,
}

impl ModelKeys {
    pub fn params(&self) -> Result<ModelParams> {
        let n = self.n.ok_or_else(|| CliError::Config("missing key `n`".into()))?;
        let cap = self.cap.unwrap_or(DEFAULT_DENSE_CAP).min(MAX_SITES);
        if n > cap {
            return Err(CliError::Config(format!("n = {n} exceeds cap = {cap}")));
        }
        let eta = self.eta.unwrap_or(0.75);
        let base = match self.regime.unwrap_or(RegimeKey::Ferro) {
            RegimeKey::Ferro => ModelParams::ferromagnetic(n, eta)?,
            RegimeKey::Af => ModelParams::antiferromagnetic(n, eta)?,
        };
        match (&self.thetas, self.theta_seed) {
            (Some(_), Some(_)) => Err(CliError::Config("give either `thetas` or `theta-seed`, not both".into())),
            (Some(th), None) => Ok(base.with_imaginary_thetas(th)?),
            (None, Some(seed)) => {
                let spread = self.theta_spread.unwrap_or(0.8);
                if !(spread > 0.0 && spread <= std::f64::consts::FRAC_PI_2) {
                    return Err(CliError::Config(format!("theta-spread = {spread} outside (0, π/2]")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let th: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..spread)).collect();
                Ok(base.with_imaginary_thetas(&th)?)
            }
            (None, None) => Ok(base),
        }
    }
}

/// Reads the `[command]` table of `file`, overlays the flags and deserializes.
pub fn resolve<C>(file: Option<&Path>, command: &str, flags: &C) -> Result<C>
where
    C: Serialize + DeserializeOwned,
{
    let mut table = match file {
        Some(path) => command_table(path, command)?,
        None => toml::Table::new(),
    };
    match toml::Value::try_from(flags).map_err(|e| CliError::Config(e.to_string()))? {
        toml::Value::Table(overlay) => table.extend(overlay),
        other => return Err(CliError::Config(format!("flags serialized to {}", other.type_str()))),
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("[{command}] {}", e.message())))
}

fn command_table(path: &Path, command: &str) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: toml::Table = text.parse().map_err(|source| CliError::ConfigParse {
        path: path.to_path_buf(),
        source,
    })?;
    for (key, value) in &doc {
        if !value.is_table() {
            return Err(CliError::Config(format!(
                "top-level key `{key}` in {}: keys belong in a per-command table",
                path.display()
            )));
        }
    }
    Ok(match doc.get(command) {
        Some(toml::Value::Table(t)) => t.clone(),
        _ => toml::Table::new(),
    })
}

/// `--cache-dir` flag, then the environment, then the config file, then the default.
pub fn cache_dir(flag: Option<&Path>, file: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    file.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

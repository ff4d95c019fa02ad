//! Command implementations behind the `oscbath` binary.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use thiserror::Error;

use oscbath_core::algebra::EqualityProbe;
use oscbath_core::effective::EffectiveError;
use oscbath_core::lindblad::LindbladError;
use oscbath_core::oracle::OracleError;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("derivation failed: {0}")]
    Derivation(String),
    #[error("{0}")]
    NearResonance(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Derivation(_) => 3,
            CliError::NearResonance(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }
}

impl From<EffectiveError> for CliError {
    fn from(e: EffectiveError) -> Self {
        match e {
            EffectiveError::NearResonance { .. } => CliError::NearResonance(format!(
                "{e}\nhint: move omega_r further from omega_c, or bring them within the resonant window \
                 and declare the pair in `resonance.pairs`"
            )),
            EffectiveError::InvalidSpec(_) | EffectiveError::BranchMismatch { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<LindbladError> for CliError {
    fn from(e: LindbladError) -> Self {
        match e {
            LindbladError::InvalidBasis(_) | LindbladError::InvalidTime(_) | LindbladError::UnknownMode(_) => {
                CliError::Config(e.to_string())
            }
            LindbladError::StepRejected { .. } | LindbladError::NoConvergence { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::RecurrenceHorizonExceeded { .. } => CliError::Numeric(e.to_string()),
            OracleError::InvalidModel(_) | OracleError::BandCoverage(_) | OracleError::InvalidTime(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}

/// Resolved invocation: the config plus command-line overrides.
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl Context {
    pub fn new(config: RunConfig, out: Option<PathBuf>, seed: Option<u64>, quiet: bool) -> Self {
        let out = out.unwrap_or_else(|| config.output.clone());
        Context {
            config,
            out,
            seed,
            quiet,
        }
    }

    pub fn probe(&self) -> EqualityProbe {
        match self.seed {
            Some(s) => EqualityProbe::new(s, 10),
            None => EqualityProbe::shared().clone(),
        }
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        write_artifact(&self.out, name, contents)
    }

    pub fn echo(&self, text: &str) {
        if !self.quiet {
            print!("{text}");
        }
    }
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types are serializable");
    s.push('\n');
    s
}

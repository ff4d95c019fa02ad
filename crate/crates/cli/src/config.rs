use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use oscbath_core::algebra::ResonanceDecl;
use oscbath_core::effective::SystemSpec;
use oscbath_core::oracle::BathProfile;

use crate::CliError;

/// Everything a run needs. Every block has defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub resonance: ResonanceDecl,
    pub simulation: SimulationConfig,
    pub oracle: OracleConfig,
    /// Output directory, overridden by `--out`.
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: SystemSpec::new(1.0, 0.5, 0.01, 0.0625),
            resonance: ResonanceDecl::nonresonant(),
            simulation: SimulationConfig::default(),
            oracle: OracleConfig::default(),
            output: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFock {
    pub n_c: usize,
    pub n_r: usize,
}

/// Replaces the rates and occupations derived from `system`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateOverride {
    pub gamma_c_bar: f64,
    pub gamma_r_bar: f64,
    pub n_c_bar: f64,
    pub n_r_bar: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyConfig {
    pub tol: f64,
    pub max_steps: usize,
    pub check_every: usize,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        SteadyConfig {
            tol: 1e-9,
            max_steps: 1_000_000,
            check_every: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    /// Fock levels kept for `c` and `r`.
    pub dims: [usize; 2],
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    pub eigen_check_every: Option<usize>,
    pub initial: InitialFock,
    pub rates: Option<RateOverride>,
    /// Also integrate to the stationary state.
    pub steady: Option<SteadyConfig>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            dims: [10, 10],
            dt: 0.05,
            t_final: 200.0,
            sample_every: 20,
            eigen_check_every: Some(200),
            initial: InitialFock { n_c: 1, n_r: 1 },
            rates: None,
            steady: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub n_modes: usize,
    /// Defaults to `[ω_r/4, 2ω_c]`.
    pub band: Option<[f64; 2]>,
    pub dt: f64,
    /// Defaults to `0.8` of the recurrence time.
    pub t_final: Option<f64>,
    pub g_sweep: Vec<f64>,
    /// Golden-rule decay rate of `c` in units of time, defaults to `γ̄_c·ω_c`.
    pub gamma_target: Option<f64>,
    pub profile: BathProfile,
    pub n_c0: f64,
    pub n_r0: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_modes: 400,
            band: None,
            dt: 0.5,
            t_final: None,
            g_sweep: vec![0.01, 0.02],
            gamma_target: None,
            profile: BathProfile::Flat { n: 0.0 },
            n_c0: 0.0,
            n_r0: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.system.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let s = &self.simulation;
        if s.dims.iter().any(|&d| d < 2) {
            return bad(format!("simulation.dims must be >= 2, got {:?}", s.dims));
        }
        if s.initial.n_c >= s.dims[0] || s.initial.n_r >= s.dims[1] {
            return bad("simulation.initial lies outside the truncated Fock space".into());
        }
        if !(s.dt > 0.0 && s.t_final >= 0.0) {
            return bad("simulation.dt must be > 0 and t_final >= 0".into());
        }
        if s.sample_every == 0 {
            return bad("simulation.sample_every must be >= 1".into());
        }
        if let Some(r) = s.rates {
            if [r.gamma_c_bar, r.gamma_r_bar, r.n_c_bar, r.n_r_bar].iter().any(|&x| !(x >= 0.0)) {
                return bad("simulation.rates entries must be >= 0".into());
            }
        }
        let o = &self.oracle;
        if o.n_modes == 0 || !(o.dt > 0.0) {
            return bad("oracle.n_modes must be >= 1 and oracle.dt > 0".into());
        }
        if o.g_sweep.iter().any(|g| !g.is_finite()) {
            return bad("oracle.g_sweep entries must be finite".into());
        }
        if o.gamma_target.is_some_and(|g| !(g >= 0.0)) {
            return bad("oracle.gamma_target must be >= 0".into());
        }
        if !(o.n_c0 >= 0.0 && o.n_r0 >= 0.0) {
            return bad("oracle initial occupations must be >= 0".into());
        }
        Ok(())
    }
}

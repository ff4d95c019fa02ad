//! Exact second-moment dynamics of the full quadratic model: both
//! oscillators with the complete `X_c X_r` coupling and a discretized bath
//! coupled to `c`.

mod moments;
mod runs;

pub use moments::{
    evolve_moments, symplectic_defect, thermal_bath_init, track_occupations, MomentState, OccupationSeries,
    Propagator,
};
pub use runs::{run_bath, series_csv, BathProfile, BathRun, OracleSeries};

use std::f64::consts::PI;

use ndarray::Array2;
use thiserror::Error;

use crate::linalg::{self, C64};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("bath band does not cover the system frequencies: {0}")]
    BandCoverage(String),
    #[error("run length {t_final} exceeds the recurrence horizon {horizon}")]
    RecurrenceHorizonExceeded { t_final: f64, horizon: f64 },
    #[error("invalid time grid: {0}")]
    InvalidTime(String),
}

/// `H/ħ = Σ_k ω_k a_k†a_k + Σ_{j<k} G_jk X_j X_k` with `X = a + a†`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticModel {
    pub labels: Vec<String>,
    pub freqs: Vec<f64>,
    pub coupling: Array2<f64>,
}

impl QuadraticModel {
    pub fn new(labels: Vec<String>, freqs: Vec<f64>, coupling: Array2<f64>) -> Result<Self, OracleError> {
        let k = freqs.len();
        let bad = |m: String| Err(OracleError::InvalidModel(m));
        if labels.len() != k || coupling.dim() != (k, k) {
            return bad(format!("{} labels, {k} frequencies, coupling {:?}", labels.len(), coupling.dim()));
        }
        if freqs.iter().any(|&w| !(w > 0.0)) {
            return bad("frequencies must be > 0".into());
        }
        for i in 0..k {
            if coupling[[i, i]] != 0.0 {
                return bad(format!("nonzero self-coupling on mode {i}"));
            }
            for j in 0..i {
                if coupling[[i, j]] != coupling[[j, i]] {
                    return bad(format!("coupling not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(QuadraticModel { labels, freqs, coupling })
    }

    /// The two oscillators alone, `g` in units of `ħ`.
    pub fn two_mode(omega_c: f64, omega_r: f64, g: f64) -> Result<Self, OracleError> {
        let mut coupling = Array2::zeros((2, 2));
        coupling[[0, 1]] = g;
        coupling[[1, 0]] = g;
        QuadraticModel::new(vec!["c".into(), "r".into()], vec![omega_c, omega_r], coupling)
    }

    /// Modes `c, r, b_0, …, b_{N−1}`; the bath couples to `c` only.
    pub fn with_bath(omega_c: f64, omega_r: f64, g: f64, bath: &BathDiscretization) -> Result<Self, OracleError> {
        let n = bath.n_modes;
        let k = n + 2;
        let mut labels = vec!["c".to_owned(), "r".to_owned()];
        labels.extend((0..n).map(|i| format!("b{i}")));
        let mut freqs = vec![omega_c, omega_r];
        freqs.extend(bath.frequencies());
        let mut coupling = Array2::zeros((k, k));
        coupling[[0, 1]] = g;
        coupling[[1, 0]] = g;
        for i in 2..k {
            coupling[[0, i]] = bath.coupling;
            coupling[[i, 0]] = bath.coupling;
        }
        QuadraticModel::new(labels, freqs, coupling)
    }

    pub fn n_modes(&self) -> usize {
        self.freqs.len()
    }
}

/// `dv/dt = M v` for `v = (a_1..a_K, a_1†..a_K†)`.
pub fn heisenberg_matrix(model: &QuadraticModel) -> Array2<C64> {
    let k = model.n_modes();
    let mut m = Array2::zeros((2 * k, 2 * k));
    let i = C64::new(0.0, 1.0);
    for j in 0..k {
        m[[j, j]] = -i * model.freqs[j];
        m[[k + j, k + j]] = i * model.freqs[j];
        for l in 0..k {
            let g = model.coupling[[j, l]];
            if g != 0.0 {
                m[[j, l]] += -i * g;
                m[[j, k + l]] += -i * g;
                m[[k + j, l]] += i * g;
                m[[k + j, k + l]] += i * g;
            }
        }
    }
    m
}

/// Positive normal-mode frequencies, ascending.
pub fn normal_modes(model: &QuadraticModel) -> Vec<f64> {
    let mut w: Vec<f64> = linalg::eigenvalues(&heisenberg_matrix(model))
        .into_iter()
        .filter(|z| z.im > 0.0)
        .map(|z| z.im)
        .collect();
    w.sort_by(f64::total_cmp);
    w
}

/// `(Ω₋, Ω₊)` with `Ω±² = ½[(ω_c²+ω_r²) ± √((ω_c²−ω_r²)² + 16g²ω_cω_r)]`.
pub fn two_mode_closed_form(omega_c: f64, omega_r: f64, g: f64) -> (f64, f64) {
    let s = omega_c * omega_c + omega_r * omega_r;
    let d = omega_c * omega_c - omega_r * omega_r;
    let root = (d * d + 16.0 * g * g * omega_c * omega_r).sqrt();
    ((0.5 * (s - root)).sqrt(), (0.5 * (s + root)).sqrt())
}

/// `N` bath modes at the midpoints of `N` equal cells of `[ω_min, ω_max]`,
/// each coupled to `c` with the same strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathDiscretization {
    pub n_modes: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub coupling: f64,
}

impl BathDiscretization {
    pub fn new(n_modes: usize, omega_min: f64, omega_max: f64, coupling: f64) -> Result<Self, OracleError> {
        if n_modes == 0 || !(omega_min > 0.0 && omega_max > omega_min) {
            return Err(OracleError::InvalidModel(format!(
                "need N >= 1 and 0 < ω_min < ω_max, got {n_modes}, [{omega_min}, {omega_max}]"
            )));
        }
        Ok(BathDiscretization {
            n_modes,
            omega_min,
            omega_max,
            coupling,
        })
    }

    /// Coupling chosen so the golden-rule decay rate of `⟨c†c⟩` is `rate`.
    pub fn for_rate(n_modes: usize, omega_min: f64, omega_max: f64, rate: f64) -> Result<Self, OracleError> {
        let mut d = BathDiscretization::new(n_modes, omega_min, omega_max, 0.0)?;
        d.coupling = (rate * d.spacing() / (2.0 * PI)).sqrt();
        Ok(d)
    }

    /// `[ω_r/4, 2ω_c]`.
    pub fn default_band(omega_c: f64, omega_r: f64) -> (f64, f64) {
        (omega_r / 4.0, 2.0 * omega_c)
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / self.n_modes as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let dw = self.spacing();
        (0..self.n_modes)
            .map(|k| self.omega_min + (k as f64 + 0.5) * dw)
            .collect()
    }

    /// `2πγ²/Δω`.
    pub fn golden_rule_rate(&self) -> f64 {
        2.0 * PI * self.coupling * self.coupling / self.spacing()
    }

    /// `2π/Δω`.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing()
    }

    /// Longest admissible run, `0.8·T_rec`.
    pub fn horizon(&self) -> f64 {
        0.8 * self.recurrence_time()
    }

    /// Every center must sit at least ten golden-rule linewidths inside the band.
    pub fn check_coverage(&self, centers: &[f64]) -> Result<(), OracleError> {
        let margin = 10.0 * self.golden_rule_rate();
        for &w in centers {
            if w - margin < self.omega_min || w + margin > self.omega_max {
                return Err(OracleError::BandCoverage(format!(
                    "ω = {w} with margin {margin} outside [{}, {}]",
                    self.omega_min, self.omega_max
                )));
            }
        }
        Ok(())
    }
}

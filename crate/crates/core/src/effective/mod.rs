//! Closed-form effective parameters of the two-oscillator model and the
//! symbolic derivation that produces them.
//!
//! Frequency shifts and rates here are the published closed forms, taken
//! literally; the independently derived engine coefficients live in
//! [`derive`] and are never merged into these numbers.

pub mod derive;
pub mod reference;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::ModeId;

/// Relative detuning `|ω_c − ω_r|/ω_c` below which the resonant branch applies.
pub const RESONANCE_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EffectiveError {
    #[error("invalid system spec: {0}")]
    InvalidSpec(String),
    #[error(
        "|ω_c − ω_r| = {detuning:e} lies in the ambiguous zone ({lower:e}, {upper:e}); \
         choose the resonant or non-resonant branch explicitly"
    )]
    NearResonance { detuning: f64, lower: f64, upper: f64 },
    #[error("operation requires the {expected} branch")]
    BranchMismatch { expected: Branch },
}

/// Thermal occupation `n(ω)` of the bath.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BathOccupation {
    /// Only the two values the kinetic equation needs.
    TwoPoint { at_omega_c: f64, at_omega_r: f64 },
    /// Piecewise-linear table on increasing frequencies, clamped at the ends.
    Tabulated { omega: Vec<f64>, n: Vec<f64> },
}

impl BathOccupation {
    pub fn zero() -> Self {
        BathOccupation::TwoPoint {
            at_omega_c: 0.0,
            at_omega_r: 0.0,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            BathOccupation::TwoPoint { at_omega_c, at_omega_r } => {
                if !(*at_omega_c >= 0.0 && *at_omega_r >= 0.0) {
                    return Err("occupations must be >= 0".into());
                }
            }
            BathOccupation::Tabulated { omega, n } => {
                if omega.is_empty() || omega.len() != n.len() {
                    return Err("tabulated occupation needs equal, nonempty omega and n".into());
                }
                if omega.windows(2).any(|w| w[1] <= w[0]) {
                    return Err("tabulated omega must be strictly increasing".into());
                }
                if n.iter().any(|&v| !(v >= 0.0)) {
                    return Err("occupations must be >= 0".into());
                }
            }
        }
        Ok(())
    }

    fn interpolate(omega: &[f64], n: &[f64], w: f64) -> f64 {
        if w <= omega[0] {
            return n[0];
        }
        if w >= omega[omega.len() - 1] {
            return n[n.len() - 1];
        }
        let k = omega.partition_point(|&x| x <= w);
        let (x0, x1) = (omega[k - 1], omega[k]);
        let t = (w - x0) / (x1 - x0);
        n[k - 1] * (1.0 - t) + n[k] * t
    }
}

/// Physical parameters of the two oscillators and the bath.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub omega_c: f64,
    pub omega_r: f64,
    /// Oscillator-oscillator coupling energy.
    pub g: f64,
    /// Oscillator-bath coupling energy.
    pub gamma_c: f64,
    #[serde(default = "unit")]
    pub hbar: f64,
    #[serde(default = "BathOccupation::zero")]
    pub occupation: BathOccupation,
    /// Multiplies both dimensionless decay rates.
    #[serde(default = "unit")]
    pub rate_convention: f64,
}

fn unit() -> f64 {
    1.0
}

impl SystemSpec {
    pub fn new(omega_c: f64, omega_r: f64, g: f64, gamma_c: f64) -> Self {
        SystemSpec {
            omega_c,
            omega_r,
            g,
            gamma_c,
            hbar: 1.0,
            occupation: BathOccupation::zero(),
            rate_convention: 1.0,
        }
    }

    pub fn with_occupation(mut self, occupation: BathOccupation) -> Self {
        self.occupation = occupation;
        self
    }

    pub fn validate(&self) -> Result<(), EffectiveError> {
        let bad = |m: &str| Err(EffectiveError::InvalidSpec(m.to_owned()));
        if !(self.omega_c > 0.0 && self.omega_r > 0.0) {
            return bad("frequencies must be > 0");
        }
        if !(self.hbar > 0.0) {
            return bad("hbar must be > 0");
        }
        if !(self.g.is_finite() && self.gamma_c.is_finite()) {
            return bad("couplings must be finite");
        }
        if !(self.rate_convention >= 0.0) {
            return bad("rate_convention must be >= 0");
        }
        self.occupation.validate().map_err(EffectiveError::InvalidSpec)?;
        if let Some(msg) = self.perturbative_advisory() {
            log::warn!("{msg}");
        }
        Ok(())
    }

    /// Warning text when `|g|` is not small against `ħ·min(ω_c, ω_r, |ω_c − ω_r|)`.
    pub fn perturbative_advisory(&self) -> Option<String> {
        let scale = self.hbar
            * self
                .omega_c
                .min(self.omega_r)
                .min((self.omega_c - self.omega_r).abs());
        (self.g.abs() > 0.1 * scale).then(|| {
            format!(
                "coupling g = {} is not small against ħ·min(ω_c, ω_r, |ω_c − ω_r|) = {scale}",
                self.g
            )
        })
    }

    /// `n(ω_c)`.
    pub fn occupation_at_c(&self) -> f64 {
        match &self.occupation {
            BathOccupation::TwoPoint { at_omega_c, .. } => *at_omega_c,
            BathOccupation::Tabulated { omega, n } => BathOccupation::interpolate(omega, n, self.omega_c),
        }
    }

    /// `n(ω_r)`.
    pub fn occupation_at_r(&self) -> f64 {
        match &self.occupation {
            BathOccupation::TwoPoint { at_omega_r, .. } => *at_omega_r,
            BathOccupation::Tabulated { omega, n } => BathOccupation::interpolate(omega, n, self.omega_r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Nonresonant,
    Resonant,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Nonresonant => "nonresonant",
            Branch::Resonant => "resonant",
        })
    }
}

/// Resonant below `ε·ω_c`, non-resonant above `10·ε·ω_c`, an error in between.
pub fn select_branch(spec: &SystemSpec) -> Result<Branch, EffectiveError> {
    spec.validate()?;
    let detuning = (spec.omega_c - spec.omega_r).abs();
    let lower = RESONANCE_EPS * spec.omega_c;
    let upper = 10.0 * lower;
    if detuning < lower {
        Ok(Branch::Resonant)
    } else if detuning > upper {
        Ok(Branch::Nonresonant)
    } else {
        Err(EffectiveError::NearResonance { detuning, lower, upper })
    }
}

/// Second-order frequency shifts in the published closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shifts {
    Nonresonant { pi_c: f64, pi_r: f64 },
    Resonant { pi: f64 },
}

impl Shifts {
    /// `(Π_c, Π_r)`; both equal `Π` on the resonant branch.
    pub fn pair(&self) -> (f64, f64) {
        match *self {
            Shifts::Nonresonant { pi_c, pi_r } => (pi_c, pi_r),
            Shifts::Resonant { pi } => (pi, pi),
        }
    }
}

pub fn compute_shifts(spec: &SystemSpec) -> Result<Shifts, EffectiveError> {
    let branch = select_branch(spec)?;
    shifts_for_branch(spec, branch)
}

/// Shifts on an explicitly chosen branch, bypassing the ambiguity check.
pub fn shifts_for_branch(spec: &SystemSpec, branch: Branch) -> Result<Shifts, EffectiveError> {
    spec.validate()?;
    let SystemSpec {
        omega_c: wc,
        omega_r: wr,
        g,
        hbar,
        ..
    } = *spec;
    let g2 = g * g / hbar;
    Ok(match branch {
        Branch::Nonresonant => Shifts::Nonresonant {
            pi_c: g2 * (1.0 / (wc + wr) + 1.0 / (wc - wr)),
            pi_r: g2 * (1.0 / (wr + wc) + 1.0 / (wr - wc)),
        },
        Branch::Resonant => Shifts::Resonant {
            pi: g2 / (2.0 * wc),
        },
    })
}

/// Dimensionless rates and occupations in units of `t̄ = ω_c t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rates {
    pub gamma_c_bar: f64,
    pub gamma_r_bar: f64,
    pub n_c_bar: f64,
    pub n_r_bar: f64,
}

pub fn compute_rates(spec: &SystemSpec) -> Result<Rates, EffectiveError> {
    spec.validate()?;
    let SystemSpec {
        omega_c: wc,
        g,
        gamma_c,
        hbar,
        rate_convention,
        ..
    } = *spec;
    Ok(Rates {
        gamma_c_bar: rate_convention * 2.0 * PI * gamma_c * gamma_c / (hbar * wc * wc),
        gamma_r_bar: rate_convention * PI * g * g * gamma_c * gamma_c / (2.0 * hbar * hbar * wc.powi(4)),
        n_c_bar: spec.occupation_at_c() / wc,
        // Normalized by ω_c, not ω_r.
        n_r_bar: spec.occupation_at_r() / wc,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EffectiveParams {
    pub pi_c: f64,
    pub pi_r: f64,
    pub omega_c_tilde: f64,
    pub omega_r_tilde: f64,
    pub gamma_c_bar: f64,
    pub gamma_r_bar: f64,
    pub n_c_bar: f64,
    pub n_r_bar: f64,
    pub branch: Branch,
}

pub fn effective_params(spec: &SystemSpec) -> Result<EffectiveParams, EffectiveError> {
    let branch = select_branch(spec)?;
    effective_params_for_branch(spec, branch)
}

pub fn effective_params_for_branch(spec: &SystemSpec, branch: Branch) -> Result<EffectiveParams, EffectiveError> {
    let (pi_c, pi_r) = shifts_for_branch(spec, branch)?.pair();
    let rates = compute_rates(spec)?;
    Ok(EffectiveParams {
        pi_c,
        pi_r,
        omega_c_tilde: spec.omega_c - pi_c / spec.hbar,
        omega_r_tilde: spec.omega_r - pi_r / spec.hbar,
        gamma_c_bar: rates.gamma_c_bar,
        gamma_r_bar: rates.gamma_r_bar,
        n_c_bar: rates.n_c_bar,
        n_r_bar: rates.n_r_bar,
        branch,
    })
}

/// A thermal dissipator with Lindblad operator equal to the annihilator of `mode`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindbladChannel {
    pub mode: ModeId,
    pub rate: f64,
    pub occupation: f64,
}

impl LindbladChannel {
    pub fn new(mode: ModeId, rate: f64, occupation: f64) -> Self {
        LindbladChannel { mode, rate, occupation }
    }
}

/// The `c` and `r` channels of the kinetic equation.
pub fn build_channels(spec: &SystemSpec) -> Result<[LindbladChannel; 2], EffectiveError> {
    if select_branch(spec)? != Branch::Nonresonant {
        return Err(EffectiveError::BranchMismatch {
            expected: Branch::Nonresonant,
        });
    }
    let rates = compute_rates(spec)?;
    Ok([
        LindbladChannel::new(ModeId::c(), rates.gamma_c_bar, rates.n_c_bar),
        LindbladChannel::new(ModeId::r(), rates.gamma_r_bar, rates.n_r_bar),
    ])
}

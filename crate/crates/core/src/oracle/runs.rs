use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{track_occupations, BathDiscretization, OracleError, Propagator, QuadraticModel};

/// Bath occupation `n(ω)` on the discretized band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BathProfile {
    Flat { n: f64 },
    /// `below` for `ω < split`, `above` otherwise.
    TwoPlateau { split: f64, below: f64, above: f64 },
}

impl BathProfile {
    pub fn at(&self, w: f64) -> f64 {
        match *self {
            BathProfile::Flat { n } => n,
            BathProfile::TwoPlateau { split, below, above } => {
                if w < split {
                    below
                } else {
                    above
                }
            }
        }
    }
}

/// One oracle run: both oscillators plus a bath tuned to a golden-rule rate.
#[derive(Clone, Debug, PartialEq)]
pub struct BathRun {
    pub omega_c: f64,
    pub omega_r: f64,
    /// Oscillator coupling in units of `ħ`.
    pub g: f64,
    /// Golden-rule decay rate of `⟨c†c⟩` the bath is calibrated to.
    pub gamma_target: f64,
    pub n_modes: usize,
    pub band: (f64, f64),
    pub profile: BathProfile,
    pub n_c0: f64,
    pub n_r0: f64,
    pub dt: f64,
    /// Defaults to `0.8·T_rec`.
    pub t_final: Option<f64>,
}

impl BathRun {
    /// Default band, `N = 400`, zero-temperature bath, `r` excited.
    pub fn new(omega_c: f64, omega_r: f64, g: f64, gamma_target: f64) -> Self {
        BathRun {
            omega_c,
            omega_r,
            g,
            gamma_target,
            n_modes: 400,
            band: BathDiscretization::default_band(omega_c, omega_r),
            profile: BathProfile::Flat { n: 0.0 },
            n_c0: 0.0,
            n_r0: 1.0,
            dt: 0.5,
            t_final: None,
        }
    }

    pub fn discretization(&self) -> Result<BathDiscretization, OracleError> {
        BathDiscretization::for_rate(self.n_modes, self.band.0, self.band.1, self.gamma_target)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSeries {
    pub g: f64,
    pub t: Vec<f64>,
    pub n_c: Vec<f64>,
    pub n_r: Vec<f64>,
}

pub fn run_bath(run: &BathRun) -> Result<OracleSeries, OracleError> {
    let disc = run.discretization()?;
    disc.check_coverage(&[run.omega_c, run.omega_r])?;
    let horizon = disc.horizon();
    let t_final = run.t_final.unwrap_or(horizon);
    let model = QuadraticModel::with_bath(run.omega_c, run.omega_r, run.g, &disc)?;
    let prop = Propagator::new(&model, run.dt)?;
    let mut occ = vec![run.n_c0, run.n_r0];
    occ.extend(disc.frequencies().into_iter().map(|w| run.profile.at(w)));
    let tr = track_occupations(&occ, &prop, &[0, 1], t_final, Some(horizon))?;
    let mut it = tr.occupations.into_iter();
    Ok(OracleSeries {
        g: run.g,
        t: tr.t,
        n_c: it.next().expect("c tracked"),
        n_r: it.next().expect("r tracked"),
    })
}

/// Long-format CSV `g,t,n_c,n_r`, runs in the given order.
pub fn series_csv(runs: &[OracleSeries]) -> String {
    let mut out = String::from("g,t,n_c,n_r\n");
    for s in runs {
        for k in 0..s.t.len() {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s.g, s.t[k], s.n_c[k], s.n_r[k])
                .expect("writing to a String");
        }
    }
    out
}

use std::fmt::Write as _;

use ndarray::Array2;
use serde::Serialize;

use super::{DensityMatrix, Liouvillian, LindbladError};
use crate::linalg::{self, C64};

/// Largest per-step trace change accepted.
pub const MAX_STEP_DRIFT: f64 = 1e-8;
/// Trace error above which the state is renormalized.
pub const RENORMALIZE_ABOVE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepAudit {
    /// `|tr ρ′ − 1|` before any correction.
    pub trace_drift: f64,
    /// `max |ρ′ − ρ′†|` before re-symmetrization.
    pub hermiticity_defect: f64,
    pub renormalized: bool,
}

fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    (a + &a.t().mapv(|z| z.conj())).mapv(|z| z * 0.5)
}

/// One classical RK4 step of `dρ/dt̄ = L(ρ)`.
pub fn step(state: &DensityMatrix, l: &Liouvillian, dt: f64) -> Result<(DensityMatrix, StepAudit), LindbladError> {
    step_indexed(state, l, dt, 0)
}

fn step_indexed(
    state: &DensityMatrix,
    l: &Liouvillian,
    dt: f64,
    index: usize,
) -> Result<(DensityMatrix, StepAudit), LindbladError> {
    if !(dt > 0.0) {
        return Err(LindbladError::InvalidTime(format!("dt must be > 0, got {dt}")));
    }
    let rho = &state.rho;
    let half = C64::new(dt / 2.0, 0.0);
    let full = C64::new(dt, 0.0);
    let k1 = l.apply(rho);
    let k2 = l.apply(&(rho + &(&k1 * half)));
    let k3 = l.apply(&(rho + &(&k2 * half)));
    let k4 = l.apply(&(rho + &(&k3 * full)));
    let incr = (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
    let next = rho + &incr;

    let before = linalg::trace(rho).re;
    let after = linalg::trace(&next).re;
    if (after - before).abs() > MAX_STEP_DRIFT {
        return Err(LindbladError::StepRejected {
            step: index,
            drift: (after - before).abs(),
        });
    }
    let herm = linalg::hermiticity_defect(&next);
    let mut next = hermitize(&next);
    let drift = (after - 1.0).abs();
    let renormalized = drift > RENORMALIZE_ABOVE;
    if renormalized {
        log::warn!("step {index}: trace drift {drift:e}, renormalizing");
        next.mapv_inplace(|z| z / after);
    }
    Ok((
        DensityMatrix {
            basis: state.basis,
            rho: next,
            t: state.t + dt,
        },
        StepAudit {
            trace_drift: drift,
            hermiticity_defect: herm,
            renormalized,
        },
    ))
}

/// Sampled observables.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TimeSeries {
    pub tbar: Vec<f64>,
    pub n_c: Vec<f64>,
    pub n_r: Vec<f64>,
    pub trace: Vec<f64>,
    pub purity: Vec<f64>,
}

impl TimeSeries {
    pub fn push(&mut self, s: &DensityMatrix) {
        let (nc, nr) = s.occupations();
        self.tbar.push(s.t);
        self.n_c.push(nc);
        self.n_r.push(nr);
        self.trace.push(s.trace());
        self.purity.push(s.purity());
    }

    pub fn len(&self) -> usize {
        self.tbar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tbar.is_empty()
    }

    /// `tbar,n_c,n_r,trace,purity` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tbar,n_c,n_r,trace,purity\n");
        for k in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.tbar[k], self.n_c[k], self.n_r[k], self.trace[k], self.purity[k]
            )
            .expect("writing to a String");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Record every this many steps (the final step is always recorded).
    pub sample_every: usize,
    /// Compute the smallest eigenvalue every this many steps.
    pub eigen_check_every: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InvariantAudit {
    pub steps: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: Option<f64>,
    pub renormalizations: usize,
}

impl InvariantAudit {
    fn record(&mut self, a: &StepAudit) {
        self.steps += 1;
        self.max_trace_drift = self.max_trace_drift.max(a.trace_drift);
        self.max_hermiticity_defect = self.max_hermiticity_defect.max(a.hermiticity_defect);
        self.renormalizations += usize::from(a.renormalized);
    }

    fn record_eigen(&mut self, s: &DensityMatrix) {
        let e = s.min_eigenvalue();
        self.min_eigenvalue = Some(self.min_eigenvalue.map_or(e, |m| m.min(e)));
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub series: TimeSeries,
    pub final_state: DensityMatrix,
    pub audit: InvariantAudit,
}

fn step_count(t_final: f64, dt: f64) -> Result<usize, LindbladError> {
    if !(t_final >= 0.0 && dt > 0.0) {
        return Err(LindbladError::InvalidTime(format!("need t_final >= 0 and dt > 0, got {t_final}, {dt}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(1.0) {
        return Err(LindbladError::InvalidTime(format!(
            "t_final = {t_final} is not a multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}

pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, opts: &EvolveOptions) -> Result<Trajectory, LindbladError> {
    let n = step_count(opts.t_final, opts.dt)?;
    let every = opts.sample_every.max(1);
    let mut series = TimeSeries::default();
    let mut audit = InvariantAudit::default();
    let mut state = rho0.clone();
    let mut warned = false;
    series.push(&state);
    if opts.eigen_check_every.is_some() {
        audit.record_eigen(&state);
    }
    for k in 1..=n {
        let (next, a) = step_indexed(&state, l, opts.dt, k)?;
        audit.record(&a);
        state = next;
        state.t = rho0.t + k as f64 * opts.dt;
        if k % every == 0 || k == n {
            series.push(&state);
            if !warned && state.edge_population() >= 1e-8 {
                warned = true;
                log::warn!(
                    "t = {}: {:e} of the population sits in the top two Fock levels",
                    state.t,
                    state.edge_population()
                );
            }
        }
        if let Some(m) = opts.eigen_check_every {
            if k % m.max(1) == 0 || k == n {
                audit.record_eigen(&state);
            }
        }
    }
    Ok(Trajectory {
        series,
        final_state: state,
        audit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyOptions {
    pub dt: f64,
    /// Stop once `max |dρ/dt̄| < tol`.
    pub tol: f64,
    pub max_steps: usize,
    /// Evaluate the residual every this many steps.
    pub check_every: usize,
}

/// Integrate until the state stops changing.
pub fn steady_state(rho0: &DensityMatrix, l: &Liouvillian, opts: &SteadyOptions) -> Result<DensityMatrix, LindbladError> {
    let every = opts.check_every.max(1);
    let mut state = rho0.clone();
    let mut residual = linalg::max_abs(&l.apply(&state.rho));
    let mut k = 0;
    while residual >= opts.tol {
        if k >= opts.max_steps {
            return Err(LindbladError::NoConvergence { steps: k, residual });
        }
        let (next, _) = step_indexed(&state, l, opts.dt, k + 1)?;
        state = next;
        k += 1;
        if k % every == 0 || k == opts.max_steps {
            residual = linalg::max_abs(&l.apply(&state.rho));
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModeId;
    use crate::effective::LindbladChannel;
    use crate::lindblad::FockBasis;
    use approx::assert_relative_eq;

    #[test]
    fn no_channels_leaves_state_unchanged() {
        let basis = FockBasis::new(3, 3).unwrap();
        let l = Liouvillian::new(basis, &[]).unwrap();
        let s = DensityMatrix::thermal(basis, 0.3, 0.1);
        let (next, _) = step(&s, &l, 0.1).unwrap();
        assert_eq!(next.rho, s.rho);
    }

    #[test]
    fn zero_duration_gives_one_sample() {
        let basis = FockBasis::new(3, 3).unwrap();
        let l = Liouvillian::new(basis, &[LindbladChannel::new(ModeId::c(), 1.0, 0.0)]).unwrap();
        let s = DensityMatrix::fock(basis, 1, 0);
        let opts = EvolveOptions {
            dt: 0.1,
            t_final: 0.0,
            sample_every: 1,
            eigen_check_every: None,
        };
        let tr = evolve(&s, &l, &opts).unwrap();
        assert_eq!(tr.series.len(), 1);
        assert_eq!(tr.series.n_c[0], 1.0);
    }

    #[test]
    fn single_channel_relaxation_from_vacuum() {
        let basis = FockBasis::new(15, 2).unwrap();
        let g = 0.5;
        let l = Liouvillian::new(basis, &[LindbladChannel::new(ModeId::c(), g, 0.5)]).unwrap();
        let opts = EvolveOptions {
            dt: 0.01,
            t_final: 10.0,
            sample_every: 100,
            eigen_check_every: None,
        };
        let tr = evolve(&DensityMatrix::vacuum(basis), &l, &opts).unwrap();
        for (t, n) in tr.series.tbar.iter().zip(&tr.series.n_c) {
            assert!((n - 0.5 * (1.0 - (-g * t).exp())).abs() < 1e-6);
        }
        assert_eq!(tr.audit.steps, 1000);
    }

    #[test]
    fn thermal_fixed_point_per_step() {
        let basis = FockBasis::new(12, 8).unwrap();
        let chans = [
            LindbladChannel::new(ModeId::c(), 0.2, 0.5),
            LindbladChannel::new(ModeId::r(), 0.05, 0.2),
        ];
        let l = Liouvillian::new(basis, &chans).unwrap();
        let s = DensityMatrix::thermal(basis, 0.5, 0.2);
        let (next, _) = step(&s, &l, 0.05).unwrap();
        assert!(linalg::max_abs(&(&next.rho - &s.rho)) < 1e-10);
    }

    #[test]
    fn nonpositive_step_is_an_error() {
        let basis = FockBasis::new(3, 2).unwrap();
        let l = Liouvillian::new(basis, &[LindbladChannel::new(ModeId::c(), 1.0, 1.0)]).unwrap();
        let s = DensityMatrix::fock(basis, 2, 0);
        assert!(matches!(step(&s, &l, 0.0), Err(LindbladError::InvalidTime(_))));
        assert!(matches!(step(&s, &l, -0.1), Err(LindbladError::InvalidTime(_))));
    }

    #[test]
    fn steady_state_returns_immediately_when_stationary() {
        let basis = FockBasis::new(10, 6).unwrap();
        let chans = [
            LindbladChannel::new(ModeId::c(), 0.5, 0.5),
            LindbladChannel::new(ModeId::r(), 0.5, 0.2),
        ];
        let l = Liouvillian::new(basis, &chans).unwrap();
        let s = DensityMatrix::thermal(basis, 0.5, 0.2);
        let opts = SteadyOptions {
            dt: 0.05,
            tol: 1e-10,
            max_steps: 0,
            check_every: 1,
        };
        let out = steady_state(&s, &l, &opts).unwrap();
        assert_eq!(out.t, 0.0);

        let vac = DensityMatrix::vacuum(basis);
        let zero = Liouvillian::new(
            basis,
            &[
                LindbladChannel::new(ModeId::c(), 0.5, 0.0),
                LindbladChannel::new(ModeId::r(), 0.5, 0.0),
            ],
        )
        .unwrap();
        let out = steady_state(&vac, &zero, &opts).unwrap();
        assert_relative_eq!(out.purity(), 1.0);

        let far = DensityMatrix::fock(basis, 3, 2);
        assert!(matches!(
            steady_state(&far, &l, &opts),
            Err(LindbladError::NoConvergence { .. })
        ));
    }

    #[test]
    fn csv_format() {
        let basis = FockBasis::new(2, 2).unwrap();
        let mut ts = TimeSeries::default();
        ts.push(&DensityMatrix::vacuum(basis));
        let csv = ts.to_csv();
        assert!(csv.starts_with("tbar,n_c,n_r,trace,purity\n"));
        assert!(csv.contains("0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0"));
    }
}

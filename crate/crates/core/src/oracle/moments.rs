use ndarray::{s, Array1, Array2};

use super::{heisenberg_matrix, BathDiscretization, OracleError, QuadraticModel};
use crate::linalg::{self, C64};

/// First and second moments of `v = (a, a†)`: `mean = ⟨v⟩`,
/// `second = ⟨v vᵀ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentState {
    pub mean: Array1<C64>,
    pub second: Array2<C64>,
}

impl MomentState {
    /// Zero-mean Gaussian state diagonal in the mode basis.
    pub fn thermal(occupations: &[f64]) -> Self {
        let k = occupations.len();
        let mut c = Array2::zeros((2 * k, 2 * k));
        for (j, &n) in occupations.iter().enumerate() {
            c[[j, k + j]] = C64::new(n + 1.0, 0.0);
            c[[k + j, j]] = C64::new(n, 0.0);
        }
        MomentState {
            mean: Array1::zeros(2 * k),
            second: c,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    /// `⟨a_j† a_l⟩`.
    pub fn normal(&self, j: usize, l: usize) -> C64 {
        self.second[[self.n_modes() + j, l]]
    }

    /// `⟨a_j a_l⟩`.
    pub fn anomalous(&self, j: usize, l: usize) -> C64 {
        self.second[[j, l]]
    }

    pub fn occupation(&self, j: usize) -> f64 {
        self.normal(j, j).re
    }

    /// `max |N − N†|` over the normal block.
    pub fn normal_hermiticity_defect(&self) -> f64 {
        let k = self.n_modes();
        linalg::hermiticity_defect(&self.second.slice(s![k.., ..k]).to_owned())
    }
}

/// Bath modes at `n(ω_k)`, the two system modes at the given occupations.
pub fn thermal_bath_init(disc: &BathDiscretization, occupation: impl Fn(f64) -> f64, n_c: f64, n_r: f64) -> MomentState {
    let mut occ = vec![n_c, n_r];
    occ.extend(disc.frequencies().into_iter().map(occupation));
    MomentState::thermal(&occ)
}

/// One-step propagator `P = exp(M·dt)`.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub dt: f64,
    pub p: Array2<C64>,
}

impl Propagator {
    pub fn new(model: &QuadraticModel, dt: f64) -> Result<Self, OracleError> {
        if !(dt > 0.0) {
            return Err(OracleError::InvalidTime(format!("dt must be > 0, got {dt}")));
        }
        let m = heisenberg_matrix(model).mapv(|z| z * dt);
        Ok(Propagator { dt, p: linalg::expm(&m) })
    }

    pub fn apply(&self, state: &MomentState) -> MomentState {
        MomentState {
            mean: self.p.dot(&state.mean),
            second: self.p.dot(&state.second).dot(&self.p.t()),
        }
    }
}

/// `max |P J Pᵀ − J|` with `J = [[0, I], [−I, 0]]`, the commutator matrix
/// of `v`.
pub fn symplectic_defect(p: &Array2<C64>) -> f64 {
    let k = p.nrows() / 2;
    let mut j = Array2::<C64>::zeros((2 * k, 2 * k));
    for i in 0..k {
        j[[i, k + i]] = C64::new(1.0, 0.0);
        j[[k + i, i]] = C64::new(-1.0, 0.0);
    }
    linalg::max_abs(&(p.dot(&j).dot(&p.t()) - &j))
}

fn step_count(t_final: f64, dt: f64, horizon: Option<f64>) -> Result<usize, OracleError> {
    if let Some(h) = horizon {
        if t_final > h {
            return Err(OracleError::RecurrenceHorizonExceeded { t_final, horizon: h });
        }
    }
    if !(t_final >= 0.0) {
        return Err(OracleError::InvalidTime(format!("t_final must be >= 0, got {t_final}")));
    }
    Ok((t_final / dt + 1e-9).floor() as usize)
}

/// Full moment trajectory, one entry per step including `t = 0`.
pub fn evolve_moments(
    state: &MomentState,
    prop: &Propagator,
    t_final: f64,
    horizon: Option<f64>,
) -> Result<Vec<(f64, MomentState)>, OracleError> {
    let n = step_count(t_final, prop.dt, horizon)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = state.clone();
    out.push((0.0, cur.clone()));
    for k in 1..=n {
        cur = prop.apply(&cur);
        out.push((k as f64 * prop.dt, cur.clone()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OccupationSeries {
    pub t: Vec<f64>,
    /// `occupations[m][k]` is mode `modes[m]` at time `t[k]`.
    pub occupations: Vec<Vec<f64>>,
    pub modes: Vec<usize>,
}

/// `⟨a_i†a_i⟩(t)` for a few modes of a large model, starting from a
/// zero-mean state diagonal in the mode basis. Only the rows of `P(t)` that
/// build `a_i(t)` and `a_i†(t)` are propagated, via `R ← R·P`.
pub fn track_occupations(
    initial: &[f64],
    prop: &Propagator,
    modes: &[usize],
    t_final: f64,
    horizon: Option<f64>,
) -> Result<OccupationSeries, OracleError> {
    let k = initial.len();
    if prop.p.nrows() != 2 * k {
        return Err(OracleError::InvalidModel(format!(
            "propagator is {}x{}, state has {k} modes",
            prop.p.nrows(),
            prop.p.ncols()
        )));
    }
    let n = step_count(t_final, prop.dt, horizon)?;
    let m = modes.len();
    let mut rows = Array2::<C64>::zeros((2 * m, 2 * k));
    for (r, &i) in modes.iter().enumerate() {
        rows[[r, i]] = C64::new(1.0, 0.0);
        rows[[m + r, k + i]] = C64::new(1.0, 0.0);
    }
    let occ = |rows: &Array2<C64>, r: usize| -> f64 {
        let (a, ad) = (rows.row(r), rows.row(m + r));
        let mut acc = C64::new(0.0, 0.0);
        for (j, &nj) in initial.iter().enumerate() {
            acc += ad[j] * a[k + j] * (nj + 1.0) + ad[k + j] * a[j] * nj;
        }
        acc.re
    };
    let mut t = Vec::with_capacity(n + 1);
    let mut out = vec![Vec::with_capacity(n + 1); m];
    for step in 0..=n {
        if step > 0 {
            rows = rows.dot(&prop.p);
        }
        t.push(step as f64 * prop.dt);
        for (r, series) in out.iter_mut().enumerate() {
            series.push(occ(&rows, r));
        }
    }
    Ok(OccupationSeries {
        t,
        occupations: out,
        modes: modes.to_vec(),
    })
}

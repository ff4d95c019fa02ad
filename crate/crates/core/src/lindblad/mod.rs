//! Thermal-dissipator master equation for two oscillators in a truncated
//! two-mode Fock space.

mod dissipator;
mod integrate;

pub use dissipator::{dissipator_apply, Liouvillian};
pub use integrate::{
    evolve, steady_state, step, EvolveOptions, InvariantAudit, SteadyOptions, StepAudit, TimeSeries,
    Trajectory,
};

use ndarray::{linalg::kron, Array2};
use thiserror::Error;

use crate::algebra::ModeId;
use crate::linalg::{self, C64};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LindbladError {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("no ladder matrix for mode {0}")]
    UnknownMode(String),
    #[error("step {step} rejected: trace drift {drift:e} exceeds 1e-8")]
    StepRejected { step: usize, drift: f64 },
    #[error("no convergence after {steps} steps (residual {residual:e})")]
    NoConvergence { steps: usize, residual: f64 },
    #[error("invalid time grid: {0}")]
    InvalidTime(String),
}

/// Truncation `|0..dim−1⟩` per mode. Flat index of `|n_c, n_r⟩` is
/// `n_c·dim_r + n_r` (row-major, `c` outer).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockBasis {
    pub dim_c: usize,
    pub dim_r: usize,
}

impl FockBasis {
    pub fn new(dim_c: usize, dim_r: usize) -> Result<Self, LindbladError> {
        if dim_c < 2 || dim_r < 2 {
            return Err(LindbladError::InvalidBasis(format!(
                "dims must be >= 2, got {dim_c}x{dim_r}"
            )));
        }
        Ok(FockBasis { dim_c, dim_r })
    }

    pub fn dim(&self) -> usize {
        self.dim_c * self.dim_r
    }

    pub fn index(&self, n_c: usize, n_r: usize) -> usize {
        n_c * self.dim_r + n_r
    }

    pub fn levels(&self, index: usize) -> (usize, usize) {
        (index / self.dim_r, index % self.dim_r)
    }

    /// Truncation dimension and flat-index stride of a mode.
    pub fn mode_layout(&self, mode: &ModeId) -> Result<(usize, usize), LindbladError> {
        match mode.label() {
            "c" if !mode.is_bath() => Ok((self.dim_c, self.dim_r)),
            "r" if !mode.is_bath() => Ok((self.dim_r, 1)),
            _ => Err(LindbladError::UnknownMode(mode.to_string())),
        }
    }

    /// Occupation of `mode` at each flat index.
    pub fn level_of(&self, mode: &ModeId) -> Result<Vec<usize>, LindbladError> {
        let (dim, stride) = self.mode_layout(mode)?;
        Ok((0..self.dim()).map(|i| (i / stride) % dim).collect())
    }
}

/// `⟨n−1|a|n⟩ = √n`.
pub fn annihilator(dim: usize) -> Array2<C64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Ladder matrices embedded in the composite space: `c = a⊗I`, `r = I⊗a`.
#[derive(Clone, Debug)]
pub struct ModeMatrices {
    pub c: Array2<C64>,
    pub r: Array2<C64>,
}

impl ModeMatrices {
    pub fn get(&self, mode: &ModeId) -> Result<&Array2<C64>, LindbladError> {
        match mode.label() {
            "c" if !mode.is_bath() => Ok(&self.c),
            "r" if !mode.is_bath() => Ok(&self.r),
            _ => Err(LindbladError::UnknownMode(mode.to_string())),
        }
    }
}

pub fn build_ops(basis: FockBasis) -> ModeMatrices {
    ModeMatrices {
        c: kron(&annihilator(basis.dim_c), &Array2::eye(basis.dim_r)),
        r: kron(&Array2::eye(basis.dim_c), &annihilator(basis.dim_r)),
    }
}

/// Bose-Einstein populations `p_n ∝ (n̄/(n̄+1))^n`, normalized on the
/// truncated space.
pub fn thermal_populations(nbar: f64, dim: usize) -> Vec<f64> {
    assert!(nbar >= 0.0, "occupation must be >= 0");
    let q = nbar / (nbar + 1.0);
    let raw: Vec<f64> = (0..dim).map(|n| q.powi(n as i32)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / z).collect()
}

pub fn thermal_state(nbar: f64, dim: usize) -> Array2<C64> {
    Array2::from_diag(&ndarray::Array1::from_iter(
        thermal_populations(nbar, dim).into_iter().map(|p| C64::new(p, 0.0)),
    ))
}

/// Population held by the top two Fock levels of the thermal state.
pub fn truncation_tail(nbar: f64, dim: usize) -> f64 {
    thermal_populations(nbar, dim).iter().rev().take(2).sum()
}

/// Two-mode density matrix at dimensionless time `t̄`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub basis: FockBasis,
    pub rho: Array2<C64>,
    pub t: f64,
}

impl DensityMatrix {
    pub fn new(basis: FockBasis, rho: Array2<C64>) -> Result<Self, LindbladError> {
        if rho.dim() != (basis.dim(), basis.dim()) {
            return Err(LindbladError::InvalidBasis(format!(
                "matrix is {:?}, basis needs {}x{}",
                rho.dim(),
                basis.dim(),
                basis.dim()
            )));
        }
        Ok(DensityMatrix { basis, rho, t: 0.0 })
    }

    /// `ρ_c ⊗ ρ_r`.
    pub fn product(basis: FockBasis, rho_c: &Array2<C64>, rho_r: &Array2<C64>) -> Result<Self, LindbladError> {
        DensityMatrix::new(basis, kron(rho_c, rho_r))
    }

    pub fn thermal(basis: FockBasis, n_c: f64, n_r: f64) -> Self {
        let rho = kron(&thermal_state(n_c, basis.dim_c), &thermal_state(n_r, basis.dim_r));
        DensityMatrix { basis, rho, t: 0.0 }
    }

    pub fn vacuum(basis: FockBasis) -> Self {
        DensityMatrix::thermal(basis, 0.0, 0.0)
    }

    /// `|n_c, n_r⟩⟨n_c, n_r|`.
    pub fn fock(basis: FockBasis, n_c: usize, n_r: usize) -> Self {
        let mut rho = Array2::zeros((basis.dim(), basis.dim()));
        let i = basis.index(n_c, n_r);
        rho[[i, i]] = C64::new(1.0, 0.0);
        DensityMatrix { basis, rho, t: 0.0 }
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(basis: FockBasis, psi: &[C64]) -> Result<Self, LindbladError> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rho = Array2::from_shape_fn((psi.len(), psi.len()), |(i, j)| psi[i] * psi[j].conj() / (norm * norm));
        DensityMatrix::new(basis, rho)
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.rho).re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(⟨c†c⟩, ⟨r†r⟩)`.
    pub fn occupations(&self) -> (f64, f64) {
        let mut nc = 0.0;
        let mut nr = 0.0;
        for i in 0..self.basis.dim() {
            let (a, b) = self.basis.levels(i);
            let p = self.rho[[i, i]].re;
            nc += a as f64 * p;
            nr += b as f64 * p;
        }
        (nc, nr)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.rho)[0]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.rho)
    }

    pub fn reduced_c(&self) -> Array2<C64> {
        let FockBasis { dim_c, dim_r } = self.basis;
        Array2::from_shape_fn((dim_c, dim_c), |(i, j)| {
            (0..dim_r).map(|k| self.rho[[i * dim_r + k, j * dim_r + k]]).sum()
        })
    }

    pub fn reduced_r(&self) -> Array2<C64> {
        let FockBasis { dim_c, dim_r } = self.basis;
        Array2::from_shape_fn((dim_r, dim_r), |(i, j)| {
            (0..dim_c).map(|k| self.rho[[k * dim_r + i, k * dim_r + j]]).sum()
        })
    }

    /// `S(ρ_c) + S(ρ_r) − S(ρ)`.
    pub fn mutual_information(&self) -> f64 {
        linalg::von_neumann_entropy(&self.reduced_c()) + linalg::von_neumann_entropy(&self.reduced_r())
            - linalg::von_neumann_entropy(&self.rho)
    }

    /// Largest population in the top two levels of either mode.
    pub fn edge_population(&self) -> f64 {
        let FockBasis { dim_c, dim_r } = self.basis;
        let mut pc = 0.0;
        let mut pr = 0.0;
        for i in 0..self.basis.dim() {
            let (a, b) = self.basis.levels(i);
            let p = self.rho[[i, i]].re;
            if a + 2 >= dim_c {
                pc += p;
            }
            if b + 2 >= dim_r {
                pr += p;
            }
        }
        f64::max(pc, pr)
    }
}

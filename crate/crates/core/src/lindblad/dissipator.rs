use ndarray::Array2;

use super::{FockBasis, LindbladError, ModeMatrices};
use crate::effective::LindbladChannel;
use crate::linalg::C64;

fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// `−Γ̂ρ` for one thermal channel, built from dense products:
/// `γn̄·Y†ρY + γ(n̄+1)·YρY† − γ·{((n̄+1)/2)Y†Y + (n̄/2)YY†, ρ}`.
pub fn dissipator_apply(
    rho: &Array2<C64>,
    ch: &LindbladChannel,
    ops: &ModeMatrices,
) -> Result<Array2<C64>, LindbladError> {
    let y = ops.get(&ch.mode)?;
    let yd = dagger(y);
    let (g, n) = (ch.rate, ch.occupation);
    let re = |x: f64| C64::new(x, 0.0);
    let jump = yd.dot(rho).dot(y) * re(g * n) + y.dot(rho).dot(&yd) * re(g * (n + 1.0));
    let k = yd.dot(y) * re((n + 1.0) / 2.0) + y.dot(&yd) * re(n / 2.0);
    let anti = k.dot(rho) + rho.dot(&k);
    Ok(jump - anti * re(g))
}

#[derive(Clone, Debug)]
struct Kernel {
    stride: usize,
    down: f64,
    up: f64,
    /// `√(n_i + 1)`, zero at the top level.
    raise: Vec<f64>,
    /// `√n_i`.
    lower: Vec<f64>,
    /// Diagonal of `γ((n̄+1)/2·Y†Y + n̄/2·YY†)`.
    damp: Vec<f64>,
}

/// Elementwise evaluation of `Σ_i −Γ̂_i ρ`, plus an optional diagonal
/// detuning commutator `−i[δ_c c†c + δ_r r†r, ρ]`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    basis: FockBasis,
    kernels: Vec<Kernel>,
    detuning: Option<Vec<f64>>,
}

impl Liouvillian {
    pub fn new(basis: FockBasis, channels: &[LindbladChannel]) -> Result<Self, LindbladError> {
        let mut kernels = Vec::new();
        for ch in channels {
            let (dim, stride) = basis.mode_layout(&ch.mode)?;
            let level = basis.level_of(&ch.mode)?;
            let (g, n) = (ch.rate, ch.occupation);
            let tail = super::truncation_tail(n, dim);
            if tail >= 1e-8 {
                log::warn!(
                    "mode {} truncated at {dim} levels holds {tail:e} of its thermal population in the top two levels",
                    ch.mode
                );
            }
            let raise: Vec<f64> = level
                .iter()
                .map(|&l| if l + 1 < dim { ((l + 1) as f64).sqrt() } else { 0.0 })
                .collect();
            let lower: Vec<f64> = level.iter().map(|&l| (l as f64).sqrt()).collect();
            let damp = level
                .iter()
                .zip(&raise)
                .map(|(&l, &up)| g * ((n + 1.0) / 2.0 * l as f64 + n / 2.0 * up * up))
                .collect();
            kernels.push(Kernel {
                stride,
                down: g * (n + 1.0),
                up: g * n,
                raise,
                lower,
                damp,
            });
        }
        Ok(Liouvillian {
            basis,
            kernels,
            detuning: None,
        })
    }

    /// Add `−i[δ_c c†c + δ_r r†r, ·]`.
    pub fn with_detuning(mut self, delta_c: f64, delta_r: f64) -> Self {
        let h = (0..self.basis.dim())
            .map(|i| {
                let (a, b) = self.basis.levels(i);
                delta_c * a as f64 + delta_r * b as f64
            })
            .collect();
        self.detuning = Some(h);
        self
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn is_trivial(&self) -> bool {
        self.detuning.is_none() && self.kernels.iter().all(|k| k.down == 0.0 && k.up == 0.0)
    }

    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.basis.dim();
        let src = rho.as_standard_layout();
        let src = src.as_slice().expect("standard layout");
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for k in &self.kernels {
            let s = k.stride;
            for i in 0..d {
                let row = &mut out[i * d..(i + 1) * d];
                let (ri, li, di) = (k.raise[i], k.lower[i], k.damp[i]);
                for j in 0..d {
                    let mut v = -(di + k.damp[j]) * src[i * d + j];
                    if ri != 0.0 && k.raise[j] != 0.0 {
                        v += k.down * ri * k.raise[j] * src[(i + s) * d + j + s];
                    }
                    if li != 0.0 && k.lower[j] != 0.0 {
                        v += k.up * li * k.lower[j] * src[(i - s) * d + j - s];
                    }
                    row[j] += v;
                }
            }
        }
        if let Some(h) = &self.detuning {
            for i in 0..d {
                for j in 0..d {
                    out[i * d + j] += C64::new(0.0, -(h[i] - h[j])) * src[i * d + j];
                }
            }
        }
        Array2::from_shape_vec((d, d), out).expect("shape matches")
    }
}

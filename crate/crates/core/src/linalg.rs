//! Dense complex linear algebra shared by the simulator and the oracle.
//!
//! Products run on ndarray; eigen solves and LU factorizations go through
//! nalgebra.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

pub type C64 = Complex64;

pub fn to_dmatrix(a: &Array2<C64>) -> DMatrix<C64> {
    let (n, m) = a.dim();
    DMatrix::from_fn(n, m, |i, j| a[[i, j]])
}

pub fn from_dmatrix(a: &DMatrix<C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let h = to_dmatrix(a);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a general complex matrix via the Schur decomposition.
pub fn eigenvalues(a: &Array2<C64>) -> Vec<C64> {
    let schur = to_dmatrix(a).schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// `−Σ λ ln λ` over the eigenvalues of a density matrix, clipping round-off
/// negatives to zero.
pub fn von_neumann_entropy(rho: &Array2<C64>) -> f64 {
    hermitian_eigenvalues(rho)
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

/// `max |a_ij|`.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `max |a − a†|`.
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.mapv(|z| z / 2f64.powi(s));
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let eye = Array2::<C64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a.dot(&(a6.dot(&u_inner) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1)));
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&v_inner) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let lu = to_dmatrix(&(&v - &u)).lu();
    let mut r = from_dmatrix(
        &lu.solve(&to_dmatrix(&(&v + &u)))
            .expect("Padé denominator is nonsingular after scaling"),
    );
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

//! Least-squares fit of `x(t) = A·e^{−Γt} + B`.
//!
//! The linear parameters `A, B` are eliminated exactly for each trial `Γ`,
//! leaving a one-dimensional search over `ln Γ`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FitError {
    #[error("decay fit is ill-conditioned: {0}")]
    IllConditioned(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    pub asymptote: f64,
    /// `sqrt(Σ residual²)`.
    pub residual_norm: f64,
}

const GRID_POINTS: usize = 400;
const GOLDEN_ITERS: usize = 200;

/// Best `(A, B)` and squared residual for fixed `Γ`.
fn profile(t: &[f64], x: &[f64], rate: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let e: Vec<f64> = t.iter().map(|&ti| (-rate * (ti - t[0])).exp()).collect();
    let me = e.iter().sum::<f64>() / n;
    let mx = x.iter().sum::<f64>() / n;
    let (mut see, mut sex, mut sxx) = (0.0, 0.0, 0.0);
    for (&ei, &xi) in e.iter().zip(x) {
        see += (ei - me) * (ei - me);
        sex += (ei - me) * (xi - mx);
        sxx += (xi - mx) * (xi - mx);
    }
    if see <= 1e-300 {
        return (0.0, mx, sxx);
    }
    let a = sex / see;
    let b = mx - a * me;
    let ssr = e.iter().zip(x).map(|(&ei, &xi)| (xi - a * ei - b).powi(2)).sum();
    // amplitude referred to t = t[0]
    (a, b, ssr)
}

fn validate(t: &[f64], x: &[f64]) -> Result<(), FitError> {
    let bad = |m: &str| Err(FitError::IllConditioned(m.to_owned()));
    if t.len() != x.len() {
        return bad("time and value series differ in length");
    }
    if t.len() < 4 {
        return bad("need at least four samples");
    }
    if t.iter().chain(x).any(|v| !v.is_finite()) {
        return bad("non-finite sample");
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return bad("sample times must increase strictly");
    }
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let scale = lo.abs().max(hi.abs()).max(1e-300);
    if hi - lo <= 1e-13 * scale {
        return bad("series is constant");
    }
    Ok(())
}

/// Direct least-squares fit over all samples.
pub fn fit_decay(t: &[f64], x: &[f64]) -> Result<DecayFit, FitError> {
    validate(t, x)?;
    let span = t[t.len() - 1] - t[0];
    let min_dt = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let (lo, hi) = ((1e-5 / span).ln(), (50.0 / min_dt).ln());
    let obj = |lg: f64| profile(t, x, lg.exp()).2;

    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&lg| obj(lg)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("grid is nonempty");
    if best == 0 || best == GRID_POINTS - 1 {
        return Err(FitError::IllConditioned(format!(
            "optimal rate at the edge of the search range [{:.3e}, {:.3e}]",
            lo.exp(),
            hi.exp()
        )));
    }

    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (obj(x1), obj(x2));
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = obj(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = obj(x2);
        }
    }
    let rate = (0.5 * (a + b)).exp();
    let (amp, asym, ssr) = profile(t, x, rate);
    Ok(DecayFit {
        rate,
        // referred back to t = 0
        amplitude: amp * (rate * t[0]).exp(),
        asymptote: asym,
        residual_norm: ssr.sqrt(),
    })
}

/// Fit through the local maxima of `|x − B|`, re-estimating `B` until it
/// settles. Suited to decays with a fast oscillation superposed.
pub fn fit_envelope(t: &[f64], x: &[f64]) -> Result<DecayFit, FitError> {
    validate(t, x)?;
    let mut fit = fit_decay(t, x)?;
    for _ in 0..20 {
        let dev: Vec<f64> = x.iter().map(|v| (v - fit.asymptote).abs()).collect();
        let peaks: Vec<usize> = (1..x.len() - 1)
            .filter(|&i| dev[i] >= dev[i - 1] && dev[i] >= dev[i + 1])
            .collect();
        if peaks.len() < 4 {
            return Ok(fit);
        }
        let tp: Vec<f64> = peaks.iter().map(|&i| t[i]).collect();
        let xp: Vec<f64> = peaks.iter().map(|&i| x[i]).collect();
        let next = fit_decay(&tp, &xp)?;
        let settled = (next.asymptote - fit.asymptote).abs() <= 1e-12 * next.asymptote.abs().max(1e-300);
        fit = next;
        if settled {
            break;
        }
    }
    Ok(fit)
}

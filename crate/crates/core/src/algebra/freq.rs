//! Integer linear combinations of frequency symbols.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// The frequency symbols an expression may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreqSymbol {
    /// ω_c, frequency of the bath-coupled oscillator.
    Wc,
    /// ω_r, frequency of the "isolated" oscillator.
    Wr,
    /// ω, the free frequency of the bath family a_ω.
    W,
}

impl FreqSymbol {
    pub const ALL: [FreqSymbol; 3] = [FreqSymbol::Wc, FreqSymbol::Wr, FreqSymbol::W];

    pub fn name(self) -> &'static str {
        match self {
            FreqSymbol::Wc => "wc",
            FreqSymbol::Wr => "wr",
            FreqSymbol::W => "w",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "wc" => Some(FreqSymbol::Wc),
            "wr" => Some(FreqSymbol::Wr),
            "w" => Some(FreqSymbol::W),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// System frequencies are the oscillator frequencies; `W` belongs to the bath.
    pub fn is_system(self) -> bool {
        !matches!(self, FreqSymbol::W)
    }
}

/// `Σ_k n_k · s_k` with integer `n_k` over [`FreqSymbol::ALL`].
///
/// A phase factor `e^{iΩt}` is stored as the `FreqExpr` Ω. The zero
/// combination is the phase of a secular (time independent) term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreqExpr {
    coeffs: [i64; 3],
}

impl FreqExpr {
    pub const ZERO: FreqExpr = FreqExpr { coeffs: [0; 3] };

    pub fn new(wc: i64, wr: i64, w: i64) -> Self {
        FreqExpr { coeffs: [wc, wr, w] }
    }

    pub fn symbol(sym: FreqSymbol) -> Self {
        let mut coeffs = [0; 3];
        coeffs[sym.index()] = 1;
        FreqExpr { coeffs }
    }

    pub fn coeff(&self, sym: FreqSymbol) -> i64 {
        self.coeffs[sym.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True if the combination mentions only system frequencies, each with a
    /// non-negative coefficient, and is not zero.
    pub fn is_positive_system_combination(&self) -> bool {
        !self.is_zero()
            && self.coeff(FreqSymbol::W) == 0
            && FreqSymbol::ALL.iter().all(|&s| self.coeff(s) >= 0)
    }

    /// Replace `sym` by `by` everywhere.
    pub fn substitute(&self, sym: FreqSymbol, by: &FreqExpr) -> FreqExpr {
        let n = self.coeff(sym);
        let mut out = *self;
        out.coeffs[sym.index()] = 0;
        out + *by * n
    }

    pub fn eval(&self, wc: f64, wr: f64, w: f64) -> f64 {
        self.coeffs[0] as f64 * wc + self.coeffs[1] as f64 * wr + self.coeffs[2] as f64 * w
    }

    /// Greatest common divisor of the coefficients (0 for the zero combination).
    pub fn content(&self) -> i64 {
        self.coeffs.iter().fold(0i64, |acc, &c| gcd(acc, c.abs()))
    }

    /// Split into `(scale, primitive)` with `self = scale · primitive`, the
    /// primitive part having coprime coefficients and a positive leading
    /// coefficient.
    pub fn primitive(&self) -> (i64, FreqExpr) {
        let content = self.content();
        if content == 0 {
            return (0, *self);
        }
        let lead = self.coeffs.iter().copied().find(|&c| c != 0).unwrap_or(1);
        let scale = if lead < 0 { -content } else { content };
        let mut coeffs = self.coeffs;
        for c in coeffs.iter_mut() {
            *c /= scale;
        }
        (scale, FreqExpr { coeffs })
    }

    /// Returns `Some(k)` when `self = k · other` for an integer `k`.
    pub fn integer_multiple_of(&self, other: &FreqExpr) -> Option<i64> {
        if other.is_zero() {
            return None;
        }
        let pivot = other.coeffs.iter().position(|&c| c != 0)?;
        if self.coeffs[pivot] % other.coeffs[pivot] != 0 {
            return None;
        }
        let k = self.coeffs[pivot] / other.coeffs[pivot];
        (*other * k == *self).then_some(k)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Add for FreqExpr {
    type Output = FreqExpr;
    fn add(self, rhs: FreqExpr) -> FreqExpr {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs) {
            *c += r;
        }
        FreqExpr { coeffs }
    }
}

impl Sub for FreqExpr {
    type Output = FreqExpr;
    fn sub(self, rhs: FreqExpr) -> FreqExpr {
        self + (-rhs)
    }
}

impl Neg for FreqExpr {
    type Output = FreqExpr;
    fn neg(self) -> FreqExpr {
        self * -1
    }
}

impl Mul<i64> for FreqExpr {
    type Output = FreqExpr;
    fn mul(self, k: i64) -> FreqExpr {
        FreqExpr {
            coeffs: self.coeffs.map(|c| c * k),
        }
    }
}

impl fmt::Display for FreqExpr {
    /// `wc-wr`, `-wc-wr`, `w-2wc`; `0` for the zero combination.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for sym in FreqSymbol::ALL {
            let c = self.coeff(sym);
            if c == 0 {
                continue;
            }
            if c < 0 {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            f.write_str(sym.name())?;
            first = false;
        }
        Ok(())
    }
}

impl std::str::FromStr for FreqExpr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(FreqExpr::ZERO);
        }
        let bytes = s.as_bytes();
        let mut out = FreqExpr::ZERO;
        let mut i = 0;
        if bytes.is_empty() {
            return Err("empty frequency expression".into());
        }
        while i < bytes.len() {
            let mut sign = 1;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mult: i64 = if start == i {
                1
            } else {
                s[start..i].parse().map_err(|e| format!("bad coefficient in {s:?}: {e}"))?
            };
            let name_start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name = &s[name_start..i];
            let sym = FreqSymbol::from_name(name)
                .ok_or_else(|| format!("unknown frequency symbol {name:?} in {s:?}"))?;
            out = out + FreqExpr::symbol(sym) * (sign * mult);
        }
        Ok(out)
    }
}

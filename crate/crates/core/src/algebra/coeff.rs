//! Exact coefficients: sums of complex-rational fraction monomials.
//!
//! A fraction monomial is `q · g^a · γ_c^b · ħ^c · Π_k L_k^{e_k}` where `q` is a
//! Gaussian rational and each `L_k` is an integer linear combination of
//! frequency symbols. Structural equality is only used for merging; semantic
//! equality is decided numerically by an [`EqualityProbe`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::freq::{FreqExpr, FreqSymbol};
use super::AlgebraError;

/// Exact `re + i·im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn real(num: i64, den: i64) -> Self {
        CRational::new(ratio(num, den), BigRational::zero())
    }

    pub fn imag(num: i64, den: i64) -> Self {
        CRational::new(BigRational::zero(), ratio(num, den))
    }

    pub fn zero() -> Self {
        CRational::real(0, 1)
    }

    pub fn one() -> Self {
        CRational::real(1, 1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        CRational::imag(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// `k^p` for a nonzero integer `k` and any integer `p`.
    fn int_pow(k: i64, p: i32) -> CRational {
        let base = BigRational::from_integer(BigInt::from(k));
        let mut acc = BigRational::one();
        for _ in 0..p.unsigned_abs() {
            acc *= &base;
        }
        if p < 0 {
            acc = acc.recip();
        }
        CRational::new(acc, BigRational::zero())
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Add for &CRational {
    type Output = CRational;
    fn add(self, rhs: &CRational) -> CRational {
        CRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Mul for &CRational {
    type Output = CRational;
    fn mul(self, rhs: &CRational) -> CRational {
        CRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for CRational {
    /// `-1/1`, `1/2i`, `1/3-1/2i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => f.write_str(&fmt_ratio(&self.re)),
            (true, false) => write!(f, "{}i", fmt_ratio(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}i", fmt_ratio(&self.re), sign, fmt_ratio(&self.im.abs()))
            }
        }
    }
}

fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let (n, d) = s.split_once('/').ok_or_else(|| format!("expected p/q, got {s:?}"))?;
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

impl std::str::FromStr for CRational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(CRational::new(parse_ratio(s)?, BigRational::zero()));
        };
        // Split between real and imaginary parts at the last sign that is not
        // the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        match split {
            None => Ok(CRational::new(BigRational::zero(), parse_ratio(body)?)),
            Some(i) => {
                let re = parse_ratio(&body[..i])?;
                let im_str = body[i..].trim_start_matches('+');
                Ok(CRational::new(re, parse_ratio(im_str)?))
            }
        }
    }
}

/// Real parameter symbols that appear as integer powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamSymbol {
    /// Oscillator-oscillator coupling `g`.
    G,
    /// Oscillator-bath coupling `γ_c`.
    Gc,
    Hbar,
}

impl ParamSymbol {
    pub const ALL: [ParamSymbol; 3] = [ParamSymbol::G, ParamSymbol::Gc, ParamSymbol::Hbar];

    pub fn name(self) -> &'static str {
        match self {
            ParamSymbol::G => "g",
            ParamSymbol::Gc => "gc",
            ParamSymbol::Hbar => "hbar",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ParamSymbol::ALL.into_iter().find(|p| p.name() == name)
    }
}

/// The symbolic part of a fraction monomial.
///
/// Linear factors are stored primitive (coprime coefficients, positive
/// leading coefficient) and sorted, so equal monomials compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FracKey {
    params: [i32; 3],
    linear: Vec<(FreqExpr, i32)>,
}

impl FracKey {
    pub fn param_power(&self, p: ParamSymbol) -> i32 {
        self.params[p as usize]
    }

    pub fn linear_factors(&self) -> &[(FreqExpr, i32)] {
        &self.linear
    }

    fn mul(&self, other: &FracKey) -> FracKey {
        let mut params = self.params;
        for (p, q) in params.iter_mut().zip(other.params) {
            *p += q;
        }
        let mut merged: BTreeMap<FreqExpr, i32> = self.linear.iter().copied().collect();
        for &(e, k) in &other.linear {
            *merged.entry(e).or_insert(0) += k;
        }
        FracKey {
            params,
            linear: merged.into_iter().filter(|&(_, k)| k != 0).collect(),
        }
    }

    fn eval(&self, at: &Assignment) -> f64 {
        let mut v = 1.0;
        for p in ParamSymbol::ALL {
            v *= at.param(p).powi(self.param_power(p));
        }
        for &(e, k) in &self.linear {
            v *= e.eval(at.wc, at.wr, at.w).powi(k);
        }
        v
    }
}

/// A sum of fraction monomials, merged by [`FracKey`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CoeffSum {
    terms: BTreeMap<FracKey, CRational>,
}

impl CoeffSum {
    pub fn zero() -> Self {
        CoeffSum::default()
    }

    pub fn one() -> Self {
        CoeffSum::from_rational(CRational::one())
    }

    pub fn from_rational(q: CRational) -> Self {
        let mut out = CoeffSum::zero();
        out.add_term(FracKey::default(), q);
        out
    }

    pub fn param(p: ParamSymbol, power: i32) -> Self {
        let mut key = FracKey::default();
        key.params[p as usize] = power;
        let mut out = CoeffSum::zero();
        out.add_term(key, CRational::one());
        out
    }

    /// `expr^power`, normalized so the stored factor is primitive.
    pub fn linear_power(expr: FreqExpr, power: i32) -> Result<Self, AlgebraError> {
        if power == 0 {
            return Ok(CoeffSum::one());
        }
        let (scale, prim) = expr.primitive();
        if scale == 0 {
            return Err(AlgebraError::ZeroDenominator(expr.to_string()));
        }
        let key = FracKey {
            params: [0; 3],
            linear: vec![(prim, power)],
        };
        let mut out = CoeffSum::zero();
        out.add_term(key, CRational::int_pow(scale, power));
        Ok(out)
    }

    fn add_term(&mut self, key: FracKey, q: CRational) {
        if q.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = &*existing + &q;
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, q);
            }
        }
    }

    /// Structurally zero (no fraction monomials left after merging).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FracKey, &CRational)> {
        self.terms.iter()
    }

    pub fn conj(&self) -> CoeffSum {
        CoeffSum {
            terms: self.terms.iter().map(|(k, q)| (k.clone(), q.conj())).collect(),
        }
    }

    pub fn scale(&self, q: &CRational) -> CoeffSum {
        let mut out = CoeffSum::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * q);
        }
        out
    }

    pub fn eval(&self, at: &Assignment) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, q)| q.to_complex() * k.eval(at))
            .sum()
    }

    /// Sum of the absolute values of the individual fraction monomials, the
    /// reference magnitude for cancellation-aware zero tests.
    pub fn eval_scale(&self, at: &Assignment) -> f64 {
        self.terms
            .iter()
            .map(|(k, q)| q.to_complex().norm() * k.eval(at).abs())
            .sum()
    }

    /// Replace a frequency symbol inside every linear factor.
    pub fn substitute(&self, sym: FreqSymbol, by: &FreqExpr) -> Result<CoeffSum, AlgebraError> {
        let mut out = CoeffSum::zero();
        for (key, q) in &self.terms {
            let mut rebuilt = CoeffSum::from_rational(q.clone());
            let mut params_only = key.clone();
            params_only.linear.clear();
            rebuilt = &rebuilt * &CoeffSum::with_key(params_only);
            for &(e, k) in &key.linear {
                let replaced = e.substitute(sym, by);
                if replaced.is_zero() {
                    if k < 0 {
                        return Err(AlgebraError::ZeroDenominator(e.to_string()));
                    }
                    rebuilt = CoeffSum::zero();
                    break;
                }
                rebuilt = &rebuilt * &CoeffSum::linear_power(replaced, k)?;
            }
            out = &out + &rebuilt;
        }
        Ok(out)
    }

    fn with_key(key: FracKey) -> CoeffSum {
        let mut out = CoeffSum::zero();
        out.add_term(key, CRational::one());
        out
    }
}

impl Add for &CoeffSum {
    type Output = CoeffSum;
    fn add(self, rhs: &CoeffSum) -> CoeffSum {
        let mut out = self.clone();
        for (k, q) in &rhs.terms {
            out.add_term(k.clone(), q.clone());
        }
        out
    }
}

impl Sub for &CoeffSum {
    type Output = CoeffSum;
    fn sub(self, rhs: &CoeffSum) -> CoeffSum {
        self + &(-rhs)
    }
}

impl Neg for &CoeffSum {
    type Output = CoeffSum;
    fn neg(self) -> CoeffSum {
        CoeffSum {
            terms: self.terms.iter().map(|(k, q)| (k.clone(), -q)).collect(),
        }
    }
}

impl Mul for &CoeffSum {
    type Output = CoeffSum;
    fn mul(self, rhs: &CoeffSum) -> CoeffSum {
        let mut out = CoeffSum::zero();
        for (ka, qa) in &self.terms {
            for (kb, qb) in &rhs.terms {
                out.add_term(ka.mul(kb), qa * qb);
            }
        }
        out
    }
}

/// Renders one fraction monomial as `(q)*g^2*hbar^-1*(wc+wr)^-1`.
pub(crate) fn fmt_fraction(key: &FracKey, q: &CRational) -> String {
    let mut s = format!("({q})");
    for p in ParamSymbol::ALL {
        match key.param_power(p) {
            0 => {}
            1 => s.push_str(&format!("*{}", p.name())),
            k => s.push_str(&format!("*{}^{}", p.name(), k)),
        }
    }
    for &(e, k) in &key.linear {
        if k == 1 {
            s.push_str(&format!("*({e})"));
        } else {
            s.push_str(&format!("*({e})^{k}"));
        }
    }
    s
}

/// Parses the output of [`fmt_fraction`].
pub(crate) fn parse_fraction(s: &str) -> Result<CoeffSum, String> {
    let s = s.trim();
    let close = s
        .find(')')
        .filter(|_| s.starts_with('('))
        .ok_or_else(|| format!("coefficient must start with a parenthesized rational: {s:?}"))?;
    let q: CRational = s[1..close].parse()?;
    let mut out = CoeffSum::from_rational(q);
    let rest = &s[close + 1..];
    if rest.is_empty() {
        return Ok(out);
    }
    let rest = rest
        .strip_prefix('*')
        .ok_or_else(|| format!("expected '*' after rational in {s:?}"))?;
    for factor in rest.split('*') {
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (b, p.parse::<i32>().map_err(|_| format!("bad exponent in {factor:?}"))?),
            None => (factor, 1),
        };
        let piece = if let Some(inner) = base.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
            let e: FreqExpr = inner.parse()?;
            CoeffSum::linear_power(e, power).map_err(|e| e.to_string())?
        } else {
            let p = ParamSymbol::from_name(base)
                .ok_or_else(|| format!("unknown parameter symbol {base:?}"))?;
            CoeffSum::param(p, power)
        };
        out = &out * &piece;
    }
    Ok(out)
}

/// Numeric values for every symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Assignment {
    pub g: f64,
    pub gc: f64,
    pub hbar: f64,
    pub wc: f64,
    pub wr: f64,
    pub w: f64,
}

impl Assignment {
    pub fn param(&self, p: ParamSymbol) -> f64 {
        match p {
            ParamSymbol::G => self.g,
            ParamSymbol::Gc => self.gc,
            ParamSymbol::Hbar => self.hbar,
        }
    }
}

/// A fixed set of random strictly positive assignments used to decide
/// coefficient equality.
#[derive(Clone, Debug)]
pub struct EqualityProbe {
    points: Vec<Assignment>,
    rel_tol: f64,
}

pub const DEFAULT_PROBE_SEED: u64 = 0x05ee_dc0f_fee5;

static DEFAULT_PROBE: LazyLock<EqualityProbe> =
    LazyLock::new(|| EqualityProbe::new(DEFAULT_PROBE_SEED, 10));

impl EqualityProbe {
    pub fn new(seed: u64, n_points: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let points = (0..n_points.max(1))
            .map(|_| Assignment {
                g: draw(0.2, 2.0),
                gc: draw(0.2, 2.0),
                hbar: draw(0.5, 2.0),
                wc: draw(0.5, 3.0),
                wr: draw(0.5, 3.0),
                w: draw(0.5, 3.0),
            })
            .collect();
        EqualityProbe {
            points,
            rel_tol: 1e-12,
        }
    }

    /// The probe the algebra uses internally to drop vanishing coefficients.
    pub fn shared() -> &'static EqualityProbe {
        &DEFAULT_PROBE
    }

    pub fn points(&self) -> &[Assignment] {
        &self.points
    }

    pub fn is_zero(&self, c: &CoeffSum) -> bool {
        if c.is_zero() {
            return true;
        }
        self.points.iter().all(|at| {
            let scale = c.eval_scale(at);
            c.eval(at).norm() <= self.rel_tol * scale
        })
    }

    pub fn equal(&self, a: &CoeffSum, b: &CoeffSum) -> bool {
        self.is_zero(&(a - b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wc_plus_wr() -> FreqExpr {
        FreqExpr::new(1, 1, 0)
    }

    #[test]
    fn rational_display_roundtrip() {
        for s in ["-1/1", "1/2i", "1/3-1/2i", "-2/5+7/3i", "0/1"] {
            let q: CRational = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
    }

    #[test]
    fn linear_factor_normalization_absorbs_sign_and_content() {
        // (-2wc-2wr)^-1 = (-1/2)·(wc+wr)^-1
        let a = CoeffSum::linear_power(FreqExpr::new(-2, -2, 0), -1).unwrap();
        let b = CoeffSum::linear_power(wc_plus_wr(), -1).unwrap().scale(&CRational::real(-1, 2));
        assert_eq!(a, b);
        assert!(CoeffSum::linear_power(FreqExpr::ZERO, -1).is_err());
    }

    #[test]
    fn structural_cancellation() {
        let x = &CoeffSum::param(ParamSymbol::G, 2) * &CoeffSum::linear_power(wc_plus_wr(), -1).unwrap();
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn numeric_zero_detects_partial_fraction_identity() {
        // 1/(wc-wr) + 1/(wc+wr) - 2wc/((wc-wr)(wc+wr)) = 0
        let d = CoeffSum::linear_power(FreqExpr::new(1, -1, 0), -1).unwrap();
        let s = CoeffSum::linear_power(wc_plus_wr(), -1).unwrap();
        let wc = CoeffSum::linear_power(FreqExpr::symbol(FreqSymbol::Wc), 1).unwrap();
        let two = CoeffSum::from_rational(CRational::real(2, 1));
        let rhs = &(&two * &wc) * &(&d * &s);
        let expr = &(&d + &s) - &rhs;
        assert!(!expr.is_zero());
        assert!(EqualityProbe::shared().is_zero(&expr));
        assert!(!EqualityProbe::shared().is_zero(&d));
    }

    #[test]
    fn fraction_text_roundtrip() {
        let c = &(&CoeffSum::param(ParamSymbol::G, 2) * &CoeffSum::param(ParamSymbol::Hbar, -1))
            * &CoeffSum::linear_power(wc_plus_wr(), -1).unwrap();
        let c = c.scale(&CRational::real(-1, 1));
        let (k, q) = c.iter().next().unwrap();
        let text = fmt_fraction(k, q);
        assert_eq!(text, "(-1/1)*g^2*hbar^-1*(wc+wr)^-1");
        assert_eq!(parse_fraction(&text).unwrap(), c);
    }

    #[test]
    fn substitution_at_resonance() {
        // 1/(wc+wr) at wr = wc becomes (1/2)/wc; 1/(wc-wr) is singular.
        let s = CoeffSum::linear_power(wc_plus_wr(), -1).unwrap();
        let wc = FreqExpr::symbol(FreqSymbol::Wc);
        let out = s.substitute(FreqSymbol::Wr, &wc).unwrap();
        let expect = CoeffSum::linear_power(wc, -1).unwrap().scale(&CRational::real(1, 2));
        assert_eq!(out, expect);
        let d = CoeffSum::linear_power(FreqExpr::new(1, -1, 0), -1).unwrap();
        assert!(d.substitute(FreqSymbol::Wr, &wc).is_err());
    }
}

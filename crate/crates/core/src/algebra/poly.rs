//! Normal-ordered polynomials in bosonic ladder operators with oscillating
//! phase factors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::coeff::{CRational, CoeffSum, EqualityProbe};
use super::freq::{FreqExpr, FreqSymbol};
use super::AlgebraError;

/// Whether a mode belongs to the oscillator system or to the bath family.
/// System modes sort before bath modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    System,
    /// A bath family `a_ω`, carrying the free frequency symbol ω.
    Bath,
}

/// A bosonic mode. Ordering is system-before-bath, then by label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeId {
    kind: ModeKind,
    label: String,
}

impl ModeId {
    pub fn system(label: &str) -> Self {
        ModeId {
            kind: ModeKind::System,
            label: label.to_owned(),
        }
    }

    pub fn bath(label: &str) -> Self {
        ModeId {
            kind: ModeKind::Bath,
            label: label.to_owned(),
        }
    }

    /// The bath-coupled oscillator `c`.
    pub fn c() -> Self {
        ModeId::system("c")
    }

    /// The indirectly coupled oscillator `r`.
    pub fn r() -> Self {
        ModeId::system("r")
    }

    /// The bath family `a_ω`.
    pub fn a() -> Self {
        ModeId::bath("a")
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_bath(&self) -> bool {
        self.kind == ModeKind::Bath
    }

    /// The frequency symbol a bath family is indexed by.
    pub fn bath_frequency(&self) -> Option<FreqSymbol> {
        self.is_bath().then_some(FreqSymbol::W)
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// A single creation (`dagger`) or annihilation operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: ModeId,
    pub dagger: bool,
}

impl Ladder {
    pub fn annihilate(mode: ModeId) -> Self {
        Ladder { mode, dagger: false }
    }

    pub fn create(mode: ModeId) -> Self {
        Ladder { mode, dagger: true }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mode, if self.dagger { "t" } else { "" })
    }
}

/// A normal-ordered product `Π_m (m†)^{p_m} m^{q_m}` over modes in global order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(ModeId, u32, u32)>,
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial::default()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// `(creations, annihilations)` per mode, in global mode order.
    pub fn factors(&self) -> &[(ModeId, u32, u32)] {
        &self.factors
    }

    pub fn powers(&self, mode: &ModeId) -> (u32, u32) {
        self.factors
            .iter()
            .find(|(m, _, _)| m == mode)
            .map(|&(_, p, q)| (p, q))
            .unwrap_or((0, 0))
    }

    /// The operators in normal order.
    pub fn ops(&self) -> Vec<Ladder> {
        let mut out = Vec::new();
        for (m, p, q) in &self.factors {
            out.extend((0..*p).map(|_| Ladder::create(m.clone())));
            out.extend((0..*q).map(|_| Ladder::annihilate(m.clone())));
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, p, q)| p + q).sum()
    }

    fn from_factors(mut factors: Vec<(ModeId, u32, u32)>) -> Self {
        factors.retain(|&(_, p, q)| p + q > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        Monomial { factors }
    }

    fn single(op: &Ladder) -> Self {
        let (p, q) = if op.dagger { (1, 0) } else { (0, 1) };
        Monomial::from_factors(vec![(op.mode.clone(), p, q)])
    }

    fn adjoint(&self) -> Self {
        Monomial {
            factors: self.factors.iter().map(|(m, p, q)| (m.clone(), *q, *p)).collect(),
        }
    }

    /// Normal-ordered expansion of `self · other` as integer-weighted monomials.
    ///
    /// Per mode, `(a†^p a^q)(a†^r a^s) = Σ_k C(q,k) C(r,k) k! a†^{p+r-k} a^{q+s-k}`;
    /// distinct modes commute, so the full product is the Cartesian product of
    /// the per-mode expansions.
    pub fn product(&self, other: &Monomial) -> Vec<(u128, Monomial)> {
        let mut per_mode: BTreeMap<&ModeId, ((u32, u32), (u32, u32))> = BTreeMap::new();
        for (m, p, q) in &self.factors {
            per_mode.entry(m).or_insert(((0, 0), (0, 0))).0 = (*p, *q);
        }
        for (m, r, s) in &other.factors {
            per_mode.entry(m).or_insert(((0, 0), (0, 0))).1 = (*r, *s);
        }

        let mut acc: Vec<(u128, Vec<(ModeId, u32, u32)>)> = vec![(1, Vec::new())];
        for (mode, ((p, q), (r, s))) in per_mode {
            let options: Vec<(u128, u32, u32)> = (0..=q.min(r))
                .map(|k| {
                    let w = binomial(q, k) * binomial(r, k) * factorial(k);
                    (w, p + r - k, q + s - k)
                })
                .collect();
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for (w, factors) in &acc {
                for &(wo, pp, qq) in &options {
                    let mut f = factors.clone();
                    f.push((mode.clone(), pp, qq));
                    next.push((w * wo, f));
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|(w, f)| (w, Monomial::from_factors(f)))
            .collect()
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

/// An arbitrary (not necessarily normal-ordered) product of ladder operators
/// with a coefficient and phase `e^{i·phase·t}`.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coeff: CoeffSum,
    pub ops: Vec<Ladder>,
    pub phase: FreqExpr,
}

/// A normal-ordered term `coeff · monomial · e^{i·phase·t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalTerm {
    pub coeff: CoeffSum,
    pub monomial: Monomial,
    pub phase: FreqExpr,
}

/// Rewrite an operator word into normal order using `[a, a†] = 1` within each
/// mode and commutation between distinct modes.
pub fn normal_order(term: &RawTerm) -> OperatorPoly {
    let mut expansion: Vec<(u128, Monomial)> = vec![(1, Monomial::identity())];
    for op in &term.ops {
        let single = Monomial::single(op);
        expansion = expansion
            .into_iter()
            .flat_map(|(w, m)| {
                m.product(&single)
                    .into_iter()
                    .map(move |(w2, m2)| (w * w2, m2))
            })
            .collect();
    }
    let mut out = OperatorPoly::zero();
    for (w, m) in expansion {
        out.insert(m, term.phase, term.coeff.scale(&int_rational(w)));
    }
    out.prune();
    out
}

fn int_rational(w: u128) -> CRational {
    let w = i64::try_from(w).expect("normal-ordering weight overflows i64");
    CRational::real(w, 1)
}

/// A fully merged sum of [`NormalTerm`]s keyed by `(monomial, phase)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorPoly {
    terms: BTreeMap<(Monomial, FreqExpr), CoeffSum>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        OperatorPoly::default()
    }

    pub fn scalar(c: CoeffSum) -> Self {
        OperatorPoly::from_term(NormalTerm {
            coeff: c,
            monomial: Monomial::identity(),
            phase: FreqExpr::ZERO,
        })
    }

    pub fn from_term(term: NormalTerm) -> Self {
        let mut out = OperatorPoly::zero();
        out.insert(term.monomial, term.phase, term.coeff);
        out
    }

    /// `coeff · op · e^{i·phase·t}` for a single ladder operator.
    pub fn ladder(op: Ladder, phase: FreqExpr, coeff: CoeffSum) -> Self {
        normal_order(&RawTerm {
            coeff,
            ops: vec![op],
            phase,
        })
    }

    /// Normal-ordered form of an arbitrary word.
    pub fn word(ops: Vec<Ladder>, phase: FreqExpr, coeff: CoeffSum) -> Self {
        normal_order(&RawTerm { coeff, ops, phase })
    }

    pub(crate) fn insert(&mut self, monomial: Monomial, phase: FreqExpr, coeff: CoeffSum) {
        if coeff.is_zero() {
            return;
        }
        let key = (monomial, phase);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = &*existing + &coeff;
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    /// Drop coefficients that vanish identically but not structurally.
    fn prune(&mut self) {
        let probe = EqualityProbe::shared();
        self.terms.retain(|_, c| !probe.is_zero(c));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &FreqExpr, &CoeffSum)> {
        self.terms.iter().map(|((m, p), c)| (m, p, c))
    }

    pub fn terms(&self) -> Vec<NormalTerm> {
        self.iter()
            .map(|(m, p, c)| NormalTerm {
                coeff: c.clone(),
                monomial: m.clone(),
                phase: *p,
            })
            .collect()
    }

    pub fn coefficient(&self, monomial: &Monomial, phase: &FreqExpr) -> Option<&CoeffSum> {
        self.terms.get(&(monomial.clone(), *phase))
    }

    /// Keep the terms satisfying `pred`.
    pub fn filter(&self, mut pred: impl FnMut(&Monomial, &FreqExpr) -> bool) -> OperatorPoly {
        OperatorPoly {
            terms: self
                .terms
                .iter()
                .filter(|((m, p), _)| pred(m, p))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Apply `f` to every coefficient, keeping monomials and phases.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Monomial, &FreqExpr, &CoeffSum) -> CoeffSum) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for ((m, p), c) in &self.terms {
            out.insert(m.clone(), *p, f(m, p, c));
        }
        out.prune();
        out
    }

    pub fn scale(&self, c: &CoeffSum) -> OperatorPoly {
        self.map_coeffs(|_, _, v| v * c)
    }

    pub fn scale_rational(&self, q: &CRational) -> OperatorPoly {
        self.map_coeffs(|_, _, v| v.scale(q))
    }

    pub fn multiply(&self, other: &OperatorPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for ((ma, pa), ca) in &self.terms {
            for ((mb, pb), cb) in &other.terms {
                let c = ca * cb;
                for (w, m) in ma.product(mb) {
                    out.insert(m, *pa + *pb, c.scale(&int_rational(w)));
                }
            }
        }
        out.prune();
        out
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &OperatorPoly) -> OperatorPoly {
        &self.multiply(other) - &other.multiply(self)
    }

    /// Formal Hermitian conjugate: monomials daggered, coefficients conjugated,
    /// phases negated.
    pub fn adjoint(&self) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for ((m, p), c) in &self.terms {
            out.insert(m.adjoint(), -*p, c.conj());
        }
        out
    }

    /// Symbolic equality decided by `probe`.
    pub fn equals(&self, other: &OperatorPoly, probe: &EqualityProbe) -> bool {
        let diff = self - other;
        diff.terms.values().all(|c| probe.is_zero(c))
    }

    pub fn is_hermitian(&self, probe: &EqualityProbe) -> bool {
        self.equals(&self.adjoint(), probe)
    }

    /// Replace a frequency symbol in phases and coefficients.
    pub fn substitute(&self, sym: FreqSymbol, by: &FreqExpr) -> Result<OperatorPoly, AlgebraError> {
        let mut out = OperatorPoly::zero();
        for ((m, p), c) in &self.terms {
            out.insert(m.clone(), p.substitute(sym, by), c.substitute(sym, by)?);
        }
        out.prune();
        Ok(out)
    }

    /// Formal time derivative: each term gains the factor `iΩ`.
    pub fn time_derivative(&self) -> Result<OperatorPoly, AlgebraError> {
        let mut out = OperatorPoly::zero();
        for ((m, p), c) in &self.terms {
            if p.is_zero() {
                continue;
            }
            let factor = CoeffSum::linear_power(*p, 1)?.scale(&CRational::i());
            out.insert(m.clone(), *p, c * &factor);
        }
        out.prune();
        Ok(out)
    }
}

impl Add for &OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for ((m, p), c) in &rhs.terms {
            out.insert(m.clone(), *p, c.clone());
        }
        out.prune();
        out
    }
}

impl Sub for &OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        self + &(-rhs)
    }
}

impl Neg for &OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        OperatorPoly {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Mul for &OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: &OperatorPoly) -> OperatorPoly {
        self.multiply(rhs)
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> Ladder {
        Ladder::annihilate(ModeId::c())
    }
    fn ct() -> Ladder {
        Ladder::create(ModeId::c())
    }
    fn r() -> Ladder {
        Ladder::annihilate(ModeId::r())
    }
    fn rt() -> Ladder {
        Ladder::create(ModeId::r())
    }

    fn word(ops: Vec<Ladder>) -> OperatorPoly {
        OperatorPoly::word(ops, FreqExpr::ZERO, CoeffSum::one())
    }

    fn int(k: i64) -> OperatorPoly {
        OperatorPoly::scalar(CoeffSum::from_rational(CRational::real(k, 1)))
    }

    fn probe() -> &'static EqualityProbe {
        EqualityProbe::shared()
    }

    #[test]
    fn c_cdag_normal_orders_to_number_plus_one() {
        let got = word(vec![c(), ct()]);
        let want = &word(vec![ct(), c()]) + &int(1);
        assert!(got.equals(&want, probe()));
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn distinct_modes_commute_into_global_order() {
        let got = word(vec![r(), c()]);
        let terms = got.terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].monomial.ops(), vec![c(), r()]);
        assert!(probe().equal(&terms[0].coeff, &CoeffSum::one()));
    }

    #[test]
    fn c_cdag_cdag_by_hand() {
        // c c† c† = c†c†c + 2c†
        let got = word(vec![c(), ct(), ct()]);
        let want = &word(vec![ct(), ct(), c()]) + &word(vec![ct()]).scale_rational(&CRational::real(2, 1));
        assert!(got.equals(&want, probe()));
    }

    #[test]
    fn multiply_examples() {
        let cp = word(vec![c()]);
        let cdp = word(vec![ct()]);
        assert!(cp.multiply(&cdp).equals(&(&word(vec![ct(), c()]) + &int(1)), probe()));

        // phases add
        let a = OperatorPoly::ladder(c(), FreqExpr::new(-1, 0, 0), CoeffSum::one());
        let b = OperatorPoly::ladder(r(), FreqExpr::new(0, -1, 0), CoeffSum::one());
        let prod = a.multiply(&b);
        let t = prod.terms();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].phase, FreqExpr::new(-1, -1, 0));
        assert_eq!(t[0].monomial.ops(), vec![c(), r()]);

        // (c†c)(c†c) = c†c†cc + c†c
        let n = word(vec![ct(), c()]);
        let want = &word(vec![ct(), ct(), c(), c()]) + &n;
        assert!(n.multiply(&n).equals(&want, probe()));
    }

    #[test]
    fn commutator_examples() {
        let cp = word(vec![c()]);
        let cdp = word(vec![ct()]);
        assert!(cp.commutator(&cdp).equals(&int(1), probe()));

        let n = word(vec![ct(), c()]);
        assert!(n.commutator(&cdp).equals(&cdp, probe()));

        // [c r†, c† r] = r†r − c†c
        let x = word(vec![c(), rt()]);
        let y = word(vec![ct(), r()]);
        let want = &word(vec![rt(), r()]) - &word(vec![ct(), c()]);
        assert!(x.commutator(&y).equals(&want, probe()));
    }

    #[test]
    fn adjoint_examples() {
        let a = OperatorPoly::ladder(c(), FreqExpr::new(-1, 0, 0), CoeffSum::one());
        let t = a.adjoint().terms();
        assert_eq!(t[0].monomial.ops(), vec![ct()]);
        assert_eq!(t[0].phase, FreqExpr::new(1, 0, 0));

        let i_n = word(vec![ct(), c()]).scale_rational(&CRational::i());
        let want = word(vec![ct(), c()]).scale_rational(&CRational::imag(-1, 1));
        assert!(i_n.adjoint().equals(&want, probe()));
    }

    #[test]
    fn binomial_weights() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(factorial(4), 24);
        assert_eq!(binomial(3, 0), 1);
    }
}

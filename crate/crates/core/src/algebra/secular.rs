//! Secular averaging and generator extraction for the algebraic
//! (Krylov–Bogolyubov–Mitropolsky) perturbation scheme.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::coeff::{CRational, CoeffSum, ParamSymbol};
use super::freq::{FreqExpr, FreqSymbol};
use super::poly::{Monomial, OperatorPoly};
use super::AlgebraError;

/// Which oscillating combinations count as slow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceDecl {
    /// Pairs `(s1, s2)` declared nearly equal; multiples of `s1 − s2` are slow.
    #[serde(default)]
    pub pairs: Vec<(FreqSymbol, FreqSymbol)>,
    /// Keep `±(ω − ω_x)` bath terms as resonant with the region around `ω_x`.
    #[serde(default = "default_true")]
    pub bath_rule: bool,
}

fn default_true() -> bool {
    true
}

impl Default for ResonanceDecl {
    fn default() -> Self {
        ResonanceDecl::nonresonant()
    }
}

impl ResonanceDecl {
    pub fn nonresonant() -> Self {
        ResonanceDecl {
            pairs: Vec::new(),
            bath_rule: true,
        }
    }

    /// `ω_c ≈ ω_r`.
    pub fn resonant_oscillators() -> Self {
        ResonanceDecl {
            pairs: vec![(FreqSymbol::Wc, FreqSymbol::Wr)],
            bath_rule: true,
        }
    }

    pub fn is_resonant(&self, a: FreqSymbol, b: FreqSymbol) -> bool {
        self.pairs
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }
}

/// How a phase behaves under time averaging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhaseClass {
    /// Identically zero phase.
    Secular,
    /// A nonzero multiple of a declared resonant difference.
    Declared,
    /// `±(ω − ω_x)`: resonant with bath bosons around `ω_x`.
    Bath { region: FreqExpr },
    Fast,
}

impl PhaseClass {
    pub fn is_slow(&self) -> bool {
        !matches!(self, PhaseClass::Fast)
    }
}

pub fn classify(phase: &FreqExpr, decl: &ResonanceDecl) -> PhaseClass {
    if phase.is_zero() {
        return PhaseClass::Secular;
    }
    for &(a, b) in &decl.pairs {
        let diff = FreqExpr::symbol(a) - FreqExpr::symbol(b);
        if phase.integer_multiple_of(&diff).is_some() {
            return PhaseClass::Declared;
        }
    }
    if decl.bath_rule {
        if let Some(region) = bath_region(phase) {
            return PhaseClass::Bath { region };
        }
    }
    PhaseClass::Fast
}

/// `ω_x` when `phase = ±(ω − ω_x)` with `ω_x` a positive combination of
/// system frequencies.
pub fn bath_region(phase: &FreqExpr) -> Option<FreqExpr> {
    let sign = phase.coeff(FreqSymbol::W);
    if sign.abs() != 1 {
        return None;
    }
    let region = FreqExpr::symbol(FreqSymbol::W) - *phase * sign;
    region.is_positive_system_combination().then_some(region)
}

/// Terms of `poly` tagged with their spectral region.
pub fn spectral_regions(poly: &OperatorPoly, decl: &ResonanceDecl) -> Vec<(Monomial, FreqExpr, FreqExpr)> {
    poly.iter()
        .filter_map(|(m, p, _)| match classify(p, decl) {
            PhaseClass::Bath { region } => Some((m.clone(), *p, region)),
            _ => None,
        })
        .collect()
}

/// The time average: keep exactly the slow terms.
pub fn average(poly: &OperatorPoly, decl: &ResonanceDecl) -> OperatorPoly {
    poly.filter(|_, p| classify(p, decl).is_slow())
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("cannot integrate a slow term with phase {phase}; average it out first")]
pub struct SecularTermError {
    pub phase: String,
}

/// Generator `S` with `ħ dS/dt = −A`, built term by term:
/// `v·O·e^{iΩt} ↦ −v·O·e^{iΩt}/(iħΩ)`.
pub fn integrate_phase(poly: &OperatorPoly, decl: &ResonanceDecl) -> Result<OperatorPoly, AlgebraError> {
    if let Some((_, p, _)) = poly.iter().find(|(_, p, _)| classify(p, decl).is_slow()) {
        return Err(SecularTermError { phase: p.to_string() }.into());
    }
    let inv_hbar = CoeffSum::param(ParamSymbol::Hbar, -1);
    let mut factors = Vec::new();
    for (_, p, _) in poly.iter() {
        // −1/(iħΩ) = i/(ħΩ)
        let f = &CoeffSum::linear_power(*p, -1)?.scale(&CRational::i()) * &inv_hbar;
        factors.push(f);
    }
    let mut factors = factors.into_iter();
    Ok(poly.map_coeffs(|_, _, c| c * &factors.next().expect("one factor per term")))
}

/// `−(i/2)·[a, b]`.
fn half_commutator(a: &OperatorPoly, b: &OperatorPoly) -> OperatorPoly {
    a.commutator(b).scale_rational(&CRational::imag(-1, 2))
}

#[derive(Clone, Debug)]
pub struct SecondOrder {
    /// Slow second-order interaction Ṽ⁽²⁾.
    pub v2: OperatorPoly,
    /// Second-order generator S⁽²⁾.
    pub s2: OperatorPoly,
}

/// Second order of the scheme: `C = −(i/2)[S1, V1] − (i/2)[S1, V]`,
/// `V2 = ⟨C⟩`, `S2 = ∫(C − V2)`.
pub fn second_order(
    v: &OperatorPoly,
    s1: &OperatorPoly,
    v1: &OperatorPoly,
    decl: &ResonanceDecl,
) -> Result<SecondOrder, AlgebraError> {
    let c = &half_commutator(s1, v1) + &half_commutator(s1, v);
    let v2 = average(&c, decl);
    let s2 = integrate_phase(&(&c - &v2), decl)?;
    Ok(SecondOrder { v2, s2 })
}

/// Slow part of the mixed second-order term
/// `−(i/2)([S10, Vc] + [S10, V01] + [S01, Vcr] + [S01, V10])`.
pub fn interference(
    s10: &OperatorPoly,
    s01: &OperatorPoly,
    vc: &OperatorPoly,
    vcr: &OperatorPoly,
    v01: &OperatorPoly,
    v10: &OperatorPoly,
    decl: &ResonanceDecl,
) -> OperatorPoly {
    let sum = [
        half_commutator(s10, vc),
        half_commutator(s10, v01),
        half_commutator(s01, vcr),
        half_commutator(s01, v10),
    ]
    .iter()
    .fold(OperatorPoly::zero(), |acc, t| &acc + t);
    average(&sum, decl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::EqualityProbe;
    use crate::algebra::couplings::{oscillator_bath, oscillator_pair};
    use crate::algebra::poly::{Ladder, ModeId};

    #[test]
    fn classification() {
        let decl = ResonanceDecl::resonant_oscillators();
        assert_eq!(classify(&FreqExpr::ZERO, &decl), PhaseClass::Secular);
        assert_eq!(classify(&FreqExpr::new(1, -1, 0), &decl), PhaseClass::Declared);
        assert_eq!(classify(&FreqExpr::new(-2, 2, 0), &decl), PhaseClass::Declared);
        assert_eq!(classify(&FreqExpr::new(1, 1, 0), &decl), PhaseClass::Fast);
        assert_eq!(
            classify(&FreqExpr::new(-1, 0, 1), &decl),
            PhaseClass::Bath {
                region: FreqExpr::symbol(FreqSymbol::Wc)
            }
        );
        assert_eq!(
            classify(&FreqExpr::new(0, 1, -1), &decl),
            PhaseClass::Bath {
                region: FreqExpr::symbol(FreqSymbol::Wr)
            }
        );
        // −(ω + ω_c) is not of the form ±(ω − ω_x) with ω_x > 0
        assert_eq!(classify(&FreqExpr::new(-1, 0, -1), &decl), PhaseClass::Fast);
        assert_eq!(
            classify(&FreqExpr::new(1, -1, 0), &ResonanceDecl::nonresonant()),
            PhaseClass::Fast
        );
    }

    #[test]
    fn average_of_pair_coupling_vanishes_off_resonance() {
        assert!(average(&oscillator_pair(), &ResonanceDecl::nonresonant()).is_zero());
    }

    #[test]
    fn integrate_rejects_slow_terms() {
        let v = oscillator_bath();
        let err = integrate_phase(&v, &ResonanceDecl::nonresonant()).unwrap_err();
        assert!(matches!(err, AlgebraError::Secular(_)));
        assert!(integrate_phase(&OperatorPoly::zero(), &ResonanceDecl::nonresonant())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn generator_derivative_restores_fast_part() {
        let decl = ResonanceDecl::nonresonant();
        let v = &oscillator_pair() + &oscillator_bath();
        let fast = &v - &average(&v, &decl);
        let s = integrate_phase(&fast, &decl).unwrap();
        let hbar = CoeffSum::param(ParamSymbol::Hbar, 1);
        let lhs = s.time_derivative().unwrap().scale(&hbar);
        assert!(lhs.equals(&(-&fast), EqualityProbe::shared()));
    }

    #[test]
    fn zero_inputs() {
        let decl = ResonanceDecl::nonresonant();
        let z = OperatorPoly::zero();
        let so = second_order(&z, &z, &z, &decl).unwrap();
        assert!(so.v2.is_zero() && so.s2.is_zero());

        // No bath: interference vanishes.
        let v = oscillator_pair();
        let s10 = integrate_phase(&v, &decl).unwrap();
        assert!(interference(&s10, &z, &z, &v, &z, &z, &decl).is_zero());
    }

    #[test]
    fn uncoupled_oscillators_give_no_r_bath_terms() {
        let decl = ResonanceDecl::nonresonant();
        let vc = oscillator_bath();
        let v01 = average(&vc, &decl);
        let s01 = integrate_phase(&(&vc - &v01), &decl).unwrap();
        let z = OperatorPoly::zero();
        let out = interference(&z, &s01, &vc, &z, &v01, &z, &decl);
        let r = ModeId::r();
        assert!(out.iter().all(|(m, _, _)| m.powers(&r) == (0, 0)));
        let _ = Ladder::create(r);
    }
}

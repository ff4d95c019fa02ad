//! Published closed-form operators, transcribed term by term so they can be
//! compared against the engine output.

use crate::algebra::{CRational, CoeffSum, FreqExpr, Ladder, ModeId, OperatorPoly, ParamSymbol};

fn g() -> CoeffSum {
    CoeffSum::param(ParamSymbol::G, 1)
}

fn gc() -> CoeffSum {
    CoeffSum::param(ParamSymbol::Gc, 1)
}

fn inv_hbar() -> CoeffSum {
    CoeffSum::param(ParamSymbol::Hbar, -1)
}

fn inv(expr: FreqExpr) -> CoeffSum {
    CoeffSum::linear_power(expr, -1).expect("nonzero frequency combination")
}

fn q(num: i64, den: i64) -> CRational {
    CRational::real(num, den)
}

fn sum() -> FreqExpr {
    FreqExpr::new(1, 1, 0)
}

fn diff() -> FreqExpr {
    FreqExpr::new(1, -1, 0)
}

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
fn a() -> Ladder {
    Ladder::annihilate(ModeId::a())
}
fn at() -> Ladder {
    Ladder::create(ModeId::a())
}

fn word(ops: Vec<Ladder>, phase: FreqExpr, coeff: CoeffSum) -> OperatorPoly {
    OperatorPoly::word(ops, phase, coeff)
}

/// `Π_c(ω_r) = g²/ħ·(1/(ω_c+ω_r) + 1/(ω_c−ω_r))`.
pub fn pi_c() -> CoeffSum {
    let pre = &(&g() * &g()) * &inv_hbar();
    &pre * &(&inv(sum()) + &inv(diff()))
}

/// `Π_r(ω_c) = g²/ħ·(1/(ω_r+ω_c) + 1/(ω_r−ω_c))`.
pub fn pi_r() -> CoeffSum {
    let pre = &(&g() * &g()) * &inv_hbar();
    &pre * &(&inv(sum()) + &inv(-diff()))
}

/// `Π(ω_c) = g²/(2ħω_c)`.
pub fn pi_resonant() -> CoeffSum {
    let pre = &(&g() * &g()) * &inv_hbar();
    (&pre * &inv(FreqExpr::new(1, 0, 0))).scale(&q(1, 2))
}

/// `1/i = −i`.
fn over_i(x: CoeffSum) -> CoeffSum {
    x.scale(&CRational::imag(-1, 1))
}

/// First-order generator off resonance.
pub fn generator_nonresonant() -> OperatorPoly {
    let k_sum = over_i(&(&g() * &inv_hbar()) * &inv(sum()));
    let k_diff = over_i(&(&g() * &inv_hbar()) * &inv(diff()));
    let terms = [
        word(vec![c(), r()], -sum(), k_sum.clone()),
        word(vec![ct(), rt()], sum(), -&k_sum),
        word(vec![c(), rt()], -diff(), k_diff.clone()),
        word(vec![ct(), r()], diff(), -&k_diff),
    ];
    terms.iter().fold(OperatorPoly::zero(), |acc, t| &acc + t)
}

/// First-order generator on resonance, with `2ω_c` in place of `ω_c + ω_r`.
pub fn generator_resonant() -> OperatorPoly {
    let k = over_i(&(&g() * &inv_hbar()) * &inv(FreqExpr::new(2, 0, 0)));
    &word(vec![c(), r()], -sum(), k.clone()) + &word(vec![ct(), rt()], sum(), -&k)
}

/// Resonant first-order exchange term.
pub fn exchange_resonant() -> OperatorPoly {
    &word(vec![c(), rt()], -diff(), g()) + &word(vec![ct(), r()], diff(), g())
}

/// Which shift multiplies which number operator in the second-order term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftLabels {
    /// `−c⁺c·Π_c − r⁺r·Π_r`, as printed.
    Printed,
    /// `−c⁺c·Π_r − r⁺r·Π_c`.
    Swapped,
}

fn scalar_shift() -> CoeffSum {
    -&(&(&(&g() * &g()) * &inv_hbar()) * &inv(sum()))
}

/// Second-order term off resonance with the given shift labelling.
pub fn second_order_nonresonant(labels: ShiftLabels) -> OperatorPoly {
    let (on_c, on_r) = match labels {
        ShiftLabels::Printed => (pi_c(), pi_r()),
        ShiftLabels::Swapped => (pi_r(), pi_c()),
    };
    let z = FreqExpr::ZERO;
    let terms = [
        word(vec![ct(), c()], z, -&on_c),
        word(vec![rt(), r()], z, -&on_r),
        OperatorPoly::scalar(scalar_shift()),
    ];
    terms.iter().fold(OperatorPoly::zero(), |acc, t| &acc + t)
}

/// Second-order term on resonance.
pub fn second_order_resonant() -> OperatorPoly {
    let pi = pi_resonant();
    let z = FreqExpr::ZERO;
    let terms = [
        word(vec![ct(), c()], z, -&pi),
        word(vec![rt(), r()], z, -&pi),
        OperatorPoly::scalar(-&pi),
    ];
    terms.iter().fold(OperatorPoly::zero(), |acc, t| &acc + t)
}

/// Resonant bath coupling of `c` around `ω_c`.
pub fn bath_first_order() -> OperatorPoly {
    let phase = FreqExpr::new(-1, 0, 1);
    &word(vec![c(), at()], phase, gc()) + &word(vec![ct(), a()], -phase, gc())
}

/// `−gγ_c/(2ħω_c)`, the printed interference coefficient.
pub fn interference_coefficient() -> CoeffSum {
    let k = &(&(&g() * &gc()) * &inv_hbar()) * &inv(FreqExpr::new(1, 0, 0));
    k.scale(&q(-1, 2))
}

/// Induced bath coupling of `r` around `ω_r`.
pub fn bath_interference() -> OperatorPoly {
    let k = interference_coefficient();
    let phase = FreqExpr::new(0, 1, -1);
    &word(vec![rt(), a()], phase, k.clone()) + &word(vec![r(), at()], -phase, k)
}

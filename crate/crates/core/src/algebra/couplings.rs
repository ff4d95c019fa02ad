//! Interaction-picture couplings of the two-oscillator and bath model.

use super::coeff::{CoeffSum, ParamSymbol};
use super::freq::{FreqExpr, FreqSymbol};
use super::poly::{Ladder, ModeId, OperatorPoly};

/// `m e^{-iνt} + m† e^{iνt}` for mode `m` oscillating at `ν`.
pub fn quadrature(mode: ModeId, freq: FreqSymbol) -> OperatorPoly {
    let nu = FreqExpr::symbol(freq);
    &OperatorPoly::ladder(Ladder::annihilate(mode.clone()), -nu, CoeffSum::one())
        + &OperatorPoly::ladder(Ladder::create(mode), nu, CoeffSum::one())
}

/// `g (c e^{-iω_c t} + c† e^{iω_c t})(r e^{-iω_r t} + r† e^{iω_r t})`.
pub fn oscillator_pair() -> OperatorPoly {
    quadrature(ModeId::c(), FreqSymbol::Wc)
        .multiply(&quadrature(ModeId::r(), FreqSymbol::Wr))
        .scale(&CoeffSum::param(ParamSymbol::G, 1))
}

/// `γ_c (c e^{-iω_c t} + c† e^{iω_c t})(a_ω e^{-iωt} + a_ω† e^{iωt})`, one
/// representative of the bath sum.
pub fn oscillator_bath() -> OperatorPoly {
    quadrature(ModeId::c(), FreqSymbol::Wc)
        .multiply(&quadrature(ModeId::a(), FreqSymbol::W))
        .scale(&CoeffSum::param(ParamSymbol::Gc, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::EqualityProbe;

    #[test]
    fn couplings_are_hermitian() {
        let probe = EqualityProbe::shared();
        assert!(oscillator_pair().is_hermitian(probe));
        assert!(oscillator_bath().is_hermitian(probe));
        assert_eq!(oscillator_pair().len(), 4);
    }
}

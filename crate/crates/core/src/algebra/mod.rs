//! Exact symbolic calculus on bosonic operator polynomials with oscillating
//! phase factors: normal ordering, commutators, secular averaging and
//! generator extraction.

pub mod coeff;
pub mod couplings;
pub mod freq;
pub mod poly;
pub mod secular;
pub mod text;

use thiserror::Error;

pub use coeff::{Assignment, CRational, CoeffSum, EqualityProbe, ParamSymbol};
pub use freq::{FreqExpr, FreqSymbol};
pub use poly::{normal_order, Ladder, ModeId, ModeKind, Monomial, NormalTerm, OperatorPoly, RawTerm};
pub use secular::{
    average, classify, integrate_phase, interference, second_order, spectral_regions, PhaseClass,
    ResonanceDecl, SecondOrder, SecularTermError,
};
pub use text::ModeContext;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error(transparent)]
    Secular(#[from] SecularTermError),
    #[error("linear frequency factor {0} vanishes")]
    ZeroDenominator(String),
}

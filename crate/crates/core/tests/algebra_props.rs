use proptest::prelude::*;

use oscbath_core::algebra::text::{parse, render};
use oscbath_core::algebra::{
    normal_order, CRational, CoeffSum, EqualityProbe, FreqExpr, Ladder, ModeContext, ModeId, OperatorPoly,
    ParamSymbol, RawTerm,
};

fn ladder() -> impl Strategy<Value = Ladder> {
    (0..3usize, any::<bool>()).prop_map(|(m, dagger)| {
        let mode = [ModeId::c(), ModeId::r(), ModeId::a()][m].clone();
        Ladder { mode, dagger }
    })
}

fn phase() -> impl Strategy<Value = FreqExpr> {
    (-2i64..=2, -2i64..=2, -1i64..=1).prop_map(|(a, b, c)| FreqExpr::new(a, b, c))
}

fn coeff() -> impl Strategy<Value = CoeffSum> {
    (-4i64..=4, 1i64..=3, -3i64..=3, 0i32..=2, 0i32..=1, prop::option::of(phase())).prop_map(
        |(re, den, im, pg, pgc, lin)| {
            let q = CRational::new(CRational::real(re, den).re, CRational::real(im, den).re);
            let mut c = &CoeffSum::param(ParamSymbol::G, pg) * &CoeffSum::param(ParamSymbol::Gc, pgc);
            if let Some(e) = lin.filter(|e| !e.is_zero()) {
                c = &c * &CoeffSum::linear_power(e, -1).expect("nonzero linear factor");
            }
            c.scale(&q)
        },
    )
}

fn word() -> impl Strategy<Value = OperatorPoly> {
    (prop::collection::vec(ladder(), 0..4), phase(), coeff())
        .prop_map(|(ops, p, c)| OperatorPoly::word(ops, p, c))
}

fn poly() -> impl Strategy<Value = OperatorPoly> {
    prop::collection::vec(word(), 1..4).prop_map(|ws| ws.iter().fold(OperatorPoly::zero(), |acc, w| &acc + w))
}

fn probe() -> &'static EqualityProbe {
    EqualityProbe::shared()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_order_is_idempotent(p in poly()) {
        let mut again = OperatorPoly::zero();
        for t in p.terms() {
            let raw = RawTerm { coeff: t.coeff.clone(), ops: t.monomial.ops(), phase: t.phase };
            again = &again + &normal_order(&raw);
        }
        prop_assert!(again.equals(&p, probe()));
    }

    #[test]
    fn multiplication_is_associative(a in poly(), b in poly(), c in poly()) {
        let left = a.multiply(&b).multiply(&c);
        let right = a.multiply(&b.multiply(&c));
        prop_assert!(left.equals(&right, probe()));
    }

    #[test]
    fn multiplication_distributes(a in poly(), b in poly(), c in poly()) {
        let left = a.multiply(&(&b + &c));
        let right = &a.multiply(&b) + &a.multiply(&c);
        prop_assert!(left.equals(&right, probe()));
    }

    #[test]
    fn commutator_is_antisymmetric(a in poly(), b in poly()) {
        let sum = &a.commutator(&b) + &b.commutator(&a);
        prop_assert!(sum.equals(&OperatorPoly::zero(), probe()));
    }

    #[test]
    fn jacobi_identity(a in word(), b in word(), c in word()) {
        let j = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a)))
            + &c.commutator(&a.commutator(&b));
        prop_assert!(j.equals(&OperatorPoly::zero(), probe()));
    }

    #[test]
    fn adjoint_is_an_antilinear_antihomomorphism(a in poly(), b in poly()) {
        prop_assert!(a.adjoint().adjoint().equals(&a, probe()));
        let lhs = a.multiply(&b).adjoint();
        let rhs = b.adjoint().multiply(&a.adjoint());
        prop_assert!(lhs.equals(&rhs, probe()));
        prop_assert!((&a + &a.adjoint()).is_hermitian(probe()));
    }

    #[test]
    fn text_round_trip(p in poly()) {
        let text = render(&p);
        let back = parse(&text, &ModeContext::standard()).expect("rendered text parses");
        prop_assert!(back.equals(&p, probe()));
        prop_assert_eq!(render(&back), text);
    }

    #[test]
    fn time_derivative_obeys_leibniz(a in word(), b in word()) {
        let lhs = a.multiply(&b).time_derivative().unwrap();
        let rhs = &a.time_derivative().unwrap().multiply(&b) + &a.multiply(&b.time_derivative().unwrap());
        prop_assert!(lhs.equals(&rhs, probe()));
    }
}

#[test]
fn canonical_commutators() {
    let one = CoeffSum::one();
    let op = |l: Ladder| OperatorPoly::ladder(l, FreqExpr::ZERO, one.clone());
    for m in [ModeId::c(), ModeId::r(), ModeId::a()] {
        let a = op(Ladder::annihilate(m.clone()));
        let ad = op(Ladder::create(m.clone()));
        assert!(a.commutator(&ad).equals(&OperatorPoly::scalar(one.clone()), probe()));
        assert!(a.commutator(&a).is_zero());
    }
    let c = op(Ladder::annihilate(ModeId::c()));
    let rt = op(Ladder::create(ModeId::r()));
    assert!(c.commutator(&rt).is_zero());
}

//! Generated-input properties: the expression grammar round-trips through
//! its printer, and ordinal arithmetic obeys its algebraic laws.

use lots::parse::parse_space;
use lots::space::{PredicateSpec, SpaceExpr, SubsetSpec};
use lots::{Kind, Ordinal};
use proptest::prelude::*;

fn ordinal_pool() -> Vec<Ordinal> {
    Ordinal::enumerate_up_to(4)
}

fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
    let pool = ordinal_pool();
    (0..pool.len()).prop_map(move |i| pool[i].clone())
}

fn arb_predicate() -> impl Strategy<Value = PredicateSpec> {
    let leaf = prop_oneof![
        Just(PredicateSpec::IsolatedInAmbient),
        Just(PredicateSpec::LimitInAmbient),
        prop::collection::vec(arb_ordinal(), 1..3).prop_map(PredicateSpec::ExplicitSet),
        (arb_ordinal(), prop::option::of(arb_ordinal()))
            .prop_map(|(lo, hi)| PredicateSpec::Range { lo, hi }),
        arb_ordinal().prop_map(PredicateSpec::LGammaCategory),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| PredicateSpec::Not(Box::new(p))),
            (inner.clone(), inner.clone())
                .prop_map(|(p, q)| PredicateSpec::And(Box::new(p), Box::new(q))),
            (inner.clone(), inner)
                .prop_map(|(p, q)| PredicateSpec::Or(Box::new(p), Box::new(q))),
        ]
    })
}

fn arb_space() -> impl Strategy<Value = SpaceExpr> {
    let leaf = prop_oneof![
        arb_ordinal().prop_map(SpaceExpr::ClosedSeg),
        arb_ordinal().prop_map(SpaceExpr::HalfOpenSeg),
        arb_ordinal().prop_map(SpaceExpr::LGamma),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let spec = prop_oneof![
            Just(SubsetSpec::TopCopyKeepMin),
            Just(SubsetSpec::TopCopyKeepMax),
            Just(SubsetSpec::IsolatedMajorOrMinorMax),
        ];
        prop_oneof![
            (inner.clone(), arb_predicate())
                .prop_map(|(a, p)| SpaceExpr::omit(a, p)),
            (inner.clone(), arb_ordinal(), arb_ordinal())
                .prop_map(|(a, lo, hi)| SpaceExpr::interval(a, lo, hi)),
            inner.clone().prop_map(SpaceExpr::rev),
            inner.clone().prop_map(SpaceExpr::reorder),
            inner.clone().prop_map(|a| SpaceExpr::Derived(Box::new(a))),
            (inner.clone(), spec).prop_map(|(a, s)| SpaceExpr::sub(a, s)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| SpaceExpr::product(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SpaceExpr::lex(a, b)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(SpaceExpr::OrderedSum),
            prop::collection::vec(inner, 1..3).prop_map(SpaceExpr::Union),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn printed_expressions_parse_back(e in arb_space()) {
        let text = e.to_string();
        let back = parse_space(&text)
            .unwrap_or_else(|err| panic!("{text}: {err}"));
        prop_assert_eq!(back, e);
    }

    #[test]
    fn comparison_is_a_total_order(
        a in arb_ordinal(),
        b in arb_ordinal(),
        c in arb_ordinal(),
    ) {
        prop_assert!(a <= b || b <= a);
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a.cmp(&b).reverse(), b.cmp(&a));
    }

    #[test]
    fn addition_and_multiplication_associate(
        a in arb_ordinal(),
        b in arb_ordinal(),
        c in arb_ordinal(),
    ) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn adding_one_makes_the_successor(a in arb_ordinal()) {
        let s = a.add(&Ordinal::one());
        prop_assert_eq!(s.classify(), Kind::Successor);
        prop_assert_eq!(s.pred().unwrap(), a);
    }

    #[test]
    fn left_subtraction_inverts_addition(a in arb_ordinal(), b in arb_ordinal()) {
        let total = a.add(&b);
        let d = a.left_sub(&total).unwrap();
        prop_assert_eq!(a.add(&d), total);
    }

    #[test]
    fn division_recomposes(a in arb_ordinal(), d in arb_ordinal()) {
        if d.is_zero() {
            prop_assert!(a.div_rem(&d).is_err());
        } else {
            let (q, r) = a.div_rem(&d).unwrap();
            prop_assert!(r < d);
            prop_assert_eq!(d.mul(&q).add(&r), a);
        }
    }

    #[test]
    fn fundamental_sequences_climb_strictly(a in arb_ordinal(), n in 0u64..6) {
        if a.is_limit() {
            let lo = a.fundamental(n).unwrap();
            let hi = a.fundamental(n + 1).unwrap();
            prop_assert!(lo < hi);
            prop_assert!(hi < a);
        }
    }
}

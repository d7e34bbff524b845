use proptest::prelude::*;

use k3gw::checks::relabel;
use k3gw::dsl::{ClassExpr, DslBracket, DslInsertion, Index};
use k3gw::engine::rules::hae_terms;
use k3gw::engine::{Basis, Bracket, CohClass, Engine, RemovalRoute, Term};
use k3gw::qmod::{commutator_wt_check, qmod_monomials, QMod};
use k3gw::rational::{frac, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn basis() -> impl Strategy<Value = Basis> {
    prop_oneof![
        Just(Basis::One),
        Just(Basis::Pt),
        Just(Basis::W),
        Just(Basis::F),
        (1u8..=10).prop_map(Basis::E),
        (1u8..=10).prop_map(Basis::Fd),
    ]
}

fn class_expr() -> impl Strategy<Value = ClassExpr> {
    (prop::collection::vec((basis(), small_rational()), 0..3), small_rational()).prop_filter_map(
        "zero class",
        |(terms, beta)| {
            let mut coh = CohClass::zero();
            for (b, c) in &terms {
                coh.add_term(*b, c);
            }
            let c = ClassExpr { coh, beta };
            (!c.is_zero()).then_some(c)
        },
    )
}

fn index() -> impl Strategy<Value = Index> {
    prop_oneof![(-2i64..12).prop_map(Index::Fixed), prop::sample::select(vec!["k", "l", "k1"]).prop_map(|s| Index::Var(s.into()))]
}

fn dsl_bracket() -> impl Strategy<Value = DslBracket> {
    prop::collection::vec((index(), class_expr()), 0..4)
        .prop_map(|v| DslBracket { ins: v.into_iter().map(|(index, class)| DslInsertion { index, class }).collect() })
}

/// Brackets of genus `0..=max_genus` whose labelled classes come in matched pairs.
fn bracket(max_genus: i64) -> impl Strategy<Value = Bracket> {
    let plain = prop_oneof![Just(Basis::One), Just(Basis::Pt), Just(Basis::W), Just(Basis::F)];
    let single = (0i64..=4, plain).prop_map(|(k, b)| vec![(k, b)]);
    let pair = (0i64..=3, 0i64..=3, 1u8..=3).prop_map(|(k, l, p)| vec![(k, Basis::E(p)), (l, Basis::Fd(p))]);
    prop::collection::vec(prop_oneof![3 => single, 1 => pair], 1..4)
        .prop_map(|groups| Bracket::new(groups.concat()))
        .prop_filter("genus out of range", move |b| (0..=max_genus).contains(&b.genus()))
}

fn homogeneous_qmod() -> impl Strategy<Value = QMod> {
    (1u32..=6).prop_flat_map(|half| {
        let monos = qmod_monomials(2 * half);
        let n = monos.len();
        prop::collection::vec(small_rational(), n).prop_map(move |cs| {
            let mut x = QMod::zero();
            for (m, c) in monos.iter().zip(&cs) {
                x.add_term(*m, c);
            }
            x
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dsl_display_reparses_to_same_bracket(b in dsl_bracket()) {
        let text = b.to_string();
        let again = DslBracket::parse(&text).unwrap();
        prop_assert_eq!(&again, &b, "{}", text);
        prop_assert_eq!(again.to_string(), text);
    }

    #[test]
    fn commutator_with_weight(x in homogeneous_qmod()) {
        prop_assert!(commutator_wt_check(&x).unwrap());
    }

    #[test]
    fn derivations_obey_leibniz(x in homogeneous_qmod(), y in homogeneous_qmod()) {
        let xy = &x * &y;
        prop_assert_eq!(xy.d_q(), &(&x.d_q() * &y) + &(&x * &y.d_q()));
        prop_assert_eq!(xy.d_dg2(), &(&x.d_dg2() * &y) + &(&x * &y.d_dg2()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn value_ignores_pair_labels(b in bracket(6), seed in any::<u64>()) {
        let mut perm: Vec<u8> = (1..=10).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let swap: Vec<bool> = (0..10).map(|i| (seed >> i) & 1 == 1).collect();
        let c = relabel(&b, &perm, &swap);
        let mut e = Engine::new();
        prop_assert_eq!(e.numerator(&b).unwrap(), e.numerator(&c).unwrap(), "{} vs {}", b, c);
    }

    #[test]
    fn anomaly_equation_holds(b in bracket(5)) {
        let mut e = Engine::new();
        let lhs = e.numerator(&b).unwrap().d_dg2();
        let terms: Vec<Term> = hae_terms(&b).into_iter().map(|(_, t)| t).collect();
        prop_assert_eq!(lhs, e.evaluate_terms(&terms).unwrap().numerator, "{}", b);
    }

    #[test]
    fn numerators_have_the_predicted_weight(b in bracket(6)) {
        let mut e = Engine::new();
        let n = e.numerator(&b).unwrap();
        prop_assert!(n.is_zero() || n.is_homogeneous(b.weight() as u32), "{}", b);
    }

    #[test]
    fn removal_routes_agree(b in bracket(4), k in 2i64..=5) {
        let b = Bracket::new(b.ins.into_iter().filter(|(_, c)| *c != Basis::One).chain([(k, Basis::One)]).collect());
        prop_assume!(b.genus() <= 7);
        let x = Engine::new().numerator(&b).unwrap();
        let y = Engine::new().with_route(RemovalRoute::General).numerator(&b).unwrap();
        prop_assert_eq!(x, y, "{}", b);
    }
}

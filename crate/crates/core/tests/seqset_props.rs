use ideal_lim::grammar::{parse_sequence, parse_set};
use ideal_lim::{BlockRule, Comparator, SequenceSpec, SetSpec};
use proptest::prelude::*;

fn leaf_set() -> impl Strategy<Value = SetSpec> {
    prop_oneof![
        prop::collection::btree_set(0u64..300, 0..8)
            .prop_map(|s| SetSpec::finite(s).unwrap()),
        (0u64..20, 1u64..9).prop_map(|(a, d)| SetSpec::arithmetic(a, d).unwrap()),
        Just(SetSpec::squares()),
        (0u64..10, 1u64..12, 1u64..12).prop_map(|(o, p, l)| {
            SetSpec::blocks(BlockRule::Periodic {
                offset: o,
                period: p,
                len: l.min(p),
            })
            .unwrap()
        }),
    ]
}

fn any_set() -> impl Strategy<Value = SetSpec> {
    leaf_set().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| s.complement()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.union(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.intersect(&b)),
        ]
    })
}

fn any_sequence() -> impl Strategy<Value = SequenceSpec> {
    let leaf = prop_oneof![
        (-5.0f64..5.0).prop_map(|c| SequenceSpec::constant(c).unwrap()),
        leaf_set().prop_map(|s| SequenceSpec::indicator(&s)),
        prop::collection::vec(-3.0f64..3.0, 1..5)
            .prop_map(|v| SequenceSpec::periodic(v).unwrap()),
        (-2.0f64..2.0).prop_map(|s| SequenceSpec::harmonic(s).unwrap()),
        Just(SequenceSpec::alternating_decay()),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SequenceSpec::sum(&a, &b)),
            (-2.0f64..2.0, inner.clone()).prop_map(|(c, x)| SequenceSpec::scale(c, &x).unwrap()),
            (leaf_set(), inner.clone(), inner).prop_map(|(s, a, b)| SequenceSpec::piecewise(&s, &a, &b)),
        ]
    })
}

fn comparator() -> impl Strategy<Value = Comparator> {
    prop_oneof![
        Just(Comparator::Ge),
        Just(Comparator::Le),
        Just(Comparator::Gt),
        Just(Comparator::Lt),
    ]
}

proptest! {
    #[test]
    fn de_morgan(a in any_set(), b in any_set(), n in 0u64..5000) {
        let lhs = a.union(&b).complement();
        let rhs = a.complement().intersect(&b.complement());
        prop_assert_eq!(lhs.member(n), rhs.member(n));
        let lhs = a.intersect(&b).complement();
        let rhs = a.complement().union(&b.complement());
        prop_assert_eq!(lhs.member(n), rhs.member(n));
    }

    #[test]
    fn complement_counts_partition_window(a in any_set(), m in 0u64..500, len in 0u64..500) {
        let n = m + len;
        prop_assert_eq!(a.count_window(m, n) + a.complement().count_window(m, n), n - m);
    }

    #[test]
    fn enumerate_agrees_with_member(a in any_set(), m in 0u64..400, len in 0u64..400) {
        let n = m + len;
        let brute: Vec<u64> = (m..n).filter(|&i| a.member(i)).collect();
        prop_assert_eq!(a.enumerate_window(m, n), brute);
    }

    #[test]
    fn level_set_matches_pointwise_comparison(
        x in any_sequence(),
        cmp in comparator(),
        t in -4.0f64..4.0,
        n in 0u64..10_000,
    ) {
        let v = x.eval(n);
        let expected = match cmp {
            Comparator::Ge => v >= t,
            Comparator::Le => v <= t,
            Comparator::Gt => v > t,
            Comparator::Lt => v < t,
        };
        prop_assert_eq!(SetSpec::level(&x, cmp, t).member(n), expected);
    }

    #[test]
    fn derived_bound_holds(x in any_sequence(), start in 0u64..99_000) {
        let b = x.bound();
        for n in start..start + 1000 {
            prop_assert!(x.eval(n).abs() <= b + 1e-12, "|x_{}| = {} > {}", n, x.eval(n).abs(), b);
        }
    }

    #[test]
    fn canonical_text_round_trips(x in any_sequence(), s in any_set()) {
        prop_assert_eq!(parse_sequence(&x.to_string()).unwrap(), x);
        prop_assert_eq!(parse_set(&s.to_string()).unwrap(), s);
    }
}

#[test]
fn declared_bound_spot_check() {
    let x = SequenceSpec::alternating_decay();
    let declared = x.clone().with_bound(2.0).unwrap();
    assert!((0..100_000u64).all(|n| declared.eval(n).abs() <= 2.0));
    assert!(x.with_bound(1.9).is_err());
}

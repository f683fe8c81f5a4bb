use ideal_lim::analysis::{
    cluster_set, extract_limit_point, ideal_liminf, ideal_limsup, is_ideal_convergent, Convergence,
};
use ideal_lim::{IdealModel, SequenceSpec};
use proptest::prelude::*;

const H: u64 = 10_000;
// A residue class mod 4 carries ≈ ln2/4 ≈ 0.17 harmonic tail mass, above 10·TOL.
const TOL: f64 = 0.01;
const EPS: f64 = 0.1;

/// Periodic values on the half-integer grid in [-2, 2].
fn half_grid_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-4i32..=4).prop_map(|i| f64::from(i) / 2.0), 1..5)
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_limsup_is_the_max(values in half_grid_values(), ideal_ix in 0usize..3) {
        let ideal = [IdealModel::fin(), IdealModel::density(), IdealModel::summable_harmonic()][ideal_ix].clone();
        let x = SequenceSpec::periodic(values.clone()).unwrap();
        let sup = ideal_limsup(&x, &ideal, H, TOL).unwrap();
        let inf = ideal_liminf(&x, &ideal, H, TOL).unwrap();
        let res = sup.resolution.max(1e-12);
        prop_assert!((sup.estimate.point().unwrap() - max_of(&values)).abs() <= res);
        prop_assert!((inf.estimate.point().unwrap() - min_of(&values)).abs() <= res);
    }

    #[test]
    fn limsup_is_translation_and_scale_covariant(
        values in half_grid_values(),
        c in -3.0f64..3.0,
        a in 0.1f64..4.0,
    ) {
        let z = IdealModel::density();
        let x = SequenceSpec::periodic(values).unwrap();
        let base = ideal_limsup(&x, &z, H, TOL).unwrap();
        let shifted_x = SequenceSpec::sum(&x, &SequenceSpec::constant(c).unwrap());
        let shifted = ideal_limsup(&shifted_x, &z, H, TOL).unwrap();
        let scaled = ideal_limsup(&SequenceSpec::scale(a, &x).unwrap(), &z, H, TOL).unwrap();
        let b = base.estimate.point().unwrap();
        prop_assert!(
            (shifted.estimate.point().unwrap() - (b + c)).abs() <= base.resolution + shifted.resolution
        );
        prop_assert!(
            (scaled.estimate.point().unwrap() - a * b).abs() <= a * base.resolution + scaled.resolution
        );
    }

    #[test]
    fn fin_cluster_set_matches_brute_force(values in half_grid_values()) {
        // Every value of a periodic sequence recurs forever, and nothing else
        // is approached.
        let oracle = distinct(&values);
        let x = SequenceSpec::periodic(values).unwrap();
        let r = cluster_set(&x, &IdealModel::fin(), H, EPS, TOL).unwrap();
        prop_assert_eq!(r.candidates.len(), oracle.len());
        for (c, v) in r.candidates.iter().zip(&oracle) {
            prop_assert!((c - v).abs() <= EPS, "candidate {} vs value {}", c, v);
        }
        prop_assert!(r.undecided.is_empty());
        let conv = is_ideal_convergent(&x, &IdealModel::fin(), H, EPS, TOL).unwrap();
        prop_assert_eq!(matches!(conv.convergence, Convergence::Yes { .. }), oracle.len() == 1);
    }

    #[test]
    fn limit_points_lie_in_the_cluster_set(values in half_grid_values(), eta in -2.0f64..2.0) {
        let oracle = distinct(&values);
        let x = SequenceSpec::periodic(values).unwrap();
        let fin = IdealModel::fin();
        let gap = oracle.iter().map(|v| (v - eta).abs()).fold(f64::INFINITY, f64::min);
        let r = extract_limit_point(&x, &fin, eta, H, 8).unwrap();
        prop_assert!(r.certified());
        if gap == 0.0 {
            prop_assert_eq!(r.completed_stages, 8);
        } else if gap >= 0.25 {
            // A_k is empty once 2^-k <= 1/4.
            prop_assert!(r.stall.is_some_and(|k| k <= 2), "stall {:?}", r.stall);
        }
        if r.completed_stages == 8 {
            let clusters = cluster_set(&x, &fin, H, EPS, TOL).unwrap();
            prop_assert!(clusters.candidates.iter().any(|c| (c - eta).abs() <= EPS + 1e-9));
        }
    }
}

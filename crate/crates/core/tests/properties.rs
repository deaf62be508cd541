use batchrisk_core::combinatorics::{binom, subsets_colex};
use batchrisk_core::complexity::{k_rademacher_exact, massart_bound, xi_ratio, LossTable};
use batchrisk_core::risk::{
    empirical_k_risk_closed, empirical_k_risk_exact, empirical_k_risk_mc,
    expected_k_risk_exact, full_batch_risk, interpolation_coefficient, limit_k_risk, one_risk,
};
use batchrisk_core::sum::NeumaierSum;
use batchrisk_core::{DiscreteDistribution, EvalSet, LabeledPrediction, LossKind};
use proptest::prelude::*;

fn unit_items(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..=max)
}

fn sign_items(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    let sign = prop_oneof![Just(-1.0f64), Just(1.0f64)];
    prop::collection::vec((sign.clone(), sign), 1..=max)
}

fn prob_items(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    let label = prop_oneof![Just(0.0f64), Just(1.0f64)];
    prop::collection::vec((0.01f64..=0.99, label), 1..=max)
}

fn eval_set(items: &[(f64, f64)]) -> EvalSet {
    EvalSet::new(items.iter().map(|&(p, y)| LabeledPrediction::new(p, y)).collect()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_matches_enumeration(mse in unit_items(9), zo in sign_items(9), gce in prob_items(9)) {
        for (items, kind) in [(mse, LossKind::Mse), (zo, LossKind::ZeroOne), (gce, LossKind::GeomCrossEntropy)] {
            let s = eval_set(&items);
            for k in 1..=s.n() {
                let a = empirical_k_risk_exact(&s, k, kind).unwrap().value;
                let b = empirical_k_risk_closed(&s, k, kind).unwrap().value;
                prop_assert!(close(a, b), "{kind:?} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn endpoints_are_one_risk_and_full_batch(items in prob_items(8)) {
        let s = eval_set(&items);
        for kind in [LossKind::Mse, LossKind::Kl, LossKind::Bce, LossKind::GeomCrossEntropy] {
            let r1 = empirical_k_risk_exact(&s, 1, kind).unwrap().value;
            let rn = empirical_k_risk_exact(&s, s.n(), kind).unwrap().value;
            prop_assert!(close(r1, one_risk(&s, kind).unwrap()));
            prop_assert!(close(rn, full_batch_risk(&s, kind).unwrap()));
        }
    }

    #[test]
    fn empirical_risk_non_increasing_for_doubly_convex(items in prob_items(9)) {
        let s = eval_set(&items);
        for kind in [LossKind::Mse, LossKind::Kl] {
            let curve: Vec<f64> = (1..=s.n())
                .map(|k| empirical_k_risk_exact(&s, k, kind).unwrap().value)
                .collect();
            for w in curve.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12, "{kind:?}: {curve:?}");
            }
        }
    }

    #[test]
    fn risk_is_permutation_invariant(items in unit_items(8), rot in 0usize..8) {
        let s = eval_set(&items);
        let mut shuffled = items.clone();
        shuffled.rotate_left(rot % items.len());
        shuffled.reverse();
        let t = eval_set(&shuffled);
        for k in 1..=s.n() {
            let a = empirical_k_risk_exact(&s, k, LossKind::Mse).unwrap().value;
            let b = empirical_k_risk_exact(&t, k, LossKind::Mse).unwrap().value;
            prop_assert!(close(a, b));
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_bounded(items in unit_items(10), seed in any::<u64>()) {
        let s = eval_set(&items);
        let k = (s.n() + 1) / 2;
        let a = empirical_k_risk_mc(&s, k, LossKind::Mse, 200, seed).unwrap();
        let b = empirical_k_risk_mc(&s, k, LossKind::Mse, 200, seed).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert!((0.0..=1.0).contains(&a.value));
        prop_assert!(a.std_error.unwrap() >= 0.0);
    }

    #[test]
    fn expected_risk_non_increasing_and_above_limit(
        atoms in prop::collection::vec(((0.01f64..=0.99, prop_oneof![Just(0.0f64), Just(1.0f64)]), 0.1f64..1.0), 1..=4)
    ) {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mut weights: Vec<f64> = atoms.iter().map(|a| a.1 / total).collect();
        let head: f64 = weights[..weights.len() - 1].iter().sum();
        *weights.last_mut().unwrap() = 1.0 - head;
        let dist = DiscreteDistribution::new(
            atoms.iter().zip(&weights).map(|(a, &w)| (LabeledPrediction::new(a.0 .0, a.0 .1), w)).collect(),
        ).unwrap();
        for kind in [LossKind::Mse, LossKind::Kl] {
            let curve: Vec<f64> = (1..=4)
                .map(|k| expected_k_risk_exact(&dist, k, kind).unwrap().value)
                .collect();
            let limit = limit_k_risk(&dist, kind).unwrap();
            for w in curve.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            prop_assert!(curve[3] >= limit - 1e-12);
        }
    }

    #[test]
    fn rademacher_ignores_duplicate_rows_and_obeys_massart(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..=1.0, 6), 1..=5)
    ) {
        // C(4, 2) = 6 columns
        let t = LossTable::from_rows(&rows, 4, 2).unwrap();
        let mut doubled = rows.clone();
        doubled.extend(rows.iter().cloned());
        let d = LossTable::from_rows(&doubled, 4, 2).unwrap();
        let a = k_rademacher_exact(&t).unwrap();
        prop_assert!(close(a, k_rademacher_exact(&d).unwrap()));
        prop_assert!(a <= massart_bound(rows.len() as u64, 4, 2).unwrap() + 1e-12);
        prop_assert!(a >= -1e-12);
    }

    #[test]
    fn interpolation_coefficient_runs_from_zero_to_one(n in 2usize..200) {
        prop_assert_eq!(interpolation_coefficient(1, n).unwrap(), 0.0);
        prop_assert!(close(interpolation_coefficient(n, n).unwrap(), 1.0));
        let mut prev = 0.0;
        for k in 1..=n.min(40) {
            let a = interpolation_coefficient(k, n).unwrap();
            prop_assert!((0.0..=1.0).contains(&a) && a >= prev);
            prev = a;
        }
    }

    #[test]
    fn xi_ratio_stays_below_its_upper_bound(n in 1usize..=60, frac in 0.0f64..1.0) {
        let k = 1 + ((n - 1) as f64 * frac) as usize;
        let r = xi_ratio(n, k).unwrap();
        prop_assert!(r.ratio <= r.upper * (1.0 + 1e-12));
    }

    #[test]
    fn binomials_are_symmetric_and_count_subsets(n in 0u64..=14, k in 0u64..=14) {
        prop_assume!(k <= n);
        prop_assert_eq!(binom(n, k).unwrap(), binom(n, n - k).unwrap());
        prop_assert_eq!(subsets_colex(n as usize, k as usize).len() as u128, binom(n, k).unwrap());
    }

    #[test]
    fn compensated_sum_survives_cancellation(x in 1e10f64..1e15, small in prop::collection::vec(0.0f64..1.0, 1..50)) {
        let mut s = NeumaierSum::default();
        s.add(x);
        for v in &small {
            s.add(*v);
        }
        s.add(-x);
        let naive: f64 = small.iter().sum();
        prop_assert!((s.total() - naive).abs() <= 1e-9 * (1.0 + naive));
    }
}

#[test]
fn colex_order_is_by_largest_element_first() {
    let s = subsets_colex(4, 2);
    assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
}

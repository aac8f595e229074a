use proptest::prelude::*;
use weatherwise::bwm::WeightVector;
use weatherwise::hierarchy::{aggregate_weights, compute_global_weights, rank, AggregationMethod, LabeledWeights};

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|raw| {
        let s: f64 = raw.iter().sum();
        raw.iter().map(|v| v / s).collect()
    })
}

fn labeled(prefix: &str, weights: Vec<f64>) -> LabeledWeights {
    let codes: Vec<String> = (0..weights.len()).map(|i| format!("{prefix}{}", i + 1)).collect();
    LabeledWeights {
        labels: codes.clone(),
        codes,
        weights: WeightVector::new(weights, 0.0).unwrap(),
    }
}

fn hierarchy() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (2usize..6).prop_flat_map(|dims| {
        (
            simplex(dims),
            prop::collection::vec((2usize..6).prop_flat_map(simplex), dims),
        )
    })
}

/// Sorts by weight and reads off positions, with ties in input order.
fn sort_ranks(weights: &[f64]) -> Vec<usize> {
    let mut ranks = vec![0; weights.len()];
    for (i, w) in weights.iter().enumerate() {
        ranks[i] = 1 + weights
            .iter()
            .enumerate()
            .filter(|(k, v)| **v > *w || (**v == *w && *k < i))
            .count();
    }
    ranks
}

#[test]
fn paper_product_rule() {
    let global: f64 = 0.339 * 0.346;
    assert_eq!(format!("{global:.3}"), "0.117");
    let printed = [
        0.117, 0.099, 0.070, 0.059, 0.072, 0.075, 0.034, 0.095, 0.068, 0.092, 0.071, 0.101, 0.041,
    ];
    let r = rank(&printed);
    assert_eq!(r[0], 1);
    assert_eq!((r[11], r[1]), (2, 3));
}

#[test]
fn rank_examples() {
    assert_eq!(rank(&[0.25, 0.25, 0.25, 0.25]), vec![1, 2, 3, 4]);
    assert_eq!(rank(&[0.1, 0.7, 0.2]), vec![3, 1, 2]);
}

#[test]
fn arithmetic_mean_of_identical_vectors_is_exact() {
    let w = WeightVector::new(vec![0.1, 0.2, 0.3, 0.4], 0.0).unwrap();
    let agg = aggregate_weights(&vec![w.clone(); 7], AggregationMethod::ArithmeticMean).unwrap();
    assert_eq!(agg.weights, w.weights);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dimension_globals_sum_to_dimension_weight((dims, locals) in hierarchy()) {
        let locals: Vec<LabeledWeights> = locals
            .into_iter()
            .enumerate()
            .map(|(d, w)| labeled(&format!("D{d}."), w))
            .collect();
        let h = compute_global_weights(&labeled("D", dims.clone()), &locals).unwrap();
        let mut total = 0.0;
        for (node, dw) in h.dimensions.iter().zip(&dims) {
            let s: f64 = node.children.iter().map(|c| c.global_weight).sum();
            prop_assert!((s - dw).abs() < 1e-9);
            for c in &node.children {
                prop_assert_eq!(c.global_weight, dw * c.local_weight);
            }
            total += s;
        }
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!((h.global_weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rank_matches_sort_and_ignores_scale(w in prop::collection::vec(0.0f64..1.0, 1..15), c in 1e-3f64..1e3) {
        let scaled: Vec<f64> = w.iter().map(|v| v * c).collect();
        prop_assert_eq!(rank(&w), sort_ranks(&w));
        prop_assert_eq!(rank(&scaled), sort_ranks(&scaled));
        let snapped: Vec<f64> = w.iter().map(|v| (v * 8.0).round() / 8.0).collect();
        let snapped_scaled: Vec<f64> = snapped.iter().map(|v| v * 4.0).collect();
        prop_assert_eq!(rank(&snapped), rank(&snapped_scaled));
    }

    #[test]
    fn pooling_ignores_decision_maker_order(
        vectors in (2usize..6).prop_flat_map(|n| prop::collection::vec(simplex(n), 1..8)),
        geometric in any::<bool>(),
        rotate in 0usize..8,
    ) {
        let method = if geometric { AggregationMethod::GeometricMean } else { AggregationMethod::ArithmeticMean };
        let wv: Vec<WeightVector> = vectors.iter().map(|v| WeightVector::new(v.clone(), 0.0).unwrap()).collect();
        let mut moved = wv.clone();
        moved.rotate_left(rotate % wv.len());
        moved.reverse();
        let a = aggregate_weights(&wv, method).unwrap();
        let b = aggregate_weights(&moved, method).unwrap();
        prop_assert!((a.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (x, y) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

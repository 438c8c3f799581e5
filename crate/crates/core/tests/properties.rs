//! Randomized invariants of the relaxations.

use proptest::prelude::*;
use sst::relax::{
    constraint_violation, euclidean_project, expfam_marginals, matrix_tree_marginals, relax, softmax_simplex,
    Regularizer, RelaxationSpec,
};
use sst::verify::suites::representative_pairs;
use sst::{Graph, StructureSpec};

fn utilities(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relaxed_points_lie_in_the_hull(
        pair in 0..representative_pairs().len(),
        seed in prop::collection::vec(-3.0..3.0f64, 16),
        t in 0.05..2.0f64,
    ) {
        let (spec, reg) = representative_pairs().swap_remove(pair);
        let u = &seed[..spec.embedding_dim()];
        let x = relax(&spec, &RelaxationSpec::new(reg, t), u).unwrap().x;
        prop_assert!(constraint_violation(&spec, &x) <= 1e-8, "{spec:?} {reg:?} {x:?}");
    }

    #[test]
    fn softmax_ignores_constant_shifts(u in utilities(5), c in -50.0..50.0f64, t in 0.1..3.0f64) {
        let shifted: Vec<f64> = u.iter().map(|v| v + c).collect();
        let (a, b) = (softmax_simplex(&u, t).x, softmax_simplex(&shifted, t).x);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn structured_marginals_ignore_constant_shifts(u in utilities(6), c in -5.0..5.0f64, t in 0.2..2.0f64) {
        let shifted: Vec<f64> = u.iter().map(|v| v + c).collect();
        for spec in [StructureSpec::KSubsets { n: 6, k: 3 }, StructureSpec::SpanningTree { graph: Graph::complete(4) }] {
            let a = expfam_marginals(&spec, &u, t).unwrap().x;
            let b = expfam_marginals(&spec, &shifted, t).unwrap().x;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn tree_marginals_sum_to_edges_in_a_tree(n in 2usize..7, raw in utilities(21), t in 0.1..2.0f64) {
        let graph = Graph::complete(n);
        let x = matrix_tree_marginals(&graph, &raw[..graph.num_edges()], t).unwrap().x;
        let mass: f64 = x.iter().sum();
        prop_assert!((mass - (n - 1) as f64).abs() <= 1e-9);
        prop_assert!(x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn simplex_projection_is_a_projection(u in utilities(6), t in 0.2..2.0f64) {
        let spec = StructureSpec::OneHot { n: 6 };
        let x = euclidean_project(&spec, &u, t, 1e-12, 200).unwrap().x;
        prop_assert!(constraint_violation(&spec, &x) <= 1e-12);
        // <z - x, e_i - x> <= 0 for every vertex e_i
        let z: Vec<f64> = u.iter().map(|v| v / t).collect();
        let base: f64 = z.iter().zip(&x).map(|(a, b)| (a - b) * -b).sum();
        for i in 0..6 {
            prop_assert!(base + (z[i] - x[i]) <= 1e-10);
        }
        // projecting a feasible point returns it
        let again = euclidean_project(&spec, &x, 1.0, 1e-12, 200).unwrap().x;
        for (a, b) in again.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn temperature_scaling_matches_rescaled_utilities(u in utilities(5), t in 0.1..3.0f64) {
        let spec = StructureSpec::KSubsets { n: 5, k: 2 };
        for reg in [Regularizer::BinaryEntropy, Regularizer::CategoricalEntropy, Regularizer::Euclidean] {
            let a = relax(&spec, &RelaxationSpec::new(reg, t), &u).unwrap().x;
            let scaled: Vec<f64> = u.iter().map(|v| v / t).collect();
            let b = relax(&spec, &RelaxationSpec::new(reg, 1.0), &scaled).unwrap().x;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-8);
            }
        }
    }
}

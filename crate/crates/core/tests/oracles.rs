//! Frozen input/output cases checked against closed forms or enumeration.

use approx::assert_abs_diff_eq;
use sst::argmax::{
    cle_max_arborescence, hungarian_match, kruskal_max_tree, sample_arborescence_categorical,
    sample_topk_without_replacement, sample_tree_categorical, solve_map, topk_select,
};
use sst::grad::{analytic_jacobian, fd_vjp, gradcheck, DirectionVector, FdConfig};
use sst::relax::{
    binary_entropy_relax, categorical_entropy_relax, directed_matrix_tree_marginals, euclidean_project,
    expfam_marginals, matrix_tree_marginals, relax, sinkhorn_relax, softmax_simplex, Regularizer,
    RelaxationSpec,
};
use sst::rng;
use sst::structures::DEFAULT_ENUM_LIMIT;
use sst::verify::{
    chi_square_gof, gibbs_covariance_bruteforce, gibbs_marginals_bruteforce, mc_frequencies,
    two_sample_equivalence, FrequencyTable,
};
use sst::{Error, Graph, StructureSpec, UtilitySpec, Vertex};

const TOL: f64 = 1e-10;
const ITERS: usize = 200;

fn v(bits: &[u8]) -> Vertex {
    Vertex::new(bits.to_vec())
}

fn close(a: &[f64], b: &[f64], eps: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert_abs_diff_eq!(*x, *y, epsilon = eps);
    }
}

fn oracle_argmax(spec: &StructureSpec, u: &[f64]) -> f64 {
    spec.enumerate_vertices(DEFAULT_ENUM_LIMIT)
        .unwrap()
        .iter()
        .map(|x| x.dot(u))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every count lies within three binomial standard errors of `p * total`.
fn within_three_se(table: &FrequencyTable, cells: &[Vertex], probs: &[f64]) {
    let n = table.total as f64;
    for (c, &p) in cells.iter().zip(probs) {
        let se = (p * (1.0 - p) / n).sqrt();
        let f = table.frequency(c);
        assert!((f - p).abs() <= 3.0 * se, "{c}: {f} vs {p}");
    }
}

mod structures {
    use super::*;

    #[test]
    fn embedding_dimensions() {
        assert_eq!(StructureSpec::OneHot { n: 5 }.embedding_dim(), 5);
        assert_eq!(StructureSpec::CorrKSubsets { n: 4, k: 2 }.embedding_dim(), 7);
        assert_eq!(StructureSpec::SpanningTree { graph: Graph::complete(4) }.embedding_dim(), 6);
    }

    #[test]
    fn membership() {
        let k3 = StructureSpec::SpanningTree { graph: Graph::complete(3) };
        assert!(k3.is_vertex(&[1, 1, 0]).unwrap());
        assert!(!StructureSpec::KSubsets { n: 3, k: 2 }.is_vertex(&[1, 1, 1]).unwrap());
        let arc = StructureSpec::Arborescence { graph: Graph::directed(2, vec![(0, 1)]).unwrap(), root: 0 };
        assert!(arc.is_vertex(&[1]).unwrap());
    }

    #[test]
    fn enumeration() {
        let one_hot = StructureSpec::OneHot { n: 3 }.enumerate_vertices(100).unwrap();
        let mut sorted = one_hot.clone();
        sorted.sort();
        assert_eq!(sorted, vec![v(&[0, 0, 1]), v(&[0, 1, 0]), v(&[1, 0, 0])]);
        let k4 = StructureSpec::SpanningTree { graph: Graph::complete(4) };
        assert_eq!(k4.enumerate_vertices(100).unwrap().len(), 16);
        assert_eq!(StructureSpec::KSubsets { n: 4, k: 2 }.enumerate_vertices(100).unwrap().len(), 6);
    }
}

mod utilities {
    use super::*;

    #[test]
    fn reparameterized_samples() {
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(UtilitySpec::gumbel(vec![2.0]).unwrap().sample(&[e]).unwrap().u[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(UtilitySpec::logistic(vec![0.7]).unwrap().sample(&[0.5]).unwrap().u[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(
            UtilitySpec::neg_exponential(vec![2.0]).unwrap().sample(&[e]).unwrap().u[0],
            -0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn log_densities() {
        let g = UtilitySpec::gumbel(vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g.log_density(&[0.0, 0.0]).unwrap(), -2.0, epsilon = 1e-15);
        let n = UtilitySpec::gaussian(vec![0.0]).unwrap();
        assert_abs_diff_eq!(
            n.log_density(&[0.0]).unwrap(),
            -0.5 * (2.0 * std::f64::consts::PI).ln(),
            epsilon = 1e-15
        );
        let e = UtilitySpec::neg_exponential(vec![1.0]).unwrap();
        assert!(e.log_density(&[0.1]).is_err());
    }

    #[test]
    fn gumbel_kl() {
        assert_eq!(UtilitySpec::gumbel(vec![0.0, 0.0]).unwrap().kl_to_standard().unwrap(), 0.0);
        assert_abs_diff_eq!(
            UtilitySpec::gumbel(vec![1.0]).unwrap().kl_to_standard().unwrap(),
            0.36787944117144233,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            UtilitySpec::gumbel(vec![-1.0]).unwrap().kl_to_standard().unwrap(),
            std::f64::consts::E - 2.0,
            epsilon = 1e-12
        );
    }
}

mod argmax {
    use super::*;

    #[test]
    fn map_solutions() {
        let s = solve_map(&StructureSpec::OneHot { n: 3 }, &[0.1, 2.0, -1.0]).unwrap();
        assert_eq!(s.vertex, v(&[0, 1, 0]));
        let s = solve_map(&StructureSpec::Subsets { n: 3 }, &[1.0, -1.0, 0.5]).unwrap();
        assert_eq!(s.vertex, v(&[1, 0, 1]));
        let s = solve_map(&StructureSpec::SpanningTree { graph: Graph::complete(3) }, &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.vertex, v(&[1, 1, 0]));
        assert_eq!(s.objective, 5.0);
    }

    #[test]
    fn top_k() {
        assert_eq!(topk_select(&[5.0, 1.0, 4.0, 2.0], 2).unwrap(), v(&[1, 0, 1, 0]));
        assert!(matches!(topk_select(&[1.0, 1.0, 1.0], 3), Err(Error::InvalidArgument(_))));
        assert_eq!(topk_select(&[0.3, 0.3, 0.1], 1).unwrap(), v(&[1, 0, 0]));
    }

    #[test]
    fn kruskal() {
        assert_eq!(kruskal_max_tree(&Graph::complete(3), &[3.0, 2.0, 1.0]).unwrap(), v(&[1, 1, 0]));
        assert_eq!(kruskal_max_tree(&Graph::path(5), &[-3.0, 0.5, 2.0, -1.0]).unwrap(), v(&[1, 1, 1, 1]));
        let k4 = Graph::complete(4);
        let u = [0.3, -1.2, 2.5, 0.7, -0.1, 1.9];
        let spec = StructureSpec::SpanningTree { graph: k4.clone() };
        assert_eq!(kruskal_max_tree(&k4, &u).unwrap().dot(&u), oracle_argmax(&spec, &u));
    }

    #[test]
    fn arborescences() {
        let g = Graph::directed(2, vec![(0, 1)]).unwrap();
        assert_eq!(cle_max_arborescence(&g, 0, &[0.4]).unwrap(), v(&[1]));

        // 1 -> 2 and 2 -> 1 are each node's best entering edge
        let g = Graph::complete_directed(3);
        let u: Vec<f64> = g
            .edges()
            .iter()
            .map(|&(a, b)| match (a, b) {
                (1, 2) | (2, 1) => 5.0,
                (0, 1) => 1.0,
                _ => 0.0,
            })
            .collect();
        let spec = StructureSpec::Arborescence { graph: g.clone(), root: 0 };
        let x = cle_max_arborescence(&g, 0, &u).unwrap();
        assert!(spec.is_vertex(&x.to_f64().iter().map(|&b| b as u8).collect::<Vec<_>>()).unwrap());
        assert_eq!(x.dot(&u), oracle_argmax(&spec, &u));
        assert_eq!(x.dot(&u), 6.0);

        let mut r = rng::stream(3, 0);
        let g = sst::verify::suites::random_graph(&mut r, 4, true);
        let u: Vec<f64> = (0..g.num_edges()).map(|_| rng::open_unit(&mut r) * 4.0 - 2.0).collect();
        let spec = StructureSpec::Arborescence { graph: g.clone(), root: 0 };
        assert_abs_diff_eq!(
            cle_max_arborescence(&g, 0, &u).unwrap().dot(&u),
            oracle_argmax(&spec, &u),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hungarian() {
        assert_eq!(hungarian_match(&[0.7]).unwrap(), v(&[1]));
        let mut u = vec![0.0; 9];
        for (i, x) in u.iter_mut().enumerate() {
            *x = if i % 4 == 0 { 10.0 } else { (i as f64).sin() };
        }
        assert_eq!(hungarian_match(&u).unwrap(), v(&[1, 0, 0, 0, 1, 0, 0, 0, 1]));
        let mut r = rng::stream(4, 0);
        let u: Vec<f64> = (0..16).map(|_| rng::open_unit(&mut r)).collect();
        let spec = StructureSpec::Matching { n: 4 };
        assert_abs_diff_eq!(hungarian_match(&u).unwrap().dot(&u), oracle_argmax(&spec, &u), epsilon = 1e-12);
    }
}

mod samplers {
    use super::*;

    const DRAWS: usize = 100_000;

    #[test]
    fn arborescence_process() {
        let g = Graph::directed(2, vec![(0, 1)]).unwrap();
        let t = mc_frequencies(|r| sample_arborescence_categorical(&g, 0, &[2.0], r), 1000, 1).unwrap();
        assert_eq!(t.support, vec![v(&[1])]);

        let g = Graph::complete_directed(3);
        let spec = StructureSpec::Arborescence { graph: g.clone(), root: 0 };
        let cells = spec.enumerate_vertices(100).unwrap();
        assert_eq!(cells.len(), 3);
        // With equal rates {0->1, 0->2} wins iff e(0,2) < e(1,2) and
        // e(0,1) < e(2,1), so its probability is 1/4 and the two paths share
        // the remaining 3/4.
        let rates = vec![1.0; g.num_edges()];
        let t = mc_frequencies(|r| sample_arborescence_categorical(&g, 0, &rates, r), DRAWS, 2).unwrap();
        let law: Vec<f64> = cells
            .iter()
            .map(|c| if c.ones().all(|e| g.edges()[e].0 == 0) { 0.25 } else { 0.375 })
            .collect();
        assert!(chi_square_gof(&t, &cells, &law, 0.01).unwrap().pass);
        let uniform = chi_square_gof(&t, &cells, &[1.0 / 3.0; 3], 0.01).unwrap();
        assert!(!uniform.pass);

        let rates: Vec<f64> = [0.3, -0.8, 1.1, 0.0, -0.4, 0.9].iter().map(|x: &f64| x.exp()).collect();
        let noise = UtilitySpec::neg_exponential(rates.clone()).unwrap();
        let a = mc_frequencies(sst::verify::argmax_sampler(&spec, &noise).unwrap(), DRAWS, 3).unwrap();
        let b = mc_frequencies(|r| sample_arborescence_categorical(&g, 0, &rates, r), DRAWS, 4).unwrap();
        assert!(two_sample_equivalence(&a, &b, 0.01).unwrap().pass);
    }

    #[test]
    fn tree_process() {
        let k3 = Graph::complete(3);
        let t = mc_frequencies(|r| sample_tree_categorical(&k3, &[0.0; 3], r), DRAWS, 5).unwrap();
        let cells = StructureSpec::SpanningTree { graph: k3 }.enumerate_vertices(100).unwrap();
        within_three_se(&t, &cells, &[1.0 / 3.0; 3]);

        let path = Graph::path(4);
        let t = mc_frequencies(|r| sample_tree_categorical(&path, &[0.2, -1.0, 3.0], r), 1000, 6).unwrap();
        assert_eq!(t.support, vec![v(&[1, 1, 1])]);

        let k4 = Graph::complete(4);
        let theta = [0.4, -0.3, 0.9, 0.0, -0.7, 0.2];
        let spec = StructureSpec::SpanningTree { graph: k4.clone() };
        let noise = UtilitySpec::gumbel(theta.to_vec()).unwrap();
        let a = mc_frequencies(sst::verify::argmax_sampler(&spec, &noise).unwrap(), DRAWS, 7).unwrap();
        let b = mc_frequencies(|r| sample_tree_categorical(&k4, &theta, r), DRAWS, 8).unwrap();
        assert!(two_sample_equivalence(&a, &b, 0.01).unwrap().pass);
    }

    #[test]
    fn without_replacement() {
        let theta = [0.0, 2f64.ln(), 3f64.ln()];
        let t = mc_frequencies(|r| sample_topk_without_replacement(&theta, 1, r), DRAWS, 9).unwrap();
        within_three_se(&t, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])], &[1.0 / 6.0, 1.0 / 3.0, 0.5]);

        let t = mc_frequencies(|r| sample_topk_without_replacement(&[0.0; 3], 2, r), DRAWS, 10).unwrap();
        within_three_se(&t, &[v(&[1, 1, 0]), v(&[1, 0, 1]), v(&[0, 1, 1])], &[1.0 / 3.0; 3]);

        let theta = [0.8, -0.2, 0.1, -0.9];
        let spec = StructureSpec::KSubsets { n: 4, k: 2 };
        let noise = UtilitySpec::gumbel(theta.to_vec()).unwrap();
        let a = mc_frequencies(sst::verify::argmax_sampler(&spec, &noise).unwrap(), DRAWS, 11).unwrap();
        let b = mc_frequencies(|r| sample_topk_without_replacement(&theta, 2, r), DRAWS, 12).unwrap();
        assert!(two_sample_equivalence(&a, &b, 0.01).unwrap().pass);
    }
}

mod relaxations {
    use super::*;

    #[test]
    fn dispatch() {
        let p = relax(&StructureSpec::OneHot { n: 2 }, &RelaxationSpec::new(Regularizer::Shannon, 1.0), &[0.0, 0.0]);
        close(&p.unwrap().x, &[0.5, 0.5], 1e-15);
        let spec = StructureSpec::KSubsets { n: 4, k: 2 };
        let p = relax(&spec, &RelaxationSpec::new(Regularizer::BinaryEntropy, 1.0), &[0.3; 4]).unwrap();
        close(&p.x, &[0.5; 4], 1e-9);
        let k3 = StructureSpec::SpanningTree { graph: Graph::complete(3) };
        let p = relax(&k3, &RelaxationSpec::new(Regularizer::ExpFamilyEntropy, 1.0), &[0.0; 3]).unwrap();
        close(&p.x, &[2.0 / 3.0; 3], 1e-12);
    }

    #[test]
    fn softmax() {
        close(&softmax_simplex(&[0.0, 2f64.ln(), 3f64.ln()], 1.0).x, &[1.0 / 6.0, 1.0 / 3.0, 0.5], 1e-15);
        let x = softmax_simplex(&[1.0, 0.0], 0.01).x;
        assert!(x[1] > 0.0 && x[1] < 1e-43);
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-15);
        close(&softmax_simplex(&[7.5; 4], 0.3).x, &[0.25; 4], 1e-15);
    }

    #[test]
    fn euclidean() {
        let one_hot = StructureSpec::OneHot { n: 2 };
        close(&euclidean_project(&one_hot, &[2.0, 0.0], 1.0, TOL, ITERS).unwrap().x, &[1.0, 0.0], 1e-15);
        close(&euclidean_project(&one_hot, &[0.6, 0.4], 1.0, TOL, ITERS).unwrap().x, &[0.6, 0.4], 1e-15);
        let capped = StructureSpec::KSubsets { n: 4, k: 2 };
        close(&euclidean_project(&capped, &[1.3; 4], 1.0, TOL, ITERS).unwrap().x, &[0.5; 4], 1e-9);
    }

    #[test]
    fn binary_entropy() {
        let t = 0.7;
        let box3 = StructureSpec::Subsets { n: 2 };
        let x = binary_entropy_relax(&box3, &[0.0, t * 3f64.ln()], t, TOL, ITERS).unwrap().x;
        close(&x, &[0.5, 0.75], 1e-15);
        let capped = StructureSpec::KSubsets { n: 3, k: 2 };
        close(&binary_entropy_relax(&capped, &[0.4; 3], 1.0, TOL, ITERS).unwrap().x, &[2.0 / 3.0; 3], 1e-9);
    }

    #[test]
    fn categorical_entropy() {
        let t = 0.4;
        let box2 = StructureSpec::Subsets { n: 2 };
        let x = categorical_entropy_relax(&box2, &[-t * 2f64.ln(), 5.0 * t], t, TOL, ITERS).unwrap().x;
        close(&x, &[0.5, 1.0], 1e-15);
        let capped = StructureSpec::KSubsets { n: 4, k: 2 };
        close(&categorical_entropy_relax(&capped, &[-0.2; 4], 1.0, TOL, ITERS).unwrap().x, &[0.5; 4], 1e-9);
    }

    #[test]
    fn exponential_family_chains() {
        let u = [0.3, -1.1, 0.8];
        let x = expfam_marginals(&StructureSpec::KSubsets { n: 3, k: 1 }, &u, 0.9).unwrap().x;
        close(&x, &softmax_simplex(&u, 0.9).x, 1e-14);

        let spec = StructureSpec::KSubsets { n: 4, k: 2 };
        let u = [1.0, 0.0, 0.0, 0.0];
        // weights: 3 subsets with item 0 at e, 3 without at 1
        let e = std::f64::consts::E;
        let z = 3.0 * e + 3.0;
        let rest = (e + 2.0) / z;
        close(&expfam_marginals(&spec, &u, 1.0).unwrap().x, &[3.0 * e / z, rest, rest, rest], 1e-14);

        let spec = StructureSpec::CorrKSubsets { n: 3, k: 2 };
        let u = [0.4, -0.9, 1.3, 0.25, -0.6];
        close(
            &expfam_marginals(&spec, &u, 1.0).unwrap().x,
            &gibbs_marginals_bruteforce(&spec, &u, 1.0, 100).unwrap(),
            1e-14,
        );
    }

    #[test]
    fn undirected_matrix_tree() {
        close(&matrix_tree_marginals(&Graph::complete(3), &[0.0; 3], 1.0).unwrap().x, &[2.0 / 3.0; 3], 1e-15);
        close(&matrix_tree_marginals(&Graph::complete(4), &[0.0; 6], 1.0).unwrap().x, &[0.5; 6], 1e-15);
        let x = matrix_tree_marginals(&Graph::complete(3), &[2f64.ln(), 0.0, 0.0], 1.0).unwrap().x;
        close(&x, &[0.8, 0.6, 0.6], 1e-15);
    }

    #[test]
    fn directed_matrix_tree() {
        let g = Graph::directed(2, vec![(0, 1)]).unwrap();
        close(&directed_matrix_tree_marginals(&g, 0, &[0.3], 1.0).unwrap().x, &[1.0], 1e-15);

        let g = Graph::complete_directed(3);
        let spec = StructureSpec::Arborescence { graph: g.clone(), root: 0 };
        let u = vec![0.0; g.num_edges()];
        close(
            &directed_matrix_tree_marginals(&g, 0, &u, 1.0).unwrap().x,
            &gibbs_marginals_bruteforce(&spec, &u, 1.0, 100).unwrap(),
            1e-15,
        );

        let mut r = rng::stream(12, 0);
        let g = sst::verify::suites::random_graph(&mut r, 4, true);
        let u: Vec<f64> = (0..g.num_edges()).map(|_| rng::open_unit(&mut r) * 4.0 - 2.0).collect();
        let spec = StructureSpec::Arborescence { graph: g.clone(), root: 0 };
        close(
            &directed_matrix_tree_marginals(&g, 0, &u, 1.0).unwrap().x,
            &gibbs_marginals_bruteforce(&spec, &u, 1.0, DEFAULT_ENUM_LIMIT).unwrap(),
            1e-8,
        );
    }

    #[test]
    fn sinkhorn() {
        close(&sinkhorn_relax(1, &[0.4], 1.0, TOL, 1000).unwrap().x, &[1.0], 1e-15);
        close(&sinkhorn_relax(2, &[0.0; 4], 1.0, TOL, 1000).unwrap().x, &[0.5; 4], 1e-12);
        let u = [0.9, 0.1, 0.3, 0.2, 0.8, 0.05, 0.35, 0.15, 0.7];
        let best = hungarian_match(&u).unwrap().to_f64();
        close(&sinkhorn_relax(3, &u, 0.01, TOL, 1000).unwrap().x, &best, 1e-3);
    }
}

mod gradients {
    use super::*;

    fn rs(reg: Regularizer, t: f64) -> RelaxationSpec {
        let mut r = RelaxationSpec::new(reg, t);
        r.tol = 1e-12;
        r
    }

    #[test]
    fn vjp() {
        let fd = FdConfig::default();
        let spec = StructureSpec::OneHot { n: 2 };
        let zero = fd_vjp(&spec, &rs(Regularizer::Shannon, 1.0), &[0.3, 0.1], &DirectionVector::new(vec![0.0; 2]).unwrap(), fd);
        assert_eq!(zero.unwrap(), vec![0.0, 0.0]);
        let d = DirectionVector::new(vec![1.0, -1.0]).unwrap();
        close(&fd_vjp(&spec, &rs(Regularizer::Shannon, 1.0), &[0.0, 0.0], &d, fd).unwrap(), &[0.5, -0.5], 1e-8);
        let d = DirectionVector::new(vec![1.0]).unwrap();
        let g = fd_vjp(&StructureSpec::Subsets { n: 1 }, &rs(Regularizer::BinaryEntropy, 1.0), &[0.0], &d, fd);
        close(&g.unwrap(), &[0.25], 1e-8);
    }

    #[test]
    fn analytic() {
        let j = analytic_jacobian(&StructureSpec::OneHot { n: 2 }, &rs(Regularizer::Shannon, 1.0), &[0.0, 0.0]).unwrap();
        assert_eq!(j, vec![vec![0.25, -0.25], vec![-0.25, 0.25]]);
        let j = analytic_jacobian(&StructureSpec::Subsets { n: 1 }, &rs(Regularizer::BinaryEntropy, 2.0), &[0.0]).unwrap();
        assert_eq!(j, vec![vec![0.125]]);

        // J_t(u) = J_1(u / t) / t
        let (u, t) = ([0.4, -0.2, 1.1], 0.6);
        let spec = StructureSpec::OneHot { n: 3 };
        let jt = analytic_jacobian(&spec, &rs(Regularizer::Shannon, t), &u).unwrap();
        let scaled: Vec<f64> = u.iter().map(|x| x / t).collect();
        let j1 = analytic_jacobian(&spec, &rs(Regularizer::Shannon, 1.0), &scaled).unwrap();
        for (a, b) in jt.iter().flatten().zip(j1.iter().flatten()) {
            assert_abs_diff_eq!(*a, b / t, epsilon = 1e-14);
        }
    }

    #[test]
    fn finite_difference_checks() {
        let fd = FdConfig::default();
        let r = gradcheck(&StructureSpec::OneHot { n: 3 }, &rs(Regularizer::Shannon, 1.0), &[0.2, -0.7, 0.5], 1e-6, fd);
        let r = r.unwrap();
        assert!(r.pass && r.max_discrepancy.unwrap() <= 1e-6);

        let k3 = StructureSpec::SpanningTree { graph: Graph::complete(3) };
        let r = gradcheck(&k3, &rs(Regularizer::ExpFamilyEntropy, 1.0), &[0.9, -0.4, 0.1], 1e-6, fd).unwrap();
        assert!(r.symmetry_defect <= 1e-6);

        let spec = StructureSpec::KSubsets { n: 4, k: 2 };
        let u = [0.3, -0.5, 1.2, 0.0];
        let r = gradcheck(&spec, &rs(Regularizer::ExpFamilyEntropy, 0.8), &u, 1e-6, fd).unwrap();
        assert!(r.symmetry_defect <= 1e-6);
        let cov = gibbs_covariance_bruteforce(&spec, &u, 0.8, 100).unwrap();
        for (a, b) in r.jacobian.iter().flatten().zip(cov.iter().flatten()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-6);
        }
    }
}

//! Arborescences: Chu-Liu-Edmonds on exponential utilities has the same law
//! as the categorical contraction sampler; directed matrix-tree marginals
//! give the relaxation.

use sst::argmax::{cle_max_arborescence, sample_arborescence_categorical};
use sst::relax::directed_matrix_tree_marginals;
use sst::verify::{argmax_sampler, mc_frequencies, two_sample_equivalence};
use sst::{Graph, StructureSpec, UtilitySpec};

pub fn run_example() -> sst::Result<()> {
    let graph = Graph::complete_directed(4);
    let root = 0;
    let rates: Vec<f64> = (0..graph.num_edges()).map(|e| (0.3 * e as f64).sin().exp()).collect();
    let spec = StructureSpec::Arborescence { graph: graph.clone(), root };
    let noise = UtilitySpec::neg_exponential(rates.clone())?;

    let u = noise.draw(&mut sst::rng::stream(3, 0)).u;
    let best = cle_max_arborescence(&graph, root, &u)?;
    let edges: Vec<_> = best.ones().map(|e| graph.edges()[e]).collect();
    println!("max arborescence edges {edges:?}");

    let a = mc_frequencies(argmax_sampler(&spec, &noise)?, 30_000, 1)?;
    let b = mc_frequencies(|r| sample_arborescence_categorical(&graph, root, &rates, r), 30_000, 2)?;
    println!(
        "{} arborescences seen, perturb-and-MAP vs contraction sampler p = {:.3}",
        a.support.len(),
        two_sample_equivalence(&a, &b, 0.01)?.p_value
    );

    let mu = directed_matrix_tree_marginals(&graph, root, &u, 0.5)?.x;
    println!("marginals at t = 0.5: {mu:.3?} (total {:.6})", mu.iter().sum::<f64>());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

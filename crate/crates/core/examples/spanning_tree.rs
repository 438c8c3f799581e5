//! Spanning trees: Kruskal on Gumbel-perturbed edge weights, the equivalent
//! sequential edge process, and matrix-tree marginals.

use sst::argmax::{kruskal_max_tree, sample_tree_categorical};
use sst::relax::matrix_tree_marginals;
use sst::verify::{argmax_sampler, mc_frequencies, two_sample_equivalence};
use sst::{Graph, StructureSpec, UtilitySpec};

pub fn run_example() -> sst::Result<()> {
    let graph = Graph::complete(4);
    let theta = vec![0.5, -0.2, 0.1, 0.9, 0.0, -0.7];
    let spec = StructureSpec::SpanningTree { graph: graph.clone() };
    let noise = UtilitySpec::gumbel(theta.clone())?;

    let u = noise.draw(&mut sst::rng::stream(2, 0)).u;
    println!("max tree for {u:.2?}: {}", kruskal_max_tree(&graph, &u)?);

    let a = mc_frequencies(argmax_sampler(&spec, &noise)?, 30_000, 1)?;
    let b = mc_frequencies(|r| sample_tree_categorical(&graph, &theta, r), 30_000, 2)?;
    println!(
        "{} distinct trees, kruskal vs edge process p = {:.3}",
        a.support.len(),
        two_sample_equivalence(&a, &b, 0.01)?.p_value
    );

    for t in [1.0, 0.1, 1e-3] {
        let p = matrix_tree_marginals(&graph, &u, t)?;
        println!(
            "t = {t:<6} marginals {:.3?} cond {:.1e}",
            p.x,
            p.condition_estimate.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

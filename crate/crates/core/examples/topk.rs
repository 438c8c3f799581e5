//! Top-k selection. Gumbel top-k equals sampling k items without
//! replacement; the relaxations are capped-simplex solutions.

use sst::argmax::{sample_topk_without_replacement, topk_select};
use sst::relax::{relax, Regularizer, RelaxationSpec};
use sst::verify::{argmax_sampler, mc_frequencies, two_sample_equivalence};
use sst::{StructureSpec, UtilitySpec};

pub fn run_example() -> sst::Result<()> {
    let theta = vec![0.3, 1.1, -0.6, 0.8, 0.0];
    let k = 2;
    let spec = StructureSpec::KSubsets { n: theta.len(), k };
    let noise = UtilitySpec::gumbel(theta.clone())?;

    let a = mc_frequencies(argmax_sampler(&spec, &noise)?, 40_000, 1)?;
    let b = mc_frequencies(|r| sample_topk_without_replacement(&theta, k, r), 40_000, 2)?;
    let report = two_sample_equivalence(&a, &b, 0.01)?;
    println!("gumbel top-k vs sequential sampling: p = {:.3}", report.p_value);

    let u = noise.draw(&mut sst::rng::stream(4, 0)).u;
    println!("top-{k} of {u:.3?}: {}", topk_select(&u, k)?);
    for reg in [Regularizer::Euclidean, Regularizer::BinaryEntropy, Regularizer::CategoricalEntropy] {
        let p = relax(&spec, &RelaxationSpec::new(reg, 0.5), &u)?;
        let sum: f64 = p.x.iter().sum();
        println!("{reg:?}: {:.3?} (sum {sum:.6})", p.x);
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

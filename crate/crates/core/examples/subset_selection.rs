//! Subsets with logistic noise: thresholding at zero gives independent
//! Bernoulli(sigmoid(theta)) bits, and the binary-entropy relaxation gives
//! sigmoid(u / t).

use sst::argmax::solve_map;
use sst::relax::{relax, Regularizer, RelaxationSpec};
use sst::verify::{argmax_sampler, mc_frequencies};
use sst::{StructureSpec, UtilitySpec};

pub fn run_example() -> sst::Result<()> {
    let theta = vec![1.2, -0.4, 0.0, 2.0];
    let spec = StructureSpec::Subsets { n: theta.len() };
    let noise = UtilitySpec::logistic(theta.clone())?;

    let table = mc_frequencies(argmax_sampler(&spec, &noise)?, 40_000, 3)?;
    let sig: Vec<f64> = theta.iter().map(|t| 1.0 / (1.0 + (-t).exp())).collect();
    println!("inclusion rate {:.3?}", table.mean());
    println!("sigmoid(theta) {:.3?}", sig);

    let u = noise.draw(&mut sst::rng::stream(5, 0)).u;
    println!("hard subset    {}", solve_map(&spec, &u)?.vertex);
    for t in [1.0, 0.1, 0.01] {
        let x = relax(&spec, &RelaxationSpec::new(Regularizer::BinaryEntropy, t), &u)?.x;
        println!("t = {t:<5} soft {x:.3?}");
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

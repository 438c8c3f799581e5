//! Gumbel-max trick: the argmax of Gumbel-perturbed logits is a sample from
//! softmax(theta).

use sst::argmax::solve_map;
use sst::relax::softmax_simplex;
use sst::verify::{argmax_sampler, chi_square_gof, gibbs_distribution, mc_frequencies};
use sst::{StructureSpec, UtilitySpec};

pub fn run_example() -> sst::Result<()> {
    let theta = vec![0.5, -0.25, 1.0, 0.0, -1.0];
    let spec = StructureSpec::OneHot { n: theta.len() };
    let noise = UtilitySpec::gumbel(theta.clone())?;

    let mut rng = sst::rng::stream(1, 0);
    let u = noise.draw(&mut rng).u;
    println!("one draw: u = {u:.3?} -> {}", solve_map(&spec, &u)?.vertex);

    let table = mc_frequencies(argmax_sampler(&spec, &noise)?, 50_000, 7)?;
    let (cells, probs) = gibbs_distribution(&spec, &theta, 1.0, 100)?;
    println!("empirical mean {:.4?}", table.mean());
    println!("softmax       {:.4?}", softmax_simplex(&theta, 1.0).x);
    let report = chi_square_gof(&table, &cells, &probs, 0.01)?;
    println!("chi-square {:.2} on {} dof, p = {:.3}", report.statistic, report.dof, report.p_value);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

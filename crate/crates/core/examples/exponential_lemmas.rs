//! The exponential race behind every sampler here, checked by Monte Carlo.

use sst::verify::exponential::{argmin_law, argsort_law, min_law, monotone_coupling_mismatches, residual_laws};

pub fn run_example() -> sst::Result<()> {
    let rates = [0.5, 1.0, 1.5, 2.5];
    let draws = 20_000;
    println!("gumbel/exponential coupling mismatches: {}", monotone_coupling_mismatches(&rates, draws, 1)?);
    println!("argmin law   p = {:.3}", argmin_law(&rates, draws, 2, 0.01)?.p_value);
    println!("min law      p = {:.3}", min_law(&rates, draws, 3, 0.01)?.p_value);
    let residual = residual_laws(&rates, draws, 4, 0.01)?;
    let worst = residual.iter().map(|r| r.p_value).fold(1.0, f64::min);
    println!("residual laws: {} KS tests, smallest p = {worst:.3}", residual.len());
    println!("argsort law  p = {:.3}", argsort_law(&rates, draws, 5, 0.01)?.p_value);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

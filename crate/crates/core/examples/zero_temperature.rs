//! As t -> 0 every relaxation converges to the exact argmax.

use sst::argmax::solve_map;
use sst::relax::{relax, RelaxationSpec};
use sst::verify::suites::representative_pairs;

pub fn run_example() -> sst::Result<()> {
    let mut rng = sst::rng::stream(6, 0);
    for (spec, reg) in representative_pairs() {
        let u = sst::rng::open_unit_vec(&mut rng, spec.embedding_dim());
        let target = solve_map(&spec, &u)?.vertex.to_f64();
        let gaps: Vec<String> = [1.0, 0.1, 0.01, 0.001]
            .iter()
            .map(|&t| {
                let x = relax(&spec, &RelaxationSpec::new(reg, t), &u)?.x;
                let gap = x.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                Ok(format!("{gap:.1e}"))
            })
            .collect::<sst::Result<_>>()?;
        println!("{:<15} {:<20?} {}", spec.kind().to_string(), reg, gaps.join("  "));
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

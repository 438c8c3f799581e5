//! Correlated k-subsets: a chain of binary variables with pairwise rewards
//! on adjacent items, solved exactly and relaxed by forward-backward.

use sst::argmax::solve_map;
use sst::relax::expfam_marginals;
use sst::StructureSpec;

pub fn run_example() -> sst::Result<()> {
    let (n, k) = (6, 3);
    let spec = StructureSpec::CorrKSubsets { n, k };
    // unary utilities, then rewards for (i, i + 1) both selected
    let mut u = vec![0.2, 0.9, -0.1, 0.4, 0.8, -0.3];
    u.extend([0.0, 0.5, 0.0, 1.5, 0.1]);

    let map = solve_map(&spec, &u)?;
    println!("best chain {} objective {:.3}", map.vertex, map.objective);
    for t in [2.0, 0.5, 0.05] {
        let mu = expfam_marginals(&spec, &u, t)?.x;
        println!("t = {t:<4} items {:.3?} pairs {:.3?}", &mu[..n], &mu[n..]);
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

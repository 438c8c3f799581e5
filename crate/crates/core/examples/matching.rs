//! Perfect matchings: Hungarian algorithm for the hard assignment and
//! Sinkhorn for the entropic relaxation.

use sst::argmax::hungarian_match;
use sst::relax::sinkhorn_relax;

pub fn run_example() -> sst::Result<()> {
    let n = 4;
    let mut rng = sst::rng::stream(11, 0);
    let u = sst::rng::open_unit_vec(&mut rng, n * n);

    let perm = hungarian_match(&u)?;
    println!("assignment:");
    for row in perm.bits.chunks(n) {
        println!("  {row:?}");
    }
    for t in [1.0, 0.1, 0.01] {
        let p = sinkhorn_relax(n, &u, t, 1e-10, 1000)?;
        println!("t = {t}: residual {:.1e}", p.residual);
        for row in p.x.chunks(n) {
            println!("  {row:.3?}");
        }
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

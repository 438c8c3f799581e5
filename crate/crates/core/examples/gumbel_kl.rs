//! KL divergence from Gumbel(theta) to the standard Gumbel, in closed form
//! and by quadrature of the log-density ratio.

use sst::UtilitySpec;

pub fn run_example() -> sst::Result<()> {
    for theta in [-2.0, -0.5, 0.0, 1.0, 3.0] {
        let q = UtilitySpec::gumbel(vec![theta])?;
        let p = UtilitySpec::gumbel(vec![0.0])?;
        let closed = q.kl_to_standard()?;
        // trapezoid rule over a range holding all but a negligible tail
        let (lo, hi, steps) = (theta - 10.0, theta + 40.0, 200_000);
        let h = (hi - lo) / steps as f64;
        let mut numeric = 0.0;
        for i in 0..=steps {
            let x = lo + i as f64 * h;
            let lq = q.log_density(&[x])?;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            numeric += w * lq.exp() * (lq - p.log_density(&[x])?) * h;
        }
        println!("theta {theta:>5}: closed form {closed:.9}  quadrature {numeric:.9}");
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

//! Running a verification suite and the chi-square calibration check.

use sst::verify::{calibration_rate, run_suite, Suite};

pub fn run_example() -> sst::Result<()> {
    for check in run_suite(Suite::MatrixTree, 1, None)? {
        println!("[{}] {}: {:.2e} <= {:.0e}", if check.pass { "ok" } else { "FAIL" }, check.check, check.statistic, check.threshold);
    }
    let rate = calibration_rate(500, 500, &[0.1, 0.2, 0.3, 0.4], 0.01, 9)?;
    println!("null rejection rate at level 0.01: {rate:.3}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

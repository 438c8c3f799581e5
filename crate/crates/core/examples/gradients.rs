//! Gradients through relaxations: closed-form Jacobians, the two-call
//! finite-difference vector-Jacobian product, and a full gradient check.

use sst::grad::{analytic_jacobian, fd_vjp, gradcheck, DirectionVector, FdConfig};
use sst::relax::{Regularizer, RelaxationSpec};
use sst::{Graph, StructureSpec};

pub fn run_example() -> sst::Result<()> {
    let spec = StructureSpec::KSubsets { n: 4, k: 2 };
    let rspec = RelaxationSpec::new(Regularizer::BinaryEntropy, 0.5);
    let u = [0.4, -0.1, 0.7, 0.2];

    let d = DirectionVector::new(vec![1.0, 0.0, -1.0, 0.5])?;
    let fd = fd_vjp(&spec, &rspec, &u, &d, FdConfig::default())?;
    let j = analytic_jacobian(&spec, &rspec, &u)?;
    let exact: Vec<f64> = j.iter().map(|row| row.iter().zip(d.as_slice()).map(|(a, b)| a * b).sum()).collect();
    println!("finite differences {fd:.6?}");
    println!("closed form        {exact:.6?}");

    let tree = StructureSpec::SpanningTree { graph: Graph::complete(4) };
    let report = gradcheck(
        &tree,
        &RelaxationSpec::new(Regularizer::ExpFamilyEntropy, 1.0),
        &[0.3, -0.5, 0.1, 0.8, 0.0, 0.2],
        1e-6,
        FdConfig::default(),
    )?;
    println!("matrix-tree jacobian symmetry defect {:.2e}, pass {}", report.symmetry_defect, report.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

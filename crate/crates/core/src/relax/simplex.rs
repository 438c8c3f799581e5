use crate::error::{Error, Result};
use crate::structures::StructureSpec;

use super::bisection::{capped_shift, Profile};
use super::RelaxedPoint;

/// Tempered softmax `exp(u_i / t) / sum_j exp(u_j / t)`.
pub fn softmax_simplex(u: &[f64], t: f64) -> RelaxedPoint {
    let top = u.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let w: Vec<f64> = u.iter().map(|&v| ((v - top) / t).exp()).collect();
    let total: f64 = w.iter().sum();
    RelaxedPoint::exact(w.into_iter().map(|v| v / total).collect())
}

/// Euclidean projection of `u / t` onto the simplex (one-hot), the unit box
/// (subsets) or the capped simplex `{0 <= x <= 1, sum x = k}` (k-subsets).
pub fn euclidean_project(
    spec: &StructureSpec,
    u: &[f64],
    t: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RelaxedPoint> {
    spec.check_dim(u.len())?;
    let z: Vec<f64> = u.iter().map(|&v| v / t).collect();
    match spec {
        StructureSpec::OneHot { .. } => Ok(project_simplex(&z)),
        StructureSpec::Subsets { .. } => Ok(RelaxedPoint::exact(
            z.iter().map(|&v| v.clamp(0.0, 1.0)).collect(),
        )),
        StructureSpec::KSubsets { k, .. } => capped_shift(&z, *k, Profile::Clamp, tol, max_iter),
        _ => Err(Error::Unsupported(format!(
            "Euclidean projection is not available for {}",
            spec.kind()
        ))),
    }
}

/// Sort-based projection onto the probability simplex.
fn project_simplex(z: &[f64]) -> RelaxedPoint {
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut threshold = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if v - candidate > 0.0 {
            threshold = candidate;
        }
    }
    RelaxedPoint {
        x: z.iter().map(|&v| (v - threshold).max(0.0)).collect(),
        dual: Some(vec![threshold]),
        residual: 0.0,
        condition_estimate: None,
    }
}

//! Exponential-family marginals `mu_t(u) = E[x]` under `p(x) ~ exp(u^T x / t)`.

use crate::error::{Error, Result};
use crate::structures::{permutations, StructureSpec};

use super::bisection::sigmoid;
use super::matrix_tree::{directed_matrix_tree_with, matrix_tree_with, MatrixTreeOptions};
use super::{softmax_simplex, RelaxedPoint, MAX_EXACT_MATCHING};

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn log_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, log_add)
}

/// Gibbs marginals for any structure kind.
pub fn expfam_marginals(spec: &StructureSpec, u: &[f64], t: f64) -> Result<RelaxedPoint> {
    expfam_marginals_with(spec, u, t, &MatrixTreeOptions::default())
}

pub(crate) fn expfam_marginals_with(
    spec: &StructureSpec,
    u: &[f64],
    t: f64,
    opts: &MatrixTreeOptions,
) -> Result<RelaxedPoint> {
    spec.validate()?;
    spec.check_dim(u.len())?;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")));
    }
    let z: Vec<f64> = u.iter().map(|&v| v / t).collect();
    let x = match spec {
        StructureSpec::OneHot { .. } => return Ok(softmax_simplex(u, t)),
        StructureSpec::Subsets { .. } => z.iter().map(|&v| sigmoid(v)).collect(),
        StructureSpec::KSubsets { k, .. } => k_subset_marginals(&z, *k),
        StructureSpec::CorrKSubsets { n, k } => corr_k_subset_marginals(*n, *k, &z),
        StructureSpec::Matching { n } => matching_marginals(*n, &z)?,
        StructureSpec::SpanningTree { graph } => return matrix_tree_with(graph, u, t, opts),
        StructureSpec::Arborescence { graph, root } => {
            return directed_matrix_tree_with(graph, *root, u, t, opts)
        }
    };
    if x.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::Numerical("marginals overflowed".into()));
    }
    Ok(RelaxedPoint::exact(x))
}

/// Cardinality-constrained forward-backward in the log domain, `O(nk)`.
fn k_subset_marginals(z: &[f64], k: usize) -> Vec<f64> {
    let n = z.len();
    let neg = f64::NEG_INFINITY;
    // fwd[i][c]: log-weight of assignments to positions < i with c ones
    let mut fwd = vec![vec![neg; k + 1]; n + 1];
    fwd[0][0] = 0.0;
    for i in 0..n {
        for c in 0..=k {
            let off = fwd[i][c];
            let on = if c > 0 { fwd[i][c - 1] + z[i] } else { neg };
            fwd[i + 1][c] = log_add(off, on);
        }
    }
    // bwd[i][c]: log-weight of assignments to positions >= i with c ones
    let mut bwd = vec![vec![neg; k + 1]; n + 1];
    bwd[n][0] = 0.0;
    for i in (0..n).rev() {
        for c in 0..=k {
            let off = bwd[i + 1][c];
            let on = if c > 0 { bwd[i + 1][c - 1] + z[i] } else { neg };
            bwd[i][c] = log_add(off, on);
        }
    }
    let log_z = fwd[n][k];
    (0..n)
        .map(|i| {
            let on = log_sum((0..k).map(|c| fwd[i][c] + z[i] + bwd[i + 1][k - 1 - c]));
            (on - log_z).exp().min(1.0)
        })
        .collect()
}

/// Forward-backward over `(position, count, state)` for a binary chain with
/// pairwise weights `z[n + i]` on `(i, i + 1)` both on.
fn corr_k_subset_marginals(n: usize, k: usize, z: &[f64]) -> Vec<f64> {
    let neg = f64::NEG_INFINITY;
    let pair = |i: usize, s: usize, s2: usize| if s == 1 && s2 == 1 { z[n + i] } else { 0.0 };
    let unary = |i: usize, s: usize| if s == 1 { z[i] } else { 0.0 };

    // fwd[i][c][s]: positions 0..=i, c ones among them, x_i = s
    let mut fwd = vec![vec![[neg; 2]; k + 1]; n];
    fwd[0][0][0] = 0.0;
    fwd[0][1][1] = z[0];
    for i in 1..n {
        for c in 0..=k {
            for s in 0..2 {
                if s > c {
                    continue;
                }
                fwd[i][c][s] = log_sum(
                    (0..2).map(|p| fwd[i - 1][c - s][p] + unary(i, s) + pair(i - 1, p, s)),
                );
            }
        }
    }
    // bwd[i][c][s]: positions i+1..n given x_i = s, c ones among them
    let mut bwd = vec![vec![[neg; 2]; k + 1]; n];
    bwd[n - 1][0] = [0.0, 0.0];
    for i in (0..n - 1).rev() {
        for c in 0..=k {
            for s in 0..2 {
                bwd[i][c][s] = log_sum((0..2).filter(|&s2| s2 <= c).map(|s2| {
                    bwd[i + 1][c - s2][s2] + unary(i + 1, s2) + pair(i, s, s2)
                }));
            }
        }
    }
    let log_z = log_add(fwd[n - 1][k][0], fwd[n - 1][k][1]);

    let mut x = vec![0.0; 2 * n - 1];
    for i in 0..n {
        let on = log_sum((1..=k).map(|c| fwd[i][c][1] + bwd[i][k - c][1]));
        x[i] = (on - log_z).exp().min(1.0);
    }
    for i in 0..n - 1 {
        // x_i = x_{i+1} = 1: fwd up to i in state 1, then step into i+1 in state 1
        let both = log_sum((1..k).map(|c| {
            fwd[i][c][1] + unary(i + 1, 1) + pair(i, 1, 1) + bwd[i + 1][k - c - 1][1]
        }));
        x[n + i] = (both - log_z).exp().min(1.0);
    }
    x
}

fn matching_marginals(n: usize, z: &[f64]) -> Result<Vec<f64>> {
    if n > MAX_EXACT_MATCHING {
        return Err(Error::Unsupported(format!(
            "exact matching marginals need n <= {MAX_EXACT_MATCHING}, got {n}"
        )));
    }
    let perms = permutations(n);
    let scores: Vec<f64> = perms
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| z[i * n + j]).sum())
        .collect();
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scores.iter().map(|&s| (s - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut x = vec![0.0; n * n];
    for (p, w) in perms.iter().zip(&weights) {
        for (i, &j) in p.iter().enumerate() {
            x[i * n + j] += w / total;
        }
    }
    Ok(x)
}

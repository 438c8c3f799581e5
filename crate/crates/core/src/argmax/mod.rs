//! Exact maximizers of `u^T x` over each structure's vertex set, plus the
//! categorical sampling processes that share their output law under
//! specific utility distributions.
//!
//! Ties are broken toward the lowest coordinate index everywhere. Sorting is
//! stable, and Kruskal and the arborescence solver scan edges in index order
//! within equal utilities. A solver reports `tie_broken` whenever it saw an
//! exact tie that it had to resolve by index; for Kruskal and the matching
//! solver the flag is conservative (any duplicate utility value).

mod arborescence;
mod chain;
mod hungarian;
mod kruskal;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{StructureSpec, Vertex};

pub use arborescence::{cle_max_arborescence, sample_arborescence_categorical};
pub use hungarian::hungarian_match;
pub use kruskal::{kruskal_max_tree, sample_tree_categorical};

pub(crate) use arborescence::sample_proportional;

/// A maximizer of `u^T x` over the vertex set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSolution {
    pub vertex: Vertex,
    pub objective: f64,
    /// Set when another vertex attains the same objective.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tie_broken: bool,
}

/// Solves `argmax_{x in X} u^T x` for any structure kind.
pub fn solve_map(spec: &StructureSpec, u: &[f64]) -> Result<MapSolution> {
    spec.validate()?;
    spec.check_dim(u.len())?;
    if u.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("utilities contain NaN".into()));
    }
    let (vertex, tie_broken) = match spec {
        StructureSpec::OneHot { n } => {
            let (best, tie) = argmax_first(u);
            let mut bits = vec![0u8; *n];
            bits[best] = 1;
            (Vertex::new(bits), tie)
        }
        StructureSpec::Subsets { .. } => {
            let bits = u.iter().map(|&x| (x > 0.0) as u8).collect();
            (Vertex::new(bits), u.contains(&0.0))
        }
        StructureSpec::KSubsets { k, .. } => topk_with_ties(u, *k)?,
        StructureSpec::CorrKSubsets { n, k } => chain::corr_k_subsets_map(*n, *k, u),
        StructureSpec::Matching { .. } => {
            let v = hungarian_match(u)?;
            (v, has_duplicates(u))
        }
        StructureSpec::SpanningTree { graph } => kruskal::kruskal_with_ties(graph, u)?,
        StructureSpec::Arborescence { graph, root } => arborescence::cle_with_ties(graph, *root, u)?,
    };
    let objective = vertex.dot(u);
    Ok(MapSolution {
        vertex,
        objective,
        tie_broken,
    })
}

fn argmax_first(u: &[f64]) -> (usize, bool) {
    let mut best = 0;
    let mut tie = false;
    for i in 1..u.len() {
        if u[i] > u[best] {
            best = i;
            tie = false;
        } else if u[i] == u[best] {
            tie = true;
        }
    }
    (best, tie)
}

fn has_duplicates(u: &[f64]) -> bool {
    let mut sorted = u.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// k-hot indicator of the `k` largest coordinates of `u`.
pub fn topk_select(u: &[f64], k: usize) -> Result<Vertex> {
    topk_with_ties(u, k).map(|(v, _)| v)
}

fn topk_with_ties(u: &[f64], k: usize) -> Result<(Vertex, bool)> {
    if k == 0 || k >= u.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must satisfy 1 <= k < {}",
            u.len()
        )));
    }
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u[b].total_cmp(&u[a]));
    let mut bits = vec![0u8; u.len()];
    for &i in &order[..k] {
        bits[i] = 1;
    }
    Ok((Vertex::new(bits), u[order[k - 1]] == u[order[k]]))
}

/// k-hot vector from `k` sequential draws without replacement, each with
/// probability proportional to `exp(theta_i)` among the remaining indices.
pub fn sample_topk_without_replacement<R: RngCore + ?Sized>(
    theta: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<Vertex> {
    if k == 0 || k >= theta.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must satisfy 1 <= k < {}",
            theta.len()
        )));
    }
    let mut remaining: Vec<usize> = (0..theta.len()).collect();
    let mut bits = vec![0u8; theta.len()];
    for _ in 0..k {
        let top = remaining.iter().map(|&i| theta[i]).fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = remaining.iter().map(|&i| (theta[i] - top).exp()).collect();
        let i = remaining.remove(sample_proportional(&w, rng));
        bits[i] = 1;
    }
    Ok(Vertex::new(bits))
}

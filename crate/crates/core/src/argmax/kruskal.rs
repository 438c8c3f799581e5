use rand::RngCore;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::structures::{Graph, Vertex};

use super::arborescence::sample_proportional;

fn check_inputs(graph: &Graph, values: &[f64]) -> Result<()> {
    if graph.is_directed() {
        return Err(Error::InvalidStructure("spanning trees need an undirected graph".into()));
    }
    if values.len() != graph.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_edges(),
            got: values.len(),
        });
    }
    Ok(())
}

/// Greedily adds edges in the given order, skipping those that close a cycle.
fn grow_tree(graph: &Graph, order: impl IntoIterator<Item = usize>) -> Result<Vertex> {
    let n = graph.num_nodes();
    let mut sets = DisjointSets::new(n);
    let mut bits = vec![0u8; graph.num_edges()];
    let mut added = 0;
    for e in order {
        if added + 1 == n {
            break;
        }
        let (a, b) = graph.edges()[e];
        if sets.union(a, b) {
            bits[e] = 1;
            added += 1;
        }
    }
    if added + 1 != n {
        return Err(Error::Infeasible("graph is disconnected".into()));
    }
    Ok(Vertex::new(bits))
}

/// Maximum-utility spanning tree.
pub fn kruskal_max_tree(graph: &Graph, u: &[f64]) -> Result<Vertex> {
    kruskal_with_ties(graph, u).map(|(v, _)| v)
}

pub(crate) fn kruskal_with_ties(graph: &Graph, u: &[f64]) -> Result<(Vertex, bool)> {
    check_inputs(graph, u)?;
    if u.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("utilities contain NaN".into()));
    }
    let mut order: Vec<usize> = (0..u.len()).collect();
    // stable: equal utilities keep index order
    order.sort_by(|&a, &b| u[b].total_cmp(&u[a]));
    let tie = order.windows(2).any(|w| u[w[0]] == u[w[1]]);
    Ok((grow_tree(graph, order)?, tie))
}

/// Spanning tree from the sequential process: draw edges without replacement
/// with probability proportional to `exp(theta_e)` and keep each one that
/// does not close a cycle.
pub fn sample_tree_categorical<R: RngCore + ?Sized>(
    graph: &Graph,
    theta: &[f64],
    rng: &mut R,
) -> Result<Vertex> {
    check_inputs(graph, theta)?;
    if !graph.is_connected() {
        return Err(Error::Infeasible("graph is disconnected".into()));
    }
    let n = graph.num_nodes();
    let mut sets = DisjointSets::new(n);
    let mut bits = vec![0u8; graph.num_edges()];
    let mut remaining: Vec<usize> = (0..theta.len()).collect();
    let mut added = 0;
    while added + 1 < n {
        let top = remaining.iter().map(|&e| theta[e]).fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = remaining.iter().map(|&e| (theta[e] - top).exp()).collect();
        let e = remaining.remove(sample_proportional(&w, rng));
        let (a, b) = graph.edges()[e];
        if sets.union(a, b) {
            bits[e] = 1;
            added += 1;
        }
    }
    Ok(Vertex::new(bits))
}

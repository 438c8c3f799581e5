//! Spanning-tree and arborescence marginals from the matrix-tree theorem.
//!
//! With edge weights `w_e = exp(u_e / t)` the log-partition function is the
//! log-determinant of the reduced Laplacian, and the marginals are its
//! gradient in `u / t`. For an undirected edge `(i, j)` this is
//! `w_e (A_ii + A_jj - A_ij - A_ji)`, and for a directed edge `i -> j` it is
//! `w_e (A_jj - A_ji)`, where `A` is the inverse of the reduced Laplacian and
//! entries of the deleted node are zero.
//!
//! When the reduced Laplacian is too badly conditioned for the inverse to be
//! trusted (weights spanning hundreds of orders of magnitude at low
//! temperature), the marginals are recomputed by a subtraction-free route:
//! Gaussian elimination of a Laplacian keeps it a Laplacian, so the log
//! partition function can be accumulated entirely in the log domain, and each
//! marginal is a ratio of partition functions of the graph with the edge
//! contracted (or deleted).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::structures::Graph;

use super::RelaxedPoint;

/// Controls for the matrix-tree computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixTreeOptions {
    /// Caps the range of `u / t` to `[max - clip, max]` before building the
    /// Laplacian.
    pub clip_range: Option<f64>,
    /// Node whose row and column are deleted (undirected only). Defaults to
    /// the lower endpoint of the edge with the largest utility.
    pub deleted_node: Option<usize>,
    /// Condition estimates above this switch to the log-domain route.
    pub condition_limit: f64,
}

impl Default for MatrixTreeOptions {
    fn default() -> Self {
        MatrixTreeOptions {
            clip_range: None,
            deleted_node: None,
            condition_limit: 1e10,
        }
    }
}

/// Edge marginals of the spanning-tree Gibbs distribution `p(T) ~ exp(u^T x_T / t)`.
pub fn matrix_tree_marginals(graph: &Graph, u: &[f64], t: f64) -> Result<RelaxedPoint> {
    matrix_tree_with(graph, u, t, &MatrixTreeOptions::default())
}

/// Edge marginals of the `root`-arborescence Gibbs distribution.
pub fn directed_matrix_tree_marginals(
    graph: &Graph,
    root: usize,
    u: &[f64],
    t: f64,
) -> Result<RelaxedPoint> {
    directed_matrix_tree_with(graph, root, u, t, &MatrixTreeOptions::default())
}

fn scaled_utilities(u: &[f64], t: f64, clip: Option<f64>) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")));
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("utilities must be finite".into()));
    }
    let mut z: Vec<f64> = u.iter().map(|&v| v / t).collect();
    let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for v in z.iter_mut() {
        if let Some(c) = clip {
            *v = v.max(top - c);
        }
        *v -= top;
    }
    Ok(z)
}

pub(crate) fn matrix_tree_with(
    graph: &Graph,
    u: &[f64],
    t: f64,
    opts: &MatrixTreeOptions,
) -> Result<RelaxedPoint> {
    if graph.is_directed() {
        return Err(Error::InvalidStructure("spanning trees need an undirected graph".into()));
    }
    check_len(graph, u)?;
    let n = graph.num_nodes();
    if n == 1 {
        return Ok(RelaxedPoint::exact(vec![0.0; graph.num_edges()]));
    }
    let z = scaled_utilities(u, t, opts.clip_range)?;
    let deleted = match opts.deleted_node {
        Some(k) if k < n => k,
        Some(k) => return Err(Error::InvalidArgument(format!("deleted node {k} out of range"))),
        None => {
            let best = (0..z.len()).fold(0, |b, e| if z[e] > z[b] { e } else { b });
            graph.edges().get(best).map_or(0, |&(a, _)| a)
        }
    };
    let arcs = undirected_arcs(graph, &z);
    solve(graph, deleted, &z, &arcs, false, opts)
}

pub(crate) fn directed_matrix_tree_with(
    graph: &Graph,
    root: usize,
    u: &[f64],
    t: f64,
    opts: &MatrixTreeOptions,
) -> Result<RelaxedPoint> {
    if !graph.is_directed() {
        return Err(Error::InvalidStructure("arborescences need a directed graph".into()));
    }
    if root >= graph.num_nodes() {
        return Err(Error::InvalidStructure(format!("root {root} out of range")));
    }
    check_len(graph, u)?;
    if graph.num_nodes() == 1 {
        return Ok(RelaxedPoint::exact(vec![0.0; graph.num_edges()]));
    }
    let z = scaled_utilities(u, t, opts.clip_range)?;
    let arcs: Vec<Arc> = graph
        .edges()
        .iter()
        .zip(&z)
        .enumerate()
        .map(|(e, (&(a, b), &w))| Arc { from: a, to: b, logw: w, edge: e })
        .collect();
    solve(graph, root, &z, &arcs, true, opts)
}

fn check_len(graph: &Graph, u: &[f64]) -> Result<()> {
    if u.len() != graph.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_edges(),
            got: u.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    from: usize,
    to: usize,
    logw: f64,
    edge: usize,
}

fn undirected_arcs(graph: &Graph, z: &[f64]) -> Vec<Arc> {
    graph
        .edges()
        .iter()
        .zip(z)
        .enumerate()
        .flat_map(|(e, (&(a, b), &w))| {
            [
                Arc { from: a, to: b, logw: w, edge: e },
                Arc { from: b, to: a, logw: w, edge: e },
            ]
        })
        .collect()
}

fn solve(
    graph: &Graph,
    deleted: usize,
    z: &[f64],
    arcs: &[Arc],
    directed: bool,
    opts: &MatrixTreeOptions,
) -> Result<RelaxedPoint> {
    let n = graph.num_nodes();
    // reduced index of each node; the deleted node maps to None
    let index: Vec<Option<usize>> = (0..n)
        .map(|v| match v.cmp(&deleted) {
            std::cmp::Ordering::Less => Some(v),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(v - 1),
        })
        .collect();

    let mut lap = DMatrix::<f64>::zeros(n - 1, n - 1);
    for arc in arcs {
        let w = arc.logw.exp();
        if let Some(h) = index[arc.to] {
            lap[(h, h)] += w;
            if let Some(tl) = index[arc.from] {
                lap[(tl, h)] -= w;
            }
        }
    }

    let condition = inverse_with_condition(&lap);
    if let Some((inv, cond)) = &condition {
        if *cond <= opts.condition_limit {
            let a = |r: Option<usize>, c: Option<usize>| match (r, c) {
                (Some(r), Some(c)) => inv[(r, c)],
                _ => 0.0,
            };
            let x: Vec<f64> = graph
                .edges()
                .iter()
                .zip(z)
                .map(|(&(i, j), &zv)| {
                    let (ii, jj) = (index[i], index[j]);
                    let g = if directed {
                        a(jj, jj) - a(jj, ii)
                    } else {
                        a(ii, ii) + a(jj, jj) - a(ii, jj) - a(jj, ii)
                    };
                    (zv.exp() * g).clamp(0.0, 1.0)
                })
                .collect();
            if x.iter().all(|v| v.is_finite()) {
                return Ok(RelaxedPoint {
                    x,
                    dual: None,
                    residual: 0.0,
                    condition_estimate: Some(*cond),
                });
            }
        }
    }

    let x = log_domain_marginals(n, deleted, arcs, graph.num_edges(), directed)?;
    Ok(RelaxedPoint {
        x,
        dual: None,
        residual: 0.0,
        condition_estimate: Some(condition.map_or(f64::INFINITY, |(_, c)| c)),
    })
}

/// Inverse via partially pivoted LU, with the 1-norm condition number.
fn inverse_with_condition(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let inv = m.clone().lu().try_inverse()?;
    let cond = norm_1(m) * norm_1(&inv);
    cond.is_finite().then_some((inv, cond))
}

fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

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

/// `log det` of the reduced Laplacian by eliminating every node except
/// `root` in the log domain. Each pivot is the total entering weight of the
/// node in the current (Schur-complemented) graph, and eliminating node `i`
/// adds `w_ai w_ib / d_i` to the weight of `a -> b`, so no subtraction
/// occurs. Returns `-inf` when no arborescence exists.
fn log_partition(n: usize, root: usize, arcs: impl Iterator<Item = (usize, usize, f64)>) -> f64 {
    let neg = f64::NEG_INFINITY;
    let mut lw = vec![vec![neg; n]; n];
    for (a, b, l) in arcs {
        if a != b {
            lw[a][b] = log_add(lw[a][b], l);
        }
    }
    let mut alive = vec![true; n];
    let mut total = 0.0;
    for i in (0..n).filter(|&i| i != root) {
        let pivot = (0..n)
            .filter(|&a| alive[a] && a != i)
            .fold(neg, |acc, a| log_add(acc, lw[a][i]));
        if pivot == neg {
            return neg;
        }
        total += pivot;
        alive[i] = false;
        for a in (0..n).filter(|&a| alive[a]) {
            let into = lw[a][i];
            if into == neg {
                continue;
            }
            for b in (0..n).filter(|&b| alive[b] && b != root && b != a) {
                let out = lw[i][b];
                if out != neg {
                    lw[a][b] = log_add(lw[a][b], into + out - pivot);
                }
            }
        }
    }
    total
}

fn log_domain_marginals(
    n: usize,
    root: usize,
    arcs: &[Arc],
    num_edges: usize,
    directed: bool,
) -> Result<Vec<f64>> {
    let log_z = log_partition(n, root, arcs.iter().map(|a| (a.from, a.to, a.logw)));
    if log_z == f64::NEG_INFINITY {
        return Err(Error::Numerical(
            "reduced Laplacian is singular: no spanning structure".into(),
        ));
    }
    let mut x = vec![0.0; num_edges];
    for e in 0..num_edges {
        let Some(arc) = arcs.iter().find(|a| a.edge == e) else { continue };
        let (i, j) = (arc.from, arc.to);
        if directed && j == root {
            continue;
        }
        let log_zc = log_partition_contracted(n, root, i, j, arcs, directed);
        let through = (arc.logw + log_zc - log_z).exp();
        x[e] = if through <= 0.5 {
            through
        } else {
            let deleted = arcs
                .iter()
                .filter(|a| a.edge != e)
                .map(|a| (a.from, a.to, a.logw));
            1.0 - (log_partition(n, root, deleted) - log_z).exp()
        };
        x[e] = x[e].clamp(0.0, 1.0);
    }
    Ok(x)
}

/// Log partition of the graph with edge `i -> j` contracted: `j` is merged
/// into `i` and removed from the node set, arcs that become loops are dropped,
/// and for arborescences every arc entering `j` is dropped first.
fn log_partition_contracted(
    n: usize,
    root: usize,
    i: usize,
    j: usize,
    arcs: &[Arc],
    directed: bool,
) -> f64 {
    let remap = |v: usize| {
        let v = if v == j { i } else { v };
        if v > j {
            v - 1
        } else {
            v
        }
    };
    let merged = arcs
        .iter()
        .filter(|a| !(directed && a.to == j))
        .map(|a| (remap(a.from), remap(a.to), a.logw))
        .filter(|&(a, b, _)| a != b);
    log_partition(n - 1, remap(root), merged)
}

/// Log-partition function `log sum_T exp(u^T x_T / t)` over spanning trees
/// (`root = None`) or over arborescences rooted at `root`.
pub fn matrix_tree_log_partition(graph: &Graph, root: Option<usize>, u: &[f64], t: f64) -> Result<f64> {
    check_len(graph, u)?;
    let z: Vec<f64> = u.iter().map(|&v| v / t).collect();
    let (arcs, root) = match root {
        None => (undirected_arcs(graph, &z), 0),
        Some(r) => (
            graph
                .edges()
                .iter()
                .zip(&z)
                .enumerate()
                .map(|(e, (&(a, b), &w))| Arc { from: a, to: b, logw: w, edge: e })
                .collect(),
            r,
        ),
    };
    Ok(log_partition(
        graph.num_nodes(),
        root,
        arcs.iter().map(|a| (a.from, a.to, a.logw)),
    ))
}

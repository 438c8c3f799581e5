//! Maximum r-arborescence by cycle contraction, and the categorical process
//! that has the same output law when utilities are negative exponentials.
//!
//! Both run the same recursion. At every level each non-root node chooses one
//! entering edge and rewrites the weights of its entering edges; if the
//! chosen edges contain a directed cycle, the cycle is contracted into a
//! supernode and the procedure recurses on the smaller graph. On the way
//! back the cycle is expanded, keeping every cycle edge except the one that
//! enters the node where the supernode's chosen edge lands.
//!
//! The only difference between the two is the [`EntryRule`]:
//! the solver picks the maximum reduced utility and subtracts it, while the
//! sampler draws an edge with probability proportional to its rate and sets
//! the chosen rate to infinity.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng;
use crate::structures::{Graph, Vertex};

/// How a node picks its entering edge at one level of the recursion.
pub(crate) trait EntryRule {
    /// `entering` lists positions (ascending) in `weights` of the edges that
    /// enter one node. Returns the chosen position and updates the weights
    /// of the entering edges in place.
    fn choose(&mut self, entering: &[usize], weights: &mut [f64]) -> usize;
}

/// Greedy maximum with reduced utilities `U_e - max U`.
#[derive(Default)]
pub(crate) struct MaxReduced {
    pub tie: bool,
}

impl EntryRule for MaxReduced {
    fn choose(&mut self, entering: &[usize], weights: &mut [f64]) -> usize {
        let mut best = entering[0];
        for &e in &entering[1..] {
            if weights[e] > weights[best] {
                best = e;
            } else if weights[e] == weights[best] {
                self.tie = true;
            }
        }
        let top = weights[best];
        for &e in entering {
            weights[e] -= top;
        }
        // exact zero for the chosen edge even when top is huge
        weights[best] = 0.0;
        best
    }
}

/// Categorical draw proportional to rates; the chosen rate becomes infinite.
pub(crate) struct RateSampler<'a, R: RngCore + ?Sized> {
    pub rng: &'a mut R,
}

impl<R: RngCore + ?Sized> EntryRule for RateSampler<'_, R> {
    fn choose(&mut self, entering: &[usize], weights: &mut [f64]) -> usize {
        let infinite: Vec<usize> = entering
            .iter()
            .copied()
            .filter(|&e| weights[e] == f64::INFINITY)
            .collect();
        let chosen = if !infinite.is_empty() {
            // uniform over the infinite-rate entries
            let slot = (rng::open_unit(self.rng) * infinite.len() as f64) as usize;
            infinite[slot.min(infinite.len() - 1)]
        } else {
            let rates: Vec<f64> = entering.iter().map(|&e| weights[e]).collect();
            entering[sample_proportional(&rates, self.rng)]
        };
        weights[chosen] = f64::INFINITY;
        chosen
    }
}

/// Index drawn with probability proportional to the finite positive `weights`.
pub(crate) fn sample_proportional<R: RngCore + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng::open_unit(rng) * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    // rounding left target at the very top; return the last positive weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Runs the contraction recursion. Returns the selected edges as positions
/// into `edges`.
pub(crate) fn contract_and_solve<R: EntryRule>(
    num_nodes: usize,
    root: usize,
    edges: &[(usize, usize)],
    mut weights: Vec<f64>,
    rule: &mut R,
) -> Result<Vec<usize>> {
    let mut entering: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for (pos, &(tail, head)) in edges.iter().enumerate() {
        if head != root && tail != head {
            entering[head].push(pos);
        }
    }

    let mut chosen = vec![usize::MAX; num_nodes];
    for v in (0..num_nodes).filter(|&v| v != root) {
        if entering[v].is_empty() {
            return Err(Error::Infeasible(format!(
                "node {v} has no entering edge; no arborescence exists"
            )));
        }
        chosen[v] = rule.choose(&entering[v], &mut weights);
    }

    let Some(cycle) = find_cycle(num_nodes, root, edges, &chosen) else {
        return Ok((0..num_nodes).filter(|&v| v != root).map(|v| chosen[v]).collect());
    };

    // contract: cycle nodes collapse onto one supernode id
    let mut in_cycle = vec![false; num_nodes];
    for &v in &cycle {
        in_cycle[v] = true;
    }
    let mut new_id = vec![usize::MAX; num_nodes];
    let mut next = 0;
    for v in 0..num_nodes {
        if !in_cycle[v] {
            new_id[v] = next;
            next += 1;
        }
    }
    let supernode = next;
    for &v in &cycle {
        new_id[v] = supernode;
    }

    let mut sub_edges = Vec::new();
    let mut sub_weights = Vec::new();
    let mut origin = Vec::new();
    for (pos, &(tail, head)) in edges.iter().enumerate() {
        if in_cycle[tail] && in_cycle[head] {
            continue;
        }
        if head == root {
            continue;
        }
        sub_edges.push((new_id[tail], new_id[head]));
        sub_weights.push(weights[pos]);
        origin.push(pos);
    }

    let sub = contract_and_solve(supernode + 1, new_id[root], &sub_edges, sub_weights, rule)?;

    let mut selected: Vec<usize> = sub.iter().map(|&p| origin[p]).collect();
    let entry = selected
        .iter()
        .copied()
        .find(|&p| in_cycle[edges[p].1])
        .expect("arborescence of the contracted graph enters the supernode");
    let broken = edges[entry].1;
    selected.extend(cycle.iter().filter(|&&v| v != broken).map(|&v| chosen[v]));
    Ok(selected)
}

/// First directed cycle among the chosen parent edges, scanning start nodes
/// in index order.
fn find_cycle(
    num_nodes: usize,
    root: usize,
    edges: &[(usize, usize)],
    chosen: &[usize],
) -> Option<Vec<usize>> {
    // 0 unvisited, 1 on current walk, 2 done
    let mut state = vec![0u8; num_nodes];
    state[root] = 2;
    for start in 0..num_nodes {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            v = edges[chosen[v]].0;
        }
        if state[v] == 1 {
            let at = walk.iter().position(|&w| w == v).expect("v is on the walk");
            return Some(walk[at..].to_vec());
        }
        for w in walk {
            state[w] = 2;
        }
    }
    None
}

fn check_inputs(graph: &Graph, root: usize, values: &[f64]) -> Result<()> {
    if !graph.is_directed() {
        return Err(Error::InvalidStructure("arborescences need a directed graph".into()));
    }
    if root >= graph.num_nodes() {
        return Err(Error::InvalidStructure(format!("root {root} out of range")));
    }
    if values.len() != graph.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_edges(),
            got: values.len(),
        });
    }
    Ok(())
}

fn to_vertex(m: usize, selected: &[usize]) -> Vertex {
    let mut bits = vec![0u8; m];
    for &e in selected {
        bits[e] = 1;
    }
    Vertex::new(bits)
}

/// Edge indicator of a maximum-utility arborescence rooted at `root`.
pub fn cle_max_arborescence(graph: &Graph, root: usize, u: &[f64]) -> Result<Vertex> {
    cle_with_ties(graph, root, u).map(|(v, _)| v)
}

pub(crate) fn cle_with_ties(graph: &Graph, root: usize, u: &[f64]) -> Result<(Vertex, bool)> {
    check_inputs(graph, root, u)?;
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("utilities must be finite".into()));
    }
    let mut rule = MaxReduced::default();
    let sel = contract_and_solve(graph.num_nodes(), root, graph.edges(), u.to_vec(), &mut rule)?;
    Ok((to_vertex(graph.num_edges(), &sel), rule.tie))
}

/// Random arborescence from the categorical process driven by edge rates.
///
/// Rates must be positive; `f64::INFINITY` is allowed and such edges are
/// preferred uniformly at random over all finite-rate edges.
pub fn sample_arborescence_categorical<R: RngCore + ?Sized>(
    graph: &Graph,
    root: usize,
    rates: &[f64],
    rng: &mut R,
) -> Result<Vertex> {
    check_inputs(graph, root, rates)?;
    if rates.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidArgument("rates must be positive or infinite".into()));
    }
    let mut rule = RateSampler { rng };
    let sel = contract_and_solve(graph.num_nodes(), root, graph.edges(), rates.to_vec(), &mut rule)?;
    Ok(to_vertex(graph.num_edges(), &sel))
}

//! Combinatorial structures, their binary embeddings and brute-force
//! enumeration.
//!
//! Every structure is embedded as a set of binary vectors. For graph
//! structures the coordinate order is the order of the input edge list, so
//! utility vectors, vertices and marginals all share one indexing. The
//! correlated k-subset embedding puts the `n` unary indicators first and the
//! adjacent-pair indicator for `(i, i + 1)` at coordinate `n + i`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

/// Default guard on the number of vertices an enumeration may produce.
pub const DEFAULT_ENUM_LIMIT: usize = 10_000;

/// A simple graph with an ordered edge list.
///
/// Undirected edges are normalized to `(min, max)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr")]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    directed: bool,
}

#[derive(Deserialize)]
struct GraphRepr {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    directed: bool,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.num_nodes, r.edges, r.directed)
    }
}

impl Graph {
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize)>, directed: bool) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidStructure("graph has no nodes".into()));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidStructure(format!(
                    "edge ({a}, {b}) out of range for {num_nodes} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidStructure(format!("self-loop at node {a}")));
            }
            normalized.push(if directed { (a, b) } else { (a.min(b), a.max(b)) });
        }
        Ok(Graph {
            num_nodes,
            edges: normalized,
            directed,
        })
    }

    pub fn undirected(num_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Graph::new(num_nodes, edges, false)
    }

    pub fn directed(num_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Graph::new(num_nodes, edges, true)
    }

    /// Complete undirected graph, edges in lexicographic `(i, j)`, `i < j` order.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::undirected(n, edges).expect("complete graph is well formed")
    }

    /// Complete digraph, edges in lexicographic `(tail, head)` order.
    pub fn complete_directed(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        Graph::directed(n, edges).expect("complete digraph is well formed")
    }

    /// Undirected path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Graph::undirected(n, edges).expect("path graph is well formed")
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_connected(&self) -> bool {
        let mut sets = DisjointSets::new(self.num_nodes);
        for &(a, b) in &self.edges {
            sets.union(a, b);
        }
        sets.set_size(0) == self.num_nodes
    }

    /// Nodes reachable from `root` along directed edges.
    pub fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let next = if a == v {
                    Some(b)
                } else if !self.directed && b == v {
                    Some(a)
                } else {
                    None
                };
                if let Some(w) = next {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen
    }

    /// True iff the selected edges form a spanning tree of the (undirected) graph.
    pub fn is_spanning_tree(&self, selected: &[bool]) -> bool {
        let count = selected.iter().filter(|&&s| s).count();
        if count + 1 != self.num_nodes {
            return false;
        }
        let mut sets = DisjointSets::new(self.num_nodes);
        self.edges
            .iter()
            .zip(selected)
            .filter(|(_, &s)| s)
            .all(|(&(a, b), _)| sets.union(a, b))
    }

    /// True iff the selected edges form an arborescence rooted at `root`.
    pub fn is_arborescence(&self, root: usize, selected: &[bool]) -> bool {
        let mut parent = vec![usize::MAX; self.num_nodes];
        for (&(tail, head), _) in self.edges.iter().zip(selected).filter(|(_, &s)| s) {
            if head == root || parent[head] != usize::MAX {
                return false;
            }
            parent[head] = tail;
        }
        // every non-root node has exactly one parent; now require reachability
        // from the root, i.e. walking parents never cycles
        let mut state = vec![0u8; self.num_nodes]; // 0 unknown, 1 visiting, 2 reaches root
        state[root] = 2;
        for start in 0..self.num_nodes {
            let mut trail = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                if parent[v] == usize::MAX {
                    return false;
                }
                state[v] = 1;
                trail.push(v);
                v = parent[v];
            }
            if state[v] == 1 {
                return false;
            }
            for w in trail {
                state[w] = 2;
            }
        }
        true
    }
}

/// Which combinatorial family a [`StructureSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    OneHot,
    Subsets,
    KSubsets,
    CorrKSubsets,
    Matching,
    SpanningTree,
    Arborescence,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StructureKind::OneHot => "one_hot",
            StructureKind::Subsets => "subsets",
            StructureKind::KSubsets => "k_subsets",
            StructureKind::CorrKSubsets => "corr_k_subsets",
            StructureKind::Matching => "matching",
            StructureKind::SpanningTree => "spanning_tree",
            StructureKind::Arborescence => "arborescence",
        };
        f.write_str(name)
    }
}

/// Descriptor of a finite set of binary embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "SpecRepr")]
pub enum StructureSpec {
    OneHot { n: usize },
    Subsets { n: usize },
    KSubsets { n: usize, k: usize },
    CorrKSubsets { n: usize, k: usize },
    Matching { n: usize },
    SpanningTree { graph: Graph },
    Arborescence { graph: Graph, root: usize },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SpecRepr {
    OneHot { n: usize },
    Subsets { n: usize },
    KSubsets { n: usize, k: usize },
    CorrKSubsets { n: usize, k: usize },
    Matching { n: usize },
    SpanningTree { graph: Graph },
    Arborescence { graph: Graph, root: usize },
}

impl TryFrom<SpecRepr> for StructureSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = match r {
            SpecRepr::OneHot { n } => StructureSpec::OneHot { n },
            SpecRepr::Subsets { n } => StructureSpec::Subsets { n },
            SpecRepr::KSubsets { n, k } => StructureSpec::KSubsets { n, k },
            SpecRepr::CorrKSubsets { n, k } => StructureSpec::CorrKSubsets { n, k },
            SpecRepr::Matching { n } => StructureSpec::Matching { n },
            SpecRepr::SpanningTree { graph } => StructureSpec::SpanningTree { graph },
            SpecRepr::Arborescence { graph, root } => StructureSpec::Arborescence { graph, root },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl StructureSpec {
    pub fn kind(&self) -> StructureKind {
        match self {
            StructureSpec::OneHot { .. } => StructureKind::OneHot,
            StructureSpec::Subsets { .. } => StructureKind::Subsets,
            StructureSpec::KSubsets { .. } => StructureKind::KSubsets,
            StructureSpec::CorrKSubsets { .. } => StructureKind::CorrKSubsets,
            StructureSpec::Matching { .. } => StructureKind::Matching,
            StructureSpec::SpanningTree { .. } => StructureKind::SpanningTree,
            StructureSpec::Arborescence { .. } => StructureKind::Arborescence,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidStructure(msg));
        match self {
            StructureSpec::OneHot { n } | StructureSpec::Subsets { n } | StructureSpec::Matching { n } => {
                if *n == 0 {
                    return fail(format!("{} requires n >= 1", self.kind()));
                }
            }
            StructureSpec::KSubsets { n, k } | StructureSpec::CorrKSubsets { n, k } => {
                if *k == 0 || k >= n {
                    return fail(format!("{} requires 1 <= k < n (n={n}, k={k})", self.kind()));
                }
            }
            StructureSpec::SpanningTree { graph } => {
                if graph.is_directed() {
                    return fail("spanning trees need an undirected graph".into());
                }
                if !graph.is_connected() {
                    return fail("graph is disconnected".into());
                }
            }
            StructureSpec::Arborescence { graph, root } => {
                if !graph.is_directed() {
                    return fail("arborescences need a directed graph".into());
                }
                if *root >= graph.num_nodes() {
                    return fail(format!("root {root} out of range"));
                }
                if graph.reachable_from(*root).iter().any(|&r| !r) {
                    return fail(format!("no arborescence rooted at {root}"));
                }
            }
        }
        Ok(())
    }

    /// Ambient dimension of the embedding.
    pub fn embedding_dim(&self) -> usize {
        match self {
            StructureSpec::OneHot { n } | StructureSpec::Subsets { n } => *n,
            StructureSpec::KSubsets { n, .. } => *n,
            StructureSpec::CorrKSubsets { n, .. } => 2 * n - 1,
            StructureSpec::Matching { n } => n * n,
            StructureSpec::SpanningTree { graph } | StructureSpec::Arborescence { graph, .. } => {
                graph.num_edges()
            }
        }
    }

    pub fn check_dim(&self, got: usize) -> Result<()> {
        let expected = self.embedding_dim();
        if expected != got {
            return Err(Error::DimensionMismatch { expected, got });
        }
        Ok(())
    }

    /// True iff `x` is the embedding of some element of the structure.
    pub fn is_vertex(&self, x: &[u8]) -> Result<bool> {
        self.validate()?;
        self.check_dim(x.len())?;
        if x.iter().any(|&b| b > 1) {
            return Ok(false);
        }
        let ones = |s: &[u8]| s.iter().filter(|&&b| b == 1).count();
        let ok = match self {
            StructureSpec::OneHot { .. } => ones(x) == 1,
            StructureSpec::Subsets { .. } => true,
            StructureSpec::KSubsets { k, .. } => ones(x) == *k,
            StructureSpec::CorrKSubsets { n, k } => {
                ones(&x[..*n]) == *k && (0..n - 1).all(|i| x[n + i] == x[i] * x[i + 1])
            }
            StructureSpec::Matching { n } => {
                let rows = (0..*n).all(|i| ones(&x[i * n..(i + 1) * n]) == 1);
                let cols = (0..*n).all(|j| (0..*n).filter(|&i| x[i * n + j] == 1).count() == 1);
                rows && cols
            }
            StructureSpec::SpanningTree { graph } => {
                let sel: Vec<bool> = x.iter().map(|&b| b == 1).collect();
                graph.is_spanning_tree(&sel)
            }
            StructureSpec::Arborescence { graph, root } => {
                let sel: Vec<bool> = x.iter().map(|&b| b == 1).collect();
                graph.is_arborescence(*root, &sel)
            }
        };
        Ok(ok)
    }

    /// Every vertex exactly once, in decreasing lexicographic order of the
    /// bit vectors (so the one-hot basis comes out as `e_0, e_1, ...`).
    pub fn enumerate_vertices(&self, limit: usize) -> Result<Vec<Vertex>> {
        self.validate()?;
        let mut out: Vec<Vec<u8>> = match self {
            StructureSpec::OneHot { n } => {
                guard(*n as f64, limit)?;
                (0..*n).map(|i| unit(*n, i)).collect()
            }
            StructureSpec::Subsets { n } => {
                guard(2f64.powi(*n as i32), limit)?;
                (0..1u64 << n)
                    .map(|mask| (0..*n).map(|i| ((mask >> i) & 1) as u8).collect())
                    .collect()
            }
            StructureSpec::KSubsets { n, k } => {
                guard(binomial(*n, *k), limit)?;
                combinations(*n, *k)
                    .into_iter()
                    .map(|c| indicator(*n, &c))
                    .collect()
            }
            StructureSpec::CorrKSubsets { n, k } => {
                guard(binomial(*n, *k), limit)?;
                combinations(*n, *k)
                    .into_iter()
                    .map(|c| {
                        let mut x = indicator(*n, &c);
                        for i in 0..n - 1 {
                            x.push(x[i] * x[i + 1]);
                        }
                        x
                    })
                    .collect()
            }
            StructureSpec::Matching { n } => {
                guard((1..=*n).map(|i| i as f64).product(), limit)?;
                permutations(*n)
                    .into_iter()
                    .map(|p| {
                        let mut x = vec![0u8; n * n];
                        for (i, &j) in p.iter().enumerate() {
                            x[i * n + j] = 1;
                        }
                        x
                    })
                    .collect()
            }
            StructureSpec::SpanningTree { graph } => spanning_trees(graph, limit)?,
            StructureSpec::Arborescence { graph, root } => arborescences(graph, *root, limit)?,
        };
        out.sort_unstable_by(|a, b| b.cmp(a));
        Ok(out.into_iter().map(Vertex::new).collect())
    }
}

/// A binary embedding vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex {
    pub bits: Vec<u8>,
}

impl Vertex {
    pub fn new(bits: Vec<u8>) -> Self {
        Vertex { bits }
    }

    pub fn from_selected(selected: &[bool]) -> Self {
        Vertex::new(selected.iter().map(|&s| s as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn dot(&self, u: &[f64]) -> f64 {
        self.bits
            .iter()
            .zip(u)
            .filter(|(&b, _)| b == 1)
            .map(|(_, &v)| v)
            .sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64).collect()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

fn guard(count: f64, limit: usize) -> Result<()> {
    if count > limit as f64 {
        return Err(Error::LimitExceeded { limit });
    }
    Ok(())
}

fn unit(n: usize, i: usize) -> Vec<u8> {
    let mut x = vec![0u8; n];
    x[i] = 1;
    x
}

fn indicator(n: usize, picked: &[usize]) -> Vec<u8> {
    let mut x = vec![0u8; n];
    for &i in picked {
        x[i] = 1;
    }
    x
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All `k`-element index subsets of `0..n`, each sorted ascending.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All permutations of `0..n` (row `i` maps to column `p[i]`).
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn spanning_trees(graph: &Graph, limit: usize) -> Result<Vec<Vec<u8>>> {
    let need = graph.num_nodes() - 1;
    let m = graph.num_edges();
    let mut out = Vec::new();
    let mut chosen = vec![0u8; m];

    // include/exclude search over edges in index order, pruning cycles
    #[allow(clippy::too_many_arguments)]
    fn rec(
        graph: &Graph,
        idx: usize,
        picked: usize,
        need: usize,
        sets: &DisjointSets,
        chosen: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
        limit: usize,
    ) -> Result<()> {
        if picked == need {
            if out.len() == limit {
                return Err(Error::LimitExceeded { limit });
            }
            out.push(chosen.clone());
            return Ok(());
        }
        let m = graph.num_edges();
        if idx == m || m - idx < need - picked {
            return Ok(());
        }
        let (a, b) = graph.edges()[idx];
        let mut with = sets.clone();
        if with.union(a, b) {
            chosen[idx] = 1;
            rec(graph, idx + 1, picked + 1, need, &with, chosen, out, limit)?;
            chosen[idx] = 0;
        }
        rec(graph, idx + 1, picked, need, sets, chosen, out, limit)
    }

    let sets = DisjointSets::new(graph.num_nodes());
    rec(graph, 0, 0, need, &sets, &mut chosen, &mut out, limit)?;
    Ok(out)
}

/// Cap on the number of parent assignments inspected while enumerating
/// arborescences, independent of how many turn out valid.
const ARBORESCENCE_CANDIDATE_CAP: f64 = 1e7;

fn arborescences(graph: &Graph, root: usize, limit: usize) -> Result<Vec<Vec<u8>>> {
    let n = graph.num_nodes();
    let mut entering: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(_, head)) in graph.edges().iter().enumerate() {
        if head != root {
            entering[head].push(e);
        }
    }
    let candidates: f64 = (0..n)
        .filter(|&v| v != root)
        .map(|v| entering[v].len() as f64)
        .product();
    if candidates > ARBORESCENCE_CANDIDATE_CAP {
        return Err(Error::LimitExceeded { limit });
    }
    let nodes: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; nodes.len()];
    let m = graph.num_edges();
    loop {
        let mut sel = vec![false; m];
        for (slot, &v) in nodes.iter().enumerate() {
            sel[entering[v][pick[slot]]] = true;
        }
        if graph.is_arborescence(root, &sel) {
            if out.len() == limit {
                return Err(Error::LimitExceeded { limit });
            }
            out.push(sel.iter().map(|&s| s as u8).collect());
        }
        // odometer increment
        let mut slot = 0;
        loop {
            if slot == nodes.len() {
                return Ok(out);
            }
            pick[slot] += 1;
            if pick[slot] < entering[nodes[slot]].len() {
                break;
            }
            pick[slot] = 0;
            slot += 1;
        }
    }
}

//! Regularized relaxations `X_t = argmax_{x in hull(X)} u^T x - t f(x)`.
//!
//! Supported (structure, regularizer) pairs:
//!
//! | structure        | shannon | euclidean | binary_entropy | categorical_entropy | exp_family |
//! |------------------|---------|-----------|----------------|---------------------|------------|
//! | one_hot          | yes     | yes       | yes            | yes                 | yes        |
//! | subsets          |         | yes       | yes            | yes                 | yes        |
//! | k_subsets        |         | yes       | yes            | yes                 | yes        |
//! | corr_k_subsets   |         |           |                |                     | yes        |
//! | matching         | yes     |           |                |                     | n <= 6     |
//! | spanning_tree    |         |           |                |                     | yes        |
//! | arborescence     |         |           |                |                     | yes        |
//!
//! One-hot vectors are treated as the `k = 1` capped simplex by the
//! bisection-based regularizers. Any other pair is rejected with
//! [`Error::Unsupported`].

mod bisection;
mod expfam;
mod matrix_tree;
mod simplex;
mod sinkhorn;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::StructureSpec;

pub use bisection::{binary_entropy_relax, categorical_entropy_relax};
pub use expfam::expfam_marginals;
pub use matrix_tree::{
    directed_matrix_tree_marginals, matrix_tree_log_partition, matrix_tree_marginals, MatrixTreeOptions,
};
pub use simplex::{euclidean_project, softmax_simplex};
pub use sinkhorn::sinkhorn_relax;

/// Default convergence tolerance for bisection and Sinkhorn.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration cap for bisection solvers.
pub const DEFAULT_BISECTION_ITERS: usize = 200;
/// Default iteration cap for Sinkhorn.
pub const DEFAULT_SINKHORN_ITERS: usize = 1000;
/// Range used by [`RelaxationSpec::with_default_clip`].
pub const DEFAULT_CLIP_RANGE: f64 = 15.0;
/// Largest matching side for exact exponential-family marginals.
pub const MAX_EXACT_MATCHING: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// `sum x log x` on the simplex or the Birkhoff polytope.
    Shannon,
    /// `||x||^2 / 2`.
    Euclidean,
    /// `sum x log x + (1 - x) log(1 - x)`.
    BinaryEntropy,
    /// `sum x log x` on the box or capped simplex.
    CategoricalEntropy,
    /// Conjugate of the log-partition function; gives Gibbs marginals.
    #[serde(alias = "expfam")]
    ExpFamilyEntropy,
}

impl std::str::FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shannon" => Ok(Regularizer::Shannon),
            "euclidean" => Ok(Regularizer::Euclidean),
            "binary_entropy" | "binary-entropy" => Ok(Regularizer::BinaryEntropy),
            "categorical_entropy" | "categorical-entropy" => Ok(Regularizer::CategoricalEntropy),
            "expfam" | "exp_family_entropy" | "exp-family" => Ok(Regularizer::ExpFamilyEntropy),
            other => Err(Error::InvalidArgument(format!("unknown regularizer {other:?}"))),
        }
    }
}

/// Regularizer, temperature and solver controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSpec {
    pub regularizer: Regularizer,
    pub temperature: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Iteration cap; `None` uses the solver default.
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// Caps the range of `u / t` before matrix-tree computations.
    #[serde(default)]
    pub clip_range: Option<f64>,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl RelaxationSpec {
    pub fn new(regularizer: Regularizer, temperature: f64) -> Self {
        RelaxationSpec {
            regularizer,
            temperature,
            tol: DEFAULT_TOL,
            max_iter: None,
            clip_range: None,
        }
    }

    pub fn with_default_clip(mut self) -> Self {
        self.clip_range = Some(DEFAULT_CLIP_RANGE);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if matches!(self.max_iter, Some(0)) {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if let Some(c) = self.clip_range {
            if !(c > 0.0) {
                return Err(Error::InvalidArgument(format!("clip_range must be positive, got {c}")));
            }
        }
        Ok(())
    }

    fn bisection_iters(&self) -> usize {
        self.max_iter.unwrap_or(DEFAULT_BISECTION_ITERS)
    }

    fn sinkhorn_iters(&self) -> usize {
        self.max_iter.unwrap_or(DEFAULT_SINKHORN_ITERS)
    }
}

/// Solution of a relaxed program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxedPoint {
    pub x: Vec<f64>,
    /// Dual variables: the bisection shift, or Sinkhorn row then column
    /// log-scalings.
    pub dual: Option<Vec<f64>>,
    /// Final constraint residual reported by iterative solvers.
    pub residual: f64,
    /// 1-norm condition estimate of the reduced Laplacian (matrix-tree only).
    pub condition_estimate: Option<f64>,
}

impl RelaxedPoint {
    pub(crate) fn exact(x: Vec<f64>) -> Self {
        RelaxedPoint {
            x,
            dual: None,
            residual: 0.0,
            condition_estimate: None,
        }
    }
}

/// True if `relax` accepts the pair.
pub fn is_supported(spec: &StructureSpec, regularizer: Regularizer) -> bool {
    use Regularizer::*;
    use StructureSpec as S;
    match (spec, regularizer) {
        (_, ExpFamilyEntropy) => match spec {
            S::Matching { n } => *n <= MAX_EXACT_MATCHING,
            _ => true,
        },
        (S::OneHot { .. }, _) => true,
        (S::Subsets { .. } | S::KSubsets { .. }, Euclidean | BinaryEntropy | CategoricalEntropy) => true,
        (S::Matching { .. }, Shannon) => true,
        _ => false,
    }
}

/// Solves the relaxed program for any supported pair.
pub fn relax(spec: &StructureSpec, rspec: &RelaxationSpec, u: &[f64]) -> Result<RelaxedPoint> {
    spec.validate()?;
    rspec.validate()?;
    spec.check_dim(u.len())?;
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("utilities must be finite".into()));
    }
    if !is_supported(spec, rspec.regularizer) {
        return Err(Error::Unsupported(format!(
            "regularizer {:?} is not available for {}",
            rspec.regularizer,
            spec.kind()
        )));
    }
    let t = rspec.temperature;
    match (spec, rspec.regularizer) {
        (StructureSpec::OneHot { .. }, Regularizer::Shannon | Regularizer::ExpFamilyEntropy) => {
            Ok(softmax_simplex(u, t))
        }
        (StructureSpec::Matching { n }, Regularizer::Shannon) => {
            sinkhorn_relax(*n, u, t, rspec.tol, rspec.sinkhorn_iters())
        }
        (_, Regularizer::Euclidean) => euclidean_project(spec, u, t, rspec.tol, rspec.bisection_iters()),
        (_, Regularizer::BinaryEntropy) => {
            binary_entropy_relax(spec, u, t, rspec.tol, rspec.bisection_iters())
        }
        (_, Regularizer::CategoricalEntropy) => {
            categorical_entropy_relax(spec, u, t, rspec.tol, rspec.bisection_iters())
        }
        (_, Regularizer::ExpFamilyEntropy) => {
            let opts = MatrixTreeOptions {
                clip_range: rspec.clip_range,
                ..MatrixTreeOptions::default()
            };
            expfam::expfam_marginals_with(spec, u, t, &opts)
        }
        _ => unreachable!("support checked above"),
    }
}

/// Largest violation of the linear constraints describing `hull(X)`,
/// including the `[0, 1]` box.
pub fn constraint_violation(spec: &StructureSpec, x: &[f64]) -> f64 {
    let mut worst = x
        .iter()
        .map(|&v| (-v).max(v - 1.0).max(0.0))
        .fold(0.0, f64::max);
    let mut eq = |lhs: f64, rhs: f64| worst = worst.max((lhs - rhs).abs());
    match spec {
        StructureSpec::OneHot { .. } => eq(x.iter().sum(), 1.0),
        StructureSpec::Subsets { .. } => {}
        StructureSpec::KSubsets { k, .. } => eq(x.iter().sum(), *k as f64),
        StructureSpec::CorrKSubsets { n, k } => {
            eq(x[..*n].iter().sum(), *k as f64);
            for i in 0..n - 1 {
                let pair = x[n + i];
                worst = worst
                    .max(pair - x[i].min(x[i + 1]))
                    .max(x[i] + x[i + 1] - 1.0 - pair);
            }
        }
        StructureSpec::Matching { n } => {
            for i in 0..*n {
                eq(x[i * n..(i + 1) * n].iter().sum(), 1.0);
                eq((0..*n).map(|r| x[r * n + i]).sum(), 1.0);
            }
        }
        StructureSpec::SpanningTree { graph } => eq(x.iter().sum(), (graph.num_nodes() - 1) as f64),
        StructureSpec::Arborescence { graph, root } => {
            let mut indeg = vec![0.0; graph.num_nodes()];
            for (&(_, head), &v) in graph.edges().iter().zip(x) {
                indeg[head] += v;
            }
            for (v, &d) in indeg.iter().enumerate() {
                eq(d, if v == *root { 0.0 } else { 1.0 });
            }
        }
    }
    worst
}

//! Jacobians of relaxed solutions with respect to the utilities.
//!
//! Every relaxation `X_t(u)` here is the gradient of a convex function of
//! `u`, so its Jacobian is symmetric and a Jacobian-vector product doubles as
//! a vector-Jacobian product. [`fd_vjp`] exploits this with two solver calls
//! per direction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relax::{relax, Regularizer, RelaxationSpec, RelaxedPoint};
use crate::rng;
use crate::structures::StructureSpec;

/// Dense matrix stored as rows; `j[i][k] = d x_i / d u_k`.
pub type Jacobian = Vec<Vec<f64>>;

/// Upstream gradient `dL/dX_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DirectionVector(Vec<f64>);

impl DirectionVector {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("direction must be finite".into()));
        }
        Ok(DirectionVector(d))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Central finite-difference settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub epsilon: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { epsilon: 1e-4 }
    }
}

impl FdConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(FdConfig { epsilon })
    }
}

fn solve_at(spec: &StructureSpec, rspec: &RelaxationSpec, u: &[f64]) -> Result<RelaxedPoint> {
    relax(spec, rspec, u)
}

/// `(X_t(u + eps d) - X_t(u - eps d)) / (2 eps)`.
pub fn fd_vjp(
    spec: &StructureSpec,
    rspec: &RelaxationSpec,
    u: &[f64],
    d: &DirectionVector,
    fd: FdConfig,
) -> Result<Vec<f64>> {
    spec.check_dim(d.0.len())?;
    let eps = fd.epsilon;
    let shifted = |sign: f64| -> Vec<f64> {
        u.iter().zip(&d.0).map(|(&a, &b)| a + sign * eps * b).collect()
    };
    let (up, down) = (shifted(1.0), shifted(-1.0));
    let (plus, minus) = rayon::join(|| solve_at(spec, rspec, &up), || solve_at(spec, rspec, &down));
    let (plus, minus) = (plus?, minus?);
    Ok(plus
        .x
        .iter()
        .zip(&minus.x)
        .map(|(a, b)| (a - b) / (2.0 * eps))
        .collect())
}

/// Dense central-difference Jacobian, one column per coordinate.
pub fn fd_jacobian(spec: &StructureSpec, rspec: &RelaxationSpec, u: &[f64], fd: FdConfig) -> Result<Jacobian> {
    let m = u.len();
    let mut j = vec![vec![0.0; m]; m];
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let col = fd_vjp(spec, rspec, u, &DirectionVector(e), fd)?;
        for (row, v) in j.iter_mut().zip(col) {
            row[k] = v;
        }
    }
    Ok(j)
}

/// `(diag s - s s^T / sum s) / t`, the Jacobian of `x_i = h((u_i - nu)/t)`
/// under `sum x = k`; `s_i = h'` at the solution.
fn shifted_jacobian(s: &[f64], t: f64, constrained: bool) -> Jacobian {
    let total: f64 = s.iter().sum();
    let n = s.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let mut v = if i == k { s[i] } else { 0.0 };
                    if constrained && total > 0.0 {
                        v -= s[i] * s[k] / total;
                    }
                    v / t
                })
                .collect()
        })
        .collect()
}

/// Closed-form `dX_t / du` for the coordinate-separable relaxations: softmax,
/// and the box and capped-simplex solutions of the Euclidean, binary- and
/// categorical-entropy regularizers (one-hot, subsets, k-subsets).
pub fn analytic_jacobian(spec: &StructureSpec, rspec: &RelaxationSpec, u: &[f64]) -> Result<Jacobian> {
    use Regularizer::*;
    let t = rspec.temperature;
    let constrained = match spec {
        StructureSpec::OneHot { .. } | StructureSpec::KSubsets { .. } => true,
        StructureSpec::Subsets { .. } => false,
        _ => {
            return Err(Error::Unsupported(format!(
                "no closed-form Jacobian for {}; use finite differences",
                spec.kind()
            )))
        }
    };
    let reg = rspec.regularizer;
    if matches!(spec, StructureSpec::KSubsets { .. }) && reg == ExpFamilyEntropy {
        return Err(Error::Unsupported(
            "no closed-form Jacobian for k_subsets with exp_family_entropy; use finite differences".into(),
        ));
    }
    let x = relax(spec, rspec, u)?.x;
    let one_hot = matches!(spec, StructureSpec::OneHot { .. });
    let s: Vec<f64> = x
        .iter()
        .map(|&v| match reg {
            Shannon => v,
            ExpFamilyEntropy if one_hot => v,
            ExpFamilyEntropy | BinaryEntropy => v * (1.0 - v),
            CategoricalEntropy => {
                if v < 1.0 {
                    v
                } else {
                    0.0
                }
            }
            Euclidean => {
                let free = if one_hot { v > 0.0 } else { v > 0.0 && v < 1.0 };
                if free {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    Ok(shifted_jacobian(&s, t, constrained))
}

/// `max |J - J^T|`.
pub fn symmetry_defect(j: &Jacobian) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in j.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            worst = worst.max((v - j[k][i]).abs());
        }
    }
    worst
}

/// `max |A - B|`.
pub fn max_abs_diff(a: &Jacobian, b: &Jacobian) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    /// Largest entrywise gap between analytic and finite-difference
    /// Jacobians; `None` when no closed form exists.
    pub max_discrepancy: Option<f64>,
    /// `max |J - J^T|` of the finite-difference Jacobian.
    pub symmetry_defect: f64,
    pub tolerance: f64,
    pub epsilon: f64,
    pub pass: bool,
    pub jacobian: Jacobian,
}

/// Compares the analytic Jacobian (where one exists) to a dense central
/// finite-difference Jacobian and checks symmetry.
pub fn gradcheck(
    spec: &StructureSpec,
    rspec: &RelaxationSpec,
    u: &[f64],
    tolerance: f64,
    fd: FdConfig,
) -> Result<GradcheckReport> {
    let numeric = fd_jacobian(spec, rspec, u, fd)?;
    let symmetry = symmetry_defect(&numeric);
    let max_discrepancy = match analytic_jacobian(spec, rspec, u) {
        Ok(exact) => Some(max_abs_diff(&exact, &numeric)),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let pass = symmetry <= tolerance && max_discrepancy.is_none_or(|d| d <= tolerance);
    Ok(GradcheckReport {
        max_discrepancy,
        symmetry_defect: symmetry,
        tolerance,
        epsilon: fd.epsilon,
        pass,
        jacobian: numeric,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// Largest observed `|X(u + h) - X(u)| / |h|`.
    pub max_ratio: f64,
    /// Envelope `10 * dim / t`.
    pub envelope: f64,
    pub pass: bool,
}

/// Empirical continuity probe: random perturbations of Euclidean norm
/// `radius` around `u`.
pub fn lipschitz_probe(
    spec: &StructureSpec,
    rspec: &RelaxationSpec,
    u: &[f64],
    radius: f64,
    probes: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    let base = relax(spec, rspec, u)?.x;
    let mut r = rng::stream(seed, 0);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..probes {
        let h: Vec<f64> = (0..u.len()).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let moved: Vec<f64> = u.iter().zip(&h).map(|(a, b)| a + radius * b / norm).collect();
        let x = relax(spec, rspec, &moved)?.x;
        let dx = x.iter().zip(&base).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        max_ratio = max_ratio.max(dx / radius);
    }
    let envelope = 10.0 * u.len() as f64 / rspec.temperature;
    Ok(LipschitzReport {
        max_ratio,
        envelope,
        pass: max_ratio <= envelope,
    })
}

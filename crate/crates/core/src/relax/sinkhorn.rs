//! Entropic relaxation over the Birkhoff polytope by log-domain Sinkhorn.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::RelaxedPoint;

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|&x| (x - top).exp()).sum::<f64>().ln()
}

/// Doubly stochastic `X_ij = exp(u_ij / t + f_i + g_j)` for a row-major
/// `n x n` utility matrix. The returned dual is `f` followed by `g`, and the
/// residual is the largest row-sum error after the final column update.
///
/// Low temperatures are reached through a geometric schedule of
/// intermediate temperatures, each warm-started from the previous duals.
/// When plain scaling stalls in the final stage the duals are refined by
/// damped Newton steps.
pub fn sinkhorn_relax(n: usize, u: &[f64], t: f64, tol: f64, max_iter: usize) -> Result<RelaxedPoint> {
    if u.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: u.len(),
        });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")));
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("utilities must be finite".into()));
    }
    let spread = u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - u.iter().copied().fold(f64::INFINITY, f64::min);
    let mut schedule = Vec::new();
    let mut s = spread.max(t);
    while s > t {
        schedule.push(s);
        s *= 0.25;
    }
    schedule.push(t);

    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut prev_t = schedule[0];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    for (stage, &temp) in schedule.iter().enumerate() {
        let scale = prev_t / temp;
        f.iter_mut().chain(g.iter_mut()).for_each(|v| *v *= scale);
        prev_t = temp;
        let last = stage + 1 == schedule.len();
        let z: Vec<f64> = u.iter().map(|&v| v / temp).collect();
        let stage_tol = if last { tol } else { tol.max(1e-3) };
        let mut converged = false;
        let mut stage_iters = 0;
        while stage_iters < max_iter {
            stage_iters += 1;
            iterations += 1;
            if last && stage_iters % NEWTON_EVERY == 0 {
                newton(n, &z, &mut f, &mut g);
            }
            for i in 0..n {
                f[i] = -log_sum_exp((0..n).map(|j| z[i * n + j] + g[j]));
            }
            for j in 0..n {
                g[j] = -log_sum_exp((0..n).map(|i| z[i * n + j] + f[i]));
            }
            residual = row_residual(n, &z, &f, &g);
            if !residual.is_finite() {
                return Err(Error::Numerical("Sinkhorn iterates are not finite".into()));
            }
            if residual <= stage_tol {
                converged = true;
                break;
            }
        }
        if last && !converged {
            return Err(Error::NoConvergence { iterations, residual });
        }
        if last {
            let x = (0..n * n)
                .map(|k| (z[k] + f[k / n] + g[k % n]).exp())
                .collect();
            let mut dual = f.clone();
            dual.extend_from_slice(&g);
            return Ok(RelaxedPoint {
                x,
                dual: Some(dual),
                residual,
                condition_estimate: None,
            });
        }
    }
    unreachable!("schedule always ends at the target temperature")
}

const NEWTON_EVERY: usize = 25;

fn row_residual(n: usize, z: &[f64], f: &[f64], g: &[f64]) -> f64 {
    (0..n)
        .map(|i| {
            let row: f64 = (0..n).map(|j| (z[i * n + j] + f[i] + g[j]).exp()).sum();
            (row - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

fn normalize_rows(n: usize, z: &[f64], f: &mut [f64], g: &[f64]) {
    for i in 0..n {
        f[i] = -log_sum_exp((0..n).map(|j| z[i * n + j] + g[j]));
    }
}

fn column_error(n: usize, z: &[f64], f: &[f64], g: &[f64]) -> f64 {
    (0..n)
        .map(|j| {
            let col: f64 = (0..n).map(|i| (z[i * n + j] + f[i] + g[j]).exp()).sum();
            (col - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Newton steps on the column duals with the row duals eliminated by exact
/// row normalization and `g_{n-1}` held fixed. The Hessian is the weighted
/// Laplacian with weights `sum_i X_ij X_ik`, assembled without
/// cancellation; steps are accepted only if the column error decreases.
fn newton(n: usize, z: &[f64], f: &mut [f64], g: &mut [f64]) {
    if n < 2 {
        return;
    }
    let m = n - 1;
    for _ in 0..20 {
        normalize_rows(n, z, f, g);
        let x: Vec<f64> = (0..n * n).map(|k| (z[k] + f[k / n] + g[k % n]).exp()).collect();
        let before = column_error(n, z, f, g);
        if before < 1e-15 {
            return;
        }
        let mut grad = DVector::<f64>::zeros(m);
        let mut hess = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            grad[j] = (0..n).map(|i| x[i * n + j]).sum::<f64>() - 1.0;
        }
        for j in 0..n {
            for k in j + 1..n {
                let w: f64 = (0..n).map(|i| x[i * n + j] * x[i * n + k]).sum();
                for (a, b) in [(j, k), (k, j)] {
                    if a < m {
                        hess[(a, a)] += w;
                        if b < m {
                            hess[(a, b)] -= w;
                        }
                    }
                }
            }
        }
        let Some(step) = hess.lu().solve(&grad) else { return };
        let mut alpha = 1.0;
        loop {
            let tg: Vec<f64> = (0..n)
                .map(|j| if j < m { g[j] - alpha * step[j] } else { g[j] })
                .collect();
            let mut tf = f.to_vec();
            normalize_rows(n, z, &mut tf, &tg);
            let after = column_error(n, z, &tf, &tg);
            if after.is_finite() && after < before {
                f.copy_from_slice(&tf);
                g.copy_from_slice(&tg);
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-6 {
                return;
            }
        }
    }
}

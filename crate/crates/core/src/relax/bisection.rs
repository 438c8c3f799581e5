//! Relaxations over the box and the capped simplex that reduce to a scalar
//! root-finding problem in the shift `nu`: `x_i = h(z_i - nu)` with
//! `sum x = k`, where `z = u / t` and `h` is nondecreasing.

use crate::error::{Error, Result};
use crate::structures::StructureSpec;

use super::RelaxedPoint;

/// Coordinate map `h` for each regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Profile {
    /// Euclidean: `clamp(v, 0, 1)`.
    Clamp,
    /// Binary entropy: `sigmoid(v)`.
    Sigmoid,
    /// Categorical entropy: `min(1, exp(v))`.
    CappedExp,
}

impl Profile {
    fn apply(self, v: f64) -> f64 {
        match self {
            Profile::Clamp => v.clamp(0.0, 1.0),
            Profile::Sigmoid => sigmoid(v),
            Profile::CappedExp => v.min(0.0).exp(),
        }
    }
}

pub(crate) fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn total(z: &[f64], nu: f64, profile: Profile) -> f64 {
    z.iter().map(|&v| profile.apply(v - nu)).sum()
}

/// Finds `nu` with `sum_i h(z_i - nu) = k` by bisection and returns the
/// resulting point with `dual = [nu]`.
pub(crate) fn capped_shift(
    z: &[f64],
    k: usize,
    profile: Profile,
    tol: f64,
    max_iter: usize,
) -> Result<RelaxedPoint> {
    let target = k as f64;
    let n = z.len() as f64;
    let zmin = z.iter().copied().fold(f64::INFINITY, f64::min);
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = zmin - n.ln() - 1.0;
    let mut hi = zmax + n.ln() + 1.0;
    let mut width = hi - lo;
    while total(z, lo, profile) < target {
        lo -= width;
        width *= 2.0;
    }
    while total(z, hi, profile) > target {
        hi += width;
        width *= 2.0;
    }

    let (mut f_lo, mut f_hi) = (total(z, lo, profile), total(z, hi, profile));
    let mut nu = 0.5 * (lo + hi);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        nu = 0.5 * (lo + hi);
        let f = total(z, nu, profile);
        if f > f_lo || f < f_hi {
            return Err(Error::Numerical(format!(
                "bisection objective is not monotone near nu = {nu}"
            )));
        }
        if f == target || nu <= lo || nu >= hi {
            break;
        }
        if f > target {
            lo = nu;
            f_lo = f;
        } else {
            hi = nu;
            f_hi = f;
        }
    }

    let nu = polish(z, k, profile, nu);
    let x: Vec<f64> = z.iter().map(|&v| profile.apply(v - nu)).collect();
    let residual = (x.iter().sum::<f64>() - target).abs();
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(RelaxedPoint {
        x,
        dual: Some(vec![nu]),
        residual,
        condition_estimate: None,
    })
}

/// Snaps the bisection estimate to the exact root where a closed form
/// exists on the current active set, or takes Newton steps otherwise.
fn polish(z: &[f64], k: usize, profile: Profile, nu: f64) -> f64 {
    let target = k as f64;
    let err = |nu: f64| (total(z, nu, profile) - target).abs();
    let candidate = match profile {
        Profile::Clamp => {
            let (mut free_sum, mut free, mut ones) = (0.0, 0usize, 0usize);
            for &v in z {
                let d = v - nu;
                if d >= 1.0 {
                    ones += 1;
                } else if d > 0.0 {
                    free += 1;
                    free_sum += v;
                }
            }
            (free > 0).then(|| (free_sum + ones as f64 - target) / free as f64)
        }
        Profile::CappedExp => {
            let capped = z.iter().filter(|&&v| v - nu >= 0.0).count();
            let rest: Vec<f64> = z.iter().copied().filter(|&v| v - nu < 0.0).collect();
            (capped < k && !rest.is_empty()).then(|| {
                let top = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = top + rest.iter().map(|&v| (v - top).exp()).sum::<f64>().ln();
                lse - ((k - capped) as f64).ln()
            })
        }
        Profile::Sigmoid => {
            let mut best = nu;
            for _ in 0..4 {
                let xs: Vec<f64> = z.iter().map(|&v| sigmoid(v - best)).collect();
                let g: f64 = xs.iter().sum::<f64>() - target;
                let slope: f64 = xs.iter().map(|&x| x * (1.0 - x)).sum();
                if g == 0.0 || slope == 0.0 {
                    break;
                }
                let next = best + g / slope;
                if err(next) >= err(best) {
                    break;
                }
                best = next;
            }
            Some(best)
        }
    };
    match candidate {
        Some(c) if c.is_finite() && err(c) <= err(nu) => c,
        _ => nu,
    }
}

fn capped_k(spec: &StructureSpec, what: &str) -> Result<Option<usize>> {
    match spec {
        StructureSpec::OneHot { .. } => Ok(Some(1)),
        StructureSpec::KSubsets { k, .. } => Ok(Some(*k)),
        StructureSpec::Subsets { .. } => Ok(None),
        _ => Err(Error::Unsupported(format!("{what} is not available for {}", spec.kind()))),
    }
}

/// Binary-entropy relaxation: `sigmoid(u / t)` on the box, or
/// `sigmoid((u - nu) / t)` with `sum x = k` on the capped simplex.
pub fn binary_entropy_relax(
    spec: &StructureSpec,
    u: &[f64],
    t: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RelaxedPoint> {
    spec.check_dim(u.len())?;
    let z: Vec<f64> = u.iter().map(|&v| v / t).collect();
    match capped_k(spec, "binary entropy")? {
        None => Ok(RelaxedPoint::exact(z.iter().map(|&v| sigmoid(v)).collect())),
        Some(k) => capped_shift(&z, k, Profile::Sigmoid, tol, max_iter),
    }
}

/// Categorical-entropy relaxation: `min(1, exp(u / t))` on the box, or
/// `min(1, exp((u - nu) / t))` with `sum x = k` on the capped simplex.
pub fn categorical_entropy_relax(
    spec: &StructureSpec,
    u: &[f64],
    t: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RelaxedPoint> {
    spec.check_dim(u.len())?;
    let z: Vec<f64> = u.iter().map(|&v| v / t).collect();
    match capped_k(spec, "categorical entropy")? {
        None => Ok(RelaxedPoint::exact(z.iter().map(|&v| Profile::CappedExp.apply(v)).collect())),
        Some(k) => capped_shift(&z, k, Profile::CappedExp, tol, max_iter),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-10;

    #[test]
    fn binary_entropy_examples() {
        let subsets = StructureSpec::Subsets { n: 2 };
        let x = binary_entropy_relax(&subsets, &[0.0, 0.0], 1.0, TOL, 200).unwrap().x;
        assert_eq!(x, vec![0.5, 0.5]);
        let t = 0.7;
        let x = binary_entropy_relax(&subsets, &[t * 3f64.ln(), 0.0], t, TOL, 200).unwrap().x;
        assert_abs_diff_eq!(x[0], 0.75, epsilon = 1e-15);
        let k = StructureSpec::KSubsets { n: 3, k: 2 };
        let x = binary_entropy_relax(&k, &[4.0; 3], 1.0, TOL, 200).unwrap().x;
        for v in x {
            assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn categorical_entropy_examples() {
        let subsets = StructureSpec::Subsets { n: 2 };
        let t = 0.3;
        let x = categorical_entropy_relax(&subsets, &[-t * 2f64.ln(), 5.0 * t], t, TOL, 200)
            .unwrap()
            .x;
        assert_abs_diff_eq!(x[0], 0.5, epsilon = 1e-15);
        assert_eq!(x[1], 1.0);
        let k = StructureSpec::KSubsets { n: 4, k: 2 };
        let x = categorical_entropy_relax(&k, &[-2.0; 4], 1.0, TOL, 200).unwrap().x;
        for v in x {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn one_hot_categorical_entropy_is_softmax() {
        let u = [0.3, -1.0, 2.0, 0.0];
        let x = categorical_entropy_relax(&StructureSpec::OneHot { n: 4 }, &u, 0.5, TOL, 200)
            .unwrap()
            .x;
        let s = super::super::softmax_simplex(&u, 0.5).x;
        for (a, b) in x.iter().zip(&s) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn shifts_hit_the_target_sum() {
        let mut r = rng::stream(8, 0);
        for profile in [Profile::Clamp, Profile::Sigmoid, Profile::CappedExp] {
            for _ in 0..200 {
                let n = 3 + (rng::open_unit(&mut r) * 6.0) as usize;
                let k = 1 + (rng::open_unit(&mut r) * (n - 1) as f64) as usize;
                let scale = [0.1, 1.0, 50.0, 1e4][(rng::open_unit(&mut r) * 4.0) as usize];
                let z: Vec<f64> = (0..n).map(|_| scale * (rng::open_unit(&mut r) * 2.0 - 1.0)).collect();
                let p = capped_shift(&z, k.min(n - 1), profile, TOL, 200).unwrap();
                assert!(p.residual <= TOL, "{profile:?} residual {}", p.residual);
                assert!(p.x.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }
}

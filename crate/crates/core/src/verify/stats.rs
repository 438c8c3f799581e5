use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::argmax::sample_proportional;
use crate::error::{Error, Result};
use crate::rng;
use crate::structures::Vertex;

use super::FrequencyTable;

/// Smallest expected count accepted in any chi-square cell.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub level: f64,
    pub pass: bool,
}

impl TestReport {
    fn new(statistic: f64, dof: usize, p_value: f64, level: f64) -> Self {
        TestReport {
            statistic,
            dof,
            p_value,
            level,
            pass: p_value >= level,
        }
    }
}

/// Upper tail `P(chi2_dof >= x)`.
pub fn chi_square_survival(x: f64, dof: usize) -> f64 {
    if dof == 0 || x <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, x / 2.0)
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

/// Pearson goodness-of-fit test of `observed` counts against cell
/// probabilities `probs`.
pub fn pearson_gof(observed: &[u64], probs: &[f64], level: f64) -> Result<TestReport> {
    check_level(level)?;
    if observed.len() != probs.len() {
        return Err(Error::DimensionMismatch {
            expected: probs.len(),
            got: observed.len(),
        });
    }
    if probs.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Precondition("expected probabilities must be positive".into()));
    }
    let mass: f64 = probs.iter().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("expected probabilities sum to {mass}")));
    }
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let min_p = probs.iter().copied().fold(f64::INFINITY, f64::min);
    if n * min_p < MIN_EXPECTED {
        return Err(Error::Precondition(format!(
            "smallest expected count {:.3} is below {MIN_EXPECTED}",
            n * min_p
        )));
    }
    let statistic = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = probs.len() - 1;
    Ok(TestReport::new(statistic, dof, chi_square_survival(statistic, dof), level))
}

/// Goodness of fit of a frequency table against a law given on `cells`.
/// Sampled vertices outside `cells` are an error.
pub fn chi_square_gof(table: &FrequencyTable, cells: &[Vertex], expected: &[f64], level: f64) -> Result<TestReport> {
    if cells.len() != expected.len() {
        return Err(Error::DimensionMismatch {
            expected: cells.len(),
            got: expected.len(),
        });
    }
    let known: BTreeSet<&Vertex> = cells.iter().collect();
    if let Some(v) = table.support.iter().find(|v| !known.contains(v)) {
        return Err(Error::OutOfSupport(format!("sampled vertex {v} has zero expected probability")));
    }
    let observed: Vec<u64> = cells.iter().map(|v| table.count(v)).collect();
    pearson_gof(&observed, expected, level)
}

/// Chi-square test of homogeneity between two frequency tables over the
/// union of their supports.
pub fn two_sample_equivalence(a: &FrequencyTable, b: &FrequencyTable, level: f64) -> Result<TestReport> {
    check_level(level)?;
    let cells: BTreeSet<&Vertex> = a.support.iter().chain(&b.support).collect();
    let (na, nb) = (a.total as f64, b.total as f64);
    let n = na + nb;
    let mut statistic = 0.0;
    for v in &cells {
        let (oa, ob) = (a.count(v) as f64, b.count(v) as f64);
        let pooled = (oa + ob) / n;
        let (ea, eb) = (na * pooled, nb * pooled);
        if ea.min(eb) < MIN_EXPECTED {
            return Err(Error::Precondition(format!(
                "cell {v} has expected count {:.3} below {MIN_EXPECTED}",
                ea.min(eb)
            )));
        }
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let dof = cells.len().saturating_sub(1);
    Ok(TestReport::new(statistic, dof, chi_square_survival(statistic, dof), level))
}

/// Kolmogorov distribution tail `P(K > lambda)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form, fast for small lambda
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=6)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * c).exp()
            })
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let k = k as f64;
                let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF. The report's
/// `dof` holds the sample size.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64, level: f64) -> Result<TestReport> {
    check_level(level)?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok(TestReport::new(d, sorted.len(), kolmogorov_tail(lambda), level))
}

/// Fraction of `trials` goodness-of-fit tests that reject when the counts
/// are drawn from `probs` itself.
pub fn calibration_rate(trials: usize, draws: usize, probs: &[f64], level: f64, seed: u64) -> Result<f64> {
    let rejections: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut r = rng::stream(seed, trial as u64);
            let mut counts = vec![0u64; probs.len()];
            for _ in 0..draws {
                counts[sample_proportional(probs, &mut r)] += 1;
            }
            pearson_gof(&counts, probs, level).map(|rep| usize::from(!rep.pass))
        })
        .sum::<Result<usize>>()?;
    Ok(rejections as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use approx::assert_abs_diff_eq;

    fn table(cells: &[(Vec<u8>, u64)]) -> FrequencyTable {
        FrequencyTable::from_counts(
            cells
                .iter()
                .map(|(b, c)| (Vertex::new(b.clone()), *c))
                .collect::<BTreeMap<_, _>>(),
        )
    }

    fn one_hot3() -> Vec<Vertex> {
        vec![
            Vertex::new(vec![1, 0, 0]),
            Vertex::new(vec![0, 1, 0]),
            Vertex::new(vec![0, 0, 1]),
        ]
    }

    #[test]
    fn proportional_counts_give_zero() {
        let t = table(&[(vec![1, 0, 0], 100), (vec![0, 1, 0], 100), (vec![0, 0, 1], 100)]);
        let rep = chi_square_gof(&t, &one_hot3(), &[1.0 / 3.0; 3], 0.01).unwrap();
        assert_abs_diff_eq!(rep.statistic, 0.0, epsilon = 1e-12);
        assert_eq!(rep.dof, 2);
        assert!(rep.pass);
    }

    #[test]
    fn all_mass_on_one_cell() {
        let t = table(&[(vec![0, 1, 0], 300)]);
        let rep = chi_square_gof(&t, &one_hot3(), &[1.0 / 3.0; 3], 0.01).unwrap();
        assert_abs_diff_eq!(rep.statistic, 600.0, epsilon = 1e-9);
        assert!(!rep.pass);
    }

    #[test]
    fn sparse_cells_are_rejected() {
        let t = table(&[(vec![0, 1, 0], 10)]);
        assert!(matches!(
            chi_square_gof(&t, &one_hot3(), &[1.0 / 3.0; 3], 0.01),
            Err(Error::Precondition(_))
        ));
        let a = table(&[(vec![1, 0, 0], 100), (vec![0, 1, 0], 3)]);
        assert!(matches!(two_sample_equivalence(&a, &a, 0.01), Err(Error::Precondition(_))));
    }

    #[test]
    fn identical_tables_are_equivalent() {
        let a = table(&[(vec![1, 0], 400), (vec![0, 1], 600)]);
        let rep = two_sample_equivalence(&a, &a, 0.01).unwrap();
        assert_eq!(rep.statistic, 0.0);
        assert_eq!(rep.p_value, 1.0);
        let b = table(&[(vec![1, 0], 600), (vec![0, 1], 400)]);
        assert!(!two_sample_equivalence(&a, &b, 0.01).unwrap().pass);
    }

    #[test]
    fn survival_function_reference_values() {
        // chi2(1) at 3.841458820694124 is the 5% point; chi2(2) tail is exp(-x/2)
        assert_abs_diff_eq!(chi_square_survival(3.841458820694124, 1), 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(chi_square_survival(5.0, 2), (-2.5f64).exp(), epsilon = 1e-14);
        assert_eq!(chi_square_survival(0.0, 4), 1.0);
    }

    #[test]
    fn kolmogorov_series_agree_at_the_switch() {
        let lo = 1.0 - (2.0 * std::f64::consts::PI).sqrt() / 1.18
            * (1..=6)
                .map(|k| {
                    let m = (2 * k - 1) as f64;
                    (-m * m * std::f64::consts::PI.powi(2) / (8.0 * 1.18 * 1.18)).exp()
                })
                .sum::<f64>();
        assert_abs_diff_eq!(lo, kolmogorov_tail(1.18), epsilon = 1e-12);
        // the 1% critical value of the Kolmogorov distribution
        assert_abs_diff_eq!(kolmogorov_tail(1.6276), 0.01, epsilon = 1e-4);
    }

    #[test]
    fn ks_accepts_uniforms_and_rejects_shifted() {
        let mut r = rng::stream(2, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| rng::open_unit(&mut r)).collect();
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0), 0.01).unwrap().pass);
        assert!(!ks_test(&xs, |x| (x * 1.05).clamp(0.0, 1.0), 0.01).unwrap().pass);
    }
}

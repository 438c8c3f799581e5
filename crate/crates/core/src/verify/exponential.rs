//! Monte Carlo checks of the exponential race underlying the Gumbel and
//! arborescence samplers: for independent `E_i ~ Exp(lambda_i)`,
//!
//! * `argmin E` has law `lambda_i / sum lambda`,
//! * `min E ~ Exp(sum lambda)`, independently of the argmin,
//! * given `argmin E = k`, the residuals `E_j - E_k` are independent
//!   `Exp(lambda_j)`,
//! * the full ranking has the sequential (Plackett-Luce) law.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::structures::permutations;
use crate::utilities::UtilitySpec;

use super::stats::{ks_test, pearson_gof, TestReport};
use super::CHUNK;

fn check_rates(rates: &[f64]) -> Result<()> {
    if rates.len() < 2 || rates.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidArgument("need at least two finite positive rates".into()));
    }
    Ok(())
}

/// `draws` vectors of independent exponentials, chunked over streams.
pub fn exponential_draws(rates: &[f64], draws: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_rates(rates)?;
    let chunks = draws.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut r = rng::stream(seed, c as u64);
            let size = CHUNK.min(draws - c * CHUNK);
            (0..size)
                .map(|_| {
                    rates
                        .iter()
                        .map(|&l| -rng::open_unit(&mut r).ln() / l)
                        .collect::<Vec<f64>>()
                })
                .collect::<Vec<_>>()
        })
        .collect())
}

fn argmin(x: &[f64]) -> usize {
    (0..x.len()).fold(0, |b, i| if x[i] < x[b] { i } else { b })
}

/// Number of shared-noise draws on which `argmax` of Gumbel utilities with
/// location `ln lambda` differs from `argmin` of the exponentials
/// `-ln(b) / lambda`. The two are monotone transforms of each other, so
/// this is zero.
pub fn monotone_coupling_mismatches(rates: &[f64], draws: usize, seed: u64) -> Result<usize> {
    check_rates(rates)?;
    let gumbel = UtilitySpec::gumbel(rates.iter().map(|l| l.ln()).collect())?;
    let neg_exp = UtilitySpec::neg_exponential(rates.to_vec())?;
    let mut r = rng::stream(seed, 0);
    let mut mismatches = 0;
    for _ in 0..draws {
        let base = rng::open_unit_vec(&mut r, rates.len());
        let g = gumbel.sample(&base)?.u;
        let e: Vec<f64> = neg_exp.sample(&base)?.u.iter().map(|v| -v).collect();
        let top = (0..g.len()).fold(0, |b, i| if g[i] > g[b] { i } else { b });
        if top != argmin(&e) {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}

/// Chi-square of `argmin E` against `lambda / sum lambda`.
pub fn argmin_law(rates: &[f64], draws: usize, seed: u64, level: f64) -> Result<TestReport> {
    let samples = exponential_draws(rates, draws, seed)?;
    let mut counts = vec![0u64; rates.len()];
    for e in &samples {
        counts[argmin(e)] += 1;
    }
    let total: f64 = rates.iter().sum();
    let probs: Vec<f64> = rates.iter().map(|l| l / total).collect();
    pearson_gof(&counts, &probs, level)
}

/// KS test of `min E` against `Exp(sum lambda)`.
pub fn min_law(rates: &[f64], draws: usize, seed: u64, level: f64) -> Result<TestReport> {
    let samples = exponential_draws(rates, draws, seed)?;
    let total: f64 = rates.iter().sum();
    let mins: Vec<f64> = samples
        .iter()
        .map(|e| e.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    ks_test(&mins, |x| 1.0 - (-total * x.max(0.0)).exp(), level)
}

/// For each pair `(k, j)`, `j != k`, a KS test of `E_j - E_k` on draws with
/// `argmin E = k` against `Exp(lambda_j)`, plus for each `k` a KS test of
/// `min E` on those draws against `Exp(sum lambda)`.
pub fn residual_laws(rates: &[f64], draws: usize, seed: u64, level: f64) -> Result<Vec<TestReport>> {
    let samples = exponential_draws(rates, draws, seed)?;
    let n = rates.len();
    let total: f64 = rates.iter().sum();
    let mut reports = Vec::new();
    for k in 0..n {
        let group: Vec<&Vec<f64>> = samples.iter().filter(|e| argmin(e) == k).collect();
        let mins: Vec<f64> = group.iter().map(|e| e[k]).collect();
        reports.push(ks_test(&mins, |x| 1.0 - (-total * x.max(0.0)).exp(), level)?);
        for j in (0..n).filter(|&j| j != k) {
            let residual: Vec<f64> = group.iter().map(|e| e[j] - e[k]).collect();
            let rate = rates[j];
            reports.push(ks_test(&residual, |x| 1.0 - (-rate * x.max(0.0)).exp(), level)?);
        }
    }
    Ok(reports)
}

/// `P(argsort E = pi) = prod_i lambda_{pi_i} / sum_{j >= i} lambda_{pi_j}`.
pub fn argsort_probability(rates: &[f64], order: &[usize]) -> f64 {
    let mut remaining: f64 = order.iter().map(|&i| rates[i]).sum();
    let mut p = 1.0;
    for &i in order {
        p *= rates[i] / remaining;
        remaining -= rates[i];
    }
    p
}

/// Chi-square of the ascending ranking of `E` against the product formula.
pub fn argsort_law(rates: &[f64], draws: usize, seed: u64, level: f64) -> Result<TestReport> {
    let orders = permutations(rates.len());
    let index: std::collections::HashMap<&Vec<usize>, usize> =
        orders.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let samples = exponential_draws(rates, draws, seed)?;
    let mut counts = vec![0u64; orders.len()];
    for e in &samples {
        let mut o: Vec<usize> = (0..e.len()).collect();
        o.sort_by(|&a, &b| e[a].total_cmp(&e[b]));
        counts[index[&o]] += 1;
    }
    let probs: Vec<f64> = orders.iter().map(|o| argsort_probability(rates, o)).collect();
    pearson_gof(&counts, &probs, level)
}

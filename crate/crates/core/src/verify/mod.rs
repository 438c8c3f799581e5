//! Exact oracles and statistical tests for the samplers and relaxations.
//!
//! Monte Carlo runs are split into fixed-size chunks, each driven by its own
//! ChaCha stream `(seed, chunk)`, so results do not depend on how chunks are
//! scheduled across threads.

pub mod exponential;
mod stats;
pub mod suites;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::argmax::solve_map;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::structures::{StructureSpec, Vertex};
use crate::utilities::UtilitySpec;

pub use stats::{
    calibration_rate, chi_square_gof, chi_square_survival, ks_test, pearson_gof, two_sample_equivalence,
    TestReport,
};
pub use suites::{run_suite, CheckResult, Suite};

/// Draws per independent random stream.
pub const CHUNK: usize = 10_000;

fn log_sum_exp(v: &[f64]) -> f64 {
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|&x| (x - top).exp()).sum::<f64>().ln()
}

/// Every vertex with its Gibbs probability `exp(u^T x / t) / Z`.
pub fn gibbs_distribution(spec: &StructureSpec, u: &[f64], t: f64, limit: usize) -> Result<(Vec<Vertex>, Vec<f64>)> {
    spec.check_dim(u.len())?;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")));
    }
    let support = spec.enumerate_vertices(limit)?;
    let scores: Vec<f64> = support.iter().map(|v| v.dot(u) / t).collect();
    let log_z = log_sum_exp(&scores);
    let probs = scores.iter().map(|s| (s - log_z).exp()).collect();
    Ok((support, probs))
}

/// `sum_x x p(x)` by enumeration.
pub fn gibbs_marginals_bruteforce(spec: &StructureSpec, u: &[f64], t: f64, limit: usize) -> Result<Vec<f64>> {
    let (support, probs) = gibbs_distribution(spec, u, t, limit)?;
    let mut mu = vec![0.0; u.len()];
    for (v, p) in support.iter().zip(&probs) {
        for i in v.ones() {
            mu[i] += p;
        }
    }
    Ok(mu)
}

/// `Cov(x) / t` by enumeration, which is the Jacobian of the Gibbs
/// marginals with respect to `u`.
pub fn gibbs_covariance_bruteforce(
    spec: &StructureSpec,
    u: &[f64],
    t: f64,
    limit: usize,
) -> Result<Vec<Vec<f64>>> {
    let (support, probs) = gibbs_distribution(spec, u, t, limit)?;
    let m = u.len();
    let mut mu = vec![0.0; m];
    let mut second = vec![vec![0.0; m]; m];
    for (v, p) in support.iter().zip(&probs) {
        let ones: Vec<usize> = v.ones().collect();
        for &i in &ones {
            mu[i] += p;
            for &k in &ones {
                second[i][k] += p;
            }
        }
    }
    Ok((0..m)
        .map(|i| (0..m).map(|k| (second[i][k] - mu[i] * mu[k]) / t).collect())
        .collect())
}

/// Counts of sampled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub support: Vec<Vertex>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl FrequencyTable {
    pub fn from_counts(map: BTreeMap<Vertex, u64>) -> Self {
        let total = map.values().sum();
        let (support, counts) = map.into_iter().unzip();
        FrequencyTable { support, counts, total }
    }

    pub fn count(&self, v: &Vertex) -> u64 {
        self.support
            .binary_search(v)
            .map_or(0, |i| self.counts[i])
    }

    pub fn frequency(&self, v: &Vertex) -> f64 {
        self.count(v) as f64 / self.total as f64
    }

    /// Empirical mean of the embedding.
    pub fn mean(&self) -> Vec<f64> {
        let dim = self.support.first().map_or(0, Vertex::len);
        let mut m = vec![0.0; dim];
        for (v, &c) in self.support.iter().zip(&self.counts) {
            for i in v.ones() {
                m[i] += c as f64;
            }
        }
        m.iter_mut().for_each(|x| *x /= self.total as f64);
        m
    }
}

/// Tabulates `draws` samples. Chunk `c` uses the stream `(seed, c)`.
pub fn mc_frequencies<F>(sampler: F, draws: usize, seed: u64) -> Result<FrequencyTable>
where
    F: Fn(&mut Stream) -> Result<Vertex> + Sync,
{
    if draws == 0 {
        return Err(Error::InvalidArgument("draws must be positive".into()));
    }
    let chunks = draws.div_ceil(CHUNK);
    let partial: Vec<BTreeMap<Vertex, u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let size = CHUNK.min(draws - c * CHUNK);
            let mut counts = BTreeMap::new();
            for _ in 0..size {
                *counts.entry(sampler(&mut r)?).or_insert(0) += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let mut merged = BTreeMap::new();
    for part in partial {
        for (v, c) in part {
            *merged.entry(v).or_insert(0) += c;
        }
    }
    Ok(FrequencyTable::from_counts(merged))
}

/// Perturb-and-MAP sampler: draw `U` from `utility` and return the exact
/// argmax over `spec`.
pub fn argmax_sampler<'a>(
    spec: &'a StructureSpec,
    utility: &'a UtilitySpec,
) -> Result<impl Fn(&mut Stream) -> Result<Vertex> + Sync + 'a> {
    spec.validate()?;
    spec.check_dim(utility.dim())?;
    Ok(move |r: &mut Stream| solve_map(spec, &utility.draw(r).u).map(|s| s.vertex))
}

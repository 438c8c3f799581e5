//! Random utility distributions with reparameterized samplers.
//!
//! Every sampler is a deterministic transform of caller-supplied uniform base
//! noise, so a draw is a pure function of `(theta, base)`.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    /// `Gumbel(theta)`, location parameter.
    Gumbel,
    /// `Logistic(theta)`, location parameter.
    Logistic,
    /// `-U ~ Exponential(theta)`, theta holds positive rates.
    NegExponential,
    /// `Normal(theta, I)`.
    Gaussian,
}

/// Independent per-coordinate utility distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UtilityRepr")]
pub struct UtilitySpec {
    pub family: NoiseFamily,
    pub theta: Vec<f64>,
}

#[derive(Deserialize)]
struct UtilityRepr {
    family: NoiseFamily,
    theta: Vec<f64>,
}

impl TryFrom<UtilityRepr> for UtilitySpec {
    type Error = Error;

    fn try_from(r: UtilityRepr) -> Result<Self> {
        UtilitySpec::new(r.family, r.theta)
    }
}

/// A realization of the utilities together with the base noise it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityDraw {
    pub u: Vec<f64>,
    pub base: Vec<f64>,
}

impl UtilitySpec {
    pub fn new(family: NoiseFamily, theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidArgument("theta is empty".into()));
        }
        if theta.iter().any(|t| t.is_nan()) {
            return Err(Error::InvalidArgument("theta contains NaN".into()));
        }
        if family == NoiseFamily::NegExponential && theta.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidArgument(
                "negative-exponential rates must be strictly positive".into(),
            ));
        }
        Ok(UtilitySpec { family, theta })
    }

    pub fn gumbel(theta: Vec<f64>) -> Result<Self> {
        UtilitySpec::new(NoiseFamily::Gumbel, theta)
    }

    pub fn logistic(theta: Vec<f64>) -> Result<Self> {
        UtilitySpec::new(NoiseFamily::Logistic, theta)
    }

    pub fn neg_exponential(rates: Vec<f64>) -> Result<Self> {
        UtilitySpec::new(NoiseFamily::NegExponential, rates)
    }

    pub fn gaussian(theta: Vec<f64>) -> Result<Self> {
        UtilitySpec::new(NoiseFamily::Gaussian, theta)
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Transforms uniform base noise into a utility draw.
    pub fn sample(&self, base: &[f64]) -> Result<UtilityDraw> {
        if base.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: base.len(),
            });
        }
        if let Some(b) = base.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "base noise {b} is not strictly inside (0, 1)"
            )));
        }
        let u = self
            .theta
            .iter()
            .zip(base)
            .map(|(&theta, &b)| self.transform(theta, b))
            .collect();
        Ok(UtilityDraw {
            u,
            base: base.to_vec(),
        })
    }

    /// Draws fresh base noise from `rng` and transforms it.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> UtilityDraw {
        let base = rng::open_unit_vec(rng, self.dim());
        self.sample(&base).expect("open-unit noise is always valid")
    }

    fn transform(&self, theta: f64, b: f64) -> f64 {
        match self.family {
            NoiseFamily::Gumbel => theta - (-b.ln()).ln(),
            NoiseFamily::Logistic => theta + b.ln() - (-b).ln_1p(),
            NoiseFamily::NegExponential => b.ln() / theta,
            NoiseFamily::Gaussian => theta + standard_normal_quantile(b),
        }
    }

    /// Sum of the per-coordinate log densities at `u`.
    pub fn log_density(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        let mut total = 0.0;
        for (&theta, &x) in self.theta.iter().zip(u) {
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!("utility {x} is not finite")));
            }
            total += match self.family {
                NoiseFamily::Gumbel => {
                    let z = x - theta;
                    -z - (-z).exp()
                }
                NoiseFamily::Logistic => {
                    let z = (x - theta).abs();
                    -z - 2.0 * (-z).exp().ln_1p()
                }
                NoiseFamily::NegExponential => {
                    if x > 0.0 {
                        return Err(Error::OutOfSupport(format!(
                            "negative-exponential utility {x} > 0"
                        )));
                    }
                    theta.ln() + theta * x
                }
                NoiseFamily::Gaussian => -0.5 * LN_2PI - 0.5 * (x - theta).powi(2),
            };
        }
        Ok(total)
    }

    /// `KL(Gumbel(theta) || Gumbel(0))`, summed over coordinates.
    pub fn kl_to_standard(&self) -> Result<f64> {
        if self.family != NoiseFamily::Gumbel {
            return Err(Error::Unsupported(format!(
                "closed-form KL is only available for the Gumbel family, not {:?}",
                self.family
            )));
        }
        Ok(self.theta.iter().map(|&t| t + (-t).exp() - 1.0).sum())
    }
}

/// Inverse CDF of the standard normal distribution.
pub fn standard_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

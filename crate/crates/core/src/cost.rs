//! Cost functions `g`, the mean energetic cost `Λ = Σ p_i g(l_i)` and the
//! type-level moments it is related to.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::repertoire::Repertoire;

/// A strictly increasing map from magnitude to energetic cost.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CostModel {
    #[default]
    Identity,
    /// `l^beta`, `beta > 0`.
    Power(f64),
    /// `ln(1 + l)`.
    Log1p,
}

impl CostModel {
    pub fn power(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Self::Power(beta))
        } else {
            Err(Error::InvalidParameter(format!("power cost needs beta > 0, got {beta}")))
        }
    }

    #[inline]
    pub fn cost(&self, magnitude: f64) -> f64 {
        match *self {
            Self::Identity => magnitude,
            Self::Power(beta) => magnitude.powf(beta),
            Self::Log1p => magnitude.ln_1p(),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Power(beta) => write!(f, "power:{beta}"),
            Self::Log1p => f.write_str("log1p"),
        }
    }
}

impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" => Ok(Self::Identity),
            "log1p" => Ok(Self::Log1p),
            other => match other.strip_prefix("power:") {
                Some(beta) => {
                    let beta: f64 =
                        beta.parse().map_err(|_| Error::InvalidParameter(format!("bad power exponent `{beta}`")))?;
                    Self::power(beta)
                }
                None => Err(Error::InvalidParameter(format!(
                    "unknown cost model `{other}` (expected identity, power:<beta> or log1p)"
                ))),
            },
        }
    }
}

impl Serialize for CostModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Summary moments over the types of a repertoire.
///
/// Expectations are taken over types drawn uniformly, so `E[p] = 1/V` and
/// `E[pλ] = Λ/V`. Standard deviations are population ones (divide by `V`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub types: usize,
    pub mean_cost: f64,
    pub type_mean_cost: f64,
    pub mean_probability: f64,
    pub mean_probability_cost: f64,
    pub sd_probability: f64,
    pub sd_cost: f64,
}

pub(crate) fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn population_sd(values: &[f64], mean: f64) -> f64 {
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / values.len() as f64).sqrt()
}

/// `Λ = Σ p_i g(l_i)`; with the identity cost this is the mean code length.
pub fn mean_cost(r: &Repertoire, g: &CostModel) -> f64 {
    r.probabilities().iter().zip(r.magnitudes()).map(|(p, &l)| p * g.cost(l)).sum()
}

pub fn moments(r: &Repertoire, g: &CostModel) -> Moments {
    let costs = r.costs(g);
    let v = r.len();
    let mean_cost = weighted_sum(r.probabilities(), &costs);
    let type_mean_cost = mean(&costs);
    let mean_probability = 1.0 / v as f64;
    Moments {
        types: v,
        mean_cost,
        type_mean_cost,
        mean_probability,
        mean_probability_cost: mean_cost / v as f64,
        sd_probability: population_sd(r.probabilities(), mean_probability),
        sd_cost: population_sd(&costs, type_mean_cost),
    }
}

//! Permutation tests under multiset constancy.
//!
//! The null keeps the multiset of probabilities and the multiset of
//! magnitudes and re-pairs them uniformly at random: magnitudes are permuted
//! against fixed probabilities. The left tail (small cost, negative
//! correlation) is the direction of the law of abbreviation; both tails are
//! always reported.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::correlation::{counts_fast, pearson_from_cost, spearman_of};
use crate::cost::{weighted_sum, CostModel};
use crate::error::{Error, Result};
use crate::repertoire::Repertoire;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Mean energetic cost `Λ`.
    MeanCost,
    /// Kendall's `τ` between probability and magnitude.
    Tau,
    /// Spearman's `ρ` between probability and magnitude.
    Rho,
    /// Pearson's `r` between probability and cost.
    Pearson,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MeanCost => "mean_cost",
            Self::Tau => "tau",
            Self::Rho => "rho",
            Self::Pearson => "r",
        }
    }

    /// Evaluates the statistic with magnitudes (and their costs) taken in the
    /// order given by `perm`.
    fn evaluate(
        &self,
        probs: &[f64],
        mags: &[f64],
        costs: &[f64],
        perm: &[usize],
        scratch: &mut Vec<f64>,
    ) -> Option<f64> {
        scratch.clear();
        match self {
            Self::MeanCost => {
                scratch.extend(perm.iter().map(|&k| costs[k]));
                Some(weighted_sum(probs, scratch))
            }
            Self::Tau => {
                scratch.extend(perm.iter().map(|&k| mags[k]));
                Some(counts_fast(probs, scratch).tau())
            }
            Self::Rho => {
                scratch.extend(perm.iter().map(|&k| mags[k]));
                spearman_of(probs, scratch)
            }
            Self::Pearson => {
                scratch.extend(perm.iter().map(|&k| costs[k]));
                pearson_from_cost(probs, scratch)
            }
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean_cost" | "cost" | "lambda" => Ok(Self::MeanCost),
            "tau" => Ok(Self::Tau),
            "rho" => Ok(Self::Rho),
            "r" | "pearson" => Ok(Self::Pearson),
            other => {
                Err(Error::InvalidParameter(format!("unknown statistic `{other}` (expected mean_cost, tau, rho or r)")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// All `V!` pairings; p-values are exact proportions.
    Exhaustive,
    /// `R` random pairings; p-values use the `(1 + count) / (R + 1)` rule.
    MonteCarlo,
}

/// Largest `V` accepted by exhaustive mode by default (`8! = 40320`).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationTestConfig {
    pub statistic: Statistic,
    pub mode: Mode,
    /// Monte Carlo replicates; ignored in exhaustive mode.
    pub replicates: u64,
    pub seed: u64,
    pub exhaustive_cap: usize,
}

impl PermutationTestConfig {
    pub fn monte_carlo(statistic: Statistic, replicates: u64, seed: u64) -> Self {
        Self { statistic, mode: Mode::MonteCarlo, replicates, seed, exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP }
    }

    pub fn exhaustive(statistic: Statistic) -> Self {
        Self { statistic, mode: Mode::Exhaustive, replicates: 0, seed: 0, exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationTestResult {
    pub statistic: Statistic,
    pub observed: f64,
    pub mode: Mode,
    /// Number of null pairings evaluated (`V!` in exhaustive mode).
    pub replicates: u64,
    pub p_left: f64,
    pub p_right: f64,
    pub seed: u64,
}

/// Values within this relative distance of the observed statistic count as
/// equal to it, so re-pairings that only reorder a sum are not split by
/// rounding.
const TIE_TOLERANCE: f64 = 1e-12;

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn permutation_test(
    r: &Repertoire,
    g: &CostModel,
    config: &PermutationTestConfig,
) -> Result<PermutationTestResult> {
    let v = r.len();
    if v < 2 {
        return Err(Error::TooFewTypes { required: 2, actual: v });
    }
    let probs = r.probabilities();
    let mags = r.magnitudes();
    let costs = r.costs(g);
    let stat = config.statistic;
    let mut scratch = Vec::with_capacity(v);
    let identity: Vec<usize> = (0..v).collect();
    let observed =
        stat.evaluate(probs, mags, &costs, &identity, &mut scratch).ok_or(Error::UndefinedStatistic(stat.name()))?;
    let tol = TIE_TOLERANCE * observed.abs().max(1.0);

    let (mut left, mut right, mut total) = (0u64, 0u64, 0u64);
    let mut tally = |value: Option<f64>| {
        // Under the null a correlation is undefined only if a variable is
        // constant, which re-pairing cannot change; count such draws as ties.
        let value = value.unwrap_or(observed);
        if value <= observed + tol {
            left += 1;
        }
        if value >= observed - tol {
            right += 1;
        }
        total += 1;
    };

    let (p_left, p_right, replicates) = match config.mode {
        Mode::Exhaustive => {
            if v > config.exhaustive_cap {
                return Err(Error::ExhaustiveCapExceeded { v, cap: config.exhaustive_cap });
            }
            for perm in (0..v).permutations(v) {
                tally(stat.evaluate(probs, mags, &costs, &perm, &mut scratch));
            }
            debug_assert_eq!(total, factorial(v));
            (left as f64 / total as f64, right as f64 / total as f64, total)
        }
        Mode::MonteCarlo => {
            if config.replicates == 0 {
                return Err(Error::InvalidParameter("need at least one replicate".into()));
            }
            let reference = sorted(mags);
            let mut perm = identity.clone();
            for rep in 0..config.replicates {
                let mut rng = rng::stream(config.seed, rep);
                perm.copy_from_slice(&identity);
                perm.shuffle(&mut rng);
                debug_assert_eq!(sorted(&perm.iter().map(|&k| mags[k]).collect::<Vec<_>>()), reference);
                tally(stat.evaluate(probs, mags, &costs, &perm, &mut scratch));
            }
            let denom = (config.replicates + 1) as f64;
            ((1 + left) as f64 / denom, (1 + right) as f64 / denom, total)
        }
    };
    Ok(PermutationTestResult {
        statistic: stat,
        observed,
        mode: config.mode,
        replicates,
        p_left,
        p_right,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(p: &[f64], l: &[f64]) -> Repertoire {
        Repertoire::from_values(p, l).unwrap()
    }

    #[test]
    fn constant_costs_give_p_one() {
        let r = rep(&[0.5, 0.3, 0.2], &[2.0; 3]);
        let res = permutation_test(&r, &CostModel::Identity, &PermutationTestConfig::exhaustive(Statistic::MeanCost))
            .unwrap();
        assert_eq!(res.p_left, 1.0);
        let res =
            permutation_test(&r, &CostModel::Identity, &PermutationTestConfig::monte_carlo(Statistic::MeanCost, 99, 1))
                .unwrap();
        assert_eq!(res.p_left, 1.0);
    }

    #[test]
    fn exhaustive_examples() {
        let cfg = PermutationTestConfig::exhaustive(Statistic::MeanCost);
        let res = permutation_test(&rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0]), &CostModel::Identity, &cfg).unwrap();
        assert!((res.observed - 1.7).abs() < 1e-12);
        assert!((res.p_left - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(res.p_right, 1.0);
        assert_eq!(res.replicates, 6);

        let res = permutation_test(&rep(&[0.5, 0.3, 0.2], &[3.0, 2.0, 1.0]), &CostModel::Identity, &cfg).unwrap();
        assert!((res.observed - 2.3).abs() < 1e-12);
        assert_eq!(res.p_left, 1.0);
        assert!((res.p_right - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let id = CostModel::Identity;
        let one = rep(&[1.0], &[1.0]);
        assert!(permutation_test(&one, &id, &PermutationTestConfig::exhaustive(Statistic::Tau)).is_err());
        let nine = rep(&[1.0; 9], &(1..=9).map(f64::from).collect::<Vec<_>>());
        assert!(matches!(
            permutation_test(&nine, &id, &PermutationTestConfig::exhaustive(Statistic::Tau)),
            Err(Error::ExhaustiveCapExceeded { v: 9, cap: 8 })
        ));
        let r = rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0]);
        assert!(permutation_test(&r, &id, &PermutationTestConfig::monte_carlo(Statistic::Tau, 0, 1)).is_err());
        let flat = rep(&[1.0; 3], &[1.0, 2.0, 3.0]);
        assert!(matches!(
            permutation_test(&flat, &id, &PermutationTestConfig::monte_carlo(Statistic::Pearson, 10, 1)),
            Err(Error::UndefinedStatistic("r"))
        ));
    }

    #[test]
    fn p_values_never_zero_and_deterministic() {
        let r = rep(&[0.4, 0.25, 0.15, 0.1, 0.06, 0.04], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        for stat in [Statistic::MeanCost, Statistic::Tau, Statistic::Rho, Statistic::Pearson] {
            let cfg = PermutationTestConfig::monte_carlo(stat, 500, 99);
            let a = permutation_test(&r, &CostModel::Log1p, &cfg).unwrap();
            let b = permutation_test(&r, &CostModel::Log1p, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.p_left > 0.0 && a.p_right > 0.0);
            assert!(a.p_left <= 1.0 && a.p_right <= 1.0);
        }
    }

    #[test]
    fn statistic_names_round_trip() {
        for s in [Statistic::MeanCost, Statistic::Tau, Statistic::Rho, Statistic::Pearson] {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("median".parse::<Statistic>().is_err());
    }
}

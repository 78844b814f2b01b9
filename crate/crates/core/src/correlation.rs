//! Correlation between the probability of a type and its magnitude or cost.
//!
//! Kendall's `τ` is `(n_c - n_d) / n_0` with `n_0 = V(V-1)/2` counting every
//! pair, tied or not. Spearman's `ρ` is the Pearson correlation of mid-ranks.
//! Pearson's `r` between `p` and `λ = g(l)` is computed from `Λ`:
//! `r = (Λ - E[λ]) / (V σ[p] σ[λ])`.

use serde::Serialize;

use crate::cost::{mean, population_sd, CostModel};
use crate::error::{Error, Result};
use crate::repertoire::Repertoire;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConcordanceCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub total_pairs: u64,
}

impl ConcordanceCounts {
    /// Pairs tied in probability or in magnitude.
    pub fn tied(&self) -> u64 {
        self.total_pairs - self.concordant - self.discordant
    }

    pub fn tau(&self) -> f64 {
        (self.concordant as f64 - self.discordant as f64) / self.total_pairs as f64
    }
}

fn total_pairs(v: usize) -> u64 {
    let v = v as u64;
    v * (v - 1) / 2
}

fn require_pairs(v: usize) -> Result<()> {
    if v < 2 {
        Err(Error::TooFewTypes { required: 2, actual: v })
    } else {
        Ok(())
    }
}

pub(crate) fn counts_brute(x: &[f64], y: &[f64]) -> ConcordanceCounts {
    let (mut concordant, mut discordant) = (0u64, 0u64);
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            if x[a] == x[b] || y[a] == y[b] {
                continue;
            }
            if (x[a] < x[b]) == (y[a] < y[b]) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    ConcordanceCounts { concordant, discordant, total_pairs: total_pairs(x.len()) }
}

fn tied_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<T> = None;
    for v in sorted {
        if prev.as_ref() == Some(&v) {
            run += 1;
        } else {
            total += run * (run.saturating_sub(1)) / 2;
            run = 1;
        }
        prev = Some(v);
    }
    total + run * (run.saturating_sub(1)) / 2
}

/// Sorts `ys` ascending, returning the number of strict inversions.
fn sort_count_inversions(ys: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = ys.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = ys.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        sort_count_inversions(left, bl) + sort_count_inversions(right, br)
    };
    let (mut a, mut b, mut k) = (0, mid, 0);
    while a < mid && b < n {
        if ys[b] < ys[a] {
            buf[k] = ys[b];
            swaps += (mid - a) as u64;
            b += 1;
        } else {
            buf[k] = ys[a];
            a += 1;
        }
        k += 1;
    }
    buf[k..k + mid - a].copy_from_slice(&ys[a..mid]);
    k += mid - a;
    buf[k..k + n - b].copy_from_slice(&ys[b..n]);
    ys.copy_from_slice(&buf[..n]);
    swaps
}

/// `O(V log V)` pair classification (sort on `x`, count `y` inversions).
pub(crate) fn counts_fast(x: &[f64], y: &[f64]) -> ConcordanceCounts {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let tied_x = tied_pairs(idx.iter().map(|&k| x[k]));
    let tied_xy = tied_pairs(idx.iter().map(|&k| (x[k], y[k])));
    let mut ys: Vec<f64> = idx.iter().map(|&k| y[k]).collect();
    let mut buf = vec![0.0; n];
    let discordant = sort_count_inversions(&mut ys, &mut buf);
    let tied_y = tied_pairs(ys.iter().copied());
    let total = total_pairs(n);
    ConcordanceCounts { concordant: total - (tied_x + tied_y - tied_xy) - discordant, discordant, total_pairs: total }
}

/// Exact pairwise classification of `(p_i, l_i)` over all pairs.
pub fn concordance_counts(r: &Repertoire) -> Result<ConcordanceCounts> {
    require_pairs(r.len())?;
    Ok(counts_brute(r.probabilities(), r.magnitudes()))
}

/// Same counts as [`concordance_counts`] in `O(V log V)`.
pub fn concordance_counts_fast(r: &Repertoire) -> Result<ConcordanceCounts> {
    require_pairs(r.len())?;
    Ok(counts_fast(r.probabilities(), r.magnitudes()))
}

pub fn kendall_tau(r: &Repertoire) -> Result<f64> {
    Ok(concordance_counts_fast(r)?.tau())
}

/// 1-based ranks with ties sharing their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &idx[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson_plain(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub(crate) fn spearman_of(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson_plain(&midranks(x), &midranks(y))
}

/// Spearman's `ρ`; `None` when either variable is constant.
pub fn spearman_rho(r: &Repertoire) -> Result<Option<f64>> {
    require_pairs(r.len())?;
    Ok(spearman_of(r.probabilities(), r.magnitudes()))
}

/// `Λ - E[λ]`, accumulated as `Σ (p_i - 1/V) λ_i`.
///
/// Mathematically identical to the difference of the two means, but exactly
/// zero for uniform probabilities, so the sign is trustworthy.
pub(crate) fn cost_gap_of(probs: &[f64], costs: &[f64]) -> f64 {
    let uniform = 1.0 / probs.len() as f64;
    probs.iter().zip(costs).map(|(p, c)| (p - uniform) * c).sum()
}

pub fn cost_gap(r: &Repertoire, g: &CostModel) -> f64 {
    cost_gap_of(r.probabilities(), &r.costs(g))
}

fn degenerate(sd: f64, scale: f64) -> bool {
    sd <= 1e-12 * scale
}

/// Pearson `r` from `Λ`: `(Λ - E[λ]) / (V σ[p] σ[λ])`.
pub(crate) fn pearson_from_cost(probs: &[f64], costs: &[f64]) -> Option<f64> {
    let v = probs.len() as f64;
    let sd_p = population_sd(probs, 1.0 / v);
    let sd_c = population_sd(costs, mean(costs));
    let scale_c = costs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if degenerate(sd_p, 1.0 / v) || degenerate(sd_c, scale_c) {
        return None;
    }
    Some(cost_gap_of(probs, costs) / (v * sd_p * sd_c))
}

/// Pearson `r` between `p` and `g(l)`; `None` when a variance vanishes.
pub fn pearson_r(r: &Repertoire, g: &CostModel) -> Result<Option<f64>> {
    require_pairs(r.len())?;
    Ok(pearson_from_cost(r.probabilities(), &r.costs(g)))
}

/// Pearson `r` from the covariance: `(E[pλ] - E[p]E[λ]) / (σ[p] σ[λ])`.
pub fn pearson_r_covariance(r: &Repertoire, g: &CostModel) -> Result<Option<f64>> {
    require_pairs(r.len())?;
    let costs = r.costs(g);
    let probs = r.probabilities();
    let v = probs.len() as f64;
    let (mp, mc) = (mean(probs), mean(&costs));
    let sd_p = population_sd(probs, mp);
    let sd_c = population_sd(&costs, mc);
    let scale_c = costs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if degenerate(sd_p, 1.0 / v) || degenerate(sd_c, scale_c) {
        return Ok(None);
    }
    let cov: f64 = probs.iter().zip(&costs).map(|(p, c)| (p - mp) * (c - mc)).sum::<f64>() / v;
    Ok(Some(cov / (sd_p * sd_c)))
}

/// True iff `Λ < E[λ]`: tokens are cheaper on average than types. When both
/// variances are positive this is exactly `r < 0`.
pub fn sign_criterion(r: &Repertoire, g: &CostModel) -> bool {
    cost_gap(r, g) < 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lower = self.lower.max(other.lower);
        let upper = self.upper.min(other.upper);
        (lower <= upper).then_some(Interval { lower, upper })
    }
}

/// Admissible ranges of `ρ` for a given `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoBounds {
    pub tau: f64,
    pub daniels: Interval,
    pub durbin: Interval,
}

impl RhoBounds {
    pub fn contains(&self, rho: f64, tol: f64) -> bool {
        self.daniels.contains(rho, tol) && self.durbin.contains(rho, tol)
    }
}

/// Daniels: `(3τ-1)/2 <= ρ <= (1+3τ)/2`.
/// Durbin: `(1+τ)²/2 - 1 <= ρ <= 1 - (1-τ)²/2`.
pub fn rho_bounds(tau: f64) -> Result<RhoBounds> {
    if !(-1.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau must lie in [-1, 1], got {tau}")));
    }
    Ok(RhoBounds {
        tau,
        daniels: Interval { lower: (3.0 * tau - 1.0) / 2.0, upper: (1.0 + 3.0 * tau) / 2.0 },
        durbin: Interval { lower: (1.0 + tau).powi(2) / 2.0 - 1.0, upper: 1.0 - (1.0 - tau).powi(2) / 2.0 },
    })
}

/// Online memory cost of a sentence of `sentence_length` words:
/// `D = (n - 1) Σ p(d) g(d)` over dependency lengths `d` in `1..n-1`.
pub fn dependency_cost(distribution: &[(u32, f64)], sentence_length: u32, g: &CostModel) -> Result<f64> {
    if sentence_length < 2 {
        return Err(Error::InvalidParameter("sentence length must be >= 2".into()));
    }
    let mut total_p = 0.0;
    let mut acc = 0.0;
    for &(d, p) in distribution {
        if d < 1 || d > sentence_length - 1 {
            return Err(Error::InvalidParameter(format!("dependency length {d} outside 1..={}", sentence_length - 1)));
        }
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid proportion {p} for d = {d}")));
        }
        total_p += p;
        acc += p * g.cost(d as f64);
    }
    if (total_p - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("dependency length proportions sum to {total_p}, not 1")));
    }
    Ok((sentence_length - 1) as f64 * acc)
}

/// Tolerance used when checking an observed `ρ` against its bounds.
pub const BOUNDS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub counts: ConcordanceCounts,
    pub tau: f64,
    pub rho: Option<f64>,
    pub r: Option<f64>,
    pub bounds: RhoBounds,
    pub rho_within_bounds: Option<bool>,
    pub sign_criterion: bool,
}

pub fn correlation_report(r: &Repertoire, g: &CostModel) -> Result<CorrelationReport> {
    let counts = concordance_counts_fast(r)?;
    let tau = counts.tau();
    let rho = spearman_rho(r)?;
    let bounds = rho_bounds(tau)?;
    Ok(CorrelationReport {
        counts,
        tau,
        rho,
        r: pearson_r(r, g)?,
        bounds,
        rho_within_bounds: rho.map(|x| bounds.contains(x, BOUNDS_TOLERANCE)),
        sign_criterion: sign_criterion(r, g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rep(p: &[f64], l: &[f64]) -> Repertoire {
        Repertoire::from_values(p, l).unwrap()
    }

    #[test]
    fn counts_examples() {
        let c = concordance_counts(&rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!((c.concordant, c.discordant, c.total_pairs), (0, 3, 3));
        let c = concordance_counts(&rep(&[0.5, 0.3, 0.2], &[1.0, 1.0, 2.0])).unwrap();
        assert_eq!((c.concordant, c.discordant, c.tied()), (0, 2, 1));
        let c = concordance_counts(&rep(&[1.0; 10], &[1.0; 10])).unwrap();
        assert_eq!(c.total_pairs, 45);
        assert!(concordance_counts(&rep(&[1.0], &[1.0])).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(kendall_tau(&rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0])).unwrap(), -1.0);
        let t = kendall_tau(&rep(&[0.5, 0.3, 0.2], &[1.0, 1.0, 2.0])).unwrap();
        assert!((t + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(kendall_tau(&rep(&[0.5, 0.3, 0.2], &[4.0; 3])).unwrap(), 0.0);
    }

    #[test]
    fn rho_examples() {
        let r = spearman_rho(&rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0])).unwrap().unwrap();
        assert!((r + 1.0).abs() < 1e-15);
        let r = spearman_rho(&rep(&[0.1, 0.2, 0.3, 0.4], &[1.0, 2.0, 3.0, 4.0])).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        let r = spearman_rho(&rep(&[0.7, 0.3], &[1.0, 2.0])).unwrap().unwrap();
        assert!((r + 1.0).abs() < 1e-15);
        assert_eq!(spearman_rho(&rep(&[0.7, 0.3], &[2.0, 2.0])).unwrap(), None);
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn pearson_examples() {
        let r = pearson_r(&rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0]), &CostModel::Identity).unwrap().unwrap();
        assert!((r + 0.98198).abs() < 1e-5, "{r}");
        assert_eq!(pearson_r(&rep(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0]), &CostModel::Identity).unwrap(), None);
        let r = pearson_r(&rep(&[0.7, 0.3], &[1.0, 2.0]), &CostModel::Identity).unwrap().unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_examples() {
        let id = CostModel::Identity;
        assert!(sign_criterion(&rep(&[0.5, 0.3, 0.2], &[1.0, 2.0, 3.0]), &id));
        assert!(!sign_criterion(&rep(&[1.0; 10], &(1..=10).map(f64::from).collect::<Vec<_>>()), &id));
        assert!(!sign_criterion(&rep(&[0.2, 0.3, 0.5], &[1.0, 2.0, 3.0]), &id));
    }

    #[test]
    fn bounds_examples() {
        let b = rho_bounds(-1.0).unwrap();
        assert_eq!((b.durbin.lower, b.durbin.upper), (-1.0, -1.0));
        let b = rho_bounds(0.0).unwrap();
        assert_eq!((b.daniels.lower, b.daniels.upper), (-0.5, 0.5));
        assert_eq!((b.durbin.lower, b.durbin.upper), (-0.5, 0.5));
        let b = rho_bounds(1.0).unwrap();
        assert_eq!((b.durbin.lower, b.durbin.upper), (1.0, 1.0));
        assert!(rho_bounds(1.5).is_err());
        assert!(rho_bounds(f64::NAN).is_err());
    }

    #[test]
    fn bound_intersection_nonempty_on_grid() {
        for k in -1000..=1000 {
            let b = rho_bounds(k as f64 / 1000.0).unwrap();
            assert!(b.daniels.lower <= b.daniels.upper && b.durbin.lower <= b.durbin.upper);
            assert!(b.daniels.intersect(&b.durbin).is_some(), "tau={k}e-3");
        }
    }

    #[test]
    fn dependency_examples() {
        let id = CostModel::Identity;
        assert!((dependency_cost(&[(1, 0.5), (2, 0.5)], 3, &id).unwrap() - 3.0).abs() < 1e-12);
        assert!((dependency_cost(&[(1, 1.0)], 2, &id).unwrap() - 1.0).abs() < 1e-12);
        let sq = CostModel::Power(2.0);
        assert!((dependency_cost(&[(1, 1.0)], 4, &sq).unwrap() - 3.0).abs() < 1e-12);
        assert!(dependency_cost(&[(1, 0.5)], 3, &id).is_err());
        assert!(dependency_cost(&[(3, 1.0)], 3, &id).is_err());
        assert!(dependency_cost(&[(1, 1.0)], 1, &id).is_err());
    }

    #[test]
    fn dependency_cost_is_scaled_mean_cost() {
        let dist = [(1u32, 0.5), (2, 0.3), (3, 0.15), (4, 0.05)];
        let g = CostModel::Log1p;
        let d = dependency_cost(&dist, 5, &g).unwrap();
        let r = Repertoire::from_frequencies(dist.iter().map(|&(d, p)| (d.to_string(), p, d as f64))).unwrap();
        assert!((d - 4.0 * crate::cost::mean_cost(&r, &g)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn fast_counts_match_brute(pairs in prop::collection::vec((0u8..6, 0u8..6), 2..60)) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64 + 1.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64 + 1.0).collect();
            prop_assert_eq!(counts_fast(&x, &y), counts_brute(&x, &y));
        }

        #[test]
        fn pearson_routes_agree(pairs in prop::collection::vec((0.01f64..10.0, 0.5f64..20.0), 2..50)) {
            let (f, l): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = rep(&f, &l);
            for g in [CostModel::Identity, CostModel::Power(2.0), CostModel::Log1p] {
                let a = pearson_r(&r, &g).unwrap();
                let b = pearson_r_covariance(&r, &g).unwrap();
                match (a, b) {
                    (Some(a), Some(b)) => {
                        prop_assert!((a - b).abs() <= 1e-10);
                        prop_assert_eq!(a < 0.0, sign_criterion(&r, &g));
                    }
                    (None, None) => {}
                    _ => prop_assert!(false, "definedness differs"),
                }
            }
        }
    }
}

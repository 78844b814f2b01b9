//! Optimal coding of a repertoire.
//!
//! Under non-singular codes (distinct strings for distinct types) the optimum
//! assigns the `i`-th shortest string over an `N`-symbol alphabet to the
//! `i`-th most probable type. The length of that string has the closed form
//! `⌈log_N((N-1)/N · i + 1)⌉` (and `i` when `N = 1`). Uniquely decipherable
//! codes instead get lengths `⌈-log_N p⌉`.

use serde::Serialize;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::repertoire::Repertoire;

/// Symbols used when no alphabet is supplied: `0-9` then `a-z`.
pub const DEFAULT_SYMBOLS: &str = "0123456789abcdefghijklmnopqrstuvwxyz";

pub fn default_alphabet(alphabet_size: usize) -> Result<Vec<char>> {
    if alphabet_size == 0 {
        return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
    }
    if alphabet_size > DEFAULT_SYMBOLS.len() {
        return Err(Error::InvalidParameter(format!(
            "default alphabet has {} symbols; supply an alphabet for N = {alphabet_size}",
            DEFAULT_SYMBOLS.len()
        )));
    }
    Ok(DEFAULT_SYMBOLS.chars().take(alphabet_size).collect())
}

fn check_alphabet(symbols: &[char]) -> Result<()> {
    if symbols.is_empty() {
        return Err(Error::InvalidParameter("alphabet must not be empty".into()));
    }
    for (k, c) in symbols.iter().enumerate() {
        if symbols[..k].contains(c) {
            return Err(Error::InvalidParameter(format!("duplicate alphabet symbol `{c}`")));
        }
    }
    Ok(())
}

/// The `count` shortest strings over `symbols`, by increasing length and in
/// alphabet order within a length.
fn shortest_strings(symbols: &[char], count: usize) -> Vec<String> {
    let n = symbols.len();
    let mut out = Vec::with_capacity(count);
    let mut len = 1;
    while out.len() < count {
        let mut digits = vec![0usize; len];
        'this_length: loop {
            out.push(digits.iter().map(|&d| symbols[d]).collect());
            if out.len() == count {
                break;
            }
            let mut k = len;
            loop {
                if k == 0 {
                    break 'this_length;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < n {
                    break;
                }
                digits[k] = 0;
            }
        }
        len += 1;
    }
    out
}

/// Lists the `count` shortest strings over an alphabet of `alphabet_size`
/// symbols. `alphabet`, when given, must hold exactly `alphabet_size` distinct
/// symbols; otherwise [`DEFAULT_SYMBOLS`] is used.
pub fn enumerate_shortest_strings(
    alphabet_size: usize,
    count: usize,
    alphabet: Option<&[char]>,
) -> Result<Vec<String>> {
    if alphabet_size == 0 {
        return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("number of strings must be >= 1".into()));
    }
    let symbols = match alphabet {
        Some(a) => {
            check_alphabet(a)?;
            if a.len() != alphabet_size {
                return Err(Error::InvalidParameter(format!(
                    "alphabet has {} symbols but N = {alphabet_size}",
                    a.len()
                )));
            }
            a.to_vec()
        }
        None => default_alphabet(alphabet_size)?,
    };
    Ok(shortest_strings(&symbols, count))
}

fn checked_pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}

/// Length of the string of rank `rank` (1-based) in the optimal non-singular
/// code over `alphabet_size` symbols.
///
/// The ceiling of the logarithm is evaluated exactly: a floating-point
/// estimate is corrected against the integer condition
/// `N^(l+1) >= (N-1)·i + N`, which is `N^l >= (N-1)/N · i + 1` scaled by `N`.
pub fn optimal_nonsingular_length(rank: u64, alphabet_size: u64) -> Result<u32> {
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be >= 1".into()));
    }
    match alphabet_size {
        0 => Err(Error::InvalidParameter("alphabet size must be >= 1".into())),
        1 => u32::try_from(rank).map_err(|_| Error::InvalidParameter(format!("rank {rank} too large for N = 1"))),
        n => {
            let nf = n as f64;
            let estimate = (((nf - 1.0) / nf) * rank as f64 + 1.0).log(nf).ceil();
            let mut len = (estimate as u32).max(1);
            let target = (n as u128 - 1) * rank as u128 + n as u128;
            let n = n as u128;
            while checked_pow(n, len + 1) < target {
                len += 1;
            }
            while len > 1 && checked_pow(n, len) >= target {
                len -= 1;
            }
            Ok(len)
        }
    }
}

/// Optimal uniquely decipherable code length `max(1, ⌈-log_N p⌉)`.
///
/// Probabilities within a relative `1e-12` of a power of `1/N` are treated as
/// that power, so `p = 1/8, N = 2` gives exactly 3. The lower clamp turns the
/// zero length of `p = 1` into a usable one-symbol code.
pub fn ud_optimal_length(probability: f64, alphabet_size: u64) -> Result<u32> {
    if !(probability > 0.0 && probability <= 1.0) {
        return Err(Error::InvalidParameter(format!("probability must lie in (0, 1], got {probability}")));
    }
    if alphabet_size < 2 {
        return Err(Error::InvalidParameter("uniquely decipherable lengths need N >= 2".into()));
    }
    let exact = -probability.ln() / (alphabet_size as f64).ln();
    let len = (exact - 1e-12 * exact.max(1.0)).ceil();
    Ok((len as u32).max(1))
}

/// Largest length used, and how many strings of that length are needed, when
/// `types` distinct strings are taken shortest-first over `alphabet_size`
/// symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthLayout {
    pub max_length: u32,
    pub max_length_count: u64,
}

pub fn length_layout(types: u64, alphabet_size: u64) -> Result<LengthLayout> {
    if types == 0 || alphabet_size == 0 {
        return Err(Error::InvalidParameter("V and N must be >= 1".into()));
    }
    let n = alphabet_size as u128;
    let mut below: u128 = 0;
    let mut len = 1u32;
    loop {
        let here = checked_pow(n, len);
        if below.saturating_add(here) >= types as u128 {
            return Ok(LengthLayout { max_length: len, max_length_count: (types as u128 - below) as u64 });
        }
        below += here;
        len += 1;
    }
}

/// A non-singular code for a repertoire, aligned with decreasing probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeAssignment {
    pub alphabet_size: usize,
    /// `order[k]` is the repertoire index of the `k`-th most probable type.
    pub order: Vec<usize>,
    pub codes: Vec<String>,
    pub lengths: Vec<u32>,
    pub max_length: u32,
    pub max_length_count: u64,
}

impl CodeAssignment {
    /// `Λ` of the repertoire when each type's magnitude is its code length.
    pub fn mean_cost(&self, r: &Repertoire, g: &CostModel) -> f64 {
        self.order.iter().zip(&self.lengths).map(|(&idx, &len)| r.probabilities()[idx] * g.cost(len as f64)).sum()
    }

    /// The repertoire with magnitudes replaced by code lengths, in its
    /// original item order.
    pub fn to_repertoire(&self, r: &Repertoire) -> Repertoire {
        let mut mags = vec![0.0; r.len()];
        for (&idx, &len) in self.order.iter().zip(&self.lengths) {
            mags[idx] = len as f64;
        }
        r.with_magnitudes(mags).expect("code lengths are positive")
    }
}

/// Optimal non-singular code with the default alphabet of `alphabet_size`
/// symbols. Probability ties are broken by input order.
pub fn optimal_nonsingular_assign(r: &Repertoire, alphabet_size: usize) -> Result<CodeAssignment> {
    let symbols = default_alphabet(alphabet_size)?;
    optimal_nonsingular_assign_with(r, &symbols)
}

pub fn optimal_nonsingular_assign_with(r: &Repertoire, alphabet: &[char]) -> Result<CodeAssignment> {
    check_alphabet(alphabet)?;
    let order = r.rank_order();
    let codes = shortest_strings(alphabet, r.len());
    let lengths: Vec<u32> = codes.iter().map(|c| c.chars().count() as u32).collect();
    let layout = length_layout(r.len() as u64, alphabet.len() as u64)?;
    Ok(CodeAssignment {
        alphabet_size: alphabet.len(),
        order,
        codes,
        lengths,
        max_length: layout.max_length,
        max_length_count: layout.max_length_count,
    })
}

/// Optimal non-singular code lengths in repertoire order, for any `N >= 1`.
pub fn optimal_nonsingular_lengths(r: &Repertoire, alphabet_size: u64) -> Result<Vec<u32>> {
    let mut lengths = vec![0; r.len()];
    for (rank, idx) in r.rank_order().into_iter().enumerate() {
        lengths[idx] = optimal_nonsingular_length(rank as u64 + 1, alphabet_size)?;
    }
    Ok(lengths)
}

/// Optimal uniquely decipherable lengths in repertoire order.
pub fn ud_optimal_lengths(r: &Repertoire, alphabet_size: u64) -> Result<Vec<u32>> {
    r.probabilities().iter().map(|&p| ud_optimal_length(p, alphabet_size)).collect()
}

/// Canonical prefix code over the optimal uniquely decipherable lengths.
///
/// Types are taken by decreasing probability, so lengths never decrease; each
/// code is the previous one plus one, padded with the first symbol to the new
/// length. The Kraft inequality guarantees the counter never overflows.
pub fn ud_assign(r: &Repertoire, alphabet_size: usize) -> Result<CodeAssignment> {
    let symbols = default_alphabet(alphabet_size)?;
    if alphabet_size < 2 {
        return Err(Error::InvalidParameter("uniquely decipherable codes need N >= 2".into()));
    }
    let order = r.rank_order();
    let mut lengths = Vec::with_capacity(r.len());
    for &idx in &order {
        let len = ud_optimal_length(r.probabilities()[idx], alphabet_size as u64)?;
        lengths.push(len.max(lengths.last().copied().unwrap_or(0)));
    }
    let mut codes = Vec::with_capacity(r.len());
    let mut digits: Vec<usize> = Vec::new();
    for (k, &len) in lengths.iter().enumerate() {
        if k > 0 {
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    return Err(Error::InvalidParameter("code lengths violate the Kraft inequality".into()));
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < alphabet_size {
                    break;
                }
                digits[pos] = 0;
            }
        }
        digits.resize(len as usize, 0);
        codes.push(digits.iter().map(|&d| symbols[d]).collect());
    }
    let max_length = lengths.last().copied().unwrap_or(0);
    let max_length_count = lengths.iter().filter(|&&l| l == max_length).count() as u64;
    Ok(CodeAssignment { alphabet_size, order, codes, lengths, max_length, max_length_count })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnconstrainedOptimum {
    pub magnitudes: Vec<f64>,
    pub mean_cost: f64,
    /// Set when an alphabet size was given and `V > N`: one-symbol strings
    /// cannot keep all types distinct.
    pub indistinguishable: bool,
}

/// Minimum of `Λ` with no distinctness constraint: every type gets
/// `min_magnitude`.
pub fn unconstrained_optimum(
    r: &Repertoire,
    g: &CostModel,
    min_magnitude: f64,
    alphabet_size: Option<u64>,
) -> Result<UnconstrainedOptimum> {
    if !(min_magnitude > 0.0 && min_magnitude.is_finite()) {
        return Err(Error::InvalidParameter(format!("minimum magnitude must be positive, got {min_magnitude}")));
    }
    Ok(UnconstrainedOptimum {
        magnitudes: vec![min_magnitude; r.len()],
        mean_cost: g.cost(min_magnitude),
        indistinguishable: alphabet_size.is_some_and(|n| r.len() as u64 > n),
    })
}

/// Smallest achievable `E[λ]` for `types` distinct strings over
/// `alphabet_size` symbols: all `N^l` strings of each length below `l_max`
/// plus `U` strings of length `l_max`, averaged over the `V` types.
pub fn min_type_mean_cost(types: u64, alphabet_size: u64, g: &CostModel) -> Result<f64> {
    let layout = length_layout(types, alphabet_size)?;
    let mut total = 0.0;
    for len in 1..layout.max_length {
        total += (alphabet_size as f64).powi(len as i32) * g.cost(len as f64);
    }
    total += layout.max_length_count as f64 * g.cost(layout.max_length as f64);
    Ok(total / types as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_enumeration() {
        let s = enumerate_shortest_strings(2, 10, None).unwrap();
        assert_eq!(s, ["0", "1", "00", "01", "10", "11", "000", "001", "010", "011"]);
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_shortest_strings(3, 3, None).unwrap(), ["0", "1", "2"]);
        assert_eq!(enumerate_shortest_strings(1, 4, None).unwrap(), ["0", "00", "000", "0000"]);
        let ab = ['a', 'b'];
        assert_eq!(enumerate_shortest_strings(2, 4, Some(&ab)).unwrap(), ["a", "b", "aa", "ab"]);
    }

    #[test]
    fn enumeration_errors() {
        assert!(enumerate_shortest_strings(0, 3, None).is_err());
        assert!(enumerate_shortest_strings(2, 0, None).is_err());
        assert!(enumerate_shortest_strings(3, 3, Some(&['a', 'b'])).is_err());
        assert!(enumerate_shortest_strings(2, 3, Some(&['a', 'a'])).is_err());
        assert!(enumerate_shortest_strings(37, 3, None).is_err());
    }

    #[test]
    fn closed_form_lengths() {
        assert_eq!(optimal_nonsingular_length(7, 2).unwrap(), 3);
        assert_eq!(optimal_nonsingular_length(5, 1).unwrap(), 5);
        assert_eq!(optimal_nonsingular_length(2, 2).unwrap(), 1);
        assert_eq!(optimal_nonsingular_length(3, 2).unwrap(), 2);
        assert_eq!(optimal_nonsingular_length(6, 2).unwrap(), 2);
        assert!(optimal_nonsingular_length(0, 2).is_err());
        assert!(optimal_nonsingular_length(1, 0).is_err());
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for n in 1..=6usize {
            let strings = enumerate_shortest_strings(n, 3000, None).unwrap();
            for (k, s) in strings.iter().enumerate() {
                let l = optimal_nonsingular_length(k as u64 + 1, n as u64).unwrap();
                assert_eq!(l as usize, s.len(), "N={n} i={}", k + 1);
            }
        }
    }

    #[test]
    fn closed_form_near_log() {
        for n in 2..=6u64 {
            for i in [1_000u64, 5_000, 77_777, 1 << 40] {
                let l = optimal_nonsingular_length(i, n).unwrap() as f64;
                assert!((l - (i as f64).log(n as f64)).abs() <= 1.0, "N={n} i={i}");
            }
        }
    }

    #[test]
    fn ud_lengths() {
        assert_eq!(ud_optimal_length(0.125, 2).unwrap(), 3);
        assert_eq!(ud_optimal_length(0.2, 2).unwrap(), 3);
        assert_eq!(ud_optimal_length(1.0, 2).unwrap(), 1);
        assert_eq!(ud_optimal_length(1.0 / 3.0, 3).unwrap(), 1);
        assert_eq!(ud_optimal_length(1.0 / 9.0, 3).unwrap(), 2);
        assert!(ud_optimal_length(0.0, 2).is_err());
        assert!(ud_optimal_length(1.5, 2).is_err());
        assert!(ud_optimal_length(0.5, 1).is_err());
    }

    #[test]
    fn ud_codes_are_prefix_free() {
        let r = Repertoire::from_values(&[0.4, 0.2, 0.15, 0.1, 0.1, 0.05], &[1.0; 6]).unwrap();
        let a = ud_assign(&r, 2).unwrap();
        assert_eq!(a.lengths, [2, 3, 3, 4, 4, 5]);
        assert_eq!(a.codes, ["00", "010", "011", "1000", "1001", "10100"]);
        for (x, cx) in a.codes.iter().enumerate() {
            for (y, cy) in a.codes.iter().enumerate() {
                assert!(x == y || !cy.starts_with(cx.as_str()), "{cx} prefixes {cy}");
            }
        }
        let dyadic = Repertoire::from_values(&[0.5, 0.25, 0.125, 0.125], &[1.0; 4]).unwrap();
        assert_eq!(ud_assign(&dyadic, 2).unwrap().codes, ["0", "10", "110", "111"]);
        assert!(ud_assign(&dyadic, 1).is_err());
    }

    #[test]
    fn assignment_examples() {
        let r = Repertoire::from_values(&[0.5, 0.3, 0.2], &[1.0; 3]).unwrap();
        let a = optimal_nonsingular_assign(&r, 2).unwrap();
        assert_eq!(a.lengths, [1, 1, 2]);
        assert_eq!(a.codes, ["0", "1", "00"]);

        let one = Repertoire::from_values(&[1.0], &[4.0]).unwrap();
        for n in 1..5 {
            assert_eq!(optimal_nonsingular_assign(&one, n).unwrap().lengths, [1]);
        }

        let uniform = Repertoire::from_values(&[1.0; 10], &[1.0; 10]).unwrap();
        let a = optimal_nonsingular_assign(&uniform, 2).unwrap();
        assert_eq!(a.lengths, [1, 1, 2, 2, 2, 2, 3, 3, 3, 3]);
        assert!((a.mean_cost(&uniform, &CostModel::Identity) - 2.2).abs() < 1e-12);
        assert_eq!((a.max_length, a.max_length_count), (3, 4));
    }

    #[test]
    fn assignment_follows_probability_rank() {
        let r = Repertoire::from_values(&[0.1, 0.6, 0.3], &[1.0; 3]).unwrap();
        let a = optimal_nonsingular_assign(&r, 2).unwrap();
        assert_eq!(a.order, [1, 2, 0]);
        let coded = a.to_repertoire(&r);
        assert_eq!(coded.magnitudes(), &[2.0, 1.0, 1.0]);
        assert_eq!(optimal_nonsingular_lengths(&r, 2).unwrap(), [2, 1, 1]);
    }

    #[test]
    fn codes_are_distinct() {
        for n in 1..=4 {
            for v in [1usize, 2, 5, 17, 200] {
                let r = Repertoire::from_values(&vec![1.0; v], &vec![1.0; v]).unwrap();
                let a = optimal_nonsingular_assign(&r, n).unwrap();
                let set: std::collections::HashSet<_> = a.codes.iter().collect();
                assert_eq!(set.len(), v);
            }
        }
    }

    #[test]
    fn length_ties_once_v_exceeds_n() {
        for n in 2..=4usize {
            for v in (n + 1).max(3)..40 {
                let freqs: Vec<f64> = (0..v).map(|k| (v - k) as f64).collect();
                let r = Repertoire::from_values(&freqs, &vec![1.0; v]).unwrap();
                let a = optimal_nonsingular_assign(&r, n).unwrap();
                assert!(a.lengths.windows(2).any(|w| w[0] == w[1]), "N={n} V={v}");
                assert!(a.lengths.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn unconstrained() {
        let r = Repertoire::from_values(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        let u = unconstrained_optimum(&r, &CostModel::Identity, 1.0, None).unwrap();
        assert_eq!(u.magnitudes, [1.0, 1.0, 1.0]);
        assert_eq!(u.mean_cost, 1.0);
        assert!(!u.indistinguishable);

        let r5 = Repertoire::from_values(&[1.0; 5], &[1.0; 5]).unwrap();
        assert!(unconstrained_optimum(&r5, &CostModel::Identity, 1.0, Some(2)).unwrap().indistinguishable);
        assert!(!unconstrained_optimum(&r5, &CostModel::Identity, 1.0, Some(5)).unwrap().indistinguishable);
        assert!(unconstrained_optimum(&r5, &CostModel::Identity, 0.0, None).is_err());
    }

    #[test]
    fn type_mean_cost_bound() {
        let id = CostModel::Identity;
        assert!((min_type_mean_cost(10, 2, &id).unwrap() - 2.2).abs() < 1e-12);
        assert!((min_type_mean_cost(2, 2, &id).unwrap() - 1.0).abs() < 1e-12);
        assert!((min_type_mean_cost(3, 1, &id).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn type_mean_cost_matches_uniform_assignment() {
        for g in [CostModel::Identity, CostModel::Power(2.0), CostModel::Log1p] {
            for n in 1..=4usize {
                for v in 1..60usize {
                    let r = Repertoire::from_values(&vec![1.0; v], &vec![1.0; v]).unwrap();
                    let a = optimal_nonsingular_assign(&r, n).unwrap();
                    let direct = a.mean_cost(&r, &g);
                    let bound = min_type_mean_cost(v as u64, n as u64, &g).unwrap();
                    assert!((direct - bound).abs() < 1e-9, "g={g} N={n} V={v}");
                }
            }
        }
    }

    #[test]
    fn layouts() {
        assert_eq!(length_layout(10, 2).unwrap(), LengthLayout { max_length: 3, max_length_count: 4 });
        assert_eq!(length_layout(2, 2).unwrap(), LengthLayout { max_length: 1, max_length_count: 2 });
        assert_eq!(length_layout(6, 2).unwrap(), LengthLayout { max_length: 2, max_length_count: 4 });
        assert_eq!(length_layout(3, 1).unwrap(), LengthLayout { max_length: 3, max_length_count: 1 });
    }
}

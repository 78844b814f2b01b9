//! Swap dynamics: exchanging two probabilities or two magnitudes, the exact
//! discrete derivatives of `Λ`, `n_c` and `τ` under such a swap, and a
//! hill-climb that removes concordant pairs.
//!
//! Indices are 0-based throughout.
//!
//! For a magnitude swap the indicator matrices are `a_xy = [p_x < p_y]` and
//! `b_xy = [l_x < l_y]`, with `n_c = Σ a_xy b_xy`. For tie-free data the
//! change in `n_c` when `l_i` and `l_j` are exchanged is
//! `2 Σ_y α_y β_y + 1`, where `α_y = a_iy - a_jy` and `β_y = b_jy - b_iy`.
//! A probability swap is the same computation with the roles of the two
//! matrices exchanged.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::correlation::counts_brute;
use crate::cost::{mean_cost, CostModel};
use crate::error::{Error, Result};
use crate::repertoire::Repertoire;
use crate::rng;

pub use crate::repertoire::SwapKind;

/// Indicator matrices `A` and `B` over two aligned value vectors.
///
/// `a(x, y) = [first_x < first_y]`, `b(x, y) = [second_x < second_y]`; the swap
/// under study exchanges two entries of `second`. Entries are evaluated on
/// demand rather than stored.
#[derive(Debug, Clone, Copy)]
pub struct PairIndicators<'a> {
    first: &'a [f64],
    second: &'a [f64],
}

impl<'a> PairIndicators<'a> {
    pub fn new(first: &'a [f64], second: &'a [f64]) -> Self {
        assert_eq!(first.len(), second.len(), "indicator vectors must be aligned");
        Self { first, second }
    }

    /// Indicators for a swap of the given kind: the swapped values go in `B`.
    pub fn for_swap(r: &'a Repertoire, kind: SwapKind) -> Self {
        match kind {
            SwapKind::Magnitude => Self::new(r.probabilities(), r.magnitudes()),
            SwapKind::Probability => Self::new(r.magnitudes(), r.probabilities()),
        }
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    #[inline]
    pub fn a(&self, x: usize, y: usize) -> i64 {
        (self.first[x] < self.first[y]) as i64
    }

    #[inline]
    pub fn b(&self, x: usize, y: usize) -> i64 {
        (self.second[x] < self.second[y]) as i64
    }

    #[inline]
    pub fn c(&self, x: usize, y: usize) -> i64 {
        self.a(x, y) * self.b(x, y)
    }

    /// `n_c = Σ_{x,y} a_xy b_xy`.
    pub fn concordant_pairs(&self) -> i64 {
        let v = self.len();
        (0..v).map(|x| (0..v).map(|y| self.c(x, y)).sum::<i64>()).sum()
    }

    pub fn alpha(&self, i: usize, j: usize) -> Vec<i64> {
        (0..self.len()).map(|y| self.a(i, y) - self.a(j, y)).collect()
    }

    pub fn beta(&self, i: usize, j: usize) -> Vec<i64> {
        (0..self.len()).map(|y| self.b(j, y) - self.b(i, y)).collect()
    }

    /// `γ` by definition: the entries of `C` in rows `i`, `j` and columns
    /// `i`, `j`, each entry counted once.
    pub fn gamma_direct(&self, i: usize, j: usize) -> i64 {
        let v = self.len();
        let mut total = 0;
        for x in 0..v {
            for y in 0..v {
                if x == i || x == j || y == i || y == j {
                    total += self.c(x, y);
                }
            }
        }
        total
    }

    /// `γ` in closed form (tie-free data):
    /// `Σ_y [a_iy(2b_iy - 1) + a_jy(2b_jy - 1)] - Σ_y (b_iy + b_jy)
    ///  + 2(V - 1) - a_ij b_ij - a_ji b_ji`.
    pub fn gamma_closed(&self, i: usize, j: usize) -> i64 {
        let v = self.len();
        let mut total = 0;
        for y in 0..v {
            total += self.a(i, y) * (2 * self.b(i, y) - 1) + self.a(j, y) * (2 * self.b(j, y) - 1);
            total -= self.b(i, y) + self.b(j, y);
        }
        total + 2 * (v as i64 - 1) - self.c(i, j) - self.c(j, i)
    }

    /// `γ'`, the value of `γ` after exchanging `second[i]` and `second[j]`,
    /// in closed form over the matrices before the swap (tie-free data):
    /// `Σ_y [a_iy(2b_jy - 1) + a_jy(2b_iy - 1)] - Σ_y (b_iy + b_jy)
    ///  + 2(V - a_ij b_ij - 1) + a_ij + b_ij`.
    pub fn gamma_after_closed(&self, i: usize, j: usize) -> i64 {
        let v = self.len();
        let mut total = 0;
        for y in 0..v {
            total += self.a(i, y) * (2 * self.b(j, y) - 1) + self.a(j, y) * (2 * self.b(i, y) - 1);
            total -= self.b(i, y) + self.b(j, y);
        }
        total + 2 * (v as i64 - self.c(i, j) - 1) + self.a(i, j) + self.b(i, j)
    }

    /// `Δ_nc = 2 Σ_y α_y β_y + 1` (tie-free data).
    pub fn delta_nc_closed(&self, i: usize, j: usize) -> i64 {
        let dot: i64 = (0..self.len()).map(|y| (self.a(i, y) - self.a(j, y)) * (self.b(j, y) - self.b(i, y))).sum();
        2 * dot + 1
    }
}

fn has_ties(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// `Δ_Λ = (p_i - p_j)(g(l_j) - g(l_i))`, the same for both swap kinds.
pub fn swap_delta_cost(r: &Repertoire, g: &CostModel, i: usize, j: usize) -> Result<f64> {
    r.check_pair(i, j)?;
    let p = r.probabilities();
    let l = r.magnitudes();
    Ok((p[i] - p[j]) * (g.cost(l[j]) - g.cost(l[i])))
}

/// Change in `n_c` from the closed form. Refuses input with ties in either
/// probabilities or magnitudes.
pub fn swap_delta_nc(r: &Repertoire, i: usize, j: usize, kind: SwapKind) -> Result<i64> {
    r.check_pair(i, j)?;
    if has_ties(r.probabilities()) {
        return Err(Error::TiesPresent("probabilities"));
    }
    if has_ties(r.magnitudes()) {
        return Err(Error::TiesPresent("magnitudes"));
    }
    Ok(PairIndicators::for_swap(r, kind).delta_nc_closed(i, j))
}

/// Change in `n_c` by recounting every pair before and after the swap.
pub fn swap_delta_nc_general(r: &Repertoire, i: usize, j: usize, kind: SwapKind) -> Result<i64> {
    let after = apply_swap(r, i, j, kind)?;
    let before = counts_brute(r.probabilities(), r.magnitudes()).concordant as i64;
    let after = counts_brute(after.probabilities(), after.magnitudes()).concordant as i64;
    Ok(after - before)
}

/// `Δ_τ` of a tie-free repertoire. There `τ = 2 n_c / n_0 - 1`, so the
/// derivative is `2 Δ_nc / n_0`.
pub fn swap_delta_tau(delta_nc: i64, types: usize) -> Result<f64> {
    if types < 2 {
        return Err(Error::TooFewTypes { required: 2, actual: types });
    }
    let n0 = (types * (types - 1) / 2) as f64;
    Ok(2.0 * delta_nc as f64 / n0)
}

pub fn apply_swap(r: &Repertoire, i: usize, j: usize, kind: SwapKind) -> Result<Repertoire> {
    r.check_pair(i, j)?;
    let mut out = r.clone();
    out.swap_in_place(i, j, kind);
    Ok(out)
}

/// Classification sum over the pairs touching `i` or `j`, as
/// `(concordant, discordant)`.
fn local_counts(p: &[f64], l: &[f64], i: usize, j: usize) -> (i64, i64) {
    let classify = |x: usize, y: usize| -> (i64, i64) {
        if p[x] == p[y] || l[x] == l[y] {
            (0, 0)
        } else if (p[x] < p[y]) == (l[x] < l[y]) {
            (1, 0)
        } else {
            (0, 1)
        }
    };
    let mut acc = classify(i, j);
    for y in 0..p.len() {
        if y == i || y == j {
            continue;
        }
        for x in [i, j] {
            let (c, d) = classify(x, y);
            acc.0 += c;
            acc.1 += d;
        }
    }
    acc
}

/// Changes `(Δn_c, Δn_d)` of a swap in `O(V)`, valid with ties.
pub fn swap_delta_counts(r: &Repertoire, i: usize, j: usize, kind: SwapKind) -> Result<(i64, i64)> {
    let after = apply_swap(r, i, j, kind)?;
    let (c0, d0) = local_counts(r.probabilities(), r.magnitudes(), i, j);
    let (c1, d1) = local_counts(after.probabilities(), after.magnitudes(), i, j);
    Ok((c1 - c0, d1 - d0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapEvent {
    pub kind: SwapKind,
    pub i: usize,
    pub j: usize,
    pub delta_cost: f64,
    pub delta_nc: i64,
    /// `Δ(n_c - n_d) / n_0`; equals `2 Δ_nc / n_0` without ties.
    pub delta_tau: f64,
}

/// Describes the swap of `(i, j)` on `r` without applying it.
pub fn swap_event(r: &Repertoire, g: &CostModel, i: usize, j: usize, kind: SwapKind) -> Result<SwapEvent> {
    let delta_cost = swap_delta_cost(r, g, i, j)?;
    let (dc, dd) = swap_delta_counts(r, i, j, kind)?;
    let v = r.len();
    let n0 = (v * (v - 1) / 2) as f64;
    Ok(SwapEvent { kind, i, j, delta_cost, delta_nc: dc, delta_tau: (dc - dd) as f64 / n0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimization {
    #[serde(skip)]
    pub repertoire: Repertoire,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub passes: usize,
    pub trace: Vec<SwapEvent>,
}

/// Strict-improvement hill-climb on `Λ` using magnitude swaps.
///
/// Each pass visits all pairs in a seeded random order and applies every
/// swap with `Δ_Λ < 0`, i.e. every swap of a currently concordant pair. The
/// climb stops after a pass with no improvement, at which point no concordant
/// pair is left. The multisets of probabilities and magnitudes never change.
pub fn minimize_cost(r: &Repertoire, g: &CostModel, seed: u64) -> Result<Minimization> {
    let mut current = r.clone();
    let mut trace = Vec::new();
    let v = r.len();
    let initial_cost = mean_cost(r, g);
    let mut passes = 0;
    if v >= 2 {
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(v * (v - 1) / 2);
        for i in 0..v as u32 {
            for j in i + 1..v as u32 {
                pairs.push((i, j));
            }
        }
        let mut rng = rng::seeded(seed);
        loop {
            passes += 1;
            pairs.shuffle(&mut rng);
            let mut improved = false;
            for &(i, j) in &pairs {
                let (i, j) = (i as usize, j as usize);
                let delta = swap_delta_cost(&current, g, i, j)?;
                if delta < 0.0 {
                    trace.push(swap_event(&current, g, i, j, SwapKind::Magnitude)?);
                    current.swap_in_place(i, j, SwapKind::Magnitude);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
    Ok(Minimization { final_cost: mean_cost(&current, g), repertoire: current, initial_cost, passes, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Magnitudes in the same order as probabilities.
    TauPlusOne,
    /// Magnitudes in reverse order.
    TauMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Gamma,
    GammaAfter,
    DeltaNc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub types: usize,
    pub initial: InitialState,
    pub step: u64,
    pub i: usize,
    pub j: usize,
    pub quantity: Quantity,
    pub brute_force: i64,
    pub closed_form: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationCase {
    pub types: usize,
    pub initial: InitialState,
    pub swaps: u64,
    pub mismatches: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: u64,
    pub total_swaps: u64,
    pub mismatch_count: u64,
    pub cases: Vec<VerificationCase>,
    /// The first [`MAX_REPORTED_MISMATCHES`] mismatches.
    pub mismatches: Vec<Mismatch>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }
}

pub const MAX_REPORTED_MISMATCHES: usize = 100;

fn verify_case(
    types: usize,
    initial: InitialState,
    trials: u64,
    rng: &mut rng::SimRng,
    mismatches: &mut Vec<Mismatch>,
) -> VerificationCase {
    let a: Vec<f64> = (1..=types).map(|k| k as f64).collect();
    let mut b = a.clone();
    if initial == InitialState::TauMinusOne {
        b.reverse();
    }
    let mut case = VerificationCase { types, initial, swaps: 0, mismatches: 0 };
    if types < 2 {
        return case;
    }
    let mut nc = PairIndicators::new(&a, &b).concordant_pairs();
    for step in 0..trials {
        let i = rng.gen_range(0..types);
        let mut j = rng.gen_range(0..types - 1);
        if j >= i {
            j += 1;
        }
        let before = PairIndicators::new(&a, &b);
        let gamma = before.gamma_direct(i, j);
        let predicted_after = before.gamma_after_closed(i, j);
        let predicted_delta = before.delta_nc_closed(i, j);
        let mut check = |quantity, brute_force, closed_form| {
            if brute_force != closed_form {
                case.mismatches += 1;
                if mismatches.len() < MAX_REPORTED_MISMATCHES {
                    mismatches.push(Mismatch { types, initial, step, i, j, quantity, brute_force, closed_form });
                }
            }
        };
        check(Quantity::Gamma, gamma, before.gamma_closed(i, j));

        b.swap(i, j);
        let after = PairIndicators::new(&a, &b);
        let nc_after = after.concordant_pairs();
        check(Quantity::GammaAfter, after.gamma_direct(i, j), predicted_after);
        check(Quantity::DeltaNc, nc_after - nc, predicted_delta);
        nc = nc_after;
        case.swaps += 1;
    }
    case
}

/// Checks the closed forms of `γ`, `γ'` and `Δ_nc` against brute-force
/// recomputation along random walks of magnitude swaps.
///
/// For each `V` in `types` and each initial state, probabilities are ranked
/// `1..V` and magnitudes start in the same or reverse order; `trials` random
/// pairs are then swapped one after another. Each case draws from its own
/// random stream (`seed`, case index).
pub fn verify_swap_formulas(
    types: impl IntoIterator<Item = usize>,
    trials: u64,
    initial_states: &[InitialState],
    seed: u64,
) -> Result<VerificationReport> {
    if initial_states.is_empty() {
        return Err(Error::InvalidParameter("no initial states given".into()));
    }
    let mut report = VerificationReport {
        seed,
        trials,
        total_swaps: 0,
        mismatch_count: 0,
        cases: Vec::new(),
        mismatches: Vec::new(),
    };
    let mut case_index = 0u64;
    for v in types {
        for &initial in initial_states {
            let mut rng = rng::stream(seed, case_index);
            case_index += 1;
            let case = verify_case(v, initial, trials, &mut rng, &mut report.mismatches);
            report.total_swaps += case.swaps;
            report.mismatch_count += case.mismatches;
            report.cases.push(case);
        }
    }
    if report.cases.is_empty() {
        return Err(Error::InvalidParameter("empty range of V".into()));
    }
    Ok(report)
}

//! Browser demo: three interactive views over `abbrev-core`, each returning
//! a JSON string for the page to draw.
//!
//! The `*_data` functions hold the logic and are plain Rust so they can be
//! tested natively; the exported wrappers only convert errors.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use abbrev_core::correlation::{kendall_tau, rho_bounds, sign_criterion, spearman_rho, Interval, BOUNDS_TOLERANCE};
use abbrev_core::randtyping::RandomTypingModel;
use abbrev_core::report::to_json;
use abbrev_core::rng;
use abbrev_core::swapdyn::minimize_cost;
use abbrev_core::{mean_cost, CostModel, Error, Repertoire, Result};

const MAX_TOKENS: u64 = 2_000_000;

#[derive(Debug, Serialize)]
pub struct BoundsRow {
    pub tau: f64,
    pub daniels: Interval,
    pub durbin: Interval,
}

#[derive(Debug, Serialize)]
pub struct RankPoint {
    pub tau: f64,
    pub rho: f64,
    pub inside: bool,
}

#[derive(Debug, Serialize)]
pub struct BoundsView {
    pub types: usize,
    pub curve: Vec<BoundsRow>,
    pub points: Vec<RankPoint>,
}

/// Bound curves over a grid of `τ`, plus `(τ, ρ)` for random rankings of
/// `types` items.
pub fn bounds_data(types: usize, samples: usize, seed: u64) -> Result<BoundsView> {
    if !(2..=1000).contains(&types) {
        return Err(Error::InvalidParameter("V must lie in 2..=1000".into()));
    }
    let curve = (0..=200)
        .map(|k| {
            let b = rho_bounds(-1.0 + k as f64 / 100.0)?;
            Ok(BoundsRow { tau: b.tau, daniels: b.daniels, durbin: b.durbin })
        })
        .collect::<Result<_>>()?;
    let mut rng = rng::seeded(seed);
    let ranks: Vec<f64> = (1..=types).map(|k| k as f64).collect();
    let mut shuffled = ranks.clone();
    let mut points = Vec::with_capacity(samples);
    for _ in 0..samples.min(20_000) {
        shuffled.shuffle(&mut rng);
        let r = Repertoire::from_values(&ranks, &shuffled)?;
        let tau = kendall_tau(&r)?;
        let rho = spearman_rho(&r)?.expect("ranks are not constant");
        let inside = rho_bounds(tau)?.contains(rho, BOUNDS_TOLERANCE);
        points.push(RankPoint { tau, rho, inside });
    }
    Ok(BoundsView { types, curve, points })
}

#[derive(Debug, Serialize)]
pub struct LengthRow {
    pub length: usize,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Debug, Serialize)]
pub struct TypingView {
    pub tokens: u64,
    pub types: usize,
    pub slope: f64,
    pub intercept: f64,
    pub lengths: Vec<LengthRow>,
    pub tau: f64,
    pub rho: Option<f64>,
    pub sign_criterion: bool,
}

/// A random-typing sample: its length distribution against the geometric
/// law, and its frequency-length correlations.
pub fn typing_data(
    stop_probability: f64,
    alphabet_size: usize,
    min_length: u32,
    tokens: u64,
    seed: u64,
) -> Result<TypingView> {
    let model = RandomTypingModel::new(stop_probability, alphabet_size, min_length)?;
    let tokens = tokens.min(MAX_TOKENS);
    let sample = model.generate_tokens(tokens, seed)?;
    let lengths = sample
        .length_counts()
        .into_iter()
        .map(|(length, n)| {
            Ok(LengthRow {
                length,
                observed: n as f64 / tokens as f64,
                expected: model.length_probability(length as u32)?,
            })
        })
        .collect::<Result<_>>()?;
    let rows = sample.rows();
    let r = Repertoire::from_frequencies(rows.iter().map(|(w, n, l)| (w.as_str(), *n as f64, *l as f64)))?;
    Ok(TypingView {
        tokens,
        types: r.len(),
        slope: model.slope(),
        intercept: model.intercept(),
        lengths,
        tau: if r.len() > 1 { kendall_tau(&r)? } else { 0.0 },
        rho: if r.len() > 1 { spearman_rho(&r)? } else { None },
        sign_criterion: sign_criterion(&r, &CostModel::Identity),
    })
}

#[derive(Debug, Serialize)]
pub struct ClimbStep {
    pub step: usize,
    pub cost: f64,
    pub tau: f64,
}

#[derive(Debug, Serialize)]
pub struct ClimbView {
    pub types: usize,
    pub probabilities: Vec<f64>,
    pub initial_magnitudes: Vec<f64>,
    pub final_magnitudes: Vec<f64>,
    pub steps: Vec<ClimbStep>,
}

/// Hill-climb on `Λ` from a random pairing of Zipf-like probabilities with
/// integer lengths, recording `Λ` and `τ` after every accepted swap.
pub fn climb_data(types: usize, cost: &str, seed: u64) -> Result<ClimbView> {
    if !(2..=400).contains(&types) {
        return Err(Error::InvalidParameter("V must lie in 2..=400".into()));
    }
    let g: CostModel = cost.parse()?;
    let mut rng = rng::seeded(seed);
    let freqs: Vec<f64> = (1..=types).map(|k| 1.0 / k as f64).collect();
    let lengths: Vec<f64> = (0..types).map(|_| rng.gen_range(1..=12) as f64).collect();
    let r = Repertoire::from_values(&freqs, &lengths)?;
    let m = minimize_cost(&r, &g, seed)?;
    let mut cost = mean_cost(&r, &g);
    let mut tau = kendall_tau(&r)?;
    let mut steps = vec![ClimbStep { step: 0, cost, tau }];
    for (k, e) in m.trace.iter().enumerate() {
        cost += e.delta_cost;
        tau += e.delta_tau;
        steps.push(ClimbStep { step: k + 1, cost, tau });
    }
    Ok(ClimbView {
        types,
        probabilities: r.probabilities().to_vec(),
        initial_magnitudes: r.magnitudes().to_vec(),
        final_magnitudes: m.repertoire.magnitudes().to_vec(),
        steps,
    })
}

fn js<T: Serialize>(value: Result<T>) -> std::result::Result<String, JsError> {
    value.map(|v| to_json(&v)).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn bounds_explorer(types: usize, samples: usize, seed: u32) -> std::result::Result<String, JsError> {
    js(bounds_data(types, samples, seed as u64))
}

#[wasm_bindgen]
pub fn random_typing(
    stop_probability: f64,
    alphabet_size: usize,
    min_length: u32,
    tokens: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(typing_data(stop_probability, alphabet_size, min_length, tokens as u64, seed as u64))
}

#[wasm_bindgen]
pub fn hill_climb(types: usize, cost: &str, seed: u32) -> std::result::Result<String, JsError> {
    js(climb_data(types, cost, seed as u64))
}

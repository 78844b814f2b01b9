//! Random typing: words are produced by emitting symbols uniformly at random
//! until a delimiter fires.
//!
//! Every word of length `l` has probability
//! `((1 - p_s) / N)^l · p_s / (1 - p_s)^l_0`, so length is a linear function of
//! log-probability, `l = a ln p + b` with `a = 1 / ln((1 - p_s)/N)` and
//! `b = a ln((1 - p_s)^l_0 / p_s)`. Lengths follow a geometric law,
//! `P(length = l) = (1 - p_s)^(l - l_0) p_s`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::coding::default_alphabet;
use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomTypingModel {
    stop_probability: f64,
    alphabet: Vec<char>,
    min_length: u32,
}

impl RandomTypingModel {
    /// `stop_probability` is the delimiter probability `p_s` in `(0, 1)`,
    /// `alphabet_size` is `N` (2 to 36), `min_length` is `l_0`.
    pub fn new(stop_probability: f64, alphabet_size: usize, min_length: u32) -> Result<Self> {
        if !(stop_probability > 0.0 && stop_probability < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delimiter probability must lie in (0, 1), got {stop_probability}"
            )));
        }
        if alphabet_size < 2 {
            return Err(Error::InvalidParameter("random typing needs N > 1".into()));
        }
        Ok(Self { stop_probability, alphabet: default_alphabet(alphabet_size)?, min_length })
    }

    pub fn stop_probability(&self) -> f64 {
        self.stop_probability
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn min_length(&self) -> u32 {
        self.min_length
    }

    /// Probability of emitting one particular non-delimiter symbol.
    fn symbol_probability(&self) -> f64 {
        (1.0 - self.stop_probability) / self.alphabet.len() as f64
    }

    /// Slope `a` of `l = a ln p + b`; always negative.
    pub fn slope(&self) -> f64 {
        1.0 / self.symbol_probability().ln()
    }

    /// Intercept `b` of `l = a ln p + b`.
    pub fn intercept(&self) -> f64 {
        let ps = self.stop_probability;
        self.slope() * (self.min_length as f64 * (1.0 - ps).ln() - ps.ln())
    }

    /// Probability of one particular word of the given length.
    pub fn word_probability(&self, length: u32) -> Result<f64> {
        if length < self.min_length {
            return Err(Error::InvalidParameter(format!(
                "length {length} is below the minimum word length {}",
                self.min_length
            )));
        }
        let ps = self.stop_probability;
        Ok(self.symbol_probability().powi(length as i32) * ps / (1.0 - ps).powi(self.min_length as i32))
    }

    /// Probability that a word has the given length: `N^l` times the
    /// probability of each such word.
    pub fn length_probability(&self, length: u32) -> Result<f64> {
        Ok((self.alphabet.len() as f64).powi(length as i32) * self.word_probability(length)?)
    }

    /// `a ln p + b`: the length of a word with probability `p`.
    pub fn length_from_probability(&self, probability: f64) -> Result<f64> {
        if probability.is_nan() || probability <= 0.0 {
            return Err(Error::InvalidParameter(format!("probability must be positive, got {probability}")));
        }
        Ok(self.slope() * probability.ln() + self.intercept())
    }

    /// Endless stream of words drawn with the given seed.
    pub fn words(&self, seed: u64) -> Words<'_> {
        Words { model: self, rng: rng::seeded(seed) }
    }

    fn draw_word(&self, rng: &mut SimRng) -> String {
        let n = self.alphabet.len();
        let mut word = String::new();
        for _ in 0..self.min_length {
            word.push(self.alphabet[rng.gen_range(0..n)]);
        }
        loop {
            // One draw decides between the delimiter and each of the N symbols.
            let u: f64 = rng.gen();
            if u < self.stop_probability {
                return word;
            }
            let k = ((u - self.stop_probability) / self.symbol_probability()) as usize;
            word.push(self.alphabet[k.min(n - 1)]);
        }
    }

    /// Draws `count` tokens and tabulates them.
    pub fn generate_tokens(&self, count: u64, seed: u64) -> Result<TokenSample> {
        if count == 0 {
            return Err(Error::InvalidParameter("token count must be >= 1".into()));
        }
        let mut frequencies = BTreeMap::new();
        for word in self.words(seed).take(count as usize) {
            *frequencies.entry(word).or_insert(0u64) += 1;
        }
        Ok(TokenSample { tokens: count, frequencies })
    }
}

pub struct Words<'a> {
    model: &'a RandomTypingModel,
    rng: SimRng,
}

impl Iterator for Words<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        Some(self.model.draw_word(&mut self.rng))
    }
}

/// Token counts of a generated sample, keyed by word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenSample {
    pub tokens: u64,
    pub frequencies: BTreeMap<String, u64>,
}

impl TokenSample {
    /// Token counts by word length (in symbols).
    pub fn length_counts(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for (word, &n) in &self.frequencies {
            *out.entry(word.chars().count()).or_insert(0) += n;
        }
        out
    }

    /// `(word, frequency, length)` rows, most frequent first, ties by word.
    /// The empty word (possible when `l_0 = 0`) has no positive length and
    /// is left out.
    pub fn rows(&self) -> Vec<(String, u64, usize)> {
        let mut rows: Vec<_> = self
            .frequencies
            .iter()
            .filter(|(w, _)| !w.is_empty())
            .map(|(w, &n)| (w.clone(), n, w.chars().count()))
            .collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        rows
    }
}

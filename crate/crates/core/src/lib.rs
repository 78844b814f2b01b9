//! Compression and the law of abbreviation.
//!
//! A repertoire of `V` types, each with a probability `p_i` and a magnitude
//! `l_i`, has mean energetic cost `Λ = Σ p_i g(l_i)` for a strictly increasing
//! cost function `g`. This crate provides:
//!
//! * [`cost`]: `Λ` and the type-level moments behind it;
//! * [`coding`]: optimal non-singular and uniquely decipherable code lengths;
//! * [`correlation`]: Kendall's `τ`, Spearman's `ρ`, Pearson's `r` and the
//!   bounds linking `ρ` to `τ`;
//! * [`swapdyn`]: exact discrete derivatives of `Λ`, `n_c` and `τ` under a
//!   swap, and a hill-climb that minimises `Λ`;
//! * [`randtyping`]: the random typing null model;
//! * [`significance`]: permutation tests that keep both multisets fixed;
//! * [`corpus`], [`dataset`], [`report`]: ingestion and output formats.

pub mod coding;
pub mod corpus;
pub mod correlation;
pub mod cost;
pub mod dataset;
mod error;
pub mod randtyping;
pub mod repertoire;
pub mod report;
pub mod rng;
pub mod significance;
pub mod swapdyn;

pub use cost::{mean_cost, moments, CostModel, Moments};
pub use error::{Error, Result};
pub use repertoire::{Item, Repertoire, SwapKind};

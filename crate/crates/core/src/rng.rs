//! Seeded random streams.
//!
//! Every stochastic routine in this crate draws from ChaCha8 (`rand_chacha`),
//! seeded through `SeedableRng::seed_from_u64`. Independent work items (a
//! permutation replicate, a verification case) get their own ChaCha stream
//! number on top of the same seed, so results never depend on the order in
//! which items are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for work item `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

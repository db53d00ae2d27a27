//! Seed derivation and counter-addressed uniforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent per-trial seed derived from a master seed.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng.next_u64()
}

fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform variates addressed by `(stream, index)` rather than draw order,
/// so any subset of cubes can be sampled consistently.
#[derive(Clone, Debug)]
pub struct CounterUniform {
    rng: ChaCha8Rng,
}

impl CounterUniform {
    pub fn new(seed: u64) -> Self {
        CounterUniform { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, stream: u64, index: u64) -> f64 {
        self.rng.set_stream(stream);
        self.rng.set_word_pos(index as u128 * 2);
        unit(self.rng.next_u64())
    }
}

//! Seeded, replayable random streams for parallel replications.
//!
//! Each stream is identified by (base seed, replication index, draw
//! counter). The generator is the ChaCha8 counter-mode cipher: the key
//! is expanded from the base seed, the replication index selects the
//! 64-bit stream id, and the draw counter is the cipher's word
//! position. Two streams with distinct (seed, replication) pairs use
//! distinct keystreams, so replications can run in parallel in any
//! order and still reproduce bit-exactly.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Replayable random stream owned by exactly one replication.
#[derive(Debug, Clone)]
pub struct RandomStream {
    base_seed: u64,
    replication: u64,
    rng: ChaCha8Rng,
}

/// Serializable identity of a stream, sufficient to resume it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamState {
    pub base_seed: u64,
    pub replication: u64,
    pub word_pos: u128,
}

/// SplitMix64 step, used to expand the base seed into a 256-bit key.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl RandomStream {
    /// Derives the stream for (base seed, replication index).
    pub fn derive(base_seed: u64, replication: u64) -> Self {
        let mut state = base_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(replication);
        Self {
            base_seed,
            replication,
            rng,
        }
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn replication(&self) -> u64 {
        self.replication
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform integer in [0, n).
    pub fn uniform_index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Standard normal draw (ziggurat).
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Snapshot of the stream identity plus draw counter.
    pub fn state(&self) -> StreamState {
        StreamState {
            base_seed: self.base_seed,
            replication: self.replication,
            word_pos: self.rng.get_word_pos(),
        }
    }

    /// Rebuilds a stream from a snapshot; the sequence continues
    /// exactly where the snapshot was taken.
    pub fn restore(state: StreamState) -> Self {
        let mut s = Self::derive(state.base_seed, state.replication);
        s.rng.set_word_pos(state.word_pos);
        s
    }
}

//! Independent random streams derived from one master seed.
//!
//! Each consumer gets its own ChaCha stream of the same key, so adding
//! draws in one component never shifts the numbers another one sees.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    InitialDesign = 1,
    Sampler = 2,
    Acquisition = 3,
    Benchmark = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Seed handed to the benchmark constructor.
pub fn benchmark_seed(seed: u64) -> u64 {
    stream_rng(seed, Stream::Benchmark).next_u64()
}

//! Counter-based random streams.
//!
//! Every trajectory or sample owns a ChaCha8 stream addressed by
//! `(experiment seed, index, substream)`. ChaCha is a counter-mode cipher, so
//! the stream for a given key is fixed no matter which thread draws it or in
//! what order, and results are identical across thread counts and platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of independent substreams reserved per index.
const SUBSTREAMS: u64 = 4;

/// Substream tags for the percolation sampler.
pub mod substream {
    pub const WALK: u64 = 0;
    pub const TREE: u64 = 1;
    pub const PERCOLATION: u64 = 2;
    pub const SPINS: u64 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub index: u64,
}

impl StreamKey {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    /// The main stream for this key.
    pub fn rng(&self) -> ChaCha8Rng {
        self.substream(substream::WALK)
    }

    pub fn substream(&self, tag: u64) -> ChaCha8Rng {
        debug_assert!(tag < SUBSTREAMS);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index.wrapping_mul(SUBSTREAMS).wrapping_add(tag));
        rng
    }
}

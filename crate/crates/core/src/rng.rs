//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit [`Stream`]. A stream is a key
//! plus the ability to hand out independent generators indexed by replication
//! number, so a replication always sees the same random numbers no matter
//! which worker thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type handed to sampling routines.
pub type StreamRng = ChaCha8Rng;

/// Seed used by the CLI when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 20_100_401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream {
    key: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { key: splitmix64(seed) }
    }

    /// A child stream for a named sub-computation. Distinct tags give
    /// statistically independent streams; equal tags give equal streams.
    pub fn derive(&self, tag: u64) -> Stream {
        Stream { key: splitmix64(self.key ^ splitmix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))) }
    }

    /// Child stream keyed by several integers.
    pub fn derive_all(&self, tags: &[u64]) -> Stream {
        tags.iter().fold(*self, |s, &t| s.derive(t))
    }

    /// Generator for replication `index`.
    pub fn rng(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(index);
        rng
    }

    pub fn key(&self) -> u64 {
        self.key
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

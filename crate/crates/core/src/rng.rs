//! Seed derivation.
//!
//! Every experiment is driven by one 64-bit root seed. Independent streams
//! (one per replication, per posterior draw, per purpose) are derived by
//! mixing a label into the parent seed, so that draws can be computed in any
//! order or in parallel and still be bit-for-bit reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    /// Child seed for the stream identified by `label`.
    pub fn child(self, label: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(label.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    /// Child seed along a path of labels.
    pub fn path(self, labels: &[u64]) -> Seed {
        labels.iter().fold(self, |s, &l| s.child(l))
    }

    pub fn rng(self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream labels used across the crate.
pub mod label {
    pub const DATA: u64 = 1;
    pub const POSTERIOR: u64 = 2;
    pub const BOOTSTRAP: u64 = 3;
    pub const REPLICATION: u64 = 4;
}

//! Deterministic seed derivation.
//!
//! Every random object is keyed by a path of integers below the master seed
//! (generation, tile, trial, ...). Derivation is a SplitMix64 finaliser chain, so
//! results never depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

pub type Rng = Xoshiro256PlusPlus;

/// Lightweight generator for short per-tile streams.
pub type TileRng = SplitMix64;

pub fn tile_rng(seed: u64) -> TileRng {
    TileRng::seed_from_u64(seed)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed of `parent` labelled by `label`.
#[inline]
pub fn derive(parent: u64, label: u64) -> u64 {
    splitmix64(parent ^ splitmix64(label ^ 0x5851_F42D_4C95_7F2D))
}

#[inline]
pub fn derive2(parent: u64, a: i64, b: i64) -> u64 {
    derive(derive(parent, a as u64), b as u64)
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Labels separating independent streams under one parent seed.
pub mod stream {
    pub const GENERATION: u64 = 0x47454E;
    pub const TRANSLATION: u64 = 0x5452414E;
    pub const TRIAL: u64 = 0x545249;
    pub const PAIR: u64 = 0x50414952;
    pub const CUBE: u64 = 0x43554245;
}

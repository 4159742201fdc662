use rand::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use serde::{Deserialize, Serialize};

/// Randomness shared in advance by sender and receiver, represented by a
/// seed. Every random object of the protocol is derived from
/// `(seed, tag, indices)`, so either party can regenerate any single
/// element without materializing the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedRandomness {
    pub seed: u64,
}

/// FNV-1a, used only to turn a tag into a word.
fn tag_word(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

#[inline]
pub(crate) fn mix(state: u64, word: u64) -> u64 {
    SplitMix64::seed_from_u64(state ^ word.wrapping_mul(0x9e37_79b9_7f4a_7c15)).next_u64()
}

impl SharedRandomness {
    pub fn new(seed: u64) -> Self {
        SharedRandomness { seed }
    }

    /// Deterministic 64-bit word for `(tag, indices)`; satisfies
    /// `word(tag, &[a, b]) == mix(word(tag, &[a]), b)`.
    pub fn word(&self, tag: &str, indices: &[u64]) -> u64 {
        indices.iter().fold(mix(self.seed, tag_word(tag)), |s, &i| mix(s, i))
    }

    /// Independent generator for `(tag, indices)`.
    pub fn stream(&self, tag: &str, indices: &[u64]) -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(self.word(tag, indices))
    }

    /// A child seed, e.g. one per Monte-Carlo trial.
    pub fn child(&self, tag: &str, index: u64) -> SharedRandomness {
        SharedRandomness { seed: self.word(tag, &[index]) }
    }
}

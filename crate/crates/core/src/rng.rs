//! Deterministic pseudo-random streams.
//!
//! Every randomized step in the crate (modulus search, random irreducibles,
//! sampling experiments) draws from [`SplitMix64`], whose update rule is fixed
//! below so that runs are bit-identical across platforms and crate versions.
//!
//! State update: `s += 0x9E3779B97F4A7C15`; output: the splitmix64 finalizer of `s`.
//! Independent streams for shard `i` of a run seeded with `seed` are obtained from
//! [`stream_seed`].

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_MULTIPLIER: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent stream derived from `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    finalize(seed ^ finalize(index.wrapping_add(1).wrapping_mul(STREAM_MULTIPLIER)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }

    /// Uniform value in `0..bound`. Rejection sampling, so the result is unbiased.
    ///
    /// Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // values below `threshold` would bias the low residues
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }
}

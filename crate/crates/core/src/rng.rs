//! Portable seeded randomness.
//!
//! Every randomized step in this crate (train/test shuffles, bootstrap
//! sampling, weight initialization) runs on the generators in this module
//! rather than a platform RNG, so a seed produces the same bytes on every
//! machine and in every release. The algorithms are the published
//! splitmix64 and xoshiro256** generators (Blackman & Vigna), with
//! Lemire's multiply-shift method for bounded integers.

/// splitmix64 output function: advance `state` by the 64-bit golden ratio
/// and scramble. Also used on its own as a mixing/finalization step.
#[inline]
fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256** seeded from a single `u64` through a splitmix64 stream,
/// the seeding procedure recommended by the generator's authors.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        let mut state = seed;
        let s = [
            splitmix64_next(&mut state),
            splitmix64_next(&mut state),
            splitmix64_next(&mut state),
            splitmix64_next(&mut state),
        ];
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform float in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` without modulo bias
    /// (Lemire, "Fast Random Integer Generation in an Interval", 2019).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// First `k` elements of a Fisher-Yates shuffle: a uniform sample of
    /// `k` distinct items, in sampled order.
    pub fn sample_indices(&mut self, population: usize, k: usize) -> Vec<usize> {
        assert!(k <= population);
        let mut pool: Vec<usize> = (0..population).collect();
        for i in 0..k {
            let j = i + self.next_below((population - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

/// Derive a child seed from a master seed and a sequence of context words.
///
/// The absorption rule is fixed: start from the splitmix64-mixed master,
/// then for each word advance one golden-ratio step and mix. Different
/// contexts (trial index, split fraction bits, algorithm name hash) give
/// statistically independent child seeds, and the value depends only on
/// the inputs, never on call order elsewhere in the program.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut state = master;
    let mut h = splitmix64_next(&mut state);
    for &w in words {
        state = h ^ w;
        h = splitmix64_next(&mut state);
    }
    h
}

/// FNV-1a 64-bit hash, used to turn short stable strings (algorithm names)
/// into context words for [`derive_seed`].
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01B3);
    }
    h
}

//! Deterministic random number generation.
//!
//! A small splitmix64 generator keeps sampling, initialization, and
//! shuffling reproducible across runs and platforms without pulling a
//! platform-entropy dependency into the core crate.

/// splitmix64 stream generator (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform f64 in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in [0, n). `n` must be nonzero.
    ///
    /// Modulo bias is below n / 2^64 and irrelevant at the sizes used here.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform f64 in [lo, hi).
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// FNV-1a over a byte string, used to fold identifiers into seeds.
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Combine a base seed with identifying parts into a stream seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut mix = SplitMix64::new(base);
    let mut acc = mix.next_u64();
    for &p in parts {
        let mut s = SplitMix64::new(acc ^ p);
        acc = s.next_u64();
    }
    acc
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(items: &mut [T], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.next_index(i + 1);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a: alloc::vec::Vec<u64> = {
            let mut r = SplitMix64::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: alloc::vec::Vec<u64> = {
            let mut r = SplitMix64::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn derive_seed_depends_on_every_part() {
        let s1 = derive_seed(1, &[2, 3, 4]);
        let s2 = derive_seed(1, &[2, 3, 5]);
        let s3 = derive_seed(1, &[2, 3, 4]);
        assert_ne!(s1, s2);
        assert_eq!(s1, s3);
    }

    #[test]
    fn unit_interval_bounds() {
        let mut r = SplitMix64::new(7);
        for _ in 0..1000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut v: alloc::vec::Vec<u32> = (0..100).collect();
        let mut r = SplitMix64::new(9);
        shuffle(&mut v, &mut r);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<alloc::vec::Vec<u32>>());
    }
}

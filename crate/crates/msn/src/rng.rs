//! Counter-based deterministic random streams.
//!
//! Every random quantity in the crate is a pure function of a `u64` key, so
//! parallel consumers never share generator state and results are identical
//! for any scheduling or thread count. Keys are composed from logical
//! coordinates (master seed, cell index, trial index, element index) with
//! [`key2`]/[`key3`].

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine two logical coordinates into one stream key.
#[inline]
pub fn key2(a: u64, b: u64) -> u64 {
    mix64(a.wrapping_mul(0xA076_1D64_78BD_642F) ^ b.wrapping_add(GOLDEN))
}

#[inline]
pub fn key3(a: u64, b: u64, c: u64) -> u64 {
    key2(key2(a, b), c)
}

/// Sequential SplitMix64 stream derived from a key.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(key: u64) -> Self {
        Self { state: key }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform f64 in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform f64 in [lo, hi).
    #[inline]
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via the Marsaglia polar method.
    ///
    /// Rejection draws stay inside this stream, so the value is still a pure
    /// function of the stream key.
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s < 1.0 && s > 0.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}

/// Standard normal keyed by (seed, element index): a pure function, the
/// foundation of scheduling-independent noise injection.
#[inline]
pub fn gaussian_at(seed: u64, index: u64) -> f64 {
    Stream::new(key2(seed, index)).next_gaussian()
}

/// Deterministic Fisher-Yates permutation of 0..count.
pub fn permutation(count: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    let mut stream = Stream::new(key2(seed, 0xB5F0_7A6E));
    for i in (1..count).rev() {
        let j = (stream.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    order
}

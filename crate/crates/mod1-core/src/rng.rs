//! Counter-based splittable random numbers.
//!
//! The generator is the SplitMix64 output function driven in counter mode:
//! output `j` of stream `t` under master seed `s` is `mix64(key(s,t) + j·φ)`.
//! There is no sequential state to carry, so any (seed, stream) pair can be
//! opened anywhere — in particular one independent substream per Monte Carlo
//! trial, which makes parallel runs bit-identical to serial ones.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One stream of a counter-based 64-bit generator.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Open stream `stream` of the generator keyed by `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(
            seed ^ mix64(
                stream
                    .wrapping_mul(GOLDEN)
                    .wrapping_add(0x1F12_3BB5_159A_55E5),
            ),
        );
        CounterRng { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval `(0, 1)`.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

//! Seeded random streams.
//!
//! Every replica owns a [`RandomStream`] built from a 64-bit seed. Seeds for
//! replica `i` of a batch are derived by mixing the batch seed with the
//! replica's coordinates, so the stream a replica sees never depends on how
//! the batch was scheduled.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded ChaCha8 stream that remembers its seed.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a path of coordinates.
///
/// Distinct coordinate paths give statistically unrelated seeds; the result
/// is a pure function of its inputs.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &c| {
        splitmix64(acc ^ splitmix64(c.wrapping_add(GOLDEN)))
    })
}

/// Uniform draw on the open interval (0, 1).
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-transform exponential with the given rate from a uniform in (0, 1).
///
/// A zero rate gives `+inf`.
pub fn exp_from_uniform(u: f64, rate: f64) -> f64 {
    if rate == 0.0 {
        f64::INFINITY
    } else {
        -u.ln() / rate
    }
}

/// Exponential variate with the given rate; `Exp(0)` is `+inf`.
pub fn exp<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    exp_from_uniform(open01(rng), rate)
}

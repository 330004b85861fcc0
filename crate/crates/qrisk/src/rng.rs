//! Deterministic, splittable randomness.
//!
//! Every random draw in the simulator flows from one root seed. Independent
//! streams are derived by hashing the parent seed with a textual label, so
//! adding a consumer never perturbs the draws seen by existing consumers.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Seeded ChaCha stream that can fork labeled child streams.
pub struct DetRng {
    seed: [u8; 32],
    inner: ChaCha20Rng,
}

impl DetRng {
    pub fn from_seed(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"qrisk/root");
        h.update(seed.to_le_bytes());
        let seed: [u8; 32] = h.finalize().into();
        DetRng {
            seed,
            inner: ChaCha20Rng::from_seed(seed),
        }
    }

    /// Child stream independent of the parent and of siblings with other labels.
    pub fn split(&self, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"qrisk/split");
        h.update(self.seed);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        let seed: [u8; 32] = h.finalize().into();
        DetRng {
            seed,
            inner: ChaCha20Rng::from_seed(seed),
        }
    }

    /// Like `split` but keyed by an integer, for per-entity streams.
    pub fn split_indexed(&self, label: &str, index: u64) -> Self {
        self.split(&format!("{label}/{index}"))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, bound). `bound` must be nonzero.
    pub fn below_u64(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform in [lo, hi] inclusive.
    pub fn range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.below_u64(hi - lo + 1)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential with the given mean, for Poisson inter-arrival gaps.
    pub fn exponential(&mut self, mean: f64) -> f64 {
        assert!(mean > 0.0);
        let u = loop {
            let u = self.unit_f64();
            if u < 1.0 {
                break u;
            }
        };
        -mean * (1.0 - u).ln()
    }

    /// Uniform in [0, bound) for big integers, by rejection on the top byte.
    pub fn biguint_below(&mut self, bound: &BigUint) -> BigUint {
        use num_traits::Zero;
        assert!(!bound.is_zero());
        let bits = bound.bits();
        let nbytes = bits.div_ceil(8) as usize;
        let top_mask: u8 = if bits.is_multiple_of(8) {
            0xff
        } else {
            (1u8 << (bits % 8)) - 1
        };
        let mut buf = vec![0u8; nbytes];
        loop {
            self.inner.fill_bytes(&mut buf);
            buf[0] &= top_mask;
            let v = BigUint::from_bytes_be(&buf);
            if &v < bound {
                return v;
            }
        }
    }

    /// Uniform scalar in [1, order-1].
    pub fn scalar_nonzero(&mut self, order: &BigUint) -> BigUint {
        use num_traits::One;
        let one = BigUint::one();
        let span = order - &one;
        &one + self.biguint_below(&span)
    }
}

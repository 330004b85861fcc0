//! Prime field elements and modular arithmetic helpers.
//!
//! Field elements carry their modulus so mixed-modulus arithmetic is caught at
//! the call site. Group operations on curves with a modulus below 2^62 run on
//! a u64 fast path (see `curve.rs`); the helpers for that path live here too.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::EcError;

/// Element of the prime field Z_p. Value is always reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: BigUint,
    prime: Arc<BigUint>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({} mod {})", self.value, self.prime)
    }
}

impl FieldElement {
    pub fn new(value: BigUint, prime: Arc<BigUint>) -> Self {
        let value = value % prime.as_ref();
        FieldElement { value, prime }
    }

    pub fn from_u64(value: u64, prime: Arc<BigUint>) -> Self {
        Self::new(BigUint::from(value), prime)
    }

    pub fn zero(prime: Arc<BigUint>) -> Self {
        FieldElement {
            value: BigUint::zero(),
            prime,
        }
    }

    pub fn one(prime: Arc<BigUint>) -> Self {
        FieldElement {
            value: BigUint::one(),
            prime,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn prime(&self) -> &Arc<BigUint> {
        &self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check_same_field(&self, other: &FieldElement) {
        assert_eq!(
            self.prime.as_ref(),
            other.prime.as_ref(),
            "operands from different fields"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check_same_field(other);
        let v = (&self.value + &other.value) % self.prime.as_ref();
        FieldElement {
            value: v,
            prime: self.prime.clone(),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.check_same_field(other);
        let p = self.prime.as_ref();
        let v = (p + &self.value - &other.value) % p;
        FieldElement {
            value: v,
            prime: self.prime.clone(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check_same_field(other);
        let v = (&self.value * &other.value) % self.prime.as_ref();
        FieldElement {
            value: v,
            prime: self.prime.clone(),
        }
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.prime.as_ref();
        let v = if self.value.is_zero() {
            BigUint::zero()
        } else {
            p - &self.value
        };
        FieldElement {
            value: v,
            prime: self.prime.clone(),
        }
    }

    pub fn pow(&self, exp: &BigUint) -> FieldElement {
        let v = self.value.modpow(exp, self.prime.as_ref());
        FieldElement {
            value: v,
            prime: self.prime.clone(),
        }
    }

    /// Multiplicative inverse by Fermat's little theorem. Errors on zero.
    pub fn inv(&self) -> Result<FieldElement, EcError> {
        if self.value.is_zero() {
            return Err(EcError::ZeroInverse);
        }
        let p = self.prime.as_ref();
        let exp = p - 2u32;
        Ok(self.pow(&exp))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, EcError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Square root via Tonelli-Shanks. `None` when the value is a non-residue.
    pub fn sqrt(&self) -> Option<FieldElement> {
        let p = self.prime.as_ref();
        let v = sqrt_mod(&self.value, p)?;
        Some(FieldElement {
            value: v,
            prime: self.prime.clone(),
        })
    }
}

/// Modular inverse of a scalar modulo a prime. Errors on zero.
pub fn mod_inv(value: &BigUint, modulus: &BigUint) -> Result<BigUint, EcError> {
    let v = value % modulus;
    if v.is_zero() {
        return Err(EcError::ZeroInverse);
    }
    Ok(v.modpow(&(modulus - 2u32), modulus))
}

/// Tonelli-Shanks square root mod an odd prime.
pub fn sqrt_mod(a: &BigUint, p: &BigUint) -> Option<BigUint> {
    let a = a % p;
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let legendre_exp = (p - &one) >> 1;
    if a.modpow(&legendre_exp, p) != one {
        return None;
    }
    if p % 4u32 == BigUint::from(3u32) {
        let exp = (p + &one) >> 2;
        return Some(a.modpow(&exp, p));
    }
    // p = 1 mod 4: full Tonelli-Shanks
    let mut q = p - &one;
    let mut s = 0u32;
    while (&q & &one).is_zero() {
        q >>= 1;
        s += 1;
    }
    let mut z = two.clone();
    while z.modpow(&legendre_exp, p) == one {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while t != one {
        let mut i = 0u32;
        let mut tt = t.clone();
        while tt != one {
            tt = (&tt * &tt) % p;
            i += 1;
            if i == m {
                return None;
            }
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % p;
        }
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Deterministic Miller-Rabin, exact for inputs below 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn add_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

pub fn sub_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse mod a prime below 2^62, by Fermat.
pub fn inv_mod_u64(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod_u64(a, p - 2, p)
}

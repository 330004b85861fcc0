//! ECDSA over any short-Weierstrass group, with public-key recovery.
//!
//! The signing equation is s = k^-1 (e + d*r) mod n, where e hashes the
//! message, d is the private scalar, r is the x-coordinate of the ephemeral
//! point reduced mod the subgroup order n, and k is the ephemeral scalar.
//! Both (r, s) and (r, n - s) verify; the malleable form is kept as-is
//! because fork-era transaction hijacking depends on the textbook scheme,
//! not on any modern canonicalization.
//!
//! Recovery hints: bit 0 is the parity of the ephemeral y-coordinate, bit 1
//! says the ephemeral x-coordinate overflowed n and was reduced. Hint values
//! 2 and 3 only occur for the narrow band of x between n and the field prime.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::SigError;
use crate::ec::curve::{CurveGroup, GroupPoint};
use crate::ec::field::mod_inv;
use crate::ec::hash::hash_to_scalar;
use crate::ec::keys::KeyPair;
use crate::rng::DetRng;

const MSG_TAG: &str = "ecdsa/msg";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcdsaSignature {
    pub r: BigUint,
    pub s: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoverableSignature {
    pub base: EcdsaSignature,
    pub recovery_hint: u8,
}

pub fn message_scalar(message: &[u8], group: &CurveGroup) -> BigUint {
    hash_to_scalar(MSG_TAG, &[message], group.order())
}

/// Sign deterministically from the ephemeral seed. Zero r or s retries with
/// the incremented seed, so the function is total.
pub fn ecdsa_sign(
    message: &[u8],
    signer: &KeyPair,
    ephemeral_seed: u64,
    group: &CurveGroup,
) -> Result<EcdsaSignature, SigError> {
    sign_with_point(message, signer, ephemeral_seed, group).map(|(sig, _, _)| sig)
}

/// Sign and record which of the candidate ephemeral points recovery should
/// reconstruct.
pub fn ecdsa_sign_recoverable(
    message: &[u8],
    signer: &KeyPair,
    ephemeral_seed: u64,
    group: &CurveGroup,
) -> Result<RecoverableSignature, SigError> {
    let (base, ephemeral, reduced) = sign_with_point(message, signer, ephemeral_seed, group)?;
    let (_, y) = ephemeral.affine().expect("ephemeral point is never identity");
    let odd = (y.value() & BigUint::one()) == BigUint::one();
    let recovery_hint = (reduced as u8) << 1 | odd as u8;
    Ok(RecoverableSignature {
        base,
        recovery_hint,
    })
}

fn sign_with_point(
    message: &[u8],
    signer: &KeyPair,
    ephemeral_seed: u64,
    group: &CurveGroup,
) -> Result<(EcdsaSignature, GroupPoint, bool), SigError> {
    let n = group.order();
    let e = message_scalar(message, group);
    for attempt in 0u64..64 {
        let mut rng = DetRng::from_seed(ephemeral_seed.wrapping_add(attempt)).split("ecdsa/k");
        let k = rng.scalar_nonzero(n);
        let ephemeral = group.mul_generator(&k);
        let (x, _) = ephemeral.affine().expect("k in [1, n-1]");
        let r = x.value() % n;
        if r.is_zero() {
            continue;
        }
        let k_inv = mod_inv(&k, n)?;
        let s = (&k_inv * ((&e + &signer.private_scalar * &r) % n)) % n;
        if s.is_zero() {
            continue;
        }
        let reduced = x.value() >= n;
        return Ok((EcdsaSignature { r, s }, ephemeral, reduced));
    }
    Err(SigError::Signing(
        "no valid ephemeral scalar after 64 attempts".into(),
    ))
}

/// Standard verification: reconstruct the ephemeral point from (r, s) and the
/// public key and compare x-coordinates mod n. Malformed values return false.
pub fn ecdsa_verify(
    message: &[u8],
    sig: &EcdsaSignature,
    public_key: &GroupPoint,
    group: &CurveGroup,
) -> bool {
    let n = group.order();
    if sig.r.is_zero() || &sig.r >= n || sig.s.is_zero() || &sig.s >= n {
        return false;
    }
    if !group.contains(public_key) || public_key.is_identity() {
        return false;
    }
    let e = message_scalar(message, group);
    let w = match mod_inv(&sig.s, n) {
        Ok(w) => w,
        Err(_) => return false,
    };
    let u1 = (&e * &w) % n;
    let u2 = (&sig.r * &w) % n;
    let p1 = group.mul_generator(&u1);
    let p2 = match group.scalar_mul(&u2, public_key) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let candidate = group.add_unchecked(&p1, &p2);
    match candidate.affine() {
        None => false,
        Some((x, _)) => (x.value() % n) == sig.r,
    }
}

/// Reconstruct the signer's public key from a recoverable signature.
///
/// Errors when the hint is out of range, when the implied x-coordinate has no
/// curve preimage, or when the arithmetic degenerates to the identity.
pub fn ecdsa_recover(
    message: &[u8],
    sig: &RecoverableSignature,
    group: &CurveGroup,
) -> Result<GroupPoint, SigError> {
    if sig.recovery_hint > 3 {
        return Err(SigError::InvalidHint(sig.recovery_hint));
    }
    let n = group.order();
    if sig.base.r.is_zero() || &sig.base.r >= n || sig.base.s.is_zero() || &sig.base.s >= n {
        return Err(SigError::RecoveryFailed(
            "signature components out of range".into(),
        ));
    }
    let x = if sig.recovery_hint & 2 == 2 {
        &sig.base.r + n
    } else {
        sig.base.r.clone()
    };
    if &x >= group.prime().as_ref() {
        return Err(SigError::RecoveryFailed(
            "implied x-coordinate exceeds the field".into(),
        ));
    }
    let odd = sig.recovery_hint & 1 == 1;
    let ephemeral = group
        .weierstrass_point_from_x(&x, odd)
        .map_err(|e| SigError::RecoveryFailed(e.to_string()))?;
    let e = message_scalar(message, group);
    let r_inv = mod_inv(&sig.base.r, n)?;
    // Q = r^-1 (s*R - e*G)
    let s_r = group
        .scalar_mul(&sig.base.s, &ephemeral)
        .map_err(SigError::Ec)?;
    let e_g = group.mul_generator(&e);
    let diff = group.add_unchecked(&s_r, &group.point_neg(&e_g));
    let q = group.scalar_mul(&r_inv, &diff).map_err(SigError::Ec)?;
    if q.is_identity() {
        return Err(SigError::RecoveryFailed(
            "recovered point is the identity".into(),
        ));
    }
    Ok(q)
}

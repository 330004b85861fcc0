//! Hashing into scalars and curve points.
//!
//! Every hash is domain-separated by a mandatory tag and every input part is
//! length-prefixed, so distinct call sites can never collide on concatenation
//! boundaries. One primitive backs every scheme in the workspace; swapping the
//! underlying hash means changing exactly this file.

use num_bigint::BigUint;
use num_traits::One;
use sha2::{Digest, Sha256};

use super::curve::{CurveEquation, CurveGroup, GroupPoint};
use super::EcError;

/// SHA-256 of the tagged, length-prefixed parts, reduced into [0, modulus).
pub fn hash_to_scalar(tag: &str, parts: &[&[u8]], modulus: &BigUint) -> BigUint {
    assert!(
        modulus >= &BigUint::from(2u32),
        "hash_to_scalar needs a modulus of at least 2"
    );
    BigUint::from_bytes_be(&tagged_digest(tag, parts)) % modulus
}

/// Raw 32-byte tagged digest, for ids and non-scalar commitments.
pub fn tagged_digest(tag: &str, parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((tag.len() as u64).to_le_bytes());
    h.update(tag.as_bytes());
    h.update((parts.len() as u64).to_le_bytes());
    for part in parts {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.finalize().into()
}

/// Derive a curve point with unknown discrete log relative to the generator:
/// hash to a candidate coordinate, complete it to a curve point, then clear
/// the cofactor. Nobody learns the scalar relating the result to G, which is
/// exactly the property Pedersen commitments need.
pub fn hash_to_point(group: &CurveGroup, tag: &str) -> Result<GroupPoint, EcError> {
    let gen_bytes = group.generator().to_bytes();
    for counter in 0u64..1024 {
        let candidate = hash_to_scalar(
            tag,
            &[group.label().as_bytes(), &gen_bytes, &counter.to_le_bytes()],
            group.prime(),
        );
        let completed = match group.equation() {
            CurveEquation::ShortWeierstrass { .. } => {
                group.weierstrass_point_from_x(&candidate, false)
            }
            CurveEquation::TwistedEdwards { .. } => group.edwards_point_from_y(&candidate, false),
        };
        let pt = match completed {
            Ok(pt) => pt,
            Err(EcError::NoCurvePreimage { .. }) => continue,
            Err(e) => return Err(e),
        };
        let cleared = group.scalar_mul_u64(group.cofactor(), &pt)?;
        if cleared.is_identity() {
            continue;
        }
        // confirm subgroup membership for cofactor > 1 curves
        if group.cofactor() > 1 {
            let n = group.order().clone();
            let chk = group.scalar_mul(&(n + BigUint::one()), &cleared)?;
            if chk != cleared {
                continue;
            }
        }
        return Ok(cleared);
    }
    Err(EcError::BadParameter {
        curve: group.label().to_string(),
        reason: format!("hash_to_point exhausted counters for tag {tag:?}"),
    })
}

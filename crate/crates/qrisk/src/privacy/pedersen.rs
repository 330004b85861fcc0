//! Pedersen commitments C = v*G + r*H over a configured group.
//!
//! G is the group's generator and H is hashed to a point from it, so honest
//! participants know no scalar x with x*G = H. The commitment hides v
//! perfectly and binds it under the discrete-log assumption; on attackable
//! toy groups the adversary's oracle can recover that x, which is precisely
//! the break the confidential-transaction attacks exercise.
//!
//! Wallet blindings are derived from the output's one-time secret, the way
//! production confidential-transaction wallets derive masks from a shared
//! secret so owners can reopen outputs without storing anything. That
//! derivation is also the linkage a key-recovery attacker exploits: solve
//! the one-time key and the opening follows.

use num_bigint::BigUint;

use crate::ec::curve::{CurveGroup, GroupPoint};
use crate::ec::hash::{hash_to_point, hash_to_scalar};
use crate::ec::EcError;

/// Simulation token ceiling; commitments refuse values at or above it.
pub const MAX_COMMIT_VALUE: u64 = 1 << 62;

const H_TAG: &str = "pedersen/h";
const OUT_BLIND_TAG: &str = "pedersen/out-blind";
const PSEUDO_BLIND_TAG: &str = "pedersen/pseudo-blind";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PedersenCommitment {
    pub point: GroupPoint,
}

#[derive(Clone, Debug)]
pub struct PedersenParams {
    group: CurveGroup,
    value_generator: GroupPoint,
    blinding_generator: GroupPoint,
}

impl PedersenParams {
    /// Derive parameters for a group. H comes from hashing G to a point, so
    /// its discrete log is unknown to everyone honest.
    pub fn derive(group: &CurveGroup) -> Result<PedersenParams, EcError> {
        let h = hash_to_point(group, H_TAG)?;
        Ok(PedersenParams {
            value_generator: group.generator().clone(),
            blinding_generator: h,
            group: group.clone(),
        })
    }

    pub fn group(&self) -> &CurveGroup {
        &self.group
    }

    pub fn value_generator(&self) -> &GroupPoint {
        &self.value_generator
    }

    pub fn blinding_generator(&self) -> &GroupPoint {
        &self.blinding_generator
    }

    pub fn commit(&self, value: u64, blinding: &BigUint) -> PedersenCommitment {
        assert!(value < MAX_COMMIT_VALUE, "value exceeds the token ceiling");
        let v_term = self.group.mul_generator(&BigUint::from(value));
        let r = blinding % self.group.order();
        let r_term = self
            .group
            .scalar_mul(&r, &self.blinding_generator)
            .expect("blinding generator is on the curve");
        PedersenCommitment {
            point: self.group.add_unchecked(&v_term, &r_term),
        }
    }

    pub fn sum(&self, commitments: &[PedersenCommitment]) -> GroupPoint {
        let mut acc = GroupPoint::Identity;
        for c in commitments {
            acc = self.group.add_unchecked(&acc, &c.point);
        }
        acc
    }
}

/// True iff sum(inputs) - sum(outputs) - fee*G equals excess*H, i.e. the
/// hidden values balance to exactly the fee and the declared excess accounts
/// for the blinding mismatch. The transaction carries the excess.
pub fn balance_check(
    inputs: &[PedersenCommitment],
    outputs: &[PedersenCommitment],
    fee: u64,
    excess: &BigUint,
    params: &PedersenParams,
) -> bool {
    let group = params.group();
    let sum_in = params.sum(inputs);
    let sum_out = params.sum(outputs);
    let fee_term = group.mul_generator(&BigUint::from(fee));
    let lhs = group.add_unchecked(
        &group.add_unchecked(&sum_in, &group.point_neg(&sum_out)),
        &group.point_neg(&fee_term),
    );
    let rhs = group
        .scalar_mul(&(excess % group.order()), params.blinding_generator())
        .expect("blinding generator is on the curve");
    lhs == rhs
}

/// Blinding for a regular output, derived from its one-time secret.
pub fn output_blinding(owner_secret: &BigUint, order: &BigUint) -> BigUint {
    hash_to_scalar(OUT_BLIND_TAG, &[&owner_secret.to_bytes_be()], order)
}

/// Blinding for a ring spend's pseudo-input commitment, derived from the
/// true member's one-time secret. Distinct tag keeps it unlinkable to the
/// output blinding without solving the key.
pub fn pseudo_blinding(owner_secret: &BigUint, order: &BigUint) -> BigUint {
    hash_to_scalar(PSEUDO_BLIND_TAG, &[&owner_secret.to_bytes_be()], order)
}

/// Scan for the committed value given the blinding, walking v*G + r*H
/// upward from v = 0. Returns None past the cap. Openings in simulation are
/// small, so this stands in for a range-proof-constrained search.
pub fn recover_value(
    commitment: &PedersenCommitment,
    blinding: &BigUint,
    cap: u64,
    params: &PedersenParams,
) -> Option<u64> {
    let group = params.group();
    let r = blinding % group.order();
    let mut acc = group
        .scalar_mul(&r, params.blinding_generator())
        .expect("blinding generator is on the curve");
    let g = group.generator().clone();
    for v in 0..=cap {
        if acc == commitment.point {
            return Some(v);
        }
        acc = group.add_unchecked(&acc, &g);
    }
    None
}

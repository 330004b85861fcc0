//! The trusted-setup ceremony behind shielded proof parameters.
//!
//! Participants each contribute an ephemeral scalar share; the composed
//! secret is their sum mod the group order, and the published greater
//! public key is the matching product of the share public points. The
//! setup counts as honest when at least one participant destroys their
//! share: then nobody can reassemble the secret without solving the
//! discrete log of the greater public key. The harness retains the secret
//! regardless, because verifying the attack means checking the oracle
//! recovered exactly it.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::ec::curve::{CurveGroup, GroupPoint};
use crate::rng::DetRng;

use super::PrivacyError;

#[derive(Clone, Debug)]
pub struct SetupParameter {
    pub greater_public_key: GroupPoint,
    pub honest: bool,
    pub participant_count: usize,
    ground_truth_secret: BigUint,
}

impl SetupParameter {
    /// Harness-only. Validators authenticate against the public key alone.
    pub fn ground_truth_secret(&self) -> &BigUint {
        &self.ground_truth_secret
    }
}

pub fn trusted_setup_ceremony(
    participant_count: usize,
    destroyed: &BTreeSet<usize>,
    group: &CurveGroup,
    rng: &mut DetRng,
) -> Result<SetupParameter, PrivacyError> {
    if participant_count == 0 {
        return Err(PrivacyError::EmptyCeremony);
    }
    for &index in destroyed {
        if index >= participant_count {
            return Err(PrivacyError::BadDestroyedIndex {
                index,
                participants: participant_count,
            });
        }
    }
    let order = group.order();
    // outer loop only guards the measure-zero case where shares sum to zero
    loop {
        let mut secret = BigUint::zero();
        let mut composed = GroupPoint::Identity;
        for _ in 0..participant_count {
            let share = rng.scalar_nonzero(order);
            let share_public = group.mul_generator(&share);
            composed = group.add_unchecked(&composed, &share_public);
            secret = (secret + share) % order;
        }
        if secret.is_zero() {
            continue;
        }
        debug_assert_eq!(composed, group.mul_generator(&secret));
        return Ok(SetupParameter {
            greater_public_key: composed,
            honest: !destroyed.is_empty(),
            participant_count,
            ground_truth_secret: secret,
        });
    }
}

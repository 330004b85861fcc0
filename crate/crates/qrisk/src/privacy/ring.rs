//! Decoy rings: a true spend hidden among randomly chosen spent outputs.
//!
//! The ring is structural, not a linkable ring signature. Validators see
//! only the member list; which slot is real is simulation ground truth and
//! stays behind the `ground_truth_index` accessor.

use crate::rng::DetRng;

use super::PrivacyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingInput<R> {
    pub members: Vec<R>,
    true_index: usize,
}

impl<R> RingInput<R> {
    pub fn ring_size(&self) -> usize {
        self.members.len()
    }

    /// Harness-only. Validator code must never call this; the audit test on
    /// the validator sources enforces it.
    pub fn ground_truth_index(&self) -> usize {
        self.true_index
    }

    pub fn true_member(&self) -> &R {
        &self.members[self.true_index]
    }
}

/// Place `true_ref` at a uniform position among `ring_size` slots, filling
/// the rest with distinct decoys sampled uniformly from the pool.
pub fn build_ring<R: Clone + PartialEq>(
    true_ref: R,
    decoy_pool: &[R],
    ring_size: usize,
    rng: &mut DetRng,
) -> Result<RingInput<R>, PrivacyError> {
    if ring_size == 0 {
        return Err(PrivacyError::EmptyRing);
    }
    let mut candidates: Vec<&R> = Vec::new();
    for d in decoy_pool {
        if *d != true_ref && !candidates.iter().any(|c| **c == *d) {
            candidates.push(d);
        }
    }
    let needed_decoys = ring_size - 1;
    if candidates.len() < needed_decoys {
        return Err(PrivacyError::InsufficientDecoys {
            needed: ring_size,
            needed_decoys,
            available: candidates.len(),
        });
    }
    // partial Fisher-Yates over the candidate list
    let mut members: Vec<R> = Vec::with_capacity(ring_size);
    for i in 0..needed_decoys {
        let j = i + rng.below_u64((candidates.len() - i) as u64) as usize;
        candidates.swap(i, j);
        members.push(candidates[i].clone());
    }
    let true_index = rng.below_u64(ring_size as u64) as usize;
    members.insert(true_index, true_ref);
    Ok(RingInput {
        members,
        true_index,
    })
}

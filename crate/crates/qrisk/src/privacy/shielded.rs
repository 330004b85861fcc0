//! Shielded notes, spend/output bodies, and the setup-key mint.
//!
//! A shielded transaction's validity argument arrives as a `ShieldedProof`.
//! The honest arm carries a declared blinding excess and the validator
//! re-checks commitment balance arithmetic. The forged arm carries a
//! signature under the ceremony's greater public key, standing in for a
//! proof built from the setup's toxic waste: a real verifier cannot tell a
//! witness-derived proof from a waste-derived one, so the validator accepts
//! both arms without distinguishing them, and nothing in the validator's
//! view of a waste-authorized mint is anomalous. The hidden supply has no
//! validator-visible counter; only the harness audit, which holds every
//! note's opening, can see the inflation.
//!
//! Note-graph privacy is not modeled: spends name the note they consume.
//! The hiding that matters to the attacks is of values and of total supply.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::ec::curve::GroupPoint;
use crate::ec::hash::{hash_to_scalar, tagged_digest};
use crate::ec::keys::keypair_from_scalar;
use crate::sig::{eddsa_sign_zcash, eddsa_verify_zcash, EddsaSignature};

use super::pedersen::{balance_check, PedersenCommitment, PedersenParams};
use super::PrivacyError;

pub type NoteId = [u8; 32];

const MINT_NOTE_TAG: &str = "shielded/mint-note";
const MINT_BLIND_TAG: &str = "shielded/mint-blind";
const BODY_TAG: &str = "shielded/body";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShieldedNote {
    pub id: NoteId,
    pub commitment: PedersenCommitment,
    pub owner: GroupPoint,
}

/// Harness-side opening of a note's commitment. Never validator input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoteOpening {
    pub value: u64,
    pub blinding: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShieldedSpend {
    pub note_id: NoteId,
    pub authorization: EddsaSignature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShieldedProof {
    /// Declared blinding excess; validator recomputes the balance equation.
    Balance { excess: BigUint },
    /// Signature over the body digest under the ceremony's greater public
    /// key; the validator takes the balance claim on its authority.
    SetupAuthorized { signature: EddsaSignature },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShieldedBody {
    pub spends: Vec<ShieldedSpend>,
    pub outputs: Vec<ShieldedNote>,
    pub fee: u64,
    pub proof: ShieldedProof,
}

impl ShieldedBody {
    /// Digest every signature in the body commits to. Covers spent note
    /// ids, outputs, and fee; excludes the proof and the spend signatures
    /// themselves.
    pub fn signing_digest(&self) -> [u8; 32] {
        let mut parts: Vec<Vec<u8>> = Vec::new();
        for s in &self.spends {
            parts.push(s.note_id.to_vec());
        }
        for o in &self.outputs {
            let mut rec = o.id.to_vec();
            rec.extend_from_slice(&o.commitment.point.to_bytes());
            rec.extend_from_slice(&o.owner.to_bytes());
            parts.push(rec);
        }
        parts.push(self.fee.to_le_bytes().to_vec());
        let refs: Vec<&[u8]> = parts.iter().map(|p| p.as_slice()).collect();
        tagged_digest(BODY_TAG, &refs)
    }
}

/// The validator-visible note set. Spent notes leave the map; the creation
/// counter feeds fresh note ids.
#[derive(Clone, Debug, Default)]
pub struct ShieldedPool {
    notes: BTreeMap<NoteId, ShieldedNote>,
    created_total: u64,
}

impl ShieldedPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn note(&self, id: &NoteId) -> Option<&ShieldedNote> {
        self.notes.get(id)
    }

    pub fn contains(&self, id: &NoteId) -> bool {
        self.notes.contains_key(id)
    }

    pub fn add_note(&mut self, note: ShieldedNote) -> bool {
        let fresh = !self.notes.contains_key(&note.id);
        if fresh {
            self.notes.insert(note.id, note);
            self.created_total += 1;
        }
        fresh
    }

    pub fn remove_note(&mut self, id: &NoteId) -> Option<ShieldedNote> {
        self.notes.remove(id)
    }

    pub fn live_notes(&self) -> impl Iterator<Item = &ShieldedNote> {
        self.notes.values()
    }

    pub fn live_count(&self) -> usize {
        self.notes.len()
    }

    pub fn created_total(&self) -> u64 {
        self.created_total
    }
}

/// Build a minting transaction authorized by the ceremony secret.
///
/// The body is constructed the same way whether or not `secret` matches the
/// setup parameter; a mismatched secret yields a signature that fails under
/// the greater public key, so the validator rejects it. Returns the body
/// together with the minted note's opening for the harness audit.
pub fn mint_with_setup_key(
    secret: &BigUint,
    amount: u64,
    owner: &GroupPoint,
    setup_public: &GroupPoint,
    params: &PedersenParams,
    pool: &ShieldedPool,
) -> Result<(ShieldedBody, NoteOpening), PrivacyError> {
    let group = params.group();
    let id = tagged_digest(
        MINT_NOTE_TAG,
        &[
            &setup_public.to_bytes(),
            &amount.to_le_bytes(),
            &pool.created_total().to_le_bytes(),
        ],
    );
    let blinding = hash_to_scalar(MINT_BLIND_TAG, &[&id], group.order());
    let note = ShieldedNote {
        id,
        commitment: params.commit(amount, &blinding),
        owner: owner.clone(),
    };
    let mut body = ShieldedBody {
        spends: Vec::new(),
        outputs: vec![note],
        fee: 0,
        proof: ShieldedProof::Balance {
            excess: BigUint::from(0u8),
        },
    };
    let signer = keypair_from_scalar(group, secret.clone());
    let signature = eddsa_sign_zcash(&body.signing_digest(), &signer, group)?;
    body.proof = ShieldedProof::SetupAuthorized { signature };
    Ok((body, NoteOpening {
        value: amount,
        blinding,
    }))
}

/// The validator's proof check, with input commitments already resolved
/// from the pool. Both arms return plain accept/reject; neither inspects
/// anything the other would not.
pub fn proof_accepts(
    body: &ShieldedBody,
    input_commitments: &[PedersenCommitment],
    setup_public: &GroupPoint,
    params: &PedersenParams,
) -> bool {
    let outputs: Vec<PedersenCommitment> =
        body.outputs.iter().map(|o| o.commitment.clone()).collect();
    match &body.proof {
        ShieldedProof::Balance { excess } => {
            balance_check(input_commitments, &outputs, body.fee, excess, params)
        }
        ShieldedProof::SetupAuthorized { signature } => {
            eddsa_verify_zcash(&body.signing_digest(), signature, setup_public, params.group())
        }
    }
}

/// Fresh note id for a wallet-built output.
pub fn derive_note_id(owner: &GroupPoint, pool_created_total: u64, salt: u64) -> NoteId {
    tagged_digest(
        "shielded/note",
        &[
            &owner.to_bytes(),
            &pool_created_total.to_le_bytes(),
            &salt.to_le_bytes(),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::curve::CurveGroup;
    use crate::ec::keys::generate_keypair;
    use crate::ec::params::{curve_by_label, TOY_EDWARDS_LABEL};
    use crate::privacy::setup::trusted_setup_ceremony;
    use crate::rng::DetRng;
    use num_traits::One;
    use std::collections::BTreeSet;

    fn fixture() -> (CurveGroup, PedersenParams, crate::privacy::SetupParameter) {
        let g = curve_by_label(TOY_EDWARDS_LABEL).unwrap();
        let params = PedersenParams::derive(&g).unwrap();
        let mut rng = DetRng::from_seed(30).split("shielded/setup");
        let setup = trusted_setup_ceremony(6, &BTreeSet::from([3]), &g, &mut rng).unwrap();
        (g, params, setup)
    }

    #[test]
    fn mint_with_correct_secret_accepted() {
        let (g, params, setup) = fixture();
        let owner = generate_keypair(&g, 77).public_point;
        let pool = ShieldedPool::new();
        let (body, opening) = mint_with_setup_key(
            setup.ground_truth_secret(),
            1000,
            &owner,
            &setup.greater_public_key,
            &params,
            &pool,
        )
        .unwrap();
        assert!(proof_accepts(&body, &[], &setup.greater_public_key, &params));
        assert_eq!(opening.value, 1000);
        assert_eq!(
            body.outputs[0].commitment,
            params.commit(opening.value, &opening.blinding)
        );
    }

    #[test]
    fn mint_with_wrong_secret_rejected() {
        let (g, params, setup) = fixture();
        let owner = generate_keypair(&g, 77).public_point;
        let pool = ShieldedPool::new();
        let wrong = setup.ground_truth_secret() + BigUint::one();
        let (body, _) = mint_with_setup_key(
            &wrong,
            1000,
            &owner,
            &setup.greater_public_key,
            &params,
            &pool,
        )
        .unwrap();
        assert!(!proof_accepts(&body, &[], &setup.greater_public_key, &params));
    }

    #[test]
    fn zero_amount_mint_accepted() {
        let (g, params, setup) = fixture();
        let owner = generate_keypair(&g, 77).public_point;
        let pool = ShieldedPool::new();
        let (body, opening) = mint_with_setup_key(
            setup.ground_truth_secret(),
            0,
            &owner,
            &setup.greater_public_key,
            &params,
            &pool,
        )
        .unwrap();
        assert!(proof_accepts(&body, &[], &setup.greater_public_key, &params));
        assert_eq!(opening.value, 0);
    }

    #[test]
    fn balance_arm_checks_arithmetic() {
        let (g, params, setup) = fixture();
        let order = g.order().clone();
        let owner = generate_keypair(&g, 78).public_point;
        let r_in = BigUint::from(4242u32);
        let r_out = BigUint::from(5757u32);
        let input = params.commit(90, &r_in);
        let make = |value: u64| ShieldedBody {
            spends: Vec::new(),
            outputs: vec![ShieldedNote {
                id: [1; 32],
                commitment: params.commit(value, &r_out),
                owner: owner.clone(),
            }],
            fee: 5,
            proof: ShieldedProof::Balance {
                excess: (&r_in + &order - &r_out) % &order,
            },
        };
        assert!(proof_accepts(
            &make(85),
            std::slice::from_ref(&input),
            &setup.greater_public_key,
            &params
        ));
        assert!(!proof_accepts(
            &make(86),
            std::slice::from_ref(&input),
            &setup.greater_public_key,
            &params
        ));
    }

    #[test]
    fn mint_ids_track_pool_counter() {
        let (g, params, setup) = fixture();
        let owner = generate_keypair(&g, 77).public_point;
        let mut pool = ShieldedPool::new();
        let (a, _) = mint_with_setup_key(
            setup.ground_truth_secret(),
            50,
            &owner,
            &setup.greater_public_key,
            &params,
            &pool,
        )
        .unwrap();
        assert!(pool.add_note(a.outputs[0].clone()));
        let (b, _) = mint_with_setup_key(
            setup.ground_truth_secret(),
            50,
            &owner,
            &setup.greater_public_key,
            &params,
            &pool,
        )
        .unwrap();
        assert_ne!(a.outputs[0].id, b.outputs[0].id);
    }

    #[test]
    fn signing_digest_binds_fields() {
        let (g, params, _) = fixture();
        let owner = generate_keypair(&g, 79).public_point;
        let note = ShieldedNote {
            id: [2; 32],
            commitment: params.commit(10, &BigUint::from(3u8)),
            owner,
        };
        let base = ShieldedBody {
            spends: Vec::new(),
            outputs: vec![note.clone()],
            fee: 1,
            proof: ShieldedProof::Balance {
                excess: BigUint::from(0u8),
            },
        };
        let d0 = base.signing_digest();
        let mut fee_bump = base.clone();
        fee_bump.fee = 2;
        assert_ne!(d0, fee_bump.signing_digest());
        let mut renamed = base.clone();
        renamed.outputs[0].id = [3; 32];
        assert_ne!(d0, renamed.signing_digest());
        // proof is excluded: changing it does not move the digest
        let mut reproof = base.clone();
        reproof.proof = ShieldedProof::Balance {
            excess: BigUint::from(9u8),
        };
        assert_eq!(d0, reproof.signing_digest());
    }

    #[test]
    fn pool_rejects_duplicate_ids() {
        let (g, params, _) = fixture();
        let owner = generate_keypair(&g, 80).public_point;
        let note = ShieldedNote {
            id: [4; 32],
            commitment: params.commit(1, &BigUint::from(1u8)),
            owner,
        };
        let mut pool = ShieldedPool::new();
        assert!(pool.add_note(note.clone()));
        assert!(!pool.add_note(note.clone()));
        assert_eq!(pool.created_total(), 1);
        assert_eq!(pool.remove_note(&note.id), Some(note));
        assert_eq!(pool.live_count(), 0);
        // creation counter does not rewind on spend
        assert_eq!(pool.created_total(), 1);
    }
}

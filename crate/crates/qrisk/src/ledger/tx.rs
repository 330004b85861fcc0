//! Transactions across the five ledger models.
//!
//! Identity is content: every id is a tagged digest over the full record,
//! witnesses included, so equal ids mean equal transactions. Signing digests
//! leave the witness data out so signing them is not circular.

use num_bigint::BigUint;

use crate::ec::hash::tagged_digest;
use crate::ec::GroupPoint;
use crate::privacy::{PedersenCommitment, RingInput, ShieldedBody, ShieldedProof};
use crate::sig::{EcdsaSignature, RecoverableSignature};

use super::chainspec::TxModel;

pub type TxId = [u8; 32];

const KEY_HASH_TAG: &str = "tx/key-hash";
const ACCOUNT_ADDR_TAG: &str = "tx/account-addr";
const KEY_IMAGE_TAG: &str = "tx/key-image";
const RING_ATTEST_TAG: &str = "tx/ring-attest";
const UTXO_SIGN_TAG: &str = "tx/utxo-sign";
const ACCOUNT_SIGN_TAG: &str = "tx/account-sign";
const UTXO_ID_TAG: &str = "tx/utxo";
const ACCOUNT_ID_TAG: &str = "tx/account";
const RING_ID_TAG: &str = "tx/ring";
const MW_ID_TAG: &str = "tx/mw";
const SHIELDED_ID_TAG: &str = "tx/shielded";

/// Length-prefix a piece inside a multi-piece record, so variable-width
/// fields can never collide across a boundary shift.
pub(crate) fn push_chunk(rec: &mut Vec<u8>, bytes: &[u8]) {
    rec.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
    rec.extend_from_slice(bytes);
}

pub(crate) fn digest_parts(tag: &str, parts: Vec<Vec<u8>>) -> [u8; 32] {
    let refs: Vec<&[u8]> = parts.iter().map(|p| p.as_slice()).collect();
    tagged_digest(tag, &refs)
}

/// Reference to an output of a prior transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutPoint {
    pub tx: TxId,
    pub index: u32,
}

impl OutPoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = self.tx.to_vec();
        b.extend_from_slice(&self.index.to_le_bytes());
        b
    }
}

/// Spending condition on a transparent output. A key hash keeps the public
/// key off chain until the output is spent; a raw key exposes it at once,
/// which is the whole difference between the two address styles under a
/// discrete-log adversary.
#[derive(Clone, Debug, PartialEq)]
pub enum UtxoLock {
    KeyHash([u8; 32]),
    PublicKey(GroupPoint),
}

/// Hash of a public key for a pay-to-key-hash lock.
pub fn key_hash(key: &GroupPoint) -> [u8; 32] {
    tagged_digest(KEY_HASH_TAG, &[&key.to_bytes()])
}

impl UtxoLock {
    /// Whether `key` satisfies this lock.
    pub fn admits(&self, key: &GroupPoint) -> bool {
        match self {
            UtxoLock::KeyHash(h) => *h == key_hash(key),
            UtxoLock::PublicKey(p) => p == key,
        }
    }

    /// The public key this lock exposes before any spend, if any.
    pub fn exposed_key(&self) -> Option<&GroupPoint> {
        match self {
            UtxoLock::KeyHash(_) => None,
            UtxoLock::PublicKey(p) => Some(p),
        }
    }

    fn to_bytes(&self) -> Vec<u8> {
        match self {
            UtxoLock::KeyHash(h) => {
                let mut b = vec![0u8];
                b.extend_from_slice(h);
                b
            }
            UtxoLock::PublicKey(p) => {
                let mut b = vec![1u8];
                b.extend_from_slice(&p.to_bytes());
                b
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UtxoOutput {
    pub lock: UtxoLock,
    pub amount: u64,
}

impl UtxoOutput {
    fn to_bytes(&self) -> Vec<u8> {
        let mut rec = Vec::new();
        push_chunk(&mut rec, &self.lock.to_bytes());
        push_chunk(&mut rec, &self.amount.to_le_bytes());
        rec
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UtxoInput {
    pub previous: OutPoint,
    /// Revealed at spend time; must satisfy the lock on `previous`.
    pub public_key: GroupPoint,
    pub signature: EcdsaSignature,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UtxoTx {
    pub inputs: Vec<UtxoInput>,
    pub outputs: Vec<UtxoOutput>,
    pub fee: u64,
}

impl UtxoTx {
    /// Digest every input signature commits to: outpoints, outputs, fee.
    pub fn signing_digest(&self) -> [u8; 32] {
        let mut parts: Vec<Vec<u8>> = Vec::new();
        for i in &self.inputs {
            parts.push(i.previous.to_bytes());
        }
        for o in &self.outputs {
            parts.push(o.to_bytes());
        }
        parts.push(self.fee.to_le_bytes().to_vec());
        digest_parts(UTXO_SIGN_TAG, parts)
    }

    pub fn id(&self) -> TxId {
        let mut parts = vec![self.signing_digest().to_vec()];
        for i in &self.inputs {
            let mut rec = Vec::new();
            push_chunk(&mut rec, &i.public_key.to_bytes());
            push_chunk(&mut rec, &i.signature.r.to_bytes_be());
            push_chunk(&mut rec, &i.signature.s.to_bytes_be());
            parts.push(rec);
        }
        digest_parts(UTXO_ID_TAG, parts)
    }
}

pub type AccountId = [u8; 32];

/// Stable address of an account key.
pub fn account_id(key: &GroupPoint) -> AccountId {
    tagged_digest(ACCOUNT_ADDR_TAG, &[&key.to_bytes()])
}

/// Account-model transfer. There is no sender field: the sender is recovered
/// from the signature, and that recovery is exactly what leaves the account
/// key exposed on chain after the first spend.
#[derive(Clone, Debug, PartialEq)]
pub struct AccountTx {
    pub to: AccountId,
    pub amount: u64,
    pub fee: u64,
    pub nonce: u64,
    pub signature: RecoverableSignature,
}

impl AccountTx {
    pub fn signing_digest(&self) -> [u8; 32] {
        tagged_digest(
            ACCOUNT_SIGN_TAG,
            &[
                &self.to,
                &self.amount.to_le_bytes(),
                &self.fee.to_le_bytes(),
                &self.nonce.to_le_bytes(),
            ],
        )
    }

    pub fn id(&self) -> TxId {
        let mut rec = Vec::new();
        push_chunk(&mut rec, &self.signature.base.r.to_bytes_be());
        push_chunk(&mut rec, &self.signature.base.s.to_bytes_be());
        push_chunk(&mut rec, &[self.signature.recovery_hint]);
        digest_parts(
            ACCOUNT_ID_TAG,
            vec![self.signing_digest().to_vec(), rec],
        )
    }
}

/// On-chain face of a confidential output: a one-time receiver key and a
/// value commitment, nothing else. The ring and the cut-through models share
/// this shape; the latter never checks the key, it is a wallet tag there.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidentialOutput {
    pub one_time_key: GroupPoint,
    pub commitment: PedersenCommitment,
}

impl ConfidentialOutput {
    pub(crate) fn to_bytes(&self) -> Vec<u8> {
        let mut rec = Vec::new();
        push_chunk(&mut rec, &self.one_time_key.to_bytes());
        push_chunk(&mut rec, &self.commitment.point.to_bytes());
        rec
    }
}

/// A ring slot: a claimed copy of some on-chain output. The validator checks
/// the copy against the chain record it references, so a ring cannot invent
/// members.
#[derive(Clone, Debug, PartialEq)]
pub struct RingMember {
    pub previous: OutPoint,
    pub one_time_key: GroupPoint,
    pub commitment: PedersenCommitment,
}

impl RingMember {
    fn to_bytes(&self) -> Vec<u8> {
        let mut rec = Vec::new();
        push_chunk(&mut rec, &self.previous.to_bytes());
        push_chunk(&mut rec, &self.one_time_key.to_bytes());
        push_chunk(&mut rec, &self.commitment.point.to_bytes());
        rec
    }
}

/// Key image of a one-time secret. Deterministic, so spending the same
/// output twice produces the same image and the second spend is caught,
/// while the image alone names no ring member.
pub fn key_image(secret: &BigUint) -> [u8; 32] {
    tagged_digest(KEY_IMAGE_TAG, &[&secret.to_bytes_be()])
}

#[derive(Clone, Debug, PartialEq)]
pub struct RingSpend {
    pub ring: RingInput<RingMember>,
    pub key_image: [u8; 32],
    /// Commitment to the spent value under a fresh blinding; balances
    /// against the outputs without pointing at the true member.
    pub pseudo_commitment: PedersenCommitment,
    /// Stand-in for a membership proof: binds ring, image, and pseudo
    /// commitment together. Structural only; it carries no soundness, and
    /// nothing downstream pretends otherwise.
    pub attestation: [u8; 32],
}

impl RingSpend {
    /// The binding an attestation must equal. Covers members in order; the
    /// true index is harness bookkeeping and stays out of every digest.
    pub fn attestation_binding(
        ring: &RingInput<RingMember>,
        key_image: &[u8; 32],
        pseudo_commitment: &PedersenCommitment,
    ) -> [u8; 32] {
        let mut parts: Vec<Vec<u8>> = ring.members.iter().map(|m| m.to_bytes()).collect();
        parts.push(key_image.to_vec());
        parts.push(pseudo_commitment.point.to_bytes());
        digest_parts(RING_ATTEST_TAG, parts)
    }

    pub fn attestation_valid(&self) -> bool {
        self.attestation
            == Self::attestation_binding(&self.ring, &self.key_image, &self.pseudo_commitment)
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut rec = Vec::new();
        for m in &self.ring.members {
            push_chunk(&mut rec, &m.to_bytes());
        }
        push_chunk(&mut rec, &self.key_image);
        push_chunk(&mut rec, &self.pseudo_commitment.point.to_bytes());
        push_chunk(&mut rec, &self.attestation);
        rec
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RingTx {
    pub spends: Vec<RingSpend>,
    pub outputs: Vec<ConfidentialOutput>,
    pub fee: u64,
    /// Declared blinding excess: sum of pseudo blindings minus sum of
    /// output blindings, mod group order.
    pub excess: BigUint,
}

impl RingTx {
    pub fn id(&self) -> TxId {
        let mut parts: Vec<Vec<u8>> = self.spends.iter().map(|s| s.to_bytes()).collect();
        for o in &self.outputs {
            parts.push(o.to_bytes());
        }
        parts.push(self.fee.to_le_bytes().to_vec());
        parts.push(self.excess.to_bytes_be());
        digest_parts(RING_ID_TAG, parts)
    }
}

/// Cut-through-style confidential transfer: inputs name prior outputs
/// outright, no decoys. The declared excess is the spend authorization:
/// producing it takes knowledge of every input blinding, and recovering it
/// from the commitment difference alone is a discrete log in the blinding
/// base. No separate signature exists to forge or to check.
#[derive(Clone, Debug, PartialEq)]
pub struct MwTx {
    pub inputs: Vec<OutPoint>,
    pub outputs: Vec<ConfidentialOutput>,
    pub fee: u64,
    pub excess: BigUint,
}

impl MwTx {
    pub fn id(&self) -> TxId {
        let mut parts: Vec<Vec<u8>> = self.inputs.iter().map(|i| i.to_bytes()).collect();
        for o in &self.outputs {
            parts.push(o.to_bytes());
        }
        parts.push(self.fee.to_le_bytes().to_vec());
        parts.push(self.excess.to_bytes_be());
        digest_parts(MW_ID_TAG, parts)
    }
}

fn shielded_id(body: &ShieldedBody) -> TxId {
    let mut parts = vec![body.signing_digest().to_vec()];
    for s in &body.spends {
        let mut rec = Vec::new();
        push_chunk(&mut rec, &s.authorization.commitment.to_bytes());
        push_chunk(&mut rec, &s.authorization.response.to_bytes_be());
        parts.push(rec);
    }
    let mut proof = Vec::new();
    match &body.proof {
        ShieldedProof::Balance { excess } => {
            proof.push(0u8);
            push_chunk(&mut proof, &excess.to_bytes_be());
        }
        ShieldedProof::SetupAuthorized { signature } => {
            proof.push(1u8);
            push_chunk(&mut proof, &signature.commitment.to_bytes());
            push_chunk(&mut proof, &signature.response.to_bytes_be());
        }
    }
    parts.push(proof);
    digest_parts(SHIELDED_ID_TAG, parts)
}

/// Model-specific body of a transaction.
#[derive(Clone, Debug, PartialEq)]
pub enum TxBody {
    Utxo(UtxoTx),
    Account(AccountTx),
    Ring(RingTx),
    Mw(MwTx),
    Shielded(ShieldedBody),
}

impl TxBody {
    pub fn id(&self) -> TxId {
        match self {
            TxBody::Utxo(t) => t.id(),
            TxBody::Account(t) => t.id(),
            TxBody::Ring(t) => t.id(),
            TxBody::Mw(t) => t.id(),
            TxBody::Shielded(b) => shielded_id(b),
        }
    }

    pub fn fee(&self) -> u64 {
        match self {
            TxBody::Utxo(t) => t.fee,
            TxBody::Account(t) => t.fee,
            TxBody::Ring(t) => t.fee,
            TxBody::Mw(t) => t.fee,
            TxBody::Shielded(b) => b.fee,
        }
    }

    pub fn model(&self) -> TxModel {
        match self {
            TxBody::Utxo(_) => TxModel::Utxo,
            TxBody::Account(_) => TxModel::Account,
            TxBody::Ring(_) => TxModel::ConfidentialRing,
            TxBody::Mw(_) => TxModel::ConfidentialMw,
            TxBody::Shielded(_) => TxModel::ShieldedPool,
        }
    }
}

/// A broadcast transaction: body plus the model time it hit the network.
#[derive(Clone, Debug, PartialEq)]
pub struct Transaction {
    pub body: TxBody,
    /// Simulation seconds at broadcast. Deliberately not part of the id.
    pub declared_at: f64,
}

impl Transaction {
    pub fn new(body: TxBody, declared_at: f64) -> Transaction {
        Transaction { body, declared_at }
    }

    pub fn id(&self) -> TxId {
        self.body.id()
    }

    pub fn fee(&self) -> u64 {
        self.body.fee()
    }

    pub fn model(&self) -> TxModel {
        self.body.model()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::{curve_by_label, generate_keypair};

    fn group() -> crate::ec::CurveGroup {
        curve_by_label("toy-w28").unwrap()
    }

    #[test]
    fn key_hash_lock_admits_only_its_key() {
        let g = group();
        let a = generate_keypair(&g, 11);
        let b = generate_keypair(&g, 12);
        let lock = UtxoLock::KeyHash(key_hash(&a.public_point));
        assert!(lock.admits(&a.public_point));
        assert!(!lock.admits(&b.public_point));
        assert!(lock.exposed_key().is_none());
    }

    #[test]
    fn raw_key_lock_exposes_its_key() {
        let g = group();
        let a = generate_keypair(&g, 13);
        let lock = UtxoLock::PublicKey(a.public_point.clone());
        assert!(lock.admits(&a.public_point));
        assert_eq!(lock.exposed_key(), Some(&a.public_point));
    }

    #[test]
    fn utxo_signing_digest_ignores_witness_data() {
        let g = group();
        let a = generate_keypair(&g, 21);
        let b = generate_keypair(&g, 22);
        let prev = OutPoint {
            tx: [7u8; 32],
            index: 0,
        };
        let out = UtxoOutput {
            lock: UtxoLock::KeyHash(key_hash(&b.public_point)),
            amount: 40,
        };
        let mk = |signer: &crate::ec::KeyPair, seed| UtxoTx {
            inputs: vec![UtxoInput {
                previous: prev,
                public_key: signer.public_point.clone(),
                signature: crate::sig::ecdsa_sign(b"x", signer, seed, &g).unwrap(),
            }],
            outputs: vec![out.clone()],
            fee: 10,
        };
        let t1 = mk(&a, 1);
        let t2 = mk(&b, 2);
        assert_eq!(t1.signing_digest(), t2.signing_digest());
        assert_ne!(t1.id(), t2.id());
    }

    #[test]
    fn account_signing_digest_covers_every_field() {
        let base = AccountTx {
            to: [1u8; 32],
            amount: 5,
            fee: 1,
            nonce: 0,
            signature: RecoverableSignature {
                base: EcdsaSignature {
                    r: BigUint::from(1u32),
                    s: BigUint::from(1u32),
                },
                recovery_hint: 0,
            },
        };
        let d0 = base.signing_digest();
        for variant in [
            AccountTx {
                to: [2u8; 32],
                ..base.clone()
            },
            AccountTx {
                amount: 6,
                ..base.clone()
            },
            AccountTx {
                fee: 2,
                ..base.clone()
            },
            AccountTx {
                nonce: 1,
                ..base.clone()
            },
        ] {
            assert_ne!(variant.signing_digest(), d0);
        }
        let resigned = AccountTx {
            signature: RecoverableSignature {
                base: EcdsaSignature {
                    r: BigUint::from(9u32),
                    s: BigUint::from(9u32),
                },
                recovery_hint: 1,
            },
            ..base.clone()
        };
        assert_eq!(resigned.signing_digest(), d0);
        assert_ne!(resigned.id(), base.id());
    }

    #[test]
    fn key_image_is_deterministic_and_injective_in_practice() {
        let a = BigUint::from(123456u64);
        let b = BigUint::from(123457u64);
        assert_eq!(key_image(&a), key_image(&a));
        assert_ne!(key_image(&a), key_image(&b));
    }

    #[test]
    fn attestation_tamper_is_detected() {
        let g = group();
        let params = crate::privacy::PedersenParams::derive(&g).unwrap();
        let mut rng = crate::rng::DetRng::from_seed(31).split("tx-test");
        let member = |i: u64| RingMember {
            previous: OutPoint {
                tx: [i as u8; 32],
                index: 0,
            },
            one_time_key: g.mul_generator(&BigUint::from(i + 2)),
            commitment: params.commit(i, &BigUint::from(i + 9)),
        };
        let pool: Vec<RingMember> = (1..6).map(member).collect();
        let ring = crate::privacy::build_ring(member(0), &pool, 3, &mut rng).unwrap();
        let image = key_image(&BigUint::from(77u32));
        let pseudo = params.commit(0, &BigUint::from(4u32));
        let att = RingSpend::attestation_binding(&ring, &image, &pseudo);
        let mut spend = RingSpend {
            ring,
            key_image: image,
            pseudo_commitment: pseudo,
            attestation: att,
        };
        assert!(spend.attestation_valid());
        spend.key_image[0] ^= 1;
        assert!(!spend.attestation_valid());
    }

    #[test]
    fn body_ids_are_distinct_across_models() {
        let g = group();
        let a = generate_keypair(&g, 41);
        let utxo = TxBody::Utxo(UtxoTx {
            inputs: vec![],
            outputs: vec![UtxoOutput {
                lock: UtxoLock::KeyHash(key_hash(&a.public_point)),
                amount: 1,
            }],
            fee: 0,
        });
        let account = TxBody::Account(AccountTx {
            to: [0u8; 32],
            amount: 1,
            fee: 0,
            nonce: 0,
            signature: RecoverableSignature {
                base: EcdsaSignature {
                    r: BigUint::from(1u32),
                    s: BigUint::from(1u32),
                },
                recovery_hint: 0,
            },
        });
        assert_ne!(utxo.id(), account.id());
        assert_eq!(utxo.model(), TxModel::Utxo);
        assert_eq!(account.model(), TxModel::Account);
        let wrapped = Transaction::new(utxo.clone(), 12.5);
        assert_eq!(wrapped.id(), utxo.id());
        assert_eq!(wrapped.fee(), 0);
    }
}

//! Ledger state: per-model transaction validators, block application, and
//! fork choice.
//!
//! Everything in this file sees exactly what a network node would see.
//! Ground-truth openings, true ring indices, and wallet secrets live in
//! harness types; a source-level audit test pins this file to that boundary.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::ec::hash::tagged_digest;
use crate::ec::{CurveGroup, GroupPoint};
use crate::privacy::shielded::{derive_note_id, proof_accepts, NoteId};
use crate::privacy::{
    balance_check, PedersenCommitment, PedersenParams, ShieldedNote, ShieldedPool, ShieldedProof,
};
use crate::sig::{ecdsa_recover, ecdsa_verify, eddsa_verify_zcash};

use crate::ec::params::resolve_curve;

use super::block::{solve_pow_witness, verify_pow_witness, Block, BlockId};
use super::chainspec::{difficulty, ChainSpec, PowAlgorithm, TxModel};
use super::mempool::Mempool;
use super::tx::{
    account_id, AccountId, ConfidentialOutput, OutPoint, Transaction, TxBody, TxId, UtxoOutput,
};
use super::LedgerError;

const MINER_ID_TAG: &str = "ledger/miner";
const GENESIS_FUND_TAG: &str = "ledger/genesis";
const COINBASE_TAG: &str = "ledger/coinbase";

pub const COINBASE_REWARD: u64 = 50;
pub const DEFAULT_BLOCK_CAPACITY: usize = 100;

/// Where a block's coinbase output lands, for every model that uses
/// outpoints. Derived from the block id alone so anyone can recompute it.
pub fn coinbase_outpoint(block_id: &BlockId) -> OutPoint {
    OutPoint {
        tx: tagged_digest(COINBASE_TAG, &[block_id]),
        index: 0,
    }
}

/// Machine-readable rejection cause for a submitted transaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    BadSignature,
    Overspend,
    BadNonce { expected: u64, got: u64 },
    UnbalancedCommitment,
    DoubleSpend,
    UnknownInput,
    DuplicateTx,
    WrongModel { expected: TxModel, got: TxModel },
    MalformedRing,
    BadAttestation,
    DuplicateNote,
    EmptyTx,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::BadSignature => write!(f, "bad_signature"),
            RejectReason::Overspend => write!(f, "overspend"),
            RejectReason::BadNonce { expected, got } => {
                write!(f, "bad_nonce expected={expected} got={got}")
            }
            RejectReason::UnbalancedCommitment => write!(f, "unbalanced_commitment"),
            RejectReason::DoubleSpend => write!(f, "double_spend"),
            RejectReason::UnknownInput => write!(f, "unknown_input"),
            RejectReason::DuplicateTx => write!(f, "duplicate_tx"),
            RejectReason::WrongModel { expected, got } => {
                write!(f, "wrong_model expected={expected:?} got={got:?}")
            }
            RejectReason::MalformedRing => write!(f, "malformed_ring"),
            RejectReason::BadAttestation => write!(f, "bad_attestation"),
            RejectReason::DuplicateNote => write!(f, "duplicate_note"),
            RejectReason::EmptyTx => write!(f, "empty_tx"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AccountRecord {
    pub balance: u64,
    pub next_nonce: u64,
    /// Key recovered from the account's first spend; None until then. The
    /// whole reuse-policy attack surface sits in this one field.
    pub revealed_key: Option<GroupPoint>,
}

/// What connecting a block did to the canonical chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockOutcome {
    Extended,
    Reorged { reverted_blocks: usize },
    SideChain,
    Orphaned,
    Duplicate,
}

/// Validator-visible context shared by every check.
struct ValidationCtx<'a> {
    model: TxModel,
    group: &'a CurveGroup,
    params: Option<&'a PedersenParams>,
    setup_public: Option<&'a GroupPoint>,
    /// Block application demands exact account nonces; mempool admission
    /// lets future nonces queue behind pending spends.
    strict_nonce: bool,
}

/// The evolving per-branch state. Rebuilt from genesis on reorgs, so every
/// mutation in here must be a pure function of the block sequence.
#[derive(Clone, Debug, Default)]
struct ModelState {
    utxos: BTreeMap<OutPoint, UtxoOutput>,
    spent_utxos: BTreeSet<OutPoint>,
    accounts: BTreeMap<AccountId, AccountRecord>,
    conf_outputs: BTreeMap<OutPoint, ConfidentialOutput>,
    spent_conf: BTreeSet<OutPoint>,
    spent_images: BTreeSet<[u8; 32]>,
    pool: ShieldedPool,
    spent_notes: BTreeSet<NoteId>,
    included: BTreeMap<TxId, (BlockId, u64)>,
    issued: u64,
}

impl ModelState {
    /// Validate a transaction against this state and, only if every check
    /// passes, apply its mutations. Checks run strictly before writes.
    fn apply_tx(&mut self, body: &TxBody, ctx: &ValidationCtx) -> Result<(), RejectReason> {
        if body.model() != ctx.model {
            return Err(RejectReason::WrongModel {
                expected: ctx.model,
                got: body.model(),
            });
        }
        match body {
            TxBody::Utxo(tx) => self.apply_utxo(tx, ctx),
            TxBody::Account(tx) => self.apply_account(tx, ctx),
            TxBody::Ring(tx) => self.apply_ring(tx, ctx),
            TxBody::Mw(tx) => self.apply_mw(tx, ctx),
            TxBody::Shielded(body) => self.apply_shielded(body, ctx),
        }
    }

    fn apply_utxo(
        &mut self,
        tx: &super::tx::UtxoTx,
        ctx: &ValidationCtx,
    ) -> Result<(), RejectReason> {
        if tx.inputs.is_empty() {
            return Err(RejectReason::EmptyTx);
        }
        let mut seen = BTreeSet::new();
        let digest = tx.signing_digest();
        let mut total_in = 0u64;
        for input in &tx.inputs {
            if !seen.insert(input.previous) {
                return Err(RejectReason::DoubleSpend);
            }
            let Some(out) = self.utxos.get(&input.previous) else {
                if self.spent_utxos.contains(&input.previous) {
                    return Err(RejectReason::DoubleSpend);
                }
                return Err(RejectReason::UnknownInput);
            };
            if !out.lock.admits(&input.public_key) {
                return Err(RejectReason::BadSignature);
            }
            if !ecdsa_verify(&digest, &input.signature, &input.public_key, ctx.group) {
                return Err(RejectReason::BadSignature);
            }
            total_in = total_in
                .checked_add(out.amount)
                .ok_or(RejectReason::Overspend)?;
        }
        let mut total_out = tx.fee;
        for out in &tx.outputs {
            total_out = total_out
                .checked_add(out.amount)
                .ok_or(RejectReason::Overspend)?;
        }
        if total_in != total_out {
            return Err(RejectReason::Overspend);
        }
        let id = tx.id();
        for input in &tx.inputs {
            self.utxos.remove(&input.previous);
            self.spent_utxos.insert(input.previous);
        }
        for (i, out) in tx.outputs.iter().enumerate() {
            self.utxos.insert(
                OutPoint {
                    tx: id,
                    index: i as u32,
                },
                out.clone(),
            );
        }
        Ok(())
    }

    fn apply_account(
        &mut self,
        tx: &super::tx::AccountTx,
        ctx: &ValidationCtx,
    ) -> Result<(), RejectReason> {
        let digest = tx.signing_digest();
        let Ok(sender_key) = ecdsa_recover(&digest, &tx.signature, ctx.group) else {
            return Err(RejectReason::BadSignature);
        };
        let sender = account_id(&sender_key);
        let Some(record) = self.accounts.get(&sender) else {
            return Err(RejectReason::Overspend);
        };
        let nonce_ok = if ctx.strict_nonce {
            tx.nonce == record.next_nonce
        } else {
            tx.nonce >= record.next_nonce
        };
        if !nonce_ok {
            return Err(RejectReason::BadNonce {
                expected: record.next_nonce,
                got: tx.nonce,
            });
        }
        let total = tx
            .amount
            .checked_add(tx.fee)
            .ok_or(RejectReason::Overspend)?;
        if record.balance < total {
            return Err(RejectReason::Overspend);
        }
        let record = self.accounts.get_mut(&sender).expect("checked above");
        record.balance -= total;
        record.next_nonce = tx.nonce + 1;
        record.revealed_key = Some(sender_key);
        self.accounts.entry(tx.to).or_default().balance += tx.amount;
        Ok(())
    }

    fn apply_ring(
        &mut self,
        tx: &super::tx::RingTx,
        ctx: &ValidationCtx,
    ) -> Result<(), RejectReason> {
        let params = ctx.params.expect("confidential chain carries params");
        if tx.spends.is_empty() {
            return Err(RejectReason::EmptyTx);
        }
        let mut images = BTreeSet::new();
        for spend in &tx.spends {
            let members = &spend.ring.members;
            if members.is_empty() {
                return Err(RejectReason::MalformedRing);
            }
            for (i, m) in members.iter().enumerate() {
                if members[..i].contains(m) {
                    return Err(RejectReason::MalformedRing);
                }
                match self.conf_outputs.get(&m.previous) {
                    Some(rec)
                        if rec.one_time_key == m.one_time_key
                            && rec.commitment == m.commitment => {}
                    _ => return Err(RejectReason::UnknownInput),
                }
            }
            if !spend.attestation_valid() {
                return Err(RejectReason::BadAttestation);
            }
            if self.spent_images.contains(&spend.key_image) || !images.insert(spend.key_image) {
                return Err(RejectReason::DoubleSpend);
            }
        }
        let pseudo: Vec<PedersenCommitment> = tx
            .spends
            .iter()
            .map(|s| s.pseudo_commitment.clone())
            .collect();
        let outs: Vec<PedersenCommitment> =
            tx.outputs.iter().map(|o| o.commitment.clone()).collect();
        if !balance_check(&pseudo, &outs, tx.fee, &tx.excess, params) {
            return Err(RejectReason::UnbalancedCommitment);
        }
        let id = tx.id();
        for spend in &tx.spends {
            self.spent_images.insert(spend.key_image);
        }
        // spent outputs stay in the set: which member was consumed is
        // exactly what the ring hides, so nothing can be removed
        for (i, out) in tx.outputs.iter().enumerate() {
            self.conf_outputs.insert(
                OutPoint {
                    tx: id,
                    index: i as u32,
                },
                out.clone(),
            );
        }
        Ok(())
    }

    fn apply_mw(&mut self, tx: &super::tx::MwTx, ctx: &ValidationCtx) -> Result<(), RejectReason> {
        let params = ctx.params.expect("confidential chain carries params");
        if tx.inputs.is_empty() {
            return Err(RejectReason::EmptyTx);
        }
        let mut seen = BTreeSet::new();
        let mut ins = Vec::new();
        for input in &tx.inputs {
            if !seen.insert(*input) {
                return Err(RejectReason::DoubleSpend);
            }
            let Some(rec) = self.conf_outputs.get(input) else {
                if self.spent_conf.contains(input) {
                    return Err(RejectReason::DoubleSpend);
                }
                return Err(RejectReason::UnknownInput);
            };
            ins.push(rec.commitment.clone());
        }
        let outs: Vec<PedersenCommitment> =
            tx.outputs.iter().map(|o| o.commitment.clone()).collect();
        // the declared excess is also the spend authorization: writing it
        // down takes knowledge of every input blinding
        if !balance_check(&ins, &outs, tx.fee, &tx.excess, params) {
            return Err(RejectReason::UnbalancedCommitment);
        }
        let id = tx.id();
        for input in &tx.inputs {
            self.conf_outputs.remove(input);
            self.spent_conf.insert(*input);
        }
        for (i, out) in tx.outputs.iter().enumerate() {
            self.conf_outputs.insert(
                OutPoint {
                    tx: id,
                    index: i as u32,
                },
                out.clone(),
            );
        }
        Ok(())
    }

    fn apply_shielded(
        &mut self,
        body: &crate::privacy::ShieldedBody,
        ctx: &ValidationCtx,
    ) -> Result<(), RejectReason> {
        let params = ctx.params.expect("shielded chain carries params");
        let authorized_mint = matches!(body.proof, ShieldedProof::SetupAuthorized { .. });
        if body.spends.is_empty() && !authorized_mint {
            return Err(RejectReason::EmptyTx);
        }
        if authorized_mint && ctx.setup_public.is_none() {
            // no ceremony key installed means nothing can vouch for the claim
            return Err(RejectReason::BadSignature);
        }
        let digest = body.signing_digest();
        let mut seen = BTreeSet::new();
        let mut ins = Vec::new();
        for spend in &body.spends {
            if !seen.insert(spend.note_id) {
                return Err(RejectReason::DoubleSpend);
            }
            let Some(note) = self.pool.note(&spend.note_id) else {
                if self.spent_notes.contains(&spend.note_id) {
                    return Err(RejectReason::DoubleSpend);
                }
                return Err(RejectReason::UnknownInput);
            };
            if !eddsa_verify_zcash(&digest, &spend.authorization, &note.owner, ctx.group) {
                return Err(RejectReason::BadSignature);
            }
            ins.push(note.commitment.clone());
        }
        let mut fresh = BTreeSet::new();
        for out in &body.outputs {
            if self.pool.contains(&out.id)
                || self.spent_notes.contains(&out.id)
                || !fresh.insert(out.id)
            {
                return Err(RejectReason::DuplicateNote);
            }
        }
        let identity = ctx.group.identity();
        let setup = ctx.setup_public.unwrap_or(&identity);
        if !proof_accepts(body, &ins, setup, params) {
            return Err(RejectReason::UnbalancedCommitment);
        }
        for spend in &body.spends {
            self.pool.remove_note(&spend.note_id);
            self.spent_notes.insert(spend.note_id);
        }
        for out in &body.outputs {
            let added = self.pool.add_note(out.clone());
            debug_assert!(added, "freshness was checked above");
        }
        Ok(())
    }

    /// Credit the miner with the fixed reward plus the block's fees. Fees
    /// recycle into the coinbase, so issuance grows by exactly the reward.
    fn apply_coinbase(
        &mut self,
        block_id: &BlockId,
        height: u64,
        miner_key: &GroupPoint,
        fees: u64,
        ctx: &ValidationCtx,
    ) -> Result<(), LedgerError> {
        let reward = COINBASE_REWARD
            .checked_add(fees)
            .ok_or_else(|| LedgerError::BadBlock {
                reason: "coinbase overflow".into(),
            })?;
        let outpoint = coinbase_outpoint(block_id);
        match ctx.model {
            TxModel::Utxo => {
                self.utxos.insert(
                    outpoint,
                    UtxoOutput {
                        lock: super::tx::UtxoLock::KeyHash(super::tx::key_hash(miner_key)),
                        amount: reward,
                    },
                );
            }
            TxModel::Account => {
                self.accounts
                    .entry(account_id(miner_key))
                    .or_default()
                    .balance += reward;
            }
            TxModel::ConfidentialRing | TxModel::ConfidentialMw => {
                let params = ctx.params.expect("confidential chain carries params");
                // zero blinding: the coinbase amount is public, and anyone
                // can recheck the commitment as reward * G
                self.conf_outputs.insert(
                    outpoint,
                    ConfidentialOutput {
                        one_time_key: miner_key.clone(),
                        commitment: params.commit(reward, &BigUint::zero()),
                    },
                );
            }
            TxModel::ShieldedPool => {
                let params = ctx.params.expect("shielded chain carries params");
                let id = derive_note_id(miner_key, self.pool.created_total(), height);
                let note = ShieldedNote {
                    id,
                    commitment: params.commit(reward, &BigUint::zero()),
                    owner: miner_key.clone(),
                };
                if !self.pool.add_note(note) {
                    return Err(LedgerError::BadBlock {
                        reason: "coinbase note id collision".into(),
                    });
                }
            }
        }
        self.issued += COINBASE_REWARD;
        Ok(())
    }
}

struct StoredBlock {
    block: Block,
    cumulative_work: u128,
}

/// One chain's full node view: spec, block store, canonical state, mempool.
pub struct LedgerState {
    spec: ChainSpec,
    group: CurveGroup,
    params: Option<PedersenParams>,
    setup_public: Option<GroupPoint>,
    miners: BTreeMap<[u8; 32], GroupPoint>,
    blocks: BTreeMap<BlockId, StoredBlock>,
    children: BTreeMap<BlockId, Vec<BlockId>>,
    orphans: Vec<Block>,
    genesis_id: BlockId,
    genesis_model: ModelState,
    genesis_allocs: u32,
    tip: BlockId,
    model: ModelState,
    mempool: Mempool,
    block_capacity: usize,
}

impl LedgerState {
    pub fn new(spec: ChainSpec) -> Result<LedgerState, LedgerError> {
        let group = resolve_curve(&spec.curve)?;
        let params = match spec.tx_model {
            TxModel::ConfidentialRing | TxModel::ConfidentialMw | TxModel::ShieldedPool => {
                Some(PedersenParams::derive(&group)?)
            }
            TxModel::Utxo | TxModel::Account => None,
        };
        let genesis = Block {
            parent: [0u8; 32],
            height: 0,
            transactions: vec![],
            miner: [0u8; 32],
            pow_witness: None,
            timestamp: 0.0,
        };
        let genesis_id = genesis.id();
        let mut blocks = BTreeMap::new();
        blocks.insert(
            genesis_id,
            StoredBlock {
                block: genesis,
                cumulative_work: 0,
            },
        );
        Ok(LedgerState {
            spec,
            group,
            params,
            setup_public: None,
            miners: BTreeMap::new(),
            blocks,
            children: BTreeMap::new(),
            orphans: Vec::new(),
            genesis_id,
            genesis_model: ModelState::default(),
            genesis_allocs: 0,
            tip: genesis_id,
            model: ModelState::default(),
            mempool: Mempool::new(),
            block_capacity: DEFAULT_BLOCK_CAPACITY,
        })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn group(&self) -> &CurveGroup {
        &self.group
    }

    pub fn params(&self) -> Option<&PedersenParams> {
        self.params.as_ref()
    }

    pub fn setup_public(&self) -> Option<&GroupPoint> {
        self.setup_public.as_ref()
    }

    /// Install the ceremony's public parameter. Shielded chains only.
    pub fn install_setup_key(&mut self, key: GroupPoint) -> Result<(), LedgerError> {
        self.require_model(TxModel::ShieldedPool)?;
        self.setup_public = Some(key);
        Ok(())
    }

    pub fn set_block_capacity(&mut self, capacity: usize) {
        self.block_capacity = capacity.max(1);
    }

    pub fn block_capacity(&self) -> usize {
        self.block_capacity
    }

    fn require_model(&self, expected: TxModel) -> Result<(), LedgerError> {
        if self.spec.tx_model != expected {
            return Err(LedgerError::ModelMismatch {
                expected,
                got: self.spec.tx_model,
            });
        }
        Ok(())
    }

    fn ctx(&self) -> ValidationCtx<'_> {
        ValidationCtx {
            model: self.spec.tx_model,
            group: &self.group,
            params: self.params.as_ref(),
            setup_public: self.setup_public.as_ref(),
            strict_nonce: true,
        }
    }

    fn genesis_gate(&self) -> Result<(), LedgerError> {
        if self.tip != self.genesis_id {
            return Err(LedgerError::BadBlock {
                reason: "genesis allocations must precede the first block".into(),
            });
        }
        Ok(())
    }

    fn genesis_outpoint(&mut self) -> OutPoint {
        let op = OutPoint {
            tx: tagged_digest(GENESIS_FUND_TAG, &[self.spec.label.as_bytes()]),
            index: self.genesis_allocs,
        };
        self.genesis_allocs += 1;
        op
    }

    /// Pre-mine a transparent output. Genesis only.
    pub fn allocate_utxo(
        &mut self,
        lock: super::tx::UtxoLock,
        amount: u64,
    ) -> Result<OutPoint, LedgerError> {
        self.require_model(TxModel::Utxo)?;
        self.genesis_gate()?;
        let op = self.genesis_outpoint();
        self.genesis_model
            .utxos
            .insert(op, UtxoOutput { lock, amount });
        self.genesis_model.issued += amount;
        self.model = self.genesis_model.clone();
        Ok(op)
    }

    /// Pre-fund an account. Genesis only.
    pub fn allocate_account(&mut self, id: AccountId, amount: u64) -> Result<(), LedgerError> {
        self.require_model(TxModel::Account)?;
        self.genesis_gate()?;
        self.genesis_model.accounts.entry(id).or_default().balance += amount;
        self.genesis_model.issued += amount;
        self.model = self.genesis_model.clone();
        Ok(())
    }

    /// Pre-mine a confidential output. Genesis only; the declared value
    /// feeds the public issuance counter, as a real chain's supply audit
    /// would for its genesis coins.
    pub fn allocate_confidential(
        &mut self,
        output: ConfidentialOutput,
        declared_value: u64,
    ) -> Result<OutPoint, LedgerError> {
        if self.spec.tx_model != TxModel::ConfidentialRing
            && self.spec.tx_model != TxModel::ConfidentialMw
        {
            return Err(LedgerError::ModelMismatch {
                expected: TxModel::ConfidentialRing,
                got: self.spec.tx_model,
            });
        }
        self.genesis_gate()?;
        let op = self.genesis_outpoint();
        self.genesis_model.conf_outputs.insert(op, output);
        self.genesis_model.issued += declared_value;
        self.model = self.genesis_model.clone();
        Ok(op)
    }

    /// Pre-mine a shielded note. Genesis only.
    pub fn allocate_note(
        &mut self,
        note: ShieldedNote,
        declared_value: u64,
    ) -> Result<(), LedgerError> {
        self.require_model(TxModel::ShieldedPool)?;
        self.genesis_gate()?;
        if !self.genesis_model.pool.add_note(note) {
            return Err(LedgerError::BadBlock {
                reason: "genesis note id collision".into(),
            });
        }
        self.genesis_model.issued += declared_value;
        self.model = self.genesis_model.clone();
        Ok(())
    }

    /// Register a block producer; the returned id goes into block headers
    /// and the key receives the rewards.
    pub fn register_miner(&mut self, key: GroupPoint) -> [u8; 32] {
        let id = tagged_digest(MINER_ID_TAG, &[&key.to_bytes()]);
        self.miners.insert(id, key);
        id
    }

    pub fn miner_key(&self, id: &[u8; 32]) -> Option<&GroupPoint> {
        self.miners.get(id)
    }

    /// Validate against the canonical tip state and admit to the mempool.
    pub fn submit_tx(&mut self, tx: Transaction) -> Result<(), RejectReason> {
        let id = tx.id();
        if self.mempool.contains(&id) || self.model.included.contains_key(&id) {
            return Err(RejectReason::DuplicateTx);
        }
        let mut scratch = self.model.clone();
        let ctx = ValidationCtx {
            strict_nonce: false,
            ..self.ctx()
        };
        scratch.apply_tx(&tx.body, &ctx)?;
        self.mempool.insert(tx);
        Ok(())
    }

    pub fn mempool(&self) -> &Mempool {
        &self.mempool
    }

    /// Assemble a block off the current tip: mempool order, conflicts
    /// filtered by trial application, capacity capped. The mempool itself
    /// is untouched until the block connects.
    pub fn produce_block(&self, miner: &[u8; 32], now: f64) -> Result<Block, LedgerError> {
        if !self.miners.contains_key(miner) {
            return Err(LedgerError::UnknownMiner {
                id: short_hex(miner),
            });
        }
        let ctx = self.ctx();
        let mut scratch = self.model.clone();
        let mut txs = Vec::new();
        for tx in self.mempool.iter() {
            if txs.len() >= self.block_capacity {
                break;
            }
            if scratch.apply_tx(&tx.body, &ctx).is_ok() {
                txs.push(tx.clone());
            }
        }
        let height = self.tip_height() + 1;
        let parent = self.tip;
        let pow_witness = match self.spec.pow {
            PowAlgorithm::Equihash { .. } => Some(solve_pow_witness(&parent, height, miner)),
            _ => None,
        };
        Ok(Block {
            parent,
            height,
            transactions: txs,
            miner: *miner,
            pow_witness,
            timestamp: now,
        })
    }

    /// Take a block from the network: validate, store, and run fork choice.
    /// Longest cumulative work wins; ties keep the first-seen branch.
    pub fn receive_block(&mut self, block: Block) -> Result<BlockOutcome, LedgerError> {
        let id = block.id();
        if self.blocks.contains_key(&id) {
            return Ok(BlockOutcome::Duplicate);
        }
        if !self.blocks.contains_key(&block.parent) {
            self.orphans.push(block);
            return Ok(BlockOutcome::Orphaned);
        }
        let outcome = self.connect_block(block)?;
        // adopt any orphans whose parent just became known; an invalid
        // orphan is dropped rather than poisoning the whole intake
        loop {
            let mut progressed = false;
            let mut i = 0;
            while i < self.orphans.len() {
                if self.blocks.contains_key(&self.orphans[i].parent) {
                    let b = self.orphans.remove(i);
                    let _ = self.connect_block(b);
                    progressed = true;
                } else {
                    i += 1;
                }
            }
            if !progressed {
                break;
            }
        }
        Ok(outcome)
    }

    fn connect_block(&mut self, block: Block) -> Result<BlockOutcome, LedgerError> {
        let id = block.id();
        if self.blocks.contains_key(&id) {
            return Ok(BlockOutcome::Duplicate);
        }
        let parent = self.blocks.get(&block.parent).expect("caller checked");
        let parent_height = parent.block.height;
        let parent_work = parent.cumulative_work;
        if block.height != parent_height + 1 {
            return Err(LedgerError::BadBlock {
                reason: format!(
                    "height {} does not follow parent height {parent_height}",
                    block.height
                ),
            });
        }
        if matches!(self.spec.pow, PowAlgorithm::Equihash { .. }) && !verify_pow_witness(&block) {
            return Err(LedgerError::BadBlock {
                reason: "proof-of-work witness missing or invalid".into(),
            });
        }
        let miner_key = self
            .miners
            .get(&block.miner)
            .cloned()
            .ok_or_else(|| LedgerError::UnknownMiner {
                id: short_hex(&block.miner),
            })?;
        let mut state = if block.parent == self.tip {
            self.model.clone()
        } else {
            self.rebuild_at(&block.parent)?
        };
        self.apply_block_to(&mut state, &block, &miner_key)?;
        let work = parent_work + self.work_per_block();
        let parent_id = block.parent;
        self.blocks.insert(
            id,
            StoredBlock {
                block,
                cumulative_work: work,
            },
        );
        self.children.entry(parent_id).or_default().push(id);
        if work <= self.tip_work() {
            return Ok(BlockOutcome::SideChain);
        }
        let old_tip = self.tip;
        self.tip = id;
        self.model = state;
        if parent_id == old_tip {
            for txid in &self.blocks[&id].block.tx_ids() {
                self.mempool.remove(txid);
            }
            return Ok(BlockOutcome::Extended);
        }
        // reorg: return reverted transactions to the mempool, drop adopted
        // ones from it
        let old_path = self.branch_path(&old_tip);
        let new_path = self.branch_path(&id);
        let fork = common_prefix_len(&old_path, &new_path);
        let mut adopted_ids = BTreeSet::new();
        for bid in &new_path[fork..] {
            for txid in self.blocks[bid].block.tx_ids() {
                adopted_ids.insert(txid);
            }
        }
        let mut reverted = Vec::new();
        for bid in &old_path[fork..] {
            for tx in &self.blocks[bid].block.transactions {
                if !adopted_ids.contains(&tx.id()) {
                    reverted.push(tx.clone());
                }
            }
        }
        for tx in reverted {
            self.mempool.insert(tx);
        }
        for txid in &adopted_ids {
            self.mempool.remove(txid);
        }
        Ok(BlockOutcome::Reorged {
            reverted_blocks: old_path.len() - fork,
        })
    }

    fn apply_block_to(
        &self,
        state: &mut ModelState,
        block: &Block,
        miner_key: &GroupPoint,
    ) -> Result<(), LedgerError> {
        let ctx = self.ctx();
        let block_id = block.id();
        let mut fees = 0u64;
        for tx in &block.transactions {
            state
                .apply_tx(&tx.body, &ctx)
                .map_err(|r| LedgerError::BadBlock {
                    reason: format!("transaction {}: {r}", short_hex(&tx.id())),
                })?;
            fees = fees.checked_add(tx.fee()).ok_or(LedgerError::BadBlock {
                reason: "fee overflow".into(),
            })?;
            state.included.insert(tx.id(), (block_id, block.height));
        }
        state.apply_coinbase(&block_id, block.height, miner_key, fees, &ctx)
    }

    /// Replay the branch ending at `at` from genesis. Blocks were validated
    /// when stored, so replay cannot fail on honest data.
    fn rebuild_at(&self, at: &BlockId) -> Result<ModelState, LedgerError> {
        let path = self.branch_path(at);
        let mut state = self.genesis_model.clone();
        for bid in &path[1..] {
            let stored = &self.blocks[bid];
            let miner_key =
                self.miners
                    .get(&stored.block.miner)
                    .ok_or_else(|| LedgerError::UnknownMiner {
                        id: short_hex(&stored.block.miner),
                    })?;
            self.apply_block_to(&mut state, &stored.block, miner_key)?;
        }
        Ok(state)
    }

    /// Block ids from genesis to `tip_id`, inclusive.
    pub fn branch_path(&self, tip_id: &BlockId) -> Vec<BlockId> {
        let mut path = vec![*tip_id];
        let mut cur = *tip_id;
        while cur != self.genesis_id {
            cur = self.blocks[&cur].block.parent;
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn work_per_block(&self) -> u128 {
        u128::from(difficulty(&self.spec)).max(1)
    }

    pub fn tip_id(&self) -> BlockId {
        self.tip
    }

    pub fn tip_height(&self) -> u64 {
        self.blocks[&self.tip].block.height
    }

    pub fn tip_work(&self) -> u128 {
        self.blocks[&self.tip].cumulative_work
    }

    pub fn block(&self, id: &BlockId) -> Option<&Block> {
        self.blocks.get(id).map(|s| &s.block)
    }

    pub fn genesis_id(&self) -> BlockId {
        self.genesis_id
    }

    /// Where a transaction sits on the canonical chain, if anywhere.
    pub fn tx_location(&self, id: &TxId) -> Option<(BlockId, u64)> {
        self.model.included.get(id).copied()
    }

    /// Inclusion depth on the canonical chain: 1 at the tip block.
    pub fn confirmation_depth(&self, id: &TxId) -> Option<u64> {
        let (_, height) = self.model.included.get(id)?;
        Some(self.tip_height() - height + 1)
    }

    pub fn utxo(&self, op: &OutPoint) -> Option<&UtxoOutput> {
        self.model.utxos.get(op)
    }

    pub fn utxos(&self) -> impl Iterator<Item = (&OutPoint, &UtxoOutput)> {
        self.model.utxos.iter()
    }

    pub fn account(&self, id: &AccountId) -> Option<&AccountRecord> {
        self.model.accounts.get(id)
    }

    pub fn accounts(&self) -> impl Iterator<Item = (&AccountId, &AccountRecord)> {
        self.model.accounts.iter()
    }

    pub fn confidential_output(&self, op: &OutPoint) -> Option<&ConfidentialOutput> {
        self.model.conf_outputs.get(op)
    }

    pub fn confidential_outputs(&self) -> impl Iterator<Item = (&OutPoint, &ConfidentialOutput)> {
        self.model.conf_outputs.iter()
    }

    pub fn key_image_spent(&self, image: &[u8; 32]) -> bool {
        self.model.spent_images.contains(image)
    }

    pub fn shielded_pool(&self) -> &ShieldedPool {
        &self.model.pool
    }

    /// Coinbase plus genesis issuance on the canonical chain.
    pub fn issued_supply(&self) -> u64 {
        self.model.issued
    }
}

fn short_hex(id: &[u8; 32]) -> String {
    id[..4].iter().map(|b| format!("{b:02x}")).collect()
}

fn common_prefix_len(a: &[BlockId], b: &[BlockId]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::generate_keypair;
    use crate::ledger::chainspec::chain_by_label;
    use crate::ledger::tx::{key_hash, UtxoInput, UtxoLock, UtxoTx};
    use crate::sig::ecdsa_sign;

    fn utxo_chain() -> LedgerState {
        let mut spec = chain_by_label("bitcoin").unwrap();
        spec.curve = "toy-w28".into();
        LedgerState::new(spec).unwrap()
    }

    struct Funded {
        state: LedgerState,
        owner: crate::ec::KeyPair,
        outpoint: OutPoint,
        miner: [u8; 32],
    }

    fn funded_utxo_chain(amount: u64) -> Funded {
        let mut state = utxo_chain();
        let owner = generate_keypair(state.group(), 100);
        let outpoint = state
            .allocate_utxo(UtxoLock::KeyHash(key_hash(&owner.public_point)), amount)
            .unwrap();
        let miner_kp = generate_keypair(state.group(), 101);
        let miner = state.register_miner(miner_kp.public_point.clone());
        Funded {
            state,
            owner,
            outpoint,
            miner,
        }
    }

    fn spend_all(
        f: &Funded,
        to: &GroupPoint,
        fee: u64,
        amount: u64,
        seed: u64,
    ) -> Transaction {
        let mut tx = UtxoTx {
            inputs: vec![UtxoInput {
                previous: f.outpoint,
                public_key: f.owner.public_point.clone(),
                signature: crate::sig::EcdsaSignature {
                    r: num_bigint::BigUint::from(1u8),
                    s: num_bigint::BigUint::from(1u8),
                },
            }],
            outputs: vec![super::super::tx::UtxoOutput {
                lock: UtxoLock::KeyHash(key_hash(to)),
                amount,
            }],
            fee,
        };
        let sig = ecdsa_sign(&tx.signing_digest(), &f.owner, seed, f.state.group()).unwrap();
        tx.inputs[0].signature = sig;
        Transaction::new(TxBody::Utxo(tx), 0.0)
    }

    #[test]
    fn utxo_spend_connects_and_pays_the_miner() {
        let mut f = funded_utxo_chain(100);
        let to = generate_keypair(f.state.group(), 7).public_point;
        let tx = spend_all(&f, &to, 10, 90, 1);
        let txid = tx.id();
        f.state.submit_tx(tx).unwrap();
        let block = f.state.produce_block(&f.miner, 5.0).unwrap();
        assert_eq!(block.transactions.len(), 1);
        let outcome = f.state.receive_block(block).unwrap();
        assert_eq!(outcome, BlockOutcome::Extended);
        assert_eq!(f.state.tip_height(), 1);
        assert!(!f.state.mempool().contains(&txid));
        assert_eq!(f.state.confirmation_depth(&txid), Some(1));
        // 100 genesis + 50 coinbase; the 10 fee moved to the miner output
        assert_eq!(f.state.issued_supply(), 150);
        let total: u64 = f.state.utxos().map(|(_, o)| o.amount).sum();
        assert_eq!(total, 150);
    }

    #[test]
    fn wrong_key_and_bad_sum_are_rejected() {
        let mut f = funded_utxo_chain(100);
        let stranger = generate_keypair(f.state.group(), 8);
        let to = stranger.public_point.clone();
        // signature by the wrong key
        let mut tx = match spend_all(&f, &to, 10, 90, 1).body {
            TxBody::Utxo(t) => t,
            _ => unreachable!(),
        };
        let forged = ecdsa_sign(&tx.signing_digest(), &stranger, 3, f.state.group()).unwrap();
        tx.inputs[0].signature = forged;
        assert_eq!(
            f.state.submit_tx(Transaction::new(TxBody::Utxo(tx), 0.0)),
            Err(RejectReason::BadSignature)
        );
        // amounts that do not add up
        let bad_sum = spend_all(&f, &to, 10, 95, 1);
        assert_eq!(f.state.submit_tx(bad_sum), Err(RejectReason::Overspend));
        // outpoint that never existed
        let mut ghost = Funded {
            outpoint: OutPoint {
                tx: [42u8; 32],
                index: 0,
            },
            ..f
        };
        let orphan_spend = spend_all(&ghost, &to, 10, 90, 1);
        assert_eq!(
            ghost.state.submit_tx(orphan_spend),
            Err(RejectReason::UnknownInput)
        );
    }

    #[test]
    fn double_spend_is_filtered_at_selection_not_admission() {
        let mut f = funded_utxo_chain(100);
        let a = generate_keypair(f.state.group(), 7).public_point;
        let b = generate_keypair(f.state.group(), 8).public_point;
        let low = spend_all(&f, &a, 5, 95, 1);
        let high = spend_all(&f, &b, 20, 80, 2);
        let high_id = high.id();
        f.state.submit_tx(low).unwrap();
        f.state.submit_tx(high).unwrap();
        assert_eq!(f.state.mempool().len(), 2);
        let block = f.state.produce_block(&f.miner, 1.0).unwrap();
        assert_eq!(block.tx_ids(), vec![high_id]);
    }

    #[test]
    fn resubmitting_a_confirmed_spend_reports_double_spend() {
        let mut f = funded_utxo_chain(100);
        let to = generate_keypair(f.state.group(), 7).public_point;
        let tx = spend_all(&f, &to, 10, 90, 1);
        f.state.submit_tx(tx.clone()).unwrap();
        let block = f.state.produce_block(&f.miner, 1.0).unwrap();
        f.state.receive_block(block).unwrap();
        // same id again
        assert_eq!(f.state.submit_tx(tx), Err(RejectReason::DuplicateTx));
        // different tx over the same outpoint
        let conflict = spend_all(&f, &to, 20, 80, 9);
        assert_eq!(f.state.submit_tx(conflict), Err(RejectReason::DoubleSpend));
    }

    #[test]
    fn fork_choice_prefers_work_and_first_seen_on_ties() {
        let mut f = funded_utxo_chain(100);
        let other_kp = generate_keypair(f.state.group(), 55);
        let other = f.state.register_miner(other_kp.public_point.clone());
        let b1 = f.state.produce_block(&f.miner, 1.0).unwrap();
        let b2 = Block {
            miner: other,
            timestamp: 1.5,
            ..b1.clone()
        };
        assert_eq!(
            f.state.receive_block(b1.clone()).unwrap(),
            BlockOutcome::Extended
        );
        // competing block at the same height: stored, but tip stays
        assert_eq!(
            f.state.receive_block(b2.clone()).unwrap(),
            BlockOutcome::SideChain
        );
        assert_eq!(f.state.tip_id(), b1.id());
        // the competitor's branch grows past the tip: reorg
        let b3 = Block {
            parent: b2.id(),
            height: 2,
            transactions: vec![],
            miner: other,
            pow_witness: None,
            timestamp: 2.0,
        };
        let outcome = f.state.receive_block(b3.clone()).unwrap();
        assert_eq!(outcome, BlockOutcome::Reorged { reverted_blocks: 1 });
        assert_eq!(f.state.tip_id(), b3.id());
        assert_eq!(f.state.tip_height(), 2);
    }

    #[test]
    fn reorg_returns_reverted_transactions_to_the_mempool() {
        let mut f = funded_utxo_chain(100);
        let to = generate_keypair(f.state.group(), 7).public_point;
        let tx = spend_all(&f, &to, 10, 90, 1);
        let txid = tx.id();
        f.state.submit_tx(tx).unwrap();
        let honest = f.state.produce_block(&f.miner, 1.0).unwrap();
        f.state.receive_block(honest).unwrap();
        assert!(!f.state.mempool().contains(&txid));
        // attacker branch from genesis with empty blocks overtakes
        let a1 = Block {
            parent: f.state.genesis_id(),
            height: 1,
            transactions: vec![],
            miner: f.miner,
            pow_witness: None,
            timestamp: 1.1,
        };
        let a2 = Block {
            parent: a1.id(),
            height: 2,
            transactions: vec![],
            miner: f.miner,
            pow_witness: None,
            timestamp: 2.1,
        };
        f.state.receive_block(a1).unwrap();
        let outcome = f.state.receive_block(a2).unwrap();
        assert_eq!(outcome, BlockOutcome::Reorged { reverted_blocks: 1 });
        // the reverted spend waits in the mempool again and its inputs exist
        assert!(f.state.mempool().contains(&txid));
        assert_eq!(f.state.confirmation_depth(&txid), None);
        assert!(f.state.utxo(&f.outpoint).is_some());
    }

    #[test]
    fn orphans_connect_once_their_parent_arrives() {
        let mut f = funded_utxo_chain(100);
        let b1 = f.state.produce_block(&f.miner, 1.0).unwrap();
        let b2 = Block {
            parent: b1.id(),
            height: 2,
            transactions: vec![],
            miner: f.miner,
            pow_witness: None,
            timestamp: 2.0,
        };
        assert_eq!(
            f.state.receive_block(b2.clone()).unwrap(),
            BlockOutcome::Orphaned
        );
        assert_eq!(f.state.tip_height(), 0);
        f.state.receive_block(b1).unwrap();
        assert_eq!(f.state.tip_height(), 2);
        assert_eq!(f.state.tip_id(), b2.id());
    }

    #[test]
    fn equihash_chains_demand_a_valid_witness() {
        let mut spec = chain_by_label("zcash").unwrap();
        spec.curve = "toy-ed30".into();
        let mut state = LedgerState::new(spec).unwrap();
        let miner_kp = generate_keypair(state.group(), 3);
        let miner = state.register_miner(miner_kp.public_point.clone());
        let naked = Block {
            parent: state.genesis_id(),
            height: 1,
            transactions: vec![],
            miner,
            pow_witness: None,
            timestamp: 1.0,
        };
        assert!(matches!(
            state.receive_block(naked),
            Err(LedgerError::BadBlock { .. })
        ));
        let block = state.produce_block(&miner, 1.0).unwrap();
        assert!(block.pow_witness.is_some());
        assert_eq!(
            state.receive_block(block).unwrap(),
            BlockOutcome::Extended
        );
    }

    #[test]
    fn unknown_miner_cannot_produce_or_connect() {
        let f = funded_utxo_chain(10);
        let err = f.state.produce_block(&[9u8; 32], 0.0);
        assert!(matches!(err, Err(LedgerError::UnknownMiner { .. })));
    }
}

//! Chain state machines: chain parameters, transactions across five ledger
//! models, mempool ordering, block production, and fork choice.

pub mod block;
pub mod chainspec;
pub mod mempool;
pub mod state;
pub mod tx;
pub mod wallet;

pub use block::{solve_pow_witness, verify_pow_witness, Block, BlockId, PowWitness};
pub use chainspec::{
    chain_by_label, difficulty, load_chain_file, resolve_chain, ChainSpec, KeyReusePolicy,
    PowAlgorithm, QuantumPowSpeedup, SignatureScheme, TxModel, CHAIN_PRESET_LABELS,
};
pub use mempool::Mempool;
pub use state::{
    coinbase_outpoint, AccountRecord, BlockOutcome, LedgerState, RejectReason, COINBASE_REWARD,
    DEFAULT_BLOCK_CAPACITY,
};
pub use wallet::{
    fund_account_wallet, fund_mw_wallet, fund_ring_wallet, fund_shielded_wallet, fund_utxo_wallet,
    AccountWallet, AuditLedger, AuditReport, ConfOpening, MwWallet, RingWallet, ShieldedWallet,
    UtxoWallet,
};
pub use tx::{
    account_id, key_hash, key_image, AccountId, AccountTx, ConfidentialOutput, MwTx, OutPoint,
    RingMember, RingSpend, RingTx, Transaction, TxBody, TxId, UtxoInput, UtxoLock, UtxoOutput,
    UtxoTx,
};

use crate::ec::EcError;
use crate::privacy::PrivacyError;
use crate::sig::SigError;

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("no builtin chain preset named {label:?}")]
    UnknownChain { label: String },
    #[error("chain file {source_name}: field {field}: {detail}")]
    ChainFile {
        source_name: String,
        field: String,
        detail: String,
    },
    #[error(transparent)]
    Ec(#[from] EcError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
    #[error("insufficient funds: need {needed}, have {available}")]
    InsufficientFunds { needed: u64, available: u64 },
    #[error("operation needs transaction model {expected:?}, chain runs {got:?}")]
    ModelMismatch {
        expected: chainspec::TxModel,
        got: chainspec::TxModel,
    },
    #[error("no miner registered under id {id}")]
    UnknownMiner { id: String },
    #[error("block rejected: {reason}")]
    BadBlock { reason: String },
}

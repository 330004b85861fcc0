//! Deterministic discrete-event network simulator.
//!
//! One process owns everything: a queue of timestamped events, a single
//! ledger standing in for the whole network's agreed state, wallet
//! populations generating Poisson traffic, and miner processes producing
//! blocks. Identical configs produce byte-identical traces.

mod config;
mod engine;
mod event;
mod trace;

pub use config::{AttackPlan, SimConfig};
pub use engine::{run, SimCore, Stepped};
pub use event::{EventPayload, EventQueue, SimEvent};
pub use trace::{
    measure_confirmation, AuditSummary, ConfirmationRecord, SimSummary, SimTrace, TraceRecord,
};

use crate::adversary::AdversaryError;
use crate::ledger::LedgerError;
use crate::privacy::PrivacyError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid config field {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
    #[error("trace holds no confirmed transactions")]
    NoConfirmations,
}

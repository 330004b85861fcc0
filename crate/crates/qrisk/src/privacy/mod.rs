//! Value-hiding structures: Pedersen commitments, decoy rings, the trusted
//! setup ceremony, and shielded notes.
//!
//! Everything here is split along one line: what validators may see versus
//! what only the simulation harness knows. Ground truth (ring true indices,
//! commitment openings, the ceremony secret) never flows through validator
//! interfaces; it lives behind accessors whose names say `ground_truth` so
//! the separation is auditable.

pub mod pedersen;
pub mod ring;
pub mod setup;
pub mod shielded;

pub use pedersen::{
    balance_check, output_blinding, pseudo_blinding, PedersenCommitment, PedersenParams,
};
pub use ring::{build_ring, RingInput};
pub use setup::{trusted_setup_ceremony, SetupParameter};
pub use shielded::{
    mint_with_setup_key, NoteOpening, ShieldedBody, ShieldedNote, ShieldedPool, ShieldedProof,
    ShieldedSpend,
};

use crate::ec::EcError;
use crate::sig::SigError;

#[derive(Debug, thiserror::Error)]
pub enum PrivacyError {
    #[error(transparent)]
    Ec(#[from] EcError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error("ring of size {needed} needs {needed_decoys} distinct decoys, pool has {available}")]
    InsufficientDecoys {
        needed: usize,
        needed_decoys: usize,
        available: usize,
    },
    #[error("ring size must be at least 1")]
    EmptyRing,
    #[error("ceremony needs at least one participant")]
    EmptyCeremony,
    #[error("destroyed index {index} out of range for {participants} participants")]
    BadDestroyedIndex { index: usize, participants: usize },
}

//! Signature schemes over the curve groups: ECDSA with public-key recovery,
//! and two deterministic EdDSA variants with distinct signing equations.

pub mod ecdsa;
pub mod eddsa;

pub use ecdsa::{
    ecdsa_recover, ecdsa_sign, ecdsa_sign_recoverable, ecdsa_verify, EcdsaSignature,
    RecoverableSignature,
};
pub use eddsa::{
    eddsa_sign_monero, eddsa_sign_zcash, eddsa_verify_monero, eddsa_verify_zcash, EddsaSignature,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SigError {
    #[error(transparent)]
    Ec(#[from] crate::ec::EcError),
    #[error("signing failed: {0}")]
    Signing(String),
    #[error("recovery hint {0} out of range 0..=3")]
    InvalidHint(u8),
    #[error("public key recovery failed: {0}")]
    RecoveryFailed(String),
}

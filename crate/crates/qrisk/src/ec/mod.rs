//! Elliptic curve groups, keys, and hash-derived scalars and points.

pub mod curve;
pub mod field;
pub mod hash;
pub mod keys;
pub mod params;

pub use curve::{CurveEquation, CurveGroup, GroupPoint, MAX_ATTACKABLE_ORDER_BITS};
pub use field::FieldElement;
pub use hash::{hash_to_point, hash_to_scalar};
pub use keys::{generate_keypair, KeyPair};
pub use params::{curve_by_label, load_curve_file};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EcError {
    #[error("curve {curve}: invalid parameter: {reason}")]
    BadParameter { curve: String, reason: String },
    #[error("curve {curve}: point is not on the curve")]
    NotOnCurve { curve: String },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("curve {curve}: operation requires a {expected} curve")]
    WrongCurveForm {
        curve: String,
        expected: &'static str,
    },
    #[error("curve {curve}: coordinate has no curve preimage")]
    NoCurvePreimage { curve: String },
    #[error("unknown curve label {label:?}")]
    UnknownCurve { label: String },
    #[error("curve file {path}: {reason}")]
    ParamFile { path: String, reason: String },
}

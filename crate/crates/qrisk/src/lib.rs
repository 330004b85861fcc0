//! Deterministic discrete-event simulator of simplified blockchain networks
//! with a quantum adversary model.
//!
//! The crate is organized bottom-up:
//!
//! - [`rng`]: one seeded, splittable randomness source for everything.
//! - [`ec`]: curve groups (toy and full-size), keys, hash-to-scalar/point.
//! - [`sig`]: ECDSA with public-key recovery and two EdDSA variants.
//! - [`privacy`]: Pedersen commitments, decoy rings, trusted-setup ceremony.
//! - [`ledger`]: chain presets, transaction models, validation, blocks, forks.
//! - [`adversary`]: quantum cost model, discrete-log oracle, generalized
//!   birthday solver, and the attack executors.
//! - [`simnet`]: the discrete-event engine, wallets and miners, traces.
//! - [`report`]: risk classification and rendered reports.
//!
//! Attacks run for real at desk scale: every broken key is broken by actually
//! solving its discrete log on a toy curve, and every forged object passes
//! the same validators honest traffic does. Wall-clock cost and modeled
//! attack time are separate notions throughout; model time follows the
//! adversary profile's calibrated cost formulas.

pub mod adversary;
pub mod ec;
pub mod ledger;
pub mod rng;
pub mod privacy;
pub mod sig;
pub mod simnet;

//! The quantum attacker: analytic cost models, an executable discrete-log
//! oracle for toy groups, a generalized-birthday solver, and the attack
//! executors that drive them against simulated chains.
//!
//! Two clocks run here. Attacks charge model time from the cost formulas
//! (what the quantum hardware would take); the classical machinery that
//! actually breaks toy keys spends ordinary wall time and is never billed
//! to the simulation.

pub mod cost;
pub mod oracle;
pub mod profile;
pub mod wagner;

pub use cost::{
    classical_dlog_ops, fifty_one_threshold, grover_hash_rate, kxor_costs, required_qubits,
    shor_time, shor_time_for_group, threshold_against_remaining, MiningAdvantage, ProblemFamily,
    GENERIC_DLOG_EXPONENT_SCALE,
};
pub use oracle::DlogOracle;
pub use profile::{load_profile_file, resolve_profile, QuantumAdversaryProfile};
pub use wagner::{verify_kxor, wagner_solve};

use crate::ec::EcError;

#[derive(Debug, thiserror::Error)]
pub enum AdversaryError {
    #[error(
        "oracle refuses {curve}: order is {order_bits} bits, executable attacks stop at {max_bits}"
    )]
    OracleRefused {
        curve: String,
        order_bits: u64,
        max_bits: u64,
    },
    #[error("{required} qubits required, profile has {available} (short {shortfall})")]
    InsufficientQubits {
        required: u64,
        available: u64,
        shortfall: u64,
    },
    #[error("target is not in the generator's subgroup")]
    NoDiscreteLog,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("profile file {path}: {reason}")]
    ProfileFile { path: String, reason: String },
    #[error(transparent)]
    Ec(#[from] EcError),
}

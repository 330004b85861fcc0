//! Analytic cost formulas: key-recovery time, qubit demand, and the clock
//! speeds at which a single quantum miner matches a network.
//!
//! These price hypothetical hardware. Nothing in this module touches a
//! group element; the executable attacks pair these times with the
//! classical oracle that does the actual breaking.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::ec::CurveGroup;
use crate::ledger::{difficulty, ChainSpec, PowAlgorithm, QuantumPowSpeedup};

use super::profile::QuantumAdversaryProfile;
use super::AdversaryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemFamily {
    EcDlog,
    RsaFactor,
}

/// Largest equihash width the cost tables will price. Beyond this the
/// operation counts stop meaning anything and the shifts get silly.
const MAX_KXOR_WIDTH: u32 = 4096;

/// Qubits needed for an n-bit instance: ceil(scaling * n).
pub fn required_qubits(bits: u32, profile: &QuantumAdversaryProfile) -> u64 {
    (profile.qubit_scaling * bits as f64).ceil() as u64
}

/// Seconds of hardware time to run period-finding on one n-bit instance.
/// Cubic in the bit length; the constant depends on the problem family.
pub fn shor_time(
    bits: u32,
    family: ProblemFamily,
    profile: &QuantumAdversaryProfile,
) -> Result<f64, AdversaryError> {
    if bits == 0 {
        return Err(AdversaryError::BadParameters(
            "zero-bit problem instance".into(),
        ));
    }
    let required = required_qubits(bits, profile);
    if required > profile.qubit_count {
        return Err(AdversaryError::InsufficientQubits {
            required,
            available: profile.qubit_count,
            shortfall: required - profile.qubit_count,
        });
    }
    let c = match family {
        ProblemFamily::EcDlog => profile.shor_ec_const,
        ProblemFamily::RsaFactor => profile.shor_rsa_const,
    };
    let n = bits as f64;
    Ok(c * n * n * n / profile.clock_speed_hz)
}

/// Hardware seconds to recover one private key on this group, priced by
/// the subgroup's bit length.
pub fn shor_time_for_group(
    group: &CurveGroup,
    profile: &QuantumAdversaryProfile,
) -> Result<f64, AdversaryError> {
    let bits = u32::try_from(group.order().bits())
        .map_err(|_| AdversaryError::BadParameters("order bit length overflow".into()))?;
    shor_time(bits, ProblemFamily::EcDlog, profile)
}

/// Effective hash rate of one quantum miner against a hashcash-style
/// target: 0.04 * s * sqrt(D). Undefined at difficulty zero, where the
/// search space is smaller than one retarget window.
pub fn grover_hash_rate(clock_speed_hz: f64, difficulty: u64) -> Result<f64, AdversaryError> {
    if difficulty == 0 {
        return Err(AdversaryError::BadParameters(
            "difficulty rounds to zero, below the resolution of the speedup formula".into(),
        ));
    }
    Ok(0.04 * clock_speed_hz * (difficulty as f64).sqrt())
}

/// Operation counts for one n-bit XOR tuple of size 2^k_log: the
/// classical list algorithm pays 2^ceil(n/(1+k_log)), the quantum walk
/// variant 2^ceil(n/(2+k_log)).
pub fn kxor_costs(n: u32, k_log: u32) -> Result<(BigUint, BigUint), AdversaryError> {
    if n == 0 || k_log == 0 {
        return Err(AdversaryError::BadParameters(format!(
            "kxor needs n >= 1 and k_log >= 1, got ({n},{k_log})"
        )));
    }
    if n > MAX_KXOR_WIDTH {
        return Err(AdversaryError::BadParameters(format!(
            "kxor width {n} above the supported maximum {MAX_KXOR_WIDTH}"
        )));
    }
    let classical_exp = n.div_ceil(1 + k_log);
    let quantum_exp = n.div_ceil(2 + k_log);
    Ok((
        BigUint::one() << classical_exp,
        BigUint::one() << quantum_exp,
    ))
}

/// Classical group operations to solve one discrete log on an order of
/// this bit length: 2^(bits * exponent_scale). Generic-group algorithms
/// sit at scale 0.5; some folklore estimates use 1.0.
pub fn classical_dlog_ops(order_bits: u64, exponent_scale: f64) -> f64 {
    (order_bits as f64 * exponent_scale).exp2()
}

/// Scale for [`classical_dlog_ops`] matching the best generic algorithms.
pub const GENERIC_DLOG_EXPONENT_SCALE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub enum MiningAdvantage {
    /// Grover-style search: one machine at this clock matches the whole
    /// network's hash rate.
    Threshold { clock_hz: f64 },
    /// Equihash-style tuple finding: the advantage is the ratio of the two
    /// operation counts, and the break-even clock follows from it.
    KxorThreshold {
        clock_hz: f64,
        classical_ops: BigUint,
        quantum_ops: BigUint,
    },
    /// No quadratic structure to exploit in this proof of work.
    NoKnownAdvantage,
}

impl MiningAdvantage {
    /// Break-even clock, if the chain admits one.
    pub fn clock_hz(&self) -> Option<f64> {
        match self {
            MiningAdvantage::Threshold { clock_hz }
            | MiningAdvantage::KxorThreshold { clock_hz, .. } => Some(*clock_hz),
            MiningAdvantage::NoKnownAdvantage => None,
        }
    }
}

/// Clock speed at which a single quantum machine produces blocks as fast
/// as the rest of the network combined.
///
/// Hash rates are treated as elementary operations per second across all
/// proof-of-work families, so for tuple-finding work the network's
/// solution rate is its hash rate divided by the classical per-solution
/// cost, and the break-even clock is the hash rate divided by the
/// classical-to-quantum ratio.
pub fn fifty_one_threshold(spec: &ChainSpec) -> Result<MiningAdvantage, AdversaryError> {
    match spec.quantum_pow_speedup {
        QuantumPowSpeedup::None => Ok(MiningAdvantage::NoKnownAdvantage),
        QuantumPowSpeedup::Grover => {
            let d = difficulty(spec);
            if d == 0 {
                return Err(AdversaryError::BadParameters(format!(
                    "{}: difficulty rounds to zero, threshold undefined",
                    spec.label
                )));
            }
            let clock_hz = spec.network_hash_rate as f64 / (0.04 * (d as f64).sqrt());
            Ok(MiningAdvantage::Threshold { clock_hz })
        }
        QuantumPowSpeedup::Kxor => {
            let PowAlgorithm::Equihash { n, k_log } = spec.pow else {
                return Err(AdversaryError::BadParameters(format!(
                    "{}: tuple-finding speedup declared but the proof of work is {:?}",
                    spec.label, spec.pow
                )));
            };
            let (classical_ops, quantum_ops) = kxor_costs(n, k_log)?;
            let ratio = &classical_ops / &quantum_ops;
            let ratio = ratio.to_f64().unwrap_or(f64::INFINITY);
            let clock_hz = spec.network_hash_rate as f64 / ratio;
            Ok(MiningAdvantage::KxorThreshold {
                clock_hz,
                classical_ops,
                quantum_ops,
            })
        }
    }
}

/// Blocks per second one quantum machine at this clock adds to the given
/// chain: its effective hash rate as a fraction of the network's, over the
/// block time. At the break-even clock from [`fifty_one_threshold`] this
/// equals the whole network's rate, 1/block_time.
pub fn quantum_block_rate(spec: &ChainSpec, clock_hz: f64) -> Result<f64, AdversaryError> {
    if !clock_hz.is_finite() || clock_hz <= 0.0 {
        return Err(AdversaryError::BadParameters(format!(
            "clock must be positive and finite, got {clock_hz}"
        )));
    }
    let network = spec.network_hash_rate as f64;
    let block_time = spec.block_time_s as f64;
    let effective = match spec.quantum_pow_speedup {
        QuantumPowSpeedup::None => {
            return Err(AdversaryError::BadParameters(format!(
                "{}: no known quantum speedup for {:?}",
                spec.label, spec.pow
            )));
        }
        QuantumPowSpeedup::Grover => grover_hash_rate(clock_hz, difficulty(spec))?,
        QuantumPowSpeedup::Kxor => {
            let PowAlgorithm::Equihash { n, k_log } = spec.pow else {
                return Err(AdversaryError::BadParameters(format!(
                    "{}: tuple-finding speedup declared but the proof of work is {:?}",
                    spec.label, spec.pow
                )));
            };
            let (classical_ops, quantum_ops) = kxor_costs(n, k_log)?;
            let ratio = (&classical_ops / &quantum_ops)
                .to_f64()
                .unwrap_or(f64::INFINITY);
            clock_hz * ratio
        }
    };
    Ok(effective / network / block_time)
}

/// Break-even clock when the attacker already owns part of the classical
/// network: the search-speedup formula applied against what everyone else
/// produces, H_r minus the attacker's classical rate. With no classical
/// stake this equals the grover arm of [`fifty_one_threshold`], which is
/// the default comparison.
pub fn threshold_against_remaining(
    spec: &ChainSpec,
    attacker_classical_rate: u128,
) -> Result<f64, AdversaryError> {
    if spec.quantum_pow_speedup != QuantumPowSpeedup::Grover {
        return Err(AdversaryError::BadParameters(format!(
            "{}: remaining-rate comparison is defined for the search-speedup family only",
            spec.label
        )));
    }
    if attacker_classical_rate >= spec.network_hash_rate {
        return Err(AdversaryError::BadParameters(
            "attacker classical rate must be below the network rate".into(),
        ));
    }
    let d = difficulty(spec);
    if d == 0 {
        return Err(AdversaryError::BadParameters(format!(
            "{}: difficulty rounds to zero, threshold undefined",
            spec.label
        )));
    }
    let remaining = (spec.network_hash_rate - attacker_classical_rate) as f64;
    Ok(remaining / (0.04 * (d as f64).sqrt()))
}

//! Adversary hardware profiles.
//!
//! The cost model is two power laws pinned to anchor scenarios. Solving a
//! 256-bit curve key at 10 GHz takes 1800 s, which fixes the cubic constant
//! for discrete logs; factoring a 2048-bit modulus at 10 MHz takes 2520 s,
//! fixing the one for factoring. The two constants differ; one constant
//! cannot satisfy both anchors. Qubit demand scales linearly, pinned to
//! 485550 qubits for a 256-bit key.

use serde::Deserialize;

use super::AdversaryError;

const ANCHOR_EC_BITS: f64 = 256.0;
const ANCHOR_EC_SECONDS: f64 = 1800.0;
const ANCHOR_EC_CLOCK_HZ: f64 = 1.0e10;
const ANCHOR_RSA_BITS: f64 = 2048.0;
const ANCHOR_RSA_SECONDS: f64 = 2520.0;
const ANCHOR_RSA_CLOCK_HZ: f64 = 1.0e7;
const ANCHOR_QUBITS: f64 = 485_550.0;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumAdversaryProfile {
    /// s, gate operations per second.
    pub clock_speed_hz: f64,
    pub qubit_count: u64,
    /// Operations for an n-bit discrete log: shor_ec_const * n^3.
    pub shor_ec_const: f64,
    /// Operations for an n-bit factorization: shor_rsa_const * n^3.
    pub shor_rsa_const: f64,
    /// Required qubits for an n-bit problem: ceil(qubit_scaling * n).
    pub qubit_scaling: f64,
}

impl QuantumAdversaryProfile {
    /// The calibrated default: 10 GHz clock, four million qubits.
    pub fn baseline() -> Self {
        QuantumAdversaryProfile {
            clock_speed_hz: 1.0e10,
            qubit_count: 4_000_000,
            shor_ec_const: ANCHOR_EC_SECONDS * ANCHOR_EC_CLOCK_HZ
                / (ANCHOR_EC_BITS * ANCHOR_EC_BITS * ANCHOR_EC_BITS),
            shor_rsa_const: ANCHOR_RSA_SECONDS * ANCHOR_RSA_CLOCK_HZ
                / (ANCHOR_RSA_BITS * ANCHOR_RSA_BITS * ANCHOR_RSA_BITS),
            qubit_scaling: ANCHOR_QUBITS / ANCHOR_EC_BITS,
        }
    }

    pub fn with_clock(mut self, clock_speed_hz: f64) -> Self {
        self.clock_speed_hz = clock_speed_hz;
        self
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    clock_speed_hz: f64,
    qubit_count: u64,
    #[serde(default)]
    calibration: CalibrationOverrides,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationOverrides {
    shor_ec_const: Option<f64>,
    shor_rsa_const: Option<f64>,
    qubit_scaling: Option<f64>,
}

fn parse_profile(text: &str, source: &str) -> Result<QuantumAdversaryProfile, AdversaryError> {
    let file: ProfileFile = toml::from_str(text).map_err(|e| AdversaryError::ProfileFile {
        path: source.to_string(),
        reason: e.to_string(),
    })?;
    if file.clock_speed_hz.is_nan() || file.clock_speed_hz <= 0.0 {
        return Err(AdversaryError::ProfileFile {
            path: source.to_string(),
            reason: "clock_speed_hz must be positive".into(),
        });
    }
    let base = QuantumAdversaryProfile::baseline();
    let profile = QuantumAdversaryProfile {
        clock_speed_hz: file.clock_speed_hz,
        qubit_count: file.qubit_count,
        shor_ec_const: file.calibration.shor_ec_const.unwrap_or(base.shor_ec_const),
        shor_rsa_const: file
            .calibration
            .shor_rsa_const
            .unwrap_or(base.shor_rsa_const),
        qubit_scaling: file
            .calibration
            .qubit_scaling
            .unwrap_or(base.qubit_scaling),
    };
    for (name, v) in [
        ("shor_ec_const", profile.shor_ec_const),
        ("shor_rsa_const", profile.shor_rsa_const),
        ("qubit_scaling", profile.qubit_scaling),
    ] {
        if v.is_nan() || v <= 0.0 {
            return Err(AdversaryError::ProfileFile {
                path: source.to_string(),
                reason: format!("{name} must be positive"),
            });
        }
    }
    Ok(profile)
}

pub fn load_profile_file(path: &str) -> Result<QuantumAdversaryProfile, AdversaryError> {
    let text = std::fs::read_to_string(path).map_err(|e| AdversaryError::ProfileFile {
        path: path.to_string(),
        reason: e.to_string(),
    })?;
    parse_profile(&text, path)
}

/// None or "default" resolves to the baseline; anything else is a path.
pub fn resolve_profile(selector: Option<&str>) -> Result<QuantumAdversaryProfile, AdversaryError> {
    match selector {
        None | Some("default") => Ok(QuantumAdversaryProfile::baseline()),
        Some(path) => load_profile_file(path),
    }
}

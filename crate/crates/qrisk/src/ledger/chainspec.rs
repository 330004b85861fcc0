//! Static per-chain parameters and the difficulty formula.
//!
//! Presets ship as TOML files compiled into the binary. Network hash rates
//! are stored as decimal strings because several exceed what a TOML integer
//! holds; difficulty arithmetic runs in u128 so the floor is exact.
//! Headline figures (block time, hash rate for the chains with published
//! difficulty worked examples) are fixed by those examples; the remaining
//! presets carry documented defaults, not measured figures.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use serde::Deserialize;

use super::LedgerError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TxModel {
    Utxo,
    Account,
    ConfidentialRing,
    ShieldedPool,
    ConfidentialMw,
}

impl TxModel {
    pub fn hides_values(self) -> bool {
        matches!(
            self,
            TxModel::ConfidentialRing | TxModel::ShieldedPool | TxModel::ConfidentialMw
        )
    }

    pub fn has_trusted_setup(self) -> bool {
        matches!(self, TxModel::ShieldedPool)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignatureScheme {
    Ecdsa,
    EddsaMonero,
    EddsaZcash,
    /// Classification-only: a hash-based scheme with no discrete-log
    /// exposure. No wallet or validator implements it; it exists so the
    /// risk scale's bottom level is reachable in tests.
    PostQuantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowAlgorithm {
    Hashcash,
    Ethhash,
    Scrypt,
    Cryptonight,
    Randomx,
    Equihash { n: u32, k_log: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyReusePolicy {
    FreshChangeKeys,
    AccountReuse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumPowSpeedup {
    Grover,
    None,
    Kxor,
}

#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub label: String,
    /// B, seconds.
    pub block_time_s: u64,
    /// H_r, hashes (or solutions) per second.
    pub network_hash_rate: u128,
    pub tx_model: TxModel,
    pub signature_scheme: SignatureScheme,
    pub pow: PowAlgorithm,
    pub key_reuse_policy: KeyReusePolicy,
    pub legacy_p2pk_fraction: f64,
    pub quantum_pow_speedup: QuantumPowSpeedup,
    /// Curve label or parameter-file path the chain's keys live on.
    pub curve: String,
    /// Decoy ring width for confidential-ring chains; ignored elsewhere.
    pub ring_size: u32,
}

/// D = floor(H_r * B / 2^32).
pub fn difficulty(spec: &ChainSpec) -> u64 {
    let product = spec.network_hash_rate * spec.block_time_s as u128;
    let d = product >> 32;
    u64::try_from(d).expect("difficulty exceeds u64")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    label: String,
    block_time_s: u64,
    network_hash_rate: String,
    tx_model: String,
    signature_scheme: String,
    pow: String,
    key_reuse_policy: String,
    #[serde(default)]
    legacy_p2pk_fraction: f64,
    quantum_pow_speedup: String,
    curve: String,
    #[serde(default = "default_ring_size")]
    ring_size: u32,
    #[serde(default)]
    #[allow(dead_code)]
    notes: String,
}

fn default_ring_size() -> u32 {
    5
}

impl fmt::Display for TxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TxModel::Utxo => "utxo",
            TxModel::Account => "account",
            TxModel::ConfidentialRing => "confidential_ring",
            TxModel::ShieldedPool => "shielded_pool",
            TxModel::ConfidentialMw => "confidential_mw",
        };
        f.write_str(s)
    }
}

fn parse_tx_model(s: &str) -> Option<TxModel> {
    Some(match s {
        "utxo" => TxModel::Utxo,
        "account" => TxModel::Account,
        "confidential_ring" => TxModel::ConfidentialRing,
        "shielded_pool" => TxModel::ShieldedPool,
        "confidential_mw" => TxModel::ConfidentialMw,
        _ => return None,
    })
}

fn parse_signature_scheme(s: &str) -> Option<SignatureScheme> {
    Some(match s {
        "ecdsa" => SignatureScheme::Ecdsa,
        "eddsa_monero" => SignatureScheme::EddsaMonero,
        "eddsa_zcash" => SignatureScheme::EddsaZcash,
        "post_quantum" => SignatureScheme::PostQuantum,
        _ => return None,
    })
}

fn parse_pow(s: &str) -> Option<PowAlgorithm> {
    Some(match s {
        "hashcash" => PowAlgorithm::Hashcash,
        "ethhash" => PowAlgorithm::Ethhash,
        "scrypt" => PowAlgorithm::Scrypt,
        "cryptonight" => PowAlgorithm::Cryptonight,
        "randomx" => PowAlgorithm::Randomx,
        other => {
            let inner = other.strip_prefix("equihash(")?.strip_suffix(')')?;
            let (n, k) = inner.split_once(',')?;
            PowAlgorithm::Equihash {
                n: n.trim().parse().ok()?,
                k_log: k.trim().parse().ok()?,
            }
        }
    })
}

fn parse_key_reuse(s: &str) -> Option<KeyReusePolicy> {
    Some(match s {
        "fresh_change_keys" => KeyReusePolicy::FreshChangeKeys,
        "account_reuse" => KeyReusePolicy::AccountReuse,
        _ => return None,
    })
}

fn parse_speedup(s: &str) -> Option<QuantumPowSpeedup> {
    Some(match s {
        "grover" => QuantumPowSpeedup::Grover,
        "none" => QuantumPowSpeedup::None,
        "kxor" => QuantumPowSpeedup::Kxor,
        _ => return None,
    })
}

fn bad(source: &str, field: &str, detail: String) -> LedgerError {
    LedgerError::ChainFile {
        source_name: source.to_string(),
        field: field.to_string(),
        detail,
    }
}

fn validate(file: ChainFile, source: &str) -> Result<ChainSpec, LedgerError> {
    if file.block_time_s == 0 {
        return Err(bad(source, "block_time_s", "must be positive".into()));
    }
    let network_hash_rate: u128 = file
        .network_hash_rate
        .parse()
        .map_err(|e| bad(source, "network_hash_rate", format!("{e}")))?;
    if network_hash_rate == 0 {
        return Err(bad(source, "network_hash_rate", "must be positive".into()));
    }
    let tx_model = parse_tx_model(&file.tx_model)
        .ok_or_else(|| bad(source, "tx_model", format!("unknown value {:?}", file.tx_model)))?;
    let signature_scheme = parse_signature_scheme(&file.signature_scheme).ok_or_else(|| {
        bad(
            source,
            "signature_scheme",
            format!("unknown value {:?}", file.signature_scheme),
        )
    })?;
    let pow = parse_pow(&file.pow)
        .ok_or_else(|| bad(source, "pow", format!("unknown value {:?}", file.pow)))?;
    if let PowAlgorithm::Equihash { n, k_log } = pow {
        if n == 0 || k_log == 0 {
            return Err(bad(
                source,
                "pow",
                format!("equihash needs n >= 1 and k >= 1, got ({n},{k_log})"),
            ));
        }
    }
    let key_reuse_policy = parse_key_reuse(&file.key_reuse_policy).ok_or_else(|| {
        bad(
            source,
            "key_reuse_policy",
            format!("unknown value {:?}", file.key_reuse_policy),
        )
    })?;
    if !(0.0..=1.0).contains(&file.legacy_p2pk_fraction) {
        return Err(bad(
            source,
            "legacy_p2pk_fraction",
            format!("{} outside [0, 1]", file.legacy_p2pk_fraction),
        ));
    }
    let quantum_pow_speedup = parse_speedup(&file.quantum_pow_speedup).ok_or_else(|| {
        bad(
            source,
            "quantum_pow_speedup",
            format!("unknown value {:?}", file.quantum_pow_speedup),
        )
    })?;
    if file.ring_size == 0 {
        return Err(bad(source, "ring_size", "must be at least 1".into()));
    }
    Ok(ChainSpec {
        label: file.label,
        block_time_s: file.block_time_s,
        network_hash_rate,
        tx_model,
        signature_scheme,
        pow,
        key_reuse_policy,
        legacy_p2pk_fraction: file.legacy_p2pk_fraction,
        quantum_pow_speedup,
        curve: file.curve,
        ring_size: file.ring_size,
    })
}

fn parse_chain_source(text: &str, source: &str) -> Result<ChainSpec, LedgerError> {
    let file: ChainFile = toml::from_str(text).map_err(|e| LedgerError::ChainFile {
        source_name: source.to_string(),
        field: "(parse)".to_string(),
        detail: e.to_string(),
    })?;
    validate(file, source)
}

pub const CHAIN_PRESET_LABELS: [&str; 10] = [
    "bitcoin",
    "litecoin",
    "bitcoin_gold",
    "bitcoin_core",
    "bitcoin_cash",
    "ethereum",
    "monero",
    "beam",
    "grin",
    "zcash",
];

static PRESET_SOURCES: [(&str, &str); 10] = [
    ("bitcoin", include_str!("../../presets/chains/bitcoin.toml")),
    ("litecoin", include_str!("../../presets/chains/litecoin.toml")),
    (
        "bitcoin_gold",
        include_str!("../../presets/chains/bitcoin_gold.toml"),
    ),
    (
        "bitcoin_core",
        include_str!("../../presets/chains/bitcoin_core.toml"),
    ),
    (
        "bitcoin_cash",
        include_str!("../../presets/chains/bitcoin_cash.toml"),
    ),
    ("ethereum", include_str!("../../presets/chains/ethereum.toml")),
    ("monero", include_str!("../../presets/chains/monero.toml")),
    ("beam", include_str!("../../presets/chains/beam.toml")),
    ("grin", include_str!("../../presets/chains/grin.toml")),
    ("zcash", include_str!("../../presets/chains/zcash.toml")),
];

static PRESETS: Lazy<HashMap<&'static str, Arc<ChainSpec>>> = Lazy::new(|| {
    PRESET_SOURCES
        .iter()
        .map(|(label, text)| {
            let spec = parse_chain_source(text, label)
                .unwrap_or_else(|e| panic!("builtin chain preset {label}: {e}"));
            assert_eq!(&spec.label, label, "preset label must match its key");
            (*label, Arc::new(spec))
        })
        .collect()
});

pub fn chain_by_label(label: &str) -> Result<ChainSpec, LedgerError> {
    PRESETS
        .get(label)
        .map(|s| s.as_ref().clone())
        .ok_or_else(|| LedgerError::UnknownChain {
            label: label.to_string(),
        })
}

pub fn load_chain_file(path: &str) -> Result<ChainSpec, LedgerError> {
    let text = std::fs::read_to_string(path).map_err(|e| LedgerError::ChainFile {
        source_name: path.to_string(),
        field: "(io)".to_string(),
        detail: e.to_string(),
    })?;
    parse_chain_source(&text, path)
}

/// Preset label first, then the filesystem.
pub fn resolve_chain(label_or_path: &str) -> Result<ChainSpec, LedgerError> {
    match chain_by_label(label_or_path) {
        Ok(spec) => Ok(spec),
        Err(LedgerError::UnknownChain { .. }) if std::path::Path::new(label_or_path).exists() => {
            load_chain_file(label_or_path)
        }
        Err(e) => Err(e),
    }
}

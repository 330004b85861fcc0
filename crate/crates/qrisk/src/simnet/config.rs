//! Run configuration: the full recipe for one deterministic simulation.

use serde::Deserialize;

use super::SimError;

fn default_wallet_count() -> u32 {
    8
}
fn default_wallet_funding() -> u64 {
    1000
}
fn default_miner_count() -> u32 {
    3
}
fn default_latency() -> f64 {
    2.0
}
fn default_block_capacity() -> u32 {
    100
}
fn default_confirmation_depth() -> u64 {
    1
}
fn default_fee_min() -> u64 {
    1
}
fn default_fee_max() -> u64 {
    3
}

/// Everything a run needs. Loadable from TOML; every field beyond seed,
/// duration, chain, and the activity rate has a working default.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub duration_s: f64,
    /// Chain preset label or a chain file path.
    pub chain: String,
    /// Spends per wallet per model second; zero yields coinbase-only runs.
    pub tx_rate_hz: f64,
    #[serde(default = "default_wallet_count")]
    pub wallet_count: u32,
    #[serde(default = "default_wallet_funding")]
    pub wallet_funding: u64,
    #[serde(default = "default_miner_count")]
    pub miner_count: u32,
    /// Broadcast delay from wallet to the shared network view.
    #[serde(default = "default_latency")]
    pub latency_s: f64,
    #[serde(default = "default_block_capacity")]
    pub block_capacity: u32,
    /// Blocks on top (inclusive) before a transaction counts as confirmed.
    #[serde(default = "default_confirmation_depth")]
    pub confirmation_depth: u64,
    #[serde(default = "default_fee_min")]
    pub fee_min: u64,
    #[serde(default = "default_fee_max")]
    pub fee_max: u64,
    /// Adversary profile file; baseline hardware when absent.
    #[serde(default)]
    pub profile: Option<String>,
    #[serde(default)]
    pub attack: Option<AttackPlan>,
}

/// What the adversary does during the run. The engine itself only carries
/// the plan; the attack executors interpret it.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackPlan {
    /// Race one broadcast transaction: solve the exposed key, outbid it.
    HijackTx,
    /// Drain the richest account that has signed at least once.
    TakeoverAccount,
    /// Sweep every raw-public-key output; no race.
    SweepP2pk,
    /// Recover the ceremony secret and mint from nothing.
    ForgeSupply { amount: u64 },
    /// Unmask one confirmed ring spend.
    Deanonymize,
    /// Mine a private branch and force a reorg.
    QuantumMine { clock_hz: Option<f64> },
}

impl SimConfig {
    pub fn new(chain: impl Into<String>, seed: u64, duration_s: f64, tx_rate_hz: f64) -> SimConfig {
        SimConfig {
            seed,
            duration_s,
            chain: chain.into(),
            tx_rate_hz,
            wallet_count: default_wallet_count(),
            wallet_funding: default_wallet_funding(),
            miner_count: default_miner_count(),
            latency_s: default_latency(),
            block_capacity: default_block_capacity(),
            confirmation_depth: default_confirmation_depth(),
            fee_min: default_fee_min(),
            fee_max: default_fee_max(),
            profile: None,
            attack: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |field: &str, reason: &str| {
            Err(SimError::InvalidConfig {
                field: field.to_string(),
                reason: reason.to_string(),
            })
        };
        if !self.duration_s.is_finite() || self.duration_s <= 0.0 {
            return fail("duration_s", "must be a positive finite number");
        }
        if !self.tx_rate_hz.is_finite() || self.tx_rate_hz < 0.0 {
            return fail("tx_rate_hz", "must be zero or a positive finite number");
        }
        if self.chain.is_empty() {
            return fail("chain", "must name a preset or a chain file");
        }
        if self.tx_rate_hz > 0.0 && self.wallet_count == 0 {
            return fail("wallet_count", "need at least one wallet when tx_rate_hz > 0");
        }
        if self.tx_rate_hz > 0.0 && self.wallet_funding == 0 {
            return fail("wallet_funding", "active wallets need nonzero funding");
        }
        if self.miner_count == 0 {
            return fail("miner_count", "need at least one block producer");
        }
        if !self.latency_s.is_finite() || self.latency_s < 0.0 {
            return fail("latency_s", "must be zero or a positive finite number");
        }
        if self.block_capacity == 0 {
            return fail("block_capacity", "blocks must hold at least one transaction");
        }
        if self.confirmation_depth == 0 {
            return fail("confirmation_depth", "must be at least 1");
        }
        if self.fee_min == 0 {
            return fail("fee_min", "zero-fee transactions never clear; use at least 1");
        }
        if self.fee_max < self.fee_min {
            return fail("fee_max", "must be at least fee_min");
        }
        if let Some(AttackPlan::QuantumMine { clock_hz: Some(c) }) = &self.attack {
            if !c.is_finite() || *c <= 0.0 {
                return fail("attack.clock_hz", "must be a positive finite number");
            }
        }
        if let Some(AttackPlan::ForgeSupply { amount }) = &self.attack {
            if *amount == 0 {
                return fail("attack.amount", "a forgery of zero proves nothing");
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<SimConfig, SimError> {
        let config: SimConfig = toml::from_str(text).map_err(|e| {
            // the toml error usually names the offending key; pass it through
            SimError::InvalidConfig {
                field: "(parse)".to_string(),
                reason: e.message().to_string(),
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &str) -> Result<SimConfig, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::InvalidConfig {
            field: "(file)".to_string(),
            reason: format!("{path}: {e}"),
        })?;
        SimConfig::from_toml(&text)
    }
}

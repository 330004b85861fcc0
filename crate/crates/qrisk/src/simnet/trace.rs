//! Run output: an ordered event log, final confirmation latencies, and a
//! closing summary with the supply audit. Serialization is deterministic,
//! so equal runs produce equal bytes.

use serde::Serialize;

use super::SimError;

/// One line of the run log. Times are model seconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceRecord {
    TxBroadcast {
        t: f64,
        id: String,
        wallet: usize,
        fee: u64,
        declared_at: f64,
    },
    TxRejected {
        t: f64,
        id: String,
        reason: String,
    },
    BlockConnected {
        t: f64,
        id: String,
        height: u64,
        miner: String,
        txs: usize,
        outcome: String,
    },
    Confirmed {
        t: f64,
        id: String,
        declared_at: f64,
        wait_s: f64,
    },
    /// A previously confirmed transaction fell out of the canonical chain.
    Unconfirmed {
        t: f64,
        id: String,
    },
    AttackJobDone {
        t: f64,
        job: u64,
    },
    AttackerSubmit {
        t: f64,
        id: String,
        accepted: bool,
        reason: Option<String>,
    },
    PrivateBlock {
        t: f64,
        height: u64,
    },
    Probe {
        t: f64,
        label: String,
    },
}

impl TraceRecord {
    pub fn time(&self) -> f64 {
        match self {
            TraceRecord::TxBroadcast { t, .. }
            | TraceRecord::TxRejected { t, .. }
            | TraceRecord::BlockConnected { t, .. }
            | TraceRecord::Confirmed { t, .. }
            | TraceRecord::Unconfirmed { t, .. }
            | TraceRecord::AttackJobDone { t, .. }
            | TraceRecord::AttackerSubmit { t, .. }
            | TraceRecord::PrivateBlock { t, .. }
            | TraceRecord::Probe { t, .. } => *t,
        }
    }
}

/// Final confirmation latency of one transaction. Reorg survivors only:
/// a transaction reverted and never re-included has no record here.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfirmationRecord {
    pub id: String,
    pub declared_at: f64,
    pub confirmed_at: f64,
    pub wait_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub expected: u64,
    pub observed: u64,
    pub forged: u64,
    pub unopened: usize,
    pub conserved: bool,
    pub explained_by_forgery: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub chain: String,
    pub seed: u64,
    pub duration_s: f64,
    pub blocks_connected: u64,
    pub tip_height: u64,
    pub txs_broadcast: u64,
    pub txs_rejected: u64,
    pub txs_confirmed: usize,
    pub mempool_depth_end: usize,
    pub audit: AuditSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimTrace {
    pub records: Vec<TraceRecord>,
    pub confirmations: Vec<ConfirmationRecord>,
    pub summary: SimSummary,
}

impl SimTrace {
    /// One record per line, summary document last. Stable for diffing.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
            out.push('\n');
        }
        for c in &self.confirmations {
            let mut line = serde_json::Map::new();
            line.insert("event".into(), "confirmation_final".into());
            let v = serde_json::to_value(c).expect("confirmation serializes");
            if let serde_json::Value::Object(m) = v {
                line.extend(m);
            }
            out.push_str(&serde_json::to_string(&line).expect("line serializes"));
            out.push('\n');
        }
        let mut line = serde_json::Map::new();
        line.insert("event".into(), "summary".into());
        let v = serde_json::to_value(&self.summary).expect("summary serializes");
        if let serde_json::Value::Object(m) = v {
            line.extend(m);
        }
        out.push_str(&serde_json::to_string(&line).expect("line serializes"));
        out.push('\n');
        out
    }
}

/// Percentile of final confirmation waits, nearest-rank on the sorted
/// sample. `percentile` in [0, 100].
pub fn measure_confirmation(trace: &SimTrace, percentile: f64) -> Result<f64, SimError> {
    if trace.confirmations.is_empty() {
        return Err(SimError::NoConfirmations);
    }
    if !(0.0..=100.0).contains(&percentile) {
        return Err(SimError::InvalidConfig {
            field: "percentile".to_string(),
            reason: "must lie in [0, 100]".to_string(),
        });
    }
    let mut waits: Vec<f64> = trace.confirmations.iter().map(|c| c.wait_s).collect();
    waits.sort_by(f64::total_cmp);
    let n = waits.len();
    let rank = ((percentile / 100.0) * n as f64).ceil() as usize;
    Ok(waits[rank.clamp(1, n) - 1])
}

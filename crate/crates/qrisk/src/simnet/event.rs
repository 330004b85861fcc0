//! The event queue: a strict (fire_at, seq) total order over scheduled work.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::ledger::{Block, Transaction};

/// Attacker submissions draw sequence numbers from this band so that, at an
/// identical model instant, every normally scheduled event fires first. The
/// race tie then goes against the attacker by construction.
const ATTACKER_SEQ_BASE: u64 = 1 << 63;

#[derive(Clone, Debug)]
pub enum EventPayload {
    /// A wallet's transaction reaches the network view. The wallet index
    /// is resolved to a concrete transaction when the event fires, built
    /// against the state the network holds at arrival time.
    TxBroadcast { wallet: usize, declared_at: f64 },
    /// A miner's next block. Honest miners extend the canonical tip;
    /// registered private miners extend their withheld branch instead.
    BlockFound { miner: [u8; 32] },
    /// An attacker's offline computation (a discrete-log job) completes.
    AttackJobDone { job: u64 },
    /// A fully built attacker transaction reaches the network view.
    AttackerSubmit { tx: Box<Transaction> },
    /// An attacker block release or scripted checkpoint.
    ScenarioProbe { label: String, blocks: Vec<Block> },
}

#[derive(Clone, Debug)]
pub struct SimEvent {
    pub fire_at: f64,
    pub seq: u64,
    pub payload: EventPayload,
}

impl PartialEq for SimEvent {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq && self.fire_at.total_cmp(&other.fire_at) == Ordering::Equal
    }
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.fire_at
            .total_cmp(&other.fire_at)
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Min-queue over (fire_at, seq). Sequence numbers are handed out at
/// scheduling time, so two events never compare equal.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<std::cmp::Reverse<SimEvent>>,
    next_seq: u64,
    next_attacker_seq: u64,
}

impl EventQueue {
    pub fn new() -> EventQueue {
        EventQueue::default()
    }

    pub fn schedule(&mut self, fire_at: f64, payload: EventPayload) {
        debug_assert!(fire_at.is_finite());
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(std::cmp::Reverse(SimEvent {
            fire_at,
            seq,
            payload,
        }));
    }

    /// Schedule in the attacker band: loses every same-instant tie.
    pub fn schedule_attacker(&mut self, fire_at: f64, payload: EventPayload) {
        debug_assert!(fire_at.is_finite());
        let seq = ATTACKER_SEQ_BASE + self.next_attacker_seq;
        self.next_attacker_seq += 1;
        self.heap.push(std::cmp::Reverse(SimEvent {
            fire_at,
            seq,
            payload,
        }));
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop().map(|r| r.0)
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|r| r.0.fire_at)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

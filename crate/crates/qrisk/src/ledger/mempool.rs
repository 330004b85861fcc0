//! Pending transactions, ordered for block selection.

use std::collections::BTreeMap;

use super::tx::{Transaction, TxId};

/// Priority pool keyed so natural map order is fee descending, arrival
/// ascending. Admission is id-deduplicated; conflict filtering (two pending
/// spends of one output) happens at selection time, not here, so a fee race
/// over the same coin can sit in the pool and be decided by ordering.
#[derive(Clone, Debug, Default)]
pub struct Mempool {
    queue: BTreeMap<(u64, u64), Transaction>,
    index: BTreeMap<TxId, (u64, u64)>,
    next_arrival: u64,
}

impl Mempool {
    pub fn new() -> Mempool {
        Mempool::default()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn contains(&self, id: &TxId) -> bool {
        self.index.contains_key(id)
    }

    /// Admit a transaction; a duplicate id is refused.
    pub fn insert(&mut self, tx: Transaction) -> bool {
        let id = tx.id();
        if self.index.contains_key(&id) {
            return false;
        }
        let key = (u64::MAX - tx.fee(), self.next_arrival);
        self.next_arrival += 1;
        self.index.insert(id, key);
        self.queue.insert(key, tx);
        true
    }

    pub fn remove(&mut self, id: &TxId) -> Option<Transaction> {
        let key = self.index.remove(id)?;
        self.queue.remove(&key)
    }

    /// Selection order: highest fee first, earliest arrival breaking ties.
    pub fn iter(&self) -> impl Iterator<Item = &Transaction> {
        self.queue.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::tx::{AccountTx, TxBody};
    use crate::sig::{EcdsaSignature, RecoverableSignature};
    use num_bigint::BigUint;

    fn tx(nonce: u64, fee: u64) -> Transaction {
        Transaction::new(
            TxBody::Account(AccountTx {
                to: [9u8; 32],
                amount: 1,
                fee,
                nonce,
                signature: RecoverableSignature {
                    base: EcdsaSignature {
                        r: BigUint::from(1u32),
                        s: BigUint::from(1u32),
                    },
                    recovery_hint: 0,
                },
            }),
            0.0,
        )
    }

    #[test]
    fn orders_by_fee_then_arrival() {
        let mut pool = Mempool::new();
        let low = tx(0, 1);
        let high = tx(1, 50);
        let high_later = tx(2, 50);
        pool.insert(low.clone());
        pool.insert(high.clone());
        pool.insert(high_later.clone());
        let order: Vec<TxId> = pool.iter().map(|t| t.id()).collect();
        assert_eq!(order, vec![high.id(), high_later.id(), low.id()]);
    }

    #[test]
    fn duplicate_ids_are_refused() {
        let mut pool = Mempool::new();
        let t = tx(0, 5);
        assert!(pool.insert(t.clone()));
        assert!(!pool.insert(t.clone()));
        assert_eq!(pool.len(), 1);
        assert!(pool.contains(&t.id()));
    }

    #[test]
    fn remove_clears_both_views() {
        let mut pool = Mempool::new();
        let t = tx(0, 5);
        pool.insert(t.clone());
        let got = pool.remove(&t.id()).unwrap();
        assert_eq!(got.id(), t.id());
        assert!(pool.is_empty());
        assert!(!pool.contains(&t.id()));
        assert!(pool.remove(&t.id()).is_none());
    }
}

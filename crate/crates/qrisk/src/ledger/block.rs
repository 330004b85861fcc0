//! Blocks and the demonstration proof-of-work witness.
//!
//! Block production is driven statistically elsewhere; no preimages are
//! ground. The one exception is the Equihash-style path, where a real
//! zero-XOR witness is solved at demonstration width over header-derived
//! strings, small enough to run per block yet verified like the real thing.

use crate::adversary::{verify_kxor, wagner_solve};
use crate::ec::hash::tagged_digest;

use super::tx::{digest_parts, push_chunk, Transaction, TxId};

pub type BlockId = [u8; 32];

const BLOCK_ID_TAG: &str = "block/id";
const POW_STRING_TAG: &str = "block/pow-string";

/// Demonstration instance width: small enough that a witness is solved in
/// well under a millisecond, wide enough that a random tuple almost never
/// verifies by accident.
pub const DEMO_POW_N: u32 = 16;
pub const DEMO_POW_K_LOG: u32 = 2;
pub const DEMO_POW_STRING_COUNT: usize = 512;

/// Indices of a zero-XOR tuple over the block's derived strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowWitness {
    pub n: u32,
    pub k_log: u32,
    /// Salt folded into string derivation; bumped when an instance happens
    /// to have no solution.
    pub nonce: u64,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub parent: BlockId,
    pub height: u64,
    pub transactions: Vec<Transaction>,
    pub miner: [u8; 32],
    pub pow_witness: Option<PowWitness>,
    pub timestamp: f64,
}

impl Block {
    pub fn id(&self) -> BlockId {
        let mut head = Vec::new();
        push_chunk(&mut head, &self.parent);
        push_chunk(&mut head, &self.height.to_le_bytes());
        push_chunk(&mut head, &self.miner);
        push_chunk(&mut head, &self.timestamp.to_bits().to_le_bytes());
        let mut parts = vec![head];
        for t in &self.transactions {
            parts.push(t.id().to_vec());
        }
        let mut w = Vec::new();
        if let Some(pw) = &self.pow_witness {
            w.push(1u8);
            push_chunk(&mut w, &pw.n.to_le_bytes());
            push_chunk(&mut w, &pw.k_log.to_le_bytes());
            push_chunk(&mut w, &pw.nonce.to_le_bytes());
            for i in &pw.indices {
                push_chunk(&mut w, &(*i as u64).to_le_bytes());
            }
        } else {
            w.push(0u8);
        }
        parts.push(w);
        digest_parts(BLOCK_ID_TAG, parts)
    }

    pub fn tx_ids(&self) -> Vec<TxId> {
        self.transactions.iter().map(|t| t.id()).collect()
    }
}

/// The strings a block's witness must XOR over, fixed by the header fields
/// so neither side can choose them freely.
pub fn pow_strings(parent: &BlockId, height: u64, miner: &[u8; 32], nonce: u64) -> Vec<u64> {
    let mask: u64 = (1u64 << DEMO_POW_N) - 1;
    (0..DEMO_POW_STRING_COUNT as u64)
        .map(|i| {
            let d = tagged_digest(
                POW_STRING_TAG,
                &[
                    parent,
                    &height.to_le_bytes(),
                    miner,
                    &nonce.to_le_bytes(),
                    &i.to_le_bytes(),
                ],
            );
            u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes")) & mask
        })
        .collect()
}

/// Solve a witness for the given header. Instances without a solution are
/// vanishingly rare at demonstration width; the nonce walks past them.
pub fn solve_pow_witness(parent: &BlockId, height: u64, miner: &[u8; 32]) -> PowWitness {
    for nonce in 0u64.. {
        let strings = pow_strings(parent, height, miner, nonce);
        let found = wagner_solve(DEMO_POW_N, DEMO_POW_K_LOG, &strings)
            .expect("demonstration parameters are always in range");
        if let Some(indices) = found {
            return PowWitness {
                n: DEMO_POW_N,
                k_log: DEMO_POW_K_LOG,
                nonce,
                indices,
            };
        }
    }
    unreachable!("nonce space exhausted");
}

/// Check a block's witness against its own header-derived strings.
pub fn verify_pow_witness(block: &Block) -> bool {
    let Some(pw) = &block.pow_witness else {
        return false;
    };
    if pw.n != DEMO_POW_N || pw.k_log != DEMO_POW_K_LOG {
        return false;
    }
    let strings = pow_strings(&block.parent, block.height, &block.miner, pw.nonce);
    verify_kxor(pw.n, pw.k_log, &strings, &pw.indices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> ([u8; 32], u64, [u8; 32]) {
        ([3u8; 32], 7, [5u8; 32])
    }

    #[test]
    fn solved_witness_verifies() {
        let (parent, height, miner) = header();
        let pw = solve_pow_witness(&parent, height, &miner);
        let block = Block {
            parent,
            height,
            transactions: vec![],
            miner,
            pow_witness: Some(pw),
            timestamp: 1.0,
        };
        assert!(verify_pow_witness(&block));
    }

    #[test]
    fn witness_is_bound_to_the_header() {
        let (parent, height, miner) = header();
        let pw = solve_pow_witness(&parent, height, &miner);
        let moved = Block {
            parent: [4u8; 32],
            height,
            transactions: vec![],
            miner,
            pow_witness: Some(pw),
            timestamp: 1.0,
        };
        assert!(!verify_pow_witness(&moved));
    }

    #[test]
    fn missing_witness_fails_verification() {
        let (parent, height, miner) = header();
        let block = Block {
            parent,
            height,
            transactions: vec![],
            miner,
            pow_witness: None,
            timestamp: 1.0,
        };
        assert!(!verify_pow_witness(&block));
    }

    #[test]
    fn block_id_covers_witness_and_timestamp() {
        let (parent, height, miner) = header();
        let base = Block {
            parent,
            height,
            transactions: vec![],
            miner,
            pow_witness: None,
            timestamp: 1.0,
        };
        let with_witness = Block {
            pow_witness: Some(solve_pow_witness(&parent, height, &miner)),
            ..base.clone()
        };
        let later = Block {
            timestamp: 2.0,
            ..base.clone()
        };
        assert_ne!(base.id(), with_witness.id());
        assert_ne!(base.id(), later.id());
        assert_eq!(base.id(), base.clone().id());
    }
}

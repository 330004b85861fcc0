//! Generalized-birthday solver: find 2^k distinct indices whose n-bit
//! strings XOR to zero.
//!
//! Single-list tree algorithm. Each of the first k-1 rounds buckets
//! entries on the low w = floor(n / (k+1)) bits, joins colliding pairs,
//! and shifts the cleared bits away; the final round demands a full match
//! on everything left. Pairs must have disjoint index sets, and merged
//! index sets are deduplicated so the list never fills with rearrangements
//! of one solution.
//!
//! All iteration runs over sorted structures, so a given instance always
//! returns the same answer.

use std::collections::{BTreeMap, BTreeSet};

use super::AdversaryError;

/// Per-round list cap. Generous for desk-scale instances; keeps
/// adversarial bucket blowups bounded.
const MAX_LEVEL_ENTRIES: usize = 1 << 20;

#[derive(Clone)]
struct Entry {
    value: u64,
    /// Sorted, distinct positions in the input list.
    indices: Vec<u32>,
}

fn validate(n: u32, k_log: u32, strings: &[u64]) -> Result<(), AdversaryError> {
    if n == 0 || n > 63 {
        return Err(AdversaryError::BadParameters(format!(
            "string width must be 1..=63 bits, got {n}"
        )));
    }
    if k_log == 0 || k_log > 16 {
        return Err(AdversaryError::BadParameters(format!(
            "tuple exponent must be 1..=16, got {k_log}"
        )));
    }
    if strings.len() > u32::MAX as usize {
        return Err(AdversaryError::BadParameters("too many strings".into()));
    }
    let mask = (1u64 << n) - 1;
    if let Some(pos) = strings.iter().position(|s| s & !mask != 0) {
        return Err(AdversaryError::BadParameters(format!(
            "string {pos} does not fit in {n} bits"
        )));
    }
    Ok(())
}

/// True when `indices` is a valid tuple for this instance: 2^k distinct
/// in-range positions whose strings XOR to zero.
pub fn verify_kxor(n: u32, k_log: u32, strings: &[u64], indices: &[usize]) -> bool {
    if validate(n, k_log, strings).is_err() {
        return false;
    }
    if indices.len() != 1usize << k_log {
        return false;
    }
    let distinct: BTreeSet<&usize> = indices.iter().collect();
    if distinct.len() != indices.len() {
        return false;
    }
    if indices.iter().any(|&i| i >= strings.len()) {
        return false;
    }
    indices.iter().fold(0u64, |acc, &i| acc ^ strings[i]) == 0
}

/// One tuple of 2^k distinct indices with XOR zero, or `None` when the
/// instance has no reachable solution. Indices come back sorted.
pub fn wagner_solve(
    n: u32,
    k_log: u32,
    strings: &[u64],
) -> Result<Option<Vec<usize>>, AdversaryError> {
    validate(n, k_log, strings)?;
    let w = n / (k_log + 1);
    if w == 0 {
        return Err(AdversaryError::BadParameters(format!(
            "width {n} too small for tuple exponent {k_log}"
        )));
    }

    let mut level: Vec<Entry> = strings
        .iter()
        .enumerate()
        .map(|(i, &s)| Entry {
            value: s,
            indices: vec![i as u32],
        })
        .collect();
    let mut remaining = n;

    for round in 1..=k_log {
        let last = round == k_log;
        let bucket_mask = if last { u64::MAX } else { (1u64 << w) - 1 };
        let mut buckets: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (pos, e) in level.iter().enumerate() {
            buckets.entry(e.value & bucket_mask).or_default().push(pos);
        }
        let mut next: Vec<Entry> = Vec::new();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        'join: for members in buckets.values() {
            for (ai, &a) in members.iter().enumerate() {
                for &b in &members[ai + 1..] {
                    let (ea, eb) = (&level[a], &level[b]);
                    if !disjoint(&ea.indices, &eb.indices) {
                        continue;
                    }
                    let indices = merge(&ea.indices, &eb.indices);
                    if !seen.insert(indices.clone()) {
                        continue;
                    }
                    if last {
                        // Bucketing on the full value makes the pair XOR
                        // exactly zero.
                        return Ok(Some(indices.into_iter().map(|i| i as usize).collect()));
                    }
                    next.push(Entry {
                        value: (ea.value ^ eb.value) >> w,
                        indices,
                    });
                    if next.len() >= MAX_LEVEL_ENTRIES {
                        break 'join;
                    }
                }
            }
        }
        if last || next.is_empty() {
            return Ok(None);
        }
        level = next;
        remaining -= w;
        debug_assert!(remaining >= 1);
    }
    unreachable!("final round returns");
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

//! Classical discrete-log oracle for attackable groups.
//!
//! Baby-step giant-step over the group's own arithmetic. A solve on a
//! 40-bit group needs about 2^20 additions worst case and the u64 backend
//! keeps that in the tens of milliseconds; the 28-bit toy groups land well
//! under a millisecond.
//!
//! The oracle spends wall time, never model time. Callers that simulate a
//! quantum attacker bill the clock from the cost formulas and use this
//! only to obtain the actual key.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::ec::{CurveGroup, GroupPoint, MAX_ATTACKABLE_ORDER_BITS};

use super::AdversaryError;

struct BabyTable {
    /// Ceiling square root of the group order.
    m: u64,
    /// j*G encoded bytes -> j, for j in [0, m).
    baby: HashMap<Vec<u8>, u64>,
    /// -(m*G), the giant step.
    giant_neg: GroupPoint,
}

/// Solves discrete logs and remembers how many it has done. Baby tables
/// are built once per group label and reused across solves.
#[derive(Default)]
pub struct DlogOracle {
    tables: HashMap<String, BabyTable>,
    solves: u64,
}

fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

fn build_table(group: &CurveGroup) -> BabyTable {
    let n = group
        .order()
        .to_u64()
        .expect("attackable order fits in u64");
    let m = isqrt_u64(n) + 1;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut p = group.identity();
    for j in 0..m {
        baby.insert(p.to_bytes(), j);
        p = group.add_unchecked(&p, group.generator());
    }
    let giant = group
        .scalar_mul(&BigUint::from(m), group.generator())
        .expect("generator is on its own curve");
    BabyTable {
        m,
        baby,
        giant_neg: group.point_neg(&giant),
    }
}

impl DlogOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Successful solves so far. Attack executors snapshot this around a
    /// run to report how many keys they had to break.
    pub fn solves(&self) -> u64 {
        self.solves
    }

    /// The scalar x with x*G = target, for targets in the generator's
    /// subgroup of an attackable group.
    pub fn solve(
        &mut self,
        group: &CurveGroup,
        target: &GroupPoint,
    ) -> Result<BigUint, AdversaryError> {
        if !group.attackable() {
            return Err(AdversaryError::OracleRefused {
                curve: group.label().to_string(),
                order_bits: group.order().bits(),
                max_bits: MAX_ATTACKABLE_ORDER_BITS,
            });
        }
        if !group.contains(target) {
            return Err(AdversaryError::BadParameters(
                "target is not on the oracle's curve".into(),
            ));
        }
        let table = self
            .tables
            .entry(group.label().to_string())
            .or_insert_with(|| build_table(group));
        let mut cur = target.clone();
        for i in 0..table.m {
            if let Some(&j) = table.baby.get(&cur.to_bytes()) {
                // First hit is exact: smaller i leaves a residue >= m,
                // which the baby table cannot contain.
                let x = i * table.m + j;
                let x = BigUint::from(x);
                debug_assert_eq!(&group.mul_generator(&x), target);
                self.solves += 1;
                return Ok(x);
            }
            cur = group.add_unchecked(&cur, &table.giant_neg);
        }
        Err(AdversaryError::NoDiscreteLog)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::params::curve_by_label;
    use crate::rng::DetRng;
    use num_traits::One;

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt_u64(0), 0);
        assert_eq!(isqrt_u64(1), 1);
        assert_eq!(isqrt_u64(3), 1);
        assert_eq!(isqrt_u64(4), 2);
        assert_eq!(isqrt_u64(u64::MAX), (1u64 << 32) - 1);
    }

    #[test]
    fn recovers_random_scalars_weierstrass() {
        let g = curve_by_label("toy-w28").unwrap();
        let mut oracle = DlogOracle::new();
        let mut rng = DetRng::from_seed(701).split("oracle/w28");
        for _ in 0..25 {
            let k = rng.scalar_nonzero(g.order());
            let q = g.mul_generator(&k);
            assert_eq!(oracle.solve(&g, &q).unwrap(), k);
        }
        assert_eq!(oracle.solves(), 25);
    }

    #[test]
    fn recovers_random_scalars_edwards() {
        let g = curve_by_label("toy-ed30").unwrap();
        let mut oracle = DlogOracle::new();
        let mut rng = DetRng::from_seed(702).split("oracle/ed30");
        for _ in 0..10 {
            let k = rng.scalar_nonzero(g.order());
            let q = g.mul_generator(&k);
            assert_eq!(oracle.solve(&g, &q).unwrap(), k);
        }
    }

    #[test]
    fn order_boundary() {
        let g = curve_by_label("toy-w28").unwrap();
        let mut oracle = DlogOracle::new();
        let k = g.order() - BigUint::one();
        let q = g.mul_generator(&k);
        assert_eq!(oracle.solve(&g, &q).unwrap(), k);
    }

    #[test]
    fn identity_is_zero() {
        let g = curve_by_label("toy-w28").unwrap();
        let mut oracle = DlogOracle::new();
        assert_eq!(oracle.solve(&g, &g.identity()).unwrap(), BigUint::ZERO);
    }

    #[test]
    fn refuses_full_size_groups() {
        let g = curve_by_label("secp256k1").unwrap();
        let q = g.mul_generator(&BigUint::from(5u32));
        let mut oracle = DlogOracle::new();
        match oracle.solve(&g, &q) {
            Err(AdversaryError::OracleRefused {
                curve,
                order_bits,
                max_bits,
            }) => {
                assert_eq!(curve, "secp256k1");
                assert_eq!(order_bits, 256);
                assert_eq!(max_bits, MAX_ATTACKABLE_ORDER_BITS);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert_eq!(oracle.solves(), 0);
    }

    #[test]
    fn cofactor_component_has_no_log() {
        // (0, -1) has order 2; the prime-order subgroup cannot reach it.
        let g = curve_by_label("toy-ed30").unwrap();
        let low = g
            .edwards_point_from_y(&(g.prime().as_ref() - BigUint::one()), false)
            .unwrap();
        assert!(g.contains(&low));
        let mut oracle = DlogOracle::new();
        assert!(matches!(
            oracle.solve(&g, &low),
            Err(AdversaryError::NoDiscreteLog)
        ));
        assert_eq!(oracle.solves(), 0);
    }

    #[test]
    fn foreign_point_rejected() {
        let w = curve_by_label("toy-w28").unwrap();
        let ed = curve_by_label("toy-ed30").unwrap();
        let q = w.mul_generator(&BigUint::from(9u32));
        let mut oracle = DlogOracle::new();
        assert!(matches!(
            oracle.solve(&ed, &q),
            Err(AdversaryError::BadParameters(_))
        ));
    }

    #[test]
    fn tables_are_cached_per_group() {
        let w = curve_by_label("toy-w28").unwrap();
        let ed = curve_by_label("toy-ed30").unwrap();
        let mut oracle = DlogOracle::new();
        for k in [3u32, 9, 27] {
            oracle.solve(&w, &w.mul_generator(&BigUint::from(k))).unwrap();
        }
        oracle.solve(&ed, &ed.mul_generator(&BigUint::from(8u32))).unwrap();
        assert_eq!(oracle.tables.len(), 2);
        assert_eq!(oracle.solves(), 4);
    }
}

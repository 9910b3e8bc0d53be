//! Pairing of tuples and canonical indices of finite sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of naturals.
pub type FinSet = BTreeSet<u64>;

/// Canonical index of a finite set under bit-set coding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalIndex(pub u64);

impl CanonicalIndex {
    pub fn of(set: &FinSet) -> Result<Self> {
        finset_encode(set).map(CanonicalIndex)
    }

    pub fn set(self) -> FinSet {
        finset_decode(self.0)
    }
}

/// Cantor code of a pair or triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairCode(pub u64);

impl PairCode {
    pub fn of_pair(j: u64, k: u64) -> Result<Self> {
        pair(j, k).map(PairCode)
    }

    pub fn of_triple(j: u64, k: u64, l: u64) -> Result<Self> {
        triple(j, k, l).map(PairCode)
    }

    pub fn components(self) -> (u64, u64) {
        unpair(self.0)
    }
}

/// Cantor pairing `(j+k)(j+k+1)/2 + k`.
pub fn pair(j: u64, k: u64) -> Result<u64> {
    let too_large = || Error::InputTooLarge(format!("pair({j}, {k}) overflows u64"));
    let sum = j.checked_add(k).ok_or_else(too_large)?;
    let succ = sum.checked_add(1).ok_or_else(too_large)?;
    // one of sum, sum+1 is even
    let tri = if sum % 2 == 0 {
        (sum / 2).checked_mul(succ)
    } else {
        sum.checked_mul(succ / 2)
    }
    .ok_or_else(too_large)?;
    tri.checked_add(k).ok_or_else(too_large)
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    // largest w with w(w+1)/2 <= z
    let mut w = ((8.0 * z as f64 + 1.0).sqrt() as u64).saturating_sub(1) / 2;
    while triangular(w + 1).is_some_and(|t| t <= z) {
        w += 1;
    }
    while triangular(w).is_none_or(|t| t > z) {
        w -= 1;
    }
    let k = z - triangular(w).expect("checked above");
    (w - k, k)
}

fn triangular(w: u64) -> Option<u64> {
    let (a, b) = if w.is_multiple_of(2) { (w / 2, w + 1) } else { (w, w.div_ceil(2)) };
    a.checked_mul(b)
}

pub fn triple(j: u64, k: u64, l: u64) -> Result<u64> {
    pair(j, pair(k, l)?)
}

pub fn untriple(z: u64) -> (u64, u64, u64) {
    let (j, rest) = unpair(z);
    let (k, l) = unpair(rest);
    (j, k, l)
}

/// Bit-set coding: `Σ_{i∈F} 2^i`.
pub fn finset_encode(set: &FinSet) -> Result<u64> {
    match set.last() {
        Some(&max) if max >= 64 => Err(Error::InputTooLarge(format!(
            "element {max} does not fit a 64-bit canonical index"
        ))),
        _ => Ok(set.iter().fold(0, |acc, &i| acc | (1u64 << i))),
    }
}

pub fn finset_decode(mut code: u64) -> FinSet {
    let mut set = FinSet::new();
    while code != 0 {
        let bit = code.trailing_zeros() as u64;
        set.insert(bit);
        code &= code - 1;
    }
    set
}

/// Compares two finite sets by canonical index without materializing the
/// index, so sets with large elements can still be ordered.
pub fn canonical_cmp(a: &FinSet, b: &FinSet) -> Ordering {
    let mut ia = a.iter().rev();
    let mut ib = b.iter().rev();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) if x != y => return x.cmp(y),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[u64]) -> FinSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair(0, 0).unwrap(), 0);
        assert_eq!(pair(1, 2).unwrap(), 8);
        assert_eq!(pair(2, 1).unwrap(), 7);
        assert_eq!(unpair(8), (1, 2));
        assert_eq!(untriple(triple(3, 4, 5).unwrap()), (3, 4, 5));
    }

    #[test]
    fn pair_overflow() {
        assert!(matches!(pair(u64::MAX, 1), Err(Error::InputTooLarge(_))));
        assert!(matches!(pair(1 << 33, 1 << 33), Err(Error::InputTooLarge(_))));
    }

    #[test]
    fn unpair_large_values() {
        let (j, k) = (3_000_000_000, 1_234_567);
        assert_eq!(unpair(pair(j, k).unwrap()), (j, k));
        assert_eq!(unpair(u64::MAX), {
            let (a, b) = unpair(u64::MAX);
            assert_eq!(pair(a, b).unwrap(), u64::MAX);
            (a, b)
        });
    }

    #[test]
    fn finset_examples() {
        assert_eq!(finset_encode(&FinSet::new()).unwrap(), 0);
        assert_eq!(finset_encode(&set(&[0, 2])).unwrap(), 5);
        assert_eq!(finset_decode(6), set(&[1, 2]));
        assert!(matches!(finset_encode(&set(&[64])), Err(Error::InputTooLarge(_))));
    }

    #[test]
    fn canonical_order_matches_codes() {
        let sets = [set(&[]), set(&[3]), set(&[0, 1]), set(&[0, 3]), set(&[2])];
        for a in &sets {
            for b in &sets {
                let by_code = finset_encode(a).unwrap().cmp(&finset_encode(b).unwrap());
                assert_eq!(canonical_cmp(a, b), by_code);
            }
        }
    }

    #[test]
    fn pair_round_trip_grid() {
        for j in (0..10_000u64).step_by(37) {
            for k in (0..10_000u64).step_by(41) {
                assert_eq!(unpair(pair(j, k).unwrap()), (j, k));
            }
        }
    }

    proptest! {
        #[test]
        fn finset_round_trip(xs in proptest::collection::btree_set(0u64..30, 0..12)) {
            prop_assert_eq!(finset_decode(finset_encode(&xs).unwrap()), xs);
        }

        #[test]
        fn pair_round_trip(j in 0u64..10_000, k in 0u64..10_000) {
            prop_assert_eq!(unpair(pair(j, k).unwrap()), (j, k));
        }

        #[test]
        fn canonical_cmp_agrees(a in proptest::collection::btree_set(0u64..20, 0..8),
                                b in proptest::collection::btree_set(0u64..20, 0..8)) {
            let by_code = finset_encode(&a).unwrap().cmp(&finset_encode(&b).unwrap());
            prop_assert_eq!(canonical_cmp(&a, &b), by_code);
        }
    }
}

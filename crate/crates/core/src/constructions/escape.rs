//! A maximal F-subfamily computed from any function escaping the witness bound.

use crate::error::{Error, Result};
use crate::families::{Family, SubfamilyIndex};

/// Largest member count accepted by [`witness_bound`].
pub const WITNESS_BOUND_CAP: usize = 20;

/// The raw sequence `J(0), …, J(steps)`, fill-in zeros included.
pub fn escape_sequence(fam: &Family, f: &dyn Fn(u64) -> u64, steps: u64) -> Result<Vec<usize>> {
    if fam.member(0).map_or(true, |m| m.is_empty()) {
        return Err(Error::BadInput("member 0 must be nonempty".into()));
    }
    let mut j = vec![0usize];
    let mut running = fam.members()[0].clone();
    for s in 0..steps {
        let bound = f(s);
        let top = usize::try_from(s).unwrap_or(usize::MAX).min(fam.len() - 1);
        let next = (0..=top)
            .filter(|i| !j.contains(i))
            .find(|&i| fam.members()[i].range(..=bound).any(|x| running.contains(x)));
        match next {
            Some(i) => {
                running = running.intersection(&fam.members()[i]).copied().collect();
                j.push(i);
            }
            None => j.push(0),
        }
    }
    Ok(j)
}

/// The range of the escape recursion, in order of first appearance.
pub fn escape_subfamily(fam: &Family, f: &dyn Fn(u64) -> u64, steps: u64) -> Result<SubfamilyIndex> {
    let seq = escape_sequence(fam, f, steps)?;
    let mut seen = Vec::new();
    for i in seq {
        if !seen.contains(&i) {
            seen.push(i);
        }
    }
    Ok(SubfamilyIndex::new(seen))
}

/// `g(s)`: the least `y` such that every subset of members `0..=s` with a
/// common element has one `≤ y`.
pub fn witness_bound(fam: &Family, s: u64) -> Result<u64> {
    let count = usize::try_from(s).unwrap_or(usize::MAX).saturating_add(1).min(fam.len());
    if count > WITNESS_BOUND_CAP {
        return Err(Error::InputTooLarge(format!("witness bound over {count} members")));
    }
    let words = (fam.horizon() as usize).div_ceil(64).max(1);
    let bits: Vec<Vec<u64>> = fam.members()[..count]
        .iter()
        .map(|m| {
            let mut w = vec![0u64; words];
            for &x in m {
                w[(x / 64) as usize] |= 1 << (x % 64);
            }
            w
        })
        .collect();
    let mut inter: Vec<Vec<u64>> = Vec::with_capacity(1 << count);
    inter.push(vec![u64::MAX; words]);
    let mut g = 0;
    for mask in 1usize..(1 << count) {
        let low = mask.trailing_zeros() as usize;
        let rest = &inter[mask & (mask - 1)];
        let cur: Vec<u64> = rest.iter().zip(&bits[low]).map(|(a, b)| a & b).collect();
        if let Some((wi, w)) = cur.iter().enumerate().find(|(_, w)| **w != 0) {
            g = g.max(wi as u64 * 64 + w.trailing_zeros() as u64);
        }
        inter.push(cur);
    }
    Ok(g)
}

//! Good sequences read off a bit string, and the extension recipe that meets
//! the dense sets `D_i`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, SubfamilyIndex};

/// A bijection between numbers and finite sequences of numbers.
pub trait SequenceCoder {
    fn encode(&self, seq: &[u64]) -> BigUint;
    fn decode(&self, x: &BigUint) -> Vec<u64>;
}

/// Codes `a_0 … a_k` by the bit positions `p_0 < … < p_k` with
/// `p_0 = a_0` and `p_j = p_{j-1} + a_j + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GapCoder;

impl SequenceCoder for GapCoder {
    fn encode(&self, seq: &[u64]) -> BigUint {
        let mut x = BigUint::zero();
        let mut pos: Option<u64> = None;
        for &a in seq {
            let p = pos.map_or(a, |q| q + a + 1);
            x.set_bit(p, true);
            pos = Some(p);
        }
        x
    }

    fn decode(&self, x: &BigUint) -> Vec<u64> {
        let mut out = Vec::new();
        let mut prev: Option<u64> = None;
        for p in 0..x.bits() {
            if x.bit(p) {
                out.push(prev.map_or(p, |q| p - q - 1));
                prev = Some(p);
            }
        }
        out
    }
}

/// A finite bit string stored by its length and the positions of its ones.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SparseBits {
    pub len: BigUint,
    pub ones: BTreeSet<BigUint>,
}

impl SparseBits {
    pub fn zeros(len: u64) -> Self {
        SparseBits { len: BigUint::from(len), ones: BTreeSet::new() }
    }

    pub fn get(&self, x: &BigUint) -> bool {
        x < &self.len && self.ones.contains(x)
    }

    /// `σ̃`: zeros up to `x`, then a one at `x`.
    pub fn extend_with_one(&mut self, x: BigUint) {
        debug_assert!(x >= self.len);
        self.len = &x + BigUint::one();
        self.ones.insert(x);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodEntry {
    pub x: BigUint,
    pub tau: Vec<u64>,
    pub bound: u64,
}

fn witness(fam: &Family, tau: &[u64], bound: u64) -> Option<u64> {
    if tau.iter().any(|&i| i as usize >= fam.len()) {
        return None;
    }
    let idx: Vec<usize> = tau.iter().map(|&i| i as usize).collect();
    let Some((&first, rest)) = idx.split_first() else { return Some(0) };
    fam.members()[first].range(..=bound).copied().find(|x| rest.iter().all(|&j| fam.members()[j].contains(x)))
}

fn good(fam: &Family, coder: &dyn SequenceCoder, x: &BigUint) -> Option<GoodEntry> {
    let mut seq = coder.decode(x);
    let bound = seq.pop()?;
    witness(fam, &seq, bound)?;
    Some(GoodEntry { x: x.clone(), tau: seq, bound })
}

/// The least good position, then repeatedly the least later good position
/// whose string strictly extends the previous one.
pub fn good_sequence(sigma: &SparseBits, fam: &Family, coder: &dyn SequenceCoder) -> Vec<GoodEntry> {
    let mut out: Vec<GoodEntry> = Vec::new();
    for x in sigma.ones.iter().filter(|x| *x < &sigma.len) {
        let Some(g) = good(fam, coder, x) else { continue };
        let fits = out.last().is_none_or(|prev| g.tau.len() > prev.tau.len() && g.tau.starts_with(&prev.tau));
        if fits {
            out.push(g);
        }
    }
    out
}

fn meets_dense(fam: &Family, seq: &[GoodEntry], i: usize) -> bool {
    let Some(last) = seq.last() else { return false };
    if last.tau.contains(&(i as u64)) {
        return true;
    }
    let mut idx = last.tau.clone();
    idx.push(i as u64);
    witness(fam, &idx, fam.horizon()).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi01Run {
    pub sigma: SparseBits,
    pub sequence: Vec<GoodEntry>,
    pub indices: SubfamilyIndex,
}

/// Meets `D_i` for the requested indices in turn (cycling `indices`, or every
/// member index when empty) and reads `J` off the final good sequence.
pub fn pi01_generic_run(fam: &Family, indices: &[usize], steps: usize) -> Result<Pi01Run> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= fam.len()) {
        return Err(Error::BadIndex { index: bad, len: fam.len() });
    }
    if !fam.is_nontrivial() {
        return Err(Error::BadInput("family is trivial".into()));
    }
    let coder = GapCoder;
    let mut sigma = SparseBits::zeros(0);
    for t in 0..steps {
        let i = if indices.is_empty() { t % fam.len() } else { indices[t % indices.len()] };
        let seq = good_sequence(&sigma, fam, &coder);
        if meets_dense(fam, &seq, i) {
            continue;
        }
        let tau = seq.last().map(|g| g.tau.clone()).unwrap_or_default();
        let j = (i..fam.len())
            .find(|&j| {
                let mut idx = tau.clone();
                idx.push(j as u64);
                witness(fam, &idx, fam.horizon()).is_some()
            })
            .ok_or_else(|| Error::FiniteMaximalFamily(format!("no member at or after {i} extends {tau:?}")))?;
        let mut code_seq = tau;
        code_seq.push(j as u64);
        let mut b = witness(fam, &code_seq, fam.horizon()).expect("found above");
        code_seq.push(b);
        let mut x = coder.encode(&code_seq);
        while x < sigma.len {
            b += 1;
            *code_seq.last_mut().expect("nonempty") = b;
            x = coder.encode(&code_seq);
        }
        sigma.extend_with_one(x);
    }
    let sequence = good_sequence(&sigma, fam, &coder);
    let mut idx = Vec::new();
    for &i in sequence.last().map(|g| g.tau.as_slice()).unwrap_or(&[]) {
        if !idx.contains(&(i as usize)) {
            idx.push(i as usize);
        }
    }
    Ok(Pi01Run { sigma, sequence, indices: SubfamilyIndex::new(idx) })
}

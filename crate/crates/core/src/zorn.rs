//! Finite posets, chain climbing, maximal elements and the reversal gadget.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PosetDoc {
    size: usize,
    leq: Vec<(usize, usize)>,
}

/// A partial order on `{0..size-1}` stored as a dense relation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetDoc", into = "PosetDoc")]
pub struct FinPoset {
    size: usize,
    leq: Vec<bool>,
}

impl TryFrom<PosetDoc> for FinPoset {
    type Error = Error;

    fn try_from(doc: PosetDoc) -> Result<Self> {
        FinPoset::from_pairs(doc.size, &doc.leq)
    }
}

impl From<FinPoset> for PosetDoc {
    fn from(p: FinPoset) -> Self {
        let leq = (0..p.size)
            .flat_map(|a| (0..p.size).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && p.leq(a, b))
            .collect();
        PosetDoc { size: p.size, leq }
    }
}

impl FinPoset {
    /// Builds a poset from `a ≤ b` pairs; reflexive pairs are added.
    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![false; size * size];
        for i in 0..size {
            leq[i * size + i] = true;
        }
        for &(a, b) in pairs {
            if a >= size || b >= size {
                return Err(Error::BadIndex { index: a.max(b), len: size });
            }
            leq[a * size + b] = true;
        }
        let p = FinPoset { size, leq };
        p.validate()?;
        Ok(p)
    }

    /// Builds from a relation closure; intended for generated instances.
    pub fn from_fn(size: usize, rel: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let pairs: Vec<(usize, usize)> =
            (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).filter(|&(a, b)| rel(a, b)).collect();
        FinPoset::from_pairs(size, &pairs)
    }

    fn validate(&self) -> Result<()> {
        let n = self.size;
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(Error::BadInput(format!("antisymmetry fails for {a} and {b}")));
                }
                for c in 0..n {
                    if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                        return Err(Error::BadInput(format!("transitivity fails for {a} <= {b} <= {c}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn chain(n: usize) -> Self {
        FinPoset::from_fn(n, |a, b| a <= b).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        FinPoset::from_fn(n, |a, b| a == b).expect("antichain is a poset")
    }

    /// `0 < {1, 2} < 3`.
    pub fn diamond() -> Self {
        FinPoset::from_pairs(4, &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]).expect("diamond is a poset")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Climb {
    pub chain: Vec<usize>,
    pub top: usize,
}

/// One pass over `0..size`, moving up whenever the current element lies
/// strictly below the one visited.
pub fn zl1_climb(pos: &FinPoset, start: usize) -> Result<Climb> {
    if start >= pos.size() {
        return Err(Error::BadIndex { index: start, len: pos.size() });
    }
    let mut chain = vec![start];
    let mut q = start;
    for p in 0..pos.size() {
        if pos.lt(q, p) {
            q = p;
            chain.push(p);
        }
    }
    Ok(Climb { chain, top: q })
}

pub fn maximal_elements(pos: &FinPoset) -> BTreeSet<usize> {
    (0..pos.size()).filter(|&p| (0..pos.size()).all(|q| !pos.lt(p, q))).collect()
}

/// `m(p)`: the numerically least maximal element above `p`.
pub fn maximal_assignment(pos: &FinPoset) -> BTreeMap<usize, usize> {
    let maxes = maximal_elements(pos);
    (0..pos.size())
        .map(|p| {
            let m = *maxes.iter().find(|&&q| pos.leq(p, q)).expect("finite posets have maximal elements above every point");
            (p, m)
        })
        .collect()
}

/// The gadget poset on labels `p_{i,s}` (id `i*S + s`) for a finite prefix `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetPoset {
    pub poset: FinPoset,
    pub f: Vec<u64>,
    pub chains: usize,
    pub stages: usize,
}

impl GadgetPoset {
    pub fn build(f: &[u64], chains: usize, stages: usize) -> Result<Self> {
        check_injective(f)?;
        let at = |s: usize| f.get(s).copied();
        let id = |i: usize, s: usize| i * stages + s;
        let mut pairs = Vec::new();
        for i in 0..chains {
            for t in 0..stages {
                for s in 0..stages {
                    if s == t {
                        continue;
                    }
                    let fi = Some(i as u64);
                    if at(s) == fi || (at(t) != fi && t > s) {
                        pairs.push((id(i, t), id(i, s)));
                    }
                }
            }
        }
        let poset = FinPoset::from_pairs(chains * stages, &pairs)?;
        Ok(GadgetPoset { poset, f: f.to_vec(), chains, stages })
    }

    pub fn id(&self, i: usize, s: usize) -> usize {
        i * self.stages + s
    }
}

fn check_injective(f: &[u64]) -> Result<()> {
    let mut seen = BTreeSet::new();
    match f.iter().find(|&&v| !seen.insert(v)) {
        Some(v) => Err(Error::BadInput(format!("f is not injective: value {v} repeats"))),
        None => Ok(()),
    }
}

/// `{i < I : ∀s < S. m(p_{i,0}) = p_{i,s} ⇒ f(s) = i}`.
pub fn zl_reversal_decode(f: &[u64], chains: usize, stages: usize) -> Result<BTreeSet<u64>> {
    if stages == 0 {
        return Err(Error::BadInput("the gadget needs at least one stage".into()));
    }
    let g = GadgetPoset::build(f, chains, stages)?;
    let m = maximal_assignment(&g.poset);
    Ok((0..chains)
        .filter(|&i| {
            (0..stages).all(|s| m[&g.id(i, 0)] != g.id(i, s) || f.get(s) == Some(&(i as u64)))
        })
        .map(|i| i as u64)
        .collect())
}

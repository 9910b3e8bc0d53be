//! Deterministic finitary closure operators (Horn rules `⟨F, n⟩`).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::encoding::FinSet;
use crate::error::{Error, Result};
use crate::finite_character::{require_finite_character, FcPredicate};
use crate::zorn::FinPoset;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DetRule {
    pub from: FinSet,
    pub to: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DetClosureOp {
    pub rules: Vec<DetRule>,
}

impl DetClosureOp {
    pub fn new(rules: Vec<DetRule>) -> Self {
        DetClosureOp { rules }
    }

    pub fn rule(from: &[u64], to: u64) -> DetRule {
        DetRule { from: from.iter().copied().collect(), to }
    }
}

/// Least closed superset of `x`, by worklist propagation.
///
/// Elements produced outside `[0, universe)` are kept; callers test
/// containment themselves.
pub fn cl(op: &DetClosureOp, x: &FinSet, universe: u64) -> Result<FinSet> {
    if let Some(&e) = x.iter().find(|&&e| e >= universe) {
        return Err(Error::BadInput(format!("element {e} lies outside the universe {universe}")));
    }
    Ok(closure(op, x))
}

pub(crate) fn closure(op: &DetClosureOp, x: &FinSet) -> FinSet {
    let mut watchers: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut missing: Vec<usize> = Vec::with_capacity(op.rules.len());
    for (r, rule) in op.rules.iter().enumerate() {
        missing.push(rule.from.iter().filter(|e| !x.contains(e)).count());
        for &e in &rule.from {
            watchers.entry(e).or_default().push(r);
        }
    }
    let mut out = x.clone();
    let mut queue: Vec<u64> = Vec::new();
    for (r, rule) in op.rules.iter().enumerate() {
        if missing[r] == 0 && out.insert(rule.to) {
            queue.push(rule.to);
        }
    }
    while let Some(e) = queue.pop() {
        for &r in watchers.get(&e).map(Vec::as_slice).unwrap_or(&[]) {
            missing[r] -= 1;
            if missing[r] == 0 && out.insert(op.rules[r].to) {
                queue.push(op.rules[r].to);
            }
        }
    }
    out
}

pub fn is_closed(op: &DetClosureOp, x: &FinSet) -> bool {
    op.rules.iter().all(|r| !r.from.is_subset(x) || x.contains(&r.to))
}

/// Scans `a ∖ c` upward, adjoining `i` whenever the closure of the kept set
/// plus `i` stays inside `a` and satisfies `pred`.
pub fn ce_greedy_max(op: &DetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet) -> Result<FinSet> {
    if !c.is_subset(a) {
        return Err(Error::BadSeed("seed is not contained in A".into()));
    }
    if !is_closed(op, c) {
        return Err(Error::BadSeed("seed is not closed".into()));
    }
    if !pred.eval(c) {
        return Err(Error::BadSeed(format!("seed fails {}", pred.label)));
    }
    require_finite_character(pred, a)?;
    let mut kept = c.clone();
    for &i in a.difference(c) {
        if kept.contains(&i) {
            continue;
        }
        let mut trial = kept.clone();
        trial.insert(i);
        let y = closure(op, &trial);
        if y.is_subset(a) && pred.eval(&y) {
            kept = y;
        }
    }
    Ok(kept)
}

pub fn nth_prime(i: usize) -> u64 {
    let mut found = 0;
    let mut n = 1u64;
    loop {
        n += 1;
        if (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d)) {
            if found == i {
                return n;
            }
            found += 1;
        }
    }
}

/// The prime-power operator for `f`, with exponents confined to
/// `[1, exp_bound]`.
///
/// The up ladder wraps from `p^E` back to `p^1`, and a value `f(n) = i`
/// targets exponent `(n mod E) + 1`.
pub fn prime_gadget(f: &[u64], prime_count: usize, exp_bound: u32) -> Result<DetClosureOp> {
    let mut seen = BTreeSet::new();
    if let Some(v) = f.iter().find(|&&v| !seen.insert(v)) {
        return Err(Error::BadInput(format!("f is not injective: value {v} repeats")));
    }
    if exp_bound == 0 {
        return Err(Error::BadInput("exponent bound must be positive".into()));
    }
    let mut rules = BTreeSet::new();
    for i in 0..prime_count {
        let p = nth_prime(i);
        let pow = |e: u32| -> Result<u64> {
            p.checked_pow(e).ok_or_else(|| Error::InputTooLarge(format!("{p}^{e} overflows u64")))
        };
        for e in 1..=exp_bound {
            let next = if e == exp_bound { 1 } else { e + 1 };
            if next != e {
                rules.insert(DetClosureOp::rule(&[pow(e)?], pow(next)?));
                rules.insert(DetClosureOp::rule(&[pow(next)?], pow(e)?));
            }
        }
        for (n, &v) in f.iter().enumerate() {
            if v == i as u64 {
                let e = (n as u32 % exp_bound) + 1;
                rules.insert(DetClosureOp::rule(&[pow(e)?], 0));
            }
        }
    }
    Ok(DetClosureOp::new(rules.into_iter().collect()))
}

/// `{0} ∪ {p_i^e : i < prime_count, 1 ≤ e ≤ exp_bound}`.
pub fn prime_universe(prime_count: usize, exp_bound: u32) -> FinSet {
    let mut u = FinSet::from([0]);
    for i in 0..prime_count {
        let p = nth_prime(i);
        u.extend((1..=exp_bound).map(|e| p.pow(e)));
    }
    u
}

/// Runs the CE greedy on the prime gadget with `0 ∉ X` and reads off
/// `{i : p_i ∉ B}`.
pub fn prime_gadget_decode(f: &[u64], prime_count: usize, exp_bound: u32) -> Result<BTreeSet<u64>> {
    let op = prime_gadget(f, prime_count, exp_bound)?;
    let universe = prime_universe(prime_count, exp_bound);
    let bound = universe.last().copied().unwrap_or(0) + 1;
    let pred = FcPredicate::structural("0 not in X", bound, |x| !x.contains(&0));
    let b = ce_greedy_max(&op, &pred, &universe, &FinSet::new())?;
    Ok((0..prime_count).filter(|&i| !b.contains(&nth_prime(i))).map(|i| i as u64).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SemilatticeDoc {
    size: usize,
    leq: Vec<(usize, usize)>,
    join: Vec<Vec<usize>>,
    top: usize,
}

/// A finite join-semilattice with an explicit join table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SemilatticeDoc", into = "SemilatticeDoc")]
pub struct JoinSemilattice {
    pub order: FinPoset,
    pub join: Vec<Vec<usize>>,
    pub top: usize,
}

impl TryFrom<SemilatticeDoc> for JoinSemilattice {
    type Error = Error;

    fn try_from(doc: SemilatticeDoc) -> Result<Self> {
        JoinSemilattice::new(FinPoset::from_pairs(doc.size, &doc.leq)?, doc.join, doc.top)
    }
}

impl From<JoinSemilattice> for SemilatticeDoc {
    fn from(l: JoinSemilattice) -> Self {
        let size = l.order.size();
        let leq = (0..size)
            .flat_map(|a| (0..size).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && l.order.leq(a, b))
            .collect();
        SemilatticeDoc { size, leq, join: l.join, top: l.top }
    }
}

impl JoinSemilattice {
    pub fn new(order: FinPoset, join: Vec<Vec<usize>>, top: usize) -> Result<Self> {
        let n = order.size();
        if top >= n || (0..n).any(|q| order.lt(top, q)) {
            return Err(Error::BadInput(format!("{top} is not a maximal element")));
        }
        if join.len() != n || join.iter().any(|row| row.len() != n) {
            return Err(Error::BadInput("join table must be size x size".into()));
        }
        for (a, row) in join.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                let lub = c < n
                    && order.leq(a, c)
                    && order.leq(b, c)
                    && (0..n).all(|d| !(order.leq(a, d) && order.leq(b, d)) || order.leq(c, d));
                if !lub {
                    return Err(Error::BadInput(format!("join({a}, {b}) = {c} is not the least upper bound")));
                }
            }
        }
        Ok(JoinSemilattice { order, join, top })
    }

    /// Derives the join table from the order, when every pair has a lub.
    pub fn from_order(order: FinPoset) -> Result<Self> {
        let n = order.size();
        let mut join = vec![vec![0; n]; n];
        for (a, row) in join.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let ubs: Vec<usize> = (0..n).filter(|&d| order.leq(a, d) && order.leq(b, d)).collect();
                *cell = *ubs
                    .iter()
                    .find(|&&c| ubs.iter().all(|&d| order.leq(c, d)))
                    .ok_or_else(|| Error::BadInput(format!("{a} and {b} have no least upper bound")))?;
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|q| order.leq(q, t)))
            .ok_or_else(|| Error::BadInput("no greatest element".into()))?;
        JoinSemilattice::new(order, join, top)
    }
}

/// Join rules plus down rules; closed sets are ideals, and the predicate
/// excludes the top.
pub fn semilattice_ideal_op(l: &JoinSemilattice) -> (DetClosureOp, FcPredicate) {
    let n = l.order.size();
    let mut rules = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            rules.insert(DetClosureOp::rule(&[a as u64, b as u64], l.join[a][b] as u64));
        }
        for b in 0..n {
            if l.order.lt(b, a) {
                rules.insert(DetClosureOp::rule(&[a as u64], b as u64));
            }
        }
    }
    let top = l.top as u64;
    let pred = FcPredicate::structural(format!("{top} not in X"), n as u64, move |x| !x.contains(&top));
    (DetClosureOp::new(rules.into_iter().collect()), pred)
}

//! Exhaustive checkers used to verify artifacts. Each one enumerates subsets
//! directly and shares no search code with the algorithms it audits.

use std::collections::BTreeSet;

use crate::closure_det::DetClosureOp;
use crate::closure_nondet::{NondetClosureOp, TreeFamily, TruncTree};
use crate::encoding::FinSet;
use crate::error::{Error, Result};
use crate::families::{Family, PropertyTag, SubfamilyIndex};
use crate::finite_character::FcPredicate;
use crate::zorn::FinPoset;

/// Largest ground set the exhaustive checkers accept.
pub const BRUTE_CAP: usize = 20;

fn guard(n: usize, what: &str) -> Result<()> {
    if n > BRUTE_CAP {
        return Err(Error::InputTooLarge(format!("{what} has {n} elements, over {BRUTE_CAP}")));
    }
    Ok(())
}

fn pick<T: Copy>(items: &[T], mask: u64) -> Vec<T> {
    (0..items.len()).filter(|&b| mask >> b & 1 == 1).map(|b| items[b]).collect()
}

fn common(sets: &[&FinSet]) -> bool {
    match sets.split_first() {
        None => true,
        Some((first, rest)) => first.iter().any(|x| rest.iter().all(|s| s.contains(x))),
    }
}

/// One representative index per extensionally distinct member.
fn classes(fam: &Family, idx: &[usize]) -> Vec<usize> {
    let mut seen: Vec<&FinSet> = Vec::new();
    let mut out = Vec::new();
    for &i in idx {
        let m = &fam.members()[i];
        if !seen.contains(&m) {
            seen.push(m);
            out.push(i);
        }
    }
    out
}

/// The property evaluated over every subset of distinct members.
pub fn property_holds(fam: &Family, idx: &[usize], p: PropertyTag) -> bool {
    let reps = classes(fam, idx);
    let sets: Vec<&FinSet> = reps.iter().map(|&i| &fam.members()[i]).collect();
    (0u64..1 << sets.len()).all(|mask| {
        let chosen = pick(&sets, mask);
        match p {
            PropertyTag::Dn(n) => chosen.len() != n || !common(&chosen),
            PropertyTag::DbarN(n) => chosen.len() != n || common(&chosen),
            PropertyTag::F => chosen.len() < 2 || common(&chosen),
        }
    })
}

/// `sub` has the property and no subfamily properly containing it does.
pub fn family_maximal(fam: &Family, sub: &SubfamilyIndex, p: PropertyTag) -> Result<bool> {
    if let Some(&bad) = sub.indices.iter().find(|&&i| i >= fam.len()) {
        return Err(Error::BadIndex { index: bad, len: fam.len() });
    }
    if !property_holds(fam, &sub.indices, p) {
        return Ok(false);
    }
    let inside: BTreeSet<&FinSet> = sub.indices.iter().map(|&i| &fam.members()[i]).collect();
    let all: Vec<usize> = (0..fam.len()).collect();
    let outside: Vec<usize> = classes(fam, &all).into_iter().filter(|&i| !inside.contains(&fam.members()[i])).collect();
    guard(outside.len(), "the complement of the subfamily")?;
    Ok((1u64..1 << outside.len()).all(|mask| {
        let mut idx = sub.indices.clone();
        idx.extend(pick(&outside, mask));
        !property_holds(fam, &idx, p)
    }))
}

fn supersets_within(b: &FinSet, a: &FinSet) -> Result<impl Iterator<Item = FinSet>> {
    let extra: Vec<u64> = a.difference(b).copied().collect();
    guard(extra.len(), "the free part")?;
    let b = b.clone();
    Ok((1u64..1 << extra.len()).map(move |mask| {
        let mut c = b.clone();
        c.extend(pick(&extra, mask));
        c
    }))
}

/// `b ⊆ a`, `pred(b)`, and no `c` with `b ⊊ c ⊆ a` satisfies `pred`.
pub fn fcp_maximal(pred: &FcPredicate, a: &FinSet, b: &FinSet) -> Result<bool> {
    if !b.is_subset(a) || !pred.eval(b) {
        return Ok(false);
    }
    Ok(supersets_within(b, a)?.all(|c| !pred.eval(&c)))
}

fn det_closed(op: &DetClosureOp, x: &FinSet) -> bool {
    op.rules.iter().all(|r| !r.from.iter().all(|e| x.contains(e)) || x.contains(&r.to))
}

/// `c ⊆ b ⊆ a`, `b` closed with `pred(b)`, and no closed proper superset
/// inside `a` satisfies `pred`.
pub fn ce_maximal(op: &DetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet, b: &FinSet) -> Result<bool> {
    if !c.is_subset(b) || !b.is_subset(a) || !det_closed(op, b) || !pred.eval(b) {
        return Ok(false);
    }
    Ok(supersets_within(b, a)?.all(|x| !(det_closed(op, &x) && pred.eval(&x))))
}

fn nondet_closed(op: &NondetClosureOp, x: &FinSet) -> bool {
    op.rules().iter().all(|r| !r.from.iter().all(|e| x.contains(e)) || r.choices.iter().any(|e| x.contains(e)))
}

/// The nondeterministic analogue of [`ce_maximal`].
pub fn nce_maximal(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet, b: &FinSet) -> Result<bool> {
    if !c.is_subset(b) || !b.is_subset(a) || !nondet_closed(op, b) || !pred.eval(b) {
        return Ok(false);
    }
    Ok(supersets_within(b, a)?.all(|x| !(nondet_closed(op, &x) && pred.eval(&x))))
}

/// Every closed, predicate-satisfying `X` with `c ⊆ X ⊆ a` that is maximal.
pub fn nce_maximal_sets(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet) -> Result<Vec<FinSet>> {
    if !c.is_subset(a) {
        return Ok(Vec::new());
    }
    let good: Vec<FinSet> = std::iter::once(c.clone())
        .chain(supersets_within(c, a)?)
        .filter(|x| nondet_closed(op, x) && pred.eval(x))
        .collect();
    Ok(good.iter().filter(|x| !good.iter().any(|y| x.is_subset(y) && x != &y)).cloned().collect())
}

/// Maximal down-closed sets in which any two elements have an upper bound inside.
pub fn maximal_ideals(p: &FinPoset) -> Result<Vec<FinSet>> {
    let n = p.size();
    guard(n, "the poset")?;
    let ideals: Vec<FinSet> = (1u64..1 << n)
        .filter(|&mask| {
            let has = |x: usize| mask >> x & 1 == 1;
            let down = (0..n).all(|k| !has(k) || (0..n).all(|j| !p.leq(j, k) || has(j)));
            let directed = (0..n).all(|j| (0..n).all(|k| !(has(j) && has(k)) || (0..n).any(|l| has(l) && p.leq(j, l) && p.leq(k, l))));
            down && directed
        })
        .map(|mask| (0..n as u64).filter(|&x| mask >> x & 1 == 1).collect())
        .collect();
    Ok(ideals.iter().filter(|x| !ideals.iter().any(|y| x.is_subset(y) && x != &y)).cloned().collect())
}

fn reaches(t: &TruncTree, depth: usize) -> bool {
    depth == 0 || t.children.iter().any(|c| reaches(c, depth - 1))
}

/// Trees with a node at the full depth.
pub fn trees_with_paths(family: &TreeFamily) -> BTreeSet<usize> {
    family.trees.iter().enumerate().filter(|(_, t)| reaches(t, family.depth)).map(|(i, _)| i).collect()
}

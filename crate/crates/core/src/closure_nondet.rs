//! Nondeterministic finitary closure operators (choice rules `⟨F, S⟩`).

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::encoding::FinSet;
use crate::error::{Error, Result};
use crate::finite_character::{require_finite_character, FcPredicate};
use crate::zorn::FinPoset;

pub const EXACT_CAP: usize = 22;
pub const DEFAULT_SEARCH_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NondetRule {
    pub from: FinSet,
    pub choices: FinSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OpDoc {
    rules: Vec<NondetRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "OpDoc", into = "OpDoc")]
pub struct NondetClosureOp {
    rules: Vec<NondetRule>,
}

impl TryFrom<OpDoc> for NondetClosureOp {
    type Error = Error;

    fn try_from(doc: OpDoc) -> Result<Self> {
        NondetClosureOp::new(doc.rules)
    }
}

impl From<NondetClosureOp> for OpDoc {
    fn from(op: NondetClosureOp) -> Self {
        OpDoc { rules: op.rules }
    }
}

impl NondetClosureOp {
    pub fn new(rules: Vec<NondetRule>) -> Result<Self> {
        if let Some(r) = rules.iter().position(|r| r.choices.is_empty()) {
            return Err(Error::BadInput(format!("rule {r} has no choices")));
        }
        Ok(NondetClosureOp { rules })
    }

    pub fn rules(&self) -> &[NondetRule] {
        &self.rules
    }

    pub fn rule(from: &[u64], choices: &[u64]) -> NondetRule {
        NondetRule { from: from.iter().copied().collect(), choices: choices.iter().copied().collect() }
    }

    fn first_violated(&self, x: &FinSet) -> Option<usize> {
        self.rules.iter().position(|r| r.from.is_subset(x) && r.choices.is_disjoint(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NVerdict {
    Closed,
    Violated { rule: usize },
}

pub fn is_nclosed(op: &NondetClosureOp, x: &FinSet) -> NVerdict {
    match op.first_violated(x) {
        Some(rule) => NVerdict::Violated { rule },
        None => NVerdict::Closed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exact,
    Greedy,
}

fn check_seed(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet) -> Result<()> {
    if !c.is_subset(a) {
        return Err(Error::BadSeed("seed is not contained in A".into()));
    }
    if let NVerdict::Violated { rule } = is_nclosed(op, c) {
        return Err(Error::BadSeed(format!("seed violates rule {rule}")));
    }
    if !pred.eval(c) {
        return Err(Error::BadSeed(format!("seed fails {}", pred.label)));
    }
    require_finite_character(pred, a)
}

/// A maximal closed, predicate-satisfying `B` with `C ⊆ B ⊆ A`.
///
/// Exact mode enumerates every candidate and returns the maximal one of least
/// canonical index. Greedy mode scans `A ∖ C` upward and keeps a witness
/// completion, adjoining `i` only when some closed completion contains it.
pub fn max_nclosed_extension(
    op: &NondetClosureOp,
    pred: &FcPredicate,
    a: &FinSet,
    c: &FinSet,
    mode: SearchMode,
) -> Result<FinSet> {
    check_seed(op, pred, a, c)?;
    match mode {
        SearchMode::Exact => exact_max(op, pred, a, c),
        SearchMode::Greedy => greedy_max(op, pred, a, c, DEFAULT_SEARCH_BUDGET),
    }
}

/// Local view of the rules over the free elements `A ∖ C` as bitmasks.
struct MaskRules {
    free: Vec<u64>,
    rules: Vec<(u32, u32)>,
}

impl MaskRules {
    fn new(op: &NondetClosureOp, a: &FinSet, c: &FinSet) -> Result<Self> {
        let free: Vec<u64> = a.difference(c).copied().collect();
        if free.len() > EXACT_CAP {
            return Err(Error::InputTooLarge(format!(
                "exact search supports |A \\ C| <= {EXACT_CAP}, got {}",
                free.len()
            )));
        }
        let bit = |e: &u64| free.binary_search(e).ok().map(|b| 1u32 << b);
        let rules = op
            .rules
            .iter()
            .filter(|r| r.from.is_subset(a) && r.choices.is_disjoint(c))
            .map(|r| {
                let fm = r.from.iter().filter_map(bit).fold(0, |m, b| m | b);
                let cm = r.choices.iter().filter_map(bit).fold(0, |m, b| m | b);
                (fm, cm)
            })
            .collect();
        Ok(MaskRules { free, rules })
    }

    fn closed(&self, mask: u32) -> bool {
        self.rules.iter().all(|&(fm, cm)| mask & fm != fm || mask & cm != 0)
    }

    fn set(&self, c: &FinSet, mask: u32) -> FinSet {
        let mut x = c.clone();
        x.extend(self.free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e));
        x
    }
}

/// Indicator of closed, predicate-satisfying masks over `A ∖ C`.
fn good_masks(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet) -> Result<(MaskRules, Vec<bool>)> {
    let mr = MaskRules::new(op, a, c)?;
    let k = mr.free.len();
    let good = (0u32..1 << k).map(|m| mr.closed(m) && pred.eval(&mr.set(c, m))).collect();
    Ok((mr, good))
}

/// Masks with a strictly larger good superset, via a superset-OR transform.
fn dominated(good: &[bool], k: usize) -> Vec<bool> {
    let mut up = good.to_vec();
    for b in 0..k {
        for m in 0..up.len() {
            if m >> b & 1 == 0 && up[m | 1 << b] {
                up[m] = true;
            }
        }
    }
    (0..good.len()).map(|m| (0..k).any(|b| m >> b & 1 == 0 && up[m | 1 << b])).collect()
}

fn exact_max(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet) -> Result<FinSet> {
    let (mr, good) = good_masks(op, pred, a, c)?;
    let dom = dominated(&good, mr.free.len());
    // mask order is canonical order of the sets, since C is fixed
    let best = (0..good.len()).find(|&m| good[m] && !dom[m]).expect("the seed itself is good");
    Ok(mr.set(c, best as u32))
}

/// Every maximal closed, predicate-satisfying `B` with `C ⊆ B ⊆ A`, in
/// canonical order.
pub fn all_maximal_extensions(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet) -> Result<Vec<FinSet>> {
    let (mr, good) = good_masks(op, pred, a, c)?;
    let dom = dominated(&good, mr.free.len());
    Ok((0..good.len()).filter(|&m| good[m] && !dom[m]).map(|m| mr.set(c, m as u32)).collect())
}

/// Every closed `X` with `C ⊆ X ⊆ A` that is minimal under inclusion.
pub fn minimal_closed_supersets(op: &NondetClosureOp, a: &FinSet, c: &FinSet) -> Result<Vec<FinSet>> {
    let mr = MaskRules::new(op, a, c)?;
    let k = mr.free.len();
    let closed: Vec<bool> = (0u32..1 << k).map(|m| mr.closed(m)).collect();
    let mut down = closed.clone();
    for b in 0..k {
        for m in 0..down.len() {
            if m >> b & 1 == 1 && down[m ^ 1 << b] {
                down[m] = true;
            }
        }
    }
    Ok((0..closed.len())
        .filter(|&m| closed[m] && !(0..k).any(|b| m >> b & 1 == 1 && down[m ^ 1 << b]))
        .map(|m| mr.set(c, m as u32))
        .collect())
}

enum Completion {
    Found(FinSet),
    Absent,
}

/// Depth-first search for a closed, predicate-satisfying `Y` with
/// `must ⊆ Y ⊆ A`, branching on the choices of the first violated rule.
struct CompletionSearch<'a> {
    op: &'a NondetClosureOp,
    pred: &'a FcPredicate,
    a: &'a FinSet,
    failed: HashSet<FinSet>,
    budget: usize,
}

impl<'a> CompletionSearch<'a> {
    fn new(op: &'a NondetClosureOp, pred: &'a FcPredicate, a: &'a FinSet, budget: usize) -> Self {
        CompletionSearch { op, pred, a, failed: HashSet::new(), budget }
    }

    fn run(&mut self, must: FinSet) -> Result<Completion> {
        if self.failed.contains(&must) || !self.pred.eval(&must) {
            return Ok(Completion::Absent);
        }
        if self.budget == 0 {
            return Err(Error::InputTooLarge("completion search exceeded its node budget".into()));
        }
        self.budget -= 1;
        let Some(r) = self.op.first_violated(&must) else {
            return Ok(Completion::Found(must));
        };
        let options: Vec<u64> = self.op.rules[r].choices.intersection(self.a).copied().collect();
        for choice in options {
            let mut next = must.clone();
            next.insert(choice);
            if let Completion::Found(y) = self.run(next)? {
                return Ok(Completion::Found(y));
            }
        }
        self.failed.insert(must);
        Ok(Completion::Absent)
    }
}

fn greedy_max(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, c: &FinSet, budget: usize) -> Result<FinSet> {
    let mut search = CompletionSearch::new(op, pred, a, budget);
    let mut witness = c.clone();
    for &i in a.difference(c) {
        if witness.contains(&i) {
            continue;
        }
        let mut must = witness.clone();
        must.insert(i);
        if let Completion::Found(y) = search.run(must)? {
            witness = y;
        }
    }
    Ok(witness)
}

/// Whether `b` admits no closed, predicate-satisfying proper extension in `a`.
pub fn is_maximal_extension(op: &NondetClosureOp, pred: &FcPredicate, a: &FinSet, b: &FinSet) -> Result<bool> {
    if !b.is_subset(a) || op.first_violated(b).is_some() || !pred.eval(b) {
        return Ok(false);
    }
    let mut search = CompletionSearch::new(op, pred, a, DEFAULT_SEARCH_BUDGET);
    for &i in a.difference(b) {
        let mut must = b.clone();
        must.insert(i);
        if let Completion::Found(_) = search.run(must)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truncation of the operator with no minimal closed set: `(∅, {0..k})` and
/// `({i}, {i+1..k})` for `i < k`.
pub fn no_minimum_operator(k: u64) -> NondetClosureOp {
    let mut rules = vec![NondetRule { from: FinSet::new(), choices: (0..=k).collect() }];
    rules.extend((0..k).map(|i| NondetRule { from: FinSet::from([i]), choices: (i + 1..=k).collect() }));
    NondetClosureOp { rules }
}

/// Single-target variant: `(∅, {0..k})` and `({i}, {j})` for `i < j ≤ k`.
pub fn no_minimum_operator_pointwise(k: u64) -> NondetClosureOp {
    let mut rules = vec![NondetRule { from: FinSet::new(), choices: (0..=k).collect() }];
    for i in 0..k {
        rules.extend((i + 1..=k).map(|j| NondetRule { from: FinSet::from([i]), choices: FinSet::from([j]) }));
    }
    NondetClosureOp { rules }
}

/// Down rules, join-choice rules where an upper bound exists, identity rules
/// otherwise; the predicate asks for common upper bounds.
pub fn poset_ideal_encoding(p: &FinPoset) -> (NondetClosureOp, FcPredicate) {
    let n = p.size();
    let mut rules = BTreeSet::new();
    for j in 0..n {
        for k in 0..n {
            if p.leq(j, k) {
                rules.insert(NondetClosureOp::rule(&[k as u64], &[j as u64]));
            }
        }
    }
    for j in 0..n {
        for k in j..n {
            let ubs: Vec<u64> = (0..n).filter(|&l| p.leq(j, l) && p.leq(k, l)).map(|l| l as u64).collect();
            if ubs.is_empty() {
                rules.insert(NondetClosureOp::rule(&[j as u64], &[j as u64]));
            } else {
                rules.insert(NondetClosureOp::rule(&[j as u64, k as u64], &ubs));
            }
        }
    }
    let order = p.clone();
    let pred = FcPredicate::new("pairs have common upper bounds", n as u64, move |x| {
        let xs: Vec<usize> = x.iter().map(|&e| e as usize).collect();
        xs.iter().all(|&j| j < n)
            && xs.iter().all(|&j| xs.iter().all(|&k| (0..n).any(|l| order.leq(j, l) && order.leq(k, l))))
    });
    (NondetClosureOp { rules: rules.into_iter().collect() }, pred)
}

/// A finite tree given by nested child lists.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncTree {
    pub children: Vec<TruncTree>,
}

impl TruncTree {
    pub fn leaf() -> Self {
        TruncTree::default()
    }

    pub fn node(children: Vec<TruncTree>) -> Self {
        TruncTree { children }
    }

    /// Complete tree with `branching` children per node down to `depth`.
    pub fn full(branching: usize, depth: usize) -> Self {
        if depth == 0 {
            return TruncTree::leaf();
        }
        TruncTree::node(vec![TruncTree::full(branching, depth - 1); branching])
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFamily {
    pub depth: usize,
    pub trees: Vec<TruncTree>,
}

/// Node of an encoded tree family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedNode {
    pub id: u64,
    pub tree: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeEncoding {
    pub universe: FinSet,
    pub op: NondetClosureOp,
    pub z: u64,
    pub roots: Vec<u64>,
    pub nodes: Vec<EncodedNode>,
    pub depth: usize,
}

impl TreeEncoding {
    /// `z ∉ X`.
    pub fn predicate(&self) -> FcPredicate {
        let z = self.z;
        let bound = self.universe.last().copied().unwrap_or(0) + 1;
        FcPredicate::structural(format!("{z} not in X"), bound, move |x| !x.contains(&z))
    }
}

/// Encodes the trees as a choice operator over node ids; `z = 0` and the
/// nodes are numbered from 1 in preorder.
pub fn tree_encoding(family: &TreeFamily) -> Result<TreeEncoding> {
    if family.trees.is_empty() {
        return Err(Error::BadInput("tree list is empty".into()));
    }
    let z = 0u64;
    let mut nodes = Vec::new();
    let mut rules = Vec::new();
    let mut roots = Vec::new();
    for (t, tree) in family.trees.iter().enumerate() {
        if tree.height() > family.depth {
            return Err(Error::BadInput(format!("tree {t} is deeper than {}", family.depth)));
        }
        roots.push(nodes.len() as u64 + 1);
        encode_node(t, tree, Vec::new(), family.depth, z, &mut nodes, &mut rules);
    }
    let universe = std::iter::once(z).chain(nodes.iter().map(|n: &EncodedNode| n.id)).collect();
    Ok(TreeEncoding { universe, op: NondetClosureOp { rules }, z, roots, nodes, depth: family.depth })
}

fn encode_node(
    tree: usize,
    node: &TruncTree,
    path: Vec<usize>,
    depth: usize,
    z: u64,
    nodes: &mut Vec<EncodedNode>,
    rules: &mut Vec<NondetRule>,
) {
    let id = nodes.len() as u64 + 1;
    let len = path.len();
    nodes.push(EncodedNode { id, tree, path: path.clone() });
    let mut child_ids = FinSet::new();
    for (k, child) in node.children.iter().enumerate() {
        child_ids.insert(nodes.len() as u64 + 1);
        let mut p = path.clone();
        p.push(k);
        encode_node(tree, child, p, depth, z, nodes, rules);
    }
    if len < depth {
        let choices = if child_ids.is_empty() { FinSet::from([z]) } else { child_ids };
        rules.push(NondetRule { from: FinSet::from([id]), choices });
    }
}

/// `{i : root_i ∈ B}`, after confirming `B` is a maximal closed set
/// avoiding `z`.
pub fn decode_paths(b: &FinSet, enc: &TreeEncoding) -> Result<BTreeSet<usize>> {
    if !is_maximal_extension(&enc.op, &enc.predicate(), &enc.universe, b)? {
        return Err(Error::NotMaximal("set is not a maximal closed subset avoiding z".into()));
    }
    Ok(enc.roots.iter().enumerate().filter(|(_, r)| b.contains(r)).map(|(i, _)| i).collect())
}

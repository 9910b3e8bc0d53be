//! Finite-character predicates as oracles, the greedy maximal subset, minimal
//! removal and the sequential gadget.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::encoding::{canonical_cmp, FinSet};
use crate::error::{Error, Result};

pub const EXHAUSTIVE_UNIVERSE_CAP: u64 = 20;
const REMOVAL_SEARCH_CAP: usize = 24;

type Oracle = Arc<dyn Fn(&FinSet) -> bool + Send + Sync>;

/// A predicate on finite subsets of `{0..universe_bound-1}`.
#[derive(Clone)]
pub struct FcPredicate {
    oracle: Oracle,
    pub universe_bound: u64,
    pub label: String,
    /// Subset-closed by construction; operations skip the exhaustive check.
    pub structural: bool,
}

impl fmt::Debug for FcPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FcPredicate").field("label", &self.label).field("universe_bound", &self.universe_bound).finish()
    }
}

impl FcPredicate {
    pub fn new(label: impl Into<String>, universe_bound: u64, f: impl Fn(&FinSet) -> bool + Send + Sync + 'static) -> Self {
        FcPredicate { oracle: Arc::new(f), universe_bound, label: label.into(), structural: false }
    }

    /// A predicate whose finite character is known from its form.
    pub fn structural(
        label: impl Into<String>,
        universe_bound: u64,
        f: impl Fn(&FinSet) -> bool + Send + Sync + 'static,
    ) -> Self {
        FcPredicate { structural: true, ..FcPredicate::new(label, universe_bound, f) }
    }

    pub fn always(universe_bound: u64) -> Self {
        FcPredicate::structural("true", universe_bound, |_| true)
    }

    pub fn eval(&self, x: &FinSet) -> bool {
        (self.oracle)(x)
    }
}

/// Built-in predicate language used by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PredSpec {
    True,
    /// No element is divisible by `by`.
    NotDivisible { by: u64 },
    /// Every element is divisible by `by`.
    Divisible { by: u64 },
    /// `X ⊆ set`.
    MemberOf { set: BTreeSet<u64> },
    /// `X ∩ set = ∅`.
    Avoid { set: BTreeSet<u64> },
    MaxCard { k: usize },
    /// `X = ∅` or `element ∈ X`; not subset-closed in general.
    EmptyOrContains { element: u64 },
    And { of: Vec<PredSpec> },
    Or { of: Vec<PredSpec> },
}

impl PredSpec {
    pub fn eval(&self, x: &FinSet) -> bool {
        match self {
            PredSpec::True => true,
            PredSpec::NotDivisible { by } => x.iter().all(|v| *by == 0 || v % by != 0),
            PredSpec::Divisible { by } => x.iter().all(|v| *by != 0 && v % by == 0),
            PredSpec::MemberOf { set } => x.is_subset(set),
            PredSpec::Avoid { set } => x.is_disjoint(set),
            PredSpec::MaxCard { k } => x.len() <= *k,
            PredSpec::EmptyOrContains { element } => x.is_empty() || x.contains(element),
            PredSpec::And { of } => of.iter().all(|p| p.eval(x)),
            PredSpec::Or { of } => of.iter().any(|p| p.eval(x)),
        }
    }

    /// Every form except `empty_or_contains` is subset-closed.
    pub fn is_structural(&self) -> bool {
        match self {
            PredSpec::EmptyOrContains { .. } => false,
            PredSpec::And { of } | PredSpec::Or { of } => of.iter().all(PredSpec::is_structural),
            _ => true,
        }
    }

    pub fn into_predicate(self, universe_bound: u64) -> FcPredicate {
        let label = serde_json::to_string(&self).unwrap_or_default();
        let structural = self.is_structural();
        FcPredicate { structural, ..FcPredicate::new(label, universe_bound, move |x| self.eval(x)) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FcVerdict {
    Ok,
    /// `smaller ⊆ larger`, the predicate holds of `larger` but not `smaller`.
    Violation { smaller: FinSet, larger: FinSet },
}

fn mask_set(elements: &[u64], mask: u64) -> FinSet {
    elements.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect()
}

fn check_over(pred: &FcPredicate, elements: &[u64]) -> FcVerdict {
    if !pred.eval(&FinSet::new()) {
        return FcVerdict::Violation { smaller: FinSet::new(), larger: FinSet::new() };
    }
    let n = elements.len();
    let mut holds = vec![false; 1 << n];
    holds[0] = true;
    for mask in 1u64..1 << n {
        let g = mask_set(elements, mask);
        holds[mask as usize] = pred.eval(&g);
        if !holds[mask as usize] {
            continue;
        }
        // single removals suffice: they generate every subset
        for b in 0..n {
            if mask >> b & 1 == 1 && !holds[(mask ^ (1 << b)) as usize] {
                return FcVerdict::Violation { smaller: mask_set(elements, mask ^ (1 << b)), larger: g };
            }
        }
    }
    FcVerdict::Ok
}

/// Exhaustive subset-closure check over `{0..universe_bound-1}`.
pub fn check_finite_character(pred: &FcPredicate) -> Result<FcVerdict> {
    if pred.universe_bound > EXHAUSTIVE_UNIVERSE_CAP {
        return Err(Error::InputTooLarge(format!(
            "universe bound {} exceeds {EXHAUSTIVE_UNIVERSE_CAP}",
            pred.universe_bound
        )));
    }
    let elements: Vec<u64> = (0..pred.universe_bound).collect();
    Ok(check_over(pred, &elements))
}

/// Checks `pred` is of finite character on the subsets that matter for `a`:
/// the whole universe when small enough, otherwise the subsets of `a`.
pub(crate) fn require_finite_character(pred: &FcPredicate, a: &FinSet) -> Result<()> {
    if let Some(&e) = a.iter().find(|&&e| e >= pred.universe_bound) {
        return Err(Error::BadInput(format!("element {e} lies outside the universe {}", pred.universe_bound)));
    }
    if pred.structural {
        return Ok(());
    }
    let verdict = if pred.universe_bound <= EXHAUSTIVE_UNIVERSE_CAP {
        check_finite_character(pred)?
    } else if a.len() as u64 <= EXHAUSTIVE_UNIVERSE_CAP {
        check_over(pred, &a.iter().copied().collect::<Vec<_>>())
    } else {
        return Ok(());
    };
    match verdict {
        FcVerdict::Ok => Ok(()),
        FcVerdict::Violation { smaller, larger } => Err(Error::NotFiniteCharacter(format!(
            "{} holds of {larger:?} but not of {smaller:?}",
            pred.label
        ))),
    }
}

/// Scans `a` upward keeping each element the predicate still admits.
pub fn fcp_greedy_max(pred: &FcPredicate, a: &FinSet) -> Result<FinSet> {
    require_finite_character(pred, a)?;
    let mut kept = FinSet::new();
    for &x in a {
        kept.insert(x);
        if !pred.eval(&kept) {
            kept.remove(&x);
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub kept: FinSet,
    pub removed: FinSet,
}

/// Least removal set (by size, then canonical index) leaving a set where
/// `pred` holds.
pub fn sigma1_minimal_removal(pred: &FcPredicate, a: &FinSet) -> Result<Removal> {
    if a.len() > REMOVAL_SEARCH_CAP {
        return Err(Error::InputTooLarge(format!("removal search supports |A| <= {REMOVAL_SEARCH_CAP}")));
    }
    for k in 0..=a.len() {
        let mut candidates: Vec<FinSet> = a.iter().copied().combinations(k).map(|c| c.into_iter().collect()).collect();
        candidates.sort_by(canonical_cmp);
        for removed in candidates {
            let kept: FinSet = a.difference(&removed).copied().collect();
            if pred.eval(&kept) {
                return Ok(Removal { kept, removed });
            }
        }
    }
    Err(Error::NoMaximalSubset)
}

/// `B_i = {i}` if `i ∈ range(f)` and `∅` otherwise.
pub fn sequential_gadget(f: &[u64], count: usize) -> Result<Vec<FinSet>> {
    let mut seen = BTreeSet::new();
    if let Some(v) = f.iter().find(|&&v| !seen.insert(v)) {
        return Err(Error::BadInput(format!("f is not injective: value {v} repeats")));
    }
    Ok((0..count as u64).map(|i| if seen.contains(&i) { FinSet::from([i]) } else { FinSet::new() }).collect())
}

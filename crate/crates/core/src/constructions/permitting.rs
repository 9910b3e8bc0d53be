//! Permitting: a limit approximation `M[s]` of copies `⟨i,n⟩` that may only
//! lose a copy when the enumeration `W` changes below it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::encoding::{pair, unpair, FinSet};
use crate::error::{Error, Result};
use crate::families::{Family, SubfamilyIndex};

/// `W` as the elements enumerated at each stage; stages past the end add nothing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StagedEnumeration {
    pub stages: Vec<Vec<u64>>,
}

impl StagedEnumeration {
    pub fn empty() -> Self {
        StagedEnumeration::default()
    }

    /// `W[s]`: everything enumerated by the end of stage `s`.
    pub fn at(&self, s: u64) -> BTreeSet<u64> {
        let end = usize::try_from(s).map_or(self.stages.len(), |s| (s + 1).min(self.stages.len()));
        self.stages[..end].iter().flatten().copied().collect()
    }

    /// `W[s+1] − W[s]`.
    pub fn added(&self, s: u64) -> BTreeSet<u64> {
        let before = self.at(s);
        self.at(s + 1).difference(&before).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermitStage {
    pub stage: u64,
    /// Codes `⟨i,n⟩` in `M[stage]`.
    pub m: Vec<u64>,
    pub added: Option<u64>,
    pub removed: Vec<u64>,
    pub candidate: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermitRun {
    pub history: Vec<PermitStage>,
    pub indices: SubfamilyIndex,
}

fn copies(m: &BTreeSet<u64>) -> Vec<(usize, u64)> {
    let mut v: Vec<(usize, u64)> = m.iter().map(|&c| (c, unpair(c).0 as usize)).map(|(c, i)| (i, c)).collect();
    v.sort_unstable();
    v
}

fn meets_below(fam: &Family, sets: &[&FinSet], s: u64) -> bool {
    let Some((first, rest)) = sets.split_first() else { return fam.horizon() > 0 };
    first.range(..=s).any(|x| rest.iter().all(|r| r.contains(x)))
}

/// `ℓ(i,s)`.
fn ell(fam: &Family, held: &[(usize, u64)], i: usize, s: u64) -> Option<usize> {
    let mut sets: Vec<&FinSet> = vec![&fam.members()[i]];
    let mut best = None;
    for &(j, _) in held {
        sets.push(&fam.members()[j]);
        if !meets_below(fam, &sets, s) {
            break;
        }
        best = Some(j);
    }
    best
}

/// Replays stages `0..=stages`.
pub fn permitting_run(fam: &Family, w: &StagedEnumeration, stages: u64) -> Result<PermitRun> {
    if fam.member(0).map_or(true, |m| m.is_empty()) {
        return Err(Error::BadInput("member 0 must be nonempty".into()));
    }
    let mut m: BTreeSet<u64> = BTreeSet::from([pair(0, 0)?]);
    let mut history = vec![PermitStage { stage: 0, m: m.iter().copied().collect(), added: Some(pair(0, 0)?), removed: vec![], candidate: None }];
    for s in 0..stages {
        let held = copies(&m);
        let holders: BTreeSet<usize> = held.iter().map(|&(i, _)| i).collect();
        let added_w = w.added(s);
        let top = usize::try_from(s).unwrap_or(usize::MAX).min(fam.len() - 1);
        let mut chosen = None;
        for i in (0..=top).filter(|i| !holders.contains(i)) {
            let Some(l) = ell(fam, &held, i, s) else { continue };
            if holders.iter().any(|&j| l < j && j < i) {
                continue;
            }
            let permitted = held.iter().filter(|&&(j, _)| j > l).all(|&(_, code)| added_w.iter().any(|&x| x < code));
            if permitted {
                chosen = Some((i, l));
                break;
            }
        }
        let mut entry = PermitStage { stage: s + 1, m: vec![], added: None, removed: vec![], candidate: None };
        if let Some((i, l)) = chosen {
            let floor = m.iter().chain(added_w.iter()).copied().max();
            let removed: Vec<u64> = held.iter().filter(|&&(j, _)| j > l).map(|&(_, c)| c).collect();
            for c in &removed {
                m.remove(c);
            }
            let mut n = 0;
            let code = loop {
                let c = pair(i as u64, n)?;
                if floor.is_none_or(|f| c > f) {
                    break c;
                }
                n += 1;
            };
            m.insert(code);
            entry.added = Some(code);
            entry.removed = removed;
            entry.candidate = Some(i);
        }
        entry.m = m.iter().copied().collect();
        history.push(entry);
    }
    let indices = copies(&m).into_iter().map(|(i, _)| i).collect();
    Ok(PermitRun { history, indices: SubfamilyIndex::new(indices) })
}

/// Every transition and stage the run must respect; empty when all hold.
/// Removals need a change of `W` below the removed copy; `⟨0,0⟩` persists;
/// each index holds at most one copy; each `M[s]` has a common element.
pub fn permit_violations(fam: &Family, w: &StagedEnumeration, run: &PermitRun) -> Vec<String> {
    let mut bad = Vec::new();
    let zero = pair(0, 0).expect("small");
    for pair_of in run.history.windows(2) {
        let (before, after) = (&pair_of[0], &pair_of[1]);
        let added_w = w.added(before.stage);
        let after_set: BTreeSet<u64> = after.m.iter().copied().collect();
        for &code in before.m.iter().filter(|c| !after_set.contains(c)) {
            if !added_w.iter().any(|&x| x < code) {
                bad.push(format!("copy {code} removed at stage {} without permission", after.stage));
            }
        }
    }
    for st in &run.history {
        if !st.m.contains(&zero) {
            bad.push(format!("stage {} lost the copy of 0", st.stage));
        }
        let held: Vec<usize> = st.m.iter().map(|&c| unpair(c).0 as usize).collect();
        if held.iter().collect::<BTreeSet<_>>().len() != held.len() {
            bad.push(format!("stage {} holds two copies of one index", st.stage));
        }
        if fam.joint(&held).is_none_or(|j| j.is_empty()) {
            bad.push(format!("stage {} has empty joint intersection", st.stage));
        }
    }
    bad
}

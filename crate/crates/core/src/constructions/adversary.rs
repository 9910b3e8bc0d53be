//! The diagonalizing adversary: a stage construction of a family whose maximal
//! D̄_2-subfamilies escape domination by every listed strategy.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::strategy::{StrategyOracle, StrategyTable};
use super::transcript::Transcript;
use crate::encoding::FinSet;
use crate::error::{Error, Result};
use crate::families::{has_property, Family, PropertyTag, PropertyVerdict, SubfamilyIndex};

/// Truncation knobs. `None` everywhere replays the construction without caps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdversaryConfig {
    /// Longest bounded string considered.
    pub max_string_len: Option<usize>,
    /// Bounded strings considered per enumeration; also caps followers per substage.
    pub string_cap: Option<usize>,
    /// Substages run per stage (`e < max_substages`).
    pub max_substages: Option<u64>,
}

impl AdversaryConfig {
    pub fn capped(max_string_len: usize, string_cap: usize, max_substages: u64) -> Self {
        AdversaryConfig {
            max_string_len: Some(max_string_len),
            string_cap: Some(string_cap),
            max_substages: Some(max_substages),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Follower {
    pub e: usize,
    pub n: u64,
    pub value: u64,
    /// 1 or 2.
    pub kind: u8,
    pub string: Vec<u64>,
    pub stage: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversaryRun {
    pub family: Family,
    pub transcript: Transcript,
    pub targets: BTreeMap<usize, u64>,
    pub followers: Vec<Follower>,
    pub final_stage: u64,
}

struct Bounded {
    strings: Vec<Vec<u64>>,
    capped: bool,
}

struct State<'a> {
    strategies: &'a [StrategyTable],
    config: &'a AdversaryConfig,
    stage: u64,
    odds: HashMap<u64, FinSet>,
    pair_witness: HashMap<(u64, u64), u64>,
    mentioned: u64,
    followers: Vec<Follower>,
    by_e: BTreeMap<usize, Vec<usize>>,
    by_value: HashMap<u64, usize>,
    targets: BTreeMap<usize, u64>,
    transcript: Transcript,
    capped_this_stage: BTreeSet<&'static str>,
}

impl<'a> State<'a> {
    fn new(strategies: &'a [StrategyTable], config: &'a AdversaryConfig) -> Self {
        State {
            strategies,
            config,
            stage: 0,
            odds: HashMap::new(),
            pair_witness: HashMap::new(),
            mentioned: 0,
            followers: Vec::new(),
            by_e: BTreeMap::new(),
            by_value: HashMap::new(),
            targets: BTreeMap::new(),
            transcript: Transcript::new(),
            capped_this_stage: BTreeSet::new(),
        }
    }

    fn fresh(&mut self) -> u64 {
        let v = self.stage.max(self.mentioned) + 1;
        self.mentioned = v;
        v
    }

    fn fresh_odd(&mut self) -> u64 {
        let mut v = self.stage.max(self.mentioned) + 1;
        if v.is_multiple_of(2) {
            v += 1;
        }
        self.mentioned = v;
        v
    }

    fn self_witness(&self, a: u64) -> u64 {
        let odd = self.odds.get(&a).and_then(|s| s.first().copied());
        odd.map_or(2 * a, |o| o.min(2 * a))
    }

    fn witness(&self, a: u64, b: u64) -> Option<u64> {
        if a == b {
            Some(self.self_witness(a))
        } else {
            self.pair_witness.get(&(a.min(b), a.max(b))).copied()
        }
    }

    fn meets(&self, a: u64, b: u64) -> bool {
        self.witness(a, b).is_some()
    }

    fn intersect(&mut self, a: u64, b: u64, substage: u64, step: u8) {
        if self.meets(a, b) {
            return;
        }
        let x = self.fresh_odd();
        self.odds.entry(a).or_default().insert(x);
        self.odds.entry(b).or_default().insert(x);
        self.pair_witness.insert((a.min(b), a.max(b)), x);
        self.transcript.push(self.stage, Some(substage), Some(step), "enumerate", json!({"element": x, "sets": [a, b]}));
    }

    fn note_cap(&mut self, kind: &'static str) {
        if self.capped_this_stage.insert(kind) {
            self.transcript.push(self.stage, None, None, "cap_engaged", json!({"kind": kind}));
        }
    }

    fn can_append(&self, sigma: &[u64], c: u64, t: u64) -> bool {
        self.self_witness(c) <= t && sigma.iter().all(|&a| self.witness(a, c).is_some_and(|w| w <= t))
    }

    fn is_bounded(&self, sigma: &[u64], t: u64) -> bool {
        !sigma.is_empty()
            && sigma.len() as u64 <= t
            && sigma.iter().all(|&a| a <= t)
            && (0..sigma.len()).all(|i| self.can_append(&sigma[..i], sigma[i], t))
    }

    /// Strings bounded by `t` extending `prefix` (prefix included), in shortlex order.
    fn bounded_strings(&self, t: u64, prefix: &[u64]) -> Bounded {
        let cap = self.config.string_cap.unwrap_or(usize::MAX);
        let mut max_len = usize::try_from(t).unwrap_or(usize::MAX);
        if let Some(m) = self.config.max_string_len {
            max_len = max_len.min(m);
        }
        let mut out = Vec::new();
        let mut level: Vec<Vec<u64>> = if prefix.is_empty() {
            vec![Vec::new()]
        } else if self.is_bounded(prefix, t) && prefix.len() <= max_len {
            out.push(prefix.to_vec());
            vec![prefix.to_vec()]
        } else {
            return Bounded { strings: out, capped: false };
        };
        let alphabet: Vec<u64> = (0..=t).filter(|&a| self.self_witness(a) <= t).collect();
        let mut len = prefix.len();
        while len < max_len && !level.is_empty() {
            let mut next = Vec::new();
            for sigma in &level {
                for &c in &alphabet {
                    if self.can_append(sigma, c, t) {
                        if out.len() >= cap {
                            return Bounded { strings: out, capped: true };
                        }
                        let mut ext = sigma.clone();
                        ext.push(c);
                        out.push(ext.clone());
                        next.push(ext);
                    }
                }
            }
            level = next;
            len += 1;
        }
        Bounded { strings: out, capped: false }
    }

    fn record_bounded(&mut self, b: &Bounded) {
        if b.capped {
            self.note_cap("string_cap");
        }
    }

    fn run_stage(&mut self) {
        let s = self.stage;
        let mut substages = s + 1;
        if let Some(m) = self.config.max_substages {
            if m < substages {
                substages = m;
                self.note_cap("substages");
            }
        }
        if self.config.max_string_len.is_some_and(|m| (m as u64) < s) {
            self.note_cap("max_string_len");
        }
        let bounded = self.bounded_strings(s, &[]);
        self.record_bounded(&bounded);
        for e in 0..substages {
            let e = e as usize;
            self.step1(e);
            let born_before = self.followers.len();
            self.step2(e, &bounded.strings);
            self.step3(e, &bounded.strings, born_before);
            self.step4(e);
        }
        self.transcript.push(s, None, Some(5), "finalize", json!({"settled_below": self.mentioned + 1}));
    }

    fn convergence(&self, e: usize, x: u64) -> Option<u64> {
        self.strategies.get(e).and_then(|t| t.convergence_stage(x))
    }

    fn step1(&mut self, e: usize) {
        let s = self.stage;
        match self.targets.get(&e).copied() {
            None => {
                let v = self.fresh();
                self.targets.insert(e, v);
                self.transcript.push(s, Some(e as u64), Some(1), "target_defined", json!({"e": e, "value": v}));
            }
            Some(old) if self.convergence(e, 0) == Some(s) => {
                let v = self.fresh();
                self.targets.insert(e, v);
                self.transcript.push(s, Some(e as u64), Some(1), "target_redefined", json!({"e": e, "old": old, "value": v}));
                let ids = self.by_e.get(&e).cloned().unwrap_or_default();
                for id in ids {
                    if self.followers[id].kind == 1 {
                        self.followers[id].kind = 2;
                        let f = &self.followers[id];
                        self.transcript.push(s, Some(e as u64), Some(1), "follower_retyped", json!({"e": e, "n": f.n, "value": f.value}));
                    }
                }
            }
            Some(_) => {}
        }
    }

    fn step2(&mut self, e: usize, bounded: &[Vec<u64>]) {
        let s = self.stage;
        let te = self.targets[&e];
        for sigma in bounded {
            let n = self.by_e.get(&e).map_or(0, |v| v.len() as u64);
            let value = self.fresh();
            let kind = if sigma.contains(&te) { 1 } else { 2 };
            self.transcript.push(
                s,
                Some(e as u64),
                Some(2),
                "follower",
                json!({"e": e, "n": n, "value": value, "type": kind, "string": sigma}),
            );
            let id = self.followers.len();
            self.followers.push(Follower { e, n, value, kind, string: sigma.clone(), stage: s });
            self.by_e.entry(e).or_default().push(id);
            self.by_value.insert(value, id);
            for &a in sigma {
                self.intersect(value, a, e as u64, 2);
            }
        }
    }

    fn step3(&mut self, e: usize, bounded: &[Vec<u64>], born_before: usize) {
        let s = self.stage;
        let te = self.targets[&e];
        let ids: Vec<usize> = self
            .by_e
            .get(&e)
            .map(|v| v.iter().copied().filter(|&id| id < born_before && self.followers[id].stage < s).collect())
            .unwrap_or_default();
        let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for id in ids {
            groups.entry(self.followers[id].string.clone()).or_default().push(id);
        }
        for (string, members) in groups {
            for sigma in bounded.iter().filter(|sig| sig.starts_with(&string)) {
                let avoids_target = !sigma.contains(&te);
                for &id in &members {
                    let (value, kind) = (self.followers[id].value, self.followers[id].kind);
                    if kind == 1 || avoids_target {
                        for &a in sigma {
                            self.intersect(value, a, e as u64, 3);
                        }
                    }
                }
            }
        }
    }

    /// Least `k` in `|lo|..|hi|` where `hi(k)` is a follower of `j` for some
    /// `τ` with `lo ⪯ τ ≺ hi`.
    fn link(&self, lo: &[u64], hi: &[u64], j: usize) -> Option<usize> {
        (lo.len()..hi.len()).find(|&k| {
            self.by_value.get(&hi[k]).is_some_and(|&id| {
                let f = &self.followers[id];
                f.e == j && f.string.len() >= lo.len() && f.string.len() < hi.len() && hi.starts_with(&f.string)
            })
        })
    }

    fn step4(&mut self, e: usize) {
        let s = self.stage;
        let Some(table) = self.strategies.get(e) else { return };
        let prefix = table.converged_prefix(s);
        if prefix.is_empty() {
            return;
        }
        let x = prefix.len() - 1;
        let stages: Vec<u64> = (0..=x as u64).map(|i| table.convergence_stage(i).expect("converged")).collect();
        if stages[x] != s {
            return;
        }
        // viable strings at level i, each with the least k^σ over its chains
        let first = self.bounded_strings(stages[0], &[]);
        self.record_bounded(&first);
        let mut level: BTreeMap<Vec<u64>, Option<usize>> =
            first.strings.into_iter().filter(|sig| sig.len() == 1).map(|sig| (sig, None)).collect();
        for i in 0..x {
            let mut next: BTreeMap<Vec<u64>, Option<usize>> = BTreeMap::new();
            for lo in level.keys() {
                let ext = self.bounded_strings(stages[i + 1], lo);
                if ext.capped {
                    self.note_cap("string_cap");
                }
                for hi in ext.strings.into_iter().filter(|h| h.len() > lo.len()) {
                    if (0..=i).all(|j| self.link(lo, &hi, j).is_some()) {
                        let k = if i + 1 == x && x > e { self.link(lo, &hi, e) } else { None };
                        let slot = next.entry(hi).or_insert(k);
                        if let (Some(old), Some(new)) = (*slot, k) {
                            *slot = Some(old.min(new));
                        }
                    }
                }
            }
            level = next;
        }
        if level.is_empty() {
            return;
        }
        let te = self.targets[&e];
        let mut ks = Vec::with_capacity(level.len());
        for (sigma, k) in &level {
            let Some(k) = *k else { return };
            if self.meets(sigma[k], te) {
                return;
            }
            ks.push(sigma[k]);
        }
        let mut plan = Vec::with_capacity(level.len());
        for (sigma, k) in &level {
            let k = k.expect("checked above");
            let mut best = None;
            for i in 0..k {
                let is_follower = self.by_value.get(&sigma[i]).is_some_and(|&id| self.followers[id].e == e);
                if is_follower && !self.meets(sigma[i], te) && sigma[..=i].iter().all(|v| !ks.contains(v)) {
                    best = Some(i);
                }
            }
            match best {
                Some(i) => plan.push(sigma[..=i].to_vec()),
                None => return,
            }
        }
        self.transcript.push(s, Some(e as u64), Some(4), "acceptable", json!({"e": e, "x": x, "viable": level.len()}));
        for head in plan {
            for a in head {
                self.intersect(a, te, e as u64, 4);
            }
        }
    }

    fn into_run(self) -> Result<AdversaryRun> {
        let top = self.mentioned;
        let members = (0..=top)
            .map(|i| {
                let mut m = self.odds.get(&i).cloned().unwrap_or_default();
                m.insert(2 * i);
                m
            })
            .collect();
        let family = Family::new(2 * (top + 1), members)?;
        Ok(AdversaryRun {
            family,
            transcript: self.transcript,
            targets: self.targets,
            followers: self.followers,
            final_stage: self.stage,
        })
    }
}

/// Replays stages `0..stages` against the given strategies.
pub fn adversary_run(strategies: &[StrategyTable], stages: u64, config: &AdversaryConfig) -> Result<AdversaryRun> {
    if stages == 0 {
        return Err(Error::BadInput("at least one stage is required".into()));
    }
    for (e, t) in strategies.iter().enumerate() {
        t.validate(e)?;
    }
    let mut st = State::new(strategies, config);
    for s in 0..stages {
        st.stage = s;
        st.capped_this_stage.clear();
        st.run_stage();
    }
    st.into_run()
}

/// Runs against arbitrary oracles by tabulating them up to `stages`.
pub fn adversary_run_oracles(oracles: &[&dyn StrategyOracle], stages: u64, config: &AdversaryConfig) -> Result<AdversaryRun> {
    let tables: Vec<StrategyTable> = oracles.iter().map(|o| StrategyTable::probe(*o, stages)).collect();
    adversary_run(&tables, stages, config)
}

/// Every invariant the transcript and family must satisfy; empty when all hold.
pub fn invariant_violations(run: &AdversaryRun) -> Vec<String> {
    let mut bad = Vec::new();
    let mut last_fresh: Option<u64> = None;
    let mut next_n: BTreeMap<u64, u64> = BTreeMap::new();
    let mut redefs: BTreeMap<u64, u32> = BTreeMap::new();
    for ev in run.transcript.events() {
        let p = &ev.payload;
        let fresh = match ev.event.as_str() {
            "target_defined" | "target_redefined" | "follower" => p["value"].as_u64(),
            "enumerate" => p["element"].as_u64(),
            _ => None,
        };
        if let Some(v) = fresh {
            if last_fresh.is_some_and(|l| v <= l) {
                bad.push(format!("fresh number {v} at stage {} does not increase", ev.stage));
            }
            last_fresh = Some(v);
        }
        match ev.event.as_str() {
            "follower" => {
                let e = p["e"].as_u64().unwrap_or(u64::MAX);
                let n = p["n"].as_u64().unwrap_or(u64::MAX);
                let want = next_n.entry(e).or_insert(0);
                if n != *want {
                    bad.push(format!("follower ({e},{n}) born out of order, expected n = {want}"));
                }
                *want = n + 1;
            }
            "target_redefined" => {
                let e = p["e"].as_u64().unwrap_or(u64::MAX);
                let c = redefs.entry(e).or_insert(0);
                *c += 1;
                if *c > 1 {
                    bad.push(format!("target of {e} redefined {c} times"));
                }
            }
            "enumerate" => {
                if !matches!(ev.step, Some(2..=4)) {
                    bad.push(format!("enumeration at stage {} cites step {:?}", ev.stage, ev.step));
                }
                if p["element"].as_u64().is_none_or(|x| x % 2 == 0) {
                    bad.push(format!("enumerated element {} is not odd", p["element"]));
                }
            }
            _ => {}
        }
    }
    for (i, m) in run.family.members().iter().enumerate() {
        let evens: Vec<u64> = m.iter().copied().filter(|x| x % 2 == 0).collect();
        if evens != [2 * i as u64] {
            bad.push(format!("member {i} has even elements {evens:?}"));
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    PropertyFailure { members: Vec<usize> },
    TargetMissed { target: u64, witnesses: Vec<(usize, u64)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AuditVerdict {
    Diagonalized { evidence: Evidence },
    Inconclusive,
}

/// Final target of strategy `e` according to the transcript.
pub fn final_target(transcript: &Transcript, e: usize) -> Option<u64> {
    transcript
        .events()
        .iter()
        .filter(|ev| matches!(ev.event.as_str(), "target_defined" | "target_redefined"))
        .filter(|ev| ev.payload["e"].as_u64() == Some(e as u64))
        .filter_map(|ev| ev.payload["value"].as_u64())
        .next_back()
}

/// Checks the two contradiction patterns against a candidate subfamily `j`.
pub fn adversary_audit(transcript: &Transcript, fam: &Family, j: &SubfamilyIndex, e: usize) -> Result<AuditVerdict> {
    if let PropertyVerdict::Fails { members, .. } = has_property(fam, j, PropertyTag::DbarN(2))? {
        return Ok(AuditVerdict::Diagonalized { evidence: Evidence::PropertyFailure { members } });
    }
    let Some(t) = final_target(transcript, e) else { return Ok(AuditVerdict::Inconclusive) };
    let Ok(t_idx) = usize::try_from(t) else { return Ok(AuditVerdict::Inconclusive) };
    if j.indices.is_empty() || j.indices.contains(&t_idx) || t_idx >= fam.len() {
        return Ok(AuditVerdict::Inconclusive);
    }
    let target = fam.member(t_idx)?;
    let mut witnesses = Vec::new();
    for &i in &j.indices {
        match fam.member(i)?.intersection(target).next() {
            Some(&x) => witnesses.push((i, x)),
            None => return Ok(AuditVerdict::Inconclusive),
        }
    }
    Ok(AuditVerdict::Diagonalized { evidence: Evidence::TargetMissed { target: t, witnesses } })
}

/// The subfamily a strategy induces: its converged values in argument order.
pub fn induced_prefix(table: &StrategyTable, stage: u64) -> SubfamilyIndex {
    SubfamilyIndex::new(table.converged_prefix(stage).into_iter().map(|v| v as usize).collect())
}

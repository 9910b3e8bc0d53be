//! Truncated set families, intersection properties, the greedy maximal
//! subfamily, the tilde transform and the range-coding family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::encoding::{canonical_cmp, FinSet};
use crate::error::{Error, Result};

/// One member of a family, truncated below `horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedSet {
    pub elements: Vec<u64>,
    pub horizon: u64,
}

impl BoundedSet {
    pub fn new(elements: Vec<u64>, horizon: u64) -> Result<Self> {
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::BadInput("elements must be strictly increasing".into()));
        }
        if let Some(&e) = elements.iter().find(|&&e| e >= horizon) {
            return Err(Error::BadInput(format!("element {e} is not below horizon {horizon}")));
        }
        Ok(BoundedSet { elements, horizon })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyDoc {
    horizon: u64,
    members: Vec<Vec<u64>>,
}

/// An indexed sequence of sets sharing one horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyDoc", into = "FamilyDoc")]
pub struct Family {
    horizon: u64,
    members: Vec<FinSet>,
}

impl TryFrom<FamilyDoc> for Family {
    type Error = Error;

    fn try_from(doc: FamilyDoc) -> Result<Self> {
        let mut members = Vec::with_capacity(doc.members.len());
        for (i, m) in doc.members.into_iter().enumerate() {
            let set: FinSet = m.iter().copied().collect();
            if set.len() != m.len() {
                return Err(Error::BadInput(format!("member {i} repeats an element")));
            }
            members.push(set);
        }
        Family::new(doc.horizon, members)
    }
}

impl From<Family> for FamilyDoc {
    fn from(f: Family) -> Self {
        FamilyDoc {
            horizon: f.horizon,
            members: f.members.into_iter().map(|m| m.into_iter().collect()).collect(),
        }
    }
}

impl Family {
    pub fn new(horizon: u64, members: Vec<FinSet>) -> Result<Self> {
        for (i, m) in members.iter().enumerate() {
            if let Some(&e) = m.last().filter(|&&e| e >= horizon) {
                return Err(Error::BadInput(format!(
                    "member {i} has element {e} at or beyond horizon {horizon}"
                )));
            }
        }
        Ok(Family { horizon, members })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FinSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> Result<&FinSet> {
        self.members.get(i).ok_or(Error::BadIndex { index: i, len: self.members.len() })
    }

    pub fn bounded(&self, i: usize) -> Result<BoundedSet> {
        Ok(BoundedSet { elements: self.member(i)?.iter().copied().collect(), horizon: self.horizon })
    }

    pub fn is_nontrivial(&self) -> bool {
        self.members.iter().any(|m| !m.is_empty())
    }

    /// Intersection of the listed members; the empty list yields `None`.
    pub fn joint(&self, indices: &[usize]) -> Option<FinSet> {
        let (first, rest) = indices.split_first()?;
        let mut acc = self.members[*first].clone();
        for &i in rest {
            acc.retain(|x| self.members[i].contains(x));
            if acc.is_empty() {
                break;
            }
        }
        Some(acc)
    }

    /// Least element common to all listed members.
    pub fn joint_min(&self, indices: &[usize]) -> Option<u64> {
        let (first, rest) = indices.split_first()?;
        self.members[*first]
            .iter()
            .copied()
            .find(|x| rest.iter().all(|&i| self.members[i].contains(x)))
    }

    fn check_sub(&self, sub: &SubfamilyIndex) -> Result<()> {
        match sub.indices.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(Error::BadIndex { index, len: self.len() }),
            None => Ok(()),
        }
    }

    /// Indices of the extensionally distinct members of `sub`, first
    /// occurrence kept.
    pub fn distinct(&self, indices: &[usize]) -> Vec<usize> {
        let mut seen: BTreeSet<&FinSet> = BTreeSet::new();
        indices.iter().copied().filter(|&i| seen.insert(&self.members[i])).collect()
    }
}

/// An index map `J` selecting the subfamily `⟨A_{J(i)}⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SubfamilyIndex {
    pub indices: Vec<usize>,
}

impl SubfamilyIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        SubfamilyIndex { indices }
    }
}

impl From<Vec<usize>> for SubfamilyIndex {
    fn from(indices: Vec<usize>) -> Self {
        SubfamilyIndex { indices }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PropertyTag {
    Dn(usize),
    DbarN(usize),
    F,
}

impl fmt::Display for PropertyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyTag::Dn(n) => write!(f, "D{n}"),
            PropertyTag::DbarN(n) => write!(f, "Dbar{n}"),
            PropertyTag::F => write!(f, "F"),
        }
    }
}

impl FromStr for PropertyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadInput(format!("unknown property {s:?}; expected F, D<n> or Dbar<n>"));
        let tag = if s == "F" {
            PropertyTag::F
        } else if let Some(n) = s.strip_prefix("Dbar") {
            PropertyTag::DbarN(n.parse().map_err(|_| bad())?)
        } else if let Some(n) = s.strip_prefix('D') {
            PropertyTag::Dn(n.parse().map_err(|_| bad())?)
        } else {
            return Err(bad());
        };
        match tag {
            PropertyTag::Dn(n) | PropertyTag::DbarN(n) if n < 2 => {
                Err(Error::BadInput(format!("property {s}: n must be at least 2")))
            }
            t => Ok(t),
        }
    }
}

impl TryFrom<String> for PropertyTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PropertyTag> for String {
    fn from(p: PropertyTag) -> Self {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PropertyVerdict {
    /// `witness` is the least element of the joint intersection, if any.
    Holds { witness: Option<u64> },
    /// Distinct members whose intersection violates the property.
    Fails { members: Vec<usize>, common_element: Option<u64> },
    Vacuous,
}

impl PropertyVerdict {
    pub fn is_ok(&self) -> bool {
        !matches!(self, PropertyVerdict::Fails { .. })
    }
}

pub fn sets_distinct(fam: &Family, i: usize, j: usize) -> Result<bool> {
    Ok(fam.member(i)? != fam.member(j)?)
}

pub fn has_property(fam: &Family, sub: &SubfamilyIndex, p: PropertyTag) -> Result<PropertyVerdict> {
    fam.check_sub(sub)?;
    let distinct = fam.distinct(&sub.indices);
    Ok(verdict_on_distinct(fam, &distinct, p))
}

fn verdict_on_distinct(fam: &Family, distinct: &[usize], p: PropertyTag) -> PropertyVerdict {
    match p {
        PropertyTag::Dn(n) => {
            if distinct.len() < n {
                return PropertyVerdict::Vacuous;
            }
            let mut holders: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for &i in distinct {
                for &x in &fam.members[i] {
                    holders.entry(x).or_default().push(i);
                }
            }
            match holders.into_iter().find(|(_, h)| h.len() >= n) {
                Some((x, h)) => PropertyVerdict::Fails {
                    members: h.into_iter().take(n).collect(),
                    common_element: Some(x),
                },
                None => PropertyVerdict::Holds { witness: None },
            }
        }
        PropertyTag::DbarN(n) => {
            if distinct.len() < n {
                return PropertyVerdict::Vacuous;
            }
            for combo in distinct.iter().copied().combinations(n) {
                if fam.joint_min(&combo).is_none() {
                    return PropertyVerdict::Fails { members: combo, common_element: None };
                }
            }
            PropertyVerdict::Holds { witness: fam.joint_min(distinct) }
        }
        PropertyTag::F => {
            if distinct.len() < 2 {
                return PropertyVerdict::Vacuous;
            }
            if let Some(w) = fam.joint_min(distinct) {
                return PropertyVerdict::Holds { witness: Some(w) };
            }
            // shrink to an inclusion-minimal failing tuple
            let mut failing = distinct.to_vec();
            let mut k = 0;
            while k < failing.len() {
                if failing.len() > 2 {
                    let mut trial = failing.clone();
                    trial.remove(k);
                    if fam.joint_min(&trial).is_none() {
                        failing = trial;
                        continue;
                    }
                }
                k += 1;
            }
            PropertyVerdict::Fails { members: failing, common_element: None }
        }
    }
}

/// Incremental membership test used by the greedy scan: holds the distinct
/// members chosen so far and answers whether one more keeps the property.
struct Accumulator<'a> {
    fam: &'a Family,
    p: PropertyTag,
    distinct: Vec<usize>,
    joint: Option<FinSet>,
    counts: BTreeMap<u64, usize>,
}

impl<'a> Accumulator<'a> {
    fn new(fam: &'a Family, p: PropertyTag) -> Self {
        Accumulator { fam, p, distinct: Vec::new(), joint: None, counts: BTreeMap::new() }
    }

    fn is_duplicate(&self, j: usize) -> bool {
        self.distinct.iter().any(|&i| self.fam.members[i] == self.fam.members[j])
    }

    fn admits(&self, j: usize) -> bool {
        let a = &self.fam.members[j];
        match self.p {
            PropertyTag::Dn(n) => a.iter().all(|x| self.counts.get(x).copied().unwrap_or(0) + 1 < n),
            PropertyTag::DbarN(n) => {
                if self.distinct.len() + 1 < n {
                    return true;
                }
                self.distinct.iter().copied().combinations(n - 1).all(|mut c| {
                    c.push(j);
                    self.fam.joint_min(&c).is_some()
                })
            }
            PropertyTag::F => match &self.joint {
                None => true,
                Some(acc) => acc.iter().any(|x| a.contains(x)),
            },
        }
    }

    fn push(&mut self, j: usize) {
        let a = &self.fam.members[j];
        for &x in a {
            *self.counts.entry(x).or_default() += 1;
        }
        self.joint = Some(match self.joint.take() {
            None => a.clone(),
            Some(acc) => acc.intersection(a).copied().collect(),
        });
        self.distinct.push(j);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyOutcome {
    pub indices: Vec<usize>,
    pub exhausted: bool,
}

/// Scans `start..` keeping each member that preserves `p`. Members equal to
/// one already kept are skipped.
pub fn greedy_max_subfamily(fam: &Family, p: PropertyTag, start: Option<usize>) -> Result<GreedyOutcome> {
    greedy_max_subfamily_limited(fam, p, start, None)
}

/// As [`greedy_max_subfamily`], stopping once `cap` members are chosen; the
/// outcome then reports `exhausted = false`.
pub fn greedy_max_subfamily_limited(
    fam: &Family,
    p: PropertyTag,
    start: Option<usize>,
    cap: Option<usize>,
) -> Result<GreedyOutcome> {
    let start = start.unwrap_or(0);
    if start >= fam.len() {
        return Err(Error::EmptyResult);
    }
    let mut acc = Accumulator::new(fam, p);
    for j in start..fam.len() {
        if cap.is_some_and(|c| acc.distinct.len() >= c) {
            return Ok(GreedyOutcome { indices: acc.distinct, exhausted: false });
        }
        if !acc.is_duplicate(j) && acc.admits(j) {
            acc.push(j);
        }
    }
    if acc.distinct.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(GreedyOutcome { indices: acc.distinct, exhausted: true })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MaximalityVerdict {
    Maximal,
    Extendable { k: usize },
}

/// Single-addition maximality test; exact since each property passes to
/// subfamilies.
pub fn is_maximal(fam: &Family, sub: &SubfamilyIndex, p: PropertyTag) -> Result<MaximalityVerdict> {
    if let PropertyVerdict::Fails { members, .. } = has_property(fam, sub, p)? {
        return Err(Error::NotAProperty(format!("{p} fails on members {members:?}")));
    }
    let distinct = fam.distinct(&sub.indices);
    let present: BTreeSet<&FinSet> = distinct.iter().map(|&i| &fam.members[i]).collect();
    for k in 0..fam.len() {
        if present.contains(&fam.members[k]) {
            continue;
        }
        let mut trial = distinct.clone();
        trial.push(k);
        if verdict_on_distinct(fam, &trial, p).is_ok() {
            return Ok(MaximalityVerdict::Extendable { k });
        }
    }
    Ok(MaximalityVerdict::Maximal)
}

const TILDE_MEMBER_CAP: usize = 20;

/// Runs the staged construction of `Ã` for `stages` stages.
///
/// Every qualifying `F` receives its own fresh odd number at every stage it
/// qualifies; fresh odds are drawn from one increasing counter.
pub fn tilde_transform(fam: &Family, n: usize, stages: u64) -> Result<Family> {
    if n < 2 {
        return Err(Error::BadInput("tilde transform needs n >= 2".into()));
    }
    let m = fam.len();
    if m > TILDE_MEMBER_CAP {
        return Err(Error::InputTooLarge(format!(
            "tilde transform supports at most {TILDE_MEMBER_CAP} members, got {m}"
        )));
    }
    // thr[mask]: least s such that every n-subset of mask meets at or below s
    let full = 1usize << m;
    let mut thr = vec![u64::MAX; full];
    for mask in 0..full {
        let size = mask.count_ones() as usize;
        if size < n {
            continue;
        }
        thr[mask] = if size == n {
            let idx: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).collect();
            fam.joint_min(&idx).unwrap_or(u64::MAX)
        } else {
            (0..m).filter(|b| mask >> b & 1 == 1).map(|b| thr[mask ^ (1 << b)]).max().unwrap_or(u64::MAX)
        };
    }
    let mut members: Vec<FinSet> = (0..m as u64).map(|i| FinSet::from([2 * i])).collect();
    let mut next_odd = 1u64;
    for s in 0..stages {
        let window = (s as usize).min(m.saturating_sub(1));
        let limit = if m == 0 { 0 } else { 1usize << (window + 1) };
        let mut qualifying: Vec<FinSet> = (0..limit)
            .filter(|&mask| mask.count_ones() as usize > n && thr[mask] <= s)
            .map(|mask| (0..m as u64).filter(|&b| mask >> b & 1 == 1).collect())
            .collect();
        qualifying.sort_by(canonical_cmp);
        for f in qualifying {
            for &i in &f {
                members[i as usize].insert(next_odd);
            }
            next_odd += 2;
        }
    }
    let horizon = (2 * m as u64).max(next_odd);
    Family::new(horizon, members)
}

/// `A_i = {2i} ∪ {2x+1 : ∃y ≤ x. f(y) = i}` truncated below `horizon`.
pub fn range_coding_family(f: &[u64], member_count: usize, horizon: u64) -> Result<Family> {
    let mut seen = BTreeSet::new();
    if let Some(dup) = f.iter().find(|&&v| !seen.insert(v)) {
        return Err(Error::BadInput(format!("f is not injective: value {dup} repeats")));
    }
    if member_count > 0 && horizon < 2 * member_count as u64 - 1 {
        return Err(Error::BadInput(format!(
            "horizon {horizon} cannot hold the even tag of member {}",
            member_count - 1
        )));
    }
    let members = (0..member_count as u64)
        .map(|i| {
            let mut a = FinSet::from([2 * i]);
            if let Some(y) = f.iter().position(|&v| v == i) {
                a.extend((y as u64..).map(|x| 2 * x + 1).take_while(|&o| o < horizon));
            }
            a
        })
        .collect();
    Family::new(horizon, members)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeDecode {
    pub decoded: BTreeSet<u64>,
    /// Indices in the subfamily that still carry odd elements (D_n only).
    pub exceptions: BTreeSet<u64>,
}

/// Reads `range(f)` back off a maximal subfamily of a range-coding family.
pub fn decode_range(fam: &Family, sub: &SubfamilyIndex, p: PropertyTag) -> Result<RangeDecode> {
    fam.check_sub(sub)?;
    let tags: BTreeSet<u64> =
        sub.indices.iter().flat_map(|&i| fam.members[i].iter().copied().filter(|x| x % 2 == 0)).map(|x| x / 2).collect();
    match p {
        PropertyTag::F | PropertyTag::DbarN(_) => {
            if let Some(&index) = sub.indices.iter().find(|&&i| fam.members[i].len() <= 1) {
                return Err(Error::DegenerateMaximalFamily { index });
            }
            Ok(RangeDecode { decoded: tags, exceptions: BTreeSet::new() })
        }
        PropertyTag::Dn(_) => {
            let decoded = (0..fam.len() as u64).filter(|i| !tags.contains(i)).collect();
            let exceptions = tags
                .into_iter()
                .filter(|&i| (i as usize) < fam.len() && fam.members[i as usize].iter().any(|x| x % 2 == 1))
                .collect();
            Ok(RangeDecode { decoded, exceptions })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(horizon: u64, members: &[&[u64]]) -> Family {
        Family::new(horizon, members.iter().map(|m| m.iter().copied().collect()).collect()).unwrap()
    }

    fn coding() -> Family {
        range_coding_family(&[5, 3], 6, 12).unwrap()
    }

    fn set(xs: &[u64]) -> FinSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn distinctness() {
        let f = fam(8, &[&[0], &[0], &[2], &[4]]);
        assert!(!sets_distinct(&f, 0, 1).unwrap());
        assert!(sets_distinct(&f, 2, 3).unwrap());
        assert!(sets_distinct(&coding(), 0, 1).unwrap());
        assert_eq!(sets_distinct(&f, 0, 9), Err(Error::BadIndex { index: 9, len: 4 }));
    }

    #[test]
    fn coding_family_members() {
        let c = coding();
        assert_eq!(c.member(0).unwrap(), &set(&[0]));
        assert_eq!(c.member(5).unwrap(), &set(&[1, 3, 5, 7, 9, 10, 11]));
        assert_eq!(c.member(3).unwrap(), &set(&[3, 5, 6, 7, 9, 11]));
        assert!(matches!(range_coding_family(&[1, 1], 3, 12), Err(Error::BadInput(_))));
    }

    #[test]
    fn property_examples() {
        let copies = fam(2, &[&[0], &[0], &[0]]);
        assert_eq!(has_property(&copies, &vec![0, 1, 2].into(), PropertyTag::F).unwrap(), PropertyVerdict::Vacuous);
        let singles = fam(8, &[&[0], &[2], &[4], &[6]]);
        assert!(matches!(
            has_property(&singles, &vec![0, 1, 2, 3].into(), PropertyTag::Dn(2)).unwrap(),
            PropertyVerdict::Holds { .. }
        ));
        assert_eq!(
            has_property(&coding(), &vec![3, 5].into(), PropertyTag::DbarN(2)).unwrap(),
            PropertyVerdict::Holds { witness: Some(3) }
        );
    }

    #[test]
    fn failing_f_tuple_is_minimal() {
        // pairwise meeting, jointly empty
        let f = fam(8, &[&[1, 2], &[2, 3], &[1, 3], &[1, 2, 3]]);
        match has_property(&f, &vec![0, 1, 2, 3].into(), PropertyTag::F).unwrap() {
            PropertyVerdict::Fails { members, .. } => {
                assert_eq!(members.len(), 3);
                assert!(f.joint(&members).unwrap().is_empty());
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn greedy_examples() {
        let ones = fam(2, &[&[1], &[1], &[1]]);
        let g = greedy_max_subfamily(&ones, PropertyTag::F, None).unwrap();
        assert_eq!(g.indices, vec![0]);
        let g = greedy_max_subfamily(&coding(), PropertyTag::F, Some(3)).unwrap();
        assert_eq!(g, GreedyOutcome { indices: vec![3, 5], exhausted: true });
        let singles = fam(8, &[&[0], &[2], &[4]]);
        let g = greedy_max_subfamily(&singles, PropertyTag::DbarN(2), None).unwrap();
        assert_eq!(g, GreedyOutcome { indices: vec![0], exhausted: true });
        assert_eq!(greedy_max_subfamily(&singles, PropertyTag::F, Some(3)), Err(Error::EmptyResult));
        let capped = greedy_max_subfamily_limited(&singles, PropertyTag::Dn(2), None, Some(2)).unwrap();
        assert_eq!(capped, GreedyOutcome { indices: vec![0, 1], exhausted: false });
    }

    #[test]
    fn maximality_examples() {
        let c = coding();
        let all: SubfamilyIndex = (0..c.len()).collect::<Vec<_>>().into();
        assert_eq!(is_maximal(&c, &all, PropertyTag::Dn(6)).unwrap(), MaximalityVerdict::Maximal);
        assert_eq!(is_maximal(&c, &vec![3, 5].into(), PropertyTag::F).unwrap(), MaximalityVerdict::Maximal);
        assert_eq!(is_maximal(&c, &vec![3].into(), PropertyTag::F).unwrap(), MaximalityVerdict::Extendable { k: 5 });
        assert!(matches!(is_maximal(&c, &vec![0, 3].into(), PropertyTag::F), Err(Error::NotAProperty(_))));
    }

    #[test]
    fn tilde_examples() {
        // A_0 ∩ A_2 empty, so no triple qualifies
        let f = fam(8, &[&[1, 2], &[2, 3], &[3, 4]]);
        let t = tilde_transform(&f, 2, 10).unwrap();
        assert!(t.members().iter().all(|m| m.len() == 1));
        let g = fam(8, &[&[1, 2], &[1, 3], &[1, 4]]);
        let t = tilde_transform(&g, 2, 10).unwrap();
        assert!(t.joint_min(&[0, 1, 2]).is_some_and(|x| x % 2 == 1));
        let t0 = tilde_transform(&g, 2, 0).unwrap();
        assert_eq!(t0.members(), &[set(&[0]), set(&[2]), set(&[4])]);
    }

    #[test]
    fn decode_examples() {
        let c = coding();
        let d = decode_range(&c, &vec![3, 5].into(), PropertyTag::F).unwrap();
        assert_eq!(d.decoded, [3, 5].into());
        let empty = range_coding_family(&[], 4, 8).unwrap();
        let g = greedy_max_subfamily(&empty, PropertyTag::F, None).unwrap();
        assert!(matches!(
            decode_range(&empty, &g.indices.into(), PropertyTag::F),
            Err(Error::DegenerateMaximalFamily { .. })
        ));
        let g = greedy_max_subfamily(&c, PropertyTag::Dn(2), None).unwrap();
        let d = decode_range(&c, &g.indices.into(), PropertyTag::Dn(2)).unwrap();
        let union: BTreeSet<u64> = d.decoded.union(&d.exceptions).copied().collect();
        assert_eq!(union, [3, 5].into());
        assert!(d.exceptions.len() <= 1);
    }

    #[test]
    fn property_tag_parsing() {
        assert_eq!("Dbar3".parse::<PropertyTag>().unwrap(), PropertyTag::DbarN(3));
        assert_eq!("D2".parse::<PropertyTag>().unwrap(), PropertyTag::Dn(2));
        assert!("D1".parse::<PropertyTag>().is_err());
        assert!("G".parse::<PropertyTag>().is_err());
    }

    #[test]
    fn family_json_round_trip() {
        let c = coding();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.starts_with("{\"horizon\":12"));
        assert_eq!(serde_json::from_str::<Family>(&text).unwrap(), c);
        assert!(serde_json::from_str::<Family>(r#"{"horizon":3,"members":[[5]]}"#).is_err());
    }

    fn arb_family() -> impl Strategy<Value = Family> {
        (1u64..=64).prop_flat_map(|h| {
            proptest::collection::vec(proptest::collection::btree_set(0..h, 0..6), 1..=8)
                .prop_map(move |ms| Family::new(h, ms).unwrap())
        })
    }

    fn brute_maximal(fam: &Family, sub: &[usize], p: PropertyTag) -> bool {
        let present: BTreeSet<&FinSet> = sub.iter().map(|&i| &fam.members()[i]).collect();
        (0u32..1 << fam.len()).all(|mask| {
            let idx: Vec<usize> = (0..fam.len()).filter(|b| mask >> b & 1 == 1).collect();
            let sets: BTreeSet<&FinSet> = idx.iter().map(|&i| &fam.members()[i]).collect();
            let superset = present.is_subset(&sets) && sets.len() > present.len();
            !superset || !has_property(fam, &idx.into(), p).unwrap().is_ok()
        })
    }

    proptest! {
        #[test]
        fn single_addition_matches_brute(f in arb_family(), mask in 0u32..256, pi in 0usize..4) {
            let p = [PropertyTag::Dn(2), PropertyTag::DbarN(2), PropertyTag::DbarN(3), PropertyTag::F][pi];
            let idx: Vec<usize> = (0..f.len()).filter(|b| mask >> b & 1 == 1).collect();
            let sub: SubfamilyIndex = idx.clone().into();
            if has_property(&f, &sub, p).unwrap().is_ok() {
                let exact = brute_maximal(&f, &idx, p);
                prop_assert_eq!(is_maximal(&f, &sub, p).unwrap() == MaximalityVerdict::Maximal, exact);
            }
        }

        #[test]
        fn greedy_is_maximal(f in arb_family(), pi in 0usize..4) {
            let p = [PropertyTag::Dn(2), PropertyTag::DbarN(2), PropertyTag::DbarN(3), PropertyTag::F][pi];
            let g = greedy_max_subfamily(&f, p, None).unwrap();
            let sub: SubfamilyIndex = g.indices.into();
            prop_assert!(has_property(&f, &sub, p).unwrap().is_ok());
            prop_assert_eq!(is_maximal(&f, &sub, p).unwrap(), MaximalityVerdict::Maximal);
        }

        #[test]
        fn coding_even_law(f in proptest::collection::btree_set(0u64..8, 0..5), horizon in 16u64..40) {
            let f: Vec<u64> = f.into_iter().collect();
            let c = range_coding_family(&f, 8, horizon).unwrap();
            for (i, m) in c.members().iter().enumerate() {
                let evens: Vec<u64> = m.iter().copied().filter(|x| x % 2 == 0).collect();
                prop_assert_eq!(evens, vec![2 * i as u64]);
                prop_assert_eq!(m.len() == 1, !f.contains(&(i as u64)));
            }
        }
    }
}

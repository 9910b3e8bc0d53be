use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use choicelab::closure_det::{ce_greedy_max, cl, prime_gadget_decode, DetClosureOp, DetRule};
use choicelab::closure_nondet::{
    all_maximal_extensions, decode_paths, max_nclosed_extension, minimal_closed_supersets, no_minimum_operator,
    poset_ideal_encoding, tree_encoding, NondetClosureOp, SearchMode, TreeFamily, TruncTree,
};
use choicelab::constructions::adversary::{
    adversary_audit, adversary_run, induced_prefix, invariant_violations, AdversaryConfig, AuditVerdict,
};
use choicelab::constructions::escape::{escape_subfamily, witness_bound};
use choicelab::constructions::forcing::forcing_generic;
use choicelab::constructions::permitting::{permitting_run, StagedEnumeration};
use choicelab::constructions::pi01g::pi01_generic_run;
use choicelab::constructions::strategy::bundled_suite;
use choicelab::encoding::{canonical_cmp, unpair};
use choicelab::families::{
    decode_range, greedy_max_subfamily, has_property, is_maximal, range_coding_family, Family, MaximalityVerdict,
    PropertyTag, SubfamilyIndex,
};
use choicelab::finite_character::PredSpec;
use choicelab::oracles;
use choicelab::zorn::{zl1_climb, zl_reversal_decode, FinPoset};
use choicelab::{Error, FinSet};

/// Criteria that cannot hold as stated; they must still run and report FAIL.
const UNATTAINABLE: &[&str] = &["6b"];

type Outcome = Result<(), String>;

/// Id, name, time limit in seconds and check.
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_set(r: &mut ChaCha8Rng, bound: u64, density: f64) -> FinSet {
    (0..bound).filter(|_| r.random_bool(density)).collect()
}

fn random_family(r: &mut ChaCha8Rng, max_members: usize, max_horizon: u64) -> Family {
    let members = r.random_range(1..=max_members);
    let horizon = r.random_range(1..=max_horizon);
    let density = r.random_range(0.05..0.6);
    Family::new(horizon, (0..members).map(|_| random_set(r, horizon, density)).collect()).unwrap()
}

fn subsets_of(u: &[u64]) -> impl Iterator<Item = FinSet> + '_ {
    (0u64..1 << u.len()).map(move |m| (0..u.len()).filter(|b| m >> b & 1 == 1).map(|b| u[b]).collect())
}

fn injective_prefixes(len_max: usize, values: u64) -> Vec<Vec<u64>> {
    (0..=len_max).flat_map(|k| (0..values).permutations(k)).collect()
}

// 1

fn maximality_agreement() -> Outcome {
    let mut r = rng(1);
    let props = [PropertyTag::Dn(2), PropertyTag::DbarN(2), PropertyTag::DbarN(3), PropertyTag::F];
    for case in 0..200 {
        let fam = random_family(&mut r, 8, 64);
        for p in props {
            let out = greedy_max_subfamily(&fam, p, None).map_err(|e| format!("case {case} {p}: {e}"))?;
            let sub = SubfamilyIndex::new(out.indices);
            let ok = oracles::family_maximal(&fam, &sub, p).map_err(|e| e.to_string())?;
            ensure(ok, || format!("case {case} {p}: {:?} is not maximal in {:?}", sub.indices, fam.members()))?;
        }
    }
    Ok(())
}

// 2

fn range_decode() -> Outcome {
    for f in injective_prefixes(3, 6) {
        let fam = range_coding_family(&f, 6, 16).map_err(|e| e.to_string())?;
        let range: BTreeSet<u64> = f.iter().copied().collect();
        if f.is_empty() {
            let out = greedy_max_subfamily(&fam, PropertyTag::F, Some(0)).map_err(|e| e.to_string())?;
            let got = decode_range(&fam, &SubfamilyIndex::new(out.indices), PropertyTag::F);
            ensure(matches!(got, Err(Error::DegenerateMaximalFamily { .. })), || format!("f = []: {got:?}"))?;
            continue;
        }
        // members before the least non-singleton are disjoint singletons
        {
            let seed = *f.iter().min().expect("nonempty");
            let out = greedy_max_subfamily(&fam, PropertyTag::F, Some(seed as usize)).map_err(|e| e.to_string())?;
            let sub = SubfamilyIndex::new(out.indices);
            let maximal = oracles::family_maximal(&fam, &sub, PropertyTag::F).map_err(|e| e.to_string())?;
            ensure(maximal, || format!("f = {f:?}: seeded at {seed}, {:?} not maximal", sub.indices))?;
            let got = decode_range(&fam, &sub, PropertyTag::F).map_err(|e| e.to_string())?;
            ensure(got.decoded == range, || format!("f = {f:?}: F decode {:?}", got.decoded))?;
        }
        let out = greedy_max_subfamily(&fam, PropertyTag::Dn(2), None).map_err(|e| e.to_string())?;
        let got = decode_range(&fam, &SubfamilyIndex::new(out.indices), PropertyTag::Dn(2)).map_err(|e| e.to_string())?;
        let recovered: BTreeSet<u64> = got.decoded.union(&got.exceptions).copied().collect();
        ensure(recovered == range && got.decoded.is_disjoint(&got.exceptions) && got.exceptions.len() <= 1, || {
            format!("f = {f:?}: D2 decode {:?} with exceptions {:?}", got.decoded, got.exceptions)
        })?;
    }
    Ok(())
}

// 3

fn naive_fixpoint(rules: &[(u32, u32)], x: u32) -> u32 {
    let mut cur = x;
    loop {
        let next = rules.iter().fold(cur, |acc, &(from, to)| if from & !cur == 0 { acc | to } else { acc });
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn cl_laws() -> Outcome {
    let mut r = rng(3);
    for case in 0..400 {
        let universe = r.random_range(1..=8u64);
        let count = r.random_range(0..=6);
        let rules: Vec<DetRule> = (0..count)
            .map(|_| {
                let k = r.random_range(0..=3);
                let from: Vec<u64> = (0..k).map(|_| r.random_range(0..universe)).collect();
                DetClosureOp::rule(&from, r.random_range(0..universe))
            })
            .collect();
        let masks: Vec<(u32, u32)> = rules
            .iter()
            .map(|rule| (rule.from.iter().fold(0, |m, &e| m | 1 << e), 1 << rule.to))
            .collect();
        let op = DetClosureOp::new(rules);
        let full = 1u32 << universe;
        let mut table = vec![0u32; full as usize];
        for x in 0..full {
            let set: FinSet = (0..universe).filter(|b| x >> b & 1 == 1).collect();
            let got = cl(&op, &set, universe).map_err(|e| e.to_string())?;
            let got_mask = got.iter().fold(0u32, |m, &e| m | 1 << e);
            let want = naive_fixpoint(&masks, x);
            ensure(got_mask == want, || format!("case {case}: cl({set:?}) = {got:?}, fixpoint {want:#b}"))?;
            ensure(x & !got_mask == 0, || format!("case {case}: cl not extensive at {set:?}"))?;
            let again = cl(&op, &got, universe).map_err(|e| e.to_string())?;
            ensure(again == got, || format!("case {case}: cl not idempotent at {set:?}"))?;
            table[x as usize] = got_mask;
        }
        for y in 0..full {
            let mut x = y;
            loop {
                ensure(table[x as usize] & !table[y as usize] == 0, || format!("case {case}: cl not monotone"))?;
                if x == 0 {
                    break;
                }
                x = (x - 1) & y;
            }
        }
    }
    Ok(())
}

// 4

fn random_pred(r: &mut ChaCha8Rng, bound: u64) -> PredSpec {
    match r.random_range(0..5) {
        0 => PredSpec::True,
        1 => PredSpec::NotDivisible { by: r.random_range(2..=5) },
        2 => PredSpec::Avoid { set: random_set(r, bound, 0.15) },
        3 => PredSpec::MaxCard { k: r.random_range(1..=6) },
        _ => PredSpec::And { of: vec![PredSpec::MaxCard { k: r.random_range(2..=8) }, PredSpec::Avoid { set: random_set(r, bound, 0.1) }] },
    }
}

fn ce_maximality() -> Outcome {
    let mut r = rng(4);
    let bound = 16;
    let mut done = 0;
    while done < 100 {
        let rules: Vec<DetRule> = (0..r.random_range(0..=10))
            .map(|_| {
                let k = r.random_range(1..=3);
                let from: Vec<u64> = (0..k).map(|_| r.random_range(0..bound)).collect();
                DetClosureOp::rule(&from, r.random_range(0..bound))
            })
            .collect();
        let op = DetClosureOp::new(rules);
        let mut a = random_set(&mut r, bound, 0.6);
        while a.len() > 12 {
            let drop = *a.iter().nth(r.random_range(0..a.len())).unwrap();
            a.remove(&drop);
        }
        let pred = random_pred(&mut r, bound).into_predicate(bound);
        let b = ce_greedy_max(&op, &pred, &a, &FinSet::new()).map_err(|e| format!("instance {done}: {e}"))?;
        let ok = oracles::ce_maximal(&op, &pred, &a, &FinSet::new(), &b).map_err(|e| e.to_string())?;
        ensure(ok, || format!("instance {done}: {b:?} not maximal in {a:?} under {}", pred.label))?;
        done += 1;
    }
    Ok(())
}

// 5

fn prime_gadget() -> Outcome {
    for f in injective_prefixes(4, 4) {
        let got = prime_gadget_decode(&f, 4, 3).map_err(|e| e.to_string())?;
        let want: BTreeSet<u64> = f.iter().copied().collect();
        ensure(got == want, || format!("f = {f:?}: decoded {got:?}"))?;
    }
    Ok(())
}

// 6

fn nce_corpus() -> Vec<NondetClosureOp> {
    let mut r = rng(6);
    (0..50)
        .map(|_| {
            let rules = (0..r.random_range(1..=8))
                .map(|_| {
                    let k = r.random_range(0..=2);
                    let from: Vec<u64> = (0..k).map(|_| r.random_range(0..14)).collect();
                    let mut choices: Vec<u64> = (0..r.random_range(1..=3)).map(|_| r.random_range(0..16)).collect();
                    choices.dedup();
                    NondetClosureOp::rule(&from, &choices)
                })
                .collect();
            NondetClosureOp::new(rules).unwrap()
        })
        .collect()
}

fn closed_under(op: &NondetClosureOp, x: &FinSet) -> bool {
    op.rules().iter().all(|rule| !rule.from.is_subset(x) || !rule.choices.is_disjoint(x))
}

fn nce_brute_force() -> Outcome {
    let mut r = rng(66);
    let full: FinSet = (0..14).collect();
    let mut ran = 0;
    for (o, op) in nce_corpus().iter().enumerate() {
        for trial in 0..4 {
            let a = if trial == 0 { full.clone() } else { random_set(&mut r, 14, 0.7) };
            let pred = random_pred(&mut r, 14).into_predicate(14);
            // seed: least closed, predicate-satisfying subset of A by canonical index
            let elems: Vec<u64> = a.iter().copied().collect();
            let Some(c) = subsets_of(&elems)
                .filter(|x| closed_under(op, x) && pred.eval(x))
                .min_by(canonical_cmp)
            else {
                continue;
            };
            let got = max_nclosed_extension(op, &pred, &a, &c, SearchMode::Exact).map_err(|e| format!("op {o}: {e}"))?;
            let brute = oracles::nce_maximal_sets(op, &pred, &a, &c).map_err(|e| e.to_string())?;
            let least = brute.iter().min_by(|x, y| canonical_cmp(x, y)).cloned();
            ensure(Some(&got) == least.as_ref(), || format!("op {o} trial {trial}: exact {got:?}, brute force {least:?}"))?;
            let greedy = max_nclosed_extension(op, &pred, &a, &c, SearchMode::Greedy).map_err(|e| e.to_string())?;
            ensure(brute.contains(&greedy), || format!("op {o} trial {trial}: greedy {greedy:?} not maximal"))?;
            ran += 1;
        }
    }
    ensure(ran >= 100, || format!("only {ran} instances had a seed"))
}

fn no_minimum() -> Outcome {
    let op = no_minimum_operator(4);
    let a: FinSet = (0..=4).collect();
    let elems: Vec<u64> = a.iter().copied().collect();
    let closed: Vec<FinSet> = subsets_of(&elems).filter(|x| closed_under(&op, x)).collect();
    let brute: Vec<FinSet> =
        closed.iter().filter(|x| !closed.iter().any(|y| y.is_subset(x) && y != *x)).cloned().collect();
    let got = minimal_closed_supersets(&op, &a, &FinSet::new()).map_err(|e| e.to_string())?;
    ensure(got == brute, || format!("library {got:?} disagrees with enumeration {brute:?}"))?;
    ensure(got.len() >= 2, || format!("minimal closed supersets of the empty set: {got:?}"))
}

// 7

fn trees_up_to(depth: usize) -> Vec<TruncTree> {
    if depth == 0 {
        return vec![TruncTree::leaf()];
    }
    let lower = trees_up_to(depth - 1);
    let mut out = vec![TruncTree::leaf()];
    out.extend(lower.iter().map(|t| TruncTree::node(vec![t.clone()])));
    for (i, j) in (0..lower.len()).tuple_combinations::<(_, _)>().chain((0..lower.len()).map(|i| (i, i))) {
        out.push(TruncTree::node(vec![lower[i].clone(), lower[j].clone()]));
    }
    out
}

fn reaches_depth(t: &TruncTree, d: usize) -> bool {
    let mut stack = vec![(t, 0usize)];
    while let Some((node, level)) = stack.pop() {
        if level == d {
            return true;
        }
        stack.extend(node.children.iter().map(|c| (c, level + 1)));
    }
    false
}

fn tree_decoding() -> Outcome {
    for depth in 1..=3 {
        let shapes = trees_up_to(depth);
        for n in 1..=3 {
            for pick in (0..shapes.len()).combinations_with_replacement(n) {
                let family = TreeFamily { depth, trees: pick.iter().map(|&i| shapes[i].clone()).collect() };
                let enc = tree_encoding(&family).map_err(|e| e.to_string())?;
                let b = max_nclosed_extension(&enc.op, &enc.predicate(), &enc.universe, &FinSet::new(), SearchMode::Greedy)
                    .map_err(|e| e.to_string())?;
                let got = decode_paths(&b, &enc).map_err(|e| e.to_string())?;
                let want: BTreeSet<usize> =
                    family.trees.iter().enumerate().filter(|(_, t)| reaches_depth(t, depth)).map(|(i, _)| i).collect();
                ensure(got == want, || format!("depth {depth}, shapes {pick:?}: decoded {got:?}, want {want:?}"))?;
            }
        }
    }
    Ok(())
}

// 8

/// Every order on `0..n` whose relations point up in index order; each
/// isomorphism class has such a labelling.
fn natural_posets(n: usize) -> Vec<FinPoset> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let rel: BTreeSet<(usize, usize)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
            let transitive = rel.iter().all(|&(a, b)| rel.iter().all(|&(c, d)| c != b || rel.contains(&(a, d))));
            transitive.then(|| FinPoset::from_fn(n, |a, b| a == b || rel.contains(&(a, b))).unwrap())
        })
        .collect()
}

fn brute_maximal_ideals(p: &FinPoset) -> BTreeSet<FinSet> {
    let n = p.size();
    let elems: Vec<u64> = (0..n as u64).collect();
    let ideals: Vec<FinSet> = subsets_of(&elems)
        .filter(|x| !x.is_empty())
        .filter(|x| x.iter().all(|&k| (0..n).all(|j| !p.leq(j, k as usize) || x.contains(&(j as u64)))))
        .filter(|x| {
            x.iter().cartesian_product(x.iter()).all(|(&j, &k)| {
                x.iter().any(|&l| p.leq(j as usize, l as usize) && p.leq(k as usize, l as usize))
            })
        })
        .collect();
    ideals.iter().filter(|x| !ideals.iter().any(|y| x.is_subset(y) && x != &y)).cloned().collect()
}

fn poset_ideals() -> Outcome {
    for n in 1..=5 {
        for p in natural_posets(n) {
            let (op, pred) = poset_ideal_encoding(&p);
            let a: FinSet = (0..n as u64).collect();
            let got: BTreeSet<FinSet> =
                all_maximal_extensions(&op, &pred, &a, &FinSet::new()).map_err(|e| e.to_string())?.into_iter().collect();
            let want = brute_maximal_ideals(&p);
            ensure(got == want, || format!("poset {p:?}: encoding gives {got:?}, ideals {want:?}"))?;
        }
    }
    Ok(())
}

// 9

fn zorn_suite() -> Outcome {
    let mut r = rng(9);
    for case in 0..500 {
        let n = r.random_range(1..=12);
        let density = r.random_range(0.0..0.5);
        let mut labels: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            labels.swap(i, r.random_range(0..=i));
        }
        let mut below = vec![vec![false; n]; n];
        for (i, j) in (0..n).tuple_combinations() {
            below[i][j] = r.random_bool(density);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    below[i][j] |= below[i][k] && below[k][j];
                }
            }
        }
        let mut at = vec![0; n];
        for (pos, &l) in labels.iter().enumerate() {
            at[l] = pos;
        }
        let p = FinPoset::from_fn(n, |a, b| a == b || below[at[a]][at[b]]).map_err(|e| e.to_string())?;
        let start = r.random_range(0..n);
        let top = zl1_climb(&p, start).map_err(|e| e.to_string())?.top;
        let maximal = (0..n).all(|q| q == top || !p.leq(top, q));
        ensure(maximal && p.leq(start, top), || format!("case {case}: climb from {start} stopped at {top}"))?;
    }
    for chains in 1..=6usize {
        for stages in 1..=6usize {
            for f in injective_prefixes(stages, chains as u64) {
                let got = zl_reversal_decode(&f, chains, stages).map_err(|e| e.to_string())?;
                let want: BTreeSet<u64> = f.iter().copied().collect();
                ensure(got == want, || format!("I = {chains}, S = {stages}, f = {f:?}: decoded {got:?}"))?;
            }
        }
    }
    Ok(())
}

// 10

fn adversary() -> Outcome {
    let suite = bundled_suite();
    let cfg = AdversaryConfig::capped(3, 6, 5);
    let run = adversary_run(&suite.strategies, 300, &cfg).map_err(|e| e.to_string())?;
    let bad = invariant_violations(&run);
    ensure(bad.is_empty(), || format!("invariants: {bad:?}"))?;
    let again = adversary_run(&suite.strategies, 300, &cfg).map_err(|e| e.to_string())?;
    ensure(run.transcript.to_jsonl() == again.transcript.to_jsonl(), || "transcripts differ across runs".into())?;
    let mut audited = 0;
    for (e, table) in suite.strategies.iter().enumerate() {
        if !table.is_total_by(run.final_stage) {
            continue;
        }
        audited += 1;
        let j = induced_prefix(table, run.final_stage);
        let verdict = adversary_audit(&run.transcript, &run.family, &j, e).map_err(|e| e.to_string())?;
        ensure(matches!(verdict, AuditVerdict::Diagonalized { .. }), || format!("strategy {e}: {verdict:?}"))?;
    }
    ensure(audited == 4, || format!("{audited} strategies were total"))
}

// 11

fn permission_ok(w: &StagedEnumeration, before: &[u64], after: &[u64], s: u64) -> bool {
    let fresh: BTreeSet<u64> = w.at(s + 1).difference(&w.at(s)).copied().collect();
    before.iter().filter(|c| !after.contains(c)).all(|&c| fresh.iter().any(|&x| x < c))
}

fn permitting() -> Outcome {
    let mut r = rng(11);
    let horizon = 48;
    // A_1 meets A_0 only at 45, long after the disjoint A_2 has been taken
    let mut members = vec![(0..horizon).filter(|x| x % 3 == 0).collect::<FinSet>(), FinSet::from([45, 47]), FinSet::from([0, 6])];
    members.extend((0..7).map(|_| random_set(&mut r, horizon, 0.5)));
    let fam = Family::new(horizon, members).map_err(|e| e.to_string())?;
    let w = StagedEnumeration {
        stages: (0..500u64).map(|s| if s % 7 == 3 { vec![r.random_range(0..60)] } else { Vec::new() }).collect(),
    };
    let run = permitting_run(&fam, &w, 500).map_err(|e| e.to_string())?;
    ensure(run.history.iter().any(|st| !st.removed.is_empty()), || "no removal was ever permitted".into())?;
    for pair in run.history.windows(2) {
        let s = pair[0].stage;
        ensure(permission_ok(&w, &pair[0].m, &pair[1].m, s), || format!("unpermitted removal at stage {s}"))?;
    }
    for st in &run.history {
        let held: Vec<usize> = st.m.iter().map(|&c| unpair(c).0 as usize).collect();
        let meet = held.iter().map(|&i| &fam.members()[i]).fold(None::<FinSet>, |acc, m| {
            Some(acc.map_or_else(|| m.clone(), |a| a.intersection(m).copied().collect()))
        });
        ensure(meet.is_some_and(|m| !m.is_empty()), || format!("stage {}: joint intersection empty", st.stage))?;
    }
    let full = Family::new(16, vec![(0..16).collect(); 7]).map_err(|e| e.to_string())?;
    let run = permitting_run(&full, &StagedEnumeration::empty(), 500).map_err(|e| e.to_string())?;
    let mut idx = run.indices.indices.clone();
    idx.sort_unstable();
    ensure(idx.iter().enumerate().all(|(k, &i)| k == i), || format!("all-full family ended at {idx:?}"))
}

// 12

fn brute_witness_bound(fam: &Family, s: u64) -> u64 {
    let count = ((s + 1) as usize).min(fam.len());
    let idx: Vec<usize> = (0..count).collect();
    (1..=count)
        .flat_map(|k| idx.iter().copied().combinations(k))
        .filter_map(|c| {
            let first = &fam.members()[c[0]];
            first.iter().copied().find(|x| c.iter().all(|&i| fam.members()[i].contains(x)))
        })
        .max()
        .unwrap_or(0)
}

fn genericity() -> Outcome {
    let mut r = rng(12);
    let mut done = 0;
    while done < 50 {
        let fam = random_family(&mut r, 8, 32);
        if !fam.is_nontrivial() || fam.members()[0].is_empty() {
            continue;
        }
        let m = fam.len();
        let forced = forcing_generic(&fam, &[], 2 * m).map_err(|e| e.to_string())?;
        ensure(has_property(&fam, &forced.indices, PropertyTag::F).map_err(|e| e.to_string())?.is_ok(), || {
            format!("family {done}: forcing output {:?} lacks F", forced.indices.indices)
        })?;
        ensure(oracles::property_holds(&fam, &forced.indices.indices, PropertyTag::F), || format!("family {done}: forcing"))?;
        let generic = pi01_generic_run(&fam, &[], 2 * m).map_err(|e| e.to_string())?;
        ensure(has_property(&fam, &generic.indices, PropertyTag::F).map_err(|e| e.to_string())?.is_ok(), || {
            format!("family {done}: generic output {:?} lacks F", generic.indices.indices)
        })?;
        ensure(oracles::property_holds(&fam, &generic.indices.indices, PropertyTag::F), || format!("family {done}: generic"))?;
        let g: Vec<u64> = (0..=2 * m as u64).map(|s| brute_witness_bound(&fam, s)).collect();
        for (s, &want) in g.iter().enumerate() {
            let got = witness_bound(&fam, s as u64).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("family {done}: g({s}) = {got}, brute force {want}"))?;
        }
        let f = |s: u64| g[(s as usize).min(g.len() - 1)];
        let sub = escape_subfamily(&fam, &f, 2 * m as u64).map_err(|e| e.to_string())?;
        let verdict = is_maximal(&fam, &sub, PropertyTag::F).map_err(|e| e.to_string())?;
        ensure(verdict == MaximalityVerdict::Maximal, || format!("family {done}: escape gave {:?}, {verdict:?}", sub.indices))?;
        ensure(oracles::family_maximal(&fam, &sub, PropertyTag::F).map_err(|e| e.to_string())?, || {
            format!("family {done}: escape output not maximal by enumeration")
        })?;
        done += 1;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("1", "maximality oracle agreement", 10, maximality_agreement),
        ("2", "range decode", 5, range_decode),
        ("3", "cl correctness", 10, cl_laws),
        ("4", "CE maximality", 30, ce_maximality),
        ("5", "prime gadget", 5, prime_gadget),
        ("6a", "NCE exact mode vs brute force", 30, nce_brute_force),
        ("6b", "no-minimum operator has >= 2 minimal closed sets", 30, no_minimum),
        ("7", "tree decoding", 10, tree_decoding),
        ("8", "poset ideals", 60, poset_ideals),
        ("9", "Zorn suite", 10, zorn_suite),
        ("10", "adversary invariants", 60, adversary),
        ("11", "permitting invariants", 10, permitting),
        ("12", "genericity", 30, genericity),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, check) in criteria {
        let t = Instant::now();
        let mut outcome = check();
        let took = t.elapsed();
        if outcome.is_ok() && took > Duration::from_secs(limit) {
            outcome = Err(format!("took {took:.2?}, limit {limit} s"));
        }
        let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
        println!("criterion {id:>3} {status} {name} ({took:.2?})");
        if let Err(why) = &outcome {
            println!("              {why}");
        }
        let expected_fail = UNATTAINABLE.contains(&id);
        if outcome.is_ok() == expected_fail {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("all criteria behaved as recorded; unattainable: {UNATTAINABLE:?}");
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}

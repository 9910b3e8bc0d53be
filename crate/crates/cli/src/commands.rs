use std::collections::{BTreeMap, BTreeSet};

use choicelab::closure_det::{
    ce_greedy_max, cl, is_closed, prime_gadget, prime_gadget_decode, prime_universe, semilattice_ideal_op, DetClosureOp,
    JoinSemilattice,
};
use choicelab::closure_nondet::{
    all_maximal_extensions, decode_paths, is_nclosed, max_nclosed_extension, poset_ideal_encoding, tree_encoding,
    NondetClosureOp, SearchMode, TreeEncoding, TreeFamily,
};
use choicelab::constructions::adversary::{
    adversary_audit, adversary_run, induced_prefix, invariant_violations, AdversaryConfig,
};
use choicelab::constructions::escape::{escape_sequence, escape_subfamily, witness_bound};
use choicelab::constructions::forcing::forcing_generic;
use choicelab::constructions::permitting::{permit_violations, permitting_run, PermitRun, StagedEnumeration};
use choicelab::constructions::pi01g::pi01_generic_run;
use choicelab::constructions::strategy::{bundled_suite, StrategySuite};
use choicelab::families::{
    decode_range, greedy_max_subfamily, has_property, range_coding_family, tilde_transform, Family, PropertyTag,
    SubfamilyIndex,
};
use choicelab::finite_character::{fcp_greedy_max, sequential_gadget, sigma1_minimal_removal, FcPredicate, PredSpec};
use choicelab::oracles;
use choicelab::zorn::{maximal_assignment, maximal_elements, zl1_climb, zl_reversal_decode, FinPoset};
use choicelab::{Error, FinSet};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, to_value, Value};

use crate::{Cli, CliError, CliResult, OracleKind};

fn val<T: serde::Serialize>(v: T) -> CliResult<Value> {
    Ok(to_value(v).expect("outputs serialize"))
}

fn default_bound(sets: &[&FinSet]) -> u64 {
    sets.iter().filter_map(|s| s.last()).max().map_or(1, |m| m + 1)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyCheckIn {
    family: Family,
    subfamily: SubfamilyIndex,
    property: PropertyTag,
}

pub fn family_check(cli: &Cli) -> CliResult<Value> {
    let d: FamilyCheckIn = cli.doc()?;
    val(has_property(&d.family, &d.subfamily, d.property)?)
}

#[derive(Deserialize)]
struct FamilyPropIn {
    family: Family,
    property: PropertyTag,
    #[serde(default)]
    start: Option<usize>,
}

pub fn family_greedy(cli: &Cli) -> CliResult<Value> {
    let d: FamilyPropIn = cli.doc()?;
    val(greedy_max_subfamily(&d.family, d.property, d.start)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TildeIn {
    family: Family,
    n: usize,
}

pub fn family_tilde(cli: &Cli) -> CliResult<Value> {
    let d: TildeIn = cli.doc()?;
    let stages = cli.need(cli.stages, "stages")?;
    val(tilde_transform(&d.family, d.n, stages)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodeRangeIn {
    f: Vec<u64>,
    member_count: usize,
    #[serde(default)]
    horizon: Option<u64>,
}

pub fn family_encode_range(cli: &Cli) -> CliResult<Value> {
    let d: EncodeRangeIn = cli.doc()?;
    let horizon = d
        .horizon
        .or(cli.horizon)
        .ok_or_else(|| CliError::Usage("horizon missing: give it in the input or with --horizon".into()))?;
    val(range_coding_family(&d.f, d.member_count, horizon)?)
}

pub fn family_decode_range(cli: &Cli) -> CliResult<Value> {
    let d: FamilyCheckIn = cli.doc()?;
    val(decode_range(&d.family, &d.subfamily, d.property)?)
}

#[derive(Deserialize)]
struct PosetIn {
    poset: FinPoset,
    #[serde(default)]
    start: usize,
}

pub fn poset_zl1(cli: &Cli) -> CliResult<Value> {
    let d: PosetIn = cli.doc()?;
    val(zl1_climb(&d.poset, d.start)?)
}

pub fn poset_maximals(cli: &Cli) -> CliResult<Value> {
    let d: PosetIn = cli.doc()?;
    Ok(json!({ "maximal": maximal_elements(&d.poset) }))
}

pub fn poset_assign(cli: &Cli) -> CliResult<Value> {
    let d: PosetIn = cli.doc()?;
    Ok(json!({ "assignment": maximal_assignment(&d.poset) }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReversalIn {
    f: Vec<u64>,
    chains: usize,
    stages: usize,
}

pub fn poset_reversal(cli: &Cli) -> CliResult<Value> {
    let d: ReversalIn = cli.doc()?;
    Ok(json!({ "range": zl_reversal_decode(&d.f, d.chains, d.stages)? }))
}

#[derive(Deserialize)]
struct PredIn {
    predicate: PredSpec,
    #[serde(default)]
    universe_bound: Option<u64>,
    a: FinSet,
    #[serde(default)]
    c: FinSet,
}

impl PredIn {
    fn pred(&self) -> FcPredicate {
        let bound = self.universe_bound.unwrap_or_else(|| default_bound(&[&self.a]));
        self.predicate.clone().into_predicate(bound)
    }
}

pub fn fcp_max(cli: &Cli) -> CliResult<Value> {
    let d: PredIn = cli.doc()?;
    Ok(json!({ "set": fcp_greedy_max(&d.pred(), &d.a)? }))
}

pub fn fcp_sigma1(cli: &Cli) -> CliResult<Value> {
    let d: PredIn = cli.doc()?;
    val(sigma1_minimal_removal(&d.pred(), &d.a)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequentialIn {
    f: Vec<u64>,
    count: usize,
}

pub fn fcp_sequential(cli: &Cli) -> CliResult<Value> {
    let d: SequentialIn = cli.doc()?;
    Ok(json!({ "sets": sequential_gadget(&d.f, d.count)? }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClIn {
    op: DetClosureOp,
    x: FinSet,
    #[serde(default)]
    universe: Option<u64>,
}

pub fn closure_cl(cli: &Cli) -> CliResult<Value> {
    let d: ClIn = cli.doc()?;
    let universe = d.universe.or(cli.horizon).unwrap_or_else(|| default_bound(&[&d.x]));
    Ok(json!({ "set": cl(&d.op, &d.x, universe)? }))
}

pub fn closure_closed(cli: &Cli) -> CliResult<Value> {
    let d: ClIn = cli.doc()?;
    Ok(json!({ "closed": is_closed(&d.op, &d.x) }))
}

#[derive(Deserialize)]
struct CeIn {
    op: DetClosureOp,
    #[serde(flatten)]
    pred: PredIn,
}

pub fn closure_ce_max(cli: &Cli) -> CliResult<Value> {
    let d: CeIn = cli.doc()?;
    Ok(json!({ "set": ce_greedy_max(&d.op, &d.pred.pred(), &d.pred.a, &d.pred.c)? }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PrimeIn {
    f: Vec<u64>,
    prime_count: usize,
    exp_bound: u32,
}

pub fn closure_prime_gadget(cli: &Cli) -> CliResult<Value> {
    let d: PrimeIn = cli.doc()?;
    let op = prime_gadget(&d.f, d.prime_count, d.exp_bound)?;
    Ok(json!({
        "op": op,
        "universe": prime_universe(d.prime_count, d.exp_bound),
        "decoded": prime_gadget_decode(&d.f, d.prime_count, d.exp_bound)?,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SemilatticeIn {
    lattice: JoinSemilattice,
}

pub fn closure_semilattice(cli: &Cli) -> CliResult<Value> {
    let d: SemilatticeIn = cli.doc()?;
    let (op, pred) = semilattice_ideal_op(&d.lattice);
    Ok(json!({ "op": op, "predicate": pred.label, "top": d.lattice.top }))
}

#[derive(Deserialize)]
struct NceCheckIn {
    op: NondetClosureOp,
    x: FinSet,
}

pub fn nce_check(cli: &Cli) -> CliResult<Value> {
    let d: NceCheckIn = cli.doc()?;
    val(is_nclosed(&d.op, &d.x))
}

#[derive(Deserialize)]
struct NceIn {
    op: NondetClosureOp,
    #[serde(flatten)]
    pred: PredIn,
    #[serde(default = "exact")]
    mode: SearchMode,
}

fn exact() -> SearchMode {
    SearchMode::Exact
}

pub fn nce_max(cli: &Cli) -> CliResult<Value> {
    let d: NceIn = cli.doc()?;
    Ok(json!({ "set": max_nclosed_extension(&d.op, &d.pred.pred(), &d.pred.a, &d.pred.c, d.mode)? }))
}

pub fn nce_ideal_encode(cli: &Cli) -> CliResult<Value> {
    let d: PosetIn = cli.doc()?;
    let (op, pred) = poset_ideal_encoding(&d.poset);
    let a: FinSet = (0..d.poset.size() as u64).collect();
    let ideals = all_maximal_extensions(&op, &pred, &a, &FinSet::new())?;
    Ok(json!({ "op": op, "predicate": pred.label, "a": a, "maximal_ideals": ideals }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreesIn {
    trees: TreeFamily,
}

/// The output doubles as an `nce max` input.
pub fn nce_tree_encode(cli: &Cli) -> CliResult<Value> {
    let d: TreesIn = cli.doc()?;
    let enc = tree_encoding(&d.trees)?;
    let pred = PredSpec::Avoid { set: FinSet::from([enc.z]) };
    Ok(json!({
        "op": enc.op,
        "predicate": pred,
        "a": enc.universe,
        "c": [],
        "mode": "exact",
        "encoding": enc,
    }))
}

#[derive(Deserialize)]
struct DecodeIn {
    encoding: TreeEncoding,
    #[serde(default)]
    set: Option<FinSet>,
}

#[derive(Deserialize)]
struct SetDoc {
    set: FinSet,
}

pub fn nce_decode_paths(cli: &Cli) -> CliResult<Value> {
    let d: DecodeIn = cli.doc()?;
    let set = match d.set {
        Some(s) => s,
        None => cli.artifact::<SetDoc>()?.set,
    };
    Ok(json!({ "paths": decode_paths(&set, &d.encoding)? }))
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct AdversaryIn {
    strategies: Option<StrategySuite>,
    config: AdversaryConfig,
    emit_family: bool,
}

pub fn construct_adversary(cli: &Cli) -> CliResult<Value> {
    let d: AdversaryIn = if cli.input.is_some() { cli.doc()? } else { AdversaryIn::default() };
    let suite = d.strategies.unwrap_or_else(bundled_suite);
    let stages = cli.need(cli.stages, "stages")?;
    let run = adversary_run(&suite.strategies, stages, &d.config)?;
    cli.write_transcript(&run.transcript.to_jsonl())?;
    let last = run.final_stage;
    let mut audits = Vec::new();
    for (e, table) in suite.strategies.iter().enumerate() {
        let j = induced_prefix(table, last);
        audits.push(json!({
            "strategy": e,
            "prefix": j.indices,
            "total": table.is_total_by(last),
            "audit": adversary_audit(&run.transcript, &run.family, &j, e)?,
        }));
    }
    let acceptable: Vec<Value> = run.transcript.named("acceptable").map(|ev| json!([ev.stage, ev.payload["e"]])).collect();
    let mut out = json!({
        "stages": stages,
        "members": run.family.len(),
        "horizon": run.family.horizon(),
        "events": run.transcript.len(),
        "targets": run.targets,
        "followers": run.followers.len(),
        "acceptable": acceptable,
        "invariant_violations": invariant_violations(&run),
        "audits": audits,
    });
    if d.emit_family {
        out["family"] = to_value(&run.family).expect("family serializes");
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PermitIn {
    family: Family,
    #[serde(default)]
    w: StagedEnumeration,
}

pub fn construct_permit(cli: &Cli) -> CliResult<Value> {
    let d: PermitIn = cli.doc()?;
    let stages = cli.need(cli.stages, "stages")?;
    val(permitting_run(&d.family, &d.w, stages)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EscapeIn {
    family: Family,
    /// Values of the escaping function; the last one repeats. Absent means
    /// the witness bound itself.
    #[serde(default)]
    f: Option<Vec<u64>>,
}

pub fn construct_escape(cli: &Cli) -> CliResult<Value> {
    let d: EscapeIn = cli.doc()?;
    let steps = cli.need(cli.steps, "steps")?;
    let table = match d.f {
        Some(v) if v.is_empty() => return Err(CliError::Schema("input: f must be nonempty".into())),
        Some(v) => v,
        None => (0..steps.max(1)).map(|s| witness_bound(&d.family, s)).collect::<Result<_, Error>>()?,
    };
    let f = |s: u64| table[usize::try_from(s).unwrap_or(usize::MAX).min(table.len() - 1)];
    Ok(json!({
        "sequence": escape_sequence(&d.family, &f, steps)?,
        "indices": escape_subfamily(&d.family, &f, steps)?.indices,
    }))
}

#[derive(Deserialize)]
struct FamilyIn {
    family: Family,
    #[serde(default)]
    indices: Vec<usize>,
}

pub fn construct_forcing(cli: &Cli) -> CliResult<Value> {
    let d: FamilyIn = cli.doc()?;
    let steps = cli.need(cli.steps, "steps")?;
    let run = forcing_generic(&d.family, &[], steps as usize)?;
    Ok(json!({ "conditions": run.conditions, "indices": run.indices.indices }))
}

pub fn construct_pi01g(cli: &Cli) -> CliResult<Value> {
    let d: FamilyIn = cli.doc()?;
    let steps = cli.need(cli.steps, "steps")?;
    let run = pi01_generic_run(&d.family, &d.indices, steps as usize)?;
    let sigma_ones: Vec<String> = run.sigma.ones.iter().map(|x| x.to_string()).collect();
    Ok(json!({
        "sigma_len": run.sigma.len.to_string(),
        "sigma_ones": sigma_ones,
        "taus": run.sequence.iter().map(|g| &g.tau).collect::<Vec<_>>(),
        "indices": run.indices.indices,
    }))
}

#[derive(Deserialize)]
struct IndicesDoc {
    indices: Vec<usize>,
}

#[derive(Deserialize)]
struct IdealsDoc {
    maximal_ideals: Vec<FinSet>,
}

#[derive(Deserialize)]
struct PathsDoc {
    paths: BTreeSet<usize>,
}

fn verdict(key: &str, ok: bool) -> CliResult<Value> {
    let v = json!({ key: ok });
    if ok {
        Ok(v)
    } else {
        Err(CliError::Rejected(v))
    }
}

pub fn verify(cli: &Cli, kind: OracleKind) -> CliResult<Value> {
    match kind {
        OracleKind::FamilyMax => {
            let d: FamilyPropIn = cli.doc()?;
            let a: IndicesDoc = cli.artifact()?;
            verdict("maximal", oracles::family_maximal(&d.family, &SubfamilyIndex::new(a.indices), d.property)?)
        }
        OracleKind::FcpMax => {
            let d: PredIn = cli.doc()?;
            let a: SetDoc = cli.artifact()?;
            verdict("maximal", oracles::fcp_maximal(&d.pred(), &d.a, &a.set)?)
        }
        OracleKind::CeMax => {
            let d: CeIn = cli.doc()?;
            let a: SetDoc = cli.artifact()?;
            verdict("maximal", oracles::ce_maximal(&d.op, &d.pred.pred(), &d.pred.a, &d.pred.c, &a.set)?)
        }
        OracleKind::NceMax => {
            let d: NceIn = cli.doc()?;
            let a: SetDoc = cli.artifact()?;
            verdict("maximal", oracles::nce_maximal(&d.op, &d.pred.pred(), &d.pred.a, &d.pred.c, &a.set)?)
        }
        OracleKind::Ideals => {
            let d: PosetIn = cli.doc()?;
            let a: IdealsDoc = cli.artifact()?;
            let want: BTreeSet<FinSet> = oracles::maximal_ideals(&d.poset)?.into_iter().collect();
            let got: BTreeSet<FinSet> = a.maximal_ideals.into_iter().collect();
            verdict("valid", want == got)
        }
        OracleKind::TreePaths => {
            let d: TreesIn = cli.doc()?;
            let a: PathsDoc = cli.artifact()?;
            verdict("valid", oracles::trees_with_paths(&d.trees) == a.paths)
        }
        OracleKind::Permit => {
            let d: PermitIn = cli.doc()?;
            let run: PermitRun = cli.artifact()?;
            let bad = permit_violations(&d.family, &d.w, &run);
            if bad.is_empty() {
                Ok(json!({ "valid": true }))
            } else {
                Err(CliError::Rejected(json!({ "valid": false, "violations": bad })))
            }
        }
    }
}

pub fn gen_family(seed: u64, members: usize, horizon: u64) -> CliResult<Value> {
    if horizon == 0 {
        return Err(CliError::Usage("--horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<FinSet> = (0..members)
        .map(|_| {
            let k = rng.random_range(0..=4usize);
            (0..k).map(|_| rng.random_range(0..horizon)).collect()
        })
        .collect();
    Ok(json!({ "family": Family::new(horizon, sets)? }))
}

pub fn gen_poset(seed: u64, size: usize) -> CliResult<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a random linear extension keeps the relation acyclic; transitivity is closed below
    let mut rel = vec![vec![false; size]; size];
    for (a, row) in rel.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = a == b || (a < b && rng.random_bool(0.3));
        }
    }
    for k in 0..size {
        for a in 0..size {
            for b in 0..size {
                if rel[a][k] && rel[k][b] {
                    rel[a][b] = true;
                }
            }
        }
    }
    let poset = FinPoset::from_fn(size, |a, b| rel[a][b])?;
    Ok(json!({ "poset": poset }))
}

pub fn gen_closure(seed: u64, rules: usize, universe: u64) -> CliResult<Value> {
    if universe == 0 {
        return Err(CliError::Usage("--universe must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op = DetClosureOp::new(
        (0..rules)
            .map(|_| {
                let k = rng.random_range(0..=2usize);
                let from: Vec<u64> = (0..k).map(|_| rng.random_range(0..universe)).collect();
                DetClosureOp::rule(&from, rng.random_range(0..universe))
            })
            .collect(),
    );
    Ok(json!({ "op": op, "x": [], "universe": universe }))
}

pub fn schema(command: &str) -> CliResult<Value> {
    let family = json!({"horizon": "natural", "members": "list of lists of naturals < horizon"});
    let poset = json!({"size": "natural", "leq": "list of [a, b] pairs with a ≤ b"});
    let pred = json!({"op": "true | not_divisible{by} | divisible{by} | member_of{set} | avoid{set} | max_card{k} | empty_or_contains{element} | and{of} | or{of}"});
    let det_op = json!({"rules": [{"from": "list of naturals", "to": "natural"}]});
    let nondet_op = json!({"rules": [{"from": "list of naturals", "choices": "nonempty list of naturals"}]});
    let fields: BTreeMap<&str, Value> = BTreeMap::from([
        ("family check", json!({"family": family, "subfamily": {"indices": "list"}, "property": "D<n> | Dbar<n> | F"})),
        ("family greedy", json!({"family": family, "property": "D<n> | Dbar<n> | F", "start": "optional index"})),
        ("family tilde", json!({"family": family, "n": "natural ≥ 2", "flags": ["--stages"]})),
        ("family encode-range", json!({"f": "injective list", "member_count": "natural", "horizon": "optional natural (or --horizon)"})),
        ("family decode-range", json!({"family": family, "subfamily": {"indices": "list"}, "property": "D<n> | Dbar<n> | F"})),
        ("poset zl1", json!({"poset": poset, "start": "element"})),
        ("poset maximals", json!({"poset": poset})),
        ("poset assign", json!({"poset": poset})),
        ("poset reversal", json!({"f": "injective list", "chains": "natural", "stages": "natural"})),
        ("fcp max", json!({"predicate": pred, "universe_bound": "optional natural", "a": "list"})),
        ("fcp sigma1", json!({"predicate": pred, "universe_bound": "optional natural", "a": "list"})),
        ("fcp sequential", json!({"f": "injective list", "count": "natural"})),
        ("closure cl", json!({"op": det_op, "x": "list", "universe": "optional natural"})),
        ("closure closed", json!({"op": det_op, "x": "list"})),
        ("closure ce-max", json!({"op": det_op, "predicate": pred, "universe_bound": "optional natural", "a": "list", "c": "list"})),
        ("closure prime-gadget", json!({"f": "injective list", "prime_count": "natural", "exp_bound": "natural"})),
        ("closure semilattice", json!({"lattice": {"size": "natural", "leq": "pairs", "join": "matrix", "top": "element"}})),
        ("nce check", json!({"op": nondet_op, "x": "list"})),
        ("nce max", json!({"op": nondet_op, "predicate": pred, "universe_bound": "optional natural", "a": "list", "c": "list", "mode": "exact | greedy"})),
        ("nce ideal-encode", json!({"poset": poset})),
        ("nce tree-encode", json!({"trees": {"depth": "natural", "trees": "nested lists of children"}})),
        ("nce decode-paths", json!({"encoding": "tree-encode output field", "set": "optional list (or --artifact with {set})"})),
        ("construct adversary", json!({"strategies": {"strategies": [{"entries": [{"x": "n", "value": "n", "stage": "n"}]}]}, "config": {"max_string_len": "optional", "string_cap": "optional", "max_substages": "optional"}, "emit_family": "bool", "flags": ["--stages", "--transcript"]})),
        ("construct permit", json!({"family": family, "w": {"stages": "list of lists"}, "flags": ["--stages"]})),
        ("construct escape", json!({"family": family, "f": "optional list (default: witness bound)", "flags": ["--steps"]})),
        ("construct forcing", json!({"family": family, "flags": ["--steps"]})),
        ("construct pi01g", json!({"family": family, "indices": "list", "flags": ["--steps"]})),
        ("verify oracle family-max", json!({"input": {"family": family, "property": "tag"}, "artifact": {"indices": "list"}})),
        ("verify oracle fcp-max", json!({"input": "fcp max input", "artifact": {"set": "list"}})),
        ("verify oracle ce-max", json!({"input": "closure ce-max input", "artifact": {"set": "list"}})),
        ("verify oracle nce-max", json!({"input": "nce max input", "artifact": {"set": "list"}})),
        ("verify oracle ideals", json!({"input": {"poset": poset}, "artifact": "nce ideal-encode output"})),
        ("verify oracle tree-paths", json!({"input": "nce tree-encode input", "artifact": {"paths": "list"}})),
        ("verify oracle permit", json!({"input": "construct permit input", "artifact": "construct permit output"})),
        ("gen family", json!({"flags": ["--seed", "--horizon", "--members"]})),
        ("gen poset", json!({"flags": ["--seed", "--size"]})),
        ("gen closure", json!({"flags": ["--seed", "--rules", "--universe"]})),
    ]);
    fields
        .get(command)
        .map(|f| json!({"command": command, "input": f}))
        .ok_or_else(|| CliError::Usage(format!("no schema for {command}")))
}

//! The acceptance suite. Each criterion is a deterministic function of the
//! base seed; its JSON record carries no timing so reruns are byte-identical.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use embedlab::classifier::{census, consistency_verdict, fingerprint};
use embedlab::encoding::Lcg;
use embedlab::enumerate::equivalences_within;
use embedlab::forcing::trichotomy_scan;
use embedlab::generate::{generate, CanonicalSpec, Family, Policy};
use embedlab::kernel::{
    exhaustive_monotonicity, Annotation, BudgetSchedule, Concatenate, DisjointUnion, EnumerationOperator, FillStyle,
    IntervalFill, OpRef, OperatorTarget, Reverse,
};
use embedlab::ops::eq2ord::{universal_position, Eq2Ord};
use embedlab::ops::formula::{formula2eq, pair_formula2eq, Sigma2Sentence};
use embedlab::ops::multiplier::ClassMultiplier;
use embedlab::ops::ord2eq::Ord2Eq;
use embedlab::ops::phi_pair::{PhiPair, StagePair};
use embedlab::ops::phi_sigma2::PhiSigma2;
use embedlab::ops::replicate::Replicate;
use embedlab::ops::{endpoint_pipeline, eq2ord_v2};
use embedlab::structures::{Elem, FiniteDiagram};
use embedlab::{run, Result, RunLog, StructureStream};

pub const CRITERIA: &[(u32, &str)] = &[
    (1, "monotonicity"),
    (2, "forcing trichotomy"),
    (3, "eq2ord oracle"),
    (4, "ord2eq limit census"),
    (5, "phi_pair stabilization"),
    (6, "phi_sigma2 placements"),
    (7, "replicate fingerprints"),
    (8, "top-pair pipeline"),
    (9, "determinism"),
];

pub const W: usize = 5;
pub const WINDOW: usize = 30;
pub const SEEDED_RUNS: u64 = 20;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub v: u32,
    pub run: String,
    pub criterion: u32,
    pub name: String,
    pub digest: String,
    pub config: Value,
    pub pass: bool,
    pub summary: String,
    pub evidence: Value,
}

pub struct Timed {
    pub result: CriterionResult,
    pub wall: Duration,
}

/// Per-run seed derived from the base seed, the criterion and the run index.
pub fn derive_seed(base: u64, criterion: u32, index: u64) -> u64 {
    let mut g = Lcg::new(base ^ (u64::from(criterion) << 40) ^ index.wrapping_mul(0x9e37_79b9));
    (u64::from(g.next_u32()) << 32) | u64::from(g.next_u32())
}

fn digest(config: &Value) -> String {
    let h = Sha256::digest(config.to_string().as_bytes());
    h.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn record(criterion: u32, config: Value, pass: bool, summary: String, evidence: Value) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == criterion).map_or("?", |c| c.1);
    CriterionResult {
        v: 1,
        run: format!("c{criterion}"),
        criterion,
        name: name.into(),
        digest: digest(&config),
        config,
        pass,
        summary,
        evidence,
    }
}

pub fn run_criterion(criterion: u32, seed: u64) -> Result<CriterionResult> {
    match criterion {
        1 => monotonicity(),
        2 => trichotomy(),
        3 => eq2ord_oracle(),
        4 => ord2eq_census(seed),
        5 => phi_pair_runs(seed),
        6 => phi_sigma2_runs(seed),
        7 => replicate_fingerprints(),
        8 => top_pair(),
        9 => determinism(seed),
        _ => Err(embedlab::Error::InvalidSpec(format!("no criterion {criterion}"))),
    }
}

pub fn run_suite(criteria: &[u32], seed: u64) -> Result<Vec<Timed>> {
    criteria
        .iter()
        .map(|&c| {
            let start = Instant::now();
            let result = run_criterion(c, seed)?;
            Ok(Timed {
                result,
                wall: start.elapsed(),
            })
        })
        .collect()
}

pub fn to_jsonl(results: &[Timed]) -> Result<String> {
    let mut out = String::new();
    for t in results {
        out.push_str(&serde_json::to_string(&t.result)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn table(results: &[Timed]) -> String {
    let mut out = format!("{:<3} {:<26} {:<5} {:>8}  {}\n", "#", "criterion", "pass", "seconds", "summary");
    for t in results {
        let r = &t.result;
        out.push_str(&format!(
            "{:<3} {:<26} {:<5} {:>8.2}  {}\n",
            r.criterion,
            r.name,
            if r.pass { "ok" } else { "FAIL" },
            t.wall.as_secs_f64(),
            r.summary
        ));
    }
    out
}

fn stream(family: Family, policy: Policy, stages: usize) -> Result<StructureStream> {
    generate(&CanonicalSpec::new(family, policy, stages))
}

fn enumeration(op: OpRef) -> OperatorTarget {
    OperatorTarget::Enumeration(op)
}

// ---------------------------------------------------------------------------
// 1

pub fn shipped_operators() -> Result<Vec<OpRef>> {
    let least = Sigma2Sentence::least_element();
    let greatest = Sigma2Sentence::greatest_element();
    let rep2: OpRef = Arc::new(Replicate::new(2)?);
    Ok(vec![
        Arc::new(Replicate::new(1)?),
        rep2.clone(),
        Arc::new(Replicate::new(3)?),
        Arc::new(Ord2Eq),
        Arc::new(Eq2Ord::v1()),
        eq2ord_v2(),
        Arc::new(ClassMultiplier),
        formula2eq(least.clone(), 1)?,
        formula2eq(greatest.clone(), 2)?,
        pair_formula2eq(least, greatest)?,
        endpoint_pipeline()?,
        Arc::new(Reverse::new(rep2.clone())?),
        Arc::new(Concatenate::new(rep2.clone(), Arc::new(Replicate::new(1)?))?),
        Arc::new(DisjointUnion::new(Arc::new(Ord2Eq), Arc::new(Ord2Eq))?),
        Arc::new(IntervalFill::new(rep2, FillStyle::LeftClosed)?),
    ])
}

fn monotonicity() -> Result<CriterionResult> {
    let (max_size, max_budget) = (6, 16);
    let mut reports = Vec::new();
    for op in shipped_operators()? {
        reports.push(exhaustive_monotonicity(op.as_ref(), max_size, max_budget)?);
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.ok()).map(|r| r.operator.as_str()).collect();
    let pairs: usize = reports.iter().map(|r| r.input_pairs).sum();
    Ok(record(
        1,
        json!({"max_size": max_size, "max_budget": max_budget, "mode": "exhaustive"}),
        failed.is_empty(),
        format!("{} operators, {pairs} covering pairs, {} violations", reports.len(), failed.len()),
        serde_json::to_value(&reports)?,
    ))
}

// ---------------------------------------------------------------------------
// 2

fn trichotomy() -> Result<CriterionResult> {
    let (max_alpha, ext) = (4, 3);
    let mut ev = Vec::new();
    let mut pass = true;
    let mut violations = 0;
    for q in 1..=3 {
        let r = trichotomy_scan(&Replicate::new(q)?, max_alpha, ext, 0)?;
        pass &= r.ok() && r.permutations.len() == r.alphas;
        violations += r.violations.len() + r.unstable.len();
        ev.push(json!({
            "operator": r.operator,
            "alphas": r.alphas,
            "pairs": r.pairs,
            "extensions_checked": r.extensions_checked,
            "violations": r.violations,
            "unstable": r.unstable,
            "permutations": r.permutations.len(),
        }));
    }
    Ok(record(
        2,
        json!({"copies": [1, 2, 3], "max_alpha": max_alpha, "ext_bound": ext}),
        pass,
        format!("{violations} violations"),
        Value::Array(ev),
    ))
}

// ---------------------------------------------------------------------------
// 3

/// `a ≺ b` straight from the definition.
fn precedes(a: &[Elem], b: &[Elem]) -> bool {
    if a.len() > b.len() && a[..b.len()] == *b {
        return true;
    }
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => a[i] < b[i],
        None => false,
    }
}

fn oracle_admissible(d: &FiniteDiagram, interior: usize, last: usize) -> Result<Vec<Vec<Elem>>> {
    let p = d.classes()?;
    let dom = d.domain_vec();
    let mut out = Vec::new();
    for mask in 1u32..(1 << dom.len()) {
        let t: Vec<Elem> = (0..dom.len()).filter(|i| mask >> i & 1 == 1).map(|i| dom[i]).collect();
        let (l, init) = t.split_last().unwrap();
        if p.class_size(*l) >= last && init.iter().all(|&x| p.class_size(x) >= interior) {
            out.push(t);
        }
    }
    // insertion by counting predecessors keeps the oracle independent of sort
    let mut ranked: Vec<(usize, Vec<Elem>)> = out
        .iter()
        .map(|t| (out.iter().filter(|u| precedes(u, t)).count(), t.clone()))
        .collect();
    ranked.sort_by_key(|r| r.0);
    Ok(ranked.into_iter().map(|r| r.1).collect())
}

fn operator_tuples(op: &dyn EnumerationOperator, raw: &Eq2Ord, d: &FiniteDiagram, budget: u64) -> Result<Vec<Vec<Elem>>> {
    let by_pos: HashMap<u64, Vec<Elem>> = raw.admitted(d, budget)?.into_iter().collect();
    let out = op.eval(d, budget)?;
    let view = out.order()?;
    let Some(chain) = view.chain() else {
        return Err(embedlab::Error::NotTotal(format!("{} output", op.name())));
    };
    Ok(chain.iter().map(|x| by_pos[x].clone()).collect())
}

fn eq2ord_oracle() -> Result<CriterionResult> {
    let universe: Vec<Elem> = (0..7).collect();
    // large enough to admit every increasing tuple over the universe
    let budget = (1u32..1 << universe.len())
        .map(|m| {
            let t: Vec<Elem> = universe.iter().copied().filter(|&x| m >> x & 1 == 1).collect();
            universal_position(&t).unwrap() + 1
        })
        .max()
        .unwrap();
    let diagrams = equivalences_within(&universe, 5);
    let v1: OpRef = Arc::new(Eq2Ord::v1());
    let v2 = eq2ord_v2();
    let mut mismatches: Vec<Value> = Vec::new();
    let mut tuples = 0;
    for d in &diagrams {
        let want1 = oracle_admissible(d, 2, 1)?;
        let got1 = operator_tuples(v1.as_ref(), &Eq2Ord::v1(), d, budget)?;
        let mut want2 = oracle_admissible(d, 3, 2)?;
        want2.reverse();
        let got2 = operator_tuples(v2.as_ref(), &Eq2Ord::v2_raw(), d, budget)?;
        tuples += want1.len() + want2.len();
        for (name, want, got) in [("eq2ord_v1", want1, got1), ("eq2ord_v2", want2, got2)] {
            if want != got && mismatches.len() < 5 {
                mismatches.push(json!({"operator": name, "input": d.to_text(), "want": want, "got": got}));
            }
        }
    }
    let worked = FiniteDiagram::partition([&[0u64, 1][..], &[2][..]]);
    let worked_got = operator_tuples(v1.as_ref(), &Eq2Ord::v1(), &worked, budget)?;
    let worked_want: Vec<Vec<Elem>> = vec![vec![0, 1, 2], vec![0, 1], vec![0, 2], vec![0], vec![1, 2], vec![1], vec![2]];
    let worked_ok = worked_got == worked_want;
    Ok(record(
        3,
        json!({"universe": universe.len(), "max_elements": 5, "budget": budget}),
        mismatches.is_empty() && worked_ok,
        format!(
            "{} diagrams, {tuples} tuples, {} mismatches, worked example {}",
            diagrams.len(),
            mismatches.len(),
            if worked_ok { "exact" } else { "WRONG" }
        ),
        json!({"mismatches": mismatches, "worked_example": worked_got}),
    ))
}

// ---------------------------------------------------------------------------
// 4

fn ord2eq_census(seed: u64) -> Result<CriterionResult> {
    let stages = 100;
    let target = enumeration(Arc::new(Ord2Eq));
    let mut correct = 0;
    let mut runs = Vec::new();
    for (fam, ones, twos) in [(Family::OnePlusEta, 1, 0), (Family::EtaPlusOne, 0, 1)] {
        for i in 0..SEEDED_RUNS {
            let s = derive_seed(seed, 4, i);
            let input = stream(fam, Policy::Permuted(s), stages)?;
            let log = run(&target, &input, stages, &BudgetSchedule::Linear)?;
            let c = census(&log, WINDOW)?;
            let got = (c.frozen_of_size(1), c.frozen_of_size(2));
            let ok = got == (ones, twos);
            correct += ok as usize;
            runs.push(json!({"input": input.provenance(), "frozen_size_one": got.0, "frozen_size_two": got.1, "ok": ok}));
        }
    }
    let total = runs.len();
    Ok(record(
        4,
        json!({"seed": seed, "stages": stages, "window": WINDOW, "runs_per_family": SEEDED_RUNS, "schedule": "linear"}),
        correct == total,
        format!("{correct}/{total} correct"),
        Value::Array(runs),
    ))
}

// ---------------------------------------------------------------------------
// 5

/// Position of the element added at each stage of a target presentation.
fn insert_positions(s: &StructureStream) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for d in s.stages() {
        let chain = d.total_chain()?;
        let i = chain.iter().position(|x| !seen.contains(x)).unwrap();
        seen.extend(chain.iter().copied());
        out.push(i);
    }
    Ok(out)
}

struct PairTrace {
    guesses: Vec<(char, usize)>,
    switches: usize,
    /// Stage after which the guess can no longer change.
    settle: usize,
    stable: bool,
    rule_ok: bool,
}

fn trace_phi_pair(input: &StructureStream, a: &StructureStream, b: &StructureStream, expect: char) -> Result<PairTrace> {
    let stages = input.len();
    let op = OperatorTarget::Construction(Arc::new(PhiPair::new(StagePair::new(a, b)?)));
    let log = run(&op, input, stages, &BudgetSchedule::Const(0))?;
    let guesses: Vec<(char, usize)> = log
        .records
        .iter()
        .map(|r| match &r.annotation {
            Some(Annotation::Guess { target, t, .. }) => (*target, *t),
            _ => ('?', 0),
        })
        .collect();
    let switches = guesses.windows(2).filter(|w| w[0].0 != w[1].0).count();
    // the true extremum, then the first arrival beyond the opposite candidate
    let arrivals = input.arrival_order();
    let last = input.last().unwrap().order()?;
    let chain = last.chain().unwrap();
    let (extreme, beyond): (Elem, fn(&embedlab::structures::OrderView, Elem, Elem) -> bool) = match expect {
        'A' => (chain[0], |v, x, y| v.less(y, x)),
        _ => (*chain.last().unwrap(), |v, x, y| v.less(x, y)),
    };
    let ext_stage = arrivals.iter().position(|&x| x == extreme).unwrap();
    let mut settle = stages;
    for s in ext_stage + 1..stages {
        // arrival at s goes beyond every earlier arrival on the open side
        if arrivals[..s].iter().all(|&y| beyond(&last, arrivals[s], y)) {
            settle = s;
            break;
        }
    }
    let stable = settle < stages && guesses[settle..].iter().all(|g| g.0 == expect);
    let target = if expect == 'A' { a } else { b };
    let pos = insert_positions(target)?;
    let out = log.output_stream()?;
    let mut rule_ok = true;
    let mut prev: Option<Vec<Elem>> = None;
    for (s, d) in out.stages().enumerate() {
        let chain = d.total_chain()?;
        if let Some(p) = &prev {
            if s > settle {
                let new: Vec<usize> = (0..chain.len()).filter(|&i| !p.contains(&chain[i])).collect();
                rule_ok &= new.len() == 1 && new[0] == pos[guesses[s].1];
            }
        }
        prev = Some(chain);
    }
    Ok(PairTrace {
        guesses,
        switches,
        settle,
        stable,
        rule_ok,
    })
}

fn phi_pair_runs(seed: u64) -> Result<CriterionResult> {
    let domain = 64;
    let a = stream(Family::OmegaK(2), Policy::Fair, domain + 1)?;
    let b = stream(Family::OmegaStarK(2), Policy::Fair, domain + 1)?;
    let mut correct = 0;
    let mut runs = Vec::new();
    for (fam, expect) in [(Family::Omega, 'A'), (Family::OmegaStar, 'B')] {
        for i in 0..SEEDED_RUNS {
            let input = stream(fam, Policy::Permuted(derive_seed(seed, 5, i)), domain)?;
            let t = trace_phi_pair(&input, &a, &b, expect)?;
            let ok = t.stable && t.rule_ok;
            correct += ok as usize;
            runs.push(json!({"input": input.provenance(), "switches": t.switches, "settled_by": t.settle, "stable": t.stable, "extension_rule": t.rule_ok}));
        }
    }
    let total = runs.len();
    let mut monotone_ok = true;
    for (fam, policy, expect) in [(Family::Omega, Policy::Ascending, 'A'), (Family::OmegaStar, Policy::Descending, 'B')] {
        let input = stream(fam, policy, domain)?;
        let t = trace_phi_pair(&input, &a, &b, expect)?;
        let ok = t.switches <= 2 && t.guesses.last().map(|g| g.0) == Some(expect);
        monotone_ok &= ok;
        runs.push(json!({"input": input.provenance(), "switches": t.switches, "ok": ok}));
    }
    Ok(record(
        5,
        json!({"seed": seed, "domain": domain, "targets": [a.provenance(), b.provenance()], "runs_per_family": SEEDED_RUNS}),
        correct == total && monotone_ok,
        format!(
            "{correct}/{total} stabilized, monotone policies {}",
            if monotone_ok { "ok" } else { "FAILED" }
        ),
        Value::Array(runs),
    ))
}

// ---------------------------------------------------------------------------
// 6

fn placement_suffix(log: &RunLog, top: bool) -> usize {
    log.records
        .iter()
        .rev()
        .take_while(|r| matches!(r.annotation, Some(Annotation::Placement { top: t, .. }) if t == top))
        .count()
}

fn phi_sigma2_runs(seed: u64) -> Result<CriterionResult> {
    let (stages, need) = (100, 50);
    let op = OperatorTarget::Construction(Arc::new(PhiSigma2::new(
        Sigma2Sentence::least_element(),
        Sigma2Sentence::greatest_element(),
    )?));
    let mut correct = 0;
    let mut runs = Vec::new();
    for (fam, top) in [(Family::OmegaK(2), true), (Family::OmegaStarK(2), false)] {
        for i in 0..SEEDED_RUNS {
            let input = stream(fam, Policy::Permuted(derive_seed(seed, 6, i)), stages)?;
            let log = run(&op, &input, stages, &BudgetSchedule::Const(0))?;
            let suffix = placement_suffix(&log, top);
            let ok = suffix >= need;
            correct += ok as usize;
            runs.push(json!({"input": input.provenance(), "suffix": suffix, "ok": ok}));
        }
    }
    let total = runs.len();
    Ok(record(
        6,
        json!({"seed": seed, "stages": stages, "min_suffix": need, "runs_per_family": SEEDED_RUNS}),
        correct == total,
        format!("{correct}/{total} with suffix >= {need}"),
        Value::Array(runs),
    ))
}

// ---------------------------------------------------------------------------
// 7

fn replicate_fingerprints() -> Result<CriterionResult> {
    let stages = 300;
    let mut runs = Vec::new();
    let mut pass = true;
    for (k, q) in [(1u32, 2u32), (2, 2), (2, 3), (3, 2)] {
        let op = enumeration(Arc::new(Replicate::new(q)?));
        let want = (k * q - 1) as usize;
        for (fam, up) in [(Family::OmegaK(k), true), (Family::OmegaStarK(k), false)] {
            let input = stream(fam, Policy::Fair, stages)?;
            let fp = fingerprint(&run(&op, &input, stages, &BudgetSchedule::Linear)?, W)?;
            let s = &fp.summary;
            let ok = if up {
                s.pred_unstable_count == want && s.stable_least.is_some()
            } else {
                s.succ_unstable_count == want && s.stable_greatest.is_some()
            };
            pass &= ok;
            runs.push(json!({"input": input.provenance(), "copies": q, "expected_unstable": want, "summary": s, "ok": ok}));
        }
    }
    let n = runs.len();
    Ok(record(
        7,
        json!({"stages": stages, "w": W, "cases": [[1, 2], [2, 2], [2, 3], [3, 2]]}),
        pass,
        format!("{} of {n} cases exact", runs.iter().filter(|r| r["ok"] == true).count()),
        Value::Array(runs),
    ))
}

// ---------------------------------------------------------------------------
// 8

fn top_pair() -> Result<CriterionResult> {
    let stages = 100;
    let pair = enumeration(pair_formula2eq(Sigma2Sentence::least_element(), Sigma2Sentence::greatest_element())?);
    let schedule = BudgetSchedule::Sqrt;
    let mut cases = Vec::new();
    let mut pass = true;
    for k in 1..=3 {
        for (fam, claim) in [(Family::OmegaK(k), Family::EHatK(1)), (Family::OmegaStarK(k), Family::EHatK(2))] {
            let input = stream(fam, Policy::Fair, stages)?;
            let log = run(&pair, &input, stages, &schedule)?;
            let v = consistency_verdict(&log, &claim, W, WINDOW)?;
            pass &= v.consistent();
            cases.push(json!({"input": input.provenance(), "claim": claim.to_string(), "verdict": v}));
        }
    }
    let pipeline = enumeration(endpoint_pipeline()?);
    for (fam, least, greatest) in [(Family::EHatK(1), true, false), (Family::EHatK(2), false, true)] {
        let input = stream(fam, Policy::Fair, stages)?;
        let fp = fingerprint(&run(&pipeline, &input, stages, &BudgetSchedule::Linear)?, W)?;
        let s = &fp.summary;
        let ok = s.stable_least.is_some() == least && s.stable_greatest.is_some() == greatest;
        pass &= ok;
        let expect = if least { "one_plus_eta" } else { "eta_plus_one" };
        cases.push(json!({"input": input.provenance(), "claim": expect, "summary": s, "ok": ok}));
    }
    let n = cases.len();
    let good = cases
        .iter()
        .filter(|c| c.get("ok") == Some(&Value::Bool(true)) || c["verdict"]["verdict"] == "CONSISTENT")
        .count();
    Ok(record(
        8,
        json!({"stages": stages, "w": W, "window": WINDOW, "pair_schedule": schedule.to_string(), "pipeline_schedule": "linear"}),
        pass,
        format!("{good}/{n} cases as expected"),
        Value::Array(cases),
    ))
}

// ---------------------------------------------------------------------------
// 9

/// In-process half of the determinism check: repeated criteria and a run log
/// serialize identically. The byte comparison of two CLI invocations lives in
/// the acceptance tests.
fn determinism(seed: u64) -> Result<CriterionResult> {
    let mut digests: BTreeMap<&str, [String; 2]> = BTreeMap::new();
    for round in 0..2 {
        let c5 = serde_json::to_string(&phi_pair_runs(seed)?)?;
        let c6 = serde_json::to_string(&phi_sigma2_runs(seed)?)?;
        let input = stream(Family::OnePlusEta, Policy::Permuted(derive_seed(seed, 9, 0)), 60)?;
        let log = run(&enumeration(Arc::new(Ord2Eq)), &input, 60, &BudgetSchedule::Linear)?.to_jsonl()?;
        for (name, text) in [("criterion_5", c5), ("criterion_6", c6), ("ord2eq_log", log)] {
            digests.entry(name).or_default()[round] = digest(&Value::String(text));
        }
    }
    let same = digests.values().all(|d| d[0] == d[1]);
    Ok(record(
        9,
        json!({"seed": seed, "repeated": ["criterion_5", "criterion_6", "ord2eq_log"]}),
        same,
        format!("{} artifacts {}", digests.len(), if same { "identical" } else { "DIFFER" }),
        serde_json::to_value(&digests)?,
    ))
}

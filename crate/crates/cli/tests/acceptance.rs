//! Acceptance run: one line per criterion.
//!
//! The suite binary is run twice with the same seed. Criteria 1 to 8 are read
//! from the first report, 9 is the byte comparison of both reports. Criteria 3
//! and 7 are additionally recomputed here against oracles that share no code
//! with the operators or the classifier.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use embedlab::kernel::{run, BudgetSchedule, OperatorTarget};
use embedlab::ops::eq2ord::Eq2Ord;
use embedlab::ops::eq2ord_v2;
use embedlab::ops::replicate::Replicate;
use embedlab::{generate, CanonicalSpec, EnumerationOperator, Fact, Family, FiniteDiagram, Policy, RunLog};
use serde_json::Value;

const SEED: &str = "7";

// pinned parameters
const W: usize = 5;
const REPLICATE_STAGES: usize = 300;
const REPLICATE_CASES: [(u32, u32); 4] = [(1, 2), (2, 2), (2, 3), (3, 2)];
const ORACLE_MAX_ELEMENTS: usize = 5;
const ORACLE_BUDGET: u64 = 128;
const EXPECTED_RUNS: &[(u32, &str)] = &[(4, "40/40"), (5, "40/40"), (6, "40/40")];

/// Criteria that currently fail for a reason recorded with the project
/// decisions. They are still reported, and a pass is reported as a pass.
const KNOWN_GAPS: &[u32] = &[8];

fn suite(out: &Path) -> String {
    let status = Command::new(env!("CARGO_BIN_EXE_embedlab"))
        .args(["suite", "--all", "--seed", SEED, "--out"])
        .arg(out)
        .env_remove("EMBEDLAB_SEED")
        .output()
        .expect("suite runs");
    let code = status.status.code();
    assert!(matches!(code, Some(0) | Some(4)), "suite exited with {code:?}");
    std::fs::read_to_string(out.join("suite.jsonl")).expect("suite.jsonl written")
}

// ---------------------------------------------------------------------------
// eq2ord oracle

/// Kleene-Brouwer order on increasing tuples: a proper extension comes before
/// its prefix, otherwise the first difference decides.
fn kb(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x.cmp(y);
        }
    }
    b.len().cmp(&a.len())
}

/// All partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            for b in 0..=blocks {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn expected_tuples(labels: &[usize], interior: usize, last: usize) -> Vec<Vec<u64>> {
    let size = |x: usize| labels.iter().filter(|&&l| l == labels[x]).count();
    let n = labels.len();
    let mut out: Vec<Vec<u64>> = (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>())
        .filter(|t| {
            let (l, init) = t.split_last().unwrap();
            size(*l) >= last && init.iter().all(|&x| size(x) >= interior)
        })
        .map(|t| t.into_iter().map(|x| x as u64).collect())
        .collect();
    out.sort_by(|a, b| kb(a, b));
    out
}

/// The chain of a finite total order given by generating `lt` facts, by
/// repeatedly removing the unique element with no remaining predecessor.
fn chain_of(facts: &BTreeSet<Fact>) -> Option<Vec<u64>> {
    let mut elems = BTreeSet::new();
    let mut above: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut below: HashMap<u64, usize> = HashMap::new();
    for f in facts {
        match *f {
            Fact::El(x) => {
                elems.insert(x);
            }
            Fact::Lt(a, b) => {
                elems.insert(a);
                elems.insert(b);
                above.entry(a).or_default().push(b);
                *below.entry(b).or_default() += 1;
            }
            Fact::Sim(..) => return None,
        }
    }
    let mut ready: Vec<u64> = elems.iter().copied().filter(|x| !below.contains_key(x)).collect();
    let mut chain = Vec::new();
    while let Some(x) = ready.pop() {
        if !ready.is_empty() {
            return None;
        }
        chain.push(x);
        for &y in above.get(&x).map_or(&[][..], |v| v) {
            let c = below.get_mut(&y).unwrap();
            *c -= 1;
            if *c == 0 {
                ready.push(y);
            }
        }
    }
    (chain.len() == elems.len()).then_some(chain)
}

fn operator_order(op: &dyn EnumerationOperator, raw: &Eq2Ord, d: &FiniteDiagram) -> Vec<Vec<u64>> {
    let names: HashMap<u64, Vec<u64>> = raw.admitted(d, ORACLE_BUDGET).unwrap().into_iter().collect();
    let out = op.eval(d, ORACLE_BUDGET).unwrap();
    let facts: BTreeSet<Fact> = out.facts().iter().copied().collect();
    chain_of(&facts).expect("total output").iter().map(|x| names[x].clone()).collect()
}

fn eq2ord_oracle() -> (bool, String) {
    let v1 = Eq2Ord::v1();
    let v2 = eq2ord_v2();
    let (mut checked, mut bad) = (0, Vec::new());
    for n in 1..=ORACLE_MAX_ELEMENTS {
        for labels in partitions(n) {
            let mut blocks: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
            for (x, &l) in labels.iter().enumerate() {
                blocks.entry(l).or_default().push(x as u64);
            }
            let d = FiniteDiagram::partition(blocks.values().map(|b| b.as_slice()));
            let mut want2 = expected_tuples(&labels, 3, 2);
            want2.reverse();
            checked += 1;
            if operator_order(&v1, &v1, &d) != expected_tuples(&labels, 2, 1) {
                bad.push(format!("v1 {labels:?}"));
            }
            if operator_order(v2.as_ref(), &Eq2Ord::v2_raw(), &d) != want2 {
                bad.push(format!("v2 {labels:?}"));
            }
        }
    }
    let worked = FiniteDiagram::partition([&[0u64, 1][..], &[2][..]]);
    let worked_ok = operator_order(&v1, &v1, &worked)
        == vec![vec![0, 1, 2], vec![0, 1], vec![0, 2], vec![0], vec![1, 2], vec![1], vec![2]];
    (
        bad.is_empty() && worked_ok,
        format!("{checked} partitions, {} mismatches, worked example {worked_ok}", bad.len()),
    )
}

// ---------------------------------------------------------------------------
// replicate oracle

/// Elements whose immediate neighbour on the given side changed at least `W`
/// times after they appeared, plus whether the end on that side settled.
fn unstable_count(log: &RunLog, below: bool) -> Option<(usize, bool)> {
    let mut facts = BTreeSet::new();
    let mut last: HashMap<u64, Option<u64>> = HashMap::new();
    let mut changes: HashMap<u64, usize> = HashMap::new();
    let (mut end, mut end_changes) = (None, 0);
    for r in &log.records {
        facts.extend(r.new_facts.iter().copied());
        let mut chain = chain_of(&facts)?;
        if !below {
            chain.reverse();
        }
        for (i, &x) in chain.iter().enumerate() {
            let n = i.checked_sub(1).map(|j| chain[j]);
            match last.insert(x, n) {
                Some(old) if old != n => *changes.entry(x).or_default() += 1,
                _ => {}
            }
        }
        let e = chain.first().copied();
        if end.is_some() && e != end {
            end_changes += 1;
        }
        end = e;
    }
    Some((changes.values().filter(|&&c| c >= W).count(), end.is_some() && end_changes < W))
}

fn replicate_oracle() -> (bool, String) {
    let mut exact = 0;
    for (k, q) in REPLICATE_CASES {
        let op = OperatorTarget::Enumeration(Arc::new(Replicate::new(q).unwrap()));
        for (fam, below) in [(Family::OmegaK(k), true), (Family::OmegaStarK(k), false)] {
            let input = generate(&CanonicalSpec::new(fam, Policy::Fair, REPLICATE_STAGES)).unwrap();
            let log = run(&op, &input, REPLICATE_STAGES, &BudgetSchedule::Linear).unwrap();
            if unstable_count(&log, below) == Some(((k * q - 1) as usize, true)) {
                exact += 1;
            }
        }
    }
    let total = 2 * REPLICATE_CASES.len();
    (exact == total, format!("{exact}/{total} cases exact"))
}

// ---------------------------------------------------------------------------

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let first = suite(&dir.path().join("a"));
    let second = suite(&dir.path().join("b"));

    let records: BTreeMap<u64, Value> = first
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["criterion"].as_u64().unwrap(), v)
        })
        .collect();

    let mut lines: Vec<(u32, bool, String)> = Vec::new();
    for c in 1..=8u32 {
        let r = &records[&u64::from(c)];
        let mut pass = r["pass"].as_bool().unwrap();
        let mut note = format!("{}: {}", r["name"].as_str().unwrap(), r["summary"].as_str().unwrap());
        if let Some((_, want)) = EXPECTED_RUNS.iter().find(|e| e.0 == c) {
            pass &= note.contains(want);
        }
        let oracle = match c {
            3 => Some(eq2ord_oracle()),
            7 => Some(replicate_oracle()),
            _ => None,
        };
        if let Some((ok, summary)) = oracle {
            pass &= ok;
            note.push_str(&format!("; independent oracle: {summary}"));
        }
        lines.push((c, pass, note));
    }
    let same = first == second;
    lines.push((9, same, format!("determinism: two reports {}", if same { "byte-identical" } else { "DIFFER" })));

    for (c, pass, note) in &lines {
        let tag = match (pass, KNOWN_GAPS.contains(c)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known gap)",
            (false, false) => "FAIL",
        };
        println!("criterion {c}: {tag} {note}");
    }
    let unexpected: Vec<u32> = lines.iter().filter(|l| !l.1 && !KNOWN_GAPS.contains(&l.0)).map(|l| l.0).collect();
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {unexpected:?}");
        std::process::exit(1);
    }
}

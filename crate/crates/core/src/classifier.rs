//! Reading run logs back as evidence about the limit structure.
//!
//! Everything here is a finite proxy. A class is "frozen" if the operator
//! says so or if it stopped growing a while ago; an element is "pred-unstable"
//! if its immediate predecessor changed at least `W` times, which is how a
//! left limit point looks after finitely many stages.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::Family;
use crate::kernel::{Annotation, RunLog};
use crate::structures::{Elem, FiniteDiagram, Signature, UnionFind};

pub const DEFAULT_W: usize = 5;
pub const DEFAULT_WINDOW: usize = 30;
pub const ISO_LIMIT: usize = 8;

// ---------------------------------------------------------------------------
// census

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrozenRule {
    /// Pinned by the operator in every one of the last `window` stages.
    Annotation,
    /// No growth in the last `window` stages.
    Window,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub representative: Elem,
    pub size: usize,
    pub frozen: bool,
    pub born: usize,
    pub last_growth_stage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCensus {
    pub stages: usize,
    pub window: usize,
    pub rule: FrozenRule,
    /// Sorted by representative (the class minimum).
    pub classes: Vec<ClassEntry>,
}

impl ClassCensus {
    pub fn frozen(&self) -> impl Iterator<Item = &ClassEntry> {
        self.classes.iter().filter(|c| c.frozen)
    }

    pub fn frozen_of_size(&self, k: usize) -> usize {
        self.frozen().filter(|c| c.size == k).count()
    }

    /// Class size → number of classes.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.classes {
            *h.entry(c.size).or_insert(0) += 1;
        }
        h
    }

    pub fn class_of(&self, rep: Elem) -> Option<&ClassEntry> {
        self.classes
            .binary_search_by_key(&rep, |c| c.representative)
            .ok()
            .map(|i| &self.classes[i])
    }
}

fn pinned_ids(a: Option<&Annotation>) -> Option<Vec<Elem>> {
    match a? {
        Annotation::Pinned { size_one, size_two } => Some(size_one.iter().chain(size_two.iter()).copied().collect()),
        _ => None,
    }
}

pub fn census(log: &RunLog, window: usize) -> Result<ClassCensus> {
    if log.signature != Signature::Equivalence {
        return Err(Error::SignatureMismatch {
            expected: Signature::Equivalence,
            found: log.signature,
        });
    }
    struct Info {
        min: Elem,
        born: usize,
        last: usize,
    }
    let mut index: HashMap<Elem, usize> = HashMap::new();
    let mut uf = UnionFind::new(0);
    let mut info: Vec<Info> = Vec::new();
    let mut touch = |x: Elem, s: usize, uf: &mut UnionFind, info: &mut Vec<Info>| -> usize {
        *index.entry(x).or_insert_with(|| {
            info.push(Info { min: x, born: s, last: s });
            uf.push()
        })
    };
    for r in &log.records {
        let s = r.stage;
        for f in &r.new_facts {
            let (a, b) = f.elems();
            let ia = touch(a, s, &mut uf, &mut info);
            if let Some(b) = b {
                let ib = touch(b, s, &mut uf, &mut info);
                let (ra, rb) = (uf.find(ia), uf.find(ib));
                if ra != rb {
                    let root = uf.union(ra, rb);
                    let other = if root == ra { rb } else { ra };
                    info[root].min = info[root].min.min(info[other].min);
                    info[root].born = info[root].born.min(info[other].born);
                    info[root].last = s;
                }
            }
        }
    }
    let n = log.records.len();
    let annotated = log.records.iter().any(|r| matches!(r.annotation, Some(Annotation::Pinned { .. })));
    let rule = if annotated { FrozenRule::Annotation } else { FrozenRule::Window };
    let tail = &log.records[n.saturating_sub(window)..];
    let mut by_root: BTreeMap<Elem, ClassEntry> = BTreeMap::new();
    let roots: Vec<usize> = (0..info.len()).map(|i| uf.find(i)).collect();
    let mut pinned_roots: Option<Vec<usize>> = None;
    if rule == FrozenRule::Annotation && !tail.is_empty() && n >= window {
        // roots pinned in every record of the window
        let mut keep: Option<Vec<usize>> = None;
        for r in tail {
            let ids = pinned_ids(r.annotation.as_ref()).unwrap_or_default();
            let here: Vec<usize> = ids.iter().filter_map(|x| index.get(x)).map(|&i| roots[i]).collect();
            keep = Some(match keep {
                None => here,
                Some(k) => k.into_iter().filter(|x| here.contains(x)).collect(),
            });
        }
        pinned_roots = keep;
    }
    for (i, &root) in roots.iter().enumerate() {
        let e = by_root.entry(info[root].min).or_insert_with(|| ClassEntry {
            representative: info[root].min,
            size: 0,
            frozen: match rule {
                FrozenRule::Annotation => pinned_roots.as_ref().is_some_and(|p| p.contains(&root)),
                FrozenRule::Window => n >= window && info[root].last < n - window,
            },
            born: info[root].born,
            last_growth_stage: info[root].last,
        });
        let _ = i;
        e.size += 1;
    }
    Ok(ClassCensus {
        stages: n,
        window,
        rule,
        classes: by_root.into_values().collect(),
    })
}

// ---------------------------------------------------------------------------
// fingerprint

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementTrace {
    pub element: Elem,
    pub entered_at: usize,
    pub pred_changes: usize,
    pub succ_changes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FingerprintSummary {
    pub pred_unstable_count: usize,
    pub succ_unstable_count: usize,
    pub stable_least: Option<Elem>,
    pub stable_greatest: Option<Elem>,
    pub least_changes: usize,
    pub greatest_changes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderFingerprint {
    pub stages: usize,
    pub w: usize,
    /// Sorted by element id.
    pub elements: Vec<ElementTrace>,
    pub summary: FingerprintSummary,
}

impl OrderFingerprint {
    pub fn pred_unstable(&self) -> Vec<Elem> {
        self.elements.iter().filter(|e| e.pred_changes >= self.w).map(|e| e.element).collect()
    }

    pub fn succ_unstable(&self) -> Vec<Elem> {
        self.elements.iter().filter(|e| e.succ_changes >= self.w).map(|e| e.element).collect()
    }
}

struct Tracked {
    entered_at: usize,
    pred: Option<Elem>,
    succ: Option<Elem>,
    pred_changes: usize,
    succ_changes: usize,
}

pub fn fingerprint(log: &RunLog, w: usize) -> Result<OrderFingerprint> {
    if log.signature != Signature::LinearOrder {
        return Err(Error::SignatureMismatch {
            expected: Signature::LinearOrder,
            found: log.signature,
        });
    }
    let stream = log.output_stream()?;
    let mut seen: HashMap<Elem, Tracked> = HashMap::new();
    let (mut least, mut greatest): (Option<Elem>, Option<Elem>) = (None, None);
    let (mut least_changes, mut greatest_changes) = (0, 0);
    for (s, d) in stream.stages().enumerate() {
        let view = d.order()?;
        let Some(chain) = view.chain() else {
            return Err(Error::NotTotal(format!("output stage {s}")));
        };
        for (i, &x) in chain.iter().enumerate() {
            let pred = i.checked_sub(1).map(|j| chain[j]);
            let succ = chain.get(i + 1).copied();
            match seen.get_mut(&x) {
                None => {
                    seen.insert(
                        x,
                        Tracked {
                            entered_at: s,
                            pred,
                            succ,
                            pred_changes: 0,
                            succ_changes: 0,
                        },
                    );
                }
                Some(t) => {
                    if t.pred != pred {
                        t.pred = pred;
                        t.pred_changes += 1;
                    }
                    if t.succ != succ {
                        t.succ = succ;
                        t.succ_changes += 1;
                    }
                }
            }
        }
        let (lo, hi) = (chain.first().copied(), chain.last().copied());
        if least.is_some() && lo != least {
            least_changes += 1;
        }
        if greatest.is_some() && hi != greatest {
            greatest_changes += 1;
        }
        least = least.or(lo).and(lo);
        greatest = greatest.or(hi).and(hi);
    }
    let mut elements: Vec<ElementTrace> = seen
        .into_iter()
        .map(|(x, t)| ElementTrace {
            element: x,
            entered_at: t.entered_at,
            pred_changes: t.pred_changes,
            succ_changes: t.succ_changes,
        })
        .collect();
    elements.sort_by_key(|e| e.element);
    let summary = FingerprintSummary {
        pred_unstable_count: elements.iter().filter(|e| e.pred_changes >= w).count(),
        succ_unstable_count: elements.iter().filter(|e| e.succ_changes >= w).count(),
        stable_least: least.filter(|_| least_changes < w),
        stable_greatest: greatest.filter(|_| greatest_changes < w),
        least_changes,
        greatest_changes,
    };
    Ok(OrderFingerprint {
        stages: log.records.len(),
        w,
        elements,
        summary,
    })
}

// ---------------------------------------------------------------------------
// small isomorphism

/// Isomorphism test for diagrams of at most eight elements, by backtracking
/// over bijections. Compares closures, so generating sets may differ.
pub fn finite_iso(d1: &FiniteDiagram, d2: &FiniteDiagram) -> Result<bool> {
    if d1.signature() != d2.signature() {
        return Err(Error::SignatureMismatch {
            expected: d1.signature(),
            found: d2.signature(),
        });
    }
    for d in [d1, d2] {
        if d.size() > ISO_LIMIT {
            return Err(Error::TooLarge(format!("{} elements, limit {ISO_LIMIT}", d.size())));
        }
    }
    if d1.size() != d2.size() {
        return Ok(false);
    }
    let (a, b) = (d1.domain_vec(), d2.domain_vec());
    let n = a.len();
    // rel[i][j] on positions, plus an invariant per element to prune candidates
    let (ra, ia, rb, ib): (Vec<Vec<bool>>, Vec<(usize, usize)>, Vec<Vec<bool>>, Vec<(usize, usize)>) = match d1.signature() {
        Signature::LinearOrder => {
            let (va, vb) = (d1.order()?, d2.order()?);
            let rel = |v: &crate::structures::OrderView, e: &[Elem]| -> Vec<Vec<bool>> {
                e.iter().map(|&x| e.iter().map(|&y| v.less(x, y)).collect()).collect()
            };
            let (ra, rb) = (rel(&va, &a), rel(&vb, &b));
            let inv = |r: &Vec<Vec<bool>>| -> Vec<(usize, usize)> {
                (0..n)
                    .map(|i| ((0..n).filter(|&j| r[j][i]).count(), (0..n).filter(|&j| r[i][j]).count()))
                    .collect()
            };
            let (ia, ib) = (inv(&ra), inv(&rb));
            (ra, ia, rb, ib)
        }
        Signature::Equivalence => {
            let (pa, pb) = (d1.classes()?, d2.classes()?);
            let mut sa = pa.sizes();
            let mut sb = pb.sizes();
            sa.sort_unstable();
            sb.sort_unstable();
            if sa != sb {
                return Ok(false);
            }
            let rel = |p: &crate::structures::Partition, e: &[Elem]| -> Vec<Vec<bool>> {
                e.iter().map(|&x| e.iter().map(|&y| p.same(x, y)).collect()).collect()
            };
            let ia = a.iter().map(|&x| (pa.class_size(x), 0)).collect();
            let ib = b.iter().map(|&x| (pb.class_size(x), 0)).collect();
            (rel(&pa, &a), ia, rel(&pb, &b), ib)
        }
    };
    fn extend(i: usize, map: &mut Vec<usize>, used: &mut [bool], ra: &[Vec<bool>], rb: &[Vec<bool>], ia: &[(usize, usize)], ib: &[(usize, usize)]) -> bool {
        let n = ra.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || ia[i] != ib[j] {
                continue;
            }
            if (0..i).any(|k| ra[k][i] != rb[map[k]][j] || ra[i][k] != rb[j][map[k]]) {
                continue;
            }
            used[j] = true;
            map.push(j);
            if extend(i + 1, map, used, ra, rb, ia, ib) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    Ok(extend(0, &mut Vec::with_capacity(n), &mut vec![false; n], &ra, &rb, &ia, &ib))
}

// ---------------------------------------------------------------------------
// verdicts

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub verdict: String,
    pub checks: Vec<Check>,
    /// Witness of the first failed check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.verdict, self.claim)?;
        if let Some(w) = &self.witness {
            write!(f, " (witness: {w})")?;
        }
        Ok(())
    }
}

fn list(xs: &[Elem]) -> String {
    let shown: Vec<String> = xs.iter().take(8).map(|x| x.to_string()).collect();
    if xs.len() > 8 {
        format!("[{}, ...]", shown.join(", "))
    } else {
        format!("[{}]", shown.join(", "))
    }
}

fn count_check(name: &str, expected: usize, elems: Vec<Elem>) -> Check {
    let ok = elems.len() == expected;
    Check {
        name: name.into(),
        expected: expected.to_string(),
        observed: elems.len().to_string(),
        ok,
        witness: (!ok).then(|| format!("{} elements {}", name.trim_end_matches("_count"), list(&elems))),
    }
}

fn endpoint_check(name: &str, want: bool, found: Option<Elem>, changes: usize) -> Check {
    let ok = want == found.is_some();
    let observed = match found {
        Some(x) => format!("element {x}"),
        None => format!("none ({changes} changes)"),
    };
    Check {
        name: name.into(),
        expected: if want { "present".into() } else { "absent".into() },
        ok,
        witness: (!ok).then(|| match found {
            Some(x) => format!("{name} element {x}"),
            None => format!("{name} changed {changes} times"),
        }),
        observed,
    }
}

fn order_checks(fp: &OrderFingerprint, claim: &Family) -> Vec<Check> {
    let s = &fp.summary;
    let mut checks = Vec::new();
    let (least, greatest) = match claim {
        Family::Omega | Family::OmegaK(_) => (true, false),
        Family::OmegaStar | Family::OmegaStarK(_) => (false, true),
        Family::OnePlusEta => (true, false),
        Family::EtaPlusOne => (false, true),
        _ => (false, false),
    };
    if let Some(b) = claim.blocks() {
        let limits = (b.unsigned_abs() as usize).saturating_sub(1);
        let (p, q) = if b > 0 { (limits, 0) } else { (0, limits) };
        checks.push(count_check("pred_unstable_count", p, fp.pred_unstable()));
        checks.push(count_check("succ_unstable_count", q, fp.succ_unstable()));
    }
    checks.push(endpoint_check("stable_least", least, s.stable_least, s.least_changes));
    checks.push(endpoint_check("stable_greatest", greatest, s.stable_greatest, s.greatest_changes));
    checks
}

fn class_desc(c: &ClassEntry) -> String {
    format!("class of {} (size {})", c.representative, c.size)
}

fn census_checks(c: &ClassCensus, claim: &Family) -> Vec<Check> {
    let frozen: Vec<&ClassEntry> = c.frozen().collect();
    let sizes = |f: &[&ClassEntry]| -> String {
        let mut v: Vec<usize> = f.iter().map(|e| e.size).collect();
        v.sort_unstable();
        format!("{v:?}")
    };
    match *claim {
        Family::E => vec![Check {
            name: "frozen_classes".into(),
            expected: "none".into(),
            observed: sizes(&frozen),
            ok: frozen.is_empty(),
            witness: frozen.first().map(|e| format!("frozen {}", class_desc(e))),
        }],
        Family::Ek(k) => {
            let k = k as usize;
            let wrong = frozen.iter().find(|e| e.size != k);
            let ok = frozen.len() == 1 && wrong.is_none();
            vec![Check {
                name: "frozen_classes".into(),
                expected: format!("exactly one, of size {k}"),
                observed: sizes(&frozen),
                ok,
                witness: (!ok).then(|| match (wrong, frozen.len()) {
                    (Some(e), _) => format!("frozen {}", class_desc(e)),
                    (None, 0) => format!("no frozen class of size {k}"),
                    (None, _) => format!("second frozen {}", class_desc(frozen[1])),
                }),
            }]
        }
        Family::EHatK(k) => {
            let k = k as usize;
            let wrong = frozen.iter().find(|e| e.size != k);
            let ok = frozen.len() >= 2 && wrong.is_none();
            vec![Check {
                name: "frozen_classes".into(),
                expected: format!("at least two, all of size {k}"),
                observed: sizes(&frozen),
                ok,
                witness: (!ok).then(|| match wrong {
                    Some(e) => format!("frozen {}", class_desc(e)),
                    None => format!("only {} frozen classes", frozen.len()),
                }),
            }]
        }
        _ => unreachable!("order families are checked by fingerprint"),
    }
}

/// Whether the log's output looks like the claimed family at this scale.
pub fn consistency_verdict(log: &RunLog, claim: &Family, w: usize, window: usize) -> Result<Verdict> {
    if claim.signature() != log.signature {
        return Err(Error::SignatureMismatch {
            expected: claim.signature(),
            found: log.signature,
        });
    }
    let checks = match log.signature {
        Signature::LinearOrder => order_checks(&fingerprint(log, w)?, claim),
        Signature::Equivalence => census_checks(&census(log, window)?, claim),
    };
    let witness = checks.iter().find(|c| !c.ok).and_then(|c| c.witness.clone());
    let ok = checks.iter().all(|c| c.ok);
    Ok(Verdict {
        claim: claim.to_string(),
        verdict: if ok { "CONSISTENT" } else { "INCONSISTENT" }.into(),
        checks,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, CanonicalSpec, Policy};
    use crate::structures::Fact;

    fn log_of(family: Family, stages: usize) -> RunLog {
        RunLog::from_stream(&generate(&CanonicalSpec::new(family, Policy::Fair, stages)).unwrap())
    }

    #[test]
    fn omega_fingerprints() {
        let fp = fingerprint(&log_of(Family::Omega, 200), 5).unwrap();
        assert_eq!(fp.summary.pred_unstable_count, 0);
        assert_eq!(fp.summary.stable_least, Some(0));
        assert_eq!(fp.summary.stable_greatest, None);
        let fp = fingerprint(&log_of(Family::OmegaK(2), 200), 5).unwrap();
        assert_eq!(fp.pred_unstable(), vec![1]);
        let fp = fingerprint(&log_of(Family::OmegaStar, 200), 5).unwrap();
        assert_eq!((fp.summary.pred_unstable_count, fp.summary.succ_unstable_count), (0, 0));
        assert!(fp.summary.stable_greatest.is_some() && fp.summary.stable_least.is_none());
    }

    #[test]
    fn census_of_e_k() {
        let c = census(&log_of(Family::Ek(2), 20), 10).unwrap();
        let frozen: Vec<_> = c.frozen().collect();
        assert_eq!(frozen.len(), 1, "{c:?}");
        assert_eq!((frozen[0].size, frozen[0].last_growth_stage), (2, 0));
        assert!(c.classes.iter().filter(|e| !e.frozen).all(|e| e.last_growth_stage > 0));
    }

    #[test]
    fn census_rejects_orders() {
        assert!(matches!(census(&log_of(Family::Omega, 3), 5), Err(Error::SignatureMismatch { .. })));
    }

    #[test]
    fn iso_small_cases() {
        let a = FiniteDiagram::chain(&[5, 9, 2]);
        let b = FiniteDiagram::chain(&[0, 1, 2]);
        assert!(finite_iso(&a, &b).unwrap());
        let p = FiniteDiagram::partition([&[0u64, 1][..], &[2][..]]);
        let q = FiniteDiagram::partition([&[0u64][..], &[1][..], &[2][..]]);
        assert!(!finite_iso(&p, &q).unwrap());
        let v = FiniteDiagram::from_facts(Signature::LinearOrder, [Fact::Lt(0, 1), Fact::Lt(0, 2)]).unwrap();
        let w = FiniteDiagram::from_facts(Signature::LinearOrder, [Fact::Lt(1, 0), Fact::Lt(2, 0)]).unwrap();
        assert!(!finite_iso(&v, &w).unwrap());
        let big = FiniteDiagram::chain(&(0..9).collect::<Vec<_>>());
        assert!(matches!(finite_iso(&big, &big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn canonical_claims_hold() {
        for fam in [Family::Omega, Family::OmegaStarK(3), Family::OnePlusEta, Family::Eta, Family::E, Family::Ek(3), Family::EHatK(2)] {
            let v = consistency_verdict(&log_of(fam, 200), &fam, 5, 30).unwrap();
            assert!(v.consistent(), "{fam}: {v:?}");
        }
        let v = consistency_verdict(&log_of(Family::Omega, 200), &Family::OmegaStar, 5, 30).unwrap();
        assert_eq!(v.verdict, "INCONSISTENT");
        assert_eq!(v.witness.as_deref(), Some("stable_least element 0"));
    }
}

//! Bounded forcing for order-valued operators on order inputs.
//!
//! `α ⊩ lt x y` asks whether every extension `β ⊇ α` keeps `y <= x` out of
//! the operator's output. The search visits every total order extending `α`
//! with up to `ext_bound` fresh elements (ids `max+1, max+2, ...`), so the
//! answer is three-valued: a refuting extension is a certificate, its absence
//! is conclusive only for operators flagged extension-complete.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::enumerate::{chain_extensions, permutations, subsets, total_orders_within};
use crate::error::{Error, Result};
use crate::kernel::{Budget, EnumerationOperator, OperatorTarget};
use crate::structures::{Elem, Fact, FiniteDiagram, OrderView, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ForcingOutcome {
    Forced,
    Refuted { certificate: Vec<Elem> },
    Unknown,
}

impl ForcingOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ForcingOutcome::Forced => "FORCED",
            ForcingOutcome::Refuted { .. } => "REFUTED",
            ForcingOutcome::Unknown => "UNKNOWN",
        }
    }

    pub fn is_forced(&self) -> bool {
        matches!(self, ForcingOutcome::Forced)
    }
}

impl fmt::Display for ForcingOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Every bounded extension of one `α`, evaluated once and reused for all atoms.
pub struct ForcingContext<'a> {
    op: &'a dyn EnumerationOperator,
    alpha: Vec<Elem>,
    base: OrderView,
    /// (extension chain, output order), ordered by number of fresh elements,
    /// then by insertion positions.
    extensions: Vec<(Vec<Elem>, OrderView)>,
}

impl<'a> ForcingContext<'a> {
    pub fn new(op: &'a dyn EnumerationOperator, alpha: &FiniteDiagram, ext_bound: usize, budget: Budget) -> Result<Self> {
        if op.input_signature() != Signature::LinearOrder || op.output_signature() != Signature::LinearOrder {
            return Err(Error::InvalidTarget(format!(
                "forcing needs an order-to-order operator, `{}` is not",
                op.name()
            )));
        }
        alpha.expect(Signature::LinearOrder)?;
        let chain = alpha.total_chain()?;
        let start = alpha.max_elem().map_or(0, |m| m + 1);
        let fresh: Vec<Elem> = (start..start + ext_bound as Elem).collect();
        let base = op.eval(alpha, budget)?.order()?;
        let mut extensions = Vec::new();
        for e in 0..=ext_bound {
            for beta in chain_extensions(&chain, &fresh[..e]) {
                let out = op.eval(&FiniteDiagram::chain(&beta), budget)?;
                extensions.push((beta, out.order()?));
            }
        }
        Ok(ForcingContext {
            op,
            alpha: chain,
            base,
            extensions,
        })
    }

    pub fn alpha(&self) -> &[Elem] {
        &self.alpha
    }

    pub fn output_elems(&self) -> &[Elem] {
        self.base.elems()
    }

    pub fn extensions_checked(&self) -> usize {
        self.extensions.len()
    }

    /// Verdict on `lt x y`. FORCED needs no refuting extension, an
    /// extension-complete operator, and `x < y` already in the output on `α`.
    pub fn verdict(&self, atom: &Fact) -> Result<ForcingOutcome> {
        let Fact::Lt(x, y) = *atom else {
            return Err(Error::InvalidSpec(format!("forcing atoms are `lt` facts, got `{atom}`")));
        };
        for v in [x, y] {
            if !self.base.contains(v) {
                return Err(Error::NotInOutput(format!("element {v}")));
            }
        }
        for (beta, out) in &self.extensions {
            if out.less(y, x) {
                return Ok(ForcingOutcome::Refuted {
                    certificate: beta.clone(),
                });
            }
        }
        if self.op.extension_complete() && self.base.less(x, y) {
            Ok(ForcingOutcome::Forced)
        } else {
            Ok(ForcingOutcome::Unknown)
        }
    }
}

pub struct ForcingQuery<'a> {
    pub op: &'a dyn EnumerationOperator,
    pub alpha: FiniteDiagram,
    pub atom: Fact,
    pub ext_bound: usize,
    pub budget: Budget,
}

pub fn bounded_force(q: &ForcingQuery<'_>) -> Result<ForcingOutcome> {
    ForcingContext::new(q.op, &q.alpha, q.ext_bound, q.budget)?.verdict(&q.atom)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrichotomyViolation {
    pub alpha: Vec<Elem>,
    pub x: Elem,
    pub y: Elem,
    pub forward: String,
    pub backward: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstabilityWitness {
    pub alpha: Vec<Elem>,
    pub beta: Vec<Elem>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrichotomyReport {
    pub operator: String,
    pub alphas: usize,
    pub pairs: usize,
    pub violations: Vec<TrichotomyViolation>,
    /// Forced output order for each `α`, keyed by the input chain.
    pub permutations: BTreeMap<String, Vec<Elem>>,
    pub extensions_checked: usize,
    pub unstable: Vec<InstabilityWitness>,
}

impl TrichotomyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.unstable.is_empty()
    }
}

fn chain_key(c: &[Elem]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("<")
}

/// Forced output permutation of `α`, or the violating pairs.
fn forced_permutation(ctx: &ForcingContext<'_>) -> Result<(Option<Vec<Elem>>, Vec<TrichotomyViolation>, usize)> {
    let elems = ctx.output_elems().to_vec();
    let mut below: HashMap<Elem, usize> = elems.iter().map(|&x| (x, 0)).collect();
    let mut violations = Vec::new();
    let mut pairs = 0;
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i + 1..] {
            pairs += 1;
            let fwd = ctx.verdict(&Fact::Lt(x, y))?;
            let bwd = ctx.verdict(&Fact::Lt(y, x))?;
            match (fwd.is_forced(), bwd.is_forced()) {
                (true, false) => *below.get_mut(&y).unwrap() += 1,
                (false, true) => *below.get_mut(&x).unwrap() += 1,
                _ => violations.push(TrichotomyViolation {
                    alpha: ctx.alpha().to_vec(),
                    x,
                    y,
                    forward: fwd.label().into(),
                    backward: bwd.label().into(),
                }),
            }
        }
    }
    if !violations.is_empty() {
        return Ok((None, violations, pairs));
    }
    let mut perm = elems;
    perm.sort_by_key(|x| below[x]);
    // a transitive tournament has distinct below-counts 0..n-1
    if perm.iter().enumerate().any(|(i, x)| below[x] != i) {
        return Ok((
            None,
            vec![TrichotomyViolation {
                alpha: ctx.alpha().to_vec(),
                x: perm[0],
                y: *perm.last().unwrap(),
                forward: "CYCLE".into(),
                backward: "CYCLE".into(),
            }],
            pairs,
        ));
    }
    Ok((Some(perm), Vec::new(), pairs))
}

/// For every total `α` on `{0..k-1}`, `k <= max_alpha`, checks that each
/// pair of output elements has exactly one forced order, and that the forced
/// permutation survives every one-element extension of `α`.
pub fn trichotomy_scan(op: &dyn EnumerationOperator, max_alpha: usize, ext_bound: usize, budget: Budget) -> Result<TrichotomyReport> {
    let mut report = TrichotomyReport {
        operator: op.name(),
        ..Default::default()
    };
    for k in 0..=max_alpha {
        let dom: Vec<Elem> = (0..k as Elem).collect();
        for alpha in permutations(&dom) {
            report.alphas += 1;
            let ctx = ForcingContext::new(op, &FiniteDiagram::chain(&alpha), ext_bound, budget)?;
            report.extensions_checked += ctx.extensions_checked();
            let (perm, violations, pairs) = forced_permutation(&ctx)?;
            report.pairs += pairs;
            report.violations.extend(violations);
            let Some(perm) = perm else { continue };
            for beta in chain_extensions(&alpha, &[k as Elem]) {
                let bctx = ForcingContext::new(op, &FiniteDiagram::chain(&beta), ext_bound, budget)?;
                report.extensions_checked += bctx.extensions_checked();
                let (bperm, bviol, bpairs) = forced_permutation(&bctx)?;
                report.pairs += bpairs;
                report.violations.extend(bviol);
                if let Some(bperm) = bperm {
                    let restricted: Vec<Elem> = bperm.into_iter().filter(|x| perm.contains(x)).collect();
                    if restricted != perm {
                        report.unstable.push(InstabilityWitness {
                            alpha: alpha.clone(),
                            beta,
                        });
                    }
                }
            }
            report.permutations.insert(chain_key(&alpha), perm);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AgreementViolation {
    pub alpha: Vec<Elem>,
    pub beta: Vec<Elem>,
    pub x: Elem,
    pub y: Elem,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub operator: String,
    pub pairs_checked: usize,
    pub pairs_sharing_outputs: usize,
    pub violations: Vec<AgreementViolation>,
}

impl AgreementReport {
    /// No pair of disjoint inputs shared two output elements.
    pub fn vacuous(&self) -> bool {
        self.pairs_sharing_outputs == 0
    }
}

/// For disjoint-domain `α`, `β` inside `{0..2·max_alpha-1}` and shared output
/// elements `x ≠ y`: `α ⊩ x<y` iff `β ⊩ x<y`.
pub fn disjoint_agreement_scan(op: &dyn EnumerationOperator, max_alpha: usize, ext_bound: usize, budget: Budget) -> Result<AgreementReport> {
    let universe: Vec<Elem> = (0..(2 * max_alpha) as Elem).collect();
    let inputs: Vec<FiniteDiagram> = total_orders_within(&universe, max_alpha)
        .into_iter()
        .filter(|d| !d.is_empty())
        .collect();
    let outputs: Vec<Vec<Elem>> = inputs
        .iter()
        .map(|a| Ok(op.eval(a, budget)?.domain_vec()))
        .collect::<Result<_>>()?;
    let mut contexts: HashMap<usize, ForcingContext<'_>> = HashMap::new();
    let mut report = AgreementReport {
        operator: op.name(),
        ..Default::default()
    };
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            if inputs[i].domain().any(|x| inputs[j].has_elem(x)) {
                continue;
            }
            report.pairs_checked += 1;
            let shared: Vec<Elem> = outputs[i].iter().copied().filter(|x| outputs[j].binary_search(x).is_ok()).collect();
            if shared.len() < 2 {
                continue;
            }
            report.pairs_sharing_outputs += 1;
            for idx in [i, j] {
                if let std::collections::hash_map::Entry::Vacant(e) = contexts.entry(idx) {
                    e.insert(ForcingContext::new(op, &inputs[idx], ext_bound, budget)?);
                }
            }
            for &x in &shared {
                for &y in &shared {
                    if x == y {
                        continue;
                    }
                    let a = contexts[&i].verdict(&Fact::Lt(x, y))?.is_forced();
                    let b = contexts[&j].verdict(&Fact::Lt(x, y))?.is_forced();
                    if a != b {
                        report.violations.push(AgreementViolation {
                            alpha: inputs[i].total_chain()?,
                            beta: inputs[j].total_chain()?,
                            x,
                            y,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinitenessReport {
    pub sizes: Vec<usize>,
    pub final_size: usize,
    /// Smallest budget from which the output size no longer changes.
    pub settled_from: usize,
    /// Settled within the first half of the budget range.
    pub stable: bool,
}

/// Output sizes over budgets `0..=ceiling`, to flag operators that keep
/// growing on a fixed finite input.
pub fn finiteness_probe(target: &OperatorTarget, alpha: &FiniteDiagram, ceiling: Budget) -> Result<FinitenessReport> {
    let op = match target {
        OperatorTarget::Enumeration(op) => op,
        OperatorTarget::Construction(c) => {
            return Err(Error::InvalidTarget(format!(
                "`{}` is a stage-by-stage construction without a budget",
                c.name()
            )))
        }
    };
    if op.output_signature() != Signature::LinearOrder {
        return Err(Error::InvalidTarget(format!("`{}` does not output orders", op.name())));
    }
    let sizes: Vec<usize> = (0..=ceiling).map(|n| Ok(op.eval(alpha, n)?.size())).collect::<Result<_>>()?;
    let last = *sizes.last().unwrap();
    let settled_from = sizes.iter().rposition(|&s| s != last).map_or(0, |i| i + 1);
    Ok(FinitenessReport {
        final_size: last,
        stable: settled_from <= sizes.len() / 2,
        settled_from,
        sizes,
    })
}

/// Every subset of `universe` read as a chain in id order; handy for fixtures.
pub fn id_chains(universe: &[Elem]) -> Vec<FiniteDiagram> {
    subsets(universe).iter().map(|s| FiniteDiagram::chain(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::cantor;
    use crate::ops::axioms::AxiomTable;
    use crate::ops::replicate::Replicate;

    #[test]
    fn replicate_forces_copy_order() {
        let op = Replicate::new(3).unwrap();
        let alpha = FiniteDiagram::chain(&[0, 1]);
        let q = |atom| ForcingQuery {
            op: &op,
            alpha: alpha.clone(),
            atom,
            ext_bound: 2,
            budget: 0,
        };
        let a = cantor(1, 0).unwrap();
        let b = cantor(1, 1).unwrap();
        assert_eq!(bounded_force(&q(Fact::Lt(a, b))).unwrap(), ForcingOutcome::Forced);
        assert_eq!(
            bounded_force(&q(Fact::Lt(b, a))).unwrap(),
            ForcingOutcome::Refuted {
                certificate: vec![0, 1]
            }
        );
        let far = cantor(9, 9).unwrap();
        assert!(matches!(bounded_force(&q(Fact::Lt(a, far))), Err(Error::NotInOutput(_))));
    }

    #[test]
    fn undetermined_pair_needs_two_fresh_elements() {
        let op = AxiomTable::parse(
            "undetermined",
            "axiom: el 0 => el 10\naxiom: el 0 => el 11\naxiom: el 0; el 1; el 2 => lt 11 10\n",
        )
        .unwrap();
        let q = |ext| ForcingQuery {
            op: &op,
            alpha: FiniteDiagram::chain(&[0]),
            atom: Fact::Lt(10, 11),
            ext_bound: ext,
            budget: 8,
        };
        assert_eq!(bounded_force(&q(1)).unwrap(), ForcingOutcome::Unknown);
        assert!(matches!(bounded_force(&q(2)).unwrap(), ForcingOutcome::Refuted { certificate } if certificate.len() == 3));
    }

    #[test]
    fn trichotomy_for_replicate_two() {
        let r = trichotomy_scan(&Replicate::new(2).unwrap(), 3, 2, 0).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        let perm = &r.permutations["1<0"];
        let want: Vec<Elem> = [(0, 1), (0, 0), (1, 1), (1, 0)].iter().map(|&(c, x)| cantor(c, x).unwrap()).collect();
        assert_eq!(perm, &want);
    }

    #[test]
    fn probe_rejects_constructions_and_flags_growth() {
        use crate::kernel::{FillStyle, IntervalFill};
        use std::sync::Arc;
        let fixed = OperatorTarget::Enumeration(Arc::new(Replicate::new(3).unwrap()));
        let alpha = FiniteDiagram::chain(&[0, 1, 2, 3]);
        let r = finiteness_probe(&fixed, &alpha, 20).unwrap();
        assert!(r.stable && r.final_size == 12 && r.settled_from == 0);
        let grow = OperatorTarget::Enumeration(Arc::new(
            IntervalFill::new(Arc::new(Replicate::new(1).unwrap()), FillStyle::LeftClosed).unwrap(),
        ));
        assert!(!finiteness_probe(&grow, &alpha, 20).unwrap().stable);
    }
}

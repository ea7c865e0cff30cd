//! Budgeted enumeration operators, stateful constructions, the structural
//! combinators and the stage-by-stage run engine.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::encoding::{cantor, tag2};
use crate::enumerate::{equivalences_within, set_partitions, total_orders_within};
use crate::error::{Error, Result};
use crate::generate::{Dyadic, EtaPoints};
use crate::stream::StructureStream;
use crate::structures::{closure_subset, ClosureView, Elem, Fact, FiniteDiagram, Signature};

pub type Budget = u64;

/// Per-stage bookkeeping an operator or construction exposes to the classifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Annotation {
    /// Output classes whose size is currently held at one and at two.
    Pinned {
        size_one: Option<Elem>,
        size_two: Option<Elem>,
    },
    /// Which target is being built, its stage, and the running extremes of the input.
    Guess {
        target: char,
        t: usize,
        l: Elem,
        r: Elem,
    },
    /// Whether the new output element went on top, and the least witnesses seen.
    Placement {
        top: bool,
        phi_witness: Option<Vec<Elem>>,
        psi_witness: Option<Vec<Elem>>,
    },
}

/// A computable, monotone map from finite diagrams to finite diagrams.
///
/// `eval(α, n)` must be monotone in `α` (on closures) and in `n`; the union
/// over budgets is the operator's value on `α`.
pub trait EnumerationOperator: Send + Sync {
    fn name(&self) -> String;
    fn input_signature(&self) -> Signature;
    fn output_signature(&self) -> Signature;
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram>;

    fn annotate(&self, _alpha: &FiniteDiagram, _budget: Budget) -> Option<Annotation> {
        None
    }

    /// True when the order between two output elements is settled by `α`
    /// alone, so no extension of `α` can reverse it.
    fn extension_complete(&self) -> bool {
        false
    }
}

pub type OpRef = Arc<dyn EnumerationOperator>;

pub(crate) fn check_input(op: &dyn EnumerationOperator, alpha: &FiniteDiagram) -> Result<()> {
    alpha.expect(op.input_signature())
}

pub(crate) fn check_output(expected: Signature, op: &dyn EnumerationOperator) -> Result<()> {
    if op.output_signature() == expected {
        Ok(())
    } else {
        Err(Error::SignatureMismatch {
            expected,
            found: op.output_signature(),
        })
    }
}

/// A stateful construction consuming one input stage per step.
pub trait Construction: Send + Sync {
    fn name(&self) -> String;
    fn input_signature(&self) -> Signature;
    fn output_signature(&self) -> Signature;
    fn start(&self) -> Box<dyn ConstructionRun + '_>;
}

pub trait ConstructionRun {
    /// Takes the cumulative input stage and returns the cumulative output stage.
    fn step(&mut self, input: &FiniteDiagram) -> Result<(FiniteDiagram, Option<Annotation>)>;
}

#[derive(Clone)]
pub enum OperatorTarget {
    Enumeration(OpRef),
    Construction(Arc<dyn Construction>),
}

impl OperatorTarget {
    pub fn name(&self) -> String {
        match self {
            OperatorTarget::Enumeration(op) => op.name(),
            OperatorTarget::Construction(c) => c.name(),
        }
    }

    pub fn input_signature(&self) -> Signature {
        match self {
            OperatorTarget::Enumeration(op) => op.input_signature(),
            OperatorTarget::Construction(c) => c.input_signature(),
        }
    }

    pub fn output_signature(&self) -> Signature {
        match self {
            OperatorTarget::Enumeration(op) => op.output_signature(),
            OperatorTarget::Construction(c) => c.output_signature(),
        }
    }
}

impl fmt::Debug for OperatorTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorTarget({})", self.name())
    }
}

// ---------------------------------------------------------------------------
// combinators

/// Order reversal of an order-valued operator.
pub struct Reverse(pub OpRef);

impl Reverse {
    pub fn new(inner: OpRef) -> Result<Self> {
        check_output(Signature::LinearOrder, inner.as_ref())?;
        Ok(Reverse(inner))
    }
}

impl EnumerationOperator for Reverse {
    fn name(&self) -> String {
        format!("rev({})", self.0.name())
    }
    fn input_signature(&self) -> Signature {
        self.0.input_signature()
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        let inner = self.0.eval(alpha, budget)?;
        FiniteDiagram::from_facts(
            Signature::LinearOrder,
            inner.facts().iter().map(|f| match *f {
                Fact::Lt(a, b) => Fact::Lt(b, a),
                other => other,
            }),
        )
    }
    fn extension_complete(&self) -> bool {
        self.0.extension_complete()
    }
}

/// Two order-valued operators on the same input, the first placed entirely below.
pub struct Concatenate(pub OpRef, pub OpRef);

impl Concatenate {
    pub fn new(a: OpRef, b: OpRef) -> Result<Self> {
        check_output(Signature::LinearOrder, a.as_ref())?;
        check_output(Signature::LinearOrder, b.as_ref())?;
        if a.input_signature() != b.input_signature() {
            return Err(Error::SignatureMismatch {
                expected: a.input_signature(),
                found: b.input_signature(),
            });
        }
        Ok(Concatenate(a, b))
    }
}

impl EnumerationOperator for Concatenate {
    fn name(&self) -> String {
        format!("concat({},{})", self.0.name(), self.1.name())
    }
    fn input_signature(&self) -> Signature {
        self.0.input_signature()
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        let a = self.0.eval(alpha, budget)?;
        let b = self.1.eval(alpha, budget)?;
        let mut facts = tagged(0, &a)?;
        facts.extend(tagged(1, &b)?);
        if !a.is_empty() && !b.is_empty() {
            let (top, bottom) = (a.order()?.maximal(), b.order()?.minimal());
            for &x in &top {
                for &y in &bottom {
                    facts.push(Fact::Lt(tag2(0, x)?, tag2(1, y)?));
                }
            }
        }
        FiniteDiagram::from_facts(Signature::LinearOrder, facts)
    }
    fn extension_complete(&self) -> bool {
        self.0.extension_complete() && self.1.extension_complete()
    }
}

fn tagged(side: u8, d: &FiniteDiagram) -> Result<Vec<Fact>> {
    d.facts()
        .iter()
        .map(|f| {
            Ok(match *f {
                Fact::El(x) => Fact::El(tag2(side, x)?),
                Fact::Lt(a, b) => Fact::Lt(tag2(side, a)?, tag2(side, b)?),
                Fact::Sim(a, b) => Fact::sim(tag2(side, a)?, tag2(side, b)?),
            })
        })
        .collect()
}

/// Side-by-side union of two equivalence-valued operators on the same input.
pub struct DisjointUnion(pub OpRef, pub OpRef);

impl DisjointUnion {
    pub fn new(a: OpRef, b: OpRef) -> Result<Self> {
        check_output(Signature::Equivalence, a.as_ref())?;
        check_output(Signature::Equivalence, b.as_ref())?;
        if a.input_signature() != b.input_signature() {
            return Err(Error::SignatureMismatch {
                expected: a.input_signature(),
                found: b.input_signature(),
            });
        }
        Ok(DisjointUnion(a, b))
    }
}

impl EnumerationOperator for DisjointUnion {
    fn name(&self) -> String {
        format!("union({},{})", self.0.name(), self.1.name())
    }
    fn input_signature(&self) -> Signature {
        self.0.input_signature()
    }
    fn output_signature(&self) -> Signature {
        Signature::Equivalence
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        let mut facts = tagged(0, &self.0.eval(alpha, budget)?)?;
        facts.extend(tagged(1, &self.1.eval(alpha, budget)?)?);
        FiniteDiagram::from_facts(Signature::Equivalence, facts)
    }
    fn extension_complete(&self) -> bool {
        self.0.extension_complete() && self.1.extension_complete()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FillStyle {
    /// Each point becomes a copy of [0,1): closed bottom, open top.
    LeftClosed,
    /// Each point becomes a copy of (0,1]: open bottom, closed top.
    RightClosed,
}

/// Replaces every output point by a dense block with one closed endpoint.
///
/// Block element `cantor(x, 0)` is the endpoint, `cantor(x, t)` for `t >= 1`
/// is the `t`-th dyadic point; budget `n` admits points `t <= n`.
pub struct IntervalFill {
    pub inner: OpRef,
    pub style: FillStyle,
}

impl IntervalFill {
    pub fn new(inner: OpRef, style: FillStyle) -> Result<Self> {
        check_output(Signature::LinearOrder, inner.as_ref())?;
        Ok(IntervalFill { inner, style })
    }

    /// Block chain for one output point, bottom to top.
    fn block(&self, x: Elem, points: &[Dyadic]) -> Result<Vec<Elem>> {
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&i, &j| points[i].cmp(&points[j]));
        let mut chain = Vec::with_capacity(points.len() + 1);
        match self.style {
            FillStyle::LeftClosed => {
                chain.push(cantor(x, 0)?);
                for i in idx {
                    chain.push(cantor(x, i as u64 + 1)?);
                }
            }
            FillStyle::RightClosed => {
                for i in idx.into_iter().rev() {
                    chain.push(cantor(x, i as u64 + 1)?);
                }
                chain.push(cantor(x, 0)?);
            }
        }
        Ok(chain)
    }
}

impl EnumerationOperator for IntervalFill {
    fn name(&self) -> String {
        let s = match self.style {
            FillStyle::LeftClosed => "left",
            FillStyle::RightClosed => "right",
        };
        format!("{}|fill:{s}", self.inner.name())
    }
    fn input_signature(&self) -> Signature {
        self.inner.input_signature()
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        let inner = self.inner.eval(alpha, budget)?;
        let points: Vec<Dyadic> = EtaPoints::new().take(budget as usize).collect();
        let mut facts = Vec::new();
        let mut ends = std::collections::HashMap::new();
        for x in inner.domain() {
            let chain = self.block(x, &points)?;
            ends.insert(x, (chain[0], *chain.last().unwrap()));
            facts.extend(chain.iter().map(|&y| Fact::El(y)));
            facts.extend(chain.windows(2).map(|w| Fact::Lt(w[0], w[1])));
        }
        for (a, b) in inner.lt_pairs() {
            facts.push(Fact::Lt(ends[&a].1, ends[&b].0));
        }
        FiniteDiagram::from_facts(Signature::LinearOrder, facts)
    }
    fn extension_complete(&self) -> bool {
        self.inner.extension_complete()
    }
}

/// `second` applied to the output of `first`, both at the same budget.
pub struct Compose {
    pub first: OpRef,
    pub second: OpRef,
}

impl Compose {
    pub fn new(first: OpRef, second: OpRef) -> Result<Self> {
        check_output(second.input_signature(), first.as_ref())?;
        Ok(Compose { first, second })
    }
}

impl EnumerationOperator for Compose {
    fn name(&self) -> String {
        format!("{}|{}", self.first.name(), self.second.name())
    }
    fn input_signature(&self) -> Signature {
        self.first.input_signature()
    }
    fn output_signature(&self) -> Signature {
        self.second.output_signature()
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        self.second.eval(&self.first.eval(alpha, budget)?, budget)
    }
    fn extension_complete(&self) -> bool {
        self.first.extension_complete() && self.second.extension_complete()
    }
}

// ---------------------------------------------------------------------------
// runs

/// Maps stage number to budget. Must be non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BudgetSchedule {
    Linear,
    Scaled(u64),
    Const(u64),
    Sqrt,
    Table(Vec<u64>),
}

impl BudgetSchedule {
    pub fn budget(&self, stage: usize) -> Budget {
        let s = stage as u64;
        match self {
            BudgetSchedule::Linear => s,
            BudgetSchedule::Scaled(a) => s.saturating_mul(*a),
            BudgetSchedule::Const(c) => *c,
            BudgetSchedule::Sqrt => (s as f64).sqrt() as u64,
            BudgetSchedule::Table(t) => t.get(stage).or(t.last()).copied().unwrap_or(0),
        }
    }

    pub fn validate(&self, stages: usize) -> Result<()> {
        let mut prev = 0;
        for s in 0..stages {
            let b = self.budget(s);
            if b < prev {
                return Err(Error::InvalidSchedule(format!(
                    "budget drops from {prev} to {b} at stage {s}"
                )));
            }
            prev = b;
        }
        Ok(())
    }
}

impl fmt::Display for BudgetSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudgetSchedule::Linear => write!(f, "linear"),
            BudgetSchedule::Scaled(a) => write!(f, "scale:{a}"),
            BudgetSchedule::Const(c) => write!(f, "const:{c}"),
            BudgetSchedule::Sqrt => write!(f, "sqrt"),
            BudgetSchedule::Table(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for BudgetSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSchedule(format!("cannot parse `{s}`"));
        match s.split_once(':') {
            None => match s {
                "linear" => Ok(BudgetSchedule::Linear),
                "sqrt" => Ok(BudgetSchedule::Sqrt),
                _ => Err(bad()),
            },
            Some(("scale", a)) => a.parse().map(BudgetSchedule::Scaled).map_err(|_| bad()),
            Some(("const", c)) => c.parse().map(BudgetSchedule::Const).map_err(|_| bad()),
            Some(("table", t)) => t
                .split(',')
                .map(|x| x.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(BudgetSchedule::Table)
                .map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub budget: Budget,
    pub new_facts: Vec<Fact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<Annotation>,
}

/// Output of a run, one record per stage, holding only the new generating facts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunLog {
    pub operator: String,
    pub input: String,
    pub signature: Signature,
    pub schedule: String,
    pub records: Vec<StageRecord>,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    v: u32,
    op: String,
    input: String,
    signature: Signature,
    schedule: String,
    #[serde(flatten)]
    record: StageRecord,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The log cut after its first `stages` records.
    pub fn prefix(&self, stages: usize) -> RunLog {
        RunLog {
            records: self.records.iter().take(stages).cloned().collect(),
            ..self.clone()
        }
    }

    /// The output as a stream of stages.
    pub fn output_stream(&self) -> Result<StructureStream> {
        let mut s = StructureStream::new(self.signature, format!("{}<{}>", self.operator, self.input));
        for r in &self.records {
            s.push_delta(r.new_facts.iter().copied())?;
        }
        Ok(s)
    }

    pub fn annotations(&self) -> Vec<Option<&Annotation>> {
        self.records.iter().map(|r| r.annotation.as_ref()).collect()
    }

    /// Wraps a presentation as the log of the identity operator.
    pub fn from_stream(stream: &StructureStream) -> RunLog {
        RunLog {
            operator: "identity".into(),
            input: stream.provenance().to_string(),
            signature: stream.signature(),
            schedule: "none".into(),
            records: stream
                .deltas()
                .iter()
                .enumerate()
                .map(|(s, d)| StageRecord {
                    stage: s,
                    budget: 0,
                    new_facts: d.clone(),
                    annotation: None,
                })
                .collect(),
        }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            let line = RecordLine {
                v: 1,
                op: self.operator.clone(),
                input: self.input.clone(),
                signature: self.signature,
                schedule: self.schedule.clone(),
                record: r.clone(),
            };
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<RunLog> {
        let mut log: Option<RunLog> = None;
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line: RecordLine = serde_json::from_str(raw).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if line.v != 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unsupported record version {}", line.v),
                });
            }
            let log = log.get_or_insert_with(|| RunLog {
                operator: line.op.clone(),
                input: line.input.clone(),
                signature: line.signature,
                schedule: line.schedule.clone(),
                records: Vec::new(),
            });
            if line.record.stage != log.records.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected stage {}, found {}", log.records.len(), line.record.stage),
                });
            }
            log.records.push(line.record);
        }
        log.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "empty log".into(),
        })
    }
}

/// Runs `target` on the first `stages` stages of `input`.
pub fn run(target: &OperatorTarget, input: &StructureStream, stages: usize, schedule: &BudgetSchedule) -> Result<RunLog> {
    schedule.validate(stages)?;
    if input.signature() != target.input_signature() {
        return Err(Error::SignatureMismatch {
            expected: target.input_signature(),
            found: input.signature(),
        });
    }
    if stages > input.len() {
        return Err(Error::InvalidInput(format!(
            "input has {} stages, {stages} requested",
            input.len()
        )));
    }
    let sig = target.output_signature();
    let mut records = Vec::with_capacity(stages);
    let mut logged: HashSet<Fact> = HashSet::new();
    let mut prev = FiniteDiagram::empty(sig);
    let mut conrun = match target {
        OperatorTarget::Construction(c) => Some(c.start()),
        OperatorTarget::Enumeration(_) => None,
    };
    for (s, alpha) in input.stages().take(stages).enumerate() {
        let budget = schedule.budget(s);
        let (out, annotation) = match target {
            OperatorTarget::Enumeration(op) => (op.eval(&alpha, budget)?, op.annotate(&alpha, budget)),
            OperatorTarget::Construction(_) => conrun.as_mut().unwrap().step(&alpha)?,
        };
        if !closure_subset(&prev, &out)? {
            return Err(Error::NonMonotone {
                prev: s.saturating_sub(1),
                stage: s,
            });
        }
        let new_facts: Vec<Fact> = out.facts().iter().filter(|f| !logged.contains(f)).copied().collect();
        logged.extend(new_facts.iter().copied());
        records.push(StageRecord {
            stage: s,
            budget,
            new_facts,
            annotation,
        });
        prev = out;
    }
    Ok(RunLog {
        operator: target.name(),
        input: input.provenance().to_string(),
        signature: sig,
        schedule: schedule.to_string(),
        records,
    })
}

// ---------------------------------------------------------------------------
// monotonicity checks

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityViolation {
    pub alpha: String,
    pub beta: String,
    pub n: Budget,
    pub m: Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub operator: String,
    pub input_pairs: usize,
    pub budget_steps: usize,
    pub violation: Option<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

fn one_line(d: &FiniteDiagram) -> String {
    d.facts().iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ")
}

/// Diagrams directly below `beta`: one element removed, or (for equivalences)
/// one class split in two. Every sub-diagram of a total order or of an
/// equivalence is reached from `beta` by a chain of such steps, so checking
/// them with every budget step proves `eval(α,n) ⊆ eval(β,m)` for all
/// `α ⊆ β`, `n <= m`.
pub fn covering_subdiagrams(beta: &FiniteDiagram) -> Result<Vec<FiniteDiagram>> {
    let dom = beta.domain_vec();
    let mut out = Vec::new();
    for &x in &dom {
        out.push(beta.restrict(|y| y != x)?);
    }
    if beta.signature() == Signature::Equivalence {
        let p = beta.classes()?;
        for class in p.classes.values() {
            if class.len() < 2 {
                continue;
            }
            for split in set_partitions(class) {
                if split.len() != 2 {
                    continue;
                }
                let mut parts: Vec<Vec<Elem>> = p.classes.values().filter(|c| c != &class).cloned().collect();
                parts.extend(split);
                out.push(FiniteDiagram::partition(parts.iter().map(|c| c.as_slice())));
            }
        }
    }
    Ok(out)
}

/// Checks monotonicity over every input with domain inside `0..max_size` and
/// every budget up to `max_budget`.
pub fn exhaustive_monotonicity(op: &dyn EnumerationOperator, max_size: usize, max_budget: Budget) -> Result<MonotonicityReport> {
    let universe: Vec<Elem> = (0..max_size as Elem).collect();
    let betas = match op.input_signature() {
        Signature::LinearOrder => total_orders_within(&universe, max_size),
        Signature::Equivalence => equivalences_within(&universe, max_size),
    };
    let mut report = MonotonicityReport {
        operator: op.name(),
        input_pairs: 0,
        budget_steps: 0,
        violation: None,
    };
    // Subdiagrams recur across many β, so evaluations are shared.
    let mut memo: HashMap<FiniteDiagram, Arc<Vec<FiniteDiagram>>> = HashMap::new();
    let mut evals = |d: &FiniteDiagram| -> Result<Arc<Vec<FiniteDiagram>>> {
        if let Some(v) = memo.get(d) {
            return Ok(v.clone());
        }
        let v = Arc::new((0..=max_budget).map(|n| op.eval(d, n)).collect::<Result<Vec<_>>>()?);
        memo.insert(d.clone(), v.clone());
        Ok(v)
    };
    for beta in &betas {
        let outs = evals(beta)?;
        let views: Vec<ClosureView> = outs.iter().map(ClosureView::of).collect::<Result<_>>()?;
        for n in 0..max_budget as usize {
            report.budget_steps += 1;
            if !views[n + 1].includes(&outs[n])? {
                report.violation = Some(MonotonicityViolation {
                    alpha: one_line(beta),
                    beta: one_line(beta),
                    n: n as Budget,
                    m: n as Budget + 1,
                });
                return Ok(report);
            }
        }
        for alpha in covering_subdiagrams(beta)? {
            report.input_pairs += 1;
            let small = evals(&alpha)?;
            for n in 0..=max_budget {
                if !views[n as usize].includes(&small[n as usize])? {
                    report.violation = Some(MonotonicityViolation {
                        alpha: one_line(&alpha),
                        beta: one_line(beta),
                        n,
                        m: n,
                    });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Randomized check on pairs `α ⊆ β` with `|β| <= max_size`. For equivalence
/// inputs `α` is an arbitrary subset of the closed facts of `β`, so inputs that
/// are not closed are exercised too.
pub fn sampled_monotonicity(
    op: &dyn EnumerationOperator,
    trials: usize,
    max_size: usize,
    max_budget: Budget,
    seed: u64,
) -> Result<MonotonicityReport> {
    let mut g = crate::encoding::Lcg::new(seed);
    let mut report = MonotonicityReport {
        operator: op.name(),
        input_pairs: 0,
        budget_steps: 0,
        violation: None,
    };
    for _ in 0..trials {
        let size = g.below(max_size as u32 + 1) as usize;
        let mut ids: Vec<Elem> = (0..(2 * max_size.max(1)) as Elem).collect();
        g.shuffle(&mut ids);
        ids.truncate(size);
        let beta = match op.input_signature() {
            Signature::LinearOrder => FiniteDiagram::chain(&ids),
            Signature::Equivalence => {
                let blocks = 1 + g.below(size.max(1) as u32) as usize;
                let mut parts: Vec<Vec<Elem>> = vec![Vec::new(); blocks];
                for &x in &ids {
                    parts[g.below(blocks as u32) as usize].push(x);
                }
                FiniteDiagram::partition(parts.iter().map(|c| c.as_slice()))
            }
        };
        let closed = beta.closed()?;
        let keep: HashSet<Elem> = ids.iter().copied().filter(|_| g.below(3) != 0).collect();
        let alpha = match op.input_signature() {
            Signature::LinearOrder => beta.restrict(|x| keep.contains(&x))?,
            Signature::Equivalence => {
                let facts: Vec<Fact> = closed
                    .facts()
                    .iter()
                    .copied()
                    .filter(|f| {
                        let (a, b) = f.elems();
                        keep.contains(&a) && b.is_none_or(|b| keep.contains(&b))
                    })
                    .filter(|f| matches!(f, Fact::El(_)) || g.below(2) == 0)
                    .collect();
                FiniteDiagram::from_facts(Signature::Equivalence, facts)?
            }
        };
        let n = g.below(max_budget as u32 + 1) as Budget;
        let m = n + g.below((max_budget - n) as u32 + 1) as Budget;
        report.input_pairs += 1;
        report.budget_steps += 1;
        if !closure_subset(&op.eval(&alpha, n)?, &op.eval(&beta, m)?)? {
            report.violation = Some(MonotonicityViolation {
                alpha: one_line(&alpha),
                beta: one_line(&beta),
                n,
                m,
            });
            return Ok(report);
        }
    }
    Ok(report)
}

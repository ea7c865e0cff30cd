//! Existential-universal sentences and the operator that turns refutations
//! into class growth.

use std::fmt;
use std::sync::Arc;

use crate::encoding::{cantor, tuple_code};
use crate::error::{Error, Result};
use crate::kernel::{check_input, Budget, Compose, DisjointUnion, EnumerationOperator, OpRef};
use crate::ops::multiplier::ClassMultiplier;
use crate::structures::{Elem, Fact, FiniteDiagram, OrderView, Partition, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X(usize),
    Y(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Sim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub negated: bool,
    pub rel: Rel,
    pub a: Var,
    pub b: Var,
}

/// `∀ȳ literal(x̄, ȳ)` with `arity` universal variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjunct {
    pub arity: usize,
    pub literal: Literal,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Disjunct {
    pub conjuncts: Vec<Conjunct>,
}

/// `⋁_i ∃x̄ ⋀_j ∀ȳ_j α_ij(x̄, ȳ_j)` with one existential arity for all disjuncts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma2Sentence {
    pub signature: Signature,
    pub exists: usize,
    pub disjuncts: Vec<Disjunct>,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(i) => write!(f, "y{i}"),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not ")?;
        }
        let r = match self.rel {
            Rel::Lt => "lt",
            Rel::Sim => "sim",
        };
        write!(f, "{r} {} {}", self.a, self.b)
    }
}

impl fmt::Display for Sigma2Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "exists {}", self.exists)?;
        for (i, d) in self.disjuncts.iter().enumerate() {
            writeln!(f, "disjunct {i}")?;
            for c in &d.conjuncts {
                writeln!(f, "forall {}: {}", c.arity, c.literal)?;
            }
        }
        Ok(())
    }
}

impl Sigma2Sentence {
    /// There is a least element.
    pub fn least_element() -> Self {
        Sigma2Sentence::single(Literal {
            negated: true,
            rel: Rel::Lt,
            a: Var::Y(0),
            b: Var::X(0),
        })
    }

    /// There is a greatest element.
    pub fn greatest_element() -> Self {
        Sigma2Sentence::single(Literal {
            negated: true,
            rel: Rel::Lt,
            a: Var::X(0),
            b: Var::Y(0),
        })
    }

    fn single(literal: Literal) -> Self {
        Sigma2Sentence {
            signature: Signature::LinearOrder,
            exists: 1,
            disjuncts: vec![Disjunct {
                conjuncts: vec![Conjunct { arity: 1, literal }],
            }],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut exists: Option<usize> = None;
        let mut disjuncts: Vec<Disjunct> = Vec::new();
        let mut sig: Option<Signature> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix("exists") {
                if exists.is_some() {
                    return Err(err("repeated `exists` header".into()));
                }
                exists = Some(rest.trim().parse().map_err(|_| err(format!("bad arity in `{line}`")))?);
            } else if let Some(rest) = line.strip_prefix("disjunct") {
                let k: usize = rest.trim().parse().map_err(|_| err(format!("bad index in `{line}`")))?;
                if k != disjuncts.len() {
                    return Err(err(format!("expected disjunct {}, found {k}", disjuncts.len())));
                }
                disjuncts.push(Disjunct::default());
            } else if let Some(rest) = line.strip_prefix("forall") {
                let m = exists.ok_or_else(|| err("`forall` before the `exists` header".into()))?;
                let (arity, lit) = rest.split_once(':').ok_or_else(|| err(format!("missing `:` in `{line}`")))?;
                let arity: usize = arity.trim().parse().map_err(|_| err(format!("bad arity in `{line}`")))?;
                let literal = parse_literal(lit.trim(), m, arity).map_err(err)?;
                let s = match literal.rel {
                    Rel::Lt => Signature::LinearOrder,
                    Rel::Sim => Signature::Equivalence,
                };
                if sig.is_some_and(|x| x != s) {
                    return Err(err("literals mix lt and sim".into()));
                }
                sig = Some(s);
                if disjuncts.is_empty() {
                    disjuncts.push(Disjunct::default());
                }
                disjuncts.last_mut().unwrap().conjuncts.push(Conjunct { arity, literal });
            } else {
                return Err(err(format!("cannot parse `{line}`")));
            }
        }
        let exists = exists.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `exists` header".into(),
        })?;
        if disjuncts.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "no disjuncts".into(),
            });
        }
        Ok(Sigma2Sentence {
            signature: sig.unwrap_or(Signature::LinearOrder),
            exists,
            disjuncts,
        })
    }

    /// Least tuple (by length, then lexicographically by id) that satisfies some
    /// disjunct on the finite model, using conjuncts with index `<= bound`.
    pub fn least_witness(&self, model: &Model, bound: usize) -> Option<Vec<Elem>> {
        let dom = model.domain();
        let mut found = None;
        for_each_tuple(&dom, self.exists, |x| {
            let ok = self.disjuncts.iter().any(|d| {
                d.conjuncts.iter().take(bound + 1).all(|c| {
                    let mut all = true;
                    for_each_tuple(&dom, c.arity, |y| {
                        if !model.holds(&c.literal, x, y) {
                            all = false;
                            return false;
                        }
                        true
                    });
                    all
                })
            });
            if ok {
                found = Some(x.to_vec());
                return false;
            }
            true
        });
        found
    }
}

fn parse_var(t: &str, m: usize, n: usize) -> std::result::Result<Var, String> {
    let (kind, idx) = t.split_at(1.min(t.len()));
    let idx: usize = idx.parse().map_err(|_| format!("bad variable `{t}`"))?;
    match kind {
        "x" if idx < m => Ok(Var::X(idx)),
        "y" if idx < n => Ok(Var::Y(idx)),
        _ => Err(format!("variable `{t}` out of range")),
    }
}

fn parse_literal(s: &str, m: usize, n: usize) -> std::result::Result<Literal, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let (negated, rest) = match parts.first() {
        Some(&"not") => (true, &parts[1..]),
        _ => (false, &parts[..]),
    };
    match rest {
        [rel, a, b] => {
            let rel = match *rel {
                "lt" => Rel::Lt,
                "sim" => Rel::Sim,
                _ => return Err(format!("unknown relation `{rel}`")),
            };
            Ok(Literal {
                negated,
                rel,
                a: parse_var(a, m, n)?,
                b: parse_var(b, m, n)?,
            })
        }
        _ => Err(format!("cannot parse literal `{s}`")),
    }
}

/// Calls `f` on every `k`-tuple over `dom` in lexicographic order until it returns false.
pub fn for_each_tuple(dom: &[Elem], k: usize, mut f: impl FnMut(&[Elem]) -> bool) {
    if k == 0 {
        f(&[]);
        return;
    }
    if dom.is_empty() {
        return;
    }
    let mut idx = vec![0usize; k];
    let mut t: Vec<Elem> = vec![dom[0]; k];
    loop {
        if !f(&t) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < dom.len() {
                t[i] = dom[idx[i]];
                break;
            }
            idx[i] = 0;
            t[i] = dom[0];
        }
    }
}

/// A finite diagram read through its closure, for evaluating literals.
pub enum Model {
    Order(OrderView),
    Eq(Partition, Vec<Elem>),
}

impl Model {
    pub fn new(d: &FiniteDiagram) -> Result<Model> {
        Ok(match d.signature() {
            Signature::LinearOrder => Model::Order(d.order()?),
            Signature::Equivalence => Model::Eq(d.classes()?, d.domain_vec()),
        })
    }

    pub fn domain(&self) -> Vec<Elem> {
        match self {
            Model::Order(v) => v.elems().to_vec(),
            Model::Eq(_, dom) => dom.clone(),
        }
    }

    fn rel(&self, rel: Rel, a: Elem, b: Elem) -> bool {
        match (self, rel) {
            (Model::Order(v), Rel::Lt) => v.less(a, b),
            (Model::Eq(p, _), Rel::Sim) => a == b || p.same(a, b),
            _ => false,
        }
    }

    /// Truth on the finite model, reading absent facts as false.
    pub fn holds(&self, lit: &Literal, x: &[Elem], y: &[Elem]) -> bool {
        let v = |var: Var| match var {
            Var::X(i) => x[i],
            Var::Y(i) => y[i],
        };
        self.rel(lit.rel, v(lit.a), v(lit.b)) != lit.negated
    }

    /// Whether the finite model already contains positive evidence that the
    /// literal fails, evidence no extension can retract.
    pub fn refutes(&self, lit: &Literal, x: &[Elem], y: &[Elem]) -> bool {
        let v = |var: Var| match var {
            Var::X(i) => x[i],
            Var::Y(i) => y[i],
        };
        let (a, b) = (v(lit.a), v(lit.b));
        match (lit.rel, lit.negated) {
            (Rel::Lt, true) => self.rel(Rel::Lt, a, b),
            (Rel::Lt, false) => a == b || self.rel(Rel::Lt, b, a),
            (Rel::Sim, true) => self.rel(Rel::Sim, a, b),
            (Rel::Sim, false) => false,
        }
    }
}

/// Raw refutation operator. For each existential tuple `c̄` over the input and
/// disjunct `i`, a class seeded with `seed` members. Once the input refutes a
/// conjunct of disjunct `i` at `c̄`, the class gains `budget` more members.
///
/// Member `k` of the class is `cantor(code(c̄)·D + i, k)` with `D` the number
/// of disjuncts and `code` the element itself for unary tuples.
pub struct Formula2EqRaw {
    sentence: Sigma2Sentence,
    seed: u64,
}

impl Formula2EqRaw {
    pub fn new(sentence: Sigma2Sentence, seed: u64) -> Result<Self> {
        for d in &sentence.disjuncts {
            for c in &d.conjuncts {
                if c.literal.rel == Rel::Sim && !c.literal.negated {
                    return Err(Error::InvalidSpec(format!(
                        "`{}` cannot be refuted by positive facts",
                        c.literal
                    )));
                }
            }
        }
        if seed == 0 {
            return Err(Error::InvalidSpec("seed classes need at least one member".into()));
        }
        Ok(Formula2EqRaw { sentence, seed })
    }

    fn refuted(&self, model: &Model, dom: &[Elem], d: &Disjunct, x: &[Elem]) -> bool {
        d.conjuncts.iter().any(|c| {
            let mut hit = false;
            for_each_tuple(dom, c.arity, |y| {
                hit = model.refutes(&c.literal, x, y);
                !hit
            });
            hit
        })
    }
}

impl EnumerationOperator for Formula2EqRaw {
    fn name(&self) -> String {
        format!("formula2eq_raw:{}", self.seed)
    }
    fn input_signature(&self) -> Signature {
        self.sentence.signature
    }
    fn output_signature(&self) -> Signature {
        Signature::Equivalence
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        check_input(self, alpha)?;
        let model = Model::new(alpha)?;
        let dom = model.domain();
        let nd = self.sentence.disjuncts.len() as u64;
        let mut facts = Vec::new();
        let mut failure = None;
        for_each_tuple(&dom, self.sentence.exists, |x| {
            let code = match x {
                [c] => Ok(*c),
                _ => tuple_code(x),
            };
            let r: Result<()> = (|| {
                let code = code?;
                for (i, d) in self.sentence.disjuncts.iter().enumerate() {
                    let base = code
                        .checked_mul(nd)
                        .and_then(|v| v.checked_add(i as u64))
                        .ok_or(Error::Overflow)?;
                    let size = if self.refuted(&model, &dom, d, x) {
                        self.seed + budget
                    } else {
                        self.seed
                    };
                    let head = cantor(base, 0)?;
                    facts.push(Fact::El(head));
                    for k in 1..size {
                        facts.push(Fact::sim(head, cantor(base, k)?));
                    }
                }
                Ok(())
            })();
            match r {
                Ok(()) => true,
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        FiniteDiagram::from_facts(Signature::Equivalence, facts)
    }
}

/// Refutation classes spread over budget-many copies: a model of the sentence
/// yields Ê_seed, a non-model yields E.
pub fn formula2eq(sentence: Sigma2Sentence, seed: u64) -> Result<OpRef> {
    let raw: OpRef = Arc::new(Formula2EqRaw::new(sentence, seed)?);
    Ok(Arc::new(Compose::new(raw, Arc::new(ClassMultiplier))?))
}

/// Side-by-side pair: singleton seeds for `phi`, two-element seeds for `psi`.
/// Structures with `phi ∧ ¬psi` go to Ê₁, with `¬phi ∧ psi` to Ê₂.
pub fn pair_formula2eq(phi: Sigma2Sentence, psi: Sigma2Sentence) -> Result<OpRef> {
    Ok(Arc::new(DisjointUnion::new(formula2eq(phi, 1)?, formula2eq(psi, 2)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let text = "exists 1\ndisjunct 0\nforall 1: not lt y0 x0\n";
        let s = Sigma2Sentence::parse(text).unwrap();
        assert_eq!(s, Sigma2Sentence::least_element());
        assert_eq!(s.to_string(), text);
        assert!(Sigma2Sentence::parse("forall 1: lt x0 y0").is_err());
        assert!(Sigma2Sentence::parse("exists 1\nforall 1: lt x1 y0").is_err());
        assert!(Sigma2Sentence::parse("exists 1\nforall 1: lt x0 y0\nforall 1: sim x0 y0").is_err());
    }

    #[test]
    fn tuples_in_lex_order() {
        let mut seen = Vec::new();
        for_each_tuple(&[3, 5], 2, |t| {
            seen.push(t.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![3, 3], vec![3, 5], vec![5, 3], vec![5, 5]]);
        let mut count = 0;
        for_each_tuple(&[], 0, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn least_witness_on_a_chain() {
        let m = Model::new(&FiniteDiagram::chain(&[4, 2, 9])).unwrap();
        assert_eq!(Sigma2Sentence::least_element().least_witness(&m, 0), Some(vec![4]));
        assert_eq!(Sigma2Sentence::greatest_element().least_witness(&m, 0), Some(vec![9]));
    }

    #[test]
    fn refutation_inflates_all_but_the_least() {
        let op = Formula2EqRaw::new(Sigma2Sentence::least_element(), 1).unwrap();
        let out = op.eval(&FiniteDiagram::chain(&[0, 1, 2]), 5).unwrap();
        let p = out.classes().unwrap();
        assert_eq!(p.class_size(cantor(0, 0).unwrap()), 1);
        assert_eq!(p.class_size(cantor(1, 0).unwrap()), 6);
        assert_eq!(p.class_size(cantor(2, 0).unwrap()), 6);
    }

    #[test]
    fn positive_sim_literals_rejected() {
        let s = Sigma2Sentence::parse("exists 1\nforall 1: sim x0 y0").unwrap();
        assert!(Formula2EqRaw::new(s, 1).is_err());
    }
}

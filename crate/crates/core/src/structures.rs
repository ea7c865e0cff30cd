//! Finite atomic diagrams over the two signatures.
//!
//! A diagram is stored as a sorted set of generating facts. Its meaning is the
//! closure: transitive closure of `lt` for linear orders, reflexive-symmetric-
//! transitive closure of `sim` for equivalences. Inclusion and equality between
//! diagrams are always taken on closures.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Elem = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    LinearOrder,
    Equivalence,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::LinearOrder => "linear_order",
            Signature::Equivalence => "equivalence",
        })
    }
}

impl FromStr for Signature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear_order" | "lo" | "order" => Ok(Signature::LinearOrder),
            "equivalence" | "eq" => Ok(Signature::Equivalence),
            other => Err(Error::InvalidSpec(format!("unknown signature `{other}`"))),
        }
    }
}

/// Atomic fact. `Sim` is kept with its smaller element first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fact {
    El(Elem),
    Lt(Elem, Elem),
    Sim(Elem, Elem),
}

impl Fact {
    pub fn sim(a: Elem, b: Elem) -> Fact {
        if a == b {
            Fact::El(a)
        } else {
            Fact::Sim(a.min(b), a.max(b))
        }
    }

    pub fn elems(&self) -> (Elem, Option<Elem>) {
        match *self {
            Fact::El(x) => (x, None),
            Fact::Lt(a, b) | Fact::Sim(a, b) => (a, Some(b)),
        }
    }

    pub fn signature(&self) -> Option<Signature> {
        match self {
            Fact::El(_) => None,
            Fact::Lt(..) => Some(Signature::LinearOrder),
            Fact::Sim(..) => Some(Signature::Equivalence),
        }
    }

    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Fact {
        match *self {
            Fact::El(x) => Fact::El(f(x)),
            Fact::Lt(a, b) => Fact::Lt(f(a), f(b)),
            Fact::Sim(a, b) => Fact::sim(f(a), f(b)),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::El(x) => write!(f, "el {x}"),
            Fact::Lt(a, b) => write!(f, "lt {a} {b}"),
            Fact::Sim(a, b) => write!(f, "sim {a} {b}"),
        }
    }
}

impl FromStr for Fact {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| {
            t.parse::<Elem>()
                .map_err(|_| format!("`{t}` is not an element id"))
        };
        match parts.as_slice() {
            ["el", x] => Ok(Fact::El(num(x)?)),
            ["lt", a, b] => {
                let (a, b) = (num(a)?, num(b)?);
                if a == b {
                    return Err(format!("lt {a} {a} is irreflexive-inconsistent"));
                }
                Ok(Fact::Lt(a, b))
            }
            ["sim", a, b] => Ok(Fact::sim(num(a)?, num(b)?)),
            _ => Err(format!("cannot parse fact `{}`", s.trim())),
        }
    }
}

impl Serialize for Fact {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fact {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteDiagram {
    sig: Signature,
    facts: Vec<Fact>,
}

impl FiniteDiagram {
    pub fn empty(sig: Signature) -> Self {
        FiniteDiagram {
            sig,
            facts: Vec::new(),
        }
    }

    /// Builds a diagram, adding `el` facts for every mentioned element.
    pub fn from_facts(sig: Signature, facts: impl IntoIterator<Item = Fact>) -> Result<Self> {
        let mut v: Vec<Fact> = Vec::new();
        for f in facts {
            if let Some(s) = f.signature() {
                if s != sig {
                    return Err(Error::SignatureMismatch {
                        expected: sig,
                        found: s,
                    });
                }
            }
            match f {
                Fact::El(_) => v.push(f),
                Fact::Lt(a, b) => {
                    if a == b {
                        return Err(Error::Inconsistent(format!("lt {a} {a}")));
                    }
                    v.extend([Fact::El(a), Fact::El(b), f]);
                }
                Fact::Sim(a, b) => v.extend([Fact::El(a), Fact::El(b), Fact::sim(a, b)]),
            }
        }
        v.sort_unstable();
        v.dedup();
        Ok(FiniteDiagram { sig, facts: v })
    }

    /// Total order given as a chain, stored as its covering facts.
    pub fn chain(chain: &[Elem]) -> Self {
        let mut v: Vec<Fact> = chain.iter().map(|&x| Fact::El(x)).collect();
        v.extend(chain.windows(2).map(|w| Fact::Lt(w[0], w[1])));
        v.sort_unstable();
        v.dedup();
        FiniteDiagram {
            sig: Signature::LinearOrder,
            facts: v,
        }
    }

    /// Equivalence given by its classes, stored as stars on each class minimum.
    pub fn partition<'a>(classes: impl IntoIterator<Item = &'a [Elem]>) -> Self {
        let mut v = Vec::new();
        for class in classes {
            if let Some(&m) = class.iter().min() {
                for &x in class {
                    v.push(Fact::El(x));
                    if x != m {
                        v.push(Fact::sim(m, x));
                    }
                }
            }
        }
        v.sort_unstable();
        v.dedup();
        FiniteDiagram {
            sig: Signature::Equivalence,
            facts: v,
        }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    fn el_end(&self) -> usize {
        self.facts.partition_point(|f| matches!(f, Fact::El(_)))
    }

    pub fn domain(&self) -> impl Iterator<Item = Elem> + '_ {
        self.facts[..self.el_end()].iter().map(|f| match f {
            Fact::El(x) => *x,
            _ => unreachable!(),
        })
    }

    pub fn domain_vec(&self) -> Vec<Elem> {
        self.domain().collect()
    }

    pub fn size(&self) -> usize {
        self.el_end()
    }

    pub fn max_elem(&self) -> Option<Elem> {
        self.domain().last()
    }

    pub fn has_elem(&self, x: Elem) -> bool {
        self.facts[..self.el_end()]
            .binary_search(&Fact::El(x))
            .is_ok()
    }

    pub fn contains(&self, f: &Fact) -> bool {
        self.facts.binary_search(f).is_ok()
    }

    pub fn relation_facts(&self) -> &[Fact] {
        &self.facts[self.el_end()..]
    }

    pub fn lt_pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.relation_facts().iter().filter_map(|f| match *f {
            Fact::Lt(a, b) => Some((a, b)),
            _ => None,
        })
    }

    pub fn sim_pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.relation_facts().iter().filter_map(|f| match *f {
            Fact::Sim(a, b) => Some((a, b)),
            _ => None,
        })
    }

    /// Raw union of generating facts.
    pub fn union(&self, other: &FiniteDiagram) -> Result<FiniteDiagram> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch {
                expected: self.sig,
                found: other.sig,
            });
        }
        let mut v = Vec::with_capacity(self.facts.len() + other.facts.len());
        v.extend_from_slice(&self.facts);
        v.extend_from_slice(&other.facts);
        v.sort_unstable();
        v.dedup();
        Ok(FiniteDiagram {
            sig: self.sig,
            facts: v,
        })
    }

    /// Generating facts of `self` that are not generating facts of `prev`.
    pub fn facts_not_in(&self, prev: &FiniteDiagram) -> Vec<Fact> {
        let mut out = Vec::new();
        let mut j = 0;
        for f in &self.facts {
            while j < prev.facts.len() && prev.facts[j] < *f {
                j += 1;
            }
            if j < prev.facts.len() && prev.facts[j] == *f {
                continue;
            }
            out.push(*f);
        }
        out
    }

    pub fn order(&self) -> Result<OrderView> {
        self.expect(Signature::LinearOrder)?;
        OrderView::build(self)
    }

    pub fn classes(&self) -> Result<Partition> {
        self.expect(Signature::Equivalence)?;
        Ok(Partition::build(self))
    }

    pub fn expect(&self, sig: Signature) -> Result<()> {
        if self.sig == sig {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                expected: sig,
                found: self.sig,
            })
        }
    }

    /// Consistency of the closure: a strict partial order, or any equivalence.
    pub fn check_consistent(&self) -> Result<()> {
        match self.sig {
            Signature::LinearOrder => self.order().map(|_| ()),
            Signature::Equivalence => Ok(()),
        }
    }

    pub fn is_total(&self) -> Result<bool> {
        Ok(self.order()?.is_total())
    }

    /// Chain of a total order, or `NotTotal`.
    pub fn total_chain(&self) -> Result<Vec<Elem>> {
        let view = self.order()?;
        view.chain()
            .map(|c| c.to_vec())
            .ok_or_else(|| Error::NotTotal(format!("{} elements", view.len())))
    }

    /// Canonical generating set: covering pairs for orders, stars on class minima
    /// for equivalences. Two diagrams have the same closure iff their normal
    /// forms are equal.
    pub fn normalized(&self) -> Result<FiniteDiagram> {
        match self.sig {
            Signature::LinearOrder => {
                let view = self.order()?;
                if let Some(c) = view.chain() {
                    return Ok(FiniteDiagram::chain(c));
                }
                let mut facts: Vec<Fact> = view.elems.iter().map(|&x| Fact::El(x)).collect();
                for (x, y) in view.covers() {
                    facts.push(Fact::Lt(x, y));
                }
                FiniteDiagram::from_facts(Signature::LinearOrder, facts)
            }
            Signature::Equivalence => {
                let p = self.classes()?;
                let classes: Vec<&[Elem]> = p.classes.values().map(|c| c.as_slice()).collect();
                Ok(FiniteDiagram::partition(classes))
            }
        }
    }

    /// Every fact of the closure.
    pub fn closed(&self) -> Result<FiniteDiagram> {
        let mut facts: Vec<Fact> = self.domain().map(Fact::El).collect();
        match self.sig {
            Signature::LinearOrder => {
                let view = self.order()?;
                for &a in &view.elems {
                    for &b in &view.elems {
                        if view.less(a, b) {
                            facts.push(Fact::Lt(a, b));
                        }
                    }
                }
            }
            Signature::Equivalence => {
                for class in self.classes()?.classes.values() {
                    for (i, &a) in class.iter().enumerate() {
                        for &b in &class[i + 1..] {
                            facts.push(Fact::Sim(a, b));
                        }
                    }
                }
            }
        }
        FiniteDiagram::from_facts(self.sig, facts)
    }

    /// Induced substructure on the elements satisfying `keep`, taken on the
    /// closure so that facts implied through dropped elements survive.
    pub fn restrict(&self, keep: impl Fn(Elem) -> bool) -> Result<FiniteDiagram> {
        match self.sig {
            Signature::LinearOrder => {
                let view = self.order()?;
                if let Some(c) = view.chain() {
                    let kept: Vec<Elem> = c.iter().copied().filter(|&x| keep(x)).collect();
                    return Ok(FiniteDiagram::chain(&kept));
                }
                let kept: Vec<Elem> = view.elems.iter().copied().filter(|&x| keep(x)).collect();
                let mut facts: Vec<Fact> = kept.iter().map(|&x| Fact::El(x)).collect();
                for &a in &kept {
                    for &b in &kept {
                        if view.less(a, b) {
                            facts.push(Fact::Lt(a, b));
                        }
                    }
                }
                FiniteDiagram::from_facts(Signature::LinearOrder, facts)?.normalized()
            }
            Signature::Equivalence => {
                let p = self.classes()?;
                let classes: Vec<Vec<Elem>> = p
                    .classes
                    .values()
                    .map(|c| c.iter().copied().filter(|&x| keep(x)).collect::<Vec<_>>())
                    .filter(|c| !c.is_empty())
                    .collect();
                Ok(FiniteDiagram::partition(classes.iter().map(|c| c.as_slice())))
            }
        }
    }

    /// Renames elements; `f` must be injective on the domain.
    pub fn relabel(&self, f: impl Fn(Elem) -> Elem) -> Result<FiniteDiagram> {
        FiniteDiagram::from_facts(self.sig, self.facts.iter().map(|x| x.map(&f)))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for f in &self.facts {
            s.push_str(&f.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses `el n` / `lt a b` / `sim a b` lines; `#` starts a comment. With no
    /// signature hint, `lt` or `sim` facts decide it and a bare domain defaults
    /// to a linear order.
    pub fn parse_text(text: &str, hint: Option<Signature>) -> Result<FiniteDiagram> {
        let facts = parse_fact_lines(text, 0)?;
        let sig = match hint {
            Some(s) => s,
            None => infer_signature(&facts),
        };
        let d = FiniteDiagram::from_facts(sig, facts)?;
        d.check_consistent()?;
        Ok(d)
    }
}

pub(crate) fn infer_signature(facts: &[Fact]) -> Signature {
    facts
        .iter()
        .find_map(|f| f.signature())
        .unwrap_or(Signature::LinearOrder)
}

pub(crate) fn parse_fact_lines(text: &str, line_offset: usize) -> Result<Vec<Fact>> {
    let mut facts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f = line.parse::<Fact>().map_err(|msg| Error::Parse {
            line: line_offset + i + 1,
            msg,
        })?;
        facts.push(f);
    }
    Ok(facts)
}

/// Strict order closure of an `lt` diagram.
#[derive(Clone, Debug)]
pub struct OrderView {
    /// Sorted; indexes below are positions in this vector.
    elems: Vec<Elem>,
    kind: OrderKind,
}

#[derive(Clone, Debug)]
enum OrderKind {
    Total { chain: Vec<Elem>, pos: Vec<usize> },
    Partial { reach: Vec<Vec<u64>> },
}

impl OrderView {
    fn build(d: &FiniteDiagram) -> Result<OrderView> {
        let elems = d.domain_vec();
        let n = elems.len();
        let index = |x: Elem| elems.binary_search(&x).expect("facts mention only domain elements");
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for (a, b) in d.lt_pairs() {
            let (ia, ib) = (index(a), index(b));
            succ[ia].push(ib);
            indeg[ib] += 1;
        }
        // Kahn; the topological order is unique exactly when the ready set
        // never holds two elements, which is totality of the closure
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        let mut total = true;
        while let Some(v) = ready.pop() {
            if !ready.is_empty() {
                total = false;
            }
            topo.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::Inconsistent("lt facts contain a cycle".into()));
        }
        if total {
            let mut pos = vec![0; n];
            for (p, &v) in topo.iter().enumerate() {
                pos[v] = p;
            }
            let chain = topo.iter().map(|&v| elems[v]).collect();
            return Ok(OrderView {
                elems,
                kind: OrderKind::Total { chain, pos },
            });
        }
        let words = n.div_ceil(64);
        let mut reach = vec![vec![0u64; words]; n];
        for &v in topo.iter().rev() {
            let mut row = vec![0u64; words];
            for &w in &succ[v] {
                row[w / 64] |= 1 << (w % 64);
                for (r, x) in row.iter_mut().zip(&reach[w]) {
                    *r |= *x;
                }
            }
            reach[v] = row;
        }
        Ok(OrderView {
            elems,
            kind: OrderKind::Partial { reach },
        })
    }

    fn index(&self, x: Elem) -> Option<usize> {
        self.elems.binary_search(&x).ok()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.index(x).is_some()
    }

    pub fn is_total(&self) -> bool {
        matches!(self.kind, OrderKind::Total { .. })
    }

    pub fn chain(&self) -> Option<&[Elem]> {
        match &self.kind {
            OrderKind::Total { chain, .. } => Some(chain),
            OrderKind::Partial { .. } => None,
        }
    }

    /// Position in the chain of a total order.
    pub fn position(&self, x: Elem) -> Option<usize> {
        match &self.kind {
            OrderKind::Total { pos, .. } => self.index(x).map(|i| pos[i]),
            OrderKind::Partial { .. } => None,
        }
    }

    pub fn less(&self, a: Elem, b: Elem) -> bool {
        let (Some(ia), Some(ib)) = (self.index(a), self.index(b)) else {
            return false;
        };
        match &self.kind {
            OrderKind::Total { pos, .. } => pos[ia] < pos[ib],
            OrderKind::Partial { reach } => reach[ia][ib / 64] >> (ib % 64) & 1 == 1,
        }
    }

    pub fn minimal(&self) -> Vec<Elem> {
        self.elems
            .iter()
            .copied()
            .filter(|&x| !self.elems.iter().any(|&y| self.less(y, x)))
            .collect()
    }

    pub fn maximal(&self) -> Vec<Elem> {
        self.elems
            .iter()
            .copied()
            .filter(|&x| !self.elems.iter().any(|&y| self.less(x, y)))
            .collect()
    }

    fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for &a in &self.elems {
            for &b in &self.elems {
                if self.less(a, b) && !self.elems.iter().any(|&z| self.less(a, z) && self.less(z, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Classes of an equivalence diagram, keyed by class minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub classes: BTreeMap<Elem, Vec<Elem>>,
    /// Sorted domain and the class minimum of each element.
    elems: Vec<Elem>,
    reps: Vec<Elem>,
}

impl Partition {
    fn build(d: &FiniteDiagram) -> Partition {
        let elems = d.domain_vec();
        let index = |x: Elem| elems.binary_search(&x).expect("facts mention only domain elements");
        let mut uf = UnionFind::new(elems.len());
        for (a, b) in d.sim_pairs() {
            uf.union(index(a), index(b));
        }
        let mut classes: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
        let mut by_root: HashMap<usize, Elem> = HashMap::new();
        let mut reps = Vec::with_capacity(elems.len());
        // elems is sorted, so the first member seen for each root is its minimum
        for (i, &x) in elems.iter().enumerate() {
            let r = uf.find(i);
            let m = *by_root.entry(r).or_insert(x);
            classes.entry(m).or_default().push(x);
            reps.push(m);
        }
        Partition { classes, elems, reps }
    }

    pub fn rep(&self, x: Elem) -> Option<Elem> {
        self.elems.binary_search(&x).ok().map(|i| self.reps[i])
    }

    pub fn same(&self, a: Elem, b: Elem) -> bool {
        match (self.rep(a), self.rep(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn class_size(&self, x: Elem) -> usize {
        self.rep(x).map(|r| self.classes[&r].len()).unwrap_or(0)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.values().map(|c| c.len()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn push(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        id
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        a
    }

    pub fn class_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Closure of a diagram, built once and queried for inclusion many times.
#[derive(Clone, Debug)]
pub enum ClosureView {
    Order(OrderView),
    Classes(Partition),
}

impl ClosureView {
    pub fn of(d: &FiniteDiagram) -> Result<ClosureView> {
        Ok(match d.sig {
            Signature::LinearOrder => ClosureView::Order(d.order()?),
            Signature::Equivalence => ClosureView::Classes(d.classes()?),
        })
    }

    fn signature(&self) -> Signature {
        match self {
            ClosureView::Order(_) => Signature::LinearOrder,
            ClosureView::Classes(_) => Signature::Equivalence,
        }
    }

    /// Whether the closure of `a` lies inside this closure.
    pub fn includes(&self, a: &FiniteDiagram) -> Result<bool> {
        if a.sig != self.signature() {
            return Err(Error::SignatureMismatch {
                expected: a.sig,
                found: self.signature(),
            });
        }
        Ok(match self {
            ClosureView::Order(v) => a.domain().all(|x| v.contains(x)) && a.lt_pairs().all(|(x, y)| v.less(x, y)),
            ClosureView::Classes(p) => a.domain().all(|x| p.rep(x).is_some()) && a.sim_pairs().all(|(x, y)| p.same(x, y)),
        })
    }
}

/// `a ⊆ b` on closures. Both diagrams must share a signature.
pub fn closure_subset(a: &FiniteDiagram, b: &FiniteDiagram) -> Result<bool> {
    if a.sig != b.sig {
        return Err(Error::SignatureMismatch {
            expected: a.sig,
            found: b.sig,
        });
    }
    if !a.domain().all(|x| b.has_elem(x)) {
        return Ok(false);
    }
    ClosureView::of(b)?.includes(a)
}

pub fn closure_eq(a: &FiniteDiagram, b: &FiniteDiagram) -> Result<bool> {
    Ok(closure_subset(a, b)? && closure_subset(b, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lo(facts: &[Fact]) -> FiniteDiagram {
        FiniteDiagram::from_facts(Signature::LinearOrder, facts.iter().copied()).unwrap()
    }

    #[test]
    fn facts_roundtrip_text() {
        for s in ["el 4", "lt 1 2", "sim 3 9"] {
            assert_eq!(s.parse::<Fact>().unwrap().to_string(), s);
        }
        assert_eq!("sim 9 3".parse::<Fact>().unwrap(), Fact::Sim(3, 9));
        assert!("lt 2 2".parse::<Fact>().is_err());
        assert!("gt 1 2".parse::<Fact>().is_err());
    }

    #[test]
    fn domain_is_filled_in() {
        let d = lo(&[Fact::Lt(3, 1)]);
        assert_eq!(d.domain_vec(), vec![1, 3]);
        assert!(d.has_elem(3));
        assert!(!d.has_elem(2));
    }

    #[test]
    fn signature_is_enforced() {
        let r = FiniteDiagram::from_facts(Signature::Equivalence, [Fact::Lt(0, 1)]);
        assert!(matches!(r, Err(Error::SignatureMismatch { .. })));
    }

    #[test]
    fn totality_by_topological_uniqueness() {
        let total = lo(&[Fact::Lt(0, 1), Fact::Lt(1, 2)]);
        assert_eq!(total.total_chain().unwrap(), vec![0, 1, 2]);
        let partial = lo(&[Fact::Lt(0, 1), Fact::Lt(0, 2)]);
        assert!(!partial.is_total().unwrap());
        assert!(partial.order().unwrap().less(0, 2));
        assert!(!partial.order().unwrap().less(1, 2));
        let cyc = lo(&[Fact::Lt(0, 1), Fact::Lt(1, 0)]);
        assert!(matches!(cyc.order(), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn subset_uses_closure() {
        let covers = lo(&[Fact::Lt(0, 1), Fact::Lt(1, 2)]);
        let implied = lo(&[Fact::Lt(0, 2)]);
        assert!(closure_subset(&implied, &covers).unwrap());
        assert!(!closure_subset(&covers, &implied).unwrap());
        let closed = covers.closed().unwrap();
        assert!(closure_eq(&closed, &covers).unwrap());
        assert_eq!(closed.normalized().unwrap(), covers);
    }

    #[test]
    fn restriction_keeps_implied_facts() {
        let d = FiniteDiagram::chain(&[5, 2, 9]);
        let r = d.restrict(|x| x != 2).unwrap();
        assert_eq!(r.total_chain().unwrap(), vec![5, 9]);
    }

    #[test]
    fn partitions() {
        let d = FiniteDiagram::from_facts(
            Signature::Equivalence,
            [Fact::sim(4, 2), Fact::sim(2, 7), Fact::El(1)],
        )
        .unwrap();
        let p = d.classes().unwrap();
        assert_eq!(p.classes.len(), 2);
        assert_eq!(p.classes[&2], vec![2, 4, 7]);
        assert!(p.same(4, 7));
        assert_eq!(p.class_size(1), 1);
        assert_eq!(d.restrict(|x| x != 2).unwrap().classes().unwrap().classes[&4], vec![4, 7]);
    }

    #[test]
    fn parse_with_comments() {
        let d = FiniteDiagram::parse_text("# a chain\nel 0\nlt 0 1 # trailing\n\nlt 1 2\n", None).unwrap();
        assert_eq!(d.signature(), Signature::LinearOrder);
        assert_eq!(d.total_chain().unwrap(), vec![0, 1, 2]);
        let e = FiniteDiagram::parse_text("sim 0 1\n", None).unwrap();
        assert_eq!(e.signature(), Signature::Equivalence);
        let err = FiniteDiagram::parse_text("el 0\nlt 0\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}

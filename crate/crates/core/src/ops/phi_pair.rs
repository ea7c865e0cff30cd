//! Guessing construction that builds one of two target orders depending on
//! whether the input keeps producing new minima or new maxima.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::kernel::{Annotation, Construction, ConstructionRun};
use crate::stream::StructureStream;
use crate::structures::{Elem, Fact, FiniteDiagram, Signature};

/// Two target presentations with the stage maps used when switching.
///
/// Each target stage must add exactly one element. Switching from `A` at
/// stage `t` continues `B` at stage `u(t)`; the output, isomorphic to `A^t`,
/// is embedded into `B^{u(t)}` by the order isomorphism onto the bottom
/// positions, padding new elements on top. `v` is the same map for `B -> A`.
#[derive(Clone, Debug)]
pub struct StagePair {
    a: TargetChains,
    b: TargetChains,
    u: Vec<usize>,
    v: Vec<usize>,
}

#[derive(Clone, Debug)]
struct TargetChains {
    /// Position of the element added at stage `t` within the chain of stage `t`.
    insert_at: Vec<usize>,
}

impl TargetChains {
    fn new(s: &StructureStream) -> Result<Self> {
        if s.signature() != Signature::LinearOrder {
            return Err(Error::SignatureMismatch {
                expected: Signature::LinearOrder,
                found: s.signature(),
            });
        }
        let mut insert_at = Vec::with_capacity(s.len());
        for (t, d) in s.stages().enumerate() {
            let chain = d.total_chain()?;
            if chain.len() != t + 1 {
                return Err(Error::InvalidInput(format!(
                    "target stage {t} has {} elements, expected {}",
                    chain.len(),
                    t + 1
                )));
            }
            let new: Vec<Elem> = s
                .delta(t)
                .iter()
                .filter_map(|f| match f {
                    Fact::El(x) => Some(*x),
                    _ => None,
                })
                .collect();
            let x = new[0];
            insert_at.push(chain.iter().position(|&y| y == x).unwrap());
        }
        Ok(TargetChains { insert_at })
    }
}

impl StagePair {
    /// Identity stage maps.
    pub fn new(a: &StructureStream, b: &StructureStream) -> Result<Self> {
        let (a, b) = (TargetChains::new(a)?, TargetChains::new(b)?);
        let u = (0..b.insert_at.len()).collect();
        let v = (0..a.insert_at.len()).collect();
        Ok(StagePair { a, b, u, v })
    }

    pub fn with_maps(a: &StructureStream, b: &StructureStream, u: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        let mut p = StagePair::new(a, b)?;
        for (name, m) in [("u", &u), ("v", &v)] {
            if m.iter().enumerate().any(|(t, &x)| x < t) || m.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidSpec(format!(
                    "stage map {name} must be non-decreasing with {name}(t) >= t"
                )));
            }
        }
        p.u = u;
        p.v = v;
        Ok(p)
    }
}

pub struct PhiPair {
    pair: StagePair,
}

impl PhiPair {
    pub fn new(pair: StagePair) -> Self {
        PhiPair { pair }
    }
}

impl Construction for PhiPair {
    fn name(&self) -> String {
        "phi_pair".into()
    }
    fn input_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn start(&self) -> Box<dyn ConstructionRun + '_> {
        Box::new(PhiPairRun {
            pair: &self.pair,
            chain: Vec::new(),
            seen: HashSet::new(),
            state: None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    A,
    B,
}

struct PhiPairRun<'a> {
    pair: &'a StagePair,
    /// Output elements bottom to top; ids are handed out in creation order.
    chain: Vec<Elem>,
    seen: HashSet<Elem>,
    state: Option<(Target, usize, Elem, Elem)>,
}

impl PhiPairRun<'_> {
    fn fresh(&self) -> Elem {
        self.chain.len() as Elem
    }

    fn extend(&mut self, target: Target, t: usize) -> Result<usize> {
        let chains = match target {
            Target::A => &self.pair.a,
            Target::B => &self.pair.b,
        };
        let pos = *chains
            .insert_at
            .get(t + 1)
            .ok_or_else(|| Error::InvalidInput(format!("target stream shorter than {} stages", t + 2)))?;
        let x = self.fresh();
        self.chain.insert(pos, x);
        Ok(t + 1)
    }

    fn switch(&mut self, to: Target, t: usize) -> Result<usize> {
        let map = match to {
            Target::B => &self.pair.u,
            Target::A => &self.pair.v,
        };
        let nt = *map
            .get(t)
            .ok_or_else(|| Error::InvalidInput(format!("stage map undefined at {t}")))?;
        for _ in t..nt {
            let x = self.fresh();
            self.chain.push(x);
        }
        Ok(nt)
    }
}

impl ConstructionRun for PhiPairRun<'_> {
    fn step(&mut self, input: &FiniteDiagram) -> Result<(FiniteDiagram, Option<Annotation>)> {
        let view = input.order()?;
        if !view.is_total() {
            return Err(Error::InvalidInput("input stage is not a total order".into()));
        }
        let new: Vec<Elem> = view.elems().iter().copied().filter(|x| !self.seen.contains(x)).collect();
        if new.len() != 1 || view.len() != self.seen.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "expected exactly one new input element, got {}",
                new.len()
            )));
        }
        let d = new[0];
        self.seen.insert(d);
        let next = match self.state {
            None => {
                self.chain.push(0);
                (Target::A, 0, d, d)
            }
            Some((g, t, l, r)) => {
                if view.less(d, l) {
                    match g {
                        Target::A => (Target::B, self.switch(Target::B, t)?, d, r),
                        Target::B => (Target::B, self.extend(Target::B, t)?, d, r),
                    }
                } else if view.less(r, d) {
                    match g {
                        Target::B => (Target::A, self.switch(Target::A, t)?, l, d),
                        Target::A => (Target::A, self.extend(Target::A, t)?, l, d),
                    }
                } else {
                    (g, self.extend(g, t)?, l, r)
                }
            }
        };
        self.state = Some(next);
        let (g, t, l, r) = next;
        let annotation = Annotation::Guess {
            target: if g == Target::A { 'A' } else { 'B' },
            t,
            l,
            r,
        };
        Ok((FiniteDiagram::chain(&self.chain), Some(annotation)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, CanonicalSpec, Family, Policy};

    fn targets() -> StagePair {
        let a = generate(&CanonicalSpec::new(Family::OmegaK(2), Policy::Fair, 40)).unwrap();
        let b = generate(&CanonicalSpec::new(Family::OmegaStarK(2), Policy::Fair, 40)).unwrap();
        StagePair::new(&a, &b).unwrap()
    }

    fn guesses(input: &StructureStream, phi: &PhiPair) -> Vec<(char, usize, Elem, Elem)> {
        let mut run = phi.start();
        input
            .stages()
            .map(|d| match run.step(&d).unwrap().1 {
                Some(Annotation::Guess { target, t, l, r }) => (target, t, l, r),
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn hand_trace() {
        let mut s = StructureStream::new(Signature::LinearOrder, "trace");
        s.push_delta([crate::structures::Fact::El(5)]).unwrap();
        s.push_delta([crate::structures::Fact::Lt(3, 5)]).unwrap();
        s.push_delta([crate::structures::Fact::Lt(5, 7)]).unwrap();
        let phi = PhiPair::new(targets());
        assert_eq!(guesses(&s, &phi), vec![('A', 0, 5, 5), ('B', 0, 3, 5), ('A', 0, 3, 7)]);
    }

    #[test]
    fn ascending_input_never_switches() {
        let input = generate(&CanonicalSpec::new(Family::Omega, Policy::Ascending, 20)).unwrap();
        let phi = PhiPair::new(targets());
        let g = guesses(&input, &phi);
        assert!(g.iter().all(|x| x.0 == 'A'));
        assert_eq!(g.last().unwrap().1, 19);
    }

    #[test]
    fn descending_input_switches_once() {
        let input = generate(&CanonicalSpec::new(Family::OmegaStar, Policy::Descending, 20)).unwrap();
        let phi = PhiPair::new(targets());
        let g = guesses(&input, &phi);
        assert_eq!(g[0].0, 'A');
        assert!(g[1..].iter().all(|x| x.0 == 'B'));
    }

    #[test]
    fn output_tracks_the_target_shape() {
        let input = generate(&CanonicalSpec::new(Family::Omega, Policy::Fair, 10)).unwrap();
        let phi = PhiPair::new(targets());
        let mut run = phi.start();
        let mut last = None;
        for d in input.stages() {
            last = Some(run.step(&d).unwrap().0);
        }
        // ten elements shaped like the first ten stages of ω·2: even ids first
        let a = generate(&CanonicalSpec::new(Family::OmegaK(2), Policy::Fair, 10)).unwrap();
        assert_eq!(last.unwrap().total_chain().unwrap(), a.stage(9).total_chain().unwrap());
    }
}

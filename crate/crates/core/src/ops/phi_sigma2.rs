//! Construction that copies ω or ω* one element at a time, steered by the
//! least finite witnesses of two existential-universal sentences.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kernel::{Annotation, Construction, ConstructionRun};
use crate::ops::formula::{Model, Sigma2Sentence};
use crate::structures::{Elem, FiniteDiagram, Signature};

pub struct PhiSigma2 {
    phi: Sigma2Sentence,
    psi: Sigma2Sentence,
}

impl PhiSigma2 {
    pub fn new(phi: Sigma2Sentence, psi: Sigma2Sentence) -> Result<Self> {
        if phi.signature != psi.signature {
            return Err(Error::SignatureMismatch {
                expected: phi.signature,
                found: psi.signature,
            });
        }
        Ok(PhiSigma2 { phi, psi })
    }
}

/// Witness order: shorter tuples first, then lexicographic by id.
pub fn witness_cmp(a: &[Elem], b: &[Elem]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl Construction for PhiSigma2 {
    fn name(&self) -> String {
        "phi_sigma2".into()
    }
    fn input_signature(&self) -> Signature {
        self.phi.signature
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn start(&self) -> Box<dyn ConstructionRun + '_> {
        Box::new(PhiSigma2Run {
            op: self,
            chain: Vec::new(),
            stage: 0,
        })
    }
}

struct PhiSigma2Run<'a> {
    op: &'a PhiSigma2,
    chain: Vec<Elem>,
    stage: usize,
}

impl ConstructionRun for PhiSigma2Run<'_> {
    fn step(&mut self, input: &FiniteDiagram) -> Result<(FiniteDiagram, Option<Annotation>)> {
        input.expect(self.op.phi.signature)?;
        let model = Model::new(input)?;
        let s = self.stage;
        let phi_w = self.op.phi.least_witness(&model, s);
        let psi_w = self.op.psi.least_witness(&model, s);
        // no witnesses or only a φ-witness: copy ω; only a ψ-witness: copy ω*;
        // both: the smaller least witness decides
        let top = match (&phi_w, &psi_w) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => witness_cmp(a, b) == Ordering::Less,
        };
        let x = s as Elem;
        if top {
            self.chain.push(x);
        } else {
            self.chain.insert(0, x);
        }
        self.stage += 1;
        Ok((
            FiniteDiagram::chain(&self.chain),
            Some(Annotation::Placement {
                top,
                phi_witness: phi_w,
                psi_witness: psi_w,
            }),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, CanonicalSpec, Family, Policy};

    fn placements(family: Family, stages: usize) -> Vec<bool> {
        let input = generate(&CanonicalSpec::new(family, Policy::Fair, stages)).unwrap();
        let op = PhiSigma2::new(Sigma2Sentence::least_element(), Sigma2Sentence::greatest_element()).unwrap();
        let mut run = op.start();
        input
            .stages()
            .map(|d| match run.step(&d).unwrap().1 {
                Some(Annotation::Placement { top, .. }) => top,
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn omega_goes_on_top() {
        let p = placements(Family::Omega, 30);
        assert!(p[1..].iter().all(|&t| t));
    }

    #[test]
    fn omega_star_goes_below() {
        let p = placements(Family::OmegaStar, 30);
        assert!(p[1..].iter().all(|&t| !t));
    }

    #[test]
    fn witness_order() {
        assert_eq!(witness_cmp(&[9], &[1, 2]), Ordering::Less);
        assert_eq!(witness_cmp(&[1, 3], &[1, 2]), Ordering::Greater);
    }
}

use crate::encoding::cantor;
use crate::error::{Error, Result};
use crate::kernel::{check_input, Budget, EnumerationOperator};
use crate::structures::{Fact, FiniteDiagram, Signature};

/// `q` copies of the input order laid end to end. Copy `i` of element `x` is
/// `cantor(i, x)`. The budget plays no role.
pub struct Replicate {
    q: u32,
}

impl Replicate {
    pub fn new(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidSpec("replicate needs at least one copy".into()));
        }
        Ok(Replicate { q })
    }

    pub fn copies(&self) -> u32 {
        self.q
    }
}

impl EnumerationOperator for Replicate {
    fn name(&self) -> String {
        format!("replicate:{}", self.q)
    }
    fn input_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn eval(&self, alpha: &FiniteDiagram, _budget: Budget) -> Result<FiniteDiagram> {
        check_input(self, alpha)?;
        let view = alpha.order()?;
        let (top, bottom) = (view.maximal(), view.minimal());
        let q = self.q as u64;
        let mut facts = Vec::new();
        for i in 0..q {
            for x in alpha.domain() {
                facts.push(Fact::El(cantor(i, x)?));
            }
            for (a, b) in alpha.lt_pairs() {
                facts.push(Fact::Lt(cantor(i, a)?, cantor(i, b)?));
            }
            if i + 1 < q {
                for &a in &top {
                    for &b in &bottom {
                        facts.push(Fact::Lt(cantor(i, a)?, cantor(i + 1, b)?));
                    }
                }
            }
        }
        FiniteDiagram::from_facts(Signature::LinearOrder, facts)
    }
    fn extension_complete(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::uncantor;

    #[test]
    fn two_copies_of_a_pair() {
        let out = Replicate::new(2).unwrap().eval(&FiniteDiagram::chain(&[0, 1]), 0).unwrap();
        let chain: Vec<(u64, u64)> = out.total_chain().unwrap().into_iter().map(uncantor).collect();
        assert_eq!(chain, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn empty_and_partial_inputs() {
        let r = Replicate::new(3).unwrap();
        assert!(r.eval(&FiniteDiagram::empty(Signature::LinearOrder), 5).unwrap().is_empty());
        let antichain = FiniteDiagram::from_facts(Signature::LinearOrder, [Fact::El(0), Fact::El(1)]).unwrap();
        let out = r.eval(&antichain, 0).unwrap();
        let v = out.order().unwrap();
        assert!(v.less(cantor(0, 0).unwrap(), cantor(1, 1).unwrap()));
        assert!(!v.less(cantor(0, 0).unwrap(), cantor(0, 1).unwrap()));
    }

    #[test]
    fn zero_copies_rejected() {
        assert!(Replicate::new(0).is_err());
    }
}

use crate::encoding::cantor;
use crate::error::Result;
use crate::kernel::{check_input, Budget, EnumerationOperator};
use crate::structures::{Fact, FiniteDiagram, Signature};

/// Budget-many copies of the input equivalence; copy `c` of `x` is `cantor(c, x)`.
/// In the limit every class occurs infinitely often.
pub struct ClassMultiplier;

impl EnumerationOperator for ClassMultiplier {
    fn name(&self) -> String {
        "class_multiplier".into()
    }
    fn input_signature(&self) -> Signature {
        Signature::Equivalence
    }
    fn output_signature(&self) -> Signature {
        Signature::Equivalence
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        check_input(self, alpha)?;
        let mut facts = Vec::new();
        for c in 0..budget {
            for x in alpha.domain() {
                facts.push(Fact::El(cantor(c, x)?));
            }
            for (a, b) in alpha.sim_pairs() {
                facts.push(Fact::sim(cantor(c, a)?, cantor(c, b)?));
            }
        }
        FiniteDiagram::from_facts(Signature::Equivalence, facts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copies_follow_budget() {
        let alpha = FiniteDiagram::partition([&[7u64][..]]);
        let out = ClassMultiplier.eval(&alpha, 4).unwrap();
        assert_eq!(out.classes().unwrap().sizes(), vec![1, 1, 1, 1]);
        assert!(ClassMultiplier.eval(&alpha, 0).unwrap().is_empty());
        let pair = FiniteDiagram::partition([&[0u64, 1][..], &[2][..]]);
        let mut sizes = ClassMultiplier.eval(&pair, 3).unwrap().classes().unwrap().sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 1, 2, 2, 2]);
    }
}

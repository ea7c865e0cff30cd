use crate::encoding::cantor;
use crate::error::{Error, Result};
use crate::kernel::{check_input, Annotation, Budget, EnumerationOperator};
use crate::structures::{Elem, Fact, FiniteDiagram, Signature};

/// Order to equivalence: input element `x` owns the output class of
/// `cantor(x, 0)`, with members `cantor(x, j)`.
///
/// While `x` is the least element its class holds one member; while it is the
/// greatest (of at least two) it holds two; otherwise it holds `budget + 2`
/// and keeps growing. Dethroned extremes fall into the last case, so a limit
/// order with a least element yields exactly one class of size 1, and dually.
pub struct Ord2Eq;

pub fn member(x: Elem, j: u64) -> Result<Elem> {
    cantor(x, j)
}

impl EnumerationOperator for Ord2Eq {
    fn name(&self) -> String {
        "ord2eq".into()
    }
    fn input_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn output_signature(&self) -> Signature {
        Signature::Equivalence
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        check_input(self, alpha)?;
        let chain = alpha
            .total_chain()
            .map_err(|e| Error::InvalidInput(format!("ord2eq needs a total order: {e}")))?;
        let mut facts = Vec::new();
        let last = chain.len().saturating_sub(1);
        for (i, &x) in chain.iter().enumerate() {
            let size = if i == 0 {
                1
            } else if i == last {
                2
            } else {
                budget + 2
            };
            let head = member(x, 0)?;
            facts.push(Fact::El(head));
            for j in 1..size {
                facts.push(Fact::sim(head, member(x, j)?));
            }
        }
        FiniteDiagram::from_facts(Signature::Equivalence, facts)
    }
    fn annotate(&self, alpha: &FiniteDiagram, _budget: Budget) -> Option<Annotation> {
        let chain = alpha.total_chain().ok()?;
        let size_one = chain.first().map(|&x| member(x, 0)).transpose().ok()?;
        let size_two = if chain.len() >= 2 {
            Some(member(*chain.last().unwrap(), 0).ok()?)
        } else {
            None
        };
        Some(Annotation::Pinned { size_one, size_two })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_element_chain() {
        let out = Ord2Eq.eval(&FiniteDiagram::chain(&[0, 1, 2]), 10).unwrap();
        let p = out.classes().unwrap();
        assert_eq!(p.class_size(member(0, 0).unwrap()), 1);
        assert_eq!(p.class_size(member(2, 0).unwrap()), 2);
        assert_eq!(p.class_size(member(1, 0).unwrap()), 12);
        assert_eq!(p.classes.len(), 3);
    }

    #[test]
    fn single_element_is_only_least() {
        let out = Ord2Eq.eval(&FiniteDiagram::chain(&[4]), 3).unwrap();
        assert_eq!(out.classes().unwrap().sizes(), vec![1]);
        assert_eq!(
            Ord2Eq.annotate(&FiniteDiagram::chain(&[4]), 3),
            Some(Annotation::Pinned {
                size_one: Some(member(4, 0).unwrap()),
                size_two: None
            })
        );
    }

    #[test]
    fn partial_input_rejected() {
        let d = FiniteDiagram::from_facts(Signature::LinearOrder, [Fact::El(0), Fact::El(1)]).unwrap();
        assert!(matches!(Ord2Eq.eval(&d, 0), Err(Error::InvalidInput(_))));
    }
}

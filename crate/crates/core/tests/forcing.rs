use std::sync::Arc;

use embedlab::enumerate::permutations;
use embedlab::forcing::{
    bounded_force, disjoint_agreement_scan, finiteness_probe, trichotomy_scan, ForcingContext, ForcingOutcome,
    ForcingQuery,
};
use embedlab::kernel::{FillStyle, IntervalFill, OperatorTarget};
use embedlab::ops::axioms::AxiomTable;
use embedlab::ops::ord2eq::Ord2Eq;
use embedlab::ops::replicate::Replicate;
use embedlab::{Error, Fact, FiniteDiagram};

fn cantor(x: u64, y: u64) -> u64 {
    (x + y) * (x + y + 1) / 2 + y
}

#[test]
fn replicate_forces_the_input_order_in_every_copy() {
    let op = Replicate::new(3).unwrap();
    for perm in permutations(&[0, 1, 2]) {
        let alpha = FiniteDiagram::chain(&perm);
        let ctx = ForcingContext::new(&op, &alpha, 2, 32).unwrap();
        for copy in 0..3 {
            for (i, &x) in perm.iter().enumerate() {
                for &y in &perm[i + 1..] {
                    let (a, b) = (cantor(copy, x), cantor(copy, y));
                    assert_eq!(ctx.verdict(&Fact::Lt(a, b)).unwrap(), ForcingOutcome::Forced);
                    let back = ctx.verdict(&Fact::Lt(b, a)).unwrap();
                    assert!(matches!(back, ForcingOutcome::Refuted { .. }), "{back:?}");
                }
            }
        }
    }
}

#[test]
fn outputs_outside_the_image_are_rejected() {
    let op = Replicate::new(2).unwrap();
    let q = ForcingQuery {
        op: &op,
        alpha: FiniteDiagram::chain(&[0, 1]),
        atom: Fact::Lt(0, 1000),
        ext_bound: 1,
        budget: 8,
    };
    assert!(matches!(bounded_force(&q), Err(Error::NotInOutput(_))));
    let eq = Ord2Eq;
    let q = ForcingQuery {
        op: &eq,
        alpha: FiniteDiagram::chain(&[0, 1]),
        atom: Fact::Lt(0, 1),
        ext_bound: 1,
        budget: 8,
    };
    assert!(matches!(bounded_force(&q), Err(Error::InvalidTarget(_))));
}

#[test]
fn certificate_extends_alpha() {
    let op = AxiomTable::parse("flip", "axiom: el 0 => el 10\naxiom: el 0 => el 11\naxiom: el 0; el 1 => lt 11 10\n").unwrap();
    let alpha = FiniteDiagram::chain(&[0]);
    let q = ForcingQuery {
        op: &op,
        alpha: alpha.clone(),
        atom: Fact::Lt(10, 11),
        ext_bound: 1,
        budget: 4,
    };
    match bounded_force(&q).unwrap() {
        ForcingOutcome::Refuted { certificate } => {
            assert!(certificate.contains(&0) && certificate.len() == 2, "{certificate:?}");
        }
        other => panic!("{other:?}"),
    }
    // nothing to refute with no room to extend
    assert_eq!(bounded_force(&ForcingQuery { ext_bound: 0, ..q }).unwrap(), ForcingOutcome::Unknown);
}

#[test]
fn scans_on_shipped_operators() {
    for q in 1..=2 {
        let op = Replicate::new(q).unwrap();
        let t = trichotomy_scan(&op, 3, 2, 32).unwrap();
        assert!(t.ok(), "{:?}", t.violations);
        let a = disjoint_agreement_scan(&op, 2, 1, 32).unwrap();
        assert!(a.violations.is_empty());
    }
}

#[test]
fn finiteness_separates_fill_from_replicate() {
    let alpha = FiniteDiagram::chain(&[0, 1, 2]);
    let rep = OperatorTarget::Enumeration(Arc::new(Replicate::new(2).unwrap()));
    let r = finiteness_probe(&rep, &alpha, 20).unwrap();
    assert!(r.stable && r.final_size == 6, "{r:?}");
    let fill = OperatorTarget::Enumeration(Arc::new(
        IntervalFill::new(Arc::new(Replicate::new(1).unwrap()), FillStyle::LeftClosed).unwrap(),
    ));
    assert!(!finiteness_probe(&fill, &alpha, 20).unwrap().stable);
}

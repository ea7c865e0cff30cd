use std::sync::Arc;

use embedlab::classifier::{fingerprint, finite_iso};
use embedlab::kernel::{run, BudgetSchedule, Compose, OperatorTarget};
use embedlab::ops::eq2ord::Eq2Ord;
use embedlab::ops::ord2eq::Ord2Eq;
use embedlab::ops::replicate::Replicate;
use embedlab::structures::closure_subset;
use embedlab::{generate, CanonicalSpec, EnumerationOperator, Family, FiniteDiagram, OpRef, Policy};
use proptest::prelude::*;

fn cantor(x: u64, y: u64) -> u64 {
    (x + y) * (x + y + 1) / 2 + y
}

/// Distinct ids in a random order, read as a chain.
fn chain(max: usize) -> impl Strategy<Value = Vec<u64>> {
    proptest::sample::subsequence((0u64..40).collect::<Vec<_>>(), 1..=max).prop_shuffle()
}

/// Random partition of distinct ids into classes.
fn classes(max: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    (chain(max), proptest::collection::vec(0usize..3, max)).prop_map(|(ids, labels)| {
        let mut out: Vec<Vec<u64>> = vec![Vec::new(); 3];
        for (x, l) in ids.into_iter().zip(labels) {
            out[l].push(x);
        }
        out.retain(|c| !c.is_empty());
        out
    })
}

fn partition(cs: &[Vec<u64>]) -> FiniteDiagram {
    FiniteDiagram::partition(cs.iter().map(|c| c.as_slice()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replicate_keeps_each_copy_in_order(ids in chain(6), q in 1u32..4) {
        let out = Replicate::new(q).unwrap().eval(&FiniteDiagram::chain(&ids), 50).unwrap();
        let c = out.total_chain().unwrap();
        prop_assert_eq!(c.len(), ids.len() * q as usize);
        for copy in 0..u64::from(q) {
            let names: Vec<u64> = ids.iter().map(|&x| cantor(copy, x)).collect();
            let seen: Vec<u64> = c.iter().copied().filter(|y| names.contains(y)).collect();
            prop_assert_eq!(seen, names);
        }
    }

    #[test]
    fn order_operators_are_monotone(ids in chain(6), keep in proptest::collection::vec(any::<bool>(), 6), n in 0u64..12, extra in 0u64..6) {
        let beta = FiniteDiagram::chain(&ids);
        let sub: Vec<u64> = ids.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
        let alpha = FiniteDiagram::chain(&sub);
        let ops: Vec<OpRef> = vec![Arc::new(Replicate::new(2).unwrap()), Arc::new(Ord2Eq)];
        for op in ops {
            let small = op.eval(&alpha, n).unwrap();
            let large = op.eval(&beta, n + extra).unwrap();
            prop_assert!(closure_subset(&small, &large).unwrap(), "{}", op.name());
        }
    }

    #[test]
    fn eq2ord_is_monotone(cs in classes(5), drop in 0usize..5, n in 0u64..40, extra in 0u64..20) {
        let beta = partition(&cs);
        let dom = beta.domain_vec();
        let gone = dom[drop % dom.len()];
        let alpha = beta.restrict(|x| x != gone).unwrap();
        let op = Eq2Ord::v1();
        prop_assert!(closure_subset(&op.eval(&alpha, n).unwrap(), &op.eval(&beta, n + extra).unwrap()).unwrap());
    }

    #[test]
    fn iso_sees_class_sizes_only(cs in classes(7), shift in 1u64..50) {
        let d = partition(&cs);
        let moved = d.relabel(|x| x * 3 + shift).unwrap();
        prop_assert!(finite_iso(&d, &d).unwrap());
        prop_assert!(finite_iso(&d, &moved).unwrap());
        prop_assert!(finite_iso(&moved, &d).unwrap());
        // split the largest class; the size multiset now differs
        let mut split = cs.clone();
        split.sort_by_key(|c| std::cmp::Reverse(c.len()));
        if split[0].len() > 1 {
            let last = split[0].pop().unwrap();
            split.push(vec![last]);
            prop_assert!(!finite_iso(&d, &partition(&split)).unwrap());
        }
    }

    #[test]
    fn iso_is_transitive_on_chains(a in chain(8), b in chain(8), c in chain(8)) {
        let (da, db, dc) = (FiniteDiagram::chain(&a), FiniteDiagram::chain(&b), FiniteDiagram::chain(&c));
        let ab = finite_iso(&da, &db).unwrap();
        let bc = finite_iso(&db, &dc).unwrap();
        prop_assert_eq!(ab, a.len() == b.len());
        if ab && bc {
            prop_assert!(finite_iso(&da, &dc).unwrap());
        }
    }
}

#[test]
fn replicate_composes_multiplicatively() {
    let q = |n| -> OpRef { Arc::new(Replicate::new(n).unwrap()) };
    for (q1, q2) in [(1, 2), (2, 1), (2, 2), (1, 3)] {
        let composed = Compose::new(q(q1), q(q2)).unwrap();
        let direct = Replicate::new(q1 * q2).unwrap();
        for ids in embedlab::enumerate::permutations(&[0, 1, 2, 3, 4, 5]).iter().step_by(37) {
            for len in 1..=ids.len() {
                let alpha = FiniteDiagram::chain(&ids[..len]);
                let (a, b) = (composed.eval(&alpha, 64).unwrap(), direct.eval(&alpha, 64).unwrap());
                if a.size() <= 8 {
                    assert!(finite_iso(&a, &b).unwrap(), "{q1}x{q2} on {ids:?}[..{len}]");
                } else {
                    // total orders of equal size are isomorphic
                    assert_eq!(a.total_chain().unwrap().len(), b.total_chain().unwrap().len());
                }
            }
        }
    }
}

#[test]
fn fingerprint_counts_grow_with_the_log() {
    let input = generate(&CanonicalSpec::new(Family::OmegaK(2), Policy::Fair, 120)).unwrap();
    let op = OperatorTarget::Enumeration(Arc::new(Replicate::new(2).unwrap()));
    let log = run(&op, &input, 120, &BudgetSchedule::Linear).unwrap();
    let mut prev = fingerprint(&log.prefix(1), 5).unwrap();
    for cut in (10..=120).step_by(10) {
        let fp = fingerprint(&log.prefix(cut), 5).unwrap();
        for e in &prev.elements {
            let now = fp.elements.iter().find(|f| f.element == e.element).unwrap();
            assert!(now.pred_changes >= e.pred_changes && now.succ_changes >= e.succ_changes);
            assert_eq!(now.entered_at, e.entered_at);
        }
        assert!(fp.summary.least_changes >= prev.summary.least_changes);
        assert!(fp.summary.pred_unstable_count >= prev.summary.pred_unstable_count);
        prev = fp;
    }
    assert_eq!(prev.summary.pred_unstable_count, 3);
}

//! Exhaustive enumeration of small finite structures.

use crate::structures::{Elem, FiniteDiagram};

/// All permutations of `xs`, lexicographic in positions.
pub fn permutations(xs: &[Elem]) -> Vec<Vec<Elem>> {
    fn go(rest: &mut Vec<Elem>, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut xs.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Subsets of `xs` in increasing bitmask order.
pub fn subsets(xs: &[Elem]) -> Vec<Vec<Elem>> {
    assert!(xs.len() < 32);
    (0u32..(1 << xs.len()))
        .map(|m| {
            xs.iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

/// Set partitions of `xs` via restricted growth strings.
pub fn set_partitions(xs: &[Elem]) -> Vec<Vec<Vec<Elem>>> {
    fn go(i: usize, xs: &[Elem], cur: &mut Vec<Vec<Elem>>, out: &mut Vec<Vec<Vec<Elem>>>) {
        if i == xs.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(xs[i]);
            go(i + 1, xs, cur, out);
            cur[b].pop();
        }
        cur.push(vec![xs[i]]);
        go(i + 1, xs, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, xs, &mut Vec::new(), &mut out);
    out
}

/// Every total order whose domain is a subset of `universe` (including empty).
pub fn total_orders_within(universe: &[Elem], max_size: usize) -> Vec<FiniteDiagram> {
    subsets(universe)
        .into_iter()
        .filter(|s| s.len() <= max_size)
        .flat_map(|s| permutations(&s).into_iter().map(|p| FiniteDiagram::chain(&p)))
        .collect()
}

/// Every equivalence whose domain is a subset of `universe` (including empty).
pub fn equivalences_within(universe: &[Elem], max_size: usize) -> Vec<FiniteDiagram> {
    subsets(universe)
        .into_iter()
        .filter(|s| s.len() <= max_size)
        .flat_map(|s| {
            set_partitions(&s)
                .into_iter()
                .map(|p| FiniteDiagram::partition(p.iter().map(|c| c.as_slice())))
        })
        .collect()
}

/// Every way to insert `fresh` elements into a chain, keeping the old order.
pub fn chain_extensions(chain: &[Elem], fresh: &[Elem]) -> Vec<Vec<Elem>> {
    let mut out = vec![chain.to_vec()];
    for &f in fresh {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..=c.len()).map(move |i| {
                    let mut d = c.clone();
                    d.insert(i, f);
                    d
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(permutations(&[1, 2, 3, 4]).len(), 24);
        assert_eq!(set_partitions(&[0, 1, 2, 3, 4]).len(), 52);
        // sum over subsets of k! for a 4-element universe
        assert_eq!(total_orders_within(&[0, 1, 2, 3], 4).len(), 1 + 4 + 12 + 24 + 24);
        // Bell(6) = sum over subsets of Bell(|S|) for a 5-element universe
        assert_eq!(equivalences_within(&[0, 1, 2, 3, 4], 5).len(), 203);
        assert_eq!(chain_extensions(&[0, 1], &[5, 6]).len(), 12);
    }
}

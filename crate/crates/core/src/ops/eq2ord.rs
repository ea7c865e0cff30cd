use std::cmp::Ordering;

use crate::error::Result;
use crate::kernel::{check_input, Budget, EnumerationOperator};
use crate::structures::{Elem, FiniteDiagram, Partition, Signature};

/// Tuple order used on admissible tuples: a proper extension comes first,
/// otherwise the tuple with the smaller entry at the first difference.
pub fn kb_cmp(a: &[Elem], b: &[Elem]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x.cmp(y);
        }
    }
    b.len().cmp(&a.len())
}

/// Fixed enumeration of all nonempty strictly increasing tuples of naturals.
///
/// Even positions `2m` hold the initial segments `(0, 1, ..., m)`. Odd
/// positions `2j + 1` hold the remaining tuples in increasing order of their
/// bitmask `sum 2^x`. Initial segments therefore show up at linear rank,
/// every other tuple eventually.
#[derive(Clone, Debug, Default)]
pub struct Universal {
    p: u64,
    code: u64,
}

impl Universal {
    pub fn new() -> Self {
        Universal::default()
    }
}

fn is_initial_segment_code(code: u64) -> bool {
    (code + 1).is_power_of_two()
}

fn decode_mask(code: u64) -> Vec<Elem> {
    (0..64).filter(|i| code >> i & 1 == 1).collect()
}

impl Iterator for Universal {
    type Item = Vec<Elem>;
    fn next(&mut self) -> Option<Vec<Elem>> {
        let p = self.p;
        self.p += 1;
        if p % 2 == 0 {
            return Some((0..=p / 2).collect());
        }
        loop {
            self.code += 1;
            if !is_initial_segment_code(self.code) {
                break;
            }
        }
        Some(decode_mask(self.code))
    }
}

/// Position of `tuple` in [`Universal`], for tuples whose non-segment form
/// fits a 64-bit mask.
pub fn universal_position(tuple: &[Elem]) -> Option<u64> {
    if tuple.is_empty() || tuple.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    if tuple.iter().enumerate().all(|(i, &x)| x == i as Elem) {
        return Some(2 * (tuple.len() as u64 - 1));
    }
    if *tuple.last().unwrap() >= 63 {
        return None;
    }
    let code: u64 = tuple.iter().map(|&x| 1u64 << x).sum();
    let segments_below = 63 - (code + 1).leading_zeros() as u64;
    let j = code - segments_below - 1;
    Some(2 * j + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    /// Every entry but the last lies in a class of size at least 2.
    Two,
    /// Every entry but the last lies in a class of size at least 3, the last in one of size at least 2.
    Three,
}

impl Threshold {
    pub fn admits(&self, tuple: &[Elem], p: &Partition) -> bool {
        let (interior, last_min) = match self {
            Threshold::Two => (2, 1),
            Threshold::Three => (3, 2),
        };
        let Some((&last, init)) = tuple.split_last() else {
            return false;
        };
        p.class_size(last) >= last_min && init.iter().all(|&x| p.class_size(x) >= interior)
    }
}

/// Equivalence to order: admissible tuples, ordered by [`kb_cmp`]. The output
/// element for a tuple is its [`Universal`] position; budget `n` admits the
/// first `n` positions.
pub struct Eq2Ord {
    pub threshold: Threshold,
}

impl Eq2Ord {
    pub fn v1() -> Self {
        Eq2Ord {
            threshold: Threshold::Two,
        }
    }

    pub fn v2_raw() -> Self {
        Eq2Ord {
            threshold: Threshold::Three,
        }
    }

    /// Admitted tuples with their positions, in output order.
    pub fn admitted(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<Vec<(u64, Vec<Elem>)>> {
        let p = alpha.classes()?;
        let mut out: Vec<(u64, Vec<Elem>)> = Universal::new()
            .take(budget as usize)
            .enumerate()
            .filter(|(_, t)| self.threshold.admits(t, &p))
            .map(|(i, t)| (i as u64, t))
            .collect();
        out.sort_by(|a, b| kb_cmp(&a.1, &b.1));
        Ok(out)
    }
}

impl EnumerationOperator for Eq2Ord {
    fn name(&self) -> String {
        match self.threshold {
            Threshold::Two => "eq2ord_v1".into(),
            Threshold::Three => "eq2ord_v2_raw".into(),
        }
    }
    fn input_signature(&self) -> Signature {
        Signature::Equivalence
    }
    fn output_signature(&self) -> Signature {
        Signature::LinearOrder
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        check_input(self, alpha)?;
        let chain: Vec<Elem> = self.admitted(alpha, budget)?.into_iter().map(|(p, _)| p).collect();
        Ok(FiniteDiagram::chain(&chain))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_order() {
        let alpha = FiniteDiagram::partition([&[0u64, 1][..], &[2][..]]);
        let got: Vec<Vec<Elem>> = Eq2Ord::v1().admitted(&alpha, 64).unwrap().into_iter().map(|(_, t)| t).collect();
        let want: Vec<Vec<Elem>> = vec![vec![0, 1, 2], vec![0, 1], vec![0, 2], vec![0], vec![1, 2], vec![1], vec![2]];
        assert_eq!(got, want);
    }

    #[test]
    fn universal_positions_invert_the_enumeration() {
        for (p, t) in Universal::new().take(3000).enumerate() {
            assert!(t.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(universal_position(&t), Some(p as u64), "{t:?}");
        }
    }

    #[test]
    fn universal_covers_small_tuples_early() {
        let first: Vec<Vec<Elem>> = Universal::new().take(64).collect();
        for code in 1u64..32 {
            assert!(first.contains(&decode_mask(code)));
        }
    }

    #[test]
    fn thresholds() {
        let alpha = FiniteDiagram::partition([&[0u64, 1, 2][..], &[3, 4][..], &[5][..]]);
        let p = alpha.classes().unwrap();
        assert!(Threshold::Two.admits(&[0, 3, 5], &p));
        assert!(!Threshold::Two.admits(&[0, 5, 3], &p));
        assert!(Threshold::Three.admits(&[0, 3], &p));
        assert!(!Threshold::Three.admits(&[3, 4], &p));
        assert!(!Threshold::Three.admits(&[0, 5], &p));
    }
}

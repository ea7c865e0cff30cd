//! Integer pairings and the seeded generator used for permuted presentations.

use crate::error::{Error, Result};

/// Cantor pairing `(x+y)(x+y+1)/2 + y`.
pub fn cantor(x: u64, y: u64) -> Result<u64> {
    let s = x.checked_add(y).ok_or(Error::Overflow)?;
    let t = s.checked_add(1).ok_or(Error::Overflow)?;
    // one of s, t is even, so halve that one before multiplying
    let tri = if s % 2 == 0 {
        (s / 2).checked_mul(t)
    } else {
        s.checked_mul(t / 2)
    }
    .ok_or(Error::Overflow)?;
    tri.checked_add(y).ok_or(Error::Overflow)
}

pub fn uncantor(z: u64) -> (u64, u64) {
    // w = floor((sqrt(8z+1)-1)/2), fixed up for float error
    let mut w = ((((8.0 * z as f64) + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while tri(w + 1) <= z {
        w += 1;
    }
    while tri(w) > z {
        w -= 1;
    }
    let y = z - tri(w);
    (w - y, y)
}

fn tri(w: u64) -> u64 {
    ((w as u128 * (w as u128 + 1)) / 2).min(u64::MAX as u128) as u64
}

/// Binary tag used by the two-sided combinators: `2x + side`.
pub fn tag2(side: u8, x: u64) -> Result<u64> {
    debug_assert!(side < 2);
    x.checked_mul(2)
        .and_then(|v| v.checked_add(side as u64))
        .ok_or(Error::Overflow)
}

pub fn untag2(z: u64) -> (u8, u64) {
    ((z % 2) as u8, z / 2)
}

/// Encodes a finite tuple as nested pairs: `[] -> 0`, `[a, rest..] -> 1 + cantor(a, code(rest))`.
pub fn tuple_code(xs: &[u64]) -> Result<u64> {
    let mut acc = 0u64;
    for &x in xs.iter().rev() {
        acc = cantor(x, acc)?.checked_add(1).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

pub fn tuple_decode(mut z: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while z > 0 {
        let (a, rest) = uncantor(z - 1);
        out.push(a);
        z = rest;
    }
    out
}

/// 64-bit linear congruential generator.
///
/// Multiplier 6364136223846793005 and increment 1442695040888963407 (Knuth's
/// MMIX constants), state wrapping mod 2^64. Outputs are the high 32 bits of
/// the state after each step; the low bits of an LCG cycle with short periods.
#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MUL: u64 = 6364136223846793005;
    pub const INC: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        let mut g = Lcg { state: seed };
        g.next_u32();
        g
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(Self::MUL).wrapping_add(Self::INC);
        (self.state >> 32) as u32
    }

    /// Uniform-ish value in `0..bound` by rejection on the top bits.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0);
        let zone = u32::MAX - (u32::MAX % bound);
        loop {
            let v = self.next_u32();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Fisher-Yates shuffle, last index first.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u32 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_small_table() {
        assert_eq!(cantor(0, 0).unwrap(), 0);
        assert_eq!(cantor(1, 0).unwrap(), 1);
        assert_eq!(cantor(0, 1).unwrap(), 2);
        assert_eq!(cantor(2, 0).unwrap(), 3);
        assert_eq!(cantor(1, 1).unwrap(), 4);
        assert_eq!(cantor(0, 2).unwrap(), 5);
    }

    #[test]
    fn cantor_roundtrip() {
        for x in 0..60 {
            for y in 0..60 {
                assert_eq!(uncantor(cantor(x, y).unwrap()), (x, y));
            }
        }
        let big = cantor(3_000_000_000, 17).unwrap();
        assert_eq!(uncantor(big), (3_000_000_000, 17));
    }

    #[test]
    fn cantor_overflow_is_reported() {
        assert!(matches!(cantor(u64::MAX / 2, 5), Err(Error::Overflow)));
    }

    #[test]
    fn tuples_roundtrip() {
        for t in [vec![], vec![0], vec![3, 1, 4], vec![0, 0, 0, 2]] {
            assert_eq!(tuple_decode(tuple_code(&t).unwrap()), t);
        }
    }

    #[test]
    fn lcg_is_reproducible() {
        let mut a = Lcg::new(7);
        let mut b = Lcg::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
        let mut v: Vec<u32> = (0..32).collect();
        Lcg::new(3).shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..32).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}

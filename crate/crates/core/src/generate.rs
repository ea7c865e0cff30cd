//! Canonical computable presentations of the order and equivalence families.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::{uncantor, Lcg};
use crate::error::{Error, Result};
use crate::stream::StructureStream;
use crate::structures::{Elem, Fact, Signature};

/// Number of leading arrivals reordered by `Policy::Permuted`.
pub const PERMUTED_PREFIX: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Omega,
    OmegaStar,
    OmegaK(u32),
    OmegaStarK(u32),
    OnePlusEta,
    EtaPlusOne,
    Eta,
    E,
    Ek(u32),
    EHatK(u32),
}

impl Family {
    pub fn signature(&self) -> Signature {
        match self {
            Family::E | Family::Ek(_) | Family::EHatK(_) => Signature::Equivalence,
            _ => Signature::LinearOrder,
        }
    }

    /// Number of ω-blocks, positive for ω·k, negative for ω*·k.
    pub fn blocks(&self) -> Option<i64> {
        match *self {
            Family::Omega => Some(1),
            Family::OmegaStar => Some(-1),
            Family::OmegaK(k) => Some(k as i64),
            Family::OmegaStarK(k) => Some(-(k as i64)),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Omega => write!(f, "omega"),
            Family::OmegaStar => write!(f, "omega_star"),
            Family::OmegaK(k) => write!(f, "omega_k:{k}"),
            Family::OmegaStarK(k) => write!(f, "omega_star_k:{k}"),
            Family::OnePlusEta => write!(f, "one_plus_eta"),
            Family::EtaPlusOne => write!(f, "eta_plus_one"),
            Family::Eta => write!(f, "eta"),
            Family::E => write!(f, "e"),
            Family::Ek(k) => write!(f, "e_k:{k}"),
            Family::EHatK(k) => write!(f, "e_hat_k:{k}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let k = || -> Result<u32> {
            let k = arg
                .ok_or_else(|| Error::InvalidSpec(format!("`{name}` needs a parameter, as in `{name}:2`")))?
                .parse::<u32>()
                .map_err(|_| Error::InvalidSpec(format!("bad parameter in `{s}`")))?;
            if k == 0 {
                return Err(Error::InvalidSpec(format!("`{s}`: parameter must be at least 1")));
            }
            Ok(k)
        };
        let fam = match name {
            "omega" => Family::Omega,
            "omega_star" => Family::OmegaStar,
            "omega_k" => Family::OmegaK(k()?),
            "omega_star_k" => Family::OmegaStarK(k()?),
            "one_plus_eta" => Family::OnePlusEta,
            "eta_plus_one" => Family::EtaPlusOne,
            "eta" => Family::Eta,
            "e" => Family::E,
            "e_k" => Family::Ek(k()?),
            "e_hat_k" => Family::EHatK(k()?),
            _ => return Err(Error::InvalidSpec(format!("unknown family `{s}`"))),
        };
        if arg.is_some() && !matches!(fam, Family::OmegaK(_) | Family::OmegaStarK(_) | Family::Ek(_) | Family::EHatK(_)) {
            return Err(Error::InvalidSpec(format!("`{name}` takes no parameter")));
        }
        Ok(fam)
    }
}

/// Arrival policy. For the shipped families the natural direction inside each
/// block is forced (ω blocks only grow upward, ω* blocks only downward), so
/// `Ascending` and `Descending` coincide with `Fair`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    Fair,
    Permuted(u64),
    Descending,
    Ascending,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Fair => write!(f, "fair"),
            Policy::Permuted(seed) => write!(f, "permuted:{seed}"),
            Policy::Descending => write!(f, "descending"),
            Policy::Ascending => write!(f, "ascending"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("permuted", seed)) => seed
                .parse()
                .map(Policy::Permuted)
                .map_err(|_| Error::InvalidSpec(format!("bad seed in `{s}`"))),
            None => match s {
                "fair" => Ok(Policy::Fair),
                "descending" => Ok(Policy::Descending),
                "ascending" => Ok(Policy::Ascending),
                "permuted" => Ok(Policy::Permuted(0)),
                _ => Err(Error::InvalidSpec(format!("unknown policy `{s}`"))),
            },
            _ => Err(Error::InvalidSpec(format!("unknown policy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalSpec {
    pub family: Family,
    pub policy: Policy,
    pub stages: usize,
}

impl CanonicalSpec {
    pub fn new(family: Family, policy: Policy, stages: usize) -> Self {
        CanonicalSpec { family, policy, stages }
    }
}

impl fmt::Display for CanonicalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.family, self.policy, self.stages)
    }
}

/// Parses `family/policy/stages`, e.g. `omega_k:2/fair/200`.
impl FromStr for CanonicalSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        let [family, policy, stages] = parts[..] else {
            return Err(Error::InvalidSpec(format!("expected `family/policy/stages`, got `{s}`")));
        };
        let stages = stages
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad stage count in `{s}`")))?;
        Ok(CanonicalSpec::new(family.parse()?, policy.parse()?, stages))
    }
}

/// Dyadic rational in (0,1) given by its binary digits after the point; the
/// last digit is always 1. Ordered numerically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic(Vec<u8>);

impl Dyadic {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.last() == Some(&1));
        Dyadic(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = other.0.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Enumerates every dyadic in (0,1) exactly once: 1/2 first, then a repeating
/// cycle of a new maximum approaching 1, a new minimum approaching 0, and the
/// next remaining dyadic in level order. Either end moves every third step.
#[derive(Clone, Debug)]
pub struct EtaPoints {
    t: u64,
    level: u32,
    k: u64,
}

impl EtaPoints {
    pub fn new() -> Self {
        EtaPoints { t: 0, level: 3, k: 1 }
    }

    fn next_fill(&mut self) -> Dyadic {
        loop {
            self.k += 2;
            if self.k >= (1u64 << self.level) - 1 {
                self.level += 1;
                self.k = 1;
                continue;
            }
            let bits = (0..self.level)
                .map(|i| ((self.k >> (self.level - 1 - i)) & 1) as u8)
                .collect();
            return Dyadic(bits);
        }
    }
}

impl Default for EtaPoints {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for EtaPoints {
    type Item = Dyadic;
    fn next(&mut self) -> Option<Dyadic> {
        let t = self.t;
        self.t += 1;
        if t == 0 {
            return Some(Dyadic(vec![1]));
        }
        let j = ((t - 1) / 3) as usize;
        Some(match (t - 1) % 3 {
            0 => Dyadic(vec![1; j + 2]),
            1 => {
                let mut b = vec![0; j + 2];
                b[j + 1] = 1;
                Dyadic(b)
            }
            _ => self.next_fill(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Pos {
    Int(i64),
    Dy(Dyadic),
}

type Key = (u32, Pos);

fn fair_order_keys(family: Family, n: usize) -> Vec<Key> {
    if let Some(b) = family.blocks() {
        let k = b.unsigned_abs() as usize;
        return (0..n)
            .map(|i| {
                let idx = (i / k) as i64;
                ((i % k) as u32, Pos::Int(if b > 0 { idx } else { -idx }))
            })
            .collect();
    }
    let mut pts = EtaPoints::new();
    (0..n)
        .map(|i| match family {
            Family::OnePlusEta if i == 0 => (0, Pos::Int(0)),
            Family::OnePlusEta => (1, Pos::Dy(pts.next().unwrap())),
            Family::EtaPlusOne if i == 0 => (1, Pos::Int(0)),
            _ => (0, Pos::Dy(pts.next().unwrap())),
        })
        .collect()
}

fn arrival_permutation(n: usize, policy: Policy) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if let Policy::Permuted(seed) = policy {
        let m = n.min(PERMUTED_PREFIX);
        Lcg::new(seed).shuffle(&mut order[..m]);
    }
    order
}

pub fn generate(spec: &CanonicalSpec) -> Result<StructureStream> {
    match spec.family.signature() {
        Signature::LinearOrder => generate_order(spec),
        Signature::Equivalence => generate_equivalence(spec),
    }
}

fn generate_order(spec: &CanonicalSpec) -> Result<StructureStream> {
    let n = spec.stages;
    let keys = fair_order_keys(spec.family, n);
    let order = arrival_permutation(n, spec.policy);
    let mut present: BTreeMap<Key, Elem> = BTreeMap::new();
    let mut out = StructureStream::new(Signature::LinearOrder, spec.to_string());
    for &i in &order {
        let key = keys[i].clone();
        let x = i as Elem;
        let mut facts = vec![Fact::El(x)];
        if let Some((_, &p)) = present.range(..key.clone()).next_back() {
            facts.push(Fact::Lt(p, x));
        }
        if let Some((_, &q)) = present.range(key.clone()..).next() {
            facts.push(Fact::Lt(x, q));
        }
        present.insert(key, x);
        out.push_delta(facts)?;
    }
    Ok(out)
}

/// Class label of each element in fair arrival order, with per-stage counts.
///
/// Each stage opens a new k-element class for Ê_k (only stage 0 for E_k) and
/// then adds one element to an infinite class chosen by inverse Cantor pairing
/// of the stage number: class c opens at stage c(c+1)/2 and is revisited
/// infinitely often.
fn fair_equivalence_layout(family: Family, stages: usize) -> (Vec<(bool, u64)>, Vec<usize>) {
    let mut labels = Vec::new();
    let mut counts = Vec::new();
    let mut finite = 0u64;
    for s in 0..stages {
        let before = labels.len();
        let k = match family {
            Family::Ek(k) if s == 0 => k,
            Family::EHatK(k) => k,
            _ => 0,
        };
        for _ in 0..k {
            labels.push((true, finite));
        }
        if k > 0 {
            finite += 1;
        }
        let (c, _) = uncantor(s as u64);
        labels.push((false, c));
        counts.push(labels.len() - before);
    }
    (labels, counts)
}

fn generate_equivalence(spec: &CanonicalSpec) -> Result<StructureStream> {
    let (labels, counts) = fair_equivalence_layout(spec.family, spec.stages);
    let order = arrival_permutation(labels.len(), spec.policy);
    let mut first: BTreeMap<(bool, u64), Elem> = BTreeMap::new();
    let mut out = StructureStream::new(Signature::Equivalence, spec.to_string());
    let mut next = 0usize;
    for &c in &counts {
        let mut facts = Vec::new();
        for &i in &order[next..next + c] {
            let x = i as Elem;
            facts.push(Fact::El(x));
            match first.get(&labels[i]) {
                Some(&m) => facts.push(Fact::sim(m, x)),
                None => {
                    first.insert(labels[i], x);
                }
            }
        }
        next += c;
        out.push_delta(facts)?;
    }
    Ok(out)
}

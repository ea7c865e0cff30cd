//! Staged presentations: a growing sequence of finite diagrams.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::structures::{closure_subset, infer_signature, parse_fact_lines, Elem, Fact, FiniteDiagram, Signature};

/// Stage `s` is the union of the deltas `0..=s`; deltas hold generating facts
/// only, so a stage is recovered by union and read through its closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureStream {
    sig: Signature,
    provenance: String,
    deltas: Vec<Vec<Fact>>,
}

impl StructureStream {
    pub fn new(sig: Signature, provenance: impl Into<String>) -> Self {
        StructureStream {
            sig,
            provenance: provenance.into(),
            deltas: Vec::new(),
        }
    }

    /// Builds from cumulative stages, checking `stage[s] ⊆ stage[s+1]` on closures.
    pub fn from_stages(sig: Signature, provenance: impl Into<String>, stages: &[FiniteDiagram]) -> Result<Self> {
        let mut out = StructureStream::new(sig, provenance);
        let mut acc = FiniteDiagram::empty(sig);
        for (s, st) in stages.iter().enumerate() {
            st.expect(sig)?;
            if !closure_subset(&acc, st)? {
                return Err(Error::NonMonotone {
                    prev: s.saturating_sub(1),
                    stage: s,
                });
            }
            out.deltas.push(st.facts_not_in(&acc));
            acc = acc.union(st)?;
        }
        Ok(out)
    }

    /// Appends a stage given by its new facts; facts already present are dropped.
    pub fn push_delta(&mut self, facts: impl IntoIterator<Item = Fact>) -> Result<()> {
        let mut d = FiniteDiagram::from_facts(self.sig, facts)?.facts().to_vec();
        if !self.deltas.is_empty() {
            let seen: HashSet<&Fact> = self.deltas.iter().flatten().collect();
            d.retain(|f| !seen.contains(f));
        }
        self.deltas.push(d);
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn set_provenance(&mut self, p: impl Into<String>) {
        self.provenance = p.into();
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn delta(&self, s: usize) -> &[Fact] {
        &self.deltas[s]
    }

    pub fn deltas(&self) -> &[Vec<Fact>] {
        &self.deltas
    }

    pub fn stage(&self, s: usize) -> FiniteDiagram {
        FiniteDiagram::from_facts(self.sig, self.deltas[..=s].iter().flatten().copied())
            .expect("stream facts share the stream signature")
    }

    pub fn last(&self) -> Option<FiniteDiagram> {
        (!self.is_empty()).then(|| self.stage(self.len() - 1))
    }

    /// Cumulative stages, built incrementally.
    pub fn stages(&self) -> StageIter<'_> {
        StageIter {
            stream: self,
            next: 0,
            acc: FiniteDiagram::empty(self.sig),
        }
    }

    /// First stage at which each element appears.
    pub fn arrivals(&self) -> HashMap<Elem, usize> {
        let mut out = HashMap::new();
        for (s, d) in self.deltas.iter().enumerate() {
            for f in d {
                if let Fact::El(x) = f {
                    out.entry(*x).or_insert(s);
                }
            }
        }
        out
    }

    /// Elements in order of arrival, ties broken by id.
    pub fn arrival_order(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for d in &self.deltas {
            for f in d {
                if let Fact::El(x) = f {
                    if seen.insert(*x) {
                        out.push(*x);
                    }
                }
            }
        }
        out
    }

    pub fn truncate(&self, stages: usize) -> StructureStream {
        StructureStream {
            sig: self.sig,
            provenance: self.provenance.clone(),
            deltas: self.deltas[..stages.min(self.len())].to_vec(),
        }
    }

    /// Induced substream on the kept elements.
    pub fn restrict(&self, keep: impl Fn(Elem) -> bool) -> Result<StructureStream> {
        let stages: Vec<FiniteDiagram> = self
            .stages()
            .map(|d| d.restrict(&keep))
            .collect::<Result<_>>()?;
        StructureStream::from_stages(self.sig, format!("{}|restrict", self.provenance), &stages)
    }

    /// Renames elements to `0, 1, 2, ...` in arrival order.
    pub fn relabel_by_arrival(&self) -> Result<StructureStream> {
        let map: HashMap<Elem, Elem> = self
            .arrival_order()
            .into_iter()
            .enumerate()
            .map(|(i, x)| (x, i as Elem))
            .collect();
        let mut out = StructureStream::new(self.sig, format!("{}|relabel", self.provenance));
        for d in &self.deltas {
            out.push_delta(d.iter().map(|f| f.map(|x| map[&x])))?;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# signature: {}\n", self.sig);
        if !self.provenance.is_empty() {
            s.push_str(&format!("# provenance: {}\n", self.provenance));
        }
        for (i, d) in self.deltas.iter().enumerate() {
            s.push_str(&format!("-- stage {i}\n"));
            for f in d {
                s.push_str(&f.to_string());
                s.push('\n');
            }
        }
        s
    }

    /// Reads `-- stage <s>` blocks of new facts. Stage numbers must run 0, 1, 2, ...
    pub fn parse_text(text: &str) -> Result<StructureStream> {
        let mut sig: Option<Signature> = None;
        let mut provenance = String::new();
        let mut blocks: Vec<(usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("# signature:") {
                sig = Some(rest.parse()?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("# provenance:") {
                provenance = rest.trim().to_string();
                continue;
            }
            if let Some(rest) = line.strip_prefix("--") {
                let num = rest
                    .trim()
                    .strip_prefix("stage")
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        msg: format!("bad stage header `{line}`"),
                    })?;
                if num != blocks.len() {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("expected stage {}, found {num}", blocks.len()),
                    });
                }
                blocks.push((i + 1, String::new()));
                continue;
            }
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match blocks.last_mut() {
                Some((_, body)) => {
                    body.push_str(line);
                    body.push('\n');
                }
                None => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "fact before the first stage header".into(),
                    })
                }
            }
        }
        let parsed: Vec<Vec<Fact>> = blocks
            .iter()
            .map(|(start, body)| parse_fact_lines(body, *start))
            .collect::<Result<_>>()?;
        let sig = sig.unwrap_or_else(|| infer_signature(&parsed.concat()));
        let mut out = StructureStream::new(sig, provenance);
        for facts in parsed {
            out.push_delta(facts)?;
        }
        if let Some(d) = out.last() {
            d.check_consistent()?;
        }
        Ok(out)
    }
}

pub struct StageIter<'a> {
    stream: &'a StructureStream,
    next: usize,
    acc: FiniteDiagram,
}

impl Iterator for StageIter<'_> {
    type Item = FiniteDiagram;
    fn next(&mut self) -> Option<FiniteDiagram> {
        if self.next >= self.stream.len() {
            return None;
        }
        let delta = FiniteDiagram::from_facts(self.stream.sig, self.stream.deltas[self.next].iter().copied())
            .expect("stream facts share the stream signature");
        self.acc = self.acc.union(&delta).expect("same signature");
        self.next += 1;
        Some(self.acc.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega3() -> StructureStream {
        let stages: Vec<FiniteDiagram> = (0..3u64)
            .map(|s| FiniteDiagram::chain(&(0..=s).collect::<Vec<_>>()))
            .collect();
        StructureStream::from_stages(Signature::LinearOrder, "test", &stages).unwrap()
    }

    #[test]
    fn deltas_hold_only_new_facts() {
        let s = omega3();
        assert_eq!(s.delta(0), &[Fact::El(0)]);
        assert_eq!(s.delta(2), &[Fact::El(2), Fact::Lt(1, 2)]);
        assert_eq!(s.stage(2).total_chain().unwrap(), vec![0, 1, 2]);
        let all: Vec<_> = s.stages().map(|d| d.size()).collect();
        assert_eq!(all, vec![1, 2, 3]);
    }

    #[test]
    fn text_roundtrip() {
        let s = omega3();
        let t = s.to_text();
        assert!(t.contains("-- stage 1\nel 1\nlt 0 1\n"));
        assert_eq!(StructureStream::parse_text(&t).unwrap(), s);
    }

    #[test]
    fn bad_stage_numbering() {
        let err = StructureStream::parse_text("-- stage 0\nel 0\n-- stage 2\nel 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn shrinking_stages_are_rejected() {
        let a = FiniteDiagram::chain(&[0, 1]);
        let b = FiniteDiagram::chain(&[0]);
        assert!(StructureStream::from_stages(Signature::LinearOrder, "", &[a, b]).is_err());
    }

    #[test]
    fn restriction_and_relabel() {
        let s = omega3();
        let r = s.restrict(|x| x != 1).unwrap();
        assert_eq!(r.stage(2).total_chain().unwrap(), vec![0, 2]);
        assert_eq!(r.relabel_by_arrival().unwrap().stage(2).total_chain().unwrap(), vec![0, 1]);
    }
}

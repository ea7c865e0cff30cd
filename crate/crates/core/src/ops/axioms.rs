use crate::error::{Error, Result};
use crate::kernel::{check_input, Budget, EnumerationOperator};
use crate::structures::{Fact, FiniteDiagram, Signature};

/// Operator given by a finite list of axioms `premise => fact`.
///
/// Budget `n` enables the first `n` axioms; an axiom fires when its premise
/// lies in the closure of the input.
///
/// ```text
/// signature: linear_order -> linear_order
/// complete: false
/// axiom: el 0 => el 10
/// axiom: el 0; el 1; el 2 => lt 11 10
/// ```
#[derive(Clone, Debug)]
pub struct AxiomTable {
    name: String,
    input: Signature,
    output: Signature,
    complete: bool,
    axioms: Vec<(FiniteDiagram, Fact)>,
}

impl AxiomTable {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut t = AxiomTable {
            name: name.to_string(),
            input: Signature::LinearOrder,
            output: Signature::LinearOrder,
            complete: false,
            axioms: Vec::new(),
        };
        let mut premises: Vec<(usize, Vec<Fact>, Fact)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix("signature:") {
                let (a, b) = rest.split_once("->").ok_or_else(|| err("expected `in -> out`".into()))?;
                t.input = a.parse()?;
                t.output = b.parse()?;
            } else if let Some(rest) = line.strip_prefix("complete:") {
                t.complete = rest.trim().parse().map_err(|_| err(format!("bad flag `{}`", rest.trim())))?;
            } else if let Some(rest) = line.strip_prefix("axiom:") {
                let (lhs, rhs) = rest.split_once("=>").ok_or_else(|| err("missing `=>`".into()))?;
                let prem = lhs
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Fact>().map_err(err))
                    .collect::<Result<Vec<_>>>()?;
                let concl = rhs.trim().parse::<Fact>().map_err(err)?;
                premises.push((i + 1, prem, concl));
            } else {
                return Err(err(format!("cannot parse `{line}`")));
            }
        }
        for (line, prem, concl) in premises {
            let d = FiniteDiagram::from_facts(t.input, prem).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            if concl.signature().is_some_and(|s| s != t.output) {
                return Err(Error::Parse {
                    line,
                    msg: format!("`{concl}` does not fit the output signature"),
                });
            }
            t.axioms.push((d, concl));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }
}

impl EnumerationOperator for AxiomTable {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn input_signature(&self) -> Signature {
        self.input
    }
    fn output_signature(&self) -> Signature {
        self.output
    }
    fn eval(&self, alpha: &FiniteDiagram, budget: Budget) -> Result<FiniteDiagram> {
        check_input(self, alpha)?;
        let mut facts = Vec::new();
        for (prem, concl) in self.axioms.iter().take(budget.min(usize::MAX as u64) as usize) {
            if crate::structures::closure_subset(prem, alpha)? {
                facts.push(*concl);
            }
        }
        let out = FiniteDiagram::from_facts(self.output, facts)?;
        out.check_consistent()?;
        Ok(out)
    }
    fn extension_complete(&self) -> bool {
        self.complete
    }
}

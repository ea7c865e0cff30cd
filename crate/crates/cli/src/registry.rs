//! Operator ids and the combinator expression grammar.
//!
//! ```text
//! expr  := term ('|' stage)*
//! term  := 'concat(' expr ',' expr ')' | 'union(' expr ',' expr ')'
//!        | 'rev(' expr ')' | atom
//! stage := 'fill:left' | 'fill:right' | 'rev' | atom
//! atom  := name [':' param]
//! ```
//!
//! `a|b` feeds the output of `a` into `b`. `phi_pair` and `phi_sigma2` are
//! stage-by-stage constructions and may only appear alone.

use std::sync::Arc;

use embedlab::generate::{generate, CanonicalSpec, Family, Policy};
use embedlab::kernel::{Compose, Concatenate, DisjointUnion, FillStyle, IntervalFill, OpRef, OperatorTarget, Reverse};
use embedlab::ops::axioms::AxiomTable;
use embedlab::ops::eq2ord::Eq2Ord;
use embedlab::ops::formula::{formula2eq, pair_formula2eq, Sigma2Sentence};
use embedlab::ops::multiplier::ClassMultiplier;
use embedlab::ops::ord2eq::Ord2Eq;
use embedlab::ops::phi_pair::{PhiPair, StagePair};
use embedlab::ops::phi_sigma2::PhiSigma2;
use embedlab::ops::replicate::Replicate;
use embedlab::ops::{endpoint_pipeline, eq2ord_v2};
use embedlab::{Error, Result, StructureStream};

pub const OPERATOR_IDS: &[&str] = &[
    "replicate:q",
    "ord2eq",
    "eq2ord_v1",
    "eq2ord_v2",
    "class_multiplier",
    "formula2eq[:seed]",
    "pair_formula2eq",
    "endpoint_pipeline",
    "axioms:FILE",
    "phi_pair",
    "phi_sigma2",
];

/// Extra inputs some operators need.
#[derive(Clone, Default)]
pub struct Context {
    /// Sentence for `formula2eq`, first sentence for the pair operators.
    /// Defaults to "there is a least element".
    pub phi: Option<Sigma2Sentence>,
    /// Defaults to "there is a greatest element".
    pub psi: Option<Sigma2Sentence>,
    /// Targets for `phi_pair`; default ω·2 and ω*·2.
    pub target_a: Option<StructureStream>,
    pub target_b: Option<StructureStream>,
    /// Stage count used to size default targets.
    pub stages: usize,
}

impl Context {
    fn phi(&self) -> Sigma2Sentence {
        self.phi.clone().unwrap_or_else(Sigma2Sentence::least_element)
    }

    fn psi(&self) -> Sigma2Sentence {
        self.psi.clone().unwrap_or_else(Sigma2Sentence::greatest_element)
    }

    fn target(&self, given: &Option<StructureStream>, family: Family) -> Result<StructureStream> {
        match given {
            Some(s) => Ok(s.clone()),
            None => generate(&CanonicalSpec::new(family, Policy::Fair, self.stages + 1)),
        }
    }
}

pub fn parse(expr: &str, ctx: &Context) -> Result<OperatorTarget> {
    let text: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    match text.as_str() {
        "phi_pair" => {
            let a = ctx.target(&ctx.target_a, Family::OmegaK(2))?;
            let b = ctx.target(&ctx.target_b, Family::OmegaStarK(2))?;
            return Ok(OperatorTarget::Construction(Arc::new(PhiPair::new(StagePair::new(&a, &b)?))));
        }
        "phi_sigma2" => {
            return Ok(OperatorTarget::Construction(Arc::new(PhiSigma2::new(ctx.phi(), ctx.psi())?)));
        }
        _ => {}
    }
    let mut p = Parser { s: &text, pos: 0, ctx };
    let op = p.expr()?;
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    Ok(OperatorTarget::Enumeration(op))
}

/// Like [`parse`] but refuses constructions.
pub fn parse_operator(expr: &str, ctx: &Context) -> Result<OpRef> {
    match parse(expr, ctx)? {
        OperatorTarget::Enumeration(op) => Ok(op),
        OperatorTarget::Construction(c) => Err(Error::InvalidTarget(format!(
            "`{}` is a construction, not an enumeration operator",
            c.name()
        ))),
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::InvalidSpec(format!("{msg} at offset {} of `{}`", self.pos, self.s))
    }

    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{tok}`")))
        }
    }

    fn expr(&mut self) -> Result<OpRef> {
        let mut op = self.term()?;
        while self.eat("|") {
            op = if self.eat("fill:left") {
                Arc::new(IntervalFill::new(op, FillStyle::LeftClosed)?)
            } else if self.eat("fill:right") {
                Arc::new(IntervalFill::new(op, FillStyle::RightClosed)?)
            } else if self.rest().starts_with("rev") && !self.rest().starts_with("rev(") {
                self.pos += 3;
                Arc::new(Reverse::new(op)?)
            } else {
                let next = self.term()?;
                Arc::new(Compose::new(op, next)?)
            };
        }
        Ok(op)
    }

    fn pair(&mut self) -> Result<(OpRef, OpRef)> {
        let a = self.expr()?;
        self.expect(",")?;
        let b = self.expr()?;
        self.expect(")")?;
        Ok((a, b))
    }

    fn term(&mut self) -> Result<OpRef> {
        if self.eat("concat(") {
            let (a, b) = self.pair()?;
            return Ok(Arc::new(Concatenate::new(a, b)?));
        }
        if self.eat("union(") {
            let (a, b) = self.pair()?;
            return Ok(Arc::new(DisjointUnion::new(a, b)?));
        }
        if self.eat("rev(") {
            let a = self.expr()?;
            self.expect(")")?;
            return Ok(Arc::new(Reverse::new(a)?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<OpRef> {
        let end = self.rest().find([',', ')', '|', '(']).map_or(self.s.len(), |i| self.pos + i);
        let word = &self.s[self.pos..end];
        let (name, param) = match word.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (word, None),
        };
        let no_param = |op: OpRef| -> Result<OpRef> {
            match param {
                None => Ok(op),
                Some(_) => Err(Error::InvalidSpec(format!("`{name}` takes no parameter"))),
            }
        };
        let op: OpRef = match name {
            "replicate" => {
                let q = param
                    .and_then(|p| p.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidSpec(format!("`{word}`: expected replicate:<copies>")))?;
                Arc::new(Replicate::new(q)?)
            }
            "ord2eq" => no_param(Arc::new(Ord2Eq))?,
            "eq2ord_v1" => no_param(Arc::new(Eq2Ord::v1()))?,
            "eq2ord_v2" => no_param(eq2ord_v2())?,
            "class_multiplier" => no_param(Arc::new(ClassMultiplier))?,
            "formula2eq" => {
                let seed = match param {
                    None => 1,
                    Some(p) => p
                        .parse()
                        .map_err(|_| Error::InvalidSpec(format!("`{word}`: bad seed size")))?,
                };
                formula2eq(self.ctx.phi(), seed)?
            }
            "pair_formula2eq" => no_param(pair_formula2eq(self.ctx.phi(), self.ctx.psi())?)?,
            "endpoint_pipeline" => no_param(endpoint_pipeline()?)?,
            "axioms" => {
                let path = param.ok_or_else(|| Error::InvalidSpec("expected axioms:<file>".into()))?;
                let text = std::fs::read_to_string(path)?;
                Arc::new(AxiomTable::parse(path, &text)?)
            }
            "phi_pair" | "phi_sigma2" => {
                return Err(Error::InvalidSpec(format!(
                    "`{name}` is a construction and cannot be combined"
                )))
            }
            "" => return Err(self.err("expected an operator")),
            _ => return Err(Error::InvalidSpec(format!("unknown operator `{name}`"))),
        };
        self.pos = end;
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(expr: &str) -> String {
        parse(expr, &Context::default()).unwrap().name()
    }

    #[test]
    fn grammar() {
        assert_eq!(name("replicate:3"), "replicate:3");
        assert!(name("concat(eq2ord_v1|fill:left, eq2ord_v2|fill:right)").starts_with("concat("));
        assert_eq!(name("rev(replicate:2)"), name("replicate:2|rev"));
        assert_eq!(name("ord2eq|class_multiplier"), "ord2eq|class_multiplier");
        assert_eq!(name("phi_sigma2"), "phi_sigma2");
    }

    #[test]
    fn errors() {
        let ctx = Context::default();
        for bad in ["nope", "replicate", "replicate:0", "concat(ord2eq,", "ord2eq:1", "union(phi_pair,ord2eq)"] {
            assert!(parse(bad, &ctx).is_err(), "{bad}");
        }
        // an order operator fed an equivalence
        assert!(matches!(parse("ord2eq|replicate:2", &ctx), Err(Error::SignatureMismatch { .. })));
    }
}

//! Abstract syntax for CPL, pure coalgebraic modal logic and the hybrid
//! languages, with the concrete grammar and printers.

mod formula;
mod hybrid;
mod parse;
mod print;

use std::collections::BTreeMap;

pub use formula::{fresh_var, fresh_vars, is_gensym, Formula, Var};
pub use hybrid::{Cml, Hybrid, HybridLang};
pub use parse::{parse_cml, parse_formula, parse_formula_internal, parse_hybrid, parse_hybrid_internal};
pub use print::{render_cml, render_core, render_formula, render_hybrid};

use crate::error::{Error, Result};

/// A per-argument bound: finitely many witnesses suffice, or no bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    Fin(usize),
    Inf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub arity: usize,
    pub bounds: Vec<Bound>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub ops: BTreeMap<String, OpDecl>,
    pub preds: BTreeMap<String, usize>,
}

const KEYWORDS: &[&str] = &["bot", "top", "forall", "exists", "forallw", "down", "A"];

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_op(mut self, name: &str, arity: usize, bounds: Vec<Bound>) -> Self {
        self.ops.insert(name.to_string(), OpDecl { arity, bounds });
        self
    }

    pub fn with_pred(mut self, name: &str, arity: usize) -> Self {
        self.preds.insert(name.to_string(), arity);
        self
    }

    pub fn op_arity(&self, op: &str) -> Option<usize> {
        self.ops.get(op).map(|d| d.arity)
    }

    pub fn bound(&self, op: &str, i: usize) -> Option<Bound> {
        self.ops.get(op).and_then(|d| d.bounds.get(i).copied())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, decl) in &self.ops {
            if decl.bounds.len() != decl.arity {
                return Err(Error::Signature(format!(
                    "`{name}` has arity {} but {} bounds",
                    decl.arity,
                    decl.bounds.len()
                )));
            }
            if self.preds.contains_key(name) {
                return Err(Error::Signature(format!("`{name}` is both an operator and a predicate")));
            }
        }
        for name in self.ops.keys().chain(self.preds.keys()) {
            if KEYWORDS.contains(&name.as_str()) || is_gensym(name) {
                return Err(Error::Signature(format!("`{name}` is reserved")));
            }
        }
        Ok(())
    }

    /// Arity checks for every predicate and modal atom in `f`.
    pub fn check_formula(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::Eq(..) | Formula::Bot => Ok(()),
            Formula::Pred(p, args) => {
                let ar = *self.preds.get(p).ok_or_else(|| Error::Undeclared(p.clone()))?;
                if ar != args.len() {
                    return Err(Error::Arity { name: p.clone(), expected: ar, found: args.len() });
                }
                Ok(())
            }
            Formula::Imp(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
            Formula::Forall(_, b) => self.check_formula(b),
            Formula::Modal { op, boxes, .. } => {
                let ar = self.op_arity(op).ok_or_else(|| Error::Undeclared(op.clone()))?;
                if ar != boxes.len() {
                    return Err(Error::Arity { name: op.clone(), expected: ar, found: boxes.len() });
                }
                boxes.iter().try_for_each(|(_, b)| self.check_formula(b))
            }
        }
    }

    pub fn is_unary(&self) -> bool {
        self.preds.values().all(|&a| a == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_overlap_and_bad_bounds() {
        let s = Signature::new().with_op("dia", 1, vec![Bound::Fin(1)]).with_pred("dia", 1);
        assert!(s.validate().is_err());
        let s = Signature::new().with_op("dia", 1, vec![]);
        assert!(s.validate().is_err());
        let s = Signature::new().with_op("dia", 1, vec![Bound::Fin(1)]).with_pred("P", 1);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn arity_check() {
        let s = Signature::new().with_op("dia", 1, vec![Bound::Fin(1)]).with_pred("P", 1);
        assert!(s.check_formula(&Formula::pred("P", &["x", "y"])).is_err());
        assert!(s.check_formula(&Formula::modal("x", "dia", vec![])).is_err());
        assert!(s.check_formula(&Formula::pred("Q", &["x"])).is_err());
    }
}

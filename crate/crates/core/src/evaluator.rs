//! Finite coalgebraic models and satisfaction for CPL, CML and the hybrid
//! languages.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::structures::{member, Lifting, Mask, StructureKind, Value};
use crate::syntax::{Cml, Formula, Hybrid, HybridLang, Signature, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub kind: StructureKind,
    pub sig: Signature,
    pub states: Vec<String>,
    pub gamma: BTreeMap<usize, Value>,
    pub interp: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

/// Total valuation; unmentioned variables denote state 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation(pub BTreeMap<Var, usize>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> usize {
        self.0.get(x).copied().unwrap_or(0)
    }

    pub fn set(&mut self, x: impl Into<Var>, c: usize) {
        self.0.insert(x.into(), c);
    }

    pub fn with(&self, x: impl Into<Var>, c: usize) -> Self {
        let mut v = self.clone();
        v.set(x, c);
        v
    }
}

impl<const N: usize> From<[(&str, usize); N]> for Valuation {
    fn from(pairs: [(&str, usize); N]) -> Self {
        Valuation(pairs.iter().map(|(x, c)| (x.to_string(), *c)).collect())
    }
}

struct Env<'a> {
    base: &'a Valuation,
    stack: Vec<(&'a str, usize)>,
}

impl<'a> Env<'a> {
    fn get(&self, x: &str) -> usize {
        self.stack.iter().rev().find(|(y, _)| *y == x).map(|(_, c)| *c).unwrap_or_else(|| self.base.get(x))
    }
}

impl Model {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn lifting(&self, op: &str) -> Result<Lifting> {
        self.kind.resolve(op)
    }

    fn gamma_at(&self, c: usize) -> Result<&Value> {
        self.gamma.get(&c).ok_or_else(|| Error::Model(format!("gamma undefined at state {c}")))
    }

    fn holds_pred(&self, p: &str, args: &[usize]) -> bool {
        self.interp.get(p).is_some_and(|rel| rel.contains(args))
    }

    /// Modal satisfaction at the composite state of `c` for argument extensions.
    pub fn modal_holds(&self, op: &str, c: usize, args: &[Mask]) -> Result<bool> {
        let l = self.lifting(op)?;
        if l.arity() != args.len() {
            return Err(Error::Arity { name: op.into(), expected: l.arity(), found: args.len() });
        }
        Ok(member(&l, self.size(), self.gamma_at(c)?, args))
    }
}

pub fn eval(m: &Model, v: &Valuation, f: &Formula) -> Result<bool> {
    let mut env = Env { base: v, stack: Vec::new() };
    eval_in(m, &mut env, f)
}

fn eval_in<'a>(m: &Model, env: &mut Env<'a>, f: &'a Formula) -> Result<bool> {
    Ok(match f {
        Formula::Eq(a, b) => env.get(a) == env.get(b),
        Formula::Pred(p, args) => {
            let tuple: Vec<usize> = args.iter().map(|a| env.get(a)).collect();
            m.holds_pred(p, &tuple)
        }
        Formula::Bot => false,
        Formula::Imp(a, b) => !eval_in(m, env, a)? || eval_in(m, env, b)?,
        Formula::Forall(x, body) => {
            for c in 0..m.size() {
                env.stack.push((x, c));
                let r = eval_in(m, env, body);
                env.stack.pop();
                if !r? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Modal { subject, op, boxes } => {
            let mut args = Vec::with_capacity(boxes.len());
            for (y, body) in boxes {
                args.push(extension_in(m, env, body, y)?);
            }
            m.modal_holds(op, env.get(subject), &args)?
        }
    })
}

fn extension_in<'a>(m: &Model, env: &mut Env<'a>, f: &'a Formula, y: &'a str) -> Result<Mask> {
    let mut out = 0;
    for c in 0..m.size() {
        env.stack.push((y, c));
        let r = eval_in(m, env, f);
        env.stack.pop();
        if r? {
            out |= 1 << c;
        }
    }
    Ok(out)
}

/// The set of states `c` with `m, v[c/y] |= f`.
pub fn extension(m: &Model, v: &Valuation, f: &Formula, y: &str) -> Result<Mask> {
    let mut env = Env { base: v, stack: Vec::new() };
    extension_in(m, &mut env, f, y)
}

pub fn eval_cml(m: &Model, c: usize, f: &Cml) -> Result<bool> {
    Ok(match f {
        Cml::Atom(p) => m.holds_pred(p, &[c]),
        Cml::Bot => false,
        Cml::Imp(a, b) => !eval_cml(m, c, a)? || eval_cml(m, c, b)?,
        Cml::Modal(op, args) => {
            let mut masks = Vec::with_capacity(args.len());
            for a in args {
                masks.push(cml_extension(m, a)?);
            }
            m.modal_holds(op, c, &masks)?
        }
    })
}

pub fn cml_extension(m: &Model, f: &Cml) -> Result<Mask> {
    let mut out = 0;
    for d in 0..m.size() {
        if eval_cml(m, d, f)? {
            out |= 1 << d;
        }
    }
    Ok(out)
}

/// Hybrid satisfaction at state `c`; any constructor is accepted.
pub fn eval_hybrid(m: &Model, v: &Valuation, c: usize, f: &Hybrid) -> Result<bool> {
    let mut env = Env { base: v, stack: Vec::new() };
    hybrid_in(m, &mut env, c, f)
}

/// Hybrid satisfaction restricted to the constructors of `lang`.
pub fn eval_hybrid_in(m: &Model, v: &Valuation, c: usize, f: &Hybrid, lang: HybridLang) -> Result<bool> {
    f.check_lang(lang)?;
    eval_hybrid(m, v, c, f)
}

fn hybrid_in<'a>(m: &Model, env: &mut Env<'a>, c: usize, f: &'a Hybrid) -> Result<bool> {
    Ok(match f {
        Hybrid::Nominal(x) => env.get(x) == c,
        Hybrid::Atom(p) => m.holds_pred(p, &[c]),
        Hybrid::Bot => false,
        Hybrid::Imp(a, b) => !hybrid_in(m, env, c, a)? || hybrid_in(m, env, c, b)?,
        Hybrid::Modal(op, args) => {
            let mut masks = Vec::with_capacity(args.len());
            for a in args {
                let mut mask = 0;
                for d in 0..m.size() {
                    if hybrid_in(m, env, d, a)? {
                        mask |= 1 << d;
                    }
                }
                masks.push(mask);
            }
            m.modal_holds(op, c, &masks)?
        }
        Hybrid::At(x, a) => {
            let d = env.get(x);
            hybrid_in(m, env, d, a)?
        }
        Hybrid::Down(x, a) => {
            env.stack.push((x, c));
            let r = hybrid_in(m, env, c, a);
            env.stack.pop();
            r?
        }
        Hybrid::Global(a) => {
            for d in 0..m.size() {
                if !hybrid_in(m, env, d, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Hybrid::ForallW(x, a) => {
            for d in 0..m.size() {
                env.stack.push((x, d));
                let r = hybrid_in(m, env, c, a);
                env.stack.pop();
                if !r? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

/// Every model invariant violated, as human-readable diagnostics.
pub fn validate_model(m: &Model, sig: &Signature) -> Vec<String> {
    let mut out = Vec::new();
    let n = m.size();
    if n == 0 {
        out.push("carrier is empty".to_string());
    }
    if n > crate::structures::MAX_CARRIER {
        out.push(format!("carrier has {n} states, at most 64 supported"));
    }
    let distinct: BTreeSet<_> = m.states.iter().collect();
    if distinct.len() != n {
        out.push("duplicate state names".to_string());
    }
    if let Err(e) = sig.validate() {
        out.push(e.to_string());
    }
    for c in 0..n {
        match m.gamma.get(&c) {
            None => out.push(format!("gamma not total: no value for state `{}`", m.states[c])),
            Some(v) => {
                if let Err(e) = m.kind.check_value(n, v) {
                    out.push(format!("gamma(`{}`): {e}", m.states[c]));
                }
            }
        }
    }
    if m.gamma.keys().any(|&c| c >= n) {
        out.push("gamma defined outside the carrier".to_string());
    }
    for (p, rel) in &m.interp {
        match sig.preds.get(p) {
            None => out.push(format!("interpretation for undeclared predicate `{p}`")),
            Some(&ar) => {
                if rel.iter().any(|t| t.len() != ar) {
                    out.push(format!("tuple of wrong length in the interpretation of `{p}`"));
                }
                if rel.iter().flatten().any(|&s| s >= n) {
                    out.push(format!("interpretation of `{p}` mentions a state outside the carrier"));
                }
            }
        }
    }
    for (op, decl) in &sig.ops {
        match m.kind.resolve(op) {
            Err(e) => out.push(e.to_string()),
            Ok(l) => {
                if l.arity() != decl.arity {
                    out.push(format!("operator `{op}` declared with arity {} but its lifting has {}", decl.arity, l.arity()));
                }
            }
        }
    }
    out
}

impl Model {
    /// Builds a model and rejects it unless every invariant holds.
    pub fn checked(
        kind: StructureKind,
        sig: Signature,
        states: Vec<String>,
        gamma: BTreeMap<usize, Value>,
        interp: BTreeMap<String, BTreeSet<Vec<usize>>>,
    ) -> Result<Model> {
        let m = Model { kind, sig, states, gamma, interp };
        let diags = validate_model(&m, &m.sig);
        if diags.is_empty() {
            Ok(m)
        } else {
            Err(Error::Model(diags.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Bound};

    fn kripke_sig() -> Signature {
        Signature::new().with_op("dia", 1, vec![Bound::Fin(1)]).with_pred("P", 1)
    }

    fn kripke_model() -> Model {
        let gamma = BTreeMap::from([
            (0, Value::Kripke { succ: 0b10, atoms: BTreeSet::new() }),
            (1, Value::Kripke { succ: 0, atoms: BTreeSet::new() }),
        ]);
        let interp = BTreeMap::from([("P".to_string(), BTreeSet::from([vec![1]]))]);
        Model::checked(StructureKind::kripke(), kripke_sig(), vec!["a".into(), "b".into()], gamma, interp).unwrap()
    }

    #[test]
    fn diamond_clause() {
        let m = kripke_model();
        let f = parse_formula("x dia [z : z = y]", &m.sig).unwrap();
        assert!(eval(&m, &Valuation::from([("x", 0), ("y", 1)]), &f).unwrap());
        assert!(!eval(&m, &Valuation::from([("x", 0), ("y", 0)]), &f).unwrap());
        assert!(!eval(&m, &Valuation::new(), &Formula::Bot).unwrap());
    }

    #[test]
    fn graded_clause() {
        let sig = Signature::new().with_op("g1", 1, vec![Bound::Fin(2)]);
        let gamma = BTreeMap::from([(0, Value::Multiset(vec![2]))]);
        let m = Model::checked(StructureKind::Multiset { max: 3 }, sig, vec!["a".into()], gamma, BTreeMap::new()).unwrap();
        let f = parse_formula("x g1 [z : z = z]", &m.sig).unwrap();
        assert!(eval(&m, &Valuation::new(), &f).unwrap());
    }

    #[test]
    fn extensions() {
        let m = kripke_model();
        let v = Valuation::from([("x", 1)]);
        assert_eq!(extension(&m, &v, &Formula::eq("y", "x"), "y").unwrap(), 0b10);
        assert_eq!(extension(&m, &v, &Formula::top(), "y").unwrap(), 0b11);
        assert_eq!(extension(&m, &v, &Formula::pred("P", &["y"]), "y").unwrap(), 0b10);
    }

    #[test]
    fn modal_and_hybrid_points() {
        let m = kripke_model();
        let dia_p = Cml::Modal("dia".into(), vec![Cml::Atom("P".into())]);
        assert!(eval_cml(&m, 0, &dia_p).unwrap());
        assert!(!eval_cml(&m, 0, &Cml::Bot).unwrap());
        assert!(eval_cml(&m, 1, &Cml::Atom("P".into())).unwrap());
        let v = Valuation::from([("x", 0), ("y", 0)]);
        let at = Hybrid::at("x", Hybrid::Nominal("y".into()));
        assert!(eval_hybrid(&m, &v, 1, &at).unwrap());
        assert!(!eval_hybrid(&m, &v.with("y", 1), 1, &at).unwrap());
        let down = Hybrid::down("z", Hybrid::Nominal("z".into()));
        assert!((0..2).all(|c| eval_hybrid(&m, &v, c, &down).unwrap()));
        let glob = Hybrid::global(Hybrid::Atom("P".into()));
        assert!(!eval_hybrid(&m, &v, 1, &glob).unwrap());
        assert!(eval_hybrid_in(&m, &v, 1, &glob, HybridLang::DownAt).is_err());
    }

    #[test]
    fn diagnostics() {
        let mut m = kripke_model();
        assert!(validate_model(&m, &m.sig).is_empty());
        m.gamma.remove(&1);
        let d = validate_model(&m, &m.sig);
        assert!(d.iter().any(|s| s.contains("gamma not total")));
        let sig = Signature::new().with_op("p1", 1, vec![Bound::Fin(2)]);
        let bad = Model {
            kind: StructureKind::Dist { k: 3 },
            sig: sig.clone(),
            states: vec!["a".into(), "b".into()],
            gamma: BTreeMap::from([(0, Value::Dist(vec![1, 1])), (1, Value::Dist(vec![3, 0]))]),
            interp: BTreeMap::new(),
        };
        assert_eq!(validate_model(&bad, &sig).len(), 1);
    }
}

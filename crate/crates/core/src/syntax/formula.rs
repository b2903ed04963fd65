use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub type Var = String;

/// Core CPL syntax. Sugar is expanded before it reaches this type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Var, Var),
    Pred(String, Vec<Var>),
    Bot,
    Imp(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Modal {
        subject: Var,
        op: String,
        boxes: Vec<(Var, Formula)>,
    },
}

pub fn is_gensym(name: &str) -> bool {
    name.len() > 2 && name.starts_with("_g") && name[2..].bytes().all(|b| b.is_ascii_digit())
}

/// Smallest `_g<N>` not in `avoid`.
pub fn fresh_var(avoid: &BTreeSet<Var>) -> Var {
    (0..)
        .map(|n| format!("_g{n}"))
        .find(|v| !avoid.contains(v))
        .expect("unbounded search")
}

/// `count` distinct fresh names, each avoiding the previous ones.
pub fn fresh_vars(avoid: &BTreeSet<Var>, count: usize) -> Vec<Var> {
    let mut avoid = avoid.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let v = fresh_var(&avoid);
        avoid.insert(v.clone());
        out.push(v);
    }
    out
}

impl Formula {
    pub fn eq(a: impl Into<Var>, b: impl Into<Var>) -> Self {
        Formula::Eq(a.into(), b.into())
    }

    pub fn pred(name: impl Into<String>, args: &[&str]) -> Self {
        Formula::Pred(name.into(), args.iter().map(|s| s.to_string()).collect())
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<Var>, body: Formula) -> Self {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn forall_many(xs: &[Var], body: Formula) -> Self {
        xs.iter().rev().fold(body, |acc, x| Formula::forall(x.clone(), acc))
    }

    pub fn modal(subject: impl Into<Var>, op: impl Into<String>, boxes: Vec<(Var, Formula)>) -> Self {
        Formula::Modal { subject: subject.into(), op: op.into(), boxes }
    }

    pub fn top() -> Self {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    pub fn not(a: Formula) -> Self {
        Formula::imp(a, Formula::Bot)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::imp(a, Formula::not(b)))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::imp(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn exists(x: impl Into<Var>, body: Formula) -> Self {
        Formula::not(Formula::forall(x, Formula::not(body)))
    }

    /// Right-nested conjunction; the empty conjunction is `top`.
    pub fn big_and(items: Vec<Formula>) -> Self {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::top(),
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Right-nested disjunction; the empty disjunction is `bot`.
    pub fn big_or(items: Vec<Formula>) -> Self {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::Bot,
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    /// The formula read off a sequent: `⋁Δ` if `Γ` is empty, else `⋀Γ → ⋁Δ`.
    pub fn sequent(lhs: Vec<Formula>, rhs: Vec<Formula>) -> Self {
        if lhs.is_empty() {
            Formula::big_or(rhs)
        } else {
            Formula::imp(Formula::big_and(lhs), Formula::big_or(rhs))
        }
    }

    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_not(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(a, b) if **b == Formula::Bot => Some(a),
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        let (a, nb) = self.as_not()?.as_imp()?;
        Some((a, nb.as_not()?))
    }

    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        let (na, b) = self.as_imp()?;
        Some((na.as_not()?, b))
    }

    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let (l, r) = self.as_and()?;
        let (a, b) = l.as_imp()?;
        let (b2, a2) = r.as_imp()?;
        (a == a2 && b == b2).then_some((a, b))
    }

    pub fn as_exists(&self) -> Option<(&Var, &Formula)> {
        match self.as_not()? {
            Formula::Forall(x, body) => Some((x, body.as_not()?)),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Imp(a, b) if **a == Formula::Bot && **b == Formula::Bot)
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Pred(..) | Formula::Bot => 0,
            Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Forall(_, b) => 1 + b.depth(),
            Formula::Modal { boxes, .. } => 1 + boxes.iter().map(|(_, b)| b.depth()).max().unwrap_or(0),
        }
    }

    /// Number of connectives, quantifiers and modal atoms.
    pub fn complexity(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Pred(..) | Formula::Bot => 0,
            Formula::Imp(a, b) => 1 + a.complexity() + b.complexity(),
            Formula::Forall(_, b) => 1 + b.complexity(),
            Formula::Modal { boxes, .. } => 1 + boxes.iter().map(|(_, b)| b.complexity()).sum::<usize>(),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Forall(..) => true,
            Formula::Imp(a, b) => a.has_quantifier() || b.has_quantifier(),
            Formula::Modal { boxes, .. } => boxes.iter().any(|(_, b)| b.has_quantifier()),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut note = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Eq(a, b) => {
                note(a, bound);
                note(b, bound);
            }
            Formula::Pred(_, args) => args.iter().for_each(|a| note(a, bound)),
            Formula::Bot => {}
            Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Formula::Modal { subject, boxes, .. } => {
                note(subject, bound);
                for (y, b) in boxes {
                    bound.push(y.clone());
                    b.collect_free(bound, out);
                    bound.pop();
                }
            }
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            Formula::Eq(a, b) => a == x || b == x,
            Formula::Pred(_, args) => args.iter().any(|a| a == x),
            Formula::Bot => false,
            Formula::Imp(a, b) => a.is_free(x) || b.is_free(x),
            Formula::Forall(y, b) => y != x && b.is_free(x),
            Formula::Modal { subject, boxes, .. } => {
                subject == x || boxes.iter().any(|(y, b)| y != x && b.is_free(x))
            }
        }
    }

    /// Every variable occurring anywhere, binders included.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Pred(_, args) => out.extend(args.iter().cloned()),
            Formula::Bot => {}
            Formula::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Forall(x, b) => {
                out.insert(x.clone());
                b.collect_vars(out);
            }
            Formula::Modal { subject, boxes, .. } => {
                out.insert(subject.clone());
                for (y, b) in boxes {
                    out.insert(y.clone());
                    b.collect_vars(out);
                }
            }
        }
    }

    /// Whether `t` may replace the free occurrences of `x` without capture.
    pub fn substitutable(&self, t: &str, x: &str) -> bool {
        match self {
            Formula::Eq(..) | Formula::Pred(..) | Formula::Bot => true,
            Formula::Imp(a, b) => a.substitutable(t, x) && b.substitutable(t, x),
            Formula::Forall(y, b) => !self.is_free(x) || (y != t && b.substitutable(t, x)),
            Formula::Modal { boxes, .. } => boxes
                .iter()
                .all(|(y, b)| y == x || !b.is_free(x) || (y != t && b.substitutable(t, x))),
        }
    }

    /// `self[t/x]`, refusing when `t` would be captured.
    pub fn substitute(&self, t: &str, x: &str) -> Result<Formula> {
        if !self.substitutable(t, x) {
            return Err(Error::NotSubstitutable { t: t.into(), x: x.into() });
        }
        Ok(self.replace_free(t, x))
    }

    /// The raw replacement clauses, with no capture check.
    pub fn replace_free(&self, t: &str, x: &str) -> Formula {
        let sw = |v: &Var| if v == x { t.to_string() } else { v.clone() };
        match self {
            Formula::Eq(a, b) => Formula::Eq(sw(a), sw(b)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(sw).collect()),
            Formula::Bot => Formula::Bot,
            Formula::Imp(a, b) => Formula::imp(a.replace_free(t, x), b.replace_free(t, x)),
            Formula::Forall(y, b) if y == x => self.clone(),
            Formula::Forall(y, b) => Formula::forall(y.clone(), b.replace_free(t, x)),
            Formula::Modal { subject, op, boxes } => Formula::Modal {
                subject: sw(subject),
                op: op.clone(),
                boxes: boxes
                    .iter()
                    .map(|(y, b)| {
                        if y == x {
                            (y.clone(), b.clone())
                        } else {
                            (y.clone(), b.replace_free(t, x))
                        }
                    })
                    .collect(),
            },
        }
    }

    /// `self[t/x]`, renaming capturing binders to fresh gensyms.
    pub fn subst_avoiding(&self, t: &str, x: &str) -> Formula {
        if t == x {
            return self.clone();
        }
        match self {
            Formula::Eq(..) | Formula::Pred(..) | Formula::Bot => self.replace_free(t, x),
            Formula::Imp(a, b) => Formula::imp(a.subst_avoiding(t, x), b.subst_avoiding(t, x)),
            Formula::Forall(y, b) => {
                if y == x || !b.is_free(x) {
                    self.clone()
                } else if y == t {
                    let y2 = fresh_binder(b, t, x);
                    let b2 = b.replace_free(&y2, y);
                    Formula::forall(y2, b2.subst_avoiding(t, x))
                } else {
                    Formula::forall(y.clone(), b.subst_avoiding(t, x))
                }
            }
            Formula::Modal { subject, op, boxes } => Formula::Modal {
                subject: if subject == x { t.to_string() } else { subject.clone() },
                op: op.clone(),
                boxes: boxes
                    .iter()
                    .map(|(y, b)| {
                        if y == x || !b.is_free(x) {
                            (y.clone(), b.clone())
                        } else if y == t {
                            let y2 = fresh_binder(b, t, x);
                            let b2 = b.replace_free(&y2, y);
                            (y2, b2.subst_avoiding(t, x))
                        } else {
                            (y.clone(), b.subst_avoiding(t, x))
                        }
                    })
                    .collect(),
            },
        }
    }

    /// Renames the box at `path` (Modal node path followed by the box index) to binder `u`.
    pub fn rename_box(&self, path: &[usize], u: &str) -> Result<Formula> {
        let (last, prefix) = path.split_last().ok_or_else(|| Error::BadPath(path.to_vec()))?;
        let mut out = self.clone();
        let node = out.at_path_mut(prefix).ok_or_else(|| Error::BadPath(path.to_vec()))?;
        let Formula::Modal { boxes, .. } = node else {
            return Err(Error::BadPath(path.to_vec()));
        };
        let (z, body) = boxes.get_mut(*last).ok_or_else(|| Error::BadPath(path.to_vec()))?;
        if z == u {
            return Ok(self.clone());
        }
        if body.is_free(u) {
            return Err(Error::Freshness(format!("`{u}` occurs free in the box body")));
        }
        let renamed = body.substitute(u, z)?;
        *z = u.to_string();
        *body = renamed;
        Ok(out)
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(self);
        };
        let child = match (self, i) {
            (Formula::Imp(a, _), 0) => a,
            (Formula::Imp(_, b), 1) => b,
            (Formula::Forall(_, b), 0) => b,
            (Formula::Modal { boxes, .. }, i) => &boxes.get(i)?.1,
            _ => return None,
        };
        child.at_path(rest)
    }

    fn at_path_mut(&mut self, path: &[usize]) -> Option<&mut Formula> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(self);
        };
        let child: &mut Formula = match (self, i) {
            (Formula::Imp(a, _), 0) => a,
            (Formula::Imp(_, b), 1) => b,
            (Formula::Forall(_, b), 0) => b,
            (Formula::Modal { boxes, .. }, i) => &mut boxes.get_mut(i)?.1,
            _ => return None,
        };
        child.at_path_mut(rest)
    }

    /// All paths addressing a box, in pre-order.
    pub fn box_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_box_paths(&mut Vec::new(), &mut out);
        out
    }

    fn collect_box_paths(&self, here: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match self {
            Formula::Imp(a, b) => {
                for (i, c) in [a, b].into_iter().enumerate() {
                    here.push(i);
                    c.collect_box_paths(here, out);
                    here.pop();
                }
            }
            Formula::Forall(_, b) => {
                here.push(0);
                b.collect_box_paths(here, out);
                here.pop();
            }
            Formula::Modal { boxes, .. } => {
                for (i, (_, b)) in boxes.iter().enumerate() {
                    here.push(i);
                    out.push(here.clone());
                    b.collect_box_paths(here, out);
                    here.pop();
                }
            }
            _ => {}
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_in(self, other, &mut Vec::new())
    }
}

fn fresh_binder(body: &Formula, t: &str, x: &str) -> Var {
    let mut avoid = body.vars();
    avoid.insert(t.to_string());
    avoid.insert(x.to_string());
    fresh_var(&avoid)
}

fn alpha_eq_in(a: &Formula, b: &Formula, env: &mut Vec<(Var, Var)>) -> bool {
    let same = |u: &Var, v: &Var, env: &Vec<(Var, Var)>| {
        for (l, r) in env.iter().rev() {
            if l == u || r == v {
                return l == u && r == v;
            }
        }
        u == v
    };
    match (a, b) {
        (Formula::Eq(a1, a2), Formula::Eq(b1, b2)) => same(a1, b1, env) && same(a2, b2, env),
        (Formula::Pred(p, xs), Formula::Pred(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(u, v)| same(u, v, env))
        }
        (Formula::Bot, Formula::Bot) => true,
        (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => {
            alpha_eq_in(a1, b1, env) && alpha_eq_in(a2, b2, env)
        }
        (Formula::Forall(x, p), Formula::Forall(y, q)) => {
            env.push((x.clone(), y.clone()));
            let r = alpha_eq_in(p, q, env);
            env.pop();
            r
        }
        (
            Formula::Modal { subject: s1, op: o1, boxes: b1 },
            Formula::Modal { subject: s2, op: o2, boxes: b2 },
        ) => {
            o1 == o2
                && same(s1, s2, env)
                && b1.len() == b2.len()
                && b1.iter().zip(b2).all(|((x, p), (y, q))| {
                    env.push((x.clone(), y.clone()));
                    let r = alpha_eq_in(p, q, env);
                    env.pop();
                    r
                })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dia(x: &str, y: &str, body: Formula) -> Formula {
        Formula::modal(x, "dia", vec![(y.to_string(), body)])
    }

    #[test]
    fn free_variables_follow_binding() {
        let f = dia("x", "z", Formula::eq("z", "y"));
        assert_eq!(f.free_vars(), ["x", "y"].map(String::from).into());
        assert!(Formula::forall("x", Formula::pred("P", &["x"])).free_vars().is_empty());
        let g = dia("x", "x", Formula::pred("P", &["x"]));
        assert_eq!(g.free_vars(), ["x"].map(String::from).into());
    }

    #[test]
    fn substitutability_cases() {
        let capture = Formula::forall("y", Formula::eq("x", "y"));
        assert!(!capture.substitutable("y", "x"));
        let boxed = dia("x", "t", Formula::pred("P", &["t"]));
        assert!(boxed.substitutable("t", "x"));
        let captured_box = dia("x", "t", Formula::pred("P", &["x"]));
        assert!(!captured_box.substitutable("t", "x"));
        assert!(capture.substitutable("x", "x"));
    }

    #[test]
    fn substitution_clauses() {
        assert_eq!(Formula::eq("x", "y").substitute("t", "x").unwrap(), Formula::eq("t", "y"));
        let q = Formula::forall("x", Formula::pred("P", &["x"]));
        assert_eq!(q.substitute("t", "x").unwrap(), q);
        let m = dia("x", "y", Formula::pred("P", &["x"]));
        assert_eq!(m.substitute("t", "x").unwrap(), dia("t", "y", Formula::pred("P", &["t"])));
        let bad = Formula::forall("y", Formula::eq("x", "y"));
        assert!(matches!(bad.substitute("y", "x"), Err(Error::NotSubstitutable { .. })));
    }

    #[test]
    fn avoiding_substitution_renames() {
        let f = Formula::forall("y", Formula::eq("x", "y"));
        let g = f.subst_avoiding("y", "x");
        assert_eq!(g, Formula::forall("_g0", Formula::eq("y", "_g0")));
    }

    #[test]
    fn rename_box_cases() {
        let f = dia("x", "z", Formula::eq("z", "y"));
        assert_eq!(f.rename_box(&[0], "u").unwrap(), dia("x", "u", Formula::eq("u", "y")));
        assert!(f.rename_box(&[0], "y").is_err());
        assert_eq!(f.rename_box(&[0], "z").unwrap(), f);
        assert!(f.rename_box(&[1], "u").is_err());
    }

    #[test]
    fn fresh_names() {
        assert_eq!(fresh_var(&BTreeSet::new()), "_g0");
        assert_eq!(fresh_var(&["_g0".to_string()].into()), "_g1");
        assert_eq!(fresh_var(&["x".to_string(), "y".to_string()].into()), "_g0");
        assert!(is_gensym("_g12"));
        assert!(!is_gensym("_g"));
        assert!(!is_gensym("_gx"));
    }

    #[test]
    fn sugar_views_invert_constructors() {
        let p = Formula::pred("P", &["x"]);
        let q = Formula::pred("Q", &["x"]);
        assert_eq!(Formula::and(p.clone(), q.clone()).as_and(), Some((&p, &q)));
        assert_eq!(Formula::or(p.clone(), q.clone()).as_or(), Some((&p, &q)));
        assert_eq!(Formula::iff(p.clone(), q.clone()).as_iff(), Some((&p, &q)));
        let e = Formula::exists("x", p.clone());
        assert_eq!(e.as_exists(), Some((&"x".to_string(), &p)));
        assert_eq!(Formula::big_and(vec![]), Formula::top());
        assert_eq!(Formula::big_or(vec![]), Formula::Bot);
        assert_eq!(Formula::big_or(vec![p.clone()]), p);
    }

    #[test]
    fn alpha_equivalence() {
        let a = dia("x", "z", Formula::eq("z", "y"));
        let b = dia("x", "u", Formula::eq("u", "y"));
        let c = dia("x", "y", Formula::eq("y", "y"));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }
}

//! Sequent calculus over CPL with one-step modal rules: proof objects and
//! their checker, height-preserving substitution, covering and absorption,
//! multicut elimination, and the embedding of Hilbert proofs.

mod absorb;
mod elim;
mod embed;
mod prove;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::onestep::{OneStepRule, RuleSet};
use crate::syntax::{render_formula, Bound, Formula, Signature, Var};

pub use absorb::{covers, covers_schematic, derive_congruence, find_absorption, AbsorptionWitness, MixSource};
pub use elim::{eliminate_mcut, ElimStats};
pub use embed::{axiom_to_sequent, hilbert_to_sequent};
pub use prove::prove_propositional;
pub use subst::substitute_proof;

#[derive(Clone, Debug, Default)]
pub struct Sequent {
    pub lhs: Vec<Formula>,
    pub rhs: Vec<Formula>,
}

pub(crate) fn count(v: &[Formula], f: &Formula) -> usize {
    v.iter().filter(|g| *g == f).count()
}

pub(crate) fn remove_n(v: &[Formula], f: &Formula, n: usize) -> Option<Vec<Formula>> {
    let mut out = Vec::with_capacity(v.len());
    let mut left = n;
    for g in v {
        if left > 0 && g == f {
            left -= 1;
        } else {
            out.push(g.clone());
        }
    }
    (left == 0).then_some(out)
}

pub(crate) fn minus(v: &[Formula], w: &[Formula]) -> Option<Vec<Formula>> {
    w.iter().try_fold(v.to_vec(), |acc, f| remove_n(&acc, f, 1))
}

pub(crate) fn plus(a: &[Formula], b: &[Formula]) -> Vec<Formula> {
    a.iter().chain(b).cloned().collect()
}

fn sorted(v: &[Formula]) -> Vec<&Formula> {
    let mut s: Vec<&Formula> = v.iter().collect();
    s.sort();
    s
}

pub(crate) fn ms_eq(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && sorted(a) == sorted(b)
}

fn tally(v: &[Formula]) -> BTreeMap<&Formula, usize> {
    let mut m = BTreeMap::new();
    for f in v {
        *m.entry(f).or_insert(0) += 1;
    }
    m
}

impl Sequent {
    pub fn new(lhs: Vec<Formula>, rhs: Vec<Formula>) -> Self {
        Sequent { lhs, rhs }
    }

    pub fn is_empty(&self) -> bool {
        self.lhs.is_empty() && self.rhs.is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.lhs.iter().chain(&self.rhs).flat_map(Formula::free_vars).collect()
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for f in self.lhs.iter().chain(&self.rhs) {
            f.collect_vars(out);
        }
    }

    pub fn substitute(&self, t: &str, x: &str) -> Result<Sequent> {
        let s = |v: &[Formula]| v.iter().map(|f| f.substitute(t, x)).collect::<Result<Vec<_>>>();
        Ok(Sequent { lhs: s(&self.lhs)?, rhs: s(&self.rhs)? })
    }

    /// Replaces free `x` by `t` without a substitutability check.
    pub fn replace_free(&self, t: &str, x: &str) -> Sequent {
        let s = |v: &[Formula]| v.iter().map(|f| f.replace_free(t, x)).collect();
        Sequent { lhs: s(&self.lhs), rhs: s(&self.rhs) }
    }

    pub fn join(&self, other: &Sequent) -> Sequent {
        Sequent { lhs: plus(&self.lhs, &other.lhs), rhs: plus(&self.rhs, &other.rhs) }
    }

    /// Multiset inclusion on both sides.
    pub fn within(&self, other: &Sequent) -> bool {
        let sub = |a: &[Formula], b: &[Formula]| {
            let tb = tally(b);
            tally(a).into_iter().all(|(f, n)| tb.get(f).copied().unwrap_or(0) >= n)
        };
        sub(&self.lhs, &other.lhs) && sub(&self.rhs, &other.rhs)
    }

    /// The formula `/\ lhs -> \/ rhs`.
    pub fn formula(&self) -> Formula {
        Formula::sequent(self.lhs.clone(), self.rhs.clone())
    }
}

impl PartialEq for Sequent {
    fn eq(&self, other: &Self) -> bool {
        ms_eq(&self.lhs, &other.lhs) && ms_eq(&self.rhs, &other.rhs)
    }
}

impl Eq for Sequent {}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[Formula]| v.iter().map(render_formula).collect::<Vec<_>>().join(", ");
        let (l, r) = (side(&self.lhs), side(&self.rhs));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(f, "=>"),
            (true, false) => write!(f, "=> {r}"),
            (false, true) => write!(f, "{l} =>"),
            (false, false) => write!(f, "{l} => {r}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Ax,
    LBot,
    REq,
    RImp,
    LImp,
    RAll,
    LAll,
    LEq1,
    LEq2,
    LW,
    RW,
    LC,
    RC,
    Cut,
    Mcut,
    Modal,
    Paste,
}

impl Label {
    pub const ALL: [Label; 17] = [
        Label::Ax,
        Label::LBot,
        Label::REq,
        Label::RImp,
        Label::LImp,
        Label::RAll,
        Label::LAll,
        Label::LEq1,
        Label::LEq2,
        Label::LW,
        Label::RW,
        Label::LC,
        Label::RC,
        Label::Cut,
        Label::Mcut,
        Label::Modal,
        Label::Paste,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Label::Ax => "Ax",
            Label::LBot => "LBot",
            Label::REq => "REq",
            Label::RImp => "RImp",
            Label::LImp => "LImp",
            Label::RAll => "RAll",
            Label::LAll => "LAll",
            Label::LEq1 => "LEq1",
            Label::LEq2 => "LEq2",
            Label::LW => "LW",
            Label::RW => "RW",
            Label::LC => "LC",
            Label::RC => "RC",
            Label::Cut => "Cut",
            Label::Mcut => "Mcut",
            Label::Modal => "Modal",
            Label::Paste => "Paste",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        Label::ALL.into_iter().find(|l| l.name() == s)
    }

    pub fn is_structural(self) -> bool {
        matches!(self, Label::LW | Label::RW | Label::LC | Label::RC)
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, Label::Ax | Label::LBot | Label::REq)
    }
}

/// The equality `x = y` of an L= step and its placeholder variable `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqTriple {
    pub x: Var,
    pub y: Var,
    pub w: Var,
}

/// A rule application. Which fields matter depends on the label:
/// `principal` for every logical, structural, cut and modal step, `eigen`
/// for RAll and Modal, `eq` and `pattern` for L=, `subst` for the LAll term
/// and the Paste witnesses, `rule` for Modal and `index` for Paste.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApp {
    pub label: Label,
    pub principal: Vec<Formula>,
    pub eigen: Option<Var>,
    pub eq: Option<EqTriple>,
    pub pattern: Option<Sequent>,
    pub subst: Vec<Var>,
    pub rule: Option<String>,
    pub index: Option<usize>,
}

impl RuleApp {
    pub fn new(label: Label) -> Self {
        RuleApp { label, principal: vec![], eigen: None, eq: None, pattern: None, subst: vec![], rule: None, index: None }
    }

    fn with_principal(mut self, f: Formula) -> Self {
        self.principal = vec![f];
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub conclusion: Sequent,
    pub rule: RuleApp,
    pub premises: Vec<Proof>,
}

fn missing(what: &str, f: &Formula) -> Error {
    Error::Rejected(format!("{what}: `{}` not present", render_formula(f)))
}

impl Proof {
    pub fn node(rule: RuleApp, conclusion: Sequent, premises: Vec<Proof>) -> Self {
        Proof { conclusion, rule, premises }
    }

    pub fn ax(f: Formula) -> Self {
        Proof::node(RuleApp::new(Label::Ax).with_principal(f.clone()), Sequent::new(vec![f.clone()], vec![f]), vec![])
    }

    pub fn lbot() -> Self {
        Proof::node(RuleApp::new(Label::LBot).with_principal(Formula::Bot), Sequent::new(vec![Formula::Bot], vec![]), vec![])
    }

    pub fn req(x: &str) -> Self {
        let f = Formula::eq(x, x);
        Proof::node(RuleApp::new(Label::REq).with_principal(f.clone()), Sequent::new(vec![], vec![f]), vec![])
    }

    pub fn rimp(p: Proof, a: &Formula, b: &Formula) -> Result<Self> {
        let f = Formula::imp(a.clone(), b.clone());
        let lhs = remove_n(&p.conclusion.lhs, a, 1).ok_or_else(|| missing("RImp", a))?;
        let mut rhs = remove_n(&p.conclusion.rhs, b, 1).ok_or_else(|| missing("RImp", b))?;
        rhs.push(f.clone());
        Ok(Proof::node(RuleApp::new(Label::RImp).with_principal(f), Sequent::new(lhs, rhs), vec![p]))
    }

    /// Left implication; the context is read off the first premise.
    pub fn limp(p0: Proof, p1: Proof, a: &Formula, b: &Formula) -> Result<Self> {
        let f = Formula::imp(a.clone(), b.clone());
        let mut lhs = p0.conclusion.lhs.clone();
        lhs.push(f.clone());
        let rhs = remove_n(&p0.conclusion.rhs, a, 1).ok_or_else(|| missing("LImp", a))?;
        Ok(Proof::node(RuleApp::new(Label::LImp).with_principal(f), Sequent::new(lhs, rhs), vec![p0, p1]))
    }

    pub fn rall(p: Proof, x: &str, body: &Formula, y: &str) -> Result<Self> {
        let inst = body.substitute(y, x)?;
        let f = Formula::forall(x, body.clone());
        let mut rhs = remove_n(&p.conclusion.rhs, &inst, 1).ok_or_else(|| missing("RAll", &inst))?;
        rhs.push(f.clone());
        let mut r = RuleApp::new(Label::RAll).with_principal(f);
        r.eigen = Some(y.to_string());
        Ok(Proof::node(r, Sequent::new(p.conclusion.lhs.clone(), rhs), vec![p]))
    }

    pub fn lall(p: Proof, x: &str, body: &Formula, z: &str) -> Result<Self> {
        let inst = body.substitute(z, x)?;
        let f = Formula::forall(x, body.clone());
        let mut lhs = remove_n(&p.conclusion.lhs, &inst, 1).ok_or_else(|| missing("LAll", &inst))?;
        lhs.push(f.clone());
        let mut r = RuleApp::new(Label::LAll).with_principal(f);
        r.subst = vec![z.to_string()];
        Ok(Proof::node(r, Sequent::new(lhs, p.conclusion.rhs.clone()), vec![p]))
    }

    /// L=: `second` selects the variant whose conclusion instantiates the
    /// placeholder with `x` rather than `y`.
    pub fn leq(second: bool, p: Proof, x: &str, y: &str, w: &str, pattern: Sequent) -> Result<Self> {
        let t = if second { x } else { y };
        let body = pattern.substitute(t, w)?;
        let conclusion = Sequent::new(vec![Formula::eq(x, y)], vec![]).join(&body);
        let mut r = RuleApp::new(if second { Label::LEq2 } else { Label::LEq1 });
        r.eq = Some(EqTriple { x: x.into(), y: y.into(), w: w.into() });
        r.pattern = Some(pattern);
        Ok(Proof::node(r, conclusion, vec![p]))
    }

    pub fn lw(p: Proof, f: &Formula) -> Self {
        let mut c = p.conclusion.clone();
        c.lhs.push(f.clone());
        Proof::node(RuleApp::new(Label::LW).with_principal(f.clone()), c, vec![p])
    }

    pub fn rw(p: Proof, f: &Formula) -> Self {
        let mut c = p.conclusion.clone();
        c.rhs.push(f.clone());
        Proof::node(RuleApp::new(Label::RW).with_principal(f.clone()), c, vec![p])
    }

    pub fn lc(p: Proof, f: &Formula) -> Result<Self> {
        if count(&p.conclusion.lhs, f) < 2 {
            return Err(missing("LC needs two copies", f));
        }
        let c = Sequent::new(remove_n(&p.conclusion.lhs, f, 1).expect("counted"), p.conclusion.rhs.clone());
        Ok(Proof::node(RuleApp::new(Label::LC).with_principal(f.clone()), c, vec![p]))
    }

    pub fn rc(p: Proof, f: &Formula) -> Result<Self> {
        if count(&p.conclusion.rhs, f) < 2 {
            return Err(missing("RC needs two copies", f));
        }
        let c = Sequent::new(p.conclusion.lhs.clone(), remove_n(&p.conclusion.rhs, f, 1).expect("counted"));
        Ok(Proof::node(RuleApp::new(Label::RC).with_principal(f.clone()), c, vec![p]))
    }

    pub fn cut(p0: Proof, p1: Proof, f: &Formula) -> Result<Self> {
        let c = cut_conclusion(&p0.conclusion, &p1.conclusion, f, 1, 1)?;
        Ok(Proof::node(RuleApp::new(Label::Cut).with_principal(f.clone()), c, vec![p0, p1]))
    }

    pub fn mcut(p0: Proof, p1: Proof, f: &Formula, m: usize, n: usize) -> Result<Self> {
        let c = cut_conclusion(&p0.conclusion, &p1.conclusion, f, m, n)?;
        Ok(Proof::node(RuleApp::new(Label::Mcut).with_principal(f.clone()), c, vec![p0, p1]))
    }

    /// An S(R) step; `principal` lists the instances of the conclusion atoms
    /// of `rule`, left side first.
    pub fn modal(rule: &OneStepRule, principal: Vec<Formula>, eigen: &str, sigma: &Sequent, premises: Vec<Proof>) -> Self {
        let k = rule.conclusion.lhs.len();
        let conclusion = Sequent::new(plus(&sigma.lhs, &principal[..k]), plus(&principal[k..], &sigma.rhs));
        let mut r = RuleApp::new(Label::Modal);
        r.principal = principal;
        r.eigen = Some(eigen.to_string());
        r.rule = Some(rule.name.clone());
        Proof::node(r, conclusion, premises)
    }

    /// Paste on the left modal atom `principal`, argument `index`, with
    /// witnesses `zs`.
    pub fn paste(p: Proof, principal: &Formula, index: usize, zs: &[Var]) -> Result<Self> {
        let (narrowed, instances) = paste_parts(principal, index, zs)?;
        let mut lhs = minus(&p.conclusion.lhs, &instances).ok_or_else(|| missing("Paste", principal))?;
        lhs = remove_n(&lhs, &narrowed, 1).ok_or_else(|| missing("Paste", &narrowed))?;
        lhs.push(principal.clone());
        let mut r = RuleApp::new(Label::Paste).with_principal(principal.clone());
        r.index = Some(index);
        r.subst = zs.to_vec();
        Ok(Proof::node(r, Sequent::new(lhs, p.conclusion.rhs.clone()), vec![p]))
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Proof::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    pub fn count_label(&self, l: Label) -> usize {
        usize::from(self.rule.label == l) + self.premises.iter().map(|p| p.count_label(l)).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.count_label(Label::Cut) + self.count_label(Label::Mcut) == 0
    }

    /// Every variable mentioned anywhere in the proof.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_all_vars(&mut out);
        out
    }

    fn collect_all_vars(&self, out: &mut BTreeSet<Var>) {
        self.conclusion.collect_vars(out);
        for f in &self.rule.principal {
            f.collect_vars(out);
        }
        out.extend(self.rule.eigen.iter().cloned());
        out.extend(self.rule.subst.iter().cloned());
        if let Some(e) = &self.rule.eq {
            out.extend([e.x.clone(), e.y.clone(), e.w.clone()]);
        }
        if let Some(p) = &self.rule.pattern {
            p.collect_vars(out);
        }
        for p in &self.premises {
            p.collect_all_vars(out);
        }
    }
}

pub(crate) fn cut_conclusion(l: &Sequent, r: &Sequent, f: &Formula, m: usize, n: usize) -> Result<Sequent> {
    let rl = remove_n(&r.lhs, f, n).ok_or_else(|| missing("cut", f))?;
    let lr = remove_n(&l.rhs, f, m).ok_or_else(|| missing("cut", f))?;
    Ok(Sequent::new(plus(&l.lhs, &rl), plus(&lr, &r.rhs)))
}

/// For a Paste on argument `index` of `principal`: the atom with that box
/// narrowed to `\/ y = z_j`, and the instances `phi[z_j/y]`.
pub(crate) fn paste_parts(principal: &Formula, index: usize, zs: &[Var]) -> Result<(Formula, Vec<Formula>)> {
    let Formula::Modal { subject, op, boxes } = principal else {
        return Err(Error::Rejected("Paste principal is not a modal atom".into()));
    };
    let (y, phi) = boxes.get(index).ok_or_else(|| Error::Rejected(format!("Paste index {index} out of range")))?;
    let mut narrowed = boxes.clone();
    narrowed[index] = (y.clone(), Formula::big_or(zs.iter().map(|z| Formula::eq(y.clone(), z.clone())).collect()));
    let instances = zs.iter().map(|z| phi.substitute(z, y)).collect::<Result<Vec<_>>>()?;
    Ok((Formula::modal(subject.clone(), op.clone(), narrowed), instances))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub cut: bool,
    pub mcut: bool,
    pub paste: bool,
}

impl Flags {
    pub const CUT_FREE: Flags = Flags { cut: false, mcut: false, paste: false };
    pub const WITH_CUT: Flags = Flags { cut: true, mcut: true, paste: false };
}

/// A calculus: the one-step rules, the signature (needed for Paste bounds)
/// and which of the optional rules are admitted.
#[derive(Clone, Copy, Debug)]
pub struct Calculus<'a> {
    pub rules: &'a RuleSet,
    pub sig: Option<&'a Signature>,
    pub flags: Flags,
}

impl<'a> Calculus<'a> {
    pub fn new(rules: &'a RuleSet, flags: Flags) -> Self {
        Calculus { rules, sig: None, flags }
    }

    pub fn with_sig(mut self, sig: &'a Signature) -> Self {
        self.sig = Some(sig);
        self
    }
}

type Check = std::result::Result<(), String>;

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same(actual: &Sequent, expected: &Sequent) -> Check {
    expect(actual == expected, || format!("expected premise `{expected}`, found `{actual}`"))
}

fn take<'a>(v: &[Formula], f: &'a Formula, side: &str) -> std::result::Result<Vec<Formula>, String> {
    remove_n(v, f, 1).ok_or_else(|| format!("principal `{}` missing from the {side}", render_formula(f)))
}

fn one_principal(r: &RuleApp) -> std::result::Result<&Formula, String> {
    match r.principal.as_slice() {
        [f] => Ok(f),
        _ => Err(format!("{} expects exactly one principal formula", r.label.name())),
    }
}

fn arity(node: &Proof, n: usize) -> Check {
    expect(node.premises.len() == n, || format!("{} expects {n} premise(s), found {}", node.rule.label.name(), node.premises.len()))
}

/// Checks one inference against its premises' conclusions.
pub fn check_step(node: &Proof, calc: &Calculus) -> Check {
    let c = &node.conclusion;
    let r = &node.rule;
    let prem = |i: usize| &node.premises[i].conclusion;
    match r.label {
        Label::Ax => {
            arity(node, 0)?;
            expect(c.lhs.len() == 1 && c.rhs.len() == 1 && c.lhs[0] == c.rhs[0], || format!("`{c}` is not an identity axiom"))?;
            expect(r.principal.is_empty() || r.principal == c.lhs, || "Ax principal differs from the conclusion".into())
        }
        Label::LBot => {
            arity(node, 0)?;
            expect(c.lhs == [Formula::Bot] && c.rhs.is_empty(), || format!("`{c}` is not the falsum axiom"))
        }
        Label::REq => {
            arity(node, 0)?;
            let ok = c.lhs.is_empty() && matches!(c.rhs.as_slice(), [Formula::Eq(a, b)] if a == b);
            expect(ok, || format!("`{c}` is not a reflexivity axiom"))
        }
        Label::RImp => {
            arity(node, 1)?;
            let f = one_principal(r)?;
            let (a, b) = f.as_imp().ok_or("RImp principal is not an implication")?;
            let delta = take(&c.rhs, f, "right")?;
            same(prem(0), &Sequent::new(plus(&c.lhs, &[a.clone()]), plus(&delta, &[b.clone()])))
        }
        Label::LImp => {
            arity(node, 2)?;
            let f = one_principal(r)?;
            let (a, b) = f.as_imp().ok_or("LImp principal is not an implication")?;
            let gamma = take(&c.lhs, f, "left")?;
            same(prem(0), &Sequent::new(gamma.clone(), plus(&c.rhs, &[a.clone()])))?;
            same(prem(1), &Sequent::new(plus(&gamma, &[b.clone()]), c.rhs.clone()))
        }
        Label::RAll => {
            arity(node, 1)?;
            let f = one_principal(r)?;
            let Formula::Forall(x, body) = f else { return Err("RAll principal is not universal".into()) };
            let y = r.eigen.as_ref().ok_or("RAll needs an eigenvariable")?;
            expect(!c.free_vars().contains(y), || format!("eigenvariable `{y}` is free in the conclusion"))?;
            let inst = body.substitute(y, x).map_err(|e| e.to_string())?;
            let delta = take(&c.rhs, f, "right")?;
            same(prem(0), &Sequent::new(c.lhs.clone(), plus(&delta, &[inst])))
        }
        Label::LAll => {
            arity(node, 1)?;
            let f = one_principal(r)?;
            let Formula::Forall(x, body) = f else { return Err("LAll principal is not universal".into()) };
            let [z] = r.subst.as_slice() else { return Err("LAll needs exactly one term".into()) };
            let inst = body.substitute(z, x).map_err(|e| e.to_string())?;
            let gamma = take(&c.lhs, f, "left")?;
            same(prem(0), &Sequent::new(plus(&gamma, &[inst]), c.rhs.clone()))
        }
        Label::LEq1 | Label::LEq2 => {
            arity(node, 1)?;
            let e = r.eq.as_ref().ok_or("L= needs its equality")?;
            let pat = r.pattern.as_ref().ok_or("L= needs its pattern")?;
            let (concl_t, prem_t) = if r.label == Label::LEq1 { (&e.y, &e.x) } else { (&e.x, &e.y) };
            let eq = Sequent::new(vec![Formula::eq(e.x.clone(), e.y.clone())], vec![]);
            let sub = |t: &str| pat.substitute(t, &e.w).map_err(|err| err.to_string());
            let expected_c = eq.join(&sub(concl_t)?);
            expect(*c == expected_c, || format!("conclusion `{c}` does not match the L= pattern, expected `{expected_c}`"))?;
            same(prem(0), &eq.join(&sub(prem_t)?))
        }
        Label::LW | Label::RW | Label::LC | Label::RC => {
            arity(node, 1)?;
            let f = one_principal(r)?;
            let p = prem(0);
            let expected = match r.label {
                Label::LW => Sequent::new(take(&c.lhs, f, "left")?, c.rhs.clone()),
                Label::RW => Sequent::new(c.lhs.clone(), take(&c.rhs, f, "right")?),
                Label::LC => {
                    take(&c.lhs, f, "left")?;
                    Sequent::new(plus(&c.lhs, &[f.clone()]), c.rhs.clone())
                }
                _ => {
                    take(&c.rhs, f, "right")?;
                    Sequent::new(c.lhs.clone(), plus(&c.rhs, &[f.clone()]))
                }
            };
            same(p, &expected)
        }
        Label::Cut => {
            expect(calc.flags.cut, || "Cut is not admitted".into())?;
            arity(node, 2)?;
            let f = one_principal(r)?;
            let expected = cut_conclusion(prem(0), prem(1), f, 1, 1).map_err(|e| e.to_string())?;
            expect(*c == expected, || format!("cut conclusion should be `{expected}`"))
        }
        Label::Mcut => {
            expect(calc.flags.mcut, || "Mcut is not admitted".into())?;
            arity(node, 2)?;
            let f = one_principal(r)?;
            let (l, rr) = (prem(0), prem(1));
            let m = (count(&l.rhs, f) + count(&rr.rhs, f)).checked_sub(count(&c.rhs, f));
            let n = (count(&l.lhs, f) + count(&rr.lhs, f)).checked_sub(count(&c.lhs, f));
            let (Some(m), Some(n)) = (m, n) else { return Err("Mcut conclusion has too many copies".into()) };
            expect(m >= 1 && n >= 1, || "Mcut must remove at least one copy on each side".into())?;
            let expected = cut_conclusion(l, rr, f, m, n).map_err(|e| e.to_string())?;
            expect(*c == expected, || format!("multicut conclusion should be `{expected}`"))
        }
        Label::Modal => check_modal(node, calc),
        Label::Paste => check_paste(node, calc),
    }
}

fn check_modal(node: &Proof, calc: &Calculus) -> Check {
    let r = &node.rule;
    let c = &node.conclusion;
    let name = r.rule.as_ref().ok_or("Modal step needs a rule name")?;
    let rule = calc.rules.resolve(name).ok_or_else(|| format!("unknown one-step rule `{name}`"))?;
    let y = r.eigen.as_ref().ok_or("Modal step needs an eigenvariable")?;
    arity(node, rule.premises.len())?;
    let atoms: Vec<_> = rule.conclusion.lhs.iter().chain(&rule.conclusion.rhs).collect();
    expect(atoms.len() == r.principal.len(), || format!("rule {name} has {} principal atoms", atoms.len()))?;
    let mut sigma: BTreeMap<&str, Formula> = BTreeMap::new();
    let mut subject: Option<&Var> = None;
    for (atom, f) in atoms.iter().zip(&r.principal) {
        let Formula::Modal { subject: s, op, boxes } = f else {
            return Err(format!("`{}` is not a modal atom", render_formula(f)));
        };
        expect(*op == atom.op && boxes.len() == atom.args.len(), || format!("`{}` does not instantiate `{}`", render_formula(f), atom.op))?;
        expect(subject.is_none_or(|z| z == s), || "principal atoms must share their subject".into())?;
        subject = Some(s);
        for (p, (x, phi)) in atom.args.iter().zip(boxes) {
            sigma.insert(p, phi.substitute(y, x).map_err(|e| e.to_string())?);
        }
    }
    expect(!c.free_vars().contains(y), || format!("eigenvariable `{y}` is free in the conclusion"))?;
    let k = rule.conclusion.lhs.len();
    let ctx_l = minus(&c.lhs, &r.principal[..k]).ok_or("left principal atoms missing from the conclusion")?;
    let ctx_r = minus(&c.rhs, &r.principal[k..]).ok_or("right principal atoms missing from the conclusion")?;
    for (i, p) in rule.premises.iter().enumerate() {
        let inst = |v: &[String]| v.iter().map(|s| sigma[s.as_str()].clone()).collect::<Vec<_>>();
        same(&node.premises[i].conclusion, &Sequent::new(plus(&ctx_l, &inst(&p.lhs)), plus(&inst(&p.rhs), &ctx_r)))?;
    }
    Ok(())
}

fn check_paste(node: &Proof, calc: &Calculus) -> Check {
    expect(calc.flags.paste, || "Paste is not admitted".into())?;
    arity(node, 1)?;
    let r = &node.rule;
    let c = &node.conclusion;
    let f = one_principal(r)?;
    let Formula::Modal { op, boxes, .. } = f else { return Err("Paste principal is not a modal atom".into()) };
    let i = r.index.ok_or("Paste needs an argument index")?;
    let sig = calc.sig.ok_or("Paste needs a signature")?;
    let bound = sig.bound(op, i).ok_or_else(|| format!("`{op}` has no argument {i}"))?;
    expect(bound == Bound::Fin(r.subst.len()), || format!("Paste on `{op}` argument {i} needs {bound:?} witnesses"))?;
    let zs: BTreeSet<&Var> = r.subst.iter().collect();
    expect(zs.len() == r.subst.len(), || "Paste witnesses must be distinct".into())?;
    let fv = c.free_vars();
    let y = &boxes.get(i).ok_or("Paste index out of range")?.0;
    expect(r.subst.iter().all(|z| !fv.contains(z) && z != y), || "Paste witnesses must be fresh".into())?;
    let (narrowed, instances) = paste_parts(f, i, &r.subst).map_err(|e| e.to_string())?;
    let gamma = take(&c.lhs, f, "left")?;
    let mut lhs = plus(&gamma, &[narrowed]);
    lhs.extend(instances);
    same(&node.premises[0].conclusion, &Sequent::new(lhs, c.rhs.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentDiagnostic {
    pub path: Vec<usize>,
    pub label: Label,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SequentReport {
    pub accepted: bool,
    pub conclusion: Sequent,
    pub height: usize,
    pub diagnostics: Vec<SequentDiagnostic>,
}

/// Checks every inference of `proof`; paths are premise indices from the root.
pub fn check_sequent_proof(proof: &Proof, calc: &Calculus) -> SequentReport {
    let mut diagnostics = Vec::new();
    let mut stack = vec![(proof, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if let Err(message) = check_step(node, calc) {
            diagnostics.push(SequentDiagnostic { path: path.clone(), label: node.rule.label, message });
        }
        for (i, p) in node.premises.iter().enumerate() {
            let mut q = path.clone();
            q.push(i);
            stack.push((p, q));
        }
    }
    diagnostics.sort_by(|a, b| a.path.cmp(&b.path));
    SequentReport { accepted: diagnostics.is_empty(), conclusion: proof.conclusion.clone(), height: proof.height(), diagnostics }
}

/// Extends `p` to prove `target` by contracting surplus copies and
/// weakening in missing ones. Fails when a formula of `p` is absent from
/// `target`.
pub fn adjust_to(p: Proof, target: &Sequent) -> Result<Proof> {
    let mut p = p;
    for left in [true, false] {
        let (have, want) = if left { (&p.conclusion.lhs, &target.lhs) } else { (&p.conclusion.rhs, &target.rhs) };
        let (th, tw) = (tally(have), tally(want));
        let mut surplus = Vec::new();
        let mut deficit = Vec::new();
        for (f, &h) in &th {
            let w = tw.get(f).copied().unwrap_or(0);
            if h > w {
                if w == 0 {
                    return Err(Error::Rejected(format!("`{}` cannot be removed to reach `{target}`", render_formula(f))));
                }
                surplus.extend(std::iter::repeat_n((*f).clone(), h - w));
            }
        }
        for (f, &w) in &tw {
            let h = th.get(f).copied().unwrap_or(0);
            deficit.extend(std::iter::repeat_n((*f).clone(), w.saturating_sub(h)));
        }
        for f in surplus {
            p = if left { Proof::lc(p, &f)? } else { Proof::rc(p, &f)? };
        }
        for f in deficit {
            p = if left { Proof::lw(p, &f) } else { Proof::rw(p, &f) };
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests;

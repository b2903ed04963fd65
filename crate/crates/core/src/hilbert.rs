//! The Hilbert calculus: axiom schemes, their recognition, and a proof
//! checker whose only rule is modus ponens.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::onestep::{OneStepRule, RuleSet, SVar};
use crate::syntax::{Bound, Formula, Signature, Var};

/// A scheme together with the parameters of one instance, without the
/// universal prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// `φ → (ψ → φ)`
    Weaken { phi: Formula, psi: Formula },
    /// `(φ → (ψ → χ)) → ((φ → ψ) → (φ → χ))`
    Distribute { phi: Formula, psi: Formula, chi: Formula },
    /// `⊥ → φ`
    ExFalso { phi: Formula },
    /// `¬¬φ → φ`
    DoubleNeg { phi: Formula },
    /// `∀x.φ → φ[z/x]`
    Instance { x: Var, phi: Formula, z: Var },
    /// `∀x.(φ → ψ) → (∀x.φ → ∀x.ψ)`
    ForallImp { x: Var, phi: Formula, psi: Formula },
    /// `φ → ∀x.φ` with `x` not free in `φ`
    Vacuous { x: Var, phi: Formula },
    /// `x = x`
    Refl { x: Var },
    /// `x = z → P(…x…) → P(…z…)`; the predicate `=` is spelled `"="`
    EqPred { x: Var, z: Var, pred: String, args: Vec<Var>, pos: usize },
    /// `x = z → x ♡ … → z ♡ …`
    EqModal { x: Var, z: Var, op: String, boxes: Vec<(Var, Formula)> },
    /// Renaming the binder of box `index` to `u`.
    Alpha { subject: Var, op: String, boxes: Vec<(Var, Formula)>, index: usize, u: Var },
    /// `∀z.(∀x.Aσ → [σ,x,z]P)` for the named rule.
    Onestep { rule: String, x: Var, z: Var, sigma: BTreeMap<SVar, Formula> },
    /// Bounded-argument elimination at box `index` with witnesses `zs`.
    Bdpl { subject: Var, op: String, boxes: Vec<(Var, Formula)>, index: usize, zs: Vec<Var> },
}

impl Axiom {
    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Weaken { .. } | Axiom::Distribute { .. } | Axiom::ExFalso { .. } | Axiom::DoubleNeg { .. } => "En1",
            Axiom::Instance { .. } => "En2",
            Axiom::ForallImp { .. } => "En3",
            Axiom::Vacuous { .. } => "En4",
            Axiom::Refl { .. } => "En5",
            Axiom::EqPred { .. } => "En6.1",
            Axiom::EqModal { .. } => "En6.2",
            Axiom::Alpha { .. } => "Alpha",
            Axiom::Onestep { .. } => "Onestep",
            Axiom::Bdpl { .. } => "BdPL",
        }
    }

    /// The instance without its universal prefix, enforcing side conditions.
    pub fn body(&self, sig: &Signature, rules: &RuleSet) -> Result<Formula> {
        use Formula as F;
        Ok(match self {
            Axiom::Weaken { phi, psi } => F::imp(phi.clone(), F::imp(psi.clone(), phi.clone())),
            Axiom::Distribute { phi, psi, chi } => F::imp(
                F::imp(phi.clone(), F::imp(psi.clone(), chi.clone())),
                F::imp(F::imp(phi.clone(), psi.clone()), F::imp(phi.clone(), chi.clone())),
            ),
            Axiom::ExFalso { phi } => F::imp(F::Bot, phi.clone()),
            Axiom::DoubleNeg { phi } => F::imp(F::not(F::not(phi.clone())), phi.clone()),
            Axiom::Instance { x, phi, z } => F::imp(F::forall(x.clone(), phi.clone()), phi.substitute(z, x)?),
            Axiom::ForallImp { x, phi, psi } => F::imp(
                F::forall(x.clone(), F::imp(phi.clone(), psi.clone())),
                F::imp(F::forall(x.clone(), phi.clone()), F::forall(x.clone(), psi.clone())),
            ),
            Axiom::Vacuous { x, phi } => {
                if phi.is_free(x) {
                    return Err(Error::Freshness(format!("`{x}` is free in the formula")));
                }
                F::imp(phi.clone(), F::forall(x.clone(), phi.clone()))
            }
            Axiom::Refl { x } => F::eq(x.clone(), x.clone()),
            Axiom::EqPred { x, z, pred, args, pos } => {
                if args.get(*pos) != Some(x) {
                    return Err(Error::Rejected(format!("argument {pos} is not `{x}`")));
                }
                let mut moved = args.clone();
                moved[*pos] = z.clone();
                let atom = |a: &[Var]| {
                    if pred == "=" {
                        F::Eq(a[0].clone(), a[1].clone())
                    } else {
                        F::Pred(pred.clone(), a.to_vec())
                    }
                };
                if pred == "=" && args.len() != 2 {
                    return Err(Error::Arity { name: "=".into(), expected: 2, found: args.len() });
                }
                F::imp(F::eq(x.clone(), z.clone()), F::imp(atom(args), atom(&moved)))
            }
            Axiom::EqModal { x, z, op, boxes } => F::imp(
                F::eq(x.clone(), z.clone()),
                F::imp(F::modal(x.clone(), op.clone(), boxes.clone()), F::modal(z.clone(), op.clone(), boxes.clone())),
            ),
            Axiom::Alpha { subject, op, boxes, index, u } => {
                let lhs = F::modal(subject.clone(), op.clone(), boxes.clone());
                let rhs = lhs.rename_box(&[*index], u)?;
                F::imp(lhs, rhs)
            }
            Axiom::Onestep { rule, x, z, sigma } => {
                let r = rules.get(rule).ok_or_else(|| Error::Rejected(format!("no rule `{rule}` in {}", rules.name)))?;
                F::forall(z.clone(), onestep_body(r, sigma, x, z)?)
            }
            Axiom::Bdpl { subject, op, boxes, index, zs } => {
                bdpl_instance(sig, subject, op, boxes, *index, zs)?
            }
        })
    }
}

fn onestep_parts(rule: &OneStepRule, leaf: &dyn Fn(&SVar) -> Formula, x: &str, z: &str) -> (Formula, Formula) {
    let leaves = |vs: &[SVar]| vs.iter().map(leaf).collect::<Vec<_>>();
    let a = Formula::big_and(rule.premises.iter().map(|p| Formula::sequent(leaves(&p.lhs), leaves(&p.rhs))).collect());
    let atom = |m: &crate::onestep::ModalAtom| {
        Formula::modal(z, m.op.clone(), m.args.iter().map(|v| (x.to_string(), leaf(v))).collect())
    };
    let p = Formula::sequent(
        rule.conclusion.lhs.iter().map(atom).collect(),
        rule.conclusion.rhs.iter().map(atom).collect(),
    );
    (a, p)
}

fn onestep_body(rule: &OneStepRule, sigma: &BTreeMap<SVar, Formula>, x: &str, z: &str) -> Result<Formula> {
    if x == z {
        return Err(Error::Freshness(format!("comprehension variable `{x}` coincides with the subject")));
    }
    if let Some(v) = rule.svars.iter().find(|v| !sigma.contains_key(*v)) {
        return Err(Error::Rejected(format!("substitution undefined on `{v}`")));
    }
    let (a, p) = onestep_parts(rule, &|v| sigma[v].clone(), x, z);
    Ok(Formula::imp(Formula::forall(x, a), p))
}

/// `∀ȳ.∀z.(∀x.Aσ → [σ,x,z]P)`.
pub fn onestep_axiom_instance(
    rule: &OneStepRule,
    sigma: &BTreeMap<SVar, Formula>,
    x: &str,
    z: &str,
    prefix: &[Var],
) -> Result<Formula> {
    Ok(Formula::forall_many(prefix, Formula::forall(z, onestep_body(rule, sigma, x, z)?)))
}

/// The bounded-argument biconditional for box `index` of `subject op boxes`.
pub fn bdpl_instance(
    sig: &Signature,
    subject: &str,
    op: &str,
    boxes: &[(Var, Formula)],
    index: usize,
    zs: &[Var],
) -> Result<Formula> {
    let k = match sig.bound(op, index) {
        Some(Bound::Fin(k)) => k,
        Some(Bound::Inf) => return Err(Error::Unbounded { op: op.into(), arg: index }),
        None => return Err(Error::Undeclared(format!("{op} argument {index}"))),
    };
    if zs.len() != k {
        return Err(Error::Rejected(format!("expected {k} witnesses, got {}", zs.len())));
    }
    let lhs = Formula::modal(subject, op, boxes.to_vec());
    let (y, phi) = &boxes[index];
    let fv = lhs.free_vars();
    for (j, z) in zs.iter().enumerate() {
        if z == y || fv.contains(z) || zs[..j].contains(z) {
            return Err(Error::Freshness(format!("witness `{z}` is not fresh")));
        }
    }
    let insts = zs.iter().map(|z| phi.substitute(z, y)).collect::<Result<Vec<_>>>()?;
    let mut narrowed = boxes.to_vec();
    narrowed[index].1 = Formula::big_or(zs.iter().map(|z| Formula::eq(y.clone(), z.clone())).collect());
    let body = Formula::and(Formula::big_and(insts), Formula::modal(subject, op, narrowed));
    let rhs = zs.iter().rev().fold(body, |acc, z| Formula::exists(z.clone(), acc));
    Ok(Formula::iff(lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomMatch {
    pub prefix: Vec<Var>,
    pub axiom: Axiom,
}

impl AxiomMatch {
    pub fn name(&self) -> &'static str {
        self.axiom.name()
    }

    pub fn formula(&self, sig: &Signature, rules: &RuleSet) -> Result<Formula> {
        Ok(Formula::forall_many(&self.prefix, self.axiom.body(sig, rules)?))
    }
}

impl fmt::Display for AxiomMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match &self.axiom {
            Axiom::Instance { x, z, .. } => write!(f, " [{z}/{x}]"),
            Axiom::Alpha { index, u, .. } => write!(f, " box {index} -> {u}"),
            Axiom::Onestep { rule, x, z, .. } => write!(f, " {rule} x={x} z={z}"),
            Axiom::Bdpl { op, index, zs, .. } => write!(f, " {op}#{index} [{}]", zs.join(",")),
            _ => Ok(()),
        }
    }
}

fn candidates(body: &Formula, prefix: &[Var], sig: &Signature, rules: &RuleSet, bdpl: bool) -> Vec<Axiom> {
    use Formula as F;
    let mut out = Vec::new();
    if let F::Eq(a, b) = body {
        if a == b {
            out.push(Axiom::Refl { x: a.clone() });
        }
        return out;
    }
    let Some((l, r)) = body.as_imp() else {
        return out;
    };
    if let Some((psi, phi)) = r.as_imp() {
        out.push(Axiom::Weaken { phi: phi.clone(), psi: psi.clone() });
    }
    if let (Some((phi, qc)), Some((_, pc))) = (l.as_imp(), r.as_imp()) {
        if let (Some((psi, _)), Some((_, chi))) = (qc.as_imp(), pc.as_imp()) {
            out.push(Axiom::Distribute { phi: phi.clone(), psi: psi.clone(), chi: chi.clone() });
        }
    }
    if *l == F::Bot {
        out.push(Axiom::ExFalso { phi: r.clone() });
    }
    if l.as_not().and_then(F::as_not).is_some() {
        out.push(Axiom::DoubleNeg { phi: r.clone() });
    }
    if let F::Forall(x, phi) = l {
        let mut zs = r.vars();
        zs.insert(x.clone());
        out.extend(zs.into_iter().map(|z| Axiom::Instance { x: x.clone(), phi: (**phi).clone(), z }));
        if let Some((phi, psi)) = phi.as_imp() {
            out.push(Axiom::ForallImp { x: x.clone(), phi: phi.clone(), psi: psi.clone() });
        }
    }
    if let F::Forall(x, phi) = r {
        out.push(Axiom::Vacuous { x: x.clone(), phi: (**phi).clone() });
    }
    if let (F::Eq(x, z), Some((a, b))) = (l, r.as_imp()) {
        let args = |f: &Formula| match f {
            F::Eq(u, v) => Some(("=".to_string(), vec![u.clone(), v.clone()])),
            F::Pred(p, us) => Some((p.clone(), us.clone())),
            _ => None,
        };
        if let (Some((pa, aa)), Some((pb, ab))) = (args(a), args(b)) {
            if pa == pb && aa.len() == ab.len() {
                for pos in (0..aa.len()).filter(|&i| aa[i] == *x && ab[i] == *z) {
                    out.push(Axiom::EqPred { x: x.clone(), z: z.clone(), pred: pa.clone(), args: aa.clone(), pos });
                }
            }
        }
        if let F::Modal { op, boxes, .. } = a {
            out.push(Axiom::EqModal { x: x.clone(), z: z.clone(), op: op.clone(), boxes: boxes.clone() });
        }
    }
    if let (F::Modal { subject, op, boxes }, F::Modal { boxes: rb, .. }) = (l, r) {
        if boxes.len() == rb.len() {
            let differing: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i].0 != rb[i].0).collect();
            let indices = if differing.is_empty() { (0..boxes.len()).collect() } else { differing };
            for index in indices.into_iter().take(1) {
                out.push(Axiom::Alpha {
                    subject: subject.clone(),
                    op: op.clone(),
                    boxes: boxes.clone(),
                    index,
                    u: rb[index].0.clone(),
                });
            }
        }
    }
    if let (Some(z), F::Forall(x, a)) = (prefix.last(), l) {
        for rule in &rules.rules {
            if let Some(sigma) = unify_onestep(rule, x, z, a, r) {
                out.push(Axiom::Onestep { rule: rule.name.clone(), x: x.clone(), z: z.clone(), sigma });
            }
        }
    }
    if bdpl {
        if let Some((F::Modal { subject, op, boxes }, rhs)) = body.as_iff() {
            for index in 0..boxes.len() {
                let Some(Bound::Fin(k)) = sig.bound(op, index) else { continue };
                let mut zs = Vec::new();
                let mut cur = rhs;
                while zs.len() < k {
                    let Some((z, inner)) = cur.as_exists() else { break };
                    zs.push(z.clone());
                    cur = inner;
                }
                out.push(Axiom::Bdpl { subject: subject.clone(), op: op.clone(), boxes: boxes.clone(), index, zs });
            }
        }
    }
    out
}

const META: &str = "?";

fn unify_onestep(rule: &OneStepRule, x: &str, z: &str, a: &Formula, p: &Formula) -> Option<BTreeMap<SVar, Formula>> {
    let (pa, pp) = onestep_parts(rule, &|v| Formula::Pred(format!("{META}{v}"), vec![]), x, z);
    let mut sigma = BTreeMap::new();
    (unify(&pa, a, &mut sigma) && unify(&pp, p, &mut sigma)).then_some(sigma)
}

fn unify(pat: &Formula, t: &Formula, sigma: &mut BTreeMap<SVar, Formula>) -> bool {
    use Formula as F;
    match (pat, t) {
        (F::Pred(m, args), _) if args.is_empty() && m.starts_with(META) => {
            let v = m[META.len()..].to_string();
            match sigma.get(&v) {
                Some(bound) => bound == t,
                None => {
                    sigma.insert(v, t.clone());
                    true
                }
            }
        }
        (F::Imp(a, b), F::Imp(c, d)) => unify(a, c, sigma) && unify(b, d, sigma),
        (F::Forall(x, a), F::Forall(y, b)) => x == y && unify(a, b, sigma),
        (F::Modal { subject: s1, op: o1, boxes: b1 }, F::Modal { subject: s2, op: o2, boxes: b2 }) => {
            s1 == s2
                && o1 == o2
                && b1.len() == b2.len()
                && b1.iter().zip(b2).all(|((y1, f1), (y2, f2))| y1 == y2 && unify(f1, f2, sigma))
        }
        _ => pat == t,
    }
}

/// Every scheme instance `φ` is recognized as, with any universal prefix.
pub fn match_all(f: &Formula, sig: &Signature, rules: &RuleSet, bdpl: bool) -> Vec<AxiomMatch> {
    let mut prefix = Vec::new();
    let mut body = f;
    while let Formula::Forall(y, b) = body {
        prefix.push(y.clone());
        body = b;
    }
    let mut out = Vec::new();
    for axiom in candidates(body, &prefix, sig, rules, bdpl) {
        let mut pre = prefix.clone();
        if matches!(axiom, Axiom::Onestep { .. }) {
            pre.pop();
        }
        let m = AxiomMatch { prefix: pre, axiom };
        if m.formula(sig, rules).is_ok_and(|g| g == *f) && !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

pub fn match_axiom(f: &Formula, sig: &Signature, rules: &RuleSet, bdpl: bool) -> Option<AxiomMatch> {
    match_all(f, sig, rules, bdpl).into_iter().next()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Justification {
    Axiom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Hyp {
        index: usize,
    },
    Mp {
        i: usize,
        j: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HilbertProof {
    pub hypotheses: Vec<Formula>,
    pub steps: Vec<Step>,
}

impl HilbertProof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    /// Appends a step and returns its index.
    pub fn push(&mut self, formula: Formula, just: Justification) -> usize {
        self.steps.push(Step { formula, just });
        self.steps.len() - 1
    }

    pub fn axiom(&mut self, formula: Formula) -> usize {
        self.push(formula, Justification::Axiom { name: None })
    }

    pub fn hyp(&mut self, formula: Formula) -> usize {
        let index = match self.hypotheses.iter().position(|h| *h == formula) {
            Some(i) => i,
            None => {
                self.hypotheses.push(formula.clone());
                self.hypotheses.len() - 1
            }
        };
        self.push(formula, Justification::Hyp { index })
    }

    /// Modus ponens on steps `i : ψ` and `j : ψ → φ`.
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let phi = match self.steps[j].formula.as_imp() {
            Some((_, b)) => b.clone(),
            None => Formula::Bot,
        };
        self.push(phi, Justification::Mp { i, j })
    }

    /// From `i : ∀ȳ.(ψ → φ)` and `j : ∀ȳ.ψ`, derive `∀ȳ.φ` through En3.
    pub fn mp_under(&mut self, prefix: &[Var], i: usize, j: usize) -> usize {
        let Some((y, outer)) = prefix.split_last() else {
            return self.mp(j, i);
        };
        let mut body = &self.steps[i].formula;
        for _ in prefix {
            if let Formula::Forall(_, b) = body {
                body = b;
            }
        }
        let (psi, phi) = body.as_imp().map(|(a, b)| (a.clone(), b.clone())).unwrap_or((Formula::Bot, Formula::Bot));
        let dist = Formula::forall_many(
            outer,
            Formula::imp(
                Formula::forall(y.clone(), Formula::imp(psi.clone(), phi.clone())),
                Formula::imp(Formula::forall(y.clone(), psi), Formula::forall(y.clone(), phi)),
            ),
        );
        let e = self.axiom(dist);
        let k = self.mp_under(outer, e, i);
        self.mp_under(outer, k, j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepDiagnostic {
    pub step: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertReport {
    pub accepted: bool,
    pub conclusion: Option<Formula>,
    pub diagnostics: Vec<StepDiagnostic>,
    pub matches: Vec<Option<AxiomMatch>>,
}

pub fn check_hilbert(proof: &HilbertProof, sig: &Signature, rules: &RuleSet, bdpl: bool) -> HilbertReport {
    let mut diagnostics = Vec::new();
    let mut matches = Vec::new();
    for (k, h) in proof.hypotheses.iter().enumerate() {
        if let Err(e) = sig.check_formula(h) {
            diagnostics.push(StepDiagnostic { step: k, message: format!("hypothesis {k}: {e}") });
        }
    }
    for (k, step) in proof.steps.iter().enumerate() {
        let mut fail = |msg: String| diagnostics.push(StepDiagnostic { step: k, message: msg });
        let mut found = None;
        if let Err(e) = sig.check_formula(&step.formula) {
            fail(e.to_string());
            matches.push(None);
            continue;
        }
        match &step.just {
            Justification::Axiom { name } => {
                let all = match_all(&step.formula, sig, rules, bdpl);
                found = all.iter().find(|m| name.as_deref().is_none_or(|n| n == m.name())).cloned();
                if found.is_none() {
                    match name {
                        Some(n) => fail(format!("not an instance of {n}")),
                        None => fail("not an axiom instance".into()),
                    }
                }
            }
            Justification::Hyp { index } => match proof.hypotheses.get(*index) {
                Some(h) if *h == step.formula => {}
                Some(_) => fail(format!("differs from hypothesis {index}")),
                None => fail(format!("no hypothesis {index}")),
            },
            Justification::Mp { i, j } => {
                if *i >= k || *j >= k {
                    fail(format!("modus ponens cites {i}, {j}, not both earlier"));
                } else {
                    let (a, b) = (&proof.steps[*i].formula, &proof.steps[*j].formula);
                    let fits = |ant: &Formula, imp: &Formula| {
                        imp.as_imp().is_some_and(|(p, q)| p == ant && *q == step.formula)
                    };
                    if !fits(a, b) && !fits(b, a) {
                        fail(format!("modus ponens on {i}, {j} does not yield this formula"));
                    }
                }
            }
        }
        matches.push(found);
    }
    HilbertReport {
        accepted: diagnostics.is_empty() && !proof.steps.is_empty(),
        conclusion: proof.conclusion().cloned(),
        diagnostics,
        matches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onestep::{congruence_rule, k_rule, preset_rules};
    use crate::syntax::{parse_formula, render_formula};

    fn sig() -> Signature {
        Signature::new()
            .with_op("dia", 1, vec![Bound::Fin(1)])
            .with_op("box", 1, vec![Bound::Inf])
            .with_op("g1", 1, vec![Bound::Fin(2)])
            .with_pred("P", 1)
            .with_pred("Q", 1)
    }

    fn names(f: &str, bdpl: bool) -> Vec<&'static str> {
        let s = sig();
        let rules = preset_rules("K", 2).unwrap();
        match_all(&parse_formula(f, &s).unwrap(), &s, &rules, bdpl).iter().map(AxiomMatch::name).collect()
    }

    #[test]
    fn scheme_examples() {
        assert!(names("forall y. ((forall x. P(x)) -> P(z))", false).contains(&"En2"));
        let s = sig();
        let m = match_axiom(&parse_formula("forall y. ((forall x. P(x)) -> P(z))", &s).unwrap(), &s, &preset_rules("C", 1).unwrap(), false)
            .unwrap();
        assert_eq!(m.to_string(), "En2 [z/x]");
        assert_eq!(names("x = x", false), vec!["En5"]);
        assert!(names("forall x. (P(x) -> (Q(x) -> P(x)))", false).contains(&"En1"));
        assert!(names("bot -> P(x)", false).contains(&"En1"));
        assert!(names("~~P(x) -> P(x)", false).contains(&"En1"));
        assert!(names("(P(x) -> (Q(x) -> P(x))) -> ((P(x) -> Q(x)) -> (P(x) -> P(x)))", false).contains(&"En1"));
        assert!(names("(forall x. (P(x) -> Q(x))) -> ((forall x. P(x)) -> forall x. Q(x))", false).contains(&"En3"));
        assert_eq!(names("P(y) -> forall x. P(y)", false), vec!["En4"]);
        assert!(names("P(x) -> forall x. P(x)", false).is_empty());
        assert_eq!(names("x = z -> (P(x) -> P(z))", false), vec!["En6.1"]);
        assert!(names("x = z -> (x = x -> z = x)", false).contains(&"En6.1"));
        assert_eq!(names("x = z -> (x dia [y : P(y)] -> z dia [y : P(y)])", false), vec!["En6.2"]);
        assert_eq!(names("x dia [y : P(y)] -> x dia [u : P(u)]", false), vec!["Alpha"]);
        assert!(names("x dia [y : P(y)] -> x dia [z : P(x) ]", false).is_empty());
        assert!(names("x dia [y : P(u)] -> x dia [u : P(u)]", false).is_empty());
    }

    #[test]
    fn instantiation_requires_substitutability() {
        assert!(!names("(forall x. forall y. x = y) -> forall y. y = y", false).contains(&"En2"));
        assert!(names("(forall x. forall y. x = y) -> forall y. z = y", false).contains(&"En2"));
    }

    #[test]
    fn onestep_instances() {
        let s = sig();
        let c = congruence_rule("box");
        let sigma: BTreeMap<SVar, Formula> =
            [("p".to_string(), Formula::pred("P", &["x"])), ("q".to_string(), Formula::pred("Q", &["x"]))].into();
        let f = onestep_axiom_instance(&c, &sigma, "x", "z", &[]).unwrap();
        let expect = parse_formula(
            "forall z. ((forall x. ((P(x) -> Q(x)) /\\ (Q(x) -> P(x)))) -> (z box [x : P(x)] -> z box [x : Q(x)]))",
            &s,
        )
        .unwrap();
        assert_eq!(f, expect);
        assert!(f.free_vars().is_empty());
        let rules = preset_rules("C", 1).unwrap();
        let m = match_axiom(&f, &s, &rules, false).unwrap();
        assert_eq!(m.name(), "Onestep");
        assert!(m.prefix.is_empty());

        let k0 = k_rule(0);
        let sigma: BTreeMap<SVar, Formula> = [("p0".to_string(), Formula::pred("P", &["x"]))].into();
        let f = onestep_axiom_instance(&k0, &sigma, "x", "z", &["w".into()]).unwrap();
        assert_eq!(render_formula(&f), "forall w. forall z. ((forall x. ~P(x)) -> ~z dia [x : P(x)])");
        assert_eq!(names(&render_formula(&f), false), vec!["Onestep"]);
        assert!(onestep_axiom_instance(&k0, &sigma, "x", "x", &[]).is_err());
    }

    #[test]
    fn bdpl_instances() {
        let s = sig();
        let phi = Formula::pred("P", &["y"]);
        let f = bdpl_instance(&s, "x", "dia", &[("y".into(), phi.clone())], 0, &["z".into()]).unwrap();
        assert_eq!(render_formula(&f), "(x dia [y : P(y)] <-> exists z. (P(z) /\\ x dia [y : y = z]))");
        let g = bdpl_instance(&s, "x", "g1", &[("y".into(), phi.clone())], 0, &["z1".into(), "z2".into()]).unwrap();
        assert_eq!(
            render_formula(&g),
            "(x g1 [y : P(y)] <-> exists z1. exists z2. ((P(z1) /\\ P(z2)) /\\ x g1 [y : (y = z1 \\/ y = z2)]))"
        );
        assert!(matches!(
            bdpl_instance(&s, "x", "box", &[("y".into(), phi.clone())], 0, &[]),
            Err(Error::Unbounded { .. })
        ));
        assert!(matches!(
            bdpl_instance(&s, "x", "dia", &[("y".into(), phi)], 0, &["x".into()]),
            Err(Error::Freshness(_))
        ));
        assert_eq!(names(&render_formula(&f), true), vec!["BdPL"]);
        assert!(names(&render_formula(&f), false).is_empty());
        assert_eq!(names(&render_formula(&g), true), vec!["BdPL"]);
    }

    fn step(f: &str, just: Justification) -> Step {
        Step { formula: parse_formula(f, &sig()).unwrap(), just }
    }

    #[test]
    fn checker_accepts_and_rejects() {
        let s = sig();
        let rules = preset_rules("K", 1).unwrap();
        let ax = Justification::Axiom { name: None };
        let proof = HilbertProof {
            hypotheses: vec![parse_formula("P(x)", &s).unwrap()],
            steps: vec![
                step("P(x)", Justification::Hyp { index: 0 }),
                step("P(x) -> (Q(x) -> P(x))", ax.clone()),
                step("Q(x) -> P(x)", Justification::Mp { i: 0, j: 1 }),
            ],
        };
        assert!(check_hilbert(&proof, &s, &rules, false).accepted);
        let mut bad = proof.clone();
        bad.steps[2] = step("Q(x) -> Q(x)", Justification::Mp { i: 0, j: 1 });
        let report = check_hilbert(&bad, &s, &rules, false);
        assert!(!report.accepted);
        assert_eq!(report.diagnostics[0].step, 2);
        let mut named = proof.clone();
        named.steps[1].just = Justification::Axiom { name: Some("En2".into()) };
        assert!(!check_hilbert(&named, &s, &rules, false).accepted);
    }
}

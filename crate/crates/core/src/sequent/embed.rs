use std::collections::BTreeMap;

use super::absorb::{candidate_rules, derive_by_absorption, derive_congruence};
use super::prove::prove_with;
use super::{minus, plus, prove_propositional, remove_n, Proof, Sequent};
use crate::error::{Error, Result};
use crate::hilbert::{bdpl_instance, check_hilbert, Axiom, AxiomMatch, HilbertProof, Justification};
use crate::onestep::{ModalAtom, OneStepRule, RuleSet, SVar};
use crate::syntax::{fresh_var, Formula, Signature, Var};

fn unprovable(what: &str) -> Error {
    Error::Rejected(format!("no derivation found for {what}"))
}

fn propositional(s: &Sequent) -> Result<Proof> {
    prove_propositional(s).ok_or_else(|| unprovable(&s.to_string()))
}

/// A derivation of `=> phi` for an axiom instance. BdPL needs Paste.
pub fn axiom_to_sequent(m: &AxiomMatch, sig: &Signature, rules: &RuleSet, paste: bool) -> Result<Proof> {
    let body = m.axiom.body(sig, rules)?;
    let mut p = match &m.axiom {
        Axiom::Weaken { .. } | Axiom::Distribute { .. } | Axiom::ExFalso { .. } | Axiom::DoubleNeg { .. } => {
            propositional(&Sequent::new(vec![], vec![body.clone()]))?
        }
        Axiom::Instance { x, phi, z } => {
            let inst = phi.substitute(z, x)?;
            let p = Proof::lall(Proof::ax(inst.clone()), x, phi, z)?;
            Proof::rimp(p, &Formula::forall(x.clone(), phi.clone()), &inst)?
        }
        Axiom::ForallImp { x, phi, psi } => {
            let imp = Formula::imp(phi.clone(), psi.clone());
            let p = propositional(&Sequent::new(vec![imp.clone(), phi.clone()], vec![psi.clone()]))?;
            let p = Proof::lall(p, x, phi, x)?;
            let p = Proof::lall(p, x, &imp, x)?;
            let p = Proof::rall(p, x, psi, x)?;
            let (a, b, c) = (Formula::forall(x.clone(), imp), Formula::forall(x.clone(), phi.clone()), Formula::forall(x.clone(), psi.clone()));
            let p = Proof::rimp(p, &b, &c)?;
            Proof::rimp(p, &a, &Formula::imp(b, c))?
        }
        Axiom::Vacuous { x, phi } => {
            let p = Proof::rall(Proof::ax(phi.clone()), x, phi, x)?;
            Proof::rimp(p, phi, &Formula::forall(x.clone(), phi.clone()))?
        }
        Axiom::Refl { x } => Proof::req(x),
        Axiom::EqPred { .. } | Axiom::EqModal { .. } => replacement(&body)?,
        Axiom::Alpha { subject, op, boxes, index, u } => {
            let lhs = Formula::modal(subject.clone(), op.clone(), boxes.clone());
            let rhs = lhs.rename_box(&[*index], u)?;
            let Formula::Modal { boxes: renamed, .. } = &rhs else { unreachable!("renaming keeps the shape") };
            let p = derive_congruence(subject, op, boxes, renamed, &Sequent::default(), rules, &mut |_, s| propositional(s))?;
            Proof::rimp(p, &lhs, &rhs)?
        }
        Axiom::Onestep { rule, x, z, sigma } => onestep(&body, rules, rule, x, z, sigma)?,
        Axiom::Bdpl { subject, op, boxes, index, zs } => {
            if !paste {
                return Err(Error::UnsupportedAxiom("BdPL is derivable only with Paste".into()));
            }
            bdpl(sig, rules, subject, op, boxes, *index, zs)?
        }
    };
    let mut f = body;
    for v in m.prefix.iter().rev() {
        p = Proof::rall(p, v, &f, v)?;
        f = Formula::forall(v.clone(), f);
    }
    Ok(p)
}

/// `=> x = z -> (A -> B)` where `B` moves one occurrence of `x` in `A` to `z`.
fn replacement(body: &Formula) -> Result<Proof> {
    let (eq, rest) = body.as_imp().ok_or_else(|| unprovable("replacement"))?;
    let (a, b) = rest.as_imp().ok_or_else(|| unprovable("replacement"))?;
    let Formula::Eq(x, z) = eq else { return Err(unprovable("replacement")) };
    let w = fresh_var(&body.vars());
    let pattern_a = match (a, b) {
        (Formula::Pred(p, args), Formula::Pred(_, moved)) => {
            Formula::Pred(p.clone(), args.iter().zip(moved).map(|(s, t)| if s != t { w.clone() } else { s.clone() }).collect())
        }
        (Formula::Eq(s0, s1), Formula::Eq(t0, t1)) => {
            let pick = |s: &Var, t: &Var| if s != t { w.clone() } else { s.clone() };
            Formula::Eq(pick(s0, t0), pick(s1, t1))
        }
        (Formula::Modal { op, boxes, .. }, _) => Formula::modal(w.clone(), op.clone(), boxes.clone()),
        _ => return Err(unprovable("replacement")),
    };
    let pattern = Sequent::new(vec![pattern_a], vec![b.clone()]);
    let p = Proof::lw(Proof::ax(b.clone()), eq);
    let p = Proof::leq(true, p, x, z, &w, pattern)?;
    let p = Proof::rimp(p, a, b)?;
    Proof::rimp(p, eq, rest)
}

fn onestep(body: &Formula, rules: &RuleSet, rule: &str, x: &str, z: &str, sigma: &BTreeMap<SVar, Formula>) -> Result<Proof> {
    let r = rules.resolve(rule).ok_or_else(|| unprovable(rule))?;
    let Formula::Forall(_, inner) = body else { return Err(unprovable("Onestep")) };
    let (all_a, _) = inner.as_imp().ok_or_else(|| unprovable("Onestep"))?;
    let Formula::Forall(_, a) = all_a else { return Err(unprovable("Onestep")) };
    let atom = |m: &ModalAtom| Formula::modal(z, m.op.clone(), m.args.iter().map(|v| (x.to_string(), sigma[v].clone())).collect());
    let atoms_l: Vec<Formula> = r.conclusion.lhs.iter().map(atom).collect();
    let atoms_r: Vec<Formula> = r.conclusion.rhs.iter().map(atom).collect();
    let mut hook = |leaf: &Sequent| -> Option<Proof> {
        let ctx = Sequent::new(minus(&leaf.lhs, &atoms_l)?, minus(&leaf.rhs, &atoms_r)?);
        let rest = remove_n(&ctx.lhs, all_a, 1)?;
        let mut avoid = a.vars();
        leaf.collect_vars(&mut avoid);
        avoid.insert(x.to_string());
        let y = fresh_var(&avoid);
        let a_y = a.substitute(&y, x).ok()?;
        let inst = |vs: &[SVar]| vs.iter().map(|v| sigma[v].substitute(&y, x)).collect::<Result<Vec<_>>>();
        let mut premises = Vec::new();
        for p in &r.premises {
            let s = Sequent::new(plus(&plus(&rest, &[a_y.clone()]), &inst(&p.lhs).ok()?), plus(&inst(&p.rhs).ok()?, &ctx.rhs));
            let q = prove_propositional(&s)?;
            premises.push(Proof::lall(q, x, a, &y).ok()?);
        }
        Some(Proof::modal(&r, plus(&atoms_l, &atoms_r), &y, &ctx, premises))
    };
    let p = prove_with(&Sequent::new(vec![], vec![inner.as_ref().clone()]), &[], &mut hook).ok_or_else(|| unprovable("Onestep"))?;
    Proof::rall(p, z, inner, z)
}

/// BdPL through Paste (left to right) and an absorbed monotonicity step
/// (right to left).
fn bdpl(sig: &Signature, rules: &RuleSet, subject: &str, op: &str, boxes: &[(Var, Formula)], index: usize, zs: &[Var]) -> Result<Proof> {
    let body = bdpl_instance(sig, subject, op, boxes, index, zs)?;
    let atom = Formula::modal(subject, op, boxes.to_vec());
    let (y, phi) = &boxes[index];
    let insts = zs.iter().map(|z| phi.substitute(z, y)).collect::<Result<Vec<_>>>()?;
    let mut narrowed_boxes = boxes.to_vec();
    narrowed_boxes[index].1 = Formula::big_or(zs.iter().map(|z| Formula::eq(y.clone(), z.clone())).collect());
    let narrowed = Formula::modal(subject, op, narrowed_boxes.clone());
    let opaque = plus(&insts, &[atom.clone(), narrowed.clone()]);
    let mut search = BdplSearch { rules, atom: &atom, narrowed: &narrowed, narrowed_boxes: &narrowed_boxes, boxes, index, zs, insts: &insts, opaque: &opaque, error: None };
    let p = search.prove(&Sequent::new(vec![], vec![body]));
    match (p, search.error) {
        (Some(p), _) => Ok(p),
        (None, Some(e)) => Err(e),
        (None, None) => Err(unprovable("BdPL")),
    }
}

struct BdplSearch<'a> {
    rules: &'a RuleSet,
    atom: &'a Formula,
    narrowed: &'a Formula,
    narrowed_boxes: &'a [(Var, Formula)],
    boxes: &'a [(Var, Formula)],
    index: usize,
    zs: &'a [Var],
    insts: &'a [Formula],
    opaque: &'a [Formula],
    error: Option<Error>,
}

impl BdplSearch<'_> {
    fn prove(&mut self, s: &Sequent) -> Option<Proof> {
        let opaque = self.opaque.to_vec();
        prove_with(s, &opaque, &mut |leaf| self.leaf(leaf))
    }

    fn leaf(&mut self, leaf: &Sequent) -> Option<Proof> {
        if leaf.lhs.contains(self.atom) && !leaf.lhs.contains(self.narrowed) {
            let mut lhs = remove_n(&leaf.lhs, self.atom, 1)?;
            lhs.push(self.narrowed.clone());
            lhs.extend(self.insts.iter().cloned());
            let p = self.prove(&Sequent::new(lhs, leaf.rhs.clone()))?;
            return Proof::paste(p, self.atom, self.index, self.zs).ok();
        }
        let bound = |f: &Formula| matches!(f, Formula::Forall(v, _) if self.zs.contains(v));
        if let Some(f) = leaf.lhs.iter().find(|f| bound(f)) {
            let Formula::Forall(v, b) = f else { unreachable!() };
            let mut lhs = remove_n(&leaf.lhs, f, 1)?;
            lhs.push(b.as_ref().clone());
            let p = self.prove(&Sequent::new(lhs, leaf.rhs.clone()))?;
            return Proof::lall(p, v, b, v).ok();
        }
        if let Some(f) = leaf.rhs.iter().find(|f| bound(f)) {
            let Formula::Forall(v, b) = f else { unreachable!() };
            let mut rhs = remove_n(&leaf.rhs, f, 1)?;
            if leaf.free_vars().contains(v) {
                return None;
            }
            rhs.push(b.as_ref().clone());
            let p = self.prove(&Sequent::new(leaf.lhs.clone(), rhs))?;
            return Proof::rall(p, v, b, v).ok();
        }
        if leaf.lhs.contains(self.narrowed) && leaf.rhs.contains(self.atom) && minus(&leaf.lhs, self.insts).is_some() {
            return match self.monotone(leaf) {
                Ok(p) => Some(p),
                Err(e) => {
                    self.error = Some(e);
                    None
                }
            };
        }
        None
    }

    /// `narrowed, insts => atom` through a rule absorbing monotonicity.
    fn monotone(&self, leaf: &Sequent) -> Result<Proof> {
        let ctx = Sequent::new(
            remove_n(&leaf.lhs, self.narrowed, 1).expect("present"),
            remove_n(&leaf.rhs, self.atom, 1).expect("present"),
        );
        let Formula::Modal { subject, op, .. } = self.atom else { unreachable!("modal atom") };
        let (y, phi) = &self.boxes[self.index];
        let zs = self.zs;
        let mut supply = |_: usize, s: &Sequent| -> Result<Proof> {
            let targets: Vec<Formula> = s.rhs.clone();
            let mut eq_leaf = |leaf: &Sequent| -> Option<Proof> {
                for f in &leaf.lhs {
                    let Formula::Eq(v, b) = f else { continue };
                    if !zs.contains(b) {
                        continue;
                    }
                    let from = phi.substitute(b, y).ok()?;
                    let to = phi.substitute(v, y).ok()?;
                    if !leaf.lhs.contains(&from) || !leaf.rhs.contains(&to) {
                        continue;
                    }
                    let mut avoid = leaf.free_vars();
                    phi.collect_vars(&mut avoid);
                    avoid.insert(y.clone());
                    let w = fresh_var(&avoid);
                    let mut lhs = remove_n(&leaf.lhs, f, 1)?;
                    lhs = remove_n(&lhs, &from, 1)?;
                    lhs.push(phi.substitute(&w, y).ok()?);
                    let pattern = Sequent::new(lhs, leaf.rhs.clone());
                    let prem = Sequent::new(vec![f.clone()], vec![]).join(&pattern.substitute(v, &w).ok()?);
                    let p = prove_propositional(&prem)?;
                    return Proof::leq(false, p, v, b, &w, pattern).ok();
                }
                None
            };
            let mut opaque = self.insts.to_vec();
            opaque.extend(targets);
            prove_with(s, &opaque, &mut eq_leaf).ok_or_else(|| unprovable(&s.to_string()))
        };
        match derive_by_absorption(subject, op, self.narrowed_boxes, self.boxes, Some(self.index), &ctx, self.rules, &mut supply) {
            Err(e @ Error::AbsorptionFailure { .. }) => {
                monotone_by_cut(subject, op, self.narrowed_boxes, self.boxes, &ctx, self.rules, &mut supply).ok_or(e)
            }
            other => other,
        }
    }
}

/// Monotonicity through a rule whose conclusion has surplus right atoms,
/// instantiated with `bot` and each cut against a rule refuting it.
fn monotone_by_cut(
    subject: &str,
    op: &str,
    boxes0: &[(Var, Formula)],
    boxes1: &[(Var, Formula)],
    ctx: &Sequent,
    rules: &RuleSet,
    supply: &mut dyn FnMut(usize, &Sequent) -> Result<Proof>,
) -> Option<Proof> {
    let candidates = candidate_rules(rules, rules.bound);
    let mut avoid = ctx.free_vars();
    for (v, f) in boxes0.iter().chain(boxes1) {
        avoid.insert(v.clone());
        f.collect_vars(&mut avoid);
    }
    avoid.insert(subject.to_string());
    let y = fresh_var(&avoid);
    let lhs_atom = Formula::modal(subject, op, boxes0.to_vec());
    let rhs_atom = Formula::modal(subject, op, boxes1.to_vec());
    let empty = |a: &ModalAtom| Formula::modal(subject, a.op.clone(), a.args.iter().map(|_| (y.clone(), Formula::Bot)).collect());
    for r in &candidates {
        let [la] = r.conclusion.lhs.as_slice() else { continue };
        if la.op != op || la.args.len() != boxes0.len() {
            continue;
        }
        for (ri, ra) in r.conclusion.rhs.iter().enumerate() {
            if ra.op != op || ra.args.len() != boxes1.len() {
                continue;
            }
            let mut sigma: BTreeMap<&str, Formula> = r.svars.iter().map(|v| (v.as_str(), Formula::Bot)).collect();
            for (a, bx) in [(la, boxes0), (ra, boxes1)] {
                for (v, (x, f)) in a.args.iter().zip(bx) {
                    sigma.insert(v, f.substitute(&y, x).ok()?);
                }
            }
            let extra: Vec<Formula> = r.conclusion.rhs.iter().enumerate().filter(|(j, _)| *j != ri).map(|(_, a)| empty(a)).collect();
            let refutations: Option<Vec<Proof>> = r.conclusion.rhs.iter().enumerate().filter(|(j, _)| *j != ri).map(|(_, a)| refute(a, &empty(a), &candidates, &y)).collect();
            let Some(refutations) = refutations else { continue };
            let inst = |vs: &[SVar]| vs.iter().map(|v| sigma[v.as_str()].clone()).collect::<Vec<_>>();
            let premises: Option<Vec<Proof>> = r
                .premises
                .iter()
                .enumerate()
                .map(|(k, p)| supply(k, &Sequent::new(plus(&ctx.lhs, &inst(&p.lhs)), plus(&inst(&p.rhs), &ctx.rhs))).ok())
                .collect();
            let Some(premises) = premises else { continue };
            let mut principal = vec![lhs_atom.clone()];
            principal.extend(r.conclusion.rhs.iter().enumerate().map(|(j, a)| if j == ri { rhs_atom.clone() } else { empty(a) }));
            let mut node = Proof::modal(r, principal, &y, ctx, premises);
            for (e, refutation) in extra.iter().zip(refutations) {
                node = Proof::cut(node, refutation, e).ok()?;
            }
            return Some(node);
        }
    }
    None
}

/// A proof of `atom =>` for an atom whose arguments are all `bot`.
fn refute(a: &ModalAtom, atom: &Formula, candidates: &[OneStepRule], y: &str) -> Option<Proof> {
    candidates.iter().find_map(|r| {
        let [la] = r.conclusion.lhs.as_slice() else { return None };
        if !r.conclusion.rhs.is_empty() || la.op != a.op || la.args.len() != a.args.len() {
            return None;
        }
        let bots = |vs: &[SVar]| vec![Formula::Bot; vs.len()];
        let premises = r.premises.iter().map(|p| prove_propositional(&Sequent::new(bots(&p.lhs), bots(&p.rhs)))).collect::<Option<Vec<_>>>()?;
        Some(Proof::modal(r, vec![atom.clone()], y, &Sequent::default(), premises))
    })
}

/// The cut-based embedding: axioms through `axiom_to_sequent`, modus ponens
/// through two cuts. Hypotheses are not supported.
pub fn hilbert_to_sequent(h: &HilbertProof, sig: &Signature, rules: &RuleSet, paste: bool) -> Result<Proof> {
    let report = check_hilbert(h, sig, rules, true);
    if let Some(d) = report.diagnostics.first() {
        return Err(Error::Rejected(format!("step {}: {}", d.step, d.message)));
    }
    let mut proofs: Vec<Proof> = Vec::with_capacity(h.steps.len());
    for (k, step) in h.steps.iter().enumerate() {
        let p = match &step.just {
            Justification::Axiom { .. } => {
                let m = report.matches[k].as_ref().ok_or_else(|| unprovable("axiom"))?;
                axiom_to_sequent(m, sig, rules, paste)?
            }
            Justification::Hyp { .. } => return Err(Error::Rejected("hypotheses cannot be embedded".into())),
            Justification::Mp { i, j } => {
                let (fi, fj) = (&h.steps[*i].formula, &h.steps[*j].formula);
                let (ant, imp) = if fj.as_imp() == Some((fi, &step.formula)) { (*i, *j) } else { (*j, *i) };
                modus_ponens(proofs[ant].clone(), proofs[imp].clone(), &h.steps[ant].formula, &step.formula)?
            }
        };
        proofs.push(p);
    }
    proofs.pop().ok_or_else(|| Error::Rejected("empty proof".into()))
}

fn modus_ponens(ant: Proof, imp: Proof, psi: &Formula, phi: &Formula) -> Result<Proof> {
    let f = Formula::imp(psi.clone(), phi.clone());
    let lp = propositional(&Sequent::new(vec![f.clone(), psi.clone()], vec![phi.clone()]))?;
    let inner = Proof::cut(imp, lp, &f)?;
    Proof::cut(ant, inner, psi)
}

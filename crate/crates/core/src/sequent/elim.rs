use std::collections::{BTreeMap, BTreeSet};

use super::absorb::find_absorption;
use super::subst::{fresh, subst_in};
use super::{adjust_to, count, cut_conclusion, minus, plus, Label, Proof, Sequent};
use crate::error::{Error, Result};
use crate::onestep::{ModalAtom, OneStepRule, RuleSet, SVar};
use crate::syntax::{render_formula, Formula, Var};

/// How often each reduction case fired: axioms, structural rules,
/// non-principal cut formula, logical principal, modal principal, equality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ElimStats {
    pub cases: [usize; 6],
}

/// Removes every Cut and Mcut from `proof`, topmost first. Each multicut
/// between cut-free derivations is reduced by recursion on the cut
/// formula's complexity and the premises' heights.
pub fn eliminate_mcut(proof: &Proof, rules: &RuleSet) -> Result<(Proof, ElimStats)> {
    let mut e = Elim { rules, stats: ElimStats::default(), avoid: proof.all_vars() };
    let p = e.walk(proof)?;
    Ok((p, e.stats))
}

struct Elim<'a> {
    rules: &'a RuleSet,
    stats: ElimStats,
    avoid: BTreeSet<Var>,
}

fn internal(msg: &str) -> Error {
    Error::Rejected(format!("cut elimination: {msg}"))
}

fn resolve(rules: &RuleSet, p: &Proof) -> Result<OneStepRule> {
    let name = p.rule.rule.as_deref().unwrap_or_default();
    rules.resolve(name).ok_or_else(|| internal(&format!("unknown rule `{name}`")))
}

impl Elim<'_> {
    fn walk(&mut self, p: &Proof) -> Result<Proof> {
        let premises = p.premises.iter().map(|q| self.walk(q)).collect::<Result<Vec<_>>>()?;
        match p.rule.label {
            Label::Cut | Label::Mcut => {
                let f = p.rule.principal.first().ok_or_else(|| internal("cut without formula"))?;
                let (l, r) = (&premises[0].conclusion, &premises[1].conclusion);
                let m = count(&l.rhs, f) + count(&r.rhs, f) - count(&p.conclusion.rhs, f);
                let n = count(&l.lhs, f) + count(&r.lhs, f) - count(&p.conclusion.lhs, f);
                self.reduce(f, m, n, &premises[0], &premises[1])
            }
            _ => Ok(Proof { conclusion: p.conclusion.clone(), rule: p.rule.clone(), premises }),
        }
    }

    fn subst(&mut self, p: &Proof, t: &str, x: &str) -> Result<Proof> {
        subst_in(p, t, x, &mut self.avoid)
    }

    /// Renames the eigenvariable or Paste witnesses of `p` away from `clash`.
    fn refresh(&mut self, p: &Proof, clash: &BTreeSet<Var>) -> Result<Proof> {
        let mut p = p.clone();
        let olds: Vec<Var> = match p.rule.label {
            Label::RAll | Label::Modal => p.rule.eigen.iter().cloned().collect(),
            Label::Paste => p.rule.subst.clone(),
            _ => vec![],
        };
        for old in olds.into_iter().filter(|v| clash.contains(v)) {
            let new = fresh(&mut self.avoid);
            p.premises = p.premises.iter().map(|q| self.subst(q, &new, &old)).collect::<Result<_>>()?;
            if p.rule.label == Label::Paste {
                p.rule.subst.iter_mut().filter(|z| **z == old).for_each(|z| *z = new.clone());
            } else {
                p.rule.eigen = Some(new);
            }
        }
        Ok(p)
    }

    /// Number of copies of `f` among the right principal formulas of `p`.
    fn principal_right(&self, p: &Proof, f: &Formula) -> Result<usize> {
        Ok(match p.rule.label {
            Label::RImp | Label::RAll => usize::from(p.rule.principal[0] == *f),
            Label::Modal => count(&p.rule.principal[resolve(self.rules, p)?.conclusion.lhs.len()..], f),
            _ => 0,
        })
    }

    fn principal_left(&self, p: &Proof, f: &Formula) -> Result<usize> {
        Ok(match p.rule.label {
            Label::LImp | Label::LAll | Label::Paste => usize::from(p.rule.principal[0] == *f),
            Label::Modal => count(&p.rule.principal[..resolve(self.rules, p)?.conclusion.lhs.len()], f),
            _ => 0,
        })
    }

    /// A cut-free proof of the multicut of `m` right copies of `f` in `l`
    /// against `n` left copies in `r`.
    fn reduce(&mut self, f: &Formula, m: usize, n: usize, l: &Proof, r: &Proof) -> Result<Proof> {
        let target = cut_conclusion(&l.conclusion, &r.conclusion, f, m, n)?;
        let (ll, rl) = (l.rule.label, r.rule.label);
        let logical = |x: Label| matches!(x, Label::RImp | Label::RAll | Label::LImp | Label::LAll | Label::Modal | Label::Paste);
        if ll == Label::Ax || rl == Label::Ax {
            self.stats.cases[0] += 1;
            return adjust_to(if ll == Label::Ax { r.clone() } else { l.clone() }, &target);
        }
        if ll.is_structural() {
            self.stats.cases[1] += 1;
            let (g, p) = (&l.rule.principal[0], &l.premises[0]);
            let x = match ll {
                Label::RW if g == f && m == 1 => p.clone(),
                Label::RW if g == f => self.reduce(f, m - 1, n, p, r)?,
                Label::RC if g == f => self.reduce(f, m + 1, n, p, r)?,
                _ => self.reduce(f, m, n, p, r)?,
            };
            return adjust_to(x, &target);
        }
        if rl.is_structural() {
            self.stats.cases[1] += 1;
            let (g, p) = (&r.rule.principal[0], &r.premises[0]);
            let x = match rl {
                Label::LW if g == f && n == 1 => p.clone(),
                Label::LW if g == f => self.reduce(f, m, n - 1, l, p)?,
                Label::LC if g == f => self.reduce(f, m, n + 1, l, p)?,
                _ => self.reduce(f, m, n, l, p)?,
            };
            return adjust_to(x, &target);
        }
        if logical(ll) && self.principal_right(l, f)? == 0 {
            self.stats.cases[2] += 1;
            let l = self.refresh(l, &r.conclusion.free_vars())?;
            let premises = l.premises.iter().map(|q| self.reduce(f, m, n, q, r)).collect::<Result<Vec<_>>>()?;
            return Ok(Proof { conclusion: target, rule: l.rule, premises });
        }
        if logical(rl) && self.principal_left(r, f)? == 0 {
            self.stats.cases[2] += 1;
            let r = self.refresh(r, &l.conclusion.free_vars())?;
            let premises = r.premises.iter().map(|q| self.reduce(f, m, n, l, q)).collect::<Result<Vec<_>>>()?;
            return Ok(Proof { conclusion: target, rule: r.rule, premises });
        }
        if matches!(ll, Label::LEq1 | Label::LEq2) {
            self.stats.cases[5] += 1;
            return self.equality(f, m, n, l, r, true, &target);
        }
        if matches!(rl, Label::LEq1 | Label::LEq2) {
            self.stats.cases[5] += 1;
            return self.equality(f, m, n, l, r, false, &target);
        }
        match (ll, rl) {
            (Label::RImp, Label::LImp) | (Label::RAll, Label::LAll) => {
                self.stats.cases[3] += 1;
                self.logical_principal(f, m, n, l, r, &target)
            }
            (Label::Modal, Label::Modal) => {
                self.stats.cases[4] += 1;
                self.modal(f, m, n, l, r, &target)
            }
            _ => Err(internal(&format!("no reduction for {} against {} on `{}`", ll.name(), rl.name(), render_formula(f)))),
        }
    }

    /// L= on either side: move to `[y/x]`, cut there, and restore with L=.
    #[allow(clippy::too_many_arguments)]
    fn equality(&mut self, f: &Formula, m: usize, n: usize, l: &Proof, r: &Proof, left: bool, target: &Sequent) -> Result<Proof> {
        let node = if left { l } else { r };
        let e = node.rule.eq.clone().ok_or_else(|| internal("L= without equality"))?;
        let (x, y) = (e.x.as_str(), e.y.as_str());
        if x == y {
            let x = if left { self.reduce(f, m, n, &node.premises[0], r)? } else { self.reduce(f, m, n, l, &node.premises[0])? };
            return adjust_to(x, target);
        }
        let eqf = Formula::eq(x, y);
        if !left && *f == eqf {
            return Err(internal("cut on the context equality of L= against a non-reflexivity proof"));
        }
        let (ls, rs) = if left {
            (self.subst(&l.premises[0], y, x)?, self.subst(r, y, x)?)
        } else {
            (self.subst(l, y, x)?, self.subst(&r.premises[0], y, x)?)
        };
        let inner = self.reduce(&f.substitute(y, x)?, m, n, &ls, &rs)?;
        let moved = target.substitute(y, x)?;
        if inner.conclusion != moved {
            return Err(internal("substituted multicut does not match"));
        }
        let w = fresh(&mut self.avoid);
        let pattern = target.replace_free(&w, x);
        let p = Proof::leq(true, Proof::lw(inner, &eqf), x, y, &w, pattern)?;
        Proof::lc(p, &eqf)
    }

    fn logical_principal(&mut self, f: &Formula, m: usize, n: usize, l: &Proof, r: &Proof, target: &Sequent) -> Result<Proof> {
        let t = target;
        let with = |extra_l: &[Formula], extra_r: &[Formula]| Sequent::new(plus(&t.lhs, extra_l), plus(&t.rhs, extra_r));
        let lp = &l.premises[0];
        match f {
            Formula::Imp(a, b) => {
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                let e1 = if m > 1 { self.reduce(f, m - 1, n, lp, r)? } else { lp.clone() };
                let e1 = adjust_to(e1, &with(std::slice::from_ref(&a), std::slice::from_ref(&b)))?;
                let (r0, r1) = (&r.premises[0], &r.premises[1]);
                let e2 = if n > 1 { self.reduce(f, m, n - 1, l, r0)? } else { r0.clone() };
                let e2 = adjust_to(e2, &with(&[], std::slice::from_ref(&a)))?;
                let e3 = if n > 1 { self.reduce(f, m, n - 1, l, r1)? } else { r1.clone() };
                let e3 = adjust_to(e3, &with(std::slice::from_ref(&b), &[]))?;
                let g = self.reduce(&a, 1, 1, &e2, &e1)?;
                let h = self.reduce(&b, 1, 1, &g, &e3)?;
                adjust_to(h, target)
            }
            Formula::Forall(x, body) => {
                let y = l.rule.eigen.as_deref().ok_or_else(|| internal("RAll without eigenvariable"))?;
                let z = r.rule.subst.first().ok_or_else(|| internal("LAll without term"))?.clone();
                let inst = body.substitute(&z, x)?;
                let ls = self.subst(lp, &z, y)?;
                let e1 = if m > 1 { self.reduce(f, m - 1, n, &ls, r)? } else { ls };
                let e1 = adjust_to(e1, &with(&[], std::slice::from_ref(&inst)))?;
                let rp = &r.premises[0];
                let e2 = if n > 1 { self.reduce(f, m, n - 1, l, rp)? } else { rp.clone() };
                let e2 = adjust_to(e2, &with(std::slice::from_ref(&inst), &[]))?;
                let g = self.reduce(&inst, 1, 1, &e1, &e2)?;
                adjust_to(g, target)
            }
            _ => Err(internal("logical principal cut on an atom")),
        }
    }

    /// Both sides end in modal rules with the cut formula principal. Context
    /// copies of the cut formula are first cut inside the premises.
    fn modal(&mut self, f: &Formula, m: usize, n: usize, l: &Proof, r: &Proof, target: &Sequent) -> Result<Proof> {
        let pl = self.principal_right(l, f)?;
        if m > pl {
            let l2 = self.refresh(l, &r.conclusion.free_vars())?;
            let premises = l2.premises.iter().map(|q| self.reduce(f, m - pl, n, q, r)).collect::<Result<Vec<_>>>()?;
            let lstar = Proof { conclusion: cut_conclusion(&l.conclusion, &r.conclusion, f, m - pl, n)?, rule: l2.rule, premises };
            let t = cut_conclusion(&lstar.conclusion, &r.conclusion, f, pl, n)?;
            let x = self.modal(f, pl, n, &lstar, r, &t)?;
            return adjust_to(x, target);
        }
        let pr = self.principal_left(r, f)?;
        if n > pr {
            let r2 = self.refresh(r, &l.conclusion.free_vars())?;
            let premises = r2.premises.iter().map(|q| self.reduce(f, m, n - pr, l, q)).collect::<Result<Vec<_>>>()?;
            let rstar = Proof { conclusion: cut_conclusion(&l.conclusion, &r.conclusion, f, m, n - pr)?, rule: r2.rule, premises };
            let t = cut_conclusion(&l.conclusion, &rstar.conclusion, f, m, pr)?;
            let x = self.modal(f, m, pr, l, &rstar, &t)?;
            return adjust_to(x, target);
        }
        self.modal_principal(f, m, n, l, r, target)
    }

    fn modal_principal(&mut self, f: &Formula, m: usize, n: usize, l: &Proof, r: &Proof, target: &Sequent) -> Result<Proof> {
        let (r1, r2) = (resolve(self.rules, l)?, resolve(self.rules, r)?);
        let (k1, k2) = (r1.conclusion.lhs.len(), r2.conclusion.lhs.len());
        let pos_l: Vec<usize> = (0..r1.conclusion.rhs.len()).filter(|&j| l.rule.principal[k1 + j] == *f).take(m).collect();
        let pos_r: Vec<usize> = (0..k2).filter(|&j| r.rule.principal[j] == *f).take(n).collect();
        let op = match f {
            Formula::Modal { op, .. } => op.clone(),
            _ => return Err(internal("modal cut on a non-modal formula")),
        };
        let w = find_absorption(self.rules, &r1, &pos_l, &r2, &pos_r)
            .ok_or_else(|| Error::AbsorptionFailure { r1: r1.name.clone(), r2: r2.name.clone(), op })?;
        let y = fresh(&mut self.avoid);
        let eig = |p: &Proof| p.rule.eigen.clone().ok_or_else(|| internal("modal step without eigenvariable"));
        let (y1, y2) = (eig(l)?, eig(r)?);
        let mut proofs = Vec::new();
        for q in &l.premises {
            proofs.push(self.subst(q, &y, &y1)?);
        }
        for q in &r.premises {
            proofs.push(self.subst(q, &y, &y2)?);
        }
        let mut sigma: BTreeMap<SVar, Formula> = BTreeMap::new();
        let mut atoms: Vec<(ModalAtom, Formula)> = Vec::new();
        for (rule, node) in [(&w.left, l), (&w.right, r)] {
            for (a, g) in rule.conclusion.lhs.iter().chain(&rule.conclusion.rhs).zip(&node.rule.principal) {
                let Formula::Modal { boxes, .. } = g else { return Err(internal("principal is not modal")) };
                for (s, (bx, body)) in a.args.iter().zip(boxes) {
                    sigma.insert(s.clone(), body.substitute(&y, bx)?);
                }
                atoms.push((a.clone(), g.clone()));
            }
        }
        let context = |node: &Proof, k: usize| -> Result<Sequent> {
            let c = &node.conclusion;
            let lhs = minus(&c.lhs, &node.rule.principal[..k]).ok_or_else(|| internal("principal missing"))?;
            let rhs = minus(&c.rhs, &node.rule.principal[k..]).ok_or_else(|| internal("principal missing"))?;
            Ok(Sequent::new(lhs, rhs))
        };
        let ctx = context(l, k1)?.join(&context(r, k2)?);
        let pool = w.pool();
        let inst = |v: &[SVar]| v.iter().map(|s| sigma[&w.rho[s]].clone()).collect::<Vec<_>>();
        let mut premises = Vec::new();
        for (p, src) in w.rule.premises.iter().zip(&w.sources) {
            let (a, b) = (&pool[src.left], &pool[src.right]);
            let cnt = |v: &[SVar]| v.iter().filter(|s| **s == src.svar).count();
            let d = self.reduce(&sigma[&src.svar], cnt(&a.rhs), cnt(&b.lhs), &proofs[src.left], &proofs[src.right])?;
            premises.push(adjust_to(d, &Sequent::new(plus(&ctx.lhs, &inst(&p.lhs)), plus(&inst(&p.rhs), &ctx.rhs)))?);
        }
        let principal = w
            .rule
            .conclusion
            .lhs
            .iter()
            .chain(&w.rule.conclusion.rhs)
            .map(|a| {
                let img = ModalAtom { op: a.op.clone(), args: a.args.iter().map(|s| w.rho[s].clone()).collect() };
                atoms.iter().find(|(b, _)| *b == img).map(|(_, g)| g.clone()).ok_or_else(|| internal("unmatched atom"))
            })
            .collect::<Result<Vec<_>>>()?;
        let node = Proof::modal(&w.rule, principal, &y, &ctx, premises);
        adjust_to(node, target)
    }
}

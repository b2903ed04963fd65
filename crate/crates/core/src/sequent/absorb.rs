use std::collections::BTreeMap;

use super::{adjust_to, plus, Proof, Sequent};
use crate::error::{Error, Result};
use crate::onestep::{index_sum, preset_rules, Conclusion, ModalAtom, OneStepRule, Premise, RuleSet, SVar};
use crate::syntax::{fresh_var, Formula, Var};

fn ms_sub<T: Ord>(a: &[T], b: &[T]) -> bool {
    let mut b: Vec<&T> = b.iter().collect();
    a.iter().all(|x| match b.iter().position(|y| *y == x) {
        Some(i) => {
            b.swap_remove(i);
            true
        }
        None => false,
    })
}

fn remove_all(v: &[SVar], s: &str) -> Vec<SVar> {
    v.iter().filter(|x| *x != s).cloned().collect()
}

/// Covering: every sequent of `target` contains some sequent of `by`.
pub fn covers(by: &[Sequent], target: &[Sequent]) -> bool {
    target.iter().all(|t| by.iter().any(|s| s.within(t)))
}

/// Covering between schematic sequents.
pub fn covers_schematic(by: &[Premise], target: &[Premise]) -> bool {
    target.iter().all(|t| by.iter().any(|s| ms_sub(&s.lhs, &t.lhs) && ms_sub(&s.rhs, &t.rhs)))
}

pub(crate) struct Cover {
    pub rule: OneStepRule,
    pub rho: BTreeMap<SVar, SVar>,
    pub sources: Vec<usize>,
}

fn injections(src: &[ModalAtom], tgt: &[ModalAtom], chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if chosen.len() == src.len() {
        return visit(chosen);
    }
    let a = &src[chosen.len()];
    for (i, b) in tgt.iter().enumerate() {
        if chosen.contains(&i) || a.op != b.op || a.args.len() != b.args.len() {
            continue;
        }
        chosen.push(i);
        if injections(src, tgt, chosen, visit) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A rule among `candidates` and a renaming `rho` with `rho(conclusion)`
/// contained in `target` and every `rho(premise)` containing a pool member.
pub(crate) fn find_cover(candidates: &[OneStepRule], pool: &[Premise], target: &Conclusion) -> Option<Cover> {
    for r in candidates {
        let (cl, cr) = (&r.conclusion.lhs, &r.conclusion.rhs);
        if cl.len() > target.lhs.len() || cr.len() > target.rhs.len() {
            continue;
        }
        let mut found = None;
        injections(cl, &target.lhs, &mut Vec::new(), &mut |li| {
            let li = li.to_vec();
            injections(cr, &target.rhs, &mut Vec::new(), &mut |ri| {
                let mut rho = BTreeMap::new();
                for (a, &i) in cl.iter().zip(&li) {
                    rho.extend(a.args.iter().cloned().zip(target.lhs[i].args.iter().cloned()));
                }
                for (a, &i) in cr.iter().zip(ri) {
                    rho.extend(a.args.iter().cloned().zip(target.rhs[i].args.iter().cloned()));
                }
                let mut sources = Vec::with_capacity(r.premises.len());
                for p in &r.premises {
                    let img = |v: &[SVar]| v.iter().map(|s| rho[s].clone()).collect::<Vec<_>>();
                    let (l, rr) = (img(&p.lhs), img(&p.rhs));
                    match pool.iter().position(|s| ms_sub(&s.lhs, &l) && ms_sub(&s.rhs, &rr)) {
                        Some(k) => sources.push(k),
                        None => return false,
                    }
                }
                found = Some(Cover { rule: r.clone(), rho, sources });
                true
            })
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// The rules tried as absorbing rules: the set itself, extended for presets
/// to family members up to `bound`.
pub(crate) fn candidate_rules(rules: &RuleSet, bound: usize) -> Vec<OneStepRule> {
    let mut out = rules.rules.clone();
    if let Ok(p) = preset_rules(&rules.name, bound.max(rules.bound)) {
        for r in p.rules {
            if !out.iter().any(|o| o.name == r.name) {
                out.push(r);
            }
        }
    }
    out
}

/// A premise of the absorbing rule is covered by the multicut of pool
/// premises `left` and `right` on `svar`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixSource {
    pub left: usize,
    pub right: usize,
    pub svar: SVar,
}

/// Evidence that a rule absorbs the cut of `left` against `right` on
/// `cut_atom`. Pool premises are those of `left` followed by those of `right`.
#[derive(Clone, Debug)]
pub struct AbsorptionWitness {
    pub left: OneStepRule,
    pub right: OneStepRule,
    pub cut_atom: ModalAtom,
    pub rule: OneStepRule,
    pub rho: BTreeMap<SVar, SVar>,
    pub sources: Vec<MixSource>,
}

impl AbsorptionWitness {
    pub fn pool(&self) -> Vec<Premise> {
        self.left.premises.iter().chain(&self.right.premises).cloned().collect()
    }

    pub fn mix(&self, src: &MixSource) -> Premise {
        let pool = self.pool();
        let (a, b) = (&pool[src.left], &pool[src.right]);
        Premise {
            lhs: a.lhs.iter().cloned().chain(remove_all(&b.lhs, &src.svar)).collect(),
            rhs: remove_all(&a.rhs, &src.svar).into_iter().chain(b.rhs.iter().cloned()).collect(),
        }
    }

    /// The conclusion the absorbing rule must reach: both conclusions with
    /// the cut atoms removed.
    pub fn target(&self) -> Conclusion {
        let drop = |v: &[ModalAtom]| v.iter().filter(|a| **a != self.cut_atom).cloned().collect::<Vec<_>>();
        Conclusion {
            lhs: self.left.conclusion.lhs.iter().cloned().chain(drop(&self.right.conclusion.lhs)).collect(),
            rhs: drop(&self.left.conclusion.rhs).into_iter().chain(self.right.conclusion.rhs.iter().cloned()).collect(),
        }
    }

    /// Re-verifies both covering conditions.
    pub fn verify(&self) -> bool {
        let img = |v: &[SVar]| v.iter().map(|s| self.rho.get(s).cloned()).collect::<Option<Vec<_>>>();
        let Some(prems) = self
            .rule
            .premises
            .iter()
            .map(|p| Some(Premise { lhs: img(&p.lhs)?, rhs: img(&p.rhs)? }))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        let mixes: Vec<Premise> = self.sources.iter().map(|s| self.mix(s)).collect();
        let atoms = |v: &[ModalAtom]| {
            v.iter().map(|a| Some(ModalAtom { op: a.op.clone(), args: img(&a.args)? })).collect::<Option<Vec<_>>>()
        };
        let (Some(cl), Some(cr)) = (atoms(&self.rule.conclusion.lhs), atoms(&self.rule.conclusion.rhs)) else {
            return false;
        };
        let target = self.target();
        self.sources.len() == prems.len()
            && prems.iter().zip(&mixes).all(|(p, m)| covers_schematic(std::slice::from_ref(m), std::slice::from_ref(p)))
            && ms_sub(&cl, &target.lhs)
            && ms_sub(&cr, &target.rhs)
    }
}

/// Searches for a rule absorbing the cut between the right atoms `pos_l` of
/// `r1` and the left atoms `pos_r` of `r2`, all instances of one atom.
/// Only cuts on arguments of the cut atom are formed.
pub fn find_absorption(
    rules: &RuleSet,
    r1: &OneStepRule,
    pos_l: &[usize],
    r2: &OneStepRule,
    pos_r: &[usize],
) -> Option<AbsorptionWitness> {
    let first = r1.conclusion.rhs.get(*pos_l.first()?)?;
    let (op, ar) = (first.op.clone(), first.args.len());
    let cut_names = |atoms: &[ModalAtom], pos: &[usize]| {
        let mut m = BTreeMap::new();
        for &i in pos {
            let a = atoms.get(i)?;
            if a.op != op || a.args.len() != ar {
                return None;
            }
            for (j, v) in a.args.iter().enumerate() {
                m.insert(v.clone(), format!("c{j}"));
            }
        }
        Some(m)
    };
    let (m1, m2) = (cut_names(&r1.conclusion.rhs, pos_l)?, cut_names(&r2.conclusion.lhs, pos_r)?);
    let left = r1.rename(|v| m1.get(v).cloned().unwrap_or_else(|| format!("l{v}")));
    let right = r2.rename(|v| m2.get(v).cloned().unwrap_or_else(|| format!("r{v}")));
    let cvars: Vec<SVar> = (0..ar).map(|j| format!("c{j}")).collect();
    let cut_atom = ModalAtom { op: op.clone(), args: cvars.clone() };
    let mut w = AbsorptionWitness { left, right, cut_atom, rule: r1.clone(), rho: BTreeMap::new(), sources: vec![] };
    let pool = w.pool();
    let mut mixes = Vec::new();
    let mut srcs = Vec::new();
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            for c in &cvars {
                if pool[i].rhs.contains(c) && pool[j].lhs.contains(c) {
                    let s = MixSource { left: i, right: j, svar: c.clone() };
                    mixes.push(w.mix(&s));
                    srcs.push(s);
                }
            }
        }
    }
    let bound = (index_sum(&r1.name) + index_sum(&r2.name) + 2).max(4);
    let cover = find_cover(&candidate_rules(rules, bound), &mixes, &w.target())?;
    w.rule = cover.rule;
    w.rho = cover.rho;
    w.sources = cover.sources.into_iter().map(|k| srcs[k].clone()).collect();
    Some(w)
}

/// A derivation of `context, z op[boxes0] => z op[boxes1], context` by one
/// application of a rule absorbing congruence. `supply(k, s)` proves pool
/// premise `k` (`2j` for `phi0_j => phi1_j`, `2j+1` for the converse), given
/// as the sequent `s` with contexts and eigenvariable instances.
pub fn derive_congruence(
    subject: &str,
    op: &str,
    boxes0: &[(Var, Formula)],
    boxes1: &[(Var, Formula)],
    context: &Sequent,
    rules: &RuleSet,
    supply: &mut dyn FnMut(usize, &Sequent) -> Result<Proof>,
) -> Result<Proof> {
    derive_by_absorption(subject, op, boxes0, boxes1, None, context, rules, supply)
}

/// As `derive_congruence`, except that with `monotone = Some(i)` only the
/// forward premise is available at argument `i`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn derive_by_absorption(
    subject: &str,
    op: &str,
    boxes0: &[(Var, Formula)],
    boxes1: &[(Var, Formula)],
    monotone: Option<usize>,
    context: &Sequent,
    rules: &RuleSet,
    supply: &mut dyn FnMut(usize, &Sequent) -> Result<Proof>,
) -> Result<Proof> {
    if boxes0.len() != boxes1.len() {
        return Err(Error::Rejected("congruence between atoms of different arity".into()));
    }
    let n = boxes0.len();
    let ps: Vec<SVar> = (0..n).map(|j| format!("p{j}")).collect();
    let qs: Vec<SVar> = (0..n).map(|j| format!("q{j}")).collect();
    let mut pool = Vec::new();
    for j in 0..n {
        pool.push(Premise { lhs: vec![ps[j].clone()], rhs: vec![qs[j].clone()] });
        if monotone != Some(j) {
            pool.push(Premise { lhs: vec![qs[j].clone()], rhs: vec![ps[j].clone()] });
        }
    }
    let target = Conclusion {
        lhs: vec![ModalAtom { op: op.into(), args: ps.clone() }],
        rhs: vec![ModalAtom { op: op.into(), args: qs.clone() }],
    };
    let kind = if monotone.is_some() { "monotonicity" } else { "congruence" };
    let failure = || Error::AbsorptionFailure { r1: kind.into(), r2: rules.name.clone(), op: op.into() };
    let cover = find_cover(&candidate_rules(rules, 4), &pool, &target).ok_or_else(failure)?;
    let a0 = Formula::modal(subject, op, boxes0.to_vec());
    let a1 = Formula::modal(subject, op, boxes1.to_vec());
    let mut avoid = a0.vars();
    a1.collect_vars(&mut avoid);
    context.collect_vars(&mut avoid);
    let y = fresh_var(&avoid);
    let mut sigma = BTreeMap::new();
    for j in 0..n {
        sigma.insert(ps[j].clone(), boxes0[j].1.substitute(&y, &boxes0[j].0)?);
        sigma.insert(qs[j].clone(), boxes1[j].1.substitute(&y, &boxes1[j].0)?);
    }
    let inst = |v: &[SVar]| v.iter().map(|s| sigma[s].clone()).collect::<Vec<_>>();
    let rho = &cover.rho;
    let mut premises = Vec::new();
    for (p, &k) in cover.rule.premises.iter().zip(&cover.sources) {
        let img = |v: &[SVar]| inst(&v.iter().map(|s| rho[s].clone()).collect::<Vec<_>>());
        let want = Sequent::new(plus(&context.lhs, &img(&p.lhs)), plus(&img(&p.rhs), &context.rhs));
        let have = Sequent::new(plus(&context.lhs, &inst(&pool[k].lhs)), plus(&inst(&pool[k].rhs), &context.rhs));
        premises.push(adjust_to(supply(k, &have)?, &want)?);
    }
    let principal = cover
        .rule
        .conclusion
        .lhs
        .iter()
        .chain(&cover.rule.conclusion.rhs)
        .map(|a| {
            let args: Vec<SVar> = a.args.iter().map(|s| rho[s].clone()).collect();
            if args == ps {
                Ok(a0.clone())
            } else if args == qs {
                Ok(a1.clone())
            } else {
                Err(failure())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let node = Proof::modal(&cover.rule, principal, &y, context, premises);
    adjust_to(node, &Sequent::new(plus(&context.lhs, &[a0]), plus(&[a1], &context.rhs)))
}

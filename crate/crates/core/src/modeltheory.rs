//! Ultraproducts over finite index sets. Every ultrafilter on a finite set
//! is principal, so the quotient of the product collapses onto the principal
//! component. The transfer condition on admissible families and Łoś are
//! checked by enumerating the product and evaluating each component
//! separately.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::evaluator::{eval, Model, Valuation};
use crate::structures::{mask_of, subsets, Mask};
use crate::syntax::Formula;

pub const MAX_INDEX: usize = 3;
pub const MAX_COMPONENT: usize = 2;

/// `{S ⊆ I | principal ∈ S}` on `I = {0, …, size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrincipalUltrafilter {
    pub size: usize,
    pub principal: usize,
}

impl PrincipalUltrafilter {
    pub fn new(size: usize, principal: usize) -> Result<Self> {
        if principal >= size {
            return Err(Error::Model(format!("principal index {principal} outside an index set of size {size}")));
        }
        Ok(PrincipalUltrafilter { size, principal })
    }

    pub fn contains(&self, set: &BTreeSet<usize>) -> bool {
        set.contains(&self.principal)
    }
}

fn check_caps(models: &[Model], u: &PrincipalUltrafilter) -> Result<()> {
    if models.is_empty() || models.len() != u.size {
        return Err(Error::Model(format!("{} models for an index set of size {}", models.len(), u.size)));
    }
    if models.len() > MAX_INDEX {
        return Err(Error::CapExceeded(format!("index set of size {} exceeds {MAX_INDEX}", models.len())));
    }
    if let Some(m) = models.iter().find(|m| m.size() > MAX_COMPONENT) {
        return Err(Error::CapExceeded(format!("component carrier of size {} exceeds {MAX_COMPONENT}", m.size())));
    }
    let first = &models[0];
    if models.iter().any(|m| m.kind != first.kind) {
        return Err(Error::Model("components have different structure kinds".into()));
    }
    if models.iter().any(|m| m.sig != first.sig) {
        return Err(Error::Signature("components have different signatures".into()));
    }
    Ok(())
}

/// All tuples of the product carrier, last index varying fastest.
pub fn product_carrier(models: &[Model]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for m in models {
        out = out.into_iter().flat_map(|pre| (0..m.size()).map(move |c| [pre.clone(), vec![c]].concat())).collect();
    }
    out
}

fn agreeing(u: &PrincipalUltrafilter, holds: impl Fn(usize) -> bool) -> bool {
    u.contains(&(0..u.size).filter(|&i| holds(i)).collect())
}

/// `{x | {i | x_i ∈ A_i} ∈ U}` as a set of product tuples.
pub fn admissible_subset(models: &[Model], u: &PrincipalUltrafilter, parts: &[Mask]) -> Result<BTreeSet<Vec<usize>>> {
    if parts.len() != models.len() || models.len() != u.size {
        return Err(Error::Model(format!("{} parts for {} models", parts.len(), models.len())));
    }
    Ok(product_carrier(models)
        .into_iter()
        .filter(|x| agreeing(u, |i| parts[i] >> x[i] & 1 == 1))
        .collect())
}

/// The quotient of the product with its coalgebra, and the map sending each
/// product tuple to its class.
#[derive(Clone, Debug)]
pub struct QuasiUltraproduct {
    pub model: Model,
    pub tuples: Vec<Vec<usize>>,
    pub class: Vec<usize>,
    pub ultrafilter: PrincipalUltrafilter,
}

impl QuasiUltraproduct {
    pub fn class_of(&self, x: &[usize]) -> Option<usize> {
        self.tuples.iter().position(|t| t == x).map(|k| self.class[k])
    }

    /// The classes meeting a set of tuples.
    pub fn classes(&self, set: &BTreeSet<Vec<usize>>) -> Mask {
        mask_of(&set.iter().filter_map(|x| self.class_of(x)).collect::<Vec<_>>())
    }

    /// The valuation induced by per-index valuations.
    pub fn induced(&self, assignments: &[Valuation]) -> Valuation {
        let vars: BTreeSet<&String> = assignments.iter().flat_map(|v| v.0.keys()).collect();
        let mut out = Valuation::new();
        for x in vars {
            let tuple: Vec<usize> = assignments.iter().map(|v| v.get(x)).collect();
            out.set(x.clone(), self.class_of(&tuple).expect("tuple of the product"));
        }
        out
    }
}

pub fn quasi_ultraproduct(models: &[Model], u: &PrincipalUltrafilter) -> Result<QuasiUltraproduct> {
    check_caps(models, u)?;
    let base = &models[u.principal];
    let tuples = product_carrier(models);
    let mut reps: Vec<Vec<usize>> = Vec::new();
    let mut class = Vec::with_capacity(tuples.len());
    for x in &tuples {
        let same = |y: &Vec<usize>| agreeing(u, |i| x[i] == y[i]);
        let k = match reps.iter().position(same) {
            Some(k) => k,
            None => {
                reps.push(x.clone());
                reps.len() - 1
            }
        };
        class.push(k);
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&k| reps[k][u.principal]);
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &k)| (k, r)).collect();
    let class: Vec<usize> = class.into_iter().map(|k| rank[&k]).collect();
    let reps: Vec<Vec<usize>> = order.iter().map(|&k| reps[k].clone()).collect();
    if reps.len() != base.size() {
        return Err(Error::Model("quotient does not biject onto the principal component".into()));
    }
    let gamma = reps.iter().enumerate().map(|(k, x)| (k, base.gamma[&x[u.principal]].clone())).collect();
    let mut interp = BTreeMap::new();
    for (p, &ar) in &base.sig.preds {
        let mut rel = BTreeSet::new();
        for args in cartesian(reps.len(), ar) {
            let holds = |i: usize| models[i].interp.get(p).is_some_and(|r| r.contains(&args.iter().map(|&k| reps[k][i]).collect::<Vec<_>>()));
            if agreeing(u, holds) {
                rel.insert(args);
            }
        }
        interp.insert(p.clone(), rel);
    }
    let states = reps.iter().map(|x| format!("[{}]", x.iter().map(usize::to_string).collect::<Vec<_>>().join(","))).collect();
    let model = Model { kind: base.kind.clone(), sig: base.sig.clone(), states, gamma, interp };
    Ok(QuasiUltraproduct { model, tuples, class, ultrafilter: *u })
}

fn cartesian(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| acc.into_iter().flat_map(|pre| (0..n).map(move |c| [pre.clone(), vec![c]].concat())).collect())
}

/// A failure of the defining condition: operator, per-argument component
/// families, and the tuple at which the two sides differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferViolation {
    pub op: String,
    pub families: Vec<Vec<Mask>>,
    pub tuple: Vec<usize>,
}

/// Checks, for every operator, every choice of per-index subsets for each
/// argument and every product tuple `x`, that `γ([x])` lies in the lifting
/// of the admissible classes iff `{i | γ_i(x_i)` lies in the lifting of the
/// components`} ∈ U`. Returns the number of families checked.
pub fn verify_transfer(models: &[Model], qu: &QuasiUltraproduct) -> Result<std::result::Result<usize, TransferViolation>> {
    let u = &qu.ultrafilter;
    check_caps(models, u)?;
    let per_index: Vec<Vec<Mask>> = cartesian_masks(models);
    let mut checked = 0;
    for (op, decl) in &qu.model.sig.ops {
        let families = cartesian(per_index.len(), decl.arity);
        for fam in families {
            let parts: Vec<&Vec<Mask>> = fam.iter().map(|&k| &per_index[k]).collect();
            let adm = parts.iter().map(|p| admissible_subset(models, u, p).map(|s| qu.classes(&s))).collect::<Result<Vec<_>>>()?;
            for x in &qu.tuples {
                let lhs = qu.model.modal_holds(op, qu.class_of(x).expect("tuple"), &adm)?;
                let mut on = BTreeSet::new();
                for (i, m) in models.iter().enumerate() {
                    let args: Vec<Mask> = parts.iter().map(|p| p[i]).collect();
                    if m.modal_holds(op, x[i], &args)? {
                        on.insert(i);
                    }
                }
                if lhs != u.contains(&on) {
                    return Ok(Err(TransferViolation { op: op.clone(), families: parts.into_iter().cloned().collect(), tuple: x.clone() }));
                }
            }
            checked += 1;
        }
    }
    Ok(Ok(checked))
}

fn cartesian_masks(models: &[Model]) -> Vec<Vec<Mask>> {
    models.iter().fold(vec![vec![]], |acc, m| {
        acc.into_iter().flat_map(|pre| subsets(m.size()).map(move |a| [pre.clone(), vec![a]].concat())).collect()
    })
}

/// Both sides of Łoś: truth in the quasi-ultraproduct at the induced
/// assignment, and membership of the agreeing index set in `U`.
pub fn los_check(models: &[Model], u: &PrincipalUltrafilter, phi: &Formula, assignments: &[Valuation]) -> Result<(bool, bool)> {
    if phi.depth() > 4 {
        return Err(Error::CapExceeded(format!("formula depth {} exceeds 4", phi.depth())));
    }
    if assignments.len() != models.len() {
        return Err(Error::Model(format!("{} assignments for {} models", assignments.len(), models.len())));
    }
    let qu = quasi_ultraproduct(models, u)?;
    for (m, v) in models.iter().zip(assignments) {
        if v.0.values().any(|&c| c >= m.size()) {
            return Err(Error::Model("assignment outside the carrier".into()));
        }
    }
    let product = eval(&qu.model, &qu.induced(assignments), phi)?;
    let mut on = BTreeSet::new();
    for (i, (m, v)) in models.iter().zip(assignments).enumerate() {
        if eval(m, v, phi)? {
            on.insert(i);
        }
    }
    Ok((product, u.contains(&on)))
}

/// The states of the principal component as classes: `c ↦ [x]` for any `x`
/// with `x_principal = c`.
pub fn iso_inverse(qu: &QuasiUltraproduct) -> Vec<usize> {
    (0..qu.model.size())
        .map(|c| qu.tuples.iter().zip(&qu.class).find(|(x, _)| x[qu.ultrafilter.principal] == c).map(|(_, &k)| k).expect("surjective"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_formula, random_model, random_valuation, rng, standard_signature, FormulaShape};
    use crate::structures::{StructureKind, Value};
    use crate::syntax::parse_formula;

    fn kripke_pair() -> Vec<Model> {
        let kind = StructureKind::kripke();
        let sig = standard_signature(&kind);
        let mut r = rng(7);
        vec![random_model(&mut r, &kind, &sig, 2), random_model(&mut r, &kind, &sig, 2)]
    }

    #[test]
    fn admissible_sets_collapse_on_the_principal_index() {
        let ms = kripke_pair();
        let u = PrincipalUltrafilter::new(2, 1).unwrap();
        assert_eq!(admissible_subset(&ms, &u, &[0b11, 0b11]).unwrap().len(), 4);
        assert!(admissible_subset(&ms, &u, &[0b11, 0]).unwrap().is_empty());
        let single = admissible_subset(&ms, &u, &[0b01, 0b10]).unwrap();
        assert_eq!(single, BTreeSet::from([vec![0, 1], vec![1, 1]]));
        assert!(admissible_subset(&ms, &u, &[0b01]).is_err());
    }

    #[test]
    fn single_component_is_itself() {
        let ms = kripke_pair();
        let u = PrincipalUltrafilter::new(1, 0).unwrap();
        let qu = quasi_ultraproduct(&ms[..1], &u).unwrap();
        assert_eq!(qu.model.gamma, ms[0].gamma);
        assert_eq!(qu.model.interp, ms[0].interp);
        assert_eq!(iso_inverse(&qu), vec![0, 1]);
    }

    #[test]
    fn two_kripke_models_satisfy_transfer() {
        let ms = kripke_pair();
        let u = PrincipalUltrafilter::new(2, 1).unwrap();
        let qu = quasi_ultraproduct(&ms, &u).unwrap();
        let checked = verify_transfer(&ms, &qu).unwrap().unwrap();
        assert_eq!(checked, 2 * 16);
    }

    #[test]
    fn mixed_kinds_rejected() {
        let mut ms = kripke_pair();
        ms[1].kind = StructureKind::Neighbourhood;
        ms[1].gamma = (0..2).map(|c| (c, Value::Nbhd(BTreeSet::new()))).collect();
        assert!(quasi_ultraproduct(&ms, &PrincipalUltrafilter::new(2, 0).unwrap()).is_err());
    }

    #[test]
    fn los_on_fixed_sentences() {
        let ms = kripke_pair();
        let sig = &ms[0].sig;
        let u = PrincipalUltrafilter::new(2, 0).unwrap();
        let vals = vec![Valuation::new(), Valuation::new()];
        assert_eq!(los_check(&ms, &u, &Formula::Bot, &vals).unwrap(), (false, false));
        let f = parse_formula("forall x. P(x)", sig).unwrap();
        let (a, b) = los_check(&ms, &u, &f, &vals).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, eval(&ms[0], &Valuation::new(), &f).unwrap());
    }

    #[test]
    fn los_agrees_on_random_draws() {
        let kind = StructureKind::kripke();
        let sig = standard_signature(&kind);
        let mut r = rng(11);
        let shape = FormulaShape::new(3);
        for k in 0..100 {
            let size = 1 + k % 3;
            let ms: Vec<Model> = (0..size).map(|i| random_model(&mut r, &kind, &sig, 1 + (k + i) % 2)).collect();
            let u = PrincipalUltrafilter::new(size, k % size).unwrap();
            let phi = random_formula(&mut r, &sig, &shape);
            let vals: Vec<Valuation> = ms.iter().map(|m| random_valuation(&mut r, &shape.vars, m.size())).collect();
            let (a, b) = los_check(&ms, &u, &phi, &vals).unwrap();
            assert_eq!(a, b);
        }
    }
}

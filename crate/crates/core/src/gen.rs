//! Seeded random generation of formulas, models and valuations.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evaluator::{Model, Valuation};
use crate::structures::{full, StructureKind, Value};
use crate::syntax::{Cml, Formula, Hybrid, HybridLang, Signature, Var};

pub type Rng64 = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_c0a1;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Operators with their liftings' bounds, plus `P`, `Q` (unary) and `R` (binary).
pub fn standard_signature(kind: &StructureKind) -> Signature {
    let mut sig = Signature::new().with_pred("P", 1).with_pred("Q", 1).with_pred("R", 2);
    for op in standard_ops(kind) {
        let l = kind.resolve(&op).expect("standard operator resolves");
        sig = sig.with_op(&op, l.arity(), l.default_bounds());
    }
    sig
}

/// Like `standard_signature` but with unary predicates only.
pub fn unary_signature(kind: &StructureKind) -> Signature {
    let mut sig = standard_signature(kind);
    sig.preds.remove("R");
    sig
}

pub fn standard_ops(kind: &StructureKind) -> Vec<String> {
    match kind {
        StructureKind::Kripke { atoms } => {
            let mut ops = vec!["dia".to_string(), "box".to_string()];
            ops.extend(atoms.iter().cloned());
            ops
        }
        StructureKind::Neighbourhood => vec!["box".into(), "dia".into()],
        StructureKind::Multiset { .. } => vec!["g0".into(), "g1".into(), "g2".into()],
        StructureKind::Dist { k } => (0..*k).map(|n| format!("p{n}")).collect(),
        StructureKind::Selection => vec!["cond".into()],
        StructureKind::Product(parts) => parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| standard_ops(p).into_iter().map(move |op| format!("c{i}_{op}")))
            .collect(),
    }
}

pub fn random_value(r: &mut Rng64, kind: &StructureKind, n: usize) -> Value {
    match kind {
        StructureKind::Kripke { atoms } => Value::Kripke {
            succ: r.gen::<u64>() & full(n),
            atoms: atoms.iter().filter(|_| r.gen_bool(0.5)).cloned().collect(),
        },
        StructureKind::Neighbourhood => {
            Value::Nbhd((0..=full(n)).filter(|_| r.gen_bool(0.5)).collect::<BTreeSet<_>>())
        }
        StructureKind::Multiset { max } => Value::Multiset((0..n).map(|_| r.gen_range(0..=*max)).collect()),
        StructureKind::Dist { k } => {
            let mut c = vec![0; n];
            for _ in 0..*k {
                c[r.gen_range(0..n)] += 1;
            }
            Value::Dist(c)
        }
        StructureKind::Selection => Value::Selection((0..=full(n)).map(|_| r.gen::<u64>() & full(n)).collect()),
        StructureKind::Product(parts) => Value::Product(parts.iter().map(|p| random_value(r, p, n)).collect()),
    }
}

pub fn random_model(r: &mut Rng64, kind: &StructureKind, sig: &Signature, n: usize) -> Model {
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let gamma = (0..n).map(|c| (c, random_value(r, kind, n))).collect();
    let mut interp = BTreeMap::new();
    for (p, &ar) in &sig.preds {
        let mut rel = BTreeSet::new();
        let mut tuple = vec![0; ar];
        loop {
            if r.gen_bool(0.5) {
                rel.insert(tuple.clone());
            }
            let mut i = 0;
            while i < ar {
                tuple[i] += 1;
                if tuple[i] < n {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
            if i == ar {
                break;
            }
        }
        interp.insert(p.clone(), rel);
    }
    Model { kind: kind.clone(), sig: sig.clone(), states, gamma, interp }
}

pub fn random_valuation(r: &mut Rng64, vars: &[Var], n: usize) -> Valuation {
    Valuation(vars.iter().map(|v| (v.clone(), r.gen_range(0..n))).collect())
}

#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub depth: usize,
    pub vars: Vec<Var>,
    pub quantifiers: bool,
    pub equality: bool,
}

impl FormulaShape {
    pub fn new(depth: usize) -> Self {
        FormulaShape { depth, vars: ["x", "y", "z"].map(String::from).to_vec(), quantifiers: true, equality: true }
    }

    pub fn quantifier_free(mut self) -> Self {
        self.quantifiers = false;
        self
    }
}

fn pick<'a, T>(r: &mut Rng64, xs: &'a [T]) -> &'a T {
    xs.choose(r).expect("non-empty choice")
}

pub fn random_formula(r: &mut Rng64, sig: &Signature, shape: &FormulaShape) -> Formula {
    formula_at(r, sig, shape, shape.depth)
}

fn random_atom(r: &mut Rng64, sig: &Signature, shape: &FormulaShape) -> Formula {
    let preds: Vec<(&String, &usize)> = sig.preds.iter().collect();
    let nullary: Vec<&String> = sig.ops.iter().filter(|(_, d)| d.arity == 0).map(|(n, _)| n).collect();
    let choice = r.gen_range(0..10);
    if choice < 2 && shape.equality {
        return Formula::Eq(pick(r, &shape.vars).clone(), pick(r, &shape.vars).clone());
    }
    if choice < 3 {
        return Formula::Bot;
    }
    if choice < 4 && !nullary.is_empty() {
        return Formula::modal(pick(r, &shape.vars).clone(), pick(r, &nullary).to_string(), vec![]);
    }
    if preds.is_empty() {
        return Formula::Bot;
    }
    let (p, &ar) = *pick(r, &preds);
    Formula::Pred(p.clone(), (0..ar).map(|_| pick(r, &shape.vars).clone()).collect())
}

fn formula_at(r: &mut Rng64, sig: &Signature, shape: &FormulaShape, depth: usize) -> Formula {
    if depth == 0 || r.gen_range(0..6) == 0 {
        return random_atom(r, sig, shape);
    }
    let ops: Vec<(&String, usize)> = sig.ops.iter().filter(|(_, d)| d.arity > 0).map(|(n, d)| (n, d.arity)).collect();
    let choice = r.gen_range(0..10);
    if choice < 4 || (choice >= 7 && ops.is_empty()) || (choice < 7 && choice >= 5 && !shape.quantifiers) {
        return Formula::imp(formula_at(r, sig, shape, depth - 1), formula_at(r, sig, shape, depth - 1));
    }
    if choice < 7 && shape.quantifiers {
        return Formula::forall(pick(r, &shape.vars).clone(), formula_at(r, sig, shape, depth - 1));
    }
    if ops.is_empty() {
        return random_atom(r, sig, shape);
    }
    let (op, ar) = *pick(r, &ops);
    let subject = pick(r, &shape.vars).clone();
    let boxes = (0..ar).map(|_| (pick(r, &shape.vars).clone(), formula_at(r, sig, shape, depth - 1))).collect();
    Formula::modal(subject, op.clone(), boxes)
}

pub fn random_cml(r: &mut Rng64, sig: &Signature, depth: usize) -> Cml {
    let atoms: Vec<&String> = sig.preds.iter().filter(|(_, &a)| a == 1).map(|(p, _)| p).collect();
    let ops: Vec<(&String, usize)> = sig.ops.iter().map(|(n, d)| (n, d.arity)).collect();
    if depth == 0 || r.gen_range(0..5) == 0 {
        return match r.gen_range(0..6) {
            0 => Cml::Bot,
            1 if ops.iter().any(|(_, a)| *a == 0) => {
                let nullary: Vec<_> = ops.iter().filter(|(_, a)| *a == 0).collect();
                Cml::Modal(pick(r, &nullary).0.clone(), vec![])
            }
            _ => Cml::Atom(pick(r, &atoms).to_string()),
        };
    }
    if r.gen_bool(0.4) || ops.is_empty() {
        return Cml::imp(random_cml(r, sig, depth - 1), random_cml(r, sig, depth - 1));
    }
    let (op, ar) = *pick(r, &ops);
    Cml::Modal(op.clone(), (0..ar).map(|_| random_cml(r, sig, depth - 1)).collect())
}

pub fn random_hybrid(r: &mut Rng64, sig: &Signature, lang: HybridLang, vars: &[Var], depth: usize) -> Hybrid {
    let atoms: Vec<&String> = sig.preds.iter().filter(|(_, &a)| a == 1).map(|(p, _)| p).collect();
    let ops: Vec<(&String, usize)> = sig.ops.iter().map(|(n, d)| (n, d.arity)).collect();
    if depth == 0 || r.gen_range(0..5) == 0 {
        return match r.gen_range(0..5) {
            0 => Hybrid::Bot,
            1 | 2 => Hybrid::Nominal(pick(r, vars).clone()),
            _ => Hybrid::Atom(pick(r, &atoms).to_string()),
        };
    }
    let sub = |r: &mut Rng64| random_hybrid(r, sig, lang, vars, depth - 1);
    let mut kinds = vec![0, 1];
    match lang {
        HybridLang::DownAt => kinds.extend([2, 3]),
        HybridLang::DownGlobal => kinds.extend([3, 4]),
        HybridLang::ForallAt => kinds.extend([2, 5]),
        HybridLang::Full => kinds.extend([2, 3, 4, 5]),
    }
    match *pick(r, &kinds) {
        0 => Hybrid::imp(sub(r), sub(r)),
        1 if !ops.is_empty() => {
            let (op, ar) = *pick(r, &ops);
            Hybrid::Modal(op.clone(), (0..ar).map(|_| sub(r)).collect())
        }
        2 => {
            let z = pick(r, vars).clone();
            Hybrid::at(z, sub(r))
        }
        3 => {
            let z = pick(r, vars).clone();
            Hybrid::down(z, sub(r))
        }
        4 => Hybrid::global(sub(r)),
        5 => {
            let z = pick(r, vars).clone();
            Hybrid::forallw(z, sub(r))
        }
        _ => Hybrid::imp(sub(r), sub(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::validate_model;

    #[test]
    fn random_models_are_valid() {
        let mut r = rng(1);
        let kinds = [
            StructureKind::Kripke { atoms: vec!["a".into()] },
            StructureKind::Neighbourhood,
            StructureKind::Multiset { max: 3 },
            StructureKind::Dist { k: 3 },
            StructureKind::Selection,
            StructureKind::Product(vec![StructureKind::kripke(), StructureKind::Neighbourhood]),
        ];
        for kind in &kinds {
            let sig = standard_signature(kind);
            for n in 1..=3 {
                let m = random_model(&mut r, kind, &sig, n);
                assert!(validate_model(&m, &sig).is_empty(), "{kind:?}");
            }
        }
    }

    #[test]
    fn random_formulas_respect_shape() {
        let mut r = rng(2);
        let sig = standard_signature(&StructureKind::kripke());
        for _ in 0..200 {
            let f = random_formula(&mut r, &sig, &FormulaShape::new(4).quantifier_free());
            assert!(f.depth() <= 4);
            assert!(!f.has_quantifier());
            sig.check_formula(&f).unwrap();
        }
    }
}

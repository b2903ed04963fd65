//! Property tests over seeded generators.

use std::collections::BTreeMap;

use cpl_core::corpus::{calculus_for, random_derivation, valid_in, DerivationCalculus};
use cpl_core::evaluator::{eval, Valuation};
use cpl_core::gen::{random_formula, random_model, random_valuation, random_value, rng, standard_signature, FormulaShape, Rng64};
use cpl_core::hilbert::{match_axiom, onestep_axiom_instance, Axiom};
use cpl_core::modeltheory::{los_check, PrincipalUltrafilter};
use cpl_core::onestep::{k_rule, preset_rules};
use cpl_core::sequent::{
    check_sequent_proof, covers, eliminate_mcut, prove_propositional, substitute_proof, Calculus, Flags, Proof, Sequent,
};
use cpl_core::structures::{functions, StructureKind};
use cpl_core::syntax::{parse_formula, render_formula, Formula};
use proptest::prelude::*;
use rand::Rng;

fn kinds() -> [StructureKind; 3] {
    [StructureKind::kripke(), StructureKind::Neighbourhood, StructureKind::Multiset { max: 2 }]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>(), k in 0usize..3) {
        let mut r = rng(seed);
        let sig = standard_signature(&kinds()[k]);
        let phi = random_formula(&mut r, &sig, &FormulaShape::new(4));
        prop_assert_eq!(parse_formula(&render_formula(&phi), &sig).unwrap(), phi);
    }

    #[test]
    fn substitution_agrees_with_the_modified_valuation(seed in any::<u64>(), k in 0usize..2) {
        let mut r = rng(seed);
        let kind = &kinds()[k];
        let sig = standard_signature(kind);
        let n = r.gen_range(1..=3);
        let m = random_model(&mut r, kind, &sig, n);
        let shape = FormulaShape::new(4);
        let phi = random_formula(&mut r, &sig, &shape);
        let v = random_valuation(&mut r, &shape.vars, n);
        let (x, t) = (&shape.vars[r.gen_range(0..3)], &shape.vars[r.gen_range(0..3)]);
        match phi.substitute(t, x) {
            Ok(s) => prop_assert_eq!(eval(&m, &v, &s).unwrap(), eval(&m, &v.with(x.clone(), v.get(t)), &phi).unwrap()),
            Err(_) => prop_assert!(!phi.substitutable(t, x)),
        }
    }

    #[test]
    fn renaming_a_binder_preserves_meaning(seed in any::<u64>(), k in 0usize..3) {
        let mut r = rng(seed);
        let kind = &kinds()[k];
        let sig = standard_signature(kind);
        let n = r.gen_range(1..=3);
        let m = random_model(&mut r, kind, &sig, n);
        let shape = FormulaShape::new(4);
        let phi = random_formula(&mut r, &sig, &shape);
        let v = random_valuation(&mut r, &shape.vars, n);
        for path in phi.box_paths() {
            if let Ok(psi) = phi.rename_box(&path, "u") {
                prop_assert!(psi.alpha_eq(&phi));
                prop_assert_eq!(eval(&m, &v, &psi).unwrap(), eval(&m, &v, &phi).unwrap());
            }
        }
    }

    #[test]
    fn functor_action_respects_identity_and_composition(seed in any::<u64>(), k in 0usize..3) {
        let mut r = rng(seed);
        let kind = &kinds()[k];
        let (a, b, c) = (r.gen_range(1..=3), r.gen_range(1..=3), r.gen_range(1..=3));
        let t = random_value(&mut r, kind, a);
        let id: Vec<usize> = (0..a).collect();
        prop_assert_eq!(kind.map(&id, a, &t), t.clone());
        let fs = functions(a, b);
        let gs = functions(b, c);
        let f = &fs[r.gen_range(0..fs.len())];
        let g = &gs[r.gen_range(0..gs.len())];
        let gf: Vec<usize> = f.iter().map(|&i| g[i]).collect();
        prop_assert_eq!(kind.map(&gf, c, &t), kind.map(g, c, &kind.map(f, b, &t)));
    }

    #[test]
    fn scheme_instances_are_recognised(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kind = StructureKind::kripke();
        let sig = standard_signature(&kind);
        let rules = preset_rules("K", 4).unwrap();
        let shape = FormulaShape::new(3);
        let (phi, psi) = (random_formula(&mut r, &sig, &shape), random_formula(&mut r, &sig, &shape));
        let weaken = Formula::imp(phi.clone(), Formula::imp(psi, phi.clone()));
        prop_assert_eq!(match_axiom(&weaken, &sig, &rules, false).map(|m| m.name()), Some("En1"));
        let n = r.gen_range(0..=2);
        let sigma: BTreeMap<String, Formula> = (0..=n)
            .map(|i| (format!("p{i}"), random_formula(&mut r, &sig, &FormulaShape::new(2).quantifier_free())))
            .collect();
        let mut avoid = std::collections::BTreeSet::new();
        for f in sigma.values() {
            f.collect_vars(&mut avoid);
        }
        let fresh = cpl_core::syntax::fresh_vars(&avoid, 1).pop().unwrap();
        if let Ok(inst) = onestep_axiom_instance(&k_rule(n), &sigma, "x", &fresh, &[]) {
            let m = match_axiom(&inst, &sig, &rules, false);
            prop_assert!(m.is_some(), "{}", render_formula(&inst));
            let by_onestep = cpl_core::hilbert::match_all(&inst, &sig, &rules, false)
                .into_iter()
                .any(|m| matches!(m.axiom, Axiom::Onestep { .. }));
            prop_assert!(by_onestep);
        }
    }

    #[test]
    fn covering_is_reflexive_and_transitive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = standard_signature(&StructureKind::kripke());
        let shape = FormulaShape::new(1).quantifier_free();
        let pool: Vec<Formula> = (0..4).map(|_| random_formula(&mut r, &sig, &shape)).collect();
        let draw = |r: &mut Rng64| -> Vec<Sequent> {
            (0..r.gen_range(1..=3))
                .map(|_| {
                    let pick = |r: &mut Rng64| (0..r.gen_range(0..3)).map(|_| pool[r.gen_range(0..4)].clone()).collect();
                    Sequent::new(pick(r), pick(r))
                })
                .collect()
        };
        let (a, b, c) = (draw(&mut r), draw(&mut r), draw(&mut r));
        prop_assert!(covers(&a, &a));
        if covers(&a, &b) && covers(&b, &c) {
            prop_assert!(covers(&a, &c));
        }
    }

    #[test]
    fn substitution_in_proofs_keeps_height(seed in any::<u64>(), c in 0usize..2) {
        let mut r = rng(seed);
        let calc = [DerivationCalculus::C, DerivationCalculus::K][c];
        let (kind, rules) = calculus_for(calc.tag());
        let sig = standard_signature(&kind);
        let p = random_derivation(&mut r, calc, 4);
        let vars = ["x", "y", "z"];
        let (t, x) = (vars[r.gen_range(0..3)], vars[r.gen_range(0..3)]);
        if let Ok(q) = substitute_proof(&p, t, x) {
            prop_assert_eq!(q.height(), p.height());
            prop_assert_eq!(&q.conclusion, &p.conclusion.substitute(t, x).unwrap());
            let rep = check_sequent_proof(&q, &Calculus::new(&rules, Flags::CUT_FREE).with_sig(&sig));
            prop_assert!(rep.accepted, "{:?}", rep.diagnostics);
        }
    }

    #[test]
    fn elimination_preserves_the_end_sequent(seed in any::<u64>(), c in 0usize..2) {
        let mut r = rng(seed);
        let calc = [DerivationCalculus::C, DerivationCalculus::K][c];
        let (kind, rules) = calculus_for(calc.tag());
        let sig = standard_signature(&kind);
        let p = random_derivation(&mut r, calc, 3);
        let Some(a) = p.conclusion.rhs.first().cloned() else { return Ok(()) };
        let q = random_derivation(&mut r, calc, 3);
        let right = q.conclusion.lhs.iter().fold(
            prove_propositional(&Sequent::new(vec![a.clone()], vec![a.clone()])).unwrap(),
            |acc, f| Proof::lw(acc, f),
        );
        let right = Proof::lw(right, &Formula::Bot);
        let cut = Proof::cut(p, right, &a).unwrap();
        let calc_cut = Calculus::new(&rules, Flags::WITH_CUT).with_sig(&sig);
        prop_assert!(check_sequent_proof(&cut, &calc_cut).accepted);
        let (out, _) = eliminate_mcut(&cut, &rules).unwrap();
        prop_assert!(out.is_cut_free());
        prop_assert_eq!(&out.conclusion, &cut.conclusion);
        let rep = check_sequent_proof(&out, &Calculus::new(&rules, Flags::CUT_FREE).with_sig(&sig));
        prop_assert!(rep.accepted, "{:?}", rep.diagnostics);
    }

    #[test]
    fn derivable_sequents_are_valid(seed in any::<u64>(), c in 0usize..3) {
        let mut r = rng(seed);
        let calc = [DerivationCalculus::C, DerivationCalculus::K, DerivationCalculus::PasteK][c];
        let (kind, _) = calculus_for(calc.tag());
        let sig = standard_signature(&kind);
        let p = random_derivation(&mut r, calc, 4);
        let n = r.gen_range(1..=3);
        let m = random_model(&mut r, &kind, &sig, n);
        prop_assert!(valid_in(&m, &p.conclusion.formula()).unwrap(), "{}", p.conclusion);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn los_holds_for_principal_ultrafilters(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kind = StructureKind::kripke();
        let sig = standard_signature(&kind);
        let shape = FormulaShape::new(3);
        let size = r.gen_range(1..=3);
        let ms: Vec<_> = (0..size)
            .map(|_| {
                let n = r.gen_range(1..=2);
                random_model(&mut r, &kind, &sig, n)
            })
            .collect();
        let u = PrincipalUltrafilter::new(size, r.gen_range(0..size)).unwrap();
        let phi = random_formula(&mut r, &sig, &shape);
        let vals: Vec<Valuation> = ms.iter().map(|m| random_valuation(&mut r, &shape.vars, m.size())).collect();
        let (product, measure) = los_check(&ms, &u, &phi, &vals).unwrap();
        prop_assert_eq!(product, measure);
    }
}

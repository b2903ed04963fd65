use std::collections::BTreeMap;

use super::*;
use crate::hilbert::{match_axiom, onestep_axiom_instance, HilbertProof};
use crate::onestep::{congruence_rule, k_rule, preset_rules, Premise};
use crate::syntax::parse_formula;

fn sig() -> Signature {
    Signature::new()
        .with_op("dia", 1, vec![Bound::Fin(1)])
        .with_op("box", 1, vec![Bound::Inf])
        .with_op("g0", 1, vec![Bound::Fin(1)])
        .with_op("g1", 1, vec![Bound::Fin(2)])
        .with_pred("P", 1)
        .with_pred("Q", 1)
        .with_pred("R", 2)
}

fn f(s: &str) -> Formula {
    parse_formula(s, &sig()).unwrap()
}

fn seq(lhs: &[&str], rhs: &[&str]) -> Sequent {
    Sequent::new(lhs.iter().map(|s| f(s)).collect(), rhs.iter().map(|s| f(s)).collect())
}

fn k() -> RuleSet {
    preset_rules("K", 3).unwrap()
}

fn accepts(p: &Proof, rules: &RuleSet, flags: Flags) -> bool {
    let s = sig();
    let report = check_sequent_proof(p, &Calculus::new(rules, flags).with_sig(&s));
    if !report.accepted {
        eprintln!("{:?}", report.diagnostics);
    }
    report.accepted
}

#[test]
fn multiset_equality() {
    assert_eq!(seq(&["P(x)", "Q(x)"], &[]), seq(&["Q(x)", "P(x)"], &[]));
    assert_ne!(seq(&["P(x)", "P(x)"], &[]), seq(&["P(x)"], &[]));
    assert_eq!(seq(&["P(x)", "Q(x)"], &["P(y)"]).to_string(), "P(x), Q(x) => P(y)");
}

#[test]
fn axioms_and_freshness() {
    let rules = k();
    assert!(accepts(&Proof::ax(f("P(x)")), &rules, Flags::CUT_FREE));
    assert!(accepts(&Proof::req("x"), &rules, Flags::CUT_FREE));
    let good = Proof::rall(Proof::ax(f("P(y)")), "y", &f("P(y)"), "y").unwrap();
    assert!(!accepts(&good, &rules, Flags::CUT_FREE));
    let p = Proof::lall(Proof::ax(f("P(y)")), "x", &f("P(x)"), "y").unwrap();
    let p = Proof::rall(p, "y", &f("P(y)"), "y").unwrap();
    assert!(accepts(&p, &rules, Flags::CUT_FREE));
    assert_eq!(p.conclusion, seq(&["forall x. P(x)"], &["forall y. P(y)"]));
}

#[test]
fn modal_step_instance() {
    let rules = k();
    let prem = Proof::lw(Proof::ax(f("P(y)")), &f("Q(z)"));
    let p = Proof::modal(
        &k_rule(1),
        vec![f("x dia [u : P(u)]"), f("x dia [v : P(v)]")],
        "y",
        &seq(&["Q(z)"], &[]),
        vec![prem],
    );
    assert!(accepts(&p, &rules, Flags::CUT_FREE));
    assert_eq!(p.conclusion, seq(&["Q(z)", "x dia [u : P(u)]"], &["x dia [v : P(v)]"]));
    let mut bad = p.clone();
    bad.rule.eigen = Some("z".into());
    assert!(!accepts(&bad, &rules, Flags::CUT_FREE));
}

#[test]
fn cut_needs_its_flag() {
    let rules = k();
    let p = Proof::cut(Proof::ax(f("P(x)")), Proof::ax(f("P(x)")), &f("P(x)")).unwrap();
    assert!(accepts(&p, &rules, Flags::WITH_CUT));
    assert!(!accepts(&p, &rules, Flags::CUT_FREE));
    assert!(!p.is_cut_free());
}

#[test]
fn paste_step() {
    let rules = k();
    let a = f("x dia [y : P(y)]");
    let (narrowed, insts) = paste_parts(&a, 0, &["z".into()]).unwrap();
    assert_eq!(narrowed, f("x dia [y : y = z]"));
    assert_eq!(insts, vec![f("P(z)")]);
    let paste = Flags { paste: true, ..Flags::CUT_FREE };
    let leaky = Proof::paste(Proof::lw(Proof::ax(f("P(z)")), &narrowed), &a, 0, &["z".into()]).unwrap();
    assert!(!accepts(&leaky, &rules, paste));
    let q = f("Q(x)");
    let ok = Proof::paste(Proof::lw(Proof::lw(Proof::ax(q.clone()), &narrowed), &f("P(z)")), &a, 0, &["z".into()]).unwrap();
    assert_eq!(ok.conclusion, Sequent::new(vec![q.clone(), a.clone()], vec![q]));
    assert!(accepts(&ok, &rules, paste));
    assert!(!accepts(&ok, &rules, Flags::CUT_FREE));
}

#[test]
fn covering() {
    let a = seq(&["P(x)"], &["Q(x)"]);
    let b = seq(&["P(x)", "R(x, y)"], &["Q(x)", "P(y)"]);
    assert!(covers(&[a.clone()], &[b.clone()]));
    assert!(!covers(&[b], &[a]));
    let p = |l: &[&str], r: &[&str]| Premise { lhs: l.iter().map(|s| s.to_string()).collect(), rhs: r.iter().map(|s| s.to_string()).collect() };
    assert!(covers_schematic(&[p(&["a"], &[])], &[p(&["a", "b"], &["c"])]));
    assert!(!covers_schematic(&[p(&["a", "a"], &[])], &[p(&["a"], &[])]));
}

#[test]
fn congruence_absorbs_itself() {
    let rules = preset_rules("C", 1).unwrap();
    let c = congruence_rule("box");
    let w = find_absorption(&rules, &c, &[0], &c, &[0]).unwrap();
    assert!(w.verify());
    assert_eq!(w.rule.name, "C");
}

#[test]
fn k_rules_absorb_with_summed_index() {
    let rules = k();
    for (a, b) in [(1, 1), (2, 1), (1, 2), (2, 0)] {
        let w = find_absorption(&rules, &k_rule(a), &[0], &k_rule(b), &[0]).unwrap();
        assert!(w.verify());
        assert_eq!(w.rule.name, format!("K_{}", a + b - 1));
    }
}

#[test]
fn proof_substitution_keeps_height() {
    let p = Proof::lall(Proof::ax(f("R(x, w)")), "u", &f("R(x, u)"), "w").unwrap();
    let p = Proof::rall(p, "v", &f("R(x, v)"), "w").unwrap();
    assert!(accepts(&p, &k(), Flags::CUT_FREE));
    let q = substitute_proof(&p, "w", "x").unwrap();
    assert_eq!(q.height(), p.height());
    assert_eq!(q.conclusion, p.conclusion.substitute("w", "x").unwrap());
    assert!(accepts(&q, &k(), Flags::CUT_FREE));
}

#[test]
fn propositional_prover() {
    for s in [
        seq(&[], &["P(x) -> (Q(x) -> P(x))"]),
        seq(&[], &["~~P(x) -> P(x)"]),
        seq(&["P(x) /\\ Q(x)"], &["Q(x) \\/ R(x, x)"]),
    ] {
        let p = prove_propositional(&s).unwrap();
        assert_eq!(p.conclusion, s);
        assert!(accepts(&p, &k(), Flags::CUT_FREE));
    }
    assert!(prove_propositional(&seq(&[], &["P(x) -> Q(x)"])).is_none());
}

#[test]
fn small_cuts_eliminate() {
    let rules = k();
    let imp = f("P(x) -> Q(x)");
    let left = prove_propositional(&seq(&["Q(x)"], &["P(x) -> Q(x)"])).unwrap();
    let right = prove_propositional(&seq(&["P(x) -> Q(x)", "P(x)"], &["Q(x)"])).unwrap();
    let p = Proof::cut(left, right, &imp).unwrap();
    assert!(accepts(&p, &rules, Flags::WITH_CUT));
    let (q, stats) = eliminate_mcut(&p, &rules).unwrap();
    assert!(q.is_cut_free());
    assert_eq!(q.conclusion, p.conclusion);
    assert!(accepts(&q, &rules, Flags::CUT_FREE));
    assert!(stats.cases.iter().sum::<usize>() > 0);
}

#[test]
fn modal_cut_eliminates() {
    let rules = k();
    let (a, b, c) = (f("x dia [u : P(u)]"), f("x dia [u : P(u) \\/ Q(u)]"), f("x dia [u : P(u) /\\ Q(u)]"));
    let l = Proof::modal(&k_rule(1), vec![c.clone(), a.clone()], "y", &Sequent::default(), vec![prove_propositional(&seq(&["P(y) /\\ Q(y)"], &["P(y)"])).unwrap()]);
    let r = Proof::modal(&k_rule(1), vec![a.clone(), b.clone()], "y", &Sequent::default(), vec![prove_propositional(&seq(&["P(y)"], &["P(y) \\/ Q(y)"])).unwrap()]);
    let p = Proof::cut(l, r, &a).unwrap();
    assert!(accepts(&p, &rules, Flags::WITH_CUT));
    let (q, stats) = eliminate_mcut(&p, &rules).unwrap();
    assert!(q.is_cut_free());
    assert_eq!(q.conclusion, p.conclusion);
    assert!(accepts(&q, &rules, Flags::CUT_FREE));
    assert!(stats.cases[4] > 0);
}

fn embeds(text: &str, rules: &RuleSet, paste: bool) -> Proof {
    let s = sig();
    let phi = f(text);
    let m = match_axiom(&phi, &s, rules, paste).unwrap_or_else(|| panic!("no axiom for {text}"));
    let p = axiom_to_sequent(&m, &s, rules, paste).unwrap_or_else(|e| panic!("{text}: {e}"));
    assert_eq!(p.conclusion, Sequent::new(vec![], vec![phi]), "{text}");
    let flags = Flags { paste, ..Flags::CUT_FREE };
    assert!(accepts(&p, rules, flags), "{text}");
    p
}

#[test]
fn axioms_embed_cut_free() {
    let rules = k();
    for text in [
        "P(x) -> (Q(x) -> P(x))",
        "forall y. ((forall x. P(x)) -> P(y))",
        "(forall x. (P(x) -> Q(x))) -> ((forall x. P(x)) -> forall x. Q(x))",
        "P(y) -> forall x. P(y)",
        "x = x",
        "x = z -> (P(x) -> P(z))",
        "x = z -> (x = x -> z = x)",
        "x = z -> (x dia [y : P(y)] -> z dia [y : P(y)])",
        "x dia [y : P(y)] -> x dia [u : P(u)]",
    ] {
        embeds(text, &rules, false);
    }
    let sigma: BTreeMap<_, _> = [("p0".to_string(), f("P(x)")), ("p1".to_string(), f("Q(x)"))].into();
    let inst = onestep_axiom_instance(&k_rule(1), &sigma, "x", "z", &[]).unwrap();
    embeds(&crate::syntax::render_formula(&inst), &rules, false);
}

#[test]
fn bdpl_needs_paste() {
    let rules = k();
    let s = sig();
    let text = "x dia [y : P(y)] <-> exists z. (P(z) /\\ x dia [y : y = z])";
    let m = match_axiom(&f(text), &s, &rules, true).unwrap();
    assert!(matches!(axiom_to_sequent(&m, &s, &rules, false), Err(Error::UnsupportedAxiom(_))));
    embeds(text, &rules, true);
}

#[test]
fn hilbert_proofs_embed_and_eliminate() {
    let s = sig();
    let rules = k();
    let mut h = HilbertProof::default();
    let a = h.axiom(f("x = z -> (x = x -> z = x)"));
    let r = h.axiom(f("x = x"));
    let b = h.axiom(f("(x = z -> (x = x -> z = x)) -> ((x = z -> x = x) -> (x = z -> z = x))"));
    let c = h.mp(a, b);
    let d = h.axiom(f("x = x -> (x = z -> x = x)"));
    let e = h.mp(r, d);
    h.mp(e, c);
    assert_eq!(h.conclusion(), Some(&f("x = z -> z = x")));
    let p = hilbert_to_sequent(&h, &s, &rules, false).unwrap();
    assert!(accepts(&p, &rules, Flags::WITH_CUT));
    let (q, _) = eliminate_mcut(&p, &rules).unwrap();
    assert!(q.is_cut_free());
    assert_eq!(q.conclusion, seq(&[], &["x = z -> z = x"]));
    assert!(accepts(&q, &rules, Flags::CUT_FREE));

    let mut hyp = HilbertProof::default();
    hyp.hyp(f("P(x)"));
    assert!(hilbert_to_sequent(&hyp, &s, &rules, false).is_err());
}

#[test]
fn graded_bdpl_uses_a_cut() {
    let rules = preset_rules("Graded", 2).unwrap();
    let s = sig();
    let text = "x g1 [y : P(y)] <-> exists z1. exists z2. ((P(z1) /\\ P(z2)) /\\ x g1 [y : (y = z1 \\/ y = z2)])";
    let m = match_axiom(&f(text), &s, &rules, true).unwrap();
    let p = axiom_to_sequent(&m, &s, &rules, true).unwrap();
    assert_eq!(p.conclusion, seq(&[], &[text]));
    assert!(accepts(&p, &rules, Flags { paste: true, ..Flags::WITH_CUT }));
    assert!(p.count_label(Label::Cut) > 0);
}

#[test]
fn graded_rules_do_not_absorb_congruence() {
    let rules = preset_rules("Graded", 2).unwrap();
    let boxes0 = [("y".to_string(), f("P(y)"))];
    let boxes1 = [("y".to_string(), f("Q(y)"))];
    let r = derive_congruence("x", "g0", &boxes0, &boxes1, &Sequent::default(), &rules, &mut |_, s| {
        prove_propositional(s).ok_or_else(|| Error::Rejected(s.to_string()))
    });
    assert!(matches!(r, Err(Error::AbsorptionFailure { .. })));
    let c = preset_rules("C", 1).unwrap();
    let boxes0 = [("y".to_string(), f("P(y) /\\ Q(y)"))];
    let boxes1 = [("y".to_string(), f("Q(y) /\\ P(y)"))];
    let p = derive_congruence("x", "box", &boxes0, &boxes1, &Sequent::default(), &c, &mut |_, s| {
        prove_propositional(s).ok_or_else(|| Error::Rejected(s.to_string()))
    })
    .unwrap();
    assert!(accepts(&p, &c, Flags::CUT_FREE));
}

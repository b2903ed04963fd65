//! Fixture proofs and seeded proof generators shared by the acceptance
//! suite, the self-test command and the integration tests.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::evaluator::{eval, Model, Valuation};
use crate::gen::{random_formula, random_model, standard_signature, FormulaShape, Rng64};
use crate::hilbert::{onestep_axiom_instance, HilbertProof};
use crate::onestep::{congruence_rule, k_rule, preset_rules, OneStepRule, RuleSet};
use crate::sequent::{adjust_to, prove_propositional, Proof, Sequent};
use crate::structures::StructureKind;
use crate::syntax::{fresh_var, parse_formula, Formula, Signature, Var};

/// The structure a rule-set preset is sound for, and that preset.
pub fn calculus_for(tag: &str) -> (StructureKind, RuleSet) {
    let kind = match tag {
        "C" => StructureKind::Neighbourhood,
        "Graded" => StructureKind::Multiset { max: 2 },
        "Conditional" => StructureKind::Selection,
        _ => StructureKind::kripke(),
    };
    (kind, preset_rules(tag, 4).expect("known preset"))
}

/// Whether `phi` holds under every valuation of its free variables.
pub fn valid_in(m: &Model, phi: &Formula) -> Result<bool> {
    let vars: Vec<Var> = phi.free_vars().into_iter().collect();
    let n = m.size();
    let mut digits = vec![0usize; vars.len()];
    loop {
        let v = Valuation(vars.iter().cloned().zip(digits.iter().copied()).collect());
        if !eval(m, &v, phi)? {
            return Ok(false);
        }
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            return Ok(true);
        }
    }
}

/// The first of `count` random models of size 1 to 3 on which `phi` fails.
pub fn refute_on_random_models(r: &mut Rng64, kind: &StructureKind, sig: &Signature, phi: &Formula, count: usize) -> Result<Option<Model>> {
    for _ in 0..count {
        let n = r.gen_range(1..=3);
        let m = random_model(r, kind, sig, n);
        if !valid_in(&m, phi)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct HilbertFixture {
    pub name: &'static str,
    pub kind: StructureKind,
    pub rules: RuleSet,
    pub bdpl: bool,
    pub proof: HilbertProof,
}

impl HilbertFixture {
    pub fn sig(&self) -> Signature {
        standard_signature(&self.kind)
    }
}

struct Builder {
    sig: Signature,
    h: HilbertProof,
}

impl Builder {
    fn new(kind: &StructureKind) -> Self {
        Builder { sig: standard_signature(kind), h: HilbertProof::default() }
    }

    fn f(&self, text: &str) -> Formula {
        parse_formula(text, &self.sig).unwrap_or_else(|e| panic!("fixture `{text}`: {e}"))
    }

    fn ax(&mut self, text: &str) -> usize {
        let f = self.f(text);
        self.h.axiom(f)
    }

    /// `a -> a` from two weakening and one distribution instance.
    fn identity(&mut self, a: &str) -> usize {
        let a1 = self.ax(&format!("({a}) -> ((({a}) -> ({a})) -> ({a}))"));
        let a2 = self.ax(&format!("(({a}) -> ((({a}) -> ({a})) -> ({a}))) -> ((({a}) -> (({a}) -> ({a}))) -> (({a}) -> ({a})))"));
        let c = self.h.mp(a1, a2);
        let a3 = self.ax(&format!("({a}) -> (({a}) -> ({a}))"));
        self.h.mp(a3, c)
    }
}

fn single(name: &'static str, tag: &str, bdpl: bool, text: &str) -> HilbertFixture {
    let (kind, rules) = calculus_for(tag);
    let mut b = Builder::new(&kind);
    b.ax(text);
    HilbertFixture { name, kind, rules, bdpl, proof: b.h }
}

fn built(name: &'static str, tag: &str, build: impl FnOnce(&mut Builder)) -> HilbertFixture {
    let (kind, rules) = calculus_for(tag);
    let mut b = Builder::new(&kind);
    build(&mut b);
    HilbertFixture { name, kind, rules, bdpl: false, proof: b.h }
}

fn onestep(name: &'static str, tag: &str, rule: &OneStepRule, sigma: &[(&str, &str)]) -> HilbertFixture {
    let (kind, rules) = calculus_for(tag);
    let mut b = Builder::new(&kind);
    let sigma: BTreeMap<String, Formula> = sigma.iter().map(|(v, t)| (v.to_string(), b.f(t))).collect();
    let f = onestep_axiom_instance(rule, &sigma, "x", "z", &[]).expect("well-formed instance");
    b.h.axiom(f);
    HilbertFixture { name, kind, rules, bdpl: false, proof: b.h }
}

/// At least one proof per axiom scheme, over the structure matching its
/// rule set.
pub fn hilbert_corpus() -> Vec<HilbertFixture> {
    let mut out = vec![
        single("weaken", "K", false, "P(x) -> (Q(x) -> P(x))"),
        single("distribute", "K", false, "(P(x) -> (Q(x) -> R(x, y))) -> ((P(x) -> Q(x)) -> (P(x) -> R(x, y)))"),
        single("ex_falso", "K", false, "bot -> x dia [y : P(y)]"),
        single("double_negation", "K", false, "~~P(x) -> P(x)"),
        single("instance", "K", false, "(forall x. P(x)) -> P(y)"),
        single("instance_closed", "K", false, "forall y. ((forall x. R(x, y)) -> R(y, y))"),
        single("forall_distributes", "K", false, "(forall x. (P(x) -> Q(x))) -> ((forall x. P(x)) -> forall x. Q(x))"),
        single("vacuous", "K", false, "P(y) -> forall x. P(y)"),
        single("reflexivity", "K", false, "x = x"),
        single("replace_pred", "K", false, "x = z -> (P(x) -> P(z))"),
        single("replace_binary", "K", false, "x = z -> (R(x, y) -> R(z, y))"),
        single("replace_eq", "K", false, "y = z -> (x = y -> x = z)"),
        single("replace_modal", "K", false, "x = z -> (x dia [y : P(y)] -> z dia [y : P(y)])"),
        single("alpha_dia", "K", false, "x dia [y : P(y)] -> x dia [u : P(u)]"),
        single("alpha_nested", "K", false, "x dia [y : y dia [u : R(y, u)]] -> x dia [v : v dia [u : R(v, u)]]"),
        single("bdpl_dia", "K", true, "x dia [y : P(y)] <-> exists z. (P(z) /\\ x dia [y : y = z])"),
        single("replace_box", "C", false, "x = z -> (x box [y : Q(y)] -> z box [y : Q(y)])"),
        single("alpha_box", "C", false, "x box [y : P(y)] -> x box [u : P(u)]"),
        single("bdpl_g0", "Graded", true, "x g0 [y : P(y)] <-> exists z. (P(z) /\\ x g0 [y : y = z])"),
        single(
            "bdpl_g1",
            "Graded",
            true,
            "x g1 [y : P(y)] <-> exists z1. exists z2. ((P(z1) /\\ P(z2)) /\\ x g1 [y : (y = z1 \\/ y = z2)])",
        ),
        onestep("onestep_k0", "K", &k_rule(0), &[("p0", "P(x)")]),
        onestep("onestep_k1", "K", &k_rule(1), &[("p0", "P(x)"), ("p1", "Q(x)")]),
        onestep("onestep_k2", "K", &k_rule(2), &[("p0", "R(x, y)"), ("p1", "P(x)"), ("p2", "x dia [u : Q(u)]")]),
        onestep("onestep_c", "C", &congruence_rule("box"), &[("p", "P(x)"), ("q", "~~P(x)")]),
        onestep("onestep_rg1", "Graded", &crate::onestep::rg1_rule(0), &[("p", "P(x)"), ("q", "Q(x)")]),
    ];
    out.push(built("identity", "K", |b| {
        b.identity("P(x)");
    }));
    out.push(built("identity_box", "C", |b| {
        b.identity("x box [y : P(y)]");
    }));
    out.push(built("symmetry", "K", |b| {
        let a = b.ax("x = z -> (x = x -> z = x)");
        let r = b.ax("x = x");
        let d = b.ax("(x = z -> (x = x -> z = x)) -> ((x = z -> x = x) -> (x = z -> z = x))");
        let c = b.h.mp(a, d);
        let w = b.ax("x = x -> (x = z -> x = x)");
        let e = b.h.mp(r, w);
        b.h.mp(e, c);
    }));
    out.push(built("identity_generalised", "K", |b| {
        let x = vec!["x".to_string()];
        let a2 = b.ax("forall x. ((P(x) -> ((P(x) -> P(x)) -> P(x))) -> ((P(x) -> (P(x) -> P(x))) -> (P(x) -> P(x))))");
        let a1 = b.ax("forall x. (P(x) -> ((P(x) -> P(x)) -> P(x)))");
        let k = b.h.mp_under(&x, a2, a1);
        let a3 = b.ax("forall x. (P(x) -> (P(x) -> P(x)))");
        b.h.mp_under(&x, k, a3);
    }));
    out.push(built("onestep_applied", "K", |b| {
        let x = vec!["x".to_string()];
        let a2 = b.ax("forall x. ((P(x) -> ((P(x) -> P(x)) -> P(x))) -> ((P(x) -> (P(x) -> P(x))) -> (P(x) -> P(x))))");
        let a1 = b.ax("forall x. (P(x) -> ((P(x) -> P(x)) -> P(x)))");
        let k = b.h.mp_under(&x, a2, a1);
        let a3 = b.ax("forall x. (P(x) -> (P(x) -> P(x)))");
        let all = b.h.mp_under(&x, k, a3);
        let o = b.ax("forall z. ((forall x. (P(x) -> P(x))) -> (z dia [x : P(x)] -> z dia [x : P(x)]))");
        let i = b.ax("(forall z. ((forall x. (P(x) -> P(x))) -> (z dia [x : P(x)] -> z dia [x : P(x)]))) -> ((forall x. (P(x) -> P(x))) -> (w dia [x : P(x)] -> w dia [x : P(x)]))");
        let m = b.h.mp(o, i);
        b.h.mp(all, m);
    }));
    out
}

#[derive(Clone, Debug)]
pub struct CutFixture {
    pub name: String,
    pub rules: RuleSet,
    pub proof: Proof,
}

struct Kit {
    sig: Signature,
}

impl Kit {
    fn f(&self, text: &str) -> Formula {
        parse_formula(text, &self.sig).unwrap_or_else(|e| panic!("fixture `{text}`: {e}"))
    }

    fn fs(&self, texts: &[&str]) -> Vec<Formula> {
        texts.iter().map(|t| self.f(t)).collect()
    }

    fn prop(&self, lhs: &[&str], rhs: &[&str]) -> Proof {
        let s = Sequent::new(self.fs(lhs), self.fs(rhs));
        prove_propositional(&s).unwrap_or_else(|| panic!("fixture sequent `{s}` is not a tautology"))
    }

    fn ax(&self, t: &str) -> Proof {
        Proof::ax(self.f(t))
    }

    fn modal(&self, rule: &OneStepRule, principal: &[&str], ctx: (&[&str], &[&str]), premises: Vec<Proof>) -> Proof {
        Proof::modal(rule, self.fs(principal), "y", &Sequent::new(self.fs(ctx.0), self.fs(ctx.1)), premises)
    }
}

fn cut(l: Proof, r: Proof, f: &Formula) -> Proof {
    Proof::cut(l, r, f).expect("cut formula present on both sides")
}

/// Proofs with cuts between them exercising every reduction of the
/// elimination procedure.
pub fn cut_corpus() -> Vec<CutFixture> {
    let kk = Kit { sig: standard_signature(&StructureKind::kripke()) };
    let kc = Kit { sig: standard_signature(&StructureKind::Neighbourhood) };
    let k_rules = preset_rules("K", 4).expect("preset");
    let c_rules = preset_rules("C", 4).expect("preset");
    let k1 = k_rule(1);
    let cr = congruence_rule("box");
    let mut out: Vec<(&str, &RuleSet, Proof)> = Vec::new();
    let k = &kk;
    let p = k.f("P(x)");

    out.push(("axiom_left", &k_rules, cut(k.ax("P(x)"), k.prop(&["P(x)"], &["P(x) \\/ Q(x)"]), &p)));
    out.push(("axiom_right", &k_rules, cut(k.prop(&["P(x) /\\ Q(x)"], &["P(x)"]), k.ax("P(x)"), &p)));
    out.push(("weakening_left", &k_rules, cut(Proof::rw(k.ax("Q(x)"), &p), k.prop(&["P(x)"], &["P(x) \\/ Q(x)"]), &p)));
    out.push(("weakening_right", &k_rules, cut(k.prop(&["P(x) /\\ Q(x)"], &["P(x)"]), Proof::lw(k.ax("Q(x)"), &p), &p)));
    let rc = Proof::rc(Proof::rw(k.ax("P(x)"), &p), &p).expect("two copies");
    out.push(("contraction_left", &k_rules, cut(rc, k.prop(&["P(x)"], &["P(x) \\/ Q(x)"]), &p)));
    let lc = Proof::lc(Proof::lw(k.ax("P(x)"), &p), &p).expect("two copies");
    out.push(("contraction_right", &k_rules, cut(k.prop(&["P(x) /\\ Q(x)"], &["P(x)"]), lc, &p)));
    out.push((
        "multicut",
        &k_rules,
        Proof::mcut(Proof::rw(k.ax("P(x)"), &p), Proof::lw(k.ax("P(x)"), &p), &p, 2, 2).expect("copies present"),
    ));

    let q = k.f("Q(x)");
    let left = Proof::rimp(Proof::rw(k.ax("Q(x)"), &p), &q, &q).expect("present");
    out.push(("side_implication_left", &k_rules, cut(left, k.prop(&["P(x)"], &["P(x) \\/ Q(x)"]), &p)));
    let right = Proof::lall(Proof::lw(k.ax("P(y)"), &q), "u", &k.f("P(u)"), "y").expect("present");
    out.push(("side_instance_right", &k_rules, cut(k.prop(&["P(x) /\\ Q(x)"], &["Q(x)"]), right, &q)));
    let right = Proof::rall(k.prop(&["Q(x)"], &["P(y) -> P(y)"]), "u", &k.f("P(u) -> P(u)"), "y").expect("present");
    out.push(("side_generalisation_clash", &k_rules, cut(k.prop(&["Q(x) /\\ P(y)"], &["Q(x)"]), right, &q)));
    let qz = k.f("Q(z)");
    let left = k.modal(
        &k1,
        &["x dia [u : P(u)]", "x dia [u : P(u) \\/ Q(u)]"],
        (&[], &["Q(z)"]),
        vec![k.prop(&["P(y)"], &["P(y) \\/ Q(y)", "Q(z)"])],
    );
    out.push(("side_modal_left", &k_rules, cut(left, k.prop(&["Q(z)"], &["Q(z) \\/ P(z)"]), &qz)));
    let right = k.modal(
        &k1,
        &["x dia [u : P(u)]", "x dia [u : P(u) \\/ Q(u)]"],
        (&["Q(z)"], &[]),
        vec![k.prop(&["Q(z)", "P(y)"], &["P(y) \\/ Q(y)"])],
    );
    out.push(("side_modal_right", &k_rules, cut(k.prop(&["Q(z) /\\ P(z)"], &["Q(z)"]), right, &qz)));

    let imp = k.f("P(x) -> Q(x)");
    out.push((
        "implication",
        &k_rules,
        cut(k.prop(&["Q(x)"], &["P(x) -> Q(x)"]), k.prop(&["P(x) -> Q(x)", "P(x)"], &["Q(x)"]), &imp),
    ));
    let pp = k.f("P(x) -> P(x)");
    let right = Proof::limp(Proof::rw(k.ax("P(x)"), &p), Proof::lw(k.ax("P(x)"), &p), &p, &p).expect("present");
    out.push(("implication_identity", &k_rules, cut(k.prop(&[], &["P(x) -> P(x)"]), right, &pp)));
    let all = k.f("forall x. P(x)");
    let left = Proof::rall(Proof::lall(k.ax("P(y)"), "x", &p, "y").expect("present"), "x", &p, "y").expect("fresh");
    let right = Proof::lall(k.ax("P(z)"), "x", &p, "z").expect("present");
    out.push(("universal", &k_rules, cut(left.clone(), right, &all)));
    let two = k.prop(&["P(y)", "P(z)"], &["P(y) /\\ P(z)"]);
    let two = Proof::lall(two, "x", &p, "y").expect("present");
    let two = Proof::lall(two, "x", &p, "z").expect("present");
    let two = Proof::lc(two, &all).expect("two copies");
    out.push(("universal_contracted", &k_rules, cut(left, two, &all)));

    let da = k.f("x dia [u : P(u)]");
    let l = k.modal(&k1, &["x dia [u : P(u) /\\ Q(u)]", "x dia [u : P(u)]"], (&[], &[]), vec![k.prop(&["P(y) /\\ Q(y)"], &["P(y)"])]);
    let r = k.modal(&k1, &["x dia [u : P(u)]", "x dia [u : P(u) \\/ Q(u)]"], (&[], &[]), vec![k.prop(&["P(y)"], &["P(y) \\/ Q(y)"])]);
    out.push(("diamond", &k_rules, cut(l.clone(), r.clone(), &da)));
    let l2 = k.modal(
        &k_rule(2),
        &["x dia [u : P(u) /\\ Q(u)]", "x dia [u : P(u)]", "x dia [u : Q(u)]"],
        (&[], &[]),
        vec![k.prop(&["P(y) /\\ Q(y)"], &["P(y)", "Q(y)"])],
    );
    out.push(("diamond_k2_k1", &k_rules, cut(l2, r.clone(), &da)));
    let bot = k.f("x dia [u : bot]");
    let lb = k.modal(&k1, &["x dia [u : P(u) /\\ ~P(u)]", "x dia [u : bot]"], (&[], &[]), vec![k.prop(&["P(y) /\\ ~P(y)"], &["bot"])]);
    let rb = k.modal(&k_rule(0), &["x dia [u : bot]"], (&[], &[]), vec![Proof::lbot()]);
    out.push(("diamond_k1_k0", &k_rules, cut(lb, rb, &bot)));
    let lctx = k.modal(
        &k1,
        &["x dia [u : P(u)]", "x dia [u : P(u)]"],
        (&[], &["x dia [u : P(u)]"]),
        vec![k.prop(&["P(y)"], &["P(y)", "x dia [u : P(u)]"])],
    );
    out.push((
        "diamond_context_copy",
        &k_rules,
        Proof::mcut(lctx, r.clone(), &da, 2, 1).expect("copies present"),
    ));
    let rw = Proof::lw(k.prop(&["Q(x)"], &["Q(x)"]), &da);
    out.push(("diamond_weakened", &k_rules, cut(l.clone(), rw, &da)));
    out.push(("diamond_axiom", &k_rules, cut(k.ax("x dia [u : P(u)]"), r, &da)));

    let c = &kc;
    let bqp = c.f("x box [u : Q(u) /\\ P(u)]");
    let lbox = c.modal(
        &cr,
        &["x box [u : P(u) /\\ Q(u)]", "x box [u : Q(u) /\\ P(u)]"],
        (&[], &[]),
        vec![c.prop(&["P(y) /\\ Q(y)"], &["Q(y) /\\ P(y)"]), c.prop(&["Q(y) /\\ P(y)"], &["P(y) /\\ Q(y)"])],
    );
    let rbox = c.modal(
        &cr,
        &["x box [u : Q(u) /\\ P(u)]", "x box [u : ~~(Q(u) /\\ P(u))]"],
        (&[], &[]),
        vec![c.prop(&["Q(y) /\\ P(y)"], &["~~(Q(y) /\\ P(y))"]), c.prop(&["~~(Q(y) /\\ P(y))"], &["Q(y) /\\ P(y)"])],
    );
    out.push(("box", &c_rules, cut(lbox, rbox, &bqp)));
    let bp = c.f("x box [u : P(u)]");
    let lctx = c.modal(
        &cr,
        &["x box [u : ~~P(u)]", "x box [u : P(u)]"],
        (&["Q(z)"], &[]),
        vec![c.prop(&["Q(z)", "~~P(y)"], &["P(y)"]), c.prop(&["Q(z)", "P(y)"], &["~~P(y)"])],
    );
    let rctx = c.modal(
        &cr,
        &["x box [u : P(u)]", "x box [u : P(u) /\\ P(u)]"],
        (&[], &["R(z, z)"]),
        vec![c.prop(&["P(y)"], &["P(y) /\\ P(y)", "R(z, z)"]), c.prop(&["P(y) /\\ P(y)"], &["P(y)", "R(z, z)"])],
    );
    out.push(("box_with_context", &c_rules, cut(lctx, rctx, &bp)));

    let eq = k.f("x = y");
    let py = k.f("P(y)");
    let pattern = Sequent::new(vec![p.clone()], vec![k.f("P(w)")]);
    let leq = Proof::leq(false, Proof::lw(k.ax("P(x)"), &eq), "x", "y", "w", pattern).expect("pattern");
    out.push(("equality_left", &k_rules, cut(leq.clone(), k.prop(&["P(y)"], &["P(y) \\/ Q(y)"]), &py)));
    out.push(("equality_right", &k_rules, cut(k.prop(&["P(x) /\\ Q(x)"], &["P(x)"]), leq.clone(), &p)));
    let pattern = Sequent::new(vec![k.f("P(w)")], vec![py.clone()]);
    let leq2 = Proof::leq(true, Proof::lw(k.ax("P(y)"), &eq), "x", "y", "w", pattern).expect("pattern");
    out.push(("equality_second_left", &k_rules, cut(leq2, k.prop(&["P(y)"], &["P(y) \\/ Q(y)"]), &py)));
    out.push(("reflexivity", &k_rules, cut(Proof::req("x"), k.prop(&["x = x"], &["x = x \\/ P(x)"]), &k.f("x = x"))));
    let nested = cut(k.ax("P(x)"), k.prop(&["P(x)"], &["P(x) \\/ Q(x)"]), &p);
    out.push(("nested", &k_rules, cut(nested, k.prop(&["P(x) \\/ Q(x)"], &["Q(x) \\/ P(x)"]), &k.f("P(x) \\/ Q(x)"))));

    let mut corpus: Vec<CutFixture> =
        out.into_iter().map(|(name, rules, proof)| CutFixture { name: name.to_string(), rules: rules.clone(), proof }).collect();
    for h in hilbert_corpus() {
        if h.bdpl || h.proof.steps.len() < 2 {
            continue;
        }
        let sig = h.sig();
        if let Ok(p) = crate::sequent::hilbert_to_sequent(&h.proof, &sig, &h.rules, false) {
            corpus.push(CutFixture { name: format!("hilbert_{}", h.name), rules: h.rules.clone(), proof: p });
        }
    }
    corpus
}

/// The calculi random derivations are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivationCalculus {
    /// Congruence rule over neighbourhood frames.
    C,
    /// The K family over Kripke frames.
    K,
    /// The K family plus Paste on the diamond.
    PasteK,
}

impl DerivationCalculus {
    pub fn tag(self) -> &'static str {
        match self {
            DerivationCalculus::C => "C",
            DerivationCalculus::K | DerivationCalculus::PasteK => "K",
        }
    }
}

const EIGEN: &str = "v";

struct Generator<'a> {
    r: &'a mut Rng64,
    calc: DerivationCalculus,
    sig: Signature,
    rules: Vec<OneStepRule>,
}

impl Generator<'_> {
    fn formula(&mut self, depth: usize) -> Formula {
        let shape = FormulaShape::new(depth);
        random_formula(self.r, &self.sig, &shape)
    }

    fn var(&mut self) -> Var {
        ["x", "y", "z"][self.r.gen_range(0..3)].to_string()
    }

    fn leaf(&mut self) -> Proof {
        match self.r.gen_range(0..5) {
            0 => Proof::lbot(),
            1 => Proof::req(&self.var()),
            _ => {
                let f = self.formula(2);
                Proof::ax(f)
            }
        }
    }

    fn derive(&mut self, depth: usize) -> Proof {
        if depth == 0 {
            return self.leaf();
        }
        for _ in 0..8 {
            let choice = self.r.gen_range(0..10);
            let built = match choice {
                0 => Some(self.weaken(depth)),
                1 => self.right_imp(depth),
                2 => self.left_imp(depth),
                3 => self.right_all(depth),
                4 => self.left_all(depth),
                5 => self.equality(depth),
                6 => self.contract(depth),
                _ => self.modal_or_paste(depth),
            };
            if let Some(p) = built {
                return p;
            }
        }
        self.weaken(depth)
    }

    fn weaken(&mut self, depth: usize) -> Proof {
        let p = self.derive(depth - 1);
        let f = self.formula(2);
        if self.r.gen_bool(0.5) {
            Proof::lw(p, &f)
        } else {
            Proof::rw(p, &f)
        }
    }

    fn right_imp(&mut self, depth: usize) -> Option<Proof> {
        let mut p = self.derive(depth - 1);
        let a = match p.conclusion.lhs.first() {
            Some(a) if self.r.gen_bool(0.7) => a.clone(),
            _ => {
                let a = self.formula(1);
                p = Proof::lw(p, &a);
                a
            }
        };
        let b = match p.conclusion.rhs.first() {
            Some(b) => b.clone(),
            None => {
                let b = self.formula(1);
                p = Proof::rw(p, &b);
                b
            }
        };
        Proof::rimp(p, &a, &b).ok()
    }

    fn left_imp(&mut self, depth: usize) -> Option<Proof> {
        let p0 = self.derive(depth - 1);
        let p1 = self.derive(depth - 1);
        let a = p0.conclusion.rhs.first().cloned()?;
        let b = p1.conclusion.lhs.first().cloned()?;
        let ctx0 = Sequent::new(p0.conclusion.lhs.clone(), crate::sequent::remove_n(&p0.conclusion.rhs, &a, 1)?);
        let ctx1 = Sequent::new(crate::sequent::remove_n(&p1.conclusion.lhs, &b, 1)?, p1.conclusion.rhs.clone());
        let ctx = Sequent::new(union(&ctx0.lhs, &ctx1.lhs), union(&ctx0.rhs, &ctx1.rhs));
        let p0 = adjust_to(p0, &Sequent::new(ctx.lhs.clone(), [ctx.rhs.clone(), vec![a.clone()]].concat())).ok()?;
        let p1 = adjust_to(p1, &Sequent::new([ctx.lhs.clone(), vec![b.clone()]].concat(), ctx.rhs.clone())).ok()?;
        Proof::limp(p0, p1, &a, &b).ok()
    }

    fn right_all(&mut self, depth: usize) -> Option<Proof> {
        let p = self.derive(depth - 1);
        let s = &p.conclusion;
        for (i, f) in s.rhs.iter().enumerate() {
            let mut rest = s.clone();
            rest.rhs.remove(i);
            let others = rest.free_vars();
            if let Some(v) = f.free_vars().into_iter().find(|v| !others.contains(v)) {
                let x = fresh_var(&f.vars());
                let body = f.substitute(&x, &v).ok()?;
                return Proof::rall(p.clone(), &x, &body, &v).ok();
            }
        }
        None
    }

    fn left_all(&mut self, depth: usize) -> Option<Proof> {
        let p = self.derive(depth - 1);
        let f = p.conclusion.lhs.iter().find(|f| !f.free_vars().is_empty())?.clone();
        let v = f.free_vars().into_iter().next()?;
        let x = fresh_var(&f.vars());
        let body = f.substitute(&x, &v).ok()?;
        Proof::lall(p, &x, &body, &v).ok()
    }

    fn equality(&mut self, depth: usize) -> Option<Proof> {
        let p = self.derive(depth - 1);
        let x = p.conclusion.free_vars().into_iter().next()?;
        let y = self.var();
        let eq = Formula::eq(x.clone(), y.clone());
        let mut avoid = p.conclusion.free_vars();
        p.conclusion.collect_vars(&mut avoid);
        avoid.insert(y.clone());
        let w = fresh_var(&avoid);
        let pattern = p.conclusion.replace_free(&w, &x);
        if pattern.substitute(&x, &w).ok()? != p.conclusion || pattern.substitute(&y, &w).is_err() {
            return None;
        }
        Proof::leq(false, Proof::lw(p, &eq), &x, &y, &w, pattern).ok()
    }

    fn contract(&mut self, depth: usize) -> Option<Proof> {
        let p = self.derive(depth - 1);
        if let Some(f) = p.conclusion.lhs.first().cloned() {
            return Proof::lc(Proof::lw(p, &f), &f).ok();
        }
        let f = p.conclusion.rhs.first().cloned()?;
        Proof::rc(Proof::rw(p, &f), &f).ok()
    }

    fn modal_or_paste(&mut self, depth: usize) -> Option<Proof> {
        if self.calc == DerivationCalculus::PasteK && self.r.gen_bool(0.5) {
            return self.paste(depth);
        }
        self.modal()
    }

    /// One modal step over propositional premises, retrying instantiations
    /// drawn from a small pool until every premise is a tautology.
    fn modal(&mut self) -> Option<Proof> {
        let rule = self.rules[self.r.gen_range(0..self.rules.len())].clone();
        let subject = self.var();
        let pool: Vec<Formula> = ["P(e)", "Q(e)", "P(e) /\\ Q(e)", "P(e) \\/ Q(e)", "~~P(e)", "bot", "P(e) -> Q(e)", "R(e, x)"]
            .iter()
            .map(|t| parse_formula(t, &self.sig).expect("pool formula"))
            .collect();
        let ctx_l: Vec<Formula> = (0..self.r.gen_range(0..2)).map(|_| Formula::pred("Q", &["z"])).collect();
        let ctx = Sequent::new(ctx_l, vec![]);
        for _ in 0..40 {
            let sigma: BTreeMap<&str, Formula> =
                rule.svars.iter().map(|v| (v.as_str(), pool[self.r.gen_range(0..pool.len())].clone())).collect();
            let inst = |vs: &[String]| vs.iter().map(|v| sigma[v.as_str()].substitute(EIGEN, "e").expect("fresh")).collect::<Vec<_>>();
            let premises: Option<Vec<Proof>> = rule
                .premises
                .iter()
                .map(|p| {
                    let s = Sequent::new([ctx.lhs.clone(), inst(&p.lhs)].concat(), [inst(&p.rhs), ctx.rhs.clone()].concat());
                    prove_propositional(&s)
                })
                .collect();
            let Some(premises) = premises else { continue };
            let atom = |a: &crate::onestep::ModalAtom| {
                Formula::modal(subject.clone(), a.op.clone(), a.args.iter().map(|v| ("e".to_string(), sigma[v.as_str()].clone())).collect())
            };
            let principal: Vec<Formula> = rule.conclusion.lhs.iter().chain(&rule.conclusion.rhs).map(atom).collect();
            return Some(Proof::modal(&rule, principal, EIGEN, &ctx, premises));
        }
        None
    }

    fn paste(&mut self, depth: usize) -> Option<Proof> {
        let subject = self.var();
        let phi = parse_formula(["P(e)", "Q(e) /\\ P(e)", "R(e, x)", "~Q(e)"][self.r.gen_range(0..4)], &self.sig).ok()?;
        let atom = Formula::modal(subject.clone(), "dia", vec![("e".into(), phi.clone())]);
        if self.r.gen_bool(0.5) {
            let p = self.derive(depth - 1);
            let mut avoid = p.conclusion.free_vars();
            avoid.extend(atom.free_vars());
            avoid.insert("e".into());
            let z = fresh_var(&avoid);
            let (narrowed, insts) = crate::sequent::paste_parts(&atom, 0, std::slice::from_ref(&z)).ok()?;
            let mut q = Proof::lw(p, &narrowed);
            for f in &insts {
                q = Proof::lw(q, f);
            }
            return Proof::paste(q, &atom, 0, &[z]).ok();
        }
        let mut avoid = atom.free_vars();
        avoid.extend(["e".to_string(), EIGEN.to_string()]);
        let z = fresh_var(&avoid);
        avoid.insert(z.clone());
        let w = fresh_var(&avoid);
        let (narrowed, insts) = crate::sequent::paste_parts(&atom, 0, std::slice::from_ref(&z)).ok()?;
        let at_v = phi.substitute(EIGEN, "e").ok()?;
        let eq = Formula::eq(EIGEN, z.clone());
        let pattern = Sequent::new(vec![phi.substitute(&w, "e").ok()?], vec![at_v.clone()]);
        let leq = Proof::leq(false, Proof::lw(Proof::ax(at_v), &eq), EIGEN, &z, &w, pattern).ok()?;
        let k = Proof::modal(&k_rule(1), vec![narrowed, atom.clone()], EIGEN, &Sequent::new(insts, vec![]), vec![leq]);
        Proof::paste(k, &atom, 0, &[z]).ok()
    }
}

fn union(a: &[Formula], b: &[Formula]) -> Vec<Formula> {
    let mut out = a.to_vec();
    let mut rest = a.to_vec();
    for f in b {
        if let Some(i) = rest.iter().position(|g| g == f) {
            rest.remove(i);
        } else {
            out.push(f.clone());
        }
    }
    out
}

/// A random derivation of height at most about `depth` in the calculus.
pub fn random_derivation(r: &mut Rng64, calc: DerivationCalculus, depth: usize) -> Proof {
    let (kind, _) = calculus_for(calc.tag());
    let rules = match calc {
        DerivationCalculus::C => vec![congruence_rule("box")],
        _ => (0..=2).map(k_rule).collect(),
    };
    let mut g = Generator { r, calc, sig: standard_signature(&kind), rules };
    g.derive(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::rng;
    use crate::hilbert::check_hilbert;
    use crate::sequent::{check_sequent_proof, eliminate_mcut, Calculus, Flags, Label};

    fn accepted(p: &Proof, rules: &RuleSet, sig: &Signature, flags: Flags) -> bool {
        let rep = check_sequent_proof(p, &Calculus::new(rules, flags).with_sig(sig));
        if !rep.accepted {
            eprintln!("{:?}", rep.diagnostics);
        }
        rep.accepted
    }

    #[test]
    fn hilbert_fixtures_check_and_are_valid() {
        let corpus = hilbert_corpus();
        assert!(corpus.len() >= 25);
        let mut r = rng(11);
        for h in &corpus {
            let sig = h.sig();
            let rep = check_hilbert(&h.proof, &sig, &h.rules, h.bdpl);
            assert!(rep.accepted, "{}: {:?}", h.name, rep.diagnostics);
            let phi = h.proof.conclusion().unwrap();
            assert!(refute_on_random_models(&mut r, &h.kind, &sig, phi, 50).unwrap().is_none(), "{}", h.name);
        }
    }

    #[test]
    fn cut_fixtures_cover_every_case() {
        let corpus = cut_corpus();
        assert!(corpus.len() >= 30);
        let mut total = [0usize; 6];
        for c in &corpus {
            let (kind, _) = calculus_for(&c.rules.name);
            let sig = standard_signature(&kind);
            assert!(accepted(&c.proof, &c.rules, &sig, Flags::WITH_CUT), "{}", c.name);
            assert!(!c.proof.is_cut_free(), "{}", c.name);
            let (q, stats) = eliminate_mcut(&c.proof, &c.rules).unwrap_or_else(|e| panic!("{}: {e}", c.name));
            assert!(q.is_cut_free(), "{}", c.name);
            assert_eq!(q.conclusion, c.proof.conclusion, "{}", c.name);
            assert!(accepted(&q, &c.rules, &sig, Flags::CUT_FREE), "{}", c.name);
            for (t, s) in total.iter_mut().zip(stats.cases) {
                *t += s;
            }
        }
        assert!(total.iter().all(|&n| n > 0), "{total:?}");
    }

    #[test]
    fn random_derivations_check_and_are_valid() {
        let mut r = rng(5);
        for calc in [DerivationCalculus::C, DerivationCalculus::K, DerivationCalculus::PasteK] {
            let (kind, rules) = calculus_for(calc.tag());
            let sig = standard_signature(&kind);
            let flags = Flags { paste: calc == DerivationCalculus::PasteK, ..Flags::CUT_FREE };
            let (mut modal, mut paste) = (0, 0);
            for _ in 0..30 {
                let p = random_derivation(&mut r, calc, 4);
                modal += p.count_label(Label::Modal);
                paste += p.count_label(Label::Paste);
                assert!(accepted(&p, &rules, &sig, flags), "{}", p.conclusion);
                let phi = p.conclusion.formula();
                assert!(refute_on_random_models(&mut r, &kind, &sig, &phi, 20).unwrap().is_none(), "{}", p.conclusion);
            }
            assert!(modal > 0);
            assert_eq!(paste > 0, calc == DerivationCalculus::PasteK);
        }
    }
}

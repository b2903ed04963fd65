//! The acceptance criteria as executable checks with per-item outcomes.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::corpus::{calculus_for, cut_corpus, hilbert_corpus, random_derivation, refute_on_random_models, DerivationCalculus};
use crate::error::Result;
use crate::evaluator::{eval, eval_cml, eval_hybrid, Model, Valuation};
use crate::gen::{random_cml, random_formula, random_model, random_valuation, rng, standard_signature, unary_signature, FormulaShape, Rng64};
use crate::hilbert::check_hilbert;
use crate::modeltheory::{los_check, quasi_ultraproduct, verify_transfer, PrincipalUltrafilter};
use crate::onestep::{a1_rule, a2_rule, congruence_rule, k_rule, one_step_sound, rck_rule, re_rule, rg1_rule, rn_rule, OneStepRule};
use crate::sequent::{check_sequent_proof, eliminate_mcut, hilbert_to_sequent, Calculus, Flags, Label};
use crate::structures::{check_bounded, check_naturality_all, Lifting, StructureKind, Value};
use crate::syntax::{parse_hybrid, render_formula, Signature};
use crate::translate::{is_single_variable_fragment, ht, st_cml, st_hybrid, st_hybrid_naive};

pub const CRITERIA: [&str; 12] = [
    "substitution lemma",
    "standard translation",
    "hybrid correspondence",
    "single-variable fragment",
    "one-step soundness",
    "boundedness",
    "lifting naturality",
    "Hilbert soundness",
    "sequent soundness",
    "cut elimination",
    "Hilbert to sequent",
    "Los at finite scale",
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} ({} checks, {:.2}s){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checked,
            self.elapsed.as_secs_f64(),
            if self.detail.is_empty() { String::new() } else { format!(": {}", self.detail) }
        )
    }
}

/// Count of checks performed, or the first failure.
type Tally = std::result::Result<usize, String>;

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(limit: Option<u64>, elapsed: Duration) -> Option<String> {
    limit.filter(|&s| elapsed > Duration::from_secs(s)).map(|s| format!("took longer than {s}s"))
}

/// Runs criterion `id` (1-based).
pub fn run(id: usize, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut r = rng(seed.wrapping_add(id as u64));
    let (tally, limit) = match id {
        1 => (substitution(&mut r), Some(10)),
        2 => (standard_translation(&mut r).map(|(n, _)| n), None),
        3 => (hybrid(&mut r), None),
        4 => (standard_translation(&mut r).map(|(_, n)| n), None),
        5 => (one_step(), Some(60)),
        6 => (boundedness(), None),
        7 => (naturality(), None),
        8 => (hilbert_soundness(&mut r), None),
        9 => (sequent_soundness(&mut r), None),
        10 => (cut_elimination(), Some(30)),
        11 => (hilbert_to_sequent_all(), None),
        12 => (los(&mut r), None),
        _ => (fail(format!("no criterion {id}")), None),
    };
    let elapsed = start.elapsed();
    let (passed, checked, detail) = match tally {
        Ok(n) => match within(limit, elapsed) {
            Some(late) => (false, n, late),
            None => (true, n, String::new()),
        },
        Err(e) => (false, 0, e),
    };
    Outcome { id, title: CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"), passed, checked, detail, elapsed }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=CRITERIA.len()).map(|id| run(id, seed)).collect()
}

fn small_model(r: &mut Rng64, kind: &StructureKind, sig: &Signature) -> Model {
    let n = r.gen_range(1..=3);
    random_model(r, kind, sig, n)
}

fn substitution(r: &mut Rng64) -> Tally {
    let kinds = [StructureKind::kripke(), StructureKind::Neighbourhood];
    let shape = FormulaShape::new(4);
    let mut applicable = 0;
    for i in 0..1000 {
        let kind = &kinds[i % 2];
        let sig = standard_signature(kind);
        let m = small_model(r, kind, &sig);
        let phi = random_formula(r, &sig, &shape);
        let v = random_valuation(r, &shape.vars, m.size());
        let x = &shape.vars[r.gen_range(0..3)];
        let t = &shape.vars[r.gen_range(0..3)];
        if !phi.substitutable(t, x) {
            continue;
        }
        applicable += 1;
        let lhs = lift(eval(&m, &v, &lift(phi.substitute(t, x))?))?;
        let rhs = lift(eval(&m, &v.with(x.clone(), v.get(t)), &phi))?;
        if lhs != rhs {
            return fail(format!("[{t}/{x}] on `{}`", render_formula(&phi)));
        }
    }
    Ok(applicable)
}

/// Agreement checks and fragment checks for the modal standard translation.
fn standard_translation(r: &mut Rng64) -> std::result::Result<(usize, usize), String> {
    let kinds = [StructureKind::kripke(), StructureKind::Neighbourhood, StructureKind::Multiset { max: 2 }];
    let (mut agree, mut fragment) = (0, 0);
    for i in 0..500 {
        let kind = &kinds[i % 3];
        let sig = unary_signature(kind);
        let m = small_model(r, kind, &sig);
        let phi = random_cml(r, &sig, 3);
        let st = lift(st_cml(&phi, "x", &sig))?;
        if !is_single_variable_fragment(&st, "x") {
            return fail(format!("`{}` leaves the single-variable fragment", render_formula(&st)));
        }
        fragment += 1;
        for c in 0..m.size() {
            if lift(eval_cml(&m, c, &phi))? != lift(eval(&m, &Valuation::from([("x", c)]), &st))? {
                return fail(format!("state {c} of a {} model on `{}`", kind.tag(), render_formula(&st)));
            }
            agree += 1;
        }
    }
    Ok((agree, fragment))
}

fn hybrid(r: &mut Rng64) -> Tally {
    let kinds = [StructureKind::kripke(), StructureKind::Neighbourhood, StructureKind::Multiset { max: 2 }];
    let shape = FormulaShape::new(3).quantifier_free();
    let mut checked = 0;
    for i in 0..500 {
        let kind = &kinds[i % 3];
        let sig = unary_signature(kind);
        let m = small_model(r, kind, &sig);
        let phi = random_formula(r, &sig, &shape);
        let v = random_valuation(r, &shape.vars, m.size());
        let h = lift(ht(&phi))?;
        let st = lift(st_hybrid(&h, "w"))?;
        let direct = lift(eval(&m, &v, &phi))?;
        for c in 0..m.size() {
            let hy = lift(eval_hybrid(&m, &v, c, &h))?;
            let back = lift(eval(&m, &v.with("w", c), &st))?;
            if direct != hy || hy != back {
                return fail(format!("`{}` at state {c}", render_formula(&phi)));
            }
            checked += 1;
        }
    }
    let (m, h) = capture_fixture();
    let safe = lift(st_hybrid(&h, "x"))?;
    let naive = st_hybrid_naive(&h, "x");
    let at_a = Valuation::from([("x", 0)]);
    if lift(eval(&m, &at_a, &safe))? != lift(eval_hybrid(&m, &at_a, 0, &h))? {
        return fail("capture fixture: safe translation disagrees with hybrid satisfaction");
    }
    if lift(eval(&m, &at_a, &safe))? == lift(eval(&m, &at_a, &naive))? {
        return fail("capture fixture: naive clause is indistinguishable");
    }
    Ok(checked + 1)
}

/// Two states, `a → b`, and `down z. dia z`, which holds only at states with
/// a loop.
pub fn capture_fixture() -> (Model, crate::syntax::Hybrid) {
    let sig = unary_signature(&StructureKind::kripke());
    let gamma = BTreeMap::from([
        (0, Value::Kripke { succ: 0b10, atoms: Default::default() }),
        (1, Value::Kripke { succ: 0, atoms: Default::default() }),
    ]);
    let m = Model::checked(StructureKind::kripke(), sig.clone(), vec!["a".into(), "b".into()], gamma, BTreeMap::new())
        .expect("fixture model");
    (m, parse_hybrid("down z. dia z", &sig).expect("fixture formula"))
}

/// Each preset rule with the structure and the carrier sizes it is checked on.
pub fn soundness_targets() -> Vec<(OneStepRule, StructureKind, usize)> {
    let mut out = vec![(congruence_rule("box"), StructureKind::Neighbourhood, 3)];
    out.extend((0..=3).map(|n| (k_rule(n), StructureKind::kripke(), 2)));
    let graded = StructureKind::Multiset { max: 2 };
    out.extend((0..=2).map(|n| (rg1_rule(n), graded.clone(), 2)));
    for a in 0..=2 {
        for b in 0..=2 {
            out.push((a1_rule(a, b), graded.clone(), 2));
            out.push((a2_rule(a, b), graded.clone(), 2));
        }
    }
    out.push((rn_rule(), graded, 2));
    out.extend((0..=2).map(|n| (rck_rule(n), StructureKind::Selection, 2)));
    out.push((re_rule(), StructureKind::Selection, 2));
    out
}

fn one_step() -> Tally {
    let mut checked = 0;
    for (rule, kind, max) in soundness_targets() {
        for n in 1..=max {
            if let Some(cx) = lift(one_step_sound(&rule, &kind, n))? {
                return fail(format!("{} over {} with |C| = {n}: {:?}", rule.name, kind.tag(), cx));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Expected boundedness facts: operator, argument, bound, whether it holds.
pub fn boundedness_table() -> Vec<(StructureKind, Lifting, usize, usize, bool)> {
    let mut out = vec![
        (StructureKind::kripke(), Lifting::Dia, 0, 1, true),
        (StructureKind::kripke(), Lifting::Dia, 0, 0, false),
        (StructureKind::Selection, Lifting::Cond, 1, 1, true),
    ];
    for k in 0..=2u32 {
        let g = StructureKind::Multiset { max: 3 };
        out.push((g.clone(), Lifting::Graded(k), 0, k as usize + 1, true));
        out.push((g, Lifting::Graded(k), 0, k as usize, false));
    }
    out.extend((0..=3).map(|k| (StructureKind::Neighbourhood, Lifting::Box, 0, k, false)));
    out
}

fn boundedness() -> Tally {
    let mut checked = 0;
    for (kind, l, i, k, holds) in boundedness_table() {
        let max = if kind == StructureKind::Selection { 2 } else { 3 };
        let mut witness = None;
        for n in 1..=max {
            if let Some(w) = lift(check_bounded(&kind, &l, i, k, n))? {
                witness = Some((n, w));
                break;
            }
            checked += 1;
        }
        match (holds, witness) {
            (true, Some((n, w))) => return fail(format!("{l:?} is not {k}-bounded at |C| = {n}: {w:?}")),
            (false, None) => return fail(format!("no counterexample to {k}-boundedness of {l:?}")),
            _ => {}
        }
    }
    Ok(checked)
}

/// Every shipped lifting with the carrier bound used for its naturality check.
pub fn shipped_liftings() -> Vec<(StructureKind, Lifting, usize)> {
    let kripke = StructureKind::Kripke { atoms: vec!["a".into()] };
    let graded = StructureKind::Multiset { max: 2 };
    vec![
        (kripke.clone(), Lifting::Dia, 3),
        (kripke.clone(), Lifting::Box, 3),
        (kripke, Lifting::Atom("a".into()), 3),
        (StructureKind::Neighbourhood, Lifting::Box, 3),
        (StructureKind::Neighbourhood, Lifting::Dia, 3),
        (graded.clone(), Lifting::Graded(0), 3),
        (graded.clone(), Lifting::Graded(1), 3),
        (graded.clone(), Lifting::Presburger { coeffs: vec![1, 2], k: 2 }, 3),
        (StructureKind::Dist { k: 2 }, Lifting::Prob(1), 3),
        (StructureKind::Selection, Lifting::Cond, 2),
        (
            StructureKind::Product(vec![StructureKind::kripke(), StructureKind::Neighbourhood]),
            Lifting::Component(1, Box::new(Lifting::Box)),
            2,
        ),
    ]
}

fn naturality() -> Tally {
    let mut checked = 0;
    for (kind, l, max) in shipped_liftings() {
        if let Some(w) = lift(check_naturality_all(&kind, &l, max))? {
            return fail(format!("{l:?} over {}: {w:?}", kind.tag()));
        }
        checked += 1;
    }
    Ok(checked)
}

fn hilbert_soundness(r: &mut Rng64) -> Tally {
    let corpus = hilbert_corpus();
    if corpus.len() < 25 {
        return fail(format!("only {} fixtures", corpus.len()));
    }
    let mut schemes = std::collections::BTreeSet::new();
    for h in &corpus {
        let sig = h.sig();
        let rep = check_hilbert(&h.proof, &sig, &h.rules, h.bdpl);
        if !rep.accepted {
            return fail(format!("{} rejected: {:?}", h.name, rep.diagnostics));
        }
        schemes.extend(rep.matches.iter().flatten().map(|m| m.name()));
        let phi = rep.conclusion.expect("accepted proofs have a conclusion");
        if let Some(m) = lift(refute_on_random_models(r, &h.kind, &sig, &phi, 50))? {
            return fail(format!("{} fails on a model with {} states", h.name, m.size()));
        }
    }
    let expected = ["En1", "En2", "En3", "En4", "En5", "En6.1", "En6.2", "Alpha", "Onestep", "BdPL"];
    if let Some(missing) = expected.iter().find(|s| !schemes.contains(*s)) {
        return fail(format!("scheme {missing} is not exercised"));
    }
    Ok(corpus.len())
}

fn sequent_soundness(r: &mut Rng64) -> Tally {
    let plan = [(DerivationCalculus::C, 100), (DerivationCalculus::K, 100), (DerivationCalculus::PasteK, 50)];
    let mut checked = 0;
    for (calc, count) in plan {
        let (kind, rules) = calculus_for(calc.tag());
        let sig = standard_signature(&kind);
        let flags = Flags { paste: calc == DerivationCalculus::PasteK, ..Flags::CUT_FREE };
        for _ in 0..count {
            let p = random_derivation(r, calc, 4);
            let rep = check_sequent_proof(&p, &Calculus::new(&rules, flags).with_sig(&sig));
            if !rep.accepted {
                return fail(format!("generated derivation of `{}` rejected: {:?}", p.conclusion, rep.diagnostics));
            }
            if let Some(m) = lift(refute_on_random_models(r, &kind, &sig, &p.conclusion.formula(), 50))? {
                return fail(format!("`{}` fails on a model with {} states", p.conclusion, m.size()));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn cut_elimination() -> Tally {
    let corpus = cut_corpus();
    if corpus.len() < 30 {
        return fail(format!("only {} fixtures", corpus.len()));
    }
    let mut cases = [0usize; 6];
    for c in &corpus {
        let sig = standard_signature(&calculus_for(&c.rules.name).0);
        let (q, stats) = eliminate_mcut(&c.proof, &c.rules).map_err(|e| format!("{}: {e}", c.name))?;
        if !q.is_cut_free() || q.conclusion != c.proof.conclusion {
            return fail(format!("{}: output keeps a cut or changes the end sequent", c.name));
        }
        let rep = check_sequent_proof(&q, &Calculus::new(&c.rules, Flags::CUT_FREE).with_sig(&sig));
        if !rep.accepted {
            return fail(format!("{}: output rejected: {:?}", c.name, rep.diagnostics));
        }
        for (t, s) in cases.iter_mut().zip(stats.cases) {
            *t += s;
        }
    }
    if let Some(i) = cases.iter().position(|&n| n == 0) {
        return fail(format!("reduction case {} never used", i + 1));
    }
    Ok(corpus.len())
}

fn hilbert_to_sequent_all() -> Tally {
    let mut checked = 0;
    for h in hilbert_corpus() {
        let sig = h.sig();
        let p = hilbert_to_sequent(&h.proof, &sig, &h.rules, h.bdpl).map_err(|e| format!("{}: {e}", h.name))?;
        let flags = Flags { paste: h.bdpl, ..Flags::WITH_CUT };
        let rep = check_sequent_proof(&p, &Calculus::new(&h.rules, flags).with_sig(&sig));
        if !rep.accepted {
            return fail(format!("{}: translation rejected: {:?}", h.name, rep.diagnostics));
        }
        if p.count_label(Label::Paste) == 0 {
            let (q, _) = eliminate_mcut(&p, &h.rules).map_err(|e| format!("{}: {e}", h.name))?;
            let rep = check_sequent_proof(&q, &Calculus::new(&h.rules, Flags::CUT_FREE).with_sig(&sig));
            if !q.is_cut_free() || q.conclusion != p.conclusion || !rep.accepted {
                return fail(format!("{}: elimination output is not a cut-free proof of the end sequent", h.name));
            }
        }
        checked += 1;
    }
    Ok(checked)
}

/// Every Kripke coalgebra on one or two states, over `dia` and `box`.
pub fn small_kripke_models() -> Vec<Model> {
    let kind = StructureKind::kripke();
    let sig = Signature { preds: Default::default(), ..standard_signature(&kind) };
    let mut out = Vec::new();
    for n in 1..=2usize {
        let codes = 1usize << (n * n);
        for code in 0..codes {
            let gamma = (0..n)
                .map(|c| (c, Value::Kripke { succ: ((code >> (c * n)) & ((1 << n) - 1)) as u64, atoms: Default::default() }))
                .collect();
            let states = (0..n).map(|c| format!("s{c}")).collect();
            out.push(Model::checked(kind.clone(), sig.clone(), states, gamma, BTreeMap::new()).expect("well-formed"));
        }
    }
    out
}

fn los(r: &mut Rng64) -> Tally {
    let kind = StructureKind::kripke();
    let sig = standard_signature(&kind);
    let shape = FormulaShape::new(4);
    let mut checked = 0;
    for k in 0..500 {
        let size = r.gen_range(1..=3);
        let ms: Vec<Model> = (0..size)
            .map(|_| {
                let n = r.gen_range(1..=2);
                random_model(r, &kind, &sig, n)
            })
            .collect();
        let u = lift(PrincipalUltrafilter::new(size, k % size))?;
        let phi = random_formula(r, &sig, &shape);
        let vals: Vec<Valuation> = ms.iter().map(|m| random_valuation(r, &shape.vars, m.size())).collect();
        let (product, measure) = lift(los_check(&ms, &u, &phi, &vals))?;
        if product != measure {
            return fail(format!("`{}` on draw {k}", render_formula(&phi)));
        }
        checked += 1;
    }
    // Up to reordering of the index set: the principal model first, the
    // others as a multiset.
    let base = small_kripke_models();
    let mut families: Vec<Vec<usize>> = (0..base.len()).map(|i| vec![i]).collect();
    for a in 0..base.len() {
        for b in 0..base.len() {
            families.push(vec![a, b]);
            for c in b..base.len() {
                families.push(vec![a, b, c]);
            }
        }
    }
    for fam in families {
        let ms: Vec<Model> = fam.iter().map(|&i| base[i].clone()).collect();
        let u = lift(PrincipalUltrafilter::new(ms.len(), 0))?;
        let qu = lift(quasi_ultraproduct(&ms, &u))?;
        if let Err(v) = lift(verify_transfer(&ms, &qu))? {
            return fail(format!("transfer fails for models {fam:?}: {v:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}

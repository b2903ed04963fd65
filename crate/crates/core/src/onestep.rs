//! One-step logic: rank-1 formulas over subsets of a carrier, one-step rules
//! in sequent format, and exhaustive one-step satisfiability and soundness.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{full, member, subsets, Mask, StructureKind, Value};

pub type SVar = String;

pub const DEFAULT_BOUND: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModalAtom {
    pub op: String,
    pub args: Vec<SVar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Premise {
    pub lhs: Vec<SVar>,
    pub rhs: Vec<SVar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conclusion {
    pub lhs: Vec<ModalAtom>,
    pub rhs: Vec<ModalAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneStepRule {
    pub name: String,
    pub svars: Vec<SVar>,
    pub premises: Vec<Premise>,
    pub conclusion: Conclusion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub name: String,
    pub bound: usize,
    pub rules: Vec<OneStepRule>,
}

fn atom(op: impl Into<String>, args: &[&str]) -> ModalAtom {
    ModalAtom { op: op.into(), args: args.iter().map(|s| s.to_string()).collect() }
}

fn prem(lhs: &[&str], rhs: &[&str]) -> Premise {
    Premise { lhs: lhs.iter().map(|s| s.to_string()).collect(), rhs: rhs.iter().map(|s| s.to_string()).collect() }
}

impl OneStepRule {
    fn build(name: String, premises: Vec<Premise>, lhs: Vec<ModalAtom>, rhs: Vec<ModalAtom>) -> Self {
        let mut svars = Vec::new();
        for a in lhs.iter().chain(&rhs) {
            for v in &a.args {
                if !svars.contains(v) {
                    svars.push(v.clone());
                }
            }
        }
        OneStepRule { name, svars, premises, conclusion: Conclusion { lhs, rhs } }
    }

    /// Linearity side conditions: conclusion variables are pairwise distinct
    /// and every premise variable occurs in the conclusion.
    pub fn check_linear(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for a in self.conclusion.lhs.iter().chain(&self.conclusion.rhs) {
            for v in &a.args {
                if !seen.insert(v) {
                    return Err(Error::Rejected(format!("rule {}: `{v}` repeated in the conclusion", self.name)));
                }
            }
        }
        for p in &self.premises {
            if let Some(v) = p.lhs.iter().chain(&p.rhs).find(|v| !seen.contains(v)) {
                return Err(Error::Rejected(format!("rule {}: premise variable `{v}` absent from the conclusion", self.name)));
            }
        }
        if seen.len() != self.svars.len() || self.svars.iter().any(|v| !seen.contains(v)) {
            return Err(Error::Rejected(format!("rule {}: svars do not match the conclusion", self.name)));
        }
        Ok(())
    }

    pub fn principal_atoms(&self) -> usize {
        self.conclusion.lhs.len() + self.conclusion.rhs.len()
    }

    /// The rule with every schematic variable renamed through `f`.
    pub fn rename(&self, f: impl Fn(&str) -> String) -> OneStepRule {
        let ra = |a: &ModalAtom| ModalAtom { op: a.op.clone(), args: a.args.iter().map(|v| f(v)).collect() };
        OneStepRule {
            name: self.name.clone(),
            svars: self.svars.iter().map(|v| f(v)).collect(),
            premises: self
                .premises
                .iter()
                .map(|p| Premise { lhs: p.lhs.iter().map(|v| f(v)).collect(), rhs: p.rhs.iter().map(|v| f(v)).collect() })
                .collect(),
            conclusion: Conclusion {
                lhs: self.conclusion.lhs.iter().map(ra).collect(),
                rhs: self.conclusion.rhs.iter().map(ra).collect(),
            },
        }
    }
}

pub fn congruence_rule(op: &str) -> OneStepRule {
    OneStepRule::build(
        "C".into(),
        vec![prem(&["p"], &["q"]), prem(&["q"], &["p"])],
        vec![atom(op, &["p"])],
        vec![atom(op, &["q"])],
    )
}

pub fn k_rule(n: usize) -> OneStepRule {
    let qs: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let qrefs: Vec<&str> = qs.iter().map(String::as_str).collect();
    OneStepRule::build(
        format!("K_{n}"),
        vec![prem(&["p0"], &qrefs)],
        vec![atom("dia", &["p0"])],
        qrefs.iter().map(|q| atom("dia", &[q])).collect(),
    )
}

fn g(n: usize) -> String {
    format!("g{n}")
}

pub fn rg1_rule(n: usize) -> OneStepRule {
    OneStepRule::build(format!("RG1_{n}"), vec![prem(&["p"], &["q"])], vec![atom(g(n + 1), &["p"])], vec![atom(g(n), &["q"])])
}

pub fn a1_rule(n1: usize, n2: usize) -> OneStepRule {
    OneStepRule::build(
        format!("A1_{n1}_{n2}"),
        vec![prem(&["r"], &["p", "q"])],
        vec![atom(g(n1 + n2), &["r"])],
        vec![atom(g(n1), &["p"]), atom(g(n2), &["q"])],
    )
}

pub fn a2_rule(n1: usize, n2: usize) -> OneStepRule {
    OneStepRule::build(
        format!("A2_{n1}_{n2}"),
        vec![prem(&["p"], &["r"]), prem(&["q"], &["r"]), prem(&["p", "q"], &["s"])],
        vec![atom(g(n1), &["p"]), atom(g(n2), &["q"])],
        vec![atom(g(n1 + n2 + 1), &["r"]), atom(g(0), &["s"])],
    )
}

pub fn rn_rule() -> OneStepRule {
    OneStepRule::build("RN".into(), vec![prem(&["p"], &[])], vec![atom(g(0), &["p"])], vec![])
}

pub fn rck_rule(n: usize) -> OneStepRule {
    let qs: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let rs: Vec<String> = (1..=n).map(|i| format!("r{i}")).collect();
    let mut premises = vec![prem(&["p"], &qs.iter().map(String::as_str).collect::<Vec<_>>())];
    for r in &rs {
        premises.push(prem(&["r0"], &[r]));
        premises.push(prem(&[r], &["r0"]));
    }
    OneStepRule::build(
        format!("RCK_{n}"),
        premises,
        vec![atom("cond", &["r0", "p"])],
        qs.iter().zip(&rs).map(|(q, r)| atom("cond", &[r, q])).collect(),
    )
}

pub fn re_rule() -> OneStepRule {
    OneStepRule::build(
        "RE".into(),
        vec![prem(&["p"], &["q"]), prem(&["q"], &["p"]), prem(&["r"], &["s"]), prem(&["s"], &["r"])],
        vec![atom("cond", &["p", "r"])],
        vec![atom("cond", &["q", "s"])],
    )
}

/// Builds an indexed family member such as `K_3` or `A2_1_0` from its name.
pub fn family_rule(name: &str) -> Option<OneStepRule> {
    let mut parts = name.split('_');
    let head = parts.next()?;
    let idx: Vec<usize> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
    match (head, idx.as_slice()) {
        ("K", [n]) => Some(k_rule(*n)),
        ("RG1", [n]) => Some(rg1_rule(*n)),
        ("A1", [a, b]) => Some(a1_rule(*a, *b)),
        ("A2", [a, b]) => Some(a2_rule(*a, *b)),
        ("RCK", [n]) => Some(rck_rule(*n)),
        ("C", []) => Some(congruence_rule("box")),
        ("RN", []) => Some(rn_rule()),
        ("RE", []) => Some(re_rule()),
        _ => None,
    }
}

/// Sum of the numeric indices in a rule name.
pub fn index_sum(name: &str) -> usize {
    name.split('_').skip(1).filter_map(|p| p.parse::<usize>().ok()).sum()
}

/// Preset rule sets with indexed families instantiated up to `bound`.
pub fn preset_rules(tag: &str, bound: usize) -> Result<RuleSet> {
    let rules = match tag {
        "C" => vec![congruence_rule("box")],
        "K" => (0..=bound).map(k_rule).collect(),
        "Graded" => {
            let mut rs: Vec<OneStepRule> = (0..=bound).map(rg1_rule).collect();
            for n1 in 0..=bound {
                for n2 in 0..=bound {
                    rs.push(a1_rule(n1, n2));
                    rs.push(a2_rule(n1, n2));
                }
            }
            rs.push(rn_rule());
            rs
        }
        "Conditional" => {
            let mut rs: Vec<OneStepRule> = (0..=bound).map(rck_rule).collect();
            rs.push(re_rule());
            rs
        }
        other => return Err(Error::UnknownRuleSet(other.into())),
    };
    Ok(RuleSet { name: tag.into(), bound, rules })
}

impl RuleSet {
    pub fn get(&self, name: &str) -> Option<&OneStepRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// A rule of this set by name, including family members past the bound.
    pub fn resolve(&self, name: &str) -> Option<OneStepRule> {
        if let Some(r) = self.get(name) {
            return Some(r.clone());
        }
        let r = family_rule(name)?;
        let expected = preset_rules(&self.name, 0).ok()?;
        let family = |n: &str| n.split('_').next().map(str::to_string);
        expected.rules.iter().any(|e| family(&e.name) == family(name)).then_some(r)
    }

    pub fn ops(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| r.conclusion.lhs.iter().chain(&r.conclusion.rhs).map(|a| a.op.clone()))
            .collect()
    }
}

/// Rank-1 formulas whose modal arguments are already subsets of the carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rank1 {
    Modal(String, Vec<Mask>),
    Bot,
    Imp(Box<Rank1>, Box<Rank1>),
}

impl Rank1 {
    pub fn modal(op: &str, args: &[Mask]) -> Self {
        Rank1::Modal(op.into(), args.to_vec())
    }

    pub fn imp(a: Rank1, b: Rank1) -> Self {
        Rank1::Imp(Box::new(a), Box::new(b))
    }

    pub fn not(a: Rank1) -> Self {
        Rank1::imp(a, Rank1::Bot)
    }
}

pub fn rank1_holds(kind: &StructureKind, n: usize, t: &Value, f: &Rank1) -> Result<bool> {
    Ok(match f {
        Rank1::Bot => false,
        Rank1::Imp(a, b) => !rank1_holds(kind, n, t, a)? || rank1_holds(kind, n, t, b)?,
        Rank1::Modal(op, args) => {
            let l = kind.resolve(op)?;
            if l.arity() != args.len() {
                return Err(Error::Arity { name: op.clone(), expected: l.arity(), found: args.len() });
            }
            if args.iter().any(|&a| a & !full(n) != 0) {
                return Err(Error::Model("argument outside the carrier".into()));
            }
            member(&l, n, t, args)
        }
    })
}

/// First enumerated value satisfying every formula in `xi`.
pub fn one_step_sat(kind: &StructureKind, n: usize, xi: &[Rank1]) -> Result<Option<Value>> {
    for t in kind.enumerate(n)? {
        let mut ok = true;
        for f in xi {
            if !rank1_holds(kind, n, &t, f)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessCounterexample {
    pub tau: BTreeMap<SVar, Mask>,
    pub value: Value,
}

fn premise_holds(p: &Premise, tau: &BTreeMap<SVar, Mask>, n: usize) -> bool {
    let meet = p.lhs.iter().fold(full(n), |m, v| m & tau[v]);
    let join = p.rhs.iter().fold(0, |m, v| m | tau[v]);
    meet & !join == 0
}

/// Exhaustive one-step soundness over all valuations of the rule's variables.
pub fn one_step_sound(rule: &OneStepRule, kind: &StructureKind, n: usize) -> Result<Option<SoundnessCounterexample>> {
    let values = kind.enumerate(n)?;
    let lift = |a: &ModalAtom| kind.resolve(&a.op).map(|l| (l, a.args.clone()));
    let lhs = rule.conclusion.lhs.iter().map(lift).collect::<Result<Vec<_>>>()?;
    let rhs = rule.conclusion.rhs.iter().map(lift).collect::<Result<Vec<_>>>()?;
    let nsub = subsets(n).count();
    let total = nsub.checked_pow(rule.svars.len() as u32).ok_or_else(|| Error::CapExceeded("too many valuations".into()))?;
    for code in 0..total {
        let mut tau = BTreeMap::new();
        let mut rest = code;
        for v in &rule.svars {
            tau.insert(v.clone(), (rest % nsub) as Mask);
            rest /= nsub;
        }
        if !rule.premises.iter().all(|p| premise_holds(p, &tau, n)) {
            continue;
        }
        let args_of = |args: &[SVar]| args.iter().map(|v| tau[v]).collect::<Vec<_>>();
        for t in &values {
            let l_ok = lhs.iter().all(|(l, a)| member(l, n, t, &args_of(a)));
            let r_ok = rhs.iter().any(|(l, a)| member(l, n, t, &args_of(a)));
            if l_ok && !r_ok {
                return Ok(Some(SoundnessCounterexample { tau, value: t.clone() }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_linear() {
        for tag in ["C", "K", "Graded", "Conditional"] {
            for r in preset_rules(tag, 3).unwrap().rules {
                r.check_linear().unwrap();
            }
        }
        assert!(preset_rules("S5", 2).is_err());
    }

    #[test]
    fn preset_shapes() {
        let c = preset_rules("C", 4).unwrap();
        assert_eq!(c.rules.len(), 1);
        assert_eq!(c.rules[0].premises.len(), 2);
        let k = preset_rules("K", 4).unwrap();
        let k0 = k.get("K_0").unwrap();
        assert!(k0.premises[0].rhs.is_empty() && k0.conclusion.rhs.is_empty());
        let gr = preset_rules("Graded", 2).unwrap();
        let rn = gr.get("RN").unwrap();
        assert_eq!(rn.premises, vec![prem(&["p"], &[])]);
    }

    #[test]
    fn rank1_examples() {
        let k = StructureKind::kripke();
        let t = Value::Kripke { succ: 0b10, atoms: BTreeSet::new() };
        assert!(rank1_holds(&k, 2, &t, &Rank1::modal("dia", &[0b10])).unwrap());
        assert!(!rank1_holds(&k, 2, &t, &Rank1::Bot).unwrap());
        let sigma = Value::Nbhd(BTreeSet::from([0b01]));
        let f = Rank1::not(Rank1::modal("box", &[0b10]));
        assert!(rank1_holds(&StructureKind::Neighbourhood, 2, &sigma, &f).unwrap());
    }

    #[test]
    fn one_step_satisfiability() {
        let nb = StructureKind::Neighbourhood;
        let xi = [Rank1::modal("box", &[0b01]), Rank1::not(Rank1::modal("box", &[0b10]))];
        assert_eq!(one_step_sat(&nb, 2, &xi).unwrap(), Some(Value::Nbhd(BTreeSet::from([0b01]))));
        assert_eq!(one_step_sat(&nb, 2, &[Rank1::Bot]).unwrap(), None);
        assert_eq!(one_step_sat(&nb, 2, &[]).unwrap(), Some(Value::Nbhd(BTreeSet::new())));
    }

    #[test]
    fn soundness_examples() {
        for n in 1..=2 {
            assert_eq!(one_step_sound(&k_rule(2), &StructureKind::kripke(), n).unwrap(), None);
        }
        for n in 1..=3 {
            assert_eq!(one_step_sound(&congruence_rule("box"), &StructureKind::Neighbourhood, n).unwrap(), None);
        }
        let mut broken = k_rule(1);
        broken.premises.clear();
        assert!(one_step_sound(&broken, &StructureKind::kripke(), 2).unwrap().is_some());
    }

    #[test]
    fn disjunctive_reading_of_a2_is_unsound() {
        // antecedent p \/ q in place of the multiset p, q
        let bad = OneStepRule::build(
            "A2_or".into(),
            vec![prem(&["p"], &["r"]), prem(&["q"], &["r"]), prem(&["p", "q"], &["s"])],
            vec![atom(g(0), &["p"])],
            vec![atom(g(0), &["q"]), atom(g(6), &["r"]), atom(g(0), &["s"])],
        );
        assert!(one_step_sound(&bad, &StructureKind::Multiset { max: 2 }, 1).unwrap().is_some());
    }
}

//! JSON encodings of signatures, models, Hilbert proofs and sequent proofs.
//!
//! Formulas are stored in the concrete grammar. States are referred to by
//! name in model files.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::evaluator::Model;
use crate::gen::standard_signature;
use crate::hilbert::{HilbertProof, Justification, Step};
use crate::sequent::{EqTriple, Label, Proof, RuleApp, Sequent};
use crate::structures::{members, Mask, StructureKind, Value};
use crate::syntax::{parse_formula_internal, render_formula, Bound, Formula, Signature};

fn format(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum KindJson {
    Tag(String),
    Full {
        tag: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<u32>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        atoms: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        parts: Vec<KindJson>,
    },
}

fn kind_to_json(kind: &StructureKind) -> KindJson {
    let full = |max, k, atoms, parts| KindJson::Full { tag: kind.tag().into(), max, k, atoms, parts };
    match kind {
        StructureKind::Kripke { atoms } if !atoms.is_empty() => full(None, None, atoms.clone(), vec![]),
        StructureKind::Multiset { max } => full(Some(*max), None, vec![], vec![]),
        StructureKind::Dist { k } => full(None, Some(*k), vec![], vec![]),
        StructureKind::Product(parts) => full(None, None, vec![], parts.iter().map(kind_to_json).collect()),
        _ => KindJson::Tag(kind.tag().into()),
    }
}

fn kind_from_json(k: &KindJson) -> Result<StructureKind> {
    let (tag, max, kk, atoms, parts) = match k {
        KindJson::Tag(t) => (t.as_str(), None, None, &[][..], &[][..]),
        KindJson::Full { tag, max, k, atoms, parts } => (tag.as_str(), *max, *k, &atoms[..], &parts[..]),
    };
    Ok(match tag {
        "kripke" => StructureKind::Kripke { atoms: atoms.to_vec() },
        "neighbourhood" => StructureKind::Neighbourhood,
        "multiset" => StructureKind::Multiset { max: max.unwrap_or(2) },
        "dist" => StructureKind::Dist { k: kk.unwrap_or(4) },
        "selection" => StructureKind::Selection,
        "product" => StructureKind::Product(parts.iter().map(kind_from_json).collect::<Result<_>>()?),
        other => return Err(format(format!("unknown structure tag `{other}`"))),
    })
}

/// Parses a structure description: a tag string or an object with `tag`.
pub fn structure_from_json(v: &Json) -> Result<StructureKind> {
    kind_from_json(&serde_json::from_value(v.clone())?)
}

pub fn structure_to_json(kind: &StructureKind) -> Json {
    serde_json::to_value(kind_to_json(kind)).expect("serialisable")
}

#[derive(Serialize, Deserialize)]
struct OpJson {
    name: String,
    arity: usize,
    #[serde(default)]
    bounds: Vec<Json>,
}

#[derive(Serialize, Deserialize)]
struct PredJson {
    name: String,
    arity: usize,
}

#[derive(Serialize, Deserialize)]
struct SigJson {
    #[serde(default)]
    ops: Vec<OpJson>,
    #[serde(default)]
    preds: Vec<PredJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    structure: Option<KindJson>,
}

fn bound_from_json(v: &Json) -> Result<Bound> {
    match v {
        Json::String(s) if s == "inf" => Ok(Bound::Inf),
        Json::Number(n) => n.as_u64().map(|k| Bound::Fin(k as usize)).ok_or_else(|| format(format!("bad bound {n}"))),
        other => Err(format(format!("bad bound {other}"))),
    }
}

fn bound_to_json(b: Bound) -> Json {
    match b {
        Bound::Fin(k) => json!(k),
        Bound::Inf => json!("inf"),
    }
}

/// A signature file and the structure it names, if any. Missing bounds
/// default to `inf`.
pub fn signature_from_json(v: &Json) -> Result<(Signature, Option<StructureKind>)> {
    let s: SigJson = serde_json::from_value(v.clone())?;
    let mut sig = Signature::new();
    for op in &s.ops {
        let mut bounds = op.bounds.iter().map(bound_from_json).collect::<Result<Vec<_>>>()?;
        if bounds.is_empty() {
            bounds = vec![Bound::Inf; op.arity];
        }
        sig = sig.with_op(&op.name, op.arity, bounds);
    }
    for p in &s.preds {
        sig = sig.with_pred(&p.name, p.arity);
    }
    sig.validate()?;
    let kind = s.structure.as_ref().map(kind_from_json).transpose()?;
    Ok((sig, kind))
}

pub fn signature_to_json(sig: &Signature, kind: Option<&StructureKind>) -> Json {
    let s = SigJson {
        ops: sig
            .ops
            .iter()
            .map(|(name, d)| OpJson { name: name.clone(), arity: d.arity, bounds: d.bounds.iter().map(|b| bound_to_json(*b)).collect() })
            .collect(),
        preds: sig.preds.iter().map(|(name, &arity)| PredJson { name: name.clone(), arity }).collect(),
        structure: kind.map(kind_to_json),
    };
    serde_json::to_value(s).expect("serialisable")
}

struct States<'a> {
    names: &'a [String],
}

impl States<'_> {
    fn index(&self, v: &Json) -> Result<usize> {
        let name = v.as_str().ok_or_else(|| format(format!("state name expected, found {v}")))?;
        self.names.iter().position(|s| s == name).ok_or_else(|| format(format!("unknown state `{name}`")))
    }

    fn mask(&self, v: &Json) -> Result<Mask> {
        let arr = v.as_array().ok_or_else(|| format(format!("state list expected, found {v}")))?;
        arr.iter().try_fold(0, |m, s| Ok(m | 1 << self.index(s)?))
    }

    fn list(&self, m: Mask) -> Json {
        Json::Array(members(m).map(|i| json!(self.names[i])).collect())
    }

    fn counts(&self, v: &Json) -> Result<Vec<u32>> {
        let obj = v.as_object().ok_or_else(|| format(format!("count object expected, found {v}")))?;
        let mut out = vec![0; self.names.len()];
        for (k, n) in obj {
            let i = self.index(&json!(k))?;
            out[i] = n.as_u64().ok_or_else(|| format(format!("bad count {n}")))? as u32;
        }
        Ok(out)
    }

    fn count_obj(&self, c: &[u32]) -> Json {
        Json::Object(c.iter().enumerate().filter(|(_, &n)| n > 0).map(|(i, &n)| (self.names[i].clone(), json!(n))).collect())
    }
}

fn value_from_json(kind: &StructureKind, st: &States, v: &Json) -> Result<Value> {
    let n = st.names.len();
    let val = match kind {
        StructureKind::Kripke { .. } => {
            let succ = st.mask(v.get("succ").unwrap_or(&json!([])))?;
            let atoms = match v.get("atoms") {
                Some(a) => serde_json::from_value::<BTreeSet<String>>(a.clone())?,
                None => BTreeSet::new(),
            };
            Value::Kripke { succ, atoms }
        }
        StructureKind::Neighbourhood => {
            let arr = v.as_array().ok_or_else(|| format("neighbourhood value must be an array of state lists"))?;
            Value::Nbhd(arr.iter().map(|s| st.mask(s)).collect::<Result<_>>()?)
        }
        StructureKind::Multiset { .. } => Value::Multiset(st.counts(v)?),
        StructureKind::Dist { .. } => Value::Dist(st.counts(v.get("num").ok_or_else(|| format("dist value needs `num`"))?)?),
        StructureKind::Selection => {
            let arr = v.as_array().ok_or_else(|| format("selection value must be an array of {cond, sel}"))?;
            let mut table = vec![0; 1usize << n.min(20)];
            for row in arr {
                let c = st.mask(row.get("cond").ok_or_else(|| format("selection row needs `cond`"))?)?;
                table[c as usize] = st.mask(row.get("sel").ok_or_else(|| format("selection row needs `sel`"))?)?;
            }
            Value::Selection(table)
        }
        StructureKind::Product(parts) => {
            let arr = v.as_array().ok_or_else(|| format("product value must be an array"))?;
            if arr.len() != parts.len() {
                return Err(format("product arity mismatch"));
            }
            Value::Product(parts.iter().zip(arr).map(|(p, x)| value_from_json(p, st, x)).collect::<Result<_>>()?)
        }
    };
    kind.check_value(n, &val)?;
    Ok(val)
}

fn value_to_json(kind: &StructureKind, st: &States, v: &Value) -> Json {
    match (kind, v) {
        (_, Value::Kripke { succ, atoms }) => json!({ "succ": st.list(*succ), "atoms": atoms }),
        (_, Value::Nbhd(sets)) => Json::Array(sets.iter().map(|&m| st.list(m)).collect()),
        (_, Value::Multiset(c)) => st.count_obj(c),
        (StructureKind::Dist { k }, Value::Dist(c)) => json!({ "num": st.count_obj(c), "k": k }),
        (_, Value::Dist(c)) => json!({ "num": st.count_obj(c) }),
        (_, Value::Selection(t)) => Json::Array(
            t.iter()
                .enumerate()
                .filter(|(_, &s)| s != 0)
                .map(|(c, &s)| json!({ "cond": st.list(c as Mask), "sel": st.list(s) }))
                .collect(),
        ),
        (StructureKind::Product(parts), Value::Product(vs)) => {
            Json::Array(parts.iter().zip(vs).map(|(p, x)| value_to_json(p, st, x)).collect())
        }
        (_, Value::Product(vs)) => Json::Array(vs.iter().map(|x| value_to_json(kind, st, x)).collect()),
    }
}

/// A functor value with states referred to by `names`.
pub fn value_json(kind: &StructureKind, names: &[String], v: &Value) -> Json {
    value_to_json(kind, &States { names }, v)
}

/// Reads a model. Without `sig`, the standard signature of the model's
/// structure is used, extended by the predicates named in `interp`.
pub fn model_from_json(v: &Json, sig: Option<&Signature>) -> Result<Model> {
    let kind = structure_from_json(v.get("kind").ok_or_else(|| format("model needs `kind`"))?)?;
    let names: Vec<String> = serde_json::from_value(v.get("states").cloned().ok_or_else(|| format("model needs `states`"))?)?;
    if names.is_empty() || names.iter().collect::<BTreeSet<_>>().len() != names.len() {
        return Err(format("states must be non-empty and distinct"));
    }
    let st = States { names: &names };
    let mut gamma = BTreeMap::new();
    let g = v.get("gamma").and_then(Json::as_object).ok_or_else(|| format("model needs a `gamma` object"))?;
    for (s, val) in g {
        gamma.insert(st.index(&json!(s))?, value_from_json(&kind, &st, val)?);
    }
    let mut interp: BTreeMap<String, BTreeSet<Vec<usize>>> = BTreeMap::new();
    if let Some(obj) = v.get("interp").and_then(Json::as_object) {
        for (p, rows) in obj {
            let rows = rows.as_array().ok_or_else(|| format(format!("interpretation of `{p}` must be an array")))?;
            let mut set = BTreeSet::new();
            for row in rows {
                let row = row.as_array().ok_or_else(|| format(format!("tuple of `{p}` must be an array")))?;
                set.insert(row.iter().map(|s| st.index(s)).collect::<Result<Vec<_>>>()?);
            }
            interp.insert(p.clone(), set);
        }
    }
    let sig = match sig {
        Some(s) => s.clone(),
        None => {
            let mut s = standard_signature(&kind);
            for (p, rows) in &interp {
                if let Some(row) = rows.iter().next() {
                    s.preds.insert(p.clone(), row.len());
                }
            }
            s
        }
    };
    Model::checked(kind, sig, names, gamma, interp)
}

pub fn model_to_json(m: &Model) -> Json {
    let st = States { names: &m.states };
    let gamma: serde_json::Map<String, Json> =
        m.gamma.iter().map(|(&c, v)| (m.states[c].clone(), value_to_json(&m.kind, &st, v))).collect();
    let interp: serde_json::Map<String, Json> = m
        .interp
        .iter()
        .map(|(p, rows)| {
            let rows = rows.iter().map(|r| Json::Array(r.iter().map(|&i| json!(m.states[i])).collect())).collect();
            (p.clone(), Json::Array(rows))
        })
        .collect();
    json!({ "kind": structure_to_json(&m.kind), "states": m.states, "gamma": gamma, "interp": interp })
}

fn formula(v: &Json, sig: &Signature) -> Result<Formula> {
    let s = v.as_str().ok_or_else(|| format(format!("formula string expected, found {v}")))?;
    parse_formula_internal(s, sig)
}

fn formulas(v: Option<&Json>, sig: &Signature) -> Result<Vec<Formula>> {
    match v {
        None | Some(Json::Null) => Ok(vec![]),
        Some(Json::Array(a)) => a.iter().map(|f| formula(f, sig)).collect(),
        Some(other) => Err(format(format!("formula list expected, found {other}"))),
    }
}

fn rendered(fs: &[Formula]) -> Json {
    Json::Array(fs.iter().map(|f| json!(render_formula(f))).collect())
}

pub fn hilbert_from_json(v: &Json, sig: &Signature) -> Result<HilbertProof> {
    let hypotheses = formulas(v.get("hypotheses"), sig)?;
    let steps = v.get("steps").and_then(Json::as_array).ok_or_else(|| format("Hilbert proof needs `steps`"))?;
    let steps = steps
        .iter()
        .map(|s| {
            let f = formula(s.get("formula").ok_or_else(|| format("step needs `formula`"))?, sig)?;
            let just: Justification = serde_json::from_value(s.get("just").cloned().unwrap_or(json!({ "kind": "axiom" })))?;
            Ok(Step { formula: f, just })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HilbertProof { hypotheses, steps })
}

pub fn hilbert_to_json(h: &HilbertProof) -> Json {
    let steps: Vec<Json> =
        h.steps.iter().map(|s| json!({ "formula": render_formula(&s.formula), "just": s.just })).collect();
    json!({ "hypotheses": rendered(&h.hypotheses), "steps": steps })
}

fn sequent_json(s: &Sequent) -> (Json, Json) {
    (rendered(&s.lhs), rendered(&s.rhs))
}

fn node_to_json(p: &Proof) -> Json {
    let (lhs, rhs) = sequent_json(&p.conclusion);
    let r = &p.rule;
    let mut rule = serde_json::Map::new();
    rule.insert("label".into(), json!(r.label.name()));
    rule.insert("principal".into(), rendered(&r.principal));
    if let Some(e) = &r.eigen {
        rule.insert("eigen".into(), json!(e));
    }
    if let Some(EqTriple { x, y, w }) = &r.eq {
        rule.insert("eq".into(), json!({ "x": x, "y": y, "z": w }));
    }
    if let Some(pat) = &r.pattern {
        let (l, r) = sequent_json(pat);
        rule.insert("pattern".into(), json!({ "lhs": l, "rhs": r }));
    }
    rule.insert("subst".into(), json!(r.subst));
    if let Some(name) = &r.rule {
        rule.insert("rule".into(), json!(name));
    }
    if let Some(i) = r.index {
        rule.insert("index".into(), json!(i));
    }
    let premises: Vec<Json> = p.premises.iter().map(node_to_json).collect();
    json!({ "lhs": lhs, "rhs": rhs, "rule": rule, "premises": premises })
}

fn node_from_json(v: &Json, sig: &Signature) -> Result<Proof> {
    let conclusion = Sequent::new(formulas(v.get("lhs"), sig)?, formulas(v.get("rhs"), sig)?);
    let r = v.get("rule").ok_or_else(|| format("node needs `rule`"))?;
    let label = r.get("label").and_then(Json::as_str).ok_or_else(|| format("rule needs `label`"))?;
    let mut app = RuleApp::new(Label::parse(label).ok_or_else(|| format(format!("unknown rule label `{label}`")))?);
    app.principal = formulas(r.get("principal"), sig)?;
    let var = |key: &str, obj: &Json| -> Result<Option<String>> {
        match obj.get(key) {
            None | Some(Json::Null) => Ok(None),
            Some(Json::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(format(format!("`{key}` must be a variable, found {other}"))),
        }
    };
    app.eigen = var("eigen", r)?;
    if let Some(eq) = r.get("eq").filter(|e| !e.is_null()) {
        let need = |k: &str| var(k, eq)?.ok_or_else(|| format(format!("`eq` needs `{k}`")));
        app.eq = Some(EqTriple { x: need("x")?, y: need("y")?, w: need("z")? });
    }
    if let Some(pat) = r.get("pattern").filter(|e| !e.is_null()) {
        app.pattern = Some(Sequent::new(formulas(pat.get("lhs"), sig)?, formulas(pat.get("rhs"), sig)?));
    }
    if let Some(s) = r.get("subst") {
        app.subst = serde_json::from_value(s.clone())?;
    }
    app.rule = var("rule", r)?;
    app.index = match r.get("index") {
        None | Some(Json::Null) => None,
        Some(i) => Some(i.as_u64().ok_or_else(|| format("`index` must be a number"))? as usize),
    };
    let premises = match v.get("premises") {
        None | Some(Json::Null) => vec![],
        Some(Json::Array(a)) => a.iter().map(|p| node_from_json(p, sig)).collect::<Result<_>>()?,
        Some(other) => return Err(format(format!("`premises` must be an array, found {other}"))),
    };
    Ok(Proof::node(app, conclusion, premises))
}

/// A sequent-proof file. `rules` and `signature` are optional so that a
/// file can be checked without extra flags.
pub fn proof_to_json(p: &Proof, rules: Option<&str>, sig: Option<&Signature>) -> Json {
    let mut out = serde_json::Map::new();
    if let Some(r) = rules {
        out.insert("rules".into(), json!(r));
    }
    if let Some(s) = sig {
        out.insert("signature".into(), signature_to_json(s, None));
    }
    out.insert("node".into(), node_to_json(p));
    Json::Object(out)
}

pub fn proof_from_json(v: &Json, sig: &Signature) -> Result<Proof> {
    node_from_json(v.get("node").ok_or_else(|| format("proof file needs `node`"))?, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{cut_corpus, hilbert_corpus};
    use crate::gen::{random_model, rng};

    #[test]
    fn models_round_trip() {
        let mut r = rng(3);
        let kinds = [
            StructureKind::kripke(),
            StructureKind::Kripke { atoms: vec!["a".into()] },
            StructureKind::Neighbourhood,
            StructureKind::Multiset { max: 2 },
            StructureKind::Dist { k: 3 },
            StructureKind::Selection,
            StructureKind::Product(vec![StructureKind::kripke(), StructureKind::Neighbourhood]),
        ];
        for kind in &kinds {
            let sig = standard_signature(kind);
            for n in 1..=2 {
                let m = random_model(&mut r, kind, &sig, n);
                let back = model_from_json(&model_to_json(&m), Some(&sig)).unwrap();
                assert_eq!(back, m, "{}", kind.tag());
            }
        }
    }

    #[test]
    fn model_file_with_named_states() {
        let v = json!({
            "kind": "kripke",
            "states": ["a", "b"],
            "gamma": { "a": { "succ": ["b"] }, "b": { "succ": [] } },
            "interp": { "P": [["b"]] }
        });
        let m = model_from_json(&v, None).unwrap();
        assert_eq!(m.interp["P"], BTreeSet::from([vec![1]]));
        assert_eq!(m.gamma[&0], Value::Kripke { succ: 0b10, atoms: BTreeSet::new() });
        assert!(model_from_json(&json!({ "kind": "kripke", "states": ["a"], "gamma": { "c": {} } }), None).is_err());
    }

    #[test]
    fn signatures_round_trip() {
        let v = json!({
            "ops": [{ "name": "dia", "arity": 1, "bounds": [1] }, { "name": "box", "arity": 1, "bounds": ["inf"] }],
            "preds": [{ "name": "P", "arity": 1 }],
            "structure": "kripke"
        });
        let (sig, kind) = signature_from_json(&v).unwrap();
        assert_eq!(sig.bound("dia", 0), Some(Bound::Fin(1)));
        assert_eq!(sig.bound("box", 0), Some(Bound::Inf));
        assert_eq!(kind, Some(StructureKind::kripke()));
        let (again, k2) = signature_from_json(&signature_to_json(&sig, kind.as_ref())).unwrap();
        assert_eq!((again, k2), (sig, kind));
    }

    #[test]
    fn proofs_round_trip() {
        for h in hilbert_corpus() {
            let sig = h.sig();
            assert_eq!(hilbert_from_json(&hilbert_to_json(&h.proof), &sig).unwrap(), h.proof, "{}", h.name);
        }
        for c in cut_corpus() {
            let kind = crate::corpus::calculus_for(&c.rules.name).0;
            let sig = standard_signature(&kind);
            let v = proof_to_json(&c.proof, Some(&c.rules.name), Some(&sig));
            assert_eq!(proof_from_json(&v, &sig).unwrap(), c.proof, "{}", c.name);
        }
    }
}

use std::path::PathBuf;
use std::process::{Command, Output};

use cpl_core::corpus::{cut_corpus, hilbert_corpus};
use cpl_core::io::{hilbert_to_json, proof_to_json};
use serde_json::{json, Value as Json};

fn cpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpl")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Json {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().unwrap_or("")).expect("json on stdout")
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("cpl-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, v: &Json) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn two_state_model(dir: &Scratch) -> (String, String) {
    let m = dir.file(
        "m.json",
        &json!({
            "kind": "kripke",
            "states": ["a", "b"],
            "gamma": { "a": { "succ": ["b"] }, "b": { "succ": [] } },
            "interp": { "P": [["b"]] }
        }),
    );
    let s = dir.file(
        "s.json",
        &json!({
            "ops": [{ "name": "dia", "arity": 1, "bounds": [1] }, { "name": "box", "arity": 1 }],
            "preds": [{ "name": "P", "arity": 1 }],
            "structure": "kripke"
        }),
    );
    (m, s)
}

fn has_label(node: &Json, labels: &[&str]) -> bool {
    let own = node["rule"]["label"].as_str().is_some_and(|l| labels.contains(&l));
    own || node["premises"].as_array().is_some_and(|ps| ps.iter().any(|p| has_label(p, labels)))
}

#[test]
fn eval_mirrors_the_truth_value() {
    let dir = Scratch::new("eval");
    let (m, s) = two_state_model(&dir);
    let phi = "x dia [z : z = y]";
    let yes = cpl(&["eval", "--model", &m, "--sig", &s, "--formula", phi, "--val", "x=a,y=b"]);
    assert_eq!(code(&yes), 0);
    assert_eq!(stdout_json(&yes), json!({ "value": true }));
    let no = cpl(&["eval", "--model", &m, "--sig", &s, "--formula", phi, "--val", "x=a,y=a"]);
    assert_eq!(code(&no), 1);
}

#[test]
fn errors_exit_two_with_a_json_diagnostic() {
    let dir = Scratch::new("errors");
    let (m, _) = two_state_model(&dir);
    let bad = dir.file("bad.json", &json!({ "kind": "kripke" }));
    for args in [
        vec!["eval", "--model", &m, "--formula", "x dia [z : z = y"],
        vec!["eval", "--model", &bad, "--formula", "x = x"],
        vec!["eval", "--model", &m, "--formula", "x = x", "--val", "x=c"],
        vec!["no-such-command"],
    ] {
        let out = cpl(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        let err: Json = serde_json::from_slice(&out.stderr).expect("json diagnostic");
        assert!(err["error"].is_string() && err["message"].is_string());
    }
}

#[test]
fn cut_elimination_pipeline_yields_cut_free_proofs() {
    let dir = Scratch::new("cut");
    for fx in cut_corpus().into_iter().take(12) {
        let p = dir.file("p.json", &proof_to_json(&fx.proof, None, None));
        let q = dir.path("q.json");
        let out = cpl(&["cut-eliminate", "--rules", &fx.rules.name, "--in", &p, "--emit", &q]);
        assert_eq!(code(&out), 0, "{}: {}", fx.name, String::from_utf8_lossy(&out.stderr));
        let check = cpl(&["check-sequent", "--in", &q]);
        assert_eq!(code(&check), 0, "{}: {}", fx.name, String::from_utf8_lossy(&check.stderr));
        let emitted: Json = serde_json::from_str(&std::fs::read_to_string(&q).unwrap()).unwrap();
        assert!(!has_label(&emitted["node"], &["Cut", "Mcut"]), "{}", fx.name);
        assert_eq!(code(&cpl(&["check-sequent", "--in", &q, "--cut-free"])), 0);
    }
}

#[test]
fn hilbert_proofs_flow_through_every_proof_command() {
    let dir = Scratch::new("hilbert");
    let fx = hilbert_corpus().into_iter().find(|f| f.name == "identity").expect("fixture");
    let h = dir.file("h.json", &hilbert_to_json(&fx.proof));
    assert_eq!(code(&cpl(&["check-hilbert", "--rules", &fx.rules.name, "--in", &h])), 0);
    let s = dir.path("s.json");
    assert_eq!(code(&cpl(&["hilbert-to-sequent", "--rules", &fx.rules.name, "--in", &h, "--emit", &s])), 0);
    assert_eq!(code(&cpl(&["check-sequent", "--in", &s])), 0);
    assert_eq!(code(&cpl(&["check-sequent", "--in", &s, "--cut-free"])), 1);
    let q = dir.path("q.json");
    assert_eq!(code(&cpl(&["cut-eliminate", "--in", &s, "--emit", &q])), 0);
    assert_eq!(code(&cpl(&["check-sequent", "--in", &q, "--cut-free"])), 0);
}

#[test]
fn rejected_hilbert_proofs_exit_one() {
    let dir = Scratch::new("reject");
    let h = dir.file(
        "h.json",
        &json!({ "hypotheses": [], "steps": [{ "formula": "x = y", "just": { "kind": "axiom" } }] }),
    );
    let out = cpl(&["check-hilbert", "--rules", "K", "--in", &h]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["accepted"], json!(false));
}

#[test]
fn one_step_commands() {
    let sat = cpl(&["onestep-sat", "--kind", "kripke", "--size", "2", "--formula", "dia{0}", "--formula", "~dia{1}"]);
    assert_eq!(code(&sat), 0);
    assert_eq!(stdout_json(&sat)["witness"], json!({ "atoms": [], "succ": ["0"] }));
    let unsat = cpl(&["onestep-sat", "--kind", "kripke", "--size", "2", "--formula", "dia{0}", "--formula", "~dia{0,1}"]);
    assert_eq!(code(&unsat), 1);
    assert_eq!(code(&cpl(&["onestep-sound", "--rules", "K", "--rule", "K_2"])), 0);
    assert_eq!(code(&cpl(&["onestep-sound", "--rules", "C", "--rule", "C", "--kind", "neighbourhood", "--size", "3"])), 0);
}

#[test]
fn structure_checks() {
    assert_eq!(code(&cpl(&["bounded-check", "--kind", "kripke", "--op", "dia", "--k", "1"])), 0);
    assert_eq!(code(&cpl(&["bounded-check", "--kind", "kripke", "--op", "dia", "--k", "0"])), 1);
    let unbounded = cpl(&["bounded-check", "--kind", "neighbourhood", "--op", "box", "--k", "3"]);
    assert_eq!(code(&unbounded), 1);
    assert_eq!(stdout_json(&unbounded)["bounded"], json!(false));
    assert_eq!(code(&cpl(&["naturality-check", "--kind", "selection", "--op", "cond", "--size", "2"])), 0);
}

#[test]
fn ultraproduct_output_is_a_model_file() {
    let dir = Scratch::new("ultra");
    let (m, _) = two_state_model(&dir);
    let u = dir.path("u.json");
    let out = cpl(&[
        "ultraproduct", "--models", &m, &m, "--principal", "1", "--verify-transfer", "--los", "x dia [z : P(z)]",
        "--vals", "x=a;x=b", "--emit", &u,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = stdout_json(&out);
    assert_eq!(rep["transfer"]["holds"], json!(true));
    assert_eq!(rep["los"]["product"], rep["los"]["measure"]);
    assert_eq!(code(&cpl(&["eval-cml", "--model", &u, "--formula", "dia P"])), 0);
}

#[test]
fn selftest_reports_each_requested_criterion() {
    let out = cpl(&["selftest", "--only", "4,6,7"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    assert_eq!(code(&cpl(&["selftest", "--only", "13"])), 2);
}

mod rank1;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpl_core::corpus::calculus_for;
use cpl_core::evaluator::{cml_extension, eval, eval_cml, eval_hybrid_in, Model, Valuation};
use cpl_core::gen::standard_signature;
use cpl_core::hilbert::check_hilbert;
use cpl_core::io::{
    hilbert_from_json, model_from_json, model_to_json, proof_from_json, proof_to_json, signature_from_json,
    structure_from_json, structure_to_json, value_json,
};
use cpl_core::modeltheory::{los_check, quasi_ultraproduct, verify_transfer, PrincipalUltrafilter};
use cpl_core::onestep::{one_step_sat, one_step_sound, preset_rules, RuleSet};
use cpl_core::selftest::{run, CRITERIA};
use cpl_core::sequent::{check_sequent_proof, eliminate_mcut, hilbert_to_sequent, Calculus, Flags, Label, Proof};
use cpl_core::structures::{check_bounded, check_naturality_all, members, Mask, StructureKind};
use cpl_core::syntax::{
    parse_cml, parse_formula, parse_hybrid, render_cml, render_formula, render_hybrid, HybridLang, Signature,
};
use cpl_core::translate::{ht, ht_full, st_cml, st_hybrid, stwr_hybrid, HtTarget};
use serde_json::{json, Value as Json};

const DEFAULT_SEED: u64 = cpl_core::gen::DEFAULT_SEED;

#[derive(Parser)]
#[command(name = "cpl", version, about = "Coalgebraic predicate logic workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical rendering.
    Parse {
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = Lang::Cpl)]
        lang: Lang,
        #[command(flatten)]
        sig: SigArgs,
    },
    /// Evaluate a CPL formula under a valuation.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        formula: String,
        /// Assignments such as `x=a,y=b`.
        #[arg(long, default_value = "")]
        val: String,
    },
    /// Evaluate a coalgebraic modal formula at a state, or list its extension.
    EvalCml {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Evaluate a hybrid formula at a state.
    EvalHybrid {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: String,
        /// Nominal assignments such as `i=a,j=b`.
        #[arg(long, default_value = "")]
        val: String,
        #[arg(long, default_value = "full")]
        lang: String,
    },
    /// Translate between CPL, CML and hybrid formulas.
    Translate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        formula: String,
        /// Current-state variable of the standard translations.
        #[arg(long, default_value = "x")]
        var: String,
        #[command(flatten)]
        sig: SigArgs,
    },
    /// Check a Hilbert proof file.
    CheckHilbert {
        #[arg(long)]
        rules: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Admit the bounded-dependency axioms.
        #[arg(long)]
        bdpl: bool,
    },
    /// Check a sequent proof file.
    CheckSequent {
        #[arg(long = "in")]
        input: PathBuf,
        /// Overrides the rule set named in the file.
        #[arg(long)]
        rules: Option<String>,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Reject Cut and Mcut.
        #[arg(long)]
        cut_free: bool,
        /// Reject Paste.
        #[arg(long)]
        no_paste: bool,
    },
    /// Translate a Hilbert proof into a sequent proof with cuts.
    HilbertToSequent {
        #[arg(long)]
        rules: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Build Onestep axioms with Paste.
        #[arg(long)]
        paste: bool,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Remove every Cut and Mcut from a sequent proof.
    CutEliminate {
        #[arg(long)]
        rules: Option<String>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Find a structure value satisfying rank-1 formulas over a carrier.
    OnestepSat {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        size: usize,
        /// Rank-1 formula such as `dia{0,1} -> ~box{1}`; repeatable.
        #[arg(long, required = true)]
        formula: Vec<String>,
    },
    /// Exhaustively check a one-step rule for soundness.
    OnestepSound {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        rules: String,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, default_value_t = 2)]
        size: usize,
    },
    /// Check whether an argument of a lifting is k-bounded.
    BoundedCheck {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        op: String,
        /// 0-based argument position.
        #[arg(long, default_value_t = 0)]
        arg: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
    /// Check the naturality square of a lifting on all small carriers.
    NaturalityCheck {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
    /// Build the quasi-ultraproduct of models over a principal ultrafilter.
    Ultraproduct {
        #[arg(long, num_args = 1.., required = true)]
        models: Vec<PathBuf>,
        #[arg(long)]
        principal: usize,
        /// Check the transfer condition on every argument family.
        #[arg(long)]
        verify_transfer: bool,
        /// Compare the product side and the measure side for a formula.
        #[arg(long)]
        los: Option<String>,
        /// One valuation per model, separated by `;`, e.g. `x=a;x=b`.
        #[arg(long, default_value = "")]
        vals: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only the listed criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(clap::Args)]
struct SigArgs {
    #[arg(long)]
    sig: Option<PathBuf>,
    /// Structure whose standard signature is used when no file is given.
    #[arg(long, default_value = "kripke")]
    kind: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lang {
    Cpl,
    Cml,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    St,
    StHybrid,
    Stwr,
    Ht,
    HtForall,
    HtGlobal,
}

enum Failure {
    Usage(String),
    Core(cpl_core::Error),
}

impl From<cpl_core::Error> for Failure {
    fn from(e: cpl_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Outcome = Result<bool, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn diagnostic(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

fn print(v: Json) {
    println!("{v}");
}

fn read_json(path: &Path) -> Result<Json, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json(path: &Path, v: &Json) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v)?;
    std::fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_kind(s: &str) -> Result<StructureKind, Failure> {
    let t = s.trim();
    if t.starts_with('{') {
        return Ok(structure_from_json(&serde_json::from_str(t)?)?);
    }
    let (tag, param) = match t.split_once(':') {
        Some((a, b)) => (a, Some(b.parse::<u32>().map_err(|_| usage(format!("bad parameter in `{s}`")))?)),
        None => (t, None),
    };
    let mut obj = json!({ "tag": tag });
    match (tag, param) {
        ("multiset", Some(p)) => obj["max"] = json!(p),
        ("dist", Some(p)) => obj["k"] = json!(p),
        (_, Some(_)) => return Err(usage(format!("`{tag}` takes no parameter"))),
        _ => {}
    }
    Ok(structure_from_json(&obj)?)
}

fn load_sig(path: &Path) -> Result<(Signature, Option<StructureKind>), Failure> {
    Ok(signature_from_json(&read_json(path)?)?)
}

impl SigArgs {
    fn resolve(&self) -> Result<Signature, Failure> {
        match &self.sig {
            Some(p) => Ok(load_sig(p)?.0),
            None => Ok(standard_signature(&parse_kind(&self.kind)?)),
        }
    }
}

fn load_model(path: &Path, sig: Option<&PathBuf>) -> Result<Model, Failure> {
    let sig = sig.map(|p| load_sig(p)).transpose()?.map(|(s, _)| s);
    Ok(model_from_json(&read_json(path)?, sig.as_ref())?)
}

fn state(m: &Model, name: &str) -> Result<usize, Failure> {
    m.state_index(name).ok_or_else(|| usage(format!("unknown state `{name}`")))
}

fn valuation(m: &Model, spec: &str) -> Result<Valuation, Failure> {
    let mut v = Valuation::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (x, s) = part.split_once('=').ok_or_else(|| usage(format!("bad assignment `{part}`")))?;
        v.set(x.trim(), state(m, s.trim())?);
    }
    Ok(v)
}

fn names(m: &Model, mask: Mask) -> Json {
    Json::Array(members(mask).map(|i| json!(m.states[i])).collect())
}

fn preset(tag: &str) -> Result<(StructureKind, RuleSet), Failure> {
    preset_rules(tag, 4)?;
    Ok(calculus_for(tag))
}

fn index_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Rule set and signature of a sequent-proof file, with flags taking precedence.
fn proof_context(file: &Json, rules: Option<&str>, sig: Option<&PathBuf>) -> Result<(String, RuleSet, Signature), Failure> {
    let tag = match rules.or_else(|| file.get("rules").and_then(Json::as_str)) {
        Some(t) => t.to_string(),
        None => return Err(usage("no rule set: pass --rules or include `rules` in the file")),
    };
    let (kind, set) = preset(&tag)?;
    let sig = match (sig, file.get("signature")) {
        (Some(p), _) => load_sig(p)?.0,
        (None, Some(s)) => signature_from_json(s)?.0,
        (None, None) => standard_signature(&kind),
    };
    Ok((tag, set, sig))
}

fn report_sequent(p: &Proof, set: &RuleSet, sig: &Signature, flags: Flags) -> bool {
    let rep = check_sequent_proof(p, &Calculus::new(set, flags).with_sig(sig));
    for d in &rep.diagnostics {
        eprintln!("{}", json!({ "path": d.path, "label": d.label.name(), "message": d.message }));
    }
    print(json!({
        "accepted": rep.accepted,
        "conclusion": rep.conclusion.to_string(),
        "height": rep.height,
        "cut_free": p.is_cut_free(),
        "paste": p.count_label(Label::Paste),
    }));
    rep.accepted
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Parse { formula, lang, sig } => {
            let sig = sig.resolve()?;
            let text = match lang {
                Lang::Cpl => render_formula(&parse_formula(&formula, &sig)?),
                Lang::Cml => render_cml(&parse_cml(&formula, &sig)?),
                Lang::Hybrid => render_hybrid(&parse_hybrid(&formula, &sig)?),
            };
            print(json!({ "formula": text }));
            Ok(true)
        }
        Command::Eval { model, sig, formula, val } => {
            let m = load_model(&model, sig.as_ref())?;
            let phi = parse_formula(&formula, &m.sig)?;
            let v = valuation(&m, &val)?;
            let b = eval(&m, &v, &phi)?;
            print(json!({ "value": b }));
            Ok(b)
        }
        Command::EvalCml { model, sig, formula, state: at } => {
            let m = load_model(&model, sig.as_ref())?;
            let f = parse_cml(&formula, &m.sig)?;
            match at {
                Some(s) => {
                    let b = eval_cml(&m, state(&m, &s)?, &f)?;
                    print(json!({ "value": b }));
                    Ok(b)
                }
                None => {
                    print(json!({ "extension": names(&m, cml_extension(&m, &f)?) }));
                    Ok(true)
                }
            }
        }
        Command::EvalHybrid { model, sig, formula, state: at, val, lang } => {
            let m = load_model(&model, sig.as_ref())?;
            let lang: HybridLang = lang.parse()?;
            let h = parse_hybrid(&formula, &m.sig)?;
            let v = valuation(&m, &val)?;
            let b = eval_hybrid_in(&m, &v, state(&m, &at)?, &h, lang)?;
            print(json!({ "value": b }));
            Ok(b)
        }
        Command::Translate { mode, formula, var, sig } => {
            let sig = sig.resolve()?;
            let text = match mode {
                Mode::St => render_formula(&st_cml(&parse_cml(&formula, &sig)?, &var, &sig)?),
                Mode::StHybrid => render_formula(&st_hybrid(&parse_hybrid(&formula, &sig)?, &var)?),
                Mode::Stwr => render_formula(&stwr_hybrid(&parse_hybrid(&formula, &sig)?, &var)?),
                Mode::Ht => render_hybrid(&ht(&parse_formula(&formula, &sig)?)?),
                Mode::HtForall => render_hybrid(&ht_full(&parse_formula(&formula, &sig)?, HtTarget::ForallAt)?),
                Mode::HtGlobal => render_hybrid(&ht_full(&parse_formula(&formula, &sig)?, HtTarget::GlobalDown)?),
            };
            print(json!({ "formula": text }));
            Ok(true)
        }
        Command::CheckHilbert { rules, input, sig, bdpl } => {
            let (kind, set) = preset(&rules)?;
            let sig = match sig {
                Some(p) => load_sig(&p)?.0,
                None => standard_signature(&kind),
            };
            let h = hilbert_from_json(&read_json(&input)?, &sig)?;
            let rep = check_hilbert(&h, &sig, &set, bdpl);
            for d in &rep.diagnostics {
                eprintln!("{}", json!({ "step": d.step, "message": d.message }));
            }
            let axioms: Vec<Json> = rep.matches.iter().map(|m| m.as_ref().map_or(Json::Null, |m| json!(m.name()))).collect();
            print(json!({
                "accepted": rep.accepted,
                "conclusion": rep.conclusion.as_ref().map(render_formula),
                "axioms": axioms,
            }));
            Ok(rep.accepted)
        }
        Command::CheckSequent { input, rules, sig, cut_free, no_paste } => {
            let file = read_json(&input)?;
            let (_, set, sig) = proof_context(&file, rules.as_deref(), sig.as_ref())?;
            let p = proof_from_json(&file, &sig)?;
            let flags = Flags { cut: !cut_free, mcut: !cut_free, paste: !no_paste };
            Ok(report_sequent(&p, &set, &sig, flags))
        }
        Command::HilbertToSequent { rules, input, sig, paste, emit } => {
            let (kind, set) = preset(&rules)?;
            let sig = match sig {
                Some(p) => load_sig(&p)?.0,
                None => standard_signature(&kind),
            };
            let h = hilbert_from_json(&read_json(&input)?, &sig)?;
            let p = hilbert_to_sequent(&h, &sig, &set, paste)?;
            let out = proof_to_json(&p, Some(&rules), Some(&sig));
            let flags = Flags { cut: true, mcut: true, paste };
            match emit {
                Some(path) => {
                    write_json(&path, &out)?;
                    Ok(report_sequent(&p, &set, &sig, flags))
                }
                None => {
                    print(out);
                    Ok(true)
                }
            }
        }
        Command::CutEliminate { rules, input, sig, emit } => {
            let file = read_json(&input)?;
            let (tag, set, sig) = proof_context(&file, rules.as_deref(), sig.as_ref())?;
            let p = proof_from_json(&file, &sig)?;
            let (q, stats) = eliminate_mcut(&p, &set)?;
            let out = proof_to_json(&q, Some(&tag), Some(&sig));
            match emit {
                Some(path) => {
                    write_json(&path, &out)?;
                    print(json!({
                        "height": q.height(),
                        "size": q.size(),
                        "cases": stats.cases,
                        "conclusion": q.conclusion.to_string(),
                    }));
                }
                None => print(out),
            }
            Ok(q.is_cut_free())
        }
        Command::OnestepSat { kind, size, formula } => {
            let kind = parse_kind(&kind)?;
            let xi = formula.iter().map(|f| rank1::parse(f, size)).collect::<Result<Vec<_>, _>>().map_err(usage)?;
            match one_step_sat(&kind, size, &xi)? {
                Some(t) => {
                    print(json!({ "satisfiable": true, "witness": value_json(&kind, &index_names(size), &t) }));
                    Ok(true)
                }
                None => {
                    print(json!({ "satisfiable": false }));
                    Ok(false)
                }
            }
        }
        Command::OnestepSound { rule, rules, kind, size } => {
            let (default_kind, set) = preset(&rules)?;
            let kind = kind.as_deref().map(parse_kind).transpose()?.unwrap_or(default_kind);
            let r = set.resolve(&rule).ok_or_else(|| usage(format!("no rule `{rule}` in `{rules}`")))?;
            match one_step_sound(&r, &kind, size)? {
                None => {
                    print(json!({ "sound": true, "rule": r.name }));
                    Ok(true)
                }
                Some(cx) => {
                    let names = index_names(size);
                    let tau: serde_json::Map<String, Json> = cx
                        .tau
                        .iter()
                        .map(|(p, &m)| (p.clone(), Json::Array(members(m).map(|i| json!(names[i])).collect())))
                        .collect();
                    print(json!({
                        "sound": false,
                        "rule": r.name,
                        "tau": tau,
                        "value": value_json(&kind, &names, &cx.value),
                    }));
                    Ok(false)
                }
            }
        }
        Command::BoundedCheck { kind, op, arg, k, size } => {
            let kind = parse_kind(&kind)?;
            let l = kind.resolve(&op)?;
            match check_bounded(&kind, &l, arg, k, size)? {
                None => {
                    print(json!({ "bounded": true }));
                    Ok(true)
                }
                Some(w) => {
                    let names = index_names(size);
                    let args: Vec<Json> =
                        w.args.iter().map(|&m| Json::Array(members(m).map(|i| json!(names[i])).collect())).collect();
                    print(json!({ "bounded": false, "value": value_json(&kind, &names, &w.value), "args": args }));
                    Ok(false)
                }
            }
        }
        Command::NaturalityCheck { kind, op, size } => {
            let kind = parse_kind(&kind)?;
            let l = kind.resolve(&op)?;
            match check_naturality_all(&kind, &l, size)? {
                None => {
                    print(json!({ "natural": true, "structure": structure_to_json(&kind) }));
                    Ok(true)
                }
                Some(w) => {
                    let names = index_names(w.f.len());
                    print(json!({
                        "natural": false,
                        "f": w.f,
                        "target": w.target,
                        "value": value_json(&kind, &names, &w.value),
                        "args": w.args,
                    }));
                    Ok(false)
                }
            }
        }
        Command::Ultraproduct { models, principal, verify_transfer: verify, los, vals, emit } => {
            let ms = models.iter().map(|p| load_model(p, None)).collect::<Result<Vec<_>, _>>()?;
            let u = PrincipalUltrafilter::new(ms.len(), principal)?;
            let qu = quasi_ultraproduct(&ms, &u)?;
            let mut out = json!({ "states": qu.model.size(), "tuples": qu.tuples.len() });
            let mut ok = true;
            if verify {
                match verify_transfer(&ms, &qu)? {
                    Ok(n) => out["transfer"] = json!({ "holds": true, "checked": n }),
                    Err(v) => {
                        ok = false;
                        out["transfer"] = json!({ "holds": false, "op": v.op, "families": v.families, "tuple": v.tuple });
                    }
                }
            }
            if let Some(f) = los {
                let phi = parse_formula(&f, &qu.model.sig)?;
                let parts: Vec<&str> = if vals.trim().is_empty() { vec![] } else { vals.split(';').collect() };
                if !parts.is_empty() && parts.len() != ms.len() {
                    return Err(usage(format!("{} valuations for {} models", parts.len(), ms.len())));
                }
                let vs = ms
                    .iter()
                    .enumerate()
                    .map(|(i, m)| valuation(m, parts.get(i).copied().unwrap_or("")))
                    .collect::<Result<Vec<_>, _>>()?;
                let (product, measure) = los_check(&ms, &u, &phi, &vs)?;
                ok &= product == measure;
                out["los"] = json!({ "product": product, "measure": measure });
            }
            if let Some(path) = emit {
                write_json(&path, &model_to_json(&qu.model))?;
            }
            print(out);
            Ok(ok)
        }
        Command::Selftest { seed, only } => {
            let ids: Vec<usize> = if only.is_empty() { (1..=CRITERIA.len()).collect() } else { only };
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA.len()) {
                return Err(usage(format!("no criterion {bad}")));
            }
            let mut all = true;
            for id in ids {
                let o = run(id, seed);
                println!("{o}");
                all &= o.passed;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            diagnostic("usage", e.to_string().lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            diagnostic("usage", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            let kind = match e {
                cpl_core::Error::Format(_) => "format",
                cpl_core::Error::Syntax { .. } => "syntax",
                _ => "semantic",
            };
            diagnostic(kind, &e.to_string());
            ExitCode::from(2)
        }
    }
}

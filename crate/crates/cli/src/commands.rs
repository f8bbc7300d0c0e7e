use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use hycoa::coalgebra::{frame_check, parse_model, write_model, Functor, HybridModel, SearchBounds, StateSet, TxElem};
use hycoa::hilbert::{check_derives, check_proof, ProofScript, RuleSet, Verdict as ProofVerdict};
use hycoa::namedmodel::{named_model_search, parse_bounds, verify_with_labels, CheckReport, NamedModelProblem, SearchOutcome};
use hycoa::onestep::{agreement_check, one_step_sat, OneStepFile, OneStepOutcome};
use hycoa::syntax::{parse, Formula, Signature};

use crate::report::{Report, Verdict};
use crate::{Command, Opts};

pub fn name(c: Command) -> &'static str {
    match c {
        Command::Check => "check",
        Command::Validate => "validate",
        Command::FrameCheck => "frame-check",
        Command::Prove => "prove",
        Command::Sat => "sat",
        Command::Onestep => "onestep",
    }
}

pub fn run(c: Command, opts: &Opts, env_bounds: Option<&str>) -> Result<Report> {
    match c {
        Command::Check => cmd_check(opts),
        Command::Validate => cmd_validate(opts),
        Command::FrameCheck => cmd_frame_check(opts),
        Command::Prove => cmd_prove(opts),
        Command::Sat => cmd_sat(opts, env_bounds),
        Command::Onestep => cmd_onestep(opts, env_bounds),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn need<'a, T>(x: &'a Option<T>, flag: &str) -> Result<&'a T> {
    x.as_ref().ok_or_else(|| anyhow!("missing --{flag}"))
}

fn load_model(opts: &Opts) -> Result<HybridModel> {
    let path = need(&opts.model, "model")?;
    parse_model(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// `--sig` as a shipped name or a file; otherwise `fallback`.
fn signature(opts: &Opts, fallback: impl FnOnce() -> Signature) -> Result<Signature> {
    match &opts.sig {
        None => Ok(fallback()),
        Some(s) => match Signature::named(s) {
            Some(sig) => Ok(sig),
            None => Ok(Signature::parse(&read(Path::new(s))?).with_context(|| format!("in signature file {s}"))?),
        },
    }
}

fn rules(spec: &str, sig: &Signature) -> Result<RuleSet> {
    match RuleSet::named(spec) {
        Some(r) => Ok(r),
        None => {
            let path = Path::new(spec);
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
            Ok(RuleSet::parse(stem, &read(path)?, sig).with_context(|| format!("in rule file {spec}"))?)
        }
    }
}

/// Defaults, then `HYCOA_BOUNDS`, then `base` overrides from a file are the
/// caller's business; flags are applied last.
fn env_bounds(env: Option<&str>) -> Result<SearchBounds> {
    match env {
        Some(text) => parse_bounds(text, SearchBounds::default()).map_err(|m| anyhow!("HYCOA_BOUNDS: {m}")),
        None => Ok(SearchBounds::default()),
    }
}

fn apply_flags(mut b: SearchBounds, opts: &Opts) -> SearchBounds {
    if let Some(n) = opts.max_states {
        b.max_states = n;
    }
    if let Some(m) = opts.max_mult {
        b.max_multiplicity = m;
    }
    b
}

fn bounds_json(b: &SearchBounds) -> Value {
    json!({
        "max_states": b.max_states,
        "max_mult": b.max_multiplicity,
        "max_strategies": b.max_strategies,
        "max_nodes": b.max_nodes,
    })
}

fn formula_list(text: &str, sig: &Signature) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse(line, sig).with_context(|| format!("line {}", ln + 1))?);
    }
    Ok(out)
}

pub fn cmd_check(opts: &Opts) -> Result<Report> {
    let m = load_model(opts)?;
    let sig = signature(opts, || m.functor.signature())?;
    let f = parse(need(&opts.formula, "formula")?, &sig)?;
    let r = match &opts.state {
        Some(name) => {
            let c = m.state_index(name).ok_or_else(|| anyhow!("unknown state `{name}`"))?;
            let ok = m.satisfies(c, &f)?;
            Report::new("check", if ok { Verdict::Valid } else { Verdict::Invalid })
                .detail("formula", f.to_string())
                .detail("state", name.as_str())
        }
        None => match m.global_failure([&f])? {
            None => Report::new("check", Verdict::Valid).detail("formula", f.to_string()),
            Some((_, c)) => Report::new("check", Verdict::Invalid)
                .with_witness(json!({ "failing_state": m.states[c] }))
                .detail("formula", f.to_string()),
        },
    };
    Ok(r)
}

pub fn cmd_validate(opts: &Opts) -> Result<Report> {
    if let Some(path) = &opts.model {
        let m = parse_model(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        let r = match m.validate() {
            Ok(()) => Report::new("validate", Verdict::Valid),
            Err(e) => Report::new("validate", Verdict::Invalid).detail("problem", e.to_string()),
        };
        return Ok(r.detail("functor", m.functor.name()).detail("states", m.n()).detail("named", m.is_named()));
    }
    if let Some(text) = &opts.formula {
        let sig = signature(opts, Signature::hybrid_k)?;
        let f = parse(text, &sig)?;
        return Ok(Report::new("validate", Verdict::Valid)
            .detail("formula", f.to_string())
            .detail("pure", f.is_pure())
            .detail("modal_depth", f.modal_depth()));
    }
    if let Some(path) = &opts.axioms {
        let sig = signature(opts, Signature::hybrid_k)?;
        let axioms = formula_list(&read(path)?, &sig)?;
        let impure: Vec<String> = axioms.iter().filter(|a| !a.is_pure()).map(|a| a.to_string()).collect();
        let verdict = if impure.is_empty() { Verdict::Valid } else { Verdict::Invalid };
        let r = Report::new("validate", verdict).detail("axioms", axioms.len());
        return Ok(if impure.is_empty() { r } else { r.detail("impure", impure) });
    }
    bail!("validate needs --model, --formula or --axioms")
}

pub fn cmd_frame_check(opts: &Opts) -> Result<Report> {
    let m = load_model(opts)?;
    let sig = signature(opts, || m.functor.signature())?;
    let axioms = formula_list(&read(need(&opts.axioms, "axioms")?)?, &sig)?;
    let r = match frame_check(&m, &axioms)? {
        None => Report::new("frame-check", Verdict::Valid).detail("axioms", axioms.len()),
        Some(cx) => {
            let assignment: BTreeMap<String, String> =
                cx.assignment.iter().map(|(i, c)| (format!("{i}"), m.states[*c].clone())).collect();
            Report::new("frame-check", Verdict::Invalid).with_witness(json!({
                "axiom": axioms[cx.axiom].to_string(),
                "assignment": assignment,
                "state": m.states[cx.state],
            }))
        }
    };
    Ok(r)
}

/// Replaces `key:` header lines of a script with `key: value`.
fn override_header(text: &str, key: &str, value: &str) -> String {
    let mut out = format!("{key}: {value}\n");
    for line in text.lines() {
        let is_header = line.trim_start().split_once(':').is_some_and(|(k, _)| k.trim() == key);
        if !is_header {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

pub fn cmd_prove(opts: &Opts) -> Result<Report> {
    let path = need(&opts.proof, "proof")?;
    let mut text = read(path)?;
    if let Some(s) = &opts.sig {
        text = override_header(&text, "sig", s);
    }
    if let Some(r) = &opts.rules {
        text = override_header(&text, "rules", r);
    }
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let load = |p: &str| -> hycoa::Result<String> {
        let full = if Path::new(p).is_absolute() { PathBuf::from(p) } else { dir.join(p) };
        Ok(fs::read_to_string(full)?)
    };
    let script = ProofScript::parse(&text, &load).with_context(|| format!("in {}", path.display()))?;
    let verdict = check_proof(&script);
    let r = match verdict {
        ProofVerdict::Rejected(rej) => Report::new("prove", Verdict::Rejected).with_witness(json!({
            "line": rej.line,
            "reason": rej.reason.code(),
            "message": rej.reason.to_string(),
        })),
        ProofVerdict::Accepted { formula, global } => {
            let base = Report::new("prove", Verdict::Accepted)
                .detail("conclusion", formula.to_string())
                .detail("global", global)
                .detail("lines", script.lines.len());
            match &opts.formula {
                None => base,
                Some(goal) => {
                    let goal = parse(goal, &script.sig)?;
                    if check_derives(&script.tbox, &script.local, &goal, &script) {
                        base.detail("goal", goal.to_string())
                    } else {
                        Report::new("prove", Verdict::Rejected)
                            .with_witness(json!({ "line": 0, "reason": "goal-mismatch", "message": format!("script does not derive `{goal}`") }))
                    }
                }
            }
        }
    };
    Ok(r)
}

fn report_json(r: &CheckReport) -> Value {
    json!({
        "well_formed": r.well_formed,
        "named": r.named,
        "goal": r.goal,
        "tbox": r.tbox,
        "axioms": r.axioms,
        "truth_lemma": r.truth_lemma,
    })
}

pub fn cmd_sat(opts: &Opts, env: Option<&str>) -> Result<Report> {
    let path = need(&opts.problem, "problem")?;
    let mut prob = NamedModelProblem::parse(&read(path)?, env_bounds(env)?).with_context(|| format!("in {}", path.display()))?;
    prob.bounds = apply_flags(prob.bounds, opts);
    if let Some(spec) = &opts.rules {
        prob.rules = rules(spec, &prob.sig)?;
    }
    let out = named_model_search(&prob)?;
    let r = match out {
        SearchOutcome::Exhausted => Report::new("sat", Verdict::UnsatWithinBounds),
        SearchOutcome::Found(found) => {
            let check = verify_with_labels(&found.model, found.designated, &prob, Some(&found.labels));
            let text = write_model(&found.model);
            let mut w = json!({
                "designated": found.model.states[found.designated],
                "states": found.model.n(),
                "check": report_json(&check),
            });
            match &opts.model {
                Some(p) => {
                    fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?;
                    w["model_file"] = json!(p.display().to_string());
                }
                None => w["model"] = json!(text),
            }
            Report::new("sat", Verdict::Sat).with_witness(w)
        }
    };
    Ok(r.detail("functor", prob.functor.name()).detail("bounds", bounds_json(&prob.bounds)))
}

fn tx_json(t: &TxElem, base: &[String]) -> Value {
    let set = |s: StateSet| -> Vec<&str> { s.iter().map(|x| base[x].as_str()).collect() };
    match t {
        TxElem::Set(s) => json!({ "successors": set(*s) }),
        TxElem::Mult(m) => {
            let map: BTreeMap<&str, u64> = m.iter().enumerate().filter(|(_, &v)| v > 0).map(|(x, &v)| (base[x].as_str(), v)).collect();
            json!({ "multiplicities": map })
        }
        TxElem::Nbhd(ns) => json!({ "neighbourhoods": ns.iter().map(|s| set(*s)).collect::<Vec<_>>() }),
        TxElem::Sel(sel) => {
            let table: Vec<Value> = sel.table.iter().map(|(a, b)| json!({ "arg": set(*a), "value": set(*b) })).collect();
            json!({ "selection": table, "default": set(sel.default) })
        }
        TxElem::Game(g) => {
            let outcomes: Vec<Value> = g
                .outcome
                .iter()
                .enumerate()
                .map(|(idx, &o)| json!({ "profile": g.decode(idx).iter().map(|d| d + 1).collect::<Vec<_>>(), "outcome": base[o] }))
                .collect();
            json!({ "strategies": g.strategies, "outcomes": outcomes })
        }
    }
}

pub fn cmd_onestep(opts: &Opts, env: Option<&str>) -> Result<Report> {
    let path = need(&opts.problem, "problem")?;
    let text = read(path)?;
    let explicit_sig = match &opts.sig {
        Some(_) => Some(signature(opts, Signature::hybrid_k)?),
        None => None,
    };
    let file = OneStepFile::parse(&text, explicit_sig.as_ref()).with_context(|| format!("in {}", path.display()))?;
    let functor: Functor = file.functor.clone().ok_or_else(|| anyhow!("the problem file has no `functor:` line"))?;
    let bounds = apply_flags(env_bounds(env)?, opts);
    let sig = file.sig.clone().unwrap_or_else(|| functor.signature());
    let ruleset = match &opts.rules {
        Some(spec) => Some(rules(spec, &sig)?),
        None => file.rules.clone(),
    };
    let p = &file.problem;
    let mut r = match one_step_sat(p, &functor, &bounds)? {
        OneStepOutcome::Sat(t) => Report::new("onestep", Verdict::Sat).with_witness(tx_json(&t, &p.base)),
        OneStepOutcome::Unsat => Report::new("onestep", Verdict::UnsatWithinBounds),
    };
    if let Some(rs) = ruleset {
        let a = agreement_check(p, &functor, &rs, &bounds)?;
        r = r.detail("rules", rs.name.as_str()).detail("consistent", a.consistent).detail("agree", a.agree());
    }
    Ok(r.detail("functor", functor.name()).detail("bounds", bounds_json(&bounds)))
}

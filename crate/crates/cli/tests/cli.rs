use std::path::PathBuf;
use std::process::{Command, Output};

use hycoa::coalgebra::parse_model;
use hycoa::syntax::{parse, Signature};
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.display().to_string()
}

fn hycoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hycoa")).args(args).env_remove("HYCOA_BOUNDS").output().expect("binary runs")
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "machine"]);
    let out = hycoa(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn check_examples() {
    let m = data("kripke.model");
    let (code, v) = machine(&["check", "--model", &m, "--formula", "@i' i'"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("valid")));
    assert!(v.get("witness").is_none());

    let (code, v) = machine(&["check", "--model", &m, "--formula", "dia p", "--state", "s1"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("invalid")));

    // s0 reaches the nominal's state twice
    let (code, v) = machine(&["check", "--model", &data("multi.model"), "--formula", "~ <1> i'"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("invalid")));
    assert_eq!(v["witness"]["failing_state"], "s0");
}

#[test]
fn check_errors_exit_two() {
    let m = data("kripke.model");
    let (code, v) = machine(&["check", "--model", &m, "--formula", "(dia p"]);
    assert_eq!((code, v["verdict"].as_str()), (2, Some("error")));
    let (code, _) = machine(&["check", "--model", &m, "--formula", "p", "--state", "nowhere"]);
    assert_eq!(code, 2);
    let (code, _) = machine(&["check", "--model", &data("missing.model"), "--formula", "p"]);
    assert_eq!(code, 2);
    let (code, _) = machine(&["check", "--formula", "p"]);
    assert_eq!(code, 2);
}

#[test]
fn frame_check_examples() {
    let (code, v) = machine(&["frame-check", "--model", &data("refl_multi.model"), "--axioms", &data("refl.axioms")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("valid")));

    let (code, v) = machine(&["frame-check", "--model", &data("cycle.model"), "--axioms", &data("trans.axioms")]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("invalid")));
    // the witness re-verifies: the axiom fails at the reported state under the assignment
    let w = &v["witness"];
    let mut m = parse_model(&std::fs::read_to_string(data("cycle.model")).unwrap()).unwrap();
    for (nom, state) in w["assignment"].as_object().unwrap() {
        let c = m.state_index(state.as_str().unwrap()).unwrap();
        m.set_nominal(nom.trim_end_matches('\''), c);
    }
    let ax = parse(w["axiom"].as_str().unwrap(), &Signature::hybrid_k()).unwrap();
    let c = m.state_index(w["state"].as_str().unwrap()).unwrap();
    assert!(!m.satisfies(c, &ax).unwrap());

    for model in ["kripke.model", "cycle.model"] {
        let (code, _) = machine(&["frame-check", "--model", &data(model), "--axioms", &data("nominal.axioms")]);
        assert_eq!(code, 0);
    }

    let (code, v) = machine(&["frame-check", "--model", &data("cycle.model"), "--axioms", &data("impure.axioms")]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("not pure"));
}

#[test]
fn prove_examples() {
    let (code, v) = machine(&["prove", "--proof", &data("refl.proof")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("accepted")));
    assert_eq!(v["details"]["conclusion"], "@i' i'");

    let (code, v) = machine(&["prove", "--proof", &data("back.proof")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("accepted")));
    let (code, _) = machine(&["prove", "--proof", &data("back.proof"), "--formula", "(@i' p -> box @i' p)"]);
    assert_eq!(code, 0);
    let (code, v) = machine(&["prove", "--proof", &data("back.proof"), "--formula", "(@i' p -> dia @i' p)"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("rejected")));

    let (code, v) = machine(&["prove", "--proof", &data("broken_name.proof")]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("rejected")));
    assert_eq!(v["witness"]["line"], 2);
}

#[test]
fn prove_reads_sibling_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.txt"), "q\n").unwrap();
    let proof = dir.path().join("p.proof");
    std::fs::write(&proof, "sig: K\nrules: K\ntbox: t.txt\n1. q BY tbox:1\n2. @i' q BY atgen 1 i'\n").unwrap();
    let (code, v) = machine(&["prove", "--proof", proof.to_str().unwrap()]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("accepted")), "{v}");
}

#[test]
fn sat_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("found.model");
    let (code, v) = machine(&["sat", "--problem", &data("dia_at.problem"), "--model", out.to_str().unwrap()]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("sat")));
    let m = parse_model(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(m.states.len() <= 2);
    let d = m.state_index(v["witness"]["designated"].as_str().unwrap()).unwrap();
    let sig = Signature::hybrid_k();
    assert!(m.satisfies(d, &parse("(dia i' & @i' p)", &sig).unwrap()).unwrap());
    assert_eq!(v["witness"]["check"]["truth_lemma"], true);

    let (code, v) = machine(&["sat", "--problem", &data("trans.problem")]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("unsat-within-bounds")));
    assert!(v.get("witness").is_none());

    let (code, v) = machine(&["sat", "--problem", &data("zero.problem")]);
    assert_eq!((code, v["verdict"].as_str()), (2, Some("error")));
}

#[test]
fn onestep_examples() {
    let (code, v) = machine(&["onestep", "--problem", &data("box.onestep")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("sat")));
    let succ: Vec<&str> = v["witness"]["successors"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(succ.iter().all(|s| *s == "x"));

    let (code, v) = machine(&["onestep", "--problem", &data("contra.onestep")]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("unsat-within-bounds")));
    assert_eq!(v["details"]["agree"], true);

    let (code, v) = machine(&["onestep", "--problem", &data("graded.onestep")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("sat")));
    assert_eq!(v["witness"]["multiplicities"]["x"], 1);

    let (code, v) = machine(&["onestep", "--problem", &data("graded.onestep"), "--rules", "graded"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["consistent"], true);
}

#[test]
fn validate_subcommand() {
    let (code, v) = machine(&["validate", "--model", &data("kripke.model")]);
    assert_eq!((code, v["details"]["named"].as_bool()), (0, Some(true)));
    let (code, _) = machine(&["validate", "--formula", "dn x'. dia x'"]);
    assert_eq!(code, 0);
    let (code, _) = machine(&["validate", "--formula", "<2> p", "--sig", "graded"]);
    assert_eq!(code, 0);
    let (code, _) = machine(&["validate", "--formula", "<2> p"]);
    assert_eq!(code, 2);
    let (code, _) = machine(&["validate", "--axioms", &data("impure.axioms")]);
    assert_eq!(code, 1);
}

#[test]
fn machine_output_is_byte_stable() {
    let runs = [
        vec!["sat", "--problem", "dia_at.problem"],
        vec!["frame-check", "--model", "cycle.model", "--axioms", "trans.axioms"],
        vec!["onestep", "--problem", "contra.onestep"],
    ];
    for run in runs {
        let args: Vec<String> = run.iter().map(|a| if a.contains('.') { data(a) } else { a.to_string() }).collect();
        let mut args: Vec<&str> = args.iter().map(String::as_str).collect();
        args.extend(["--format", "machine", "--seed", "7"]);
        let a = hycoa(&args).stdout;
        let b = hycoa(&args).stdout;
        assert_eq!(a, b);
        let v: Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(v["details"]["seed"], 7);
    }
}

#[test]
fn bounds_precedence() {
    let run = |env: Option<&str>, extra: &[&str]| -> Value {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_hycoa"));
        cmd.args(["sat", "--problem", &data("zero.problem"), "--format", "machine"]).args(extra);
        match env {
            Some(e) => cmd.env("HYCOA_BOUNDS", e),
            None => cmd.env_remove("HYCOA_BOUNDS"),
        };
        serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap()
    };
    // the file says max_states=0; the environment only fills what the file leaves open
    let v = run(Some("max_states=5 max_mult=1"), &[]);
    assert_eq!(v["verdict"], "error");
    let v = run(Some("max_states=5 max_mult=1"), &["--max-states", "2"]);
    assert_eq!(v["verdict"], "sat");
    assert_eq!(v["details"]["bounds"]["max_states"], 2);
    assert_eq!(v["details"]["bounds"]["max_mult"], 1);
    let v = run(Some("max_mult=1"), &["--max-states", "2", "--max-mult", "2"]);
    assert_eq!(v["details"]["bounds"]["max_mult"], 2);
    let v = run(Some("nonsense"), &["--max-states", "2"]);
    assert_eq!(v["verdict"], "error");
}

#[test]
fn human_output_names_the_verdict() {
    let out = hycoa(&["check", "--model", &data("kripke.model"), "--formula", "p", "--state", "s0"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("check: valid"));
    let out = hycoa(&["check", "--model", &data("kripke.model"), "--formula", "(p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("check: error"));
}

mod common;

use std::process::Command;

use common::{run, Fixtures};
use ordcone::io::{emit_chain, parse_chain, parse_structure};
use ordcone::Rational;

#[test]
fn validate_exit_codes() {
    let f = Fixtures::new();
    let ok = run(&["validate", "--structure", &f.path("orth2.json")]);
    assert_eq!((ok.code, ok.stdout.as_str()), (0, "valid\n"));
    let bad = run(&["validate", "--structure", &f.path("bad2.json")]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.contains("RV2"), "{}", bad.stdout);
    let json = run(&["validate", "--structure", &f.path("bad2.json"), "--json"]);
    assert_eq!(json.code, 1);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    let violations = v["violations"].as_array().unwrap();
    assert!(violations.iter().all(|x| x["clause"] == "RV2"));
    assert!(violations.iter().any(|x| x["witnesses"] == serde_json::json!([[1], [1, 2]])));
    assert_eq!(run(&["validate", "--structure", &f.path("broken.json")]).code, 2);
    let missing = run(&["validate", "--structure", &f.path("no_e_pos.json")]);
    assert_eq!(missing.code, 2);
    assert!(missing.stderr.contains("S = {1,2}") && missing.stderr.contains("e_pos"), "{}", missing.stderr);
    assert_eq!(run(&["validate", "--structure", &f.path("absent.json")]).code, 2);
}

#[test]
fn derive_output() {
    let f = Fixtures::new();
    let out = run(&["derive", "--structure", &f.path("lex2.json"), "--json"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["P"], serde_json::json!([[1, 2], []]));
    assert_eq!(v["Z"], serde_json::json!([[], []]));
    assert_eq!(run(&["derive", "--structure", &f.path("orth2.json")]).code, 0);
    assert_eq!(run(&["derive", "--structure", &f.path("bad2.json")]).code, 2);
}

#[test]
fn member_exit_codes() {
    let f = Fixtures::new();
    let lex = f.path("lex2.json");
    let no = run(&["member", "--structure", &lex, "--vector", "0,3"]);
    assert_eq!((no.code, no.stdout.as_str()), (1, "false\n"));
    let yes = run(&["member", "--structure", &lex, "--vector", "1,-5"]);
    assert_eq!((yes.code, yes.stdout.as_str()), (0, "true\n"));
    assert_eq!(run(&["member", "--structure", &lex, "--vector", "1,-5", "--vector", "0,3"]).code, 1);
    assert_eq!(run(&["member", "--structure", &lex, "--vector", "1/0,3"]).code, 2);
    assert_eq!(run(&["member", "--structure", &lex, "--vector", "1,2,3"]).code, 2);
    let usage = run(&["member", "--structure", &lex]);
    assert_eq!(usage.code, 2);
    assert!(usage.stderr.contains("--vector"), "{}", usage.stderr);
}

#[test]
fn realize_then_verify() {
    let f = Fixtures::new();
    let chain = f.path("chain.json");
    let out = run(&["realize", "--structure", &f.path("lex2.json"), "--stages", "5", "--out", &chain]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(run(&["verify", "--chain", &chain]).code, 0);
    let parsed = parse_chain::<Rational>(&f.read("chain.json")).unwrap();
    assert_eq!(parsed.stages.len(), 5);
    assert_eq!(emit_chain(&parsed), f.read("chain.json"));

    assert_eq!(run(&["realize", "--structure", &f.path("lex2.json"), "--stages", "0"]).code, 2);
    assert_eq!(run(&["realize", "--structure", &f.path("lex2.json"), "--eps1", "-1"]).code, 2);
    assert_eq!(run(&["realize", "--structure", &f.path("bad2.json")]).code, 2);
}

#[test]
fn verify_exit_codes() {
    let f = Fixtures::new();
    assert_eq!(run(&["verify", "--chain", &f.path("lex2_chain.json")]).code, 0);
    let tampered = run(&["verify", "--chain", &f.path("tampered_chain.json"), "--json"]);
    assert_eq!(tampered.code, 1);
    let v: serde_json::Value = serde_json::from_str(&tampered.stdout).unwrap();
    assert!(v["failures"].as_array().unwrap().iter().any(|x| x["clause"] == "connecting-nonneg" && x["stage"] == 1));
    assert_eq!(run(&["verify", "--chain", &f.path("bad_structure_chain.json")]).code, 2);
    assert_eq!(run(&["verify", "--chain", &f.path("lex2.json")]).code, 2);
}

#[test]
fn absorb_exit_codes() {
    let f = Fixtures::new();
    let chain = f.path("lex2_chain.json");
    let out = f.path("absorbed.json");
    let ok = run(&["absorb", "--chain", &chain, "--vector", "1,-5", "--vector", "1,-5000", "--out", &out]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stdout.starts_with("1,-5: stage "));
    assert_eq!(run(&["verify", "--chain", &out]).code, 0);
    assert_eq!(run(&["absorb", "--chain", &chain, "--vector", "0,3"]).code, 1);
    assert_eq!(run(&["absorb", "--chain", &f.path("tampered_chain.json"), "--vector", "1,0"]).code, 1);
    assert_eq!(run(&["absorb", "--chain", &chain, "--vector", "x"]).code, 2);
}

#[test]
fn interpolate_exit_codes() {
    let f = Fixtures::new();
    let chain = f.path("lex2_chain.json");
    let args = |vs: &[&str]| {
        let mut a = vec!["interpolate", "--chain", chain.as_str(), "--json"];
        for v in vs {
            a.extend(["--vector", v]);
        }
        run(&a.iter().map(|s| &**s).collect::<Vec<_>>())
    };
    let ok = args(&["0,0", "1/2,-10", "1,0", "2,-3"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    let v: serde_json::Value = serde_json::from_str(&ok.stdout).unwrap();
    assert_eq!(v["b"].as_array().unwrap().len(), 2);
    assert_eq!(args(&["1,0", "0,0", "0,0", "0,0"]).code, 1);
    assert_eq!(args(&["0,0", "0,0", "0,0"]).code, 2);
}

#[test]
fn integerize_exit_codes() {
    let f = Fixtures::new();
    let out = f.path("int.json");
    let ok = run(&["integerize", "--chain", &f.path("lex2_chain.json"), "--primes", "2,3", "--out", &out]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(f.read("int.json").contains("\"integer\""));
    assert_eq!(run(&["verify", "--chain", &out]).code, 0);

    let tampered = f.read("int.json").replacen("\"scalars\": [\n      \"", "\"scalars\": [\n      \"1", 1);
    std::fs::write(f.root.join("int_bad.json"), tampered).unwrap();
    assert_eq!(run(&["verify", "--chain", &f.path("int_bad.json")]).code, 1);

    assert_eq!(run(&["integerize", "--chain", &f.path("tampered_chain.json")]).code, 1);
    assert_eq!(run(&["integerize", "--chain", &f.path("lex2_chain.json"), "--primes", "4"]).code, 2);
    assert_eq!(run(&["integerize", "--chain", &f.path("lex2_chain.json"), "--primes", "two"]).code, 2);
}

#[test]
fn lemmas_exit_codes() {
    let f = Fixtures::new();
    let ok = run(&["lemmas", "--structure", &f.path("lex2.json"), "--trials", "20", "--seed", "5", "--json"]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    let v: serde_json::Value = serde_json::from_str(&ok.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    let again = run(&["lemmas", "--structure", &f.path("lex2.json"), "--trials", "20", "--seed", "5", "--json"]);
    assert_eq!(again.stdout, ok.stdout);
    assert_eq!(run(&["lemmas", "--structure", &f.path("bad2.json")]).code, 2);
}

#[test]
fn generate_exit_codes() {
    let f = Fixtures::new();
    let out = f.path("gen.json");
    let ok = run(&["generate", "--dim", "4", "--seed", "11", "--out", &out]);
    assert_eq!(ok.code, 0);
    assert!(ok.stdout.starts_with("seed 11:"));
    assert_eq!(run(&["validate", "--structure", &out]).code, 0);
    let text = run(&["generate", "--dim", "4", "--seed", "11"]).stdout;
    assert_eq!(text, f.read("gen.json"));
    assert!(parse_structure(&text).is_ok());
    assert_eq!(run(&["generate", "--dim", "0"]).code, 2);
    let exhausted = (0..200).any(|seed| {
        let seed = seed.to_string();
        run(&["generate", "--dim", "6", "--seed", &seed, "--max-retries", "1", "--lattice-seeds", "6"]).code == 1
    });
    assert!(exhausted);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    let f = Fixtures::new();
    let bin = env!("CARGO_BIN_EXE_ordcone");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["validate", "--structure", &f.path("orth2.json")]);
    assert_eq!(ok.status.code(), Some(0));
    let no = status(&["member", "--structure", &f.path("lex2.json"), "--vector", "0,3"]);
    assert_eq!((no.status.code(), String::from_utf8_lossy(&no.stdout).trim()), (Some(1), "false"));
    assert_eq!(status(&["validate", "--structure", &f.path("broken.json")]).status.code(), Some(2));
}

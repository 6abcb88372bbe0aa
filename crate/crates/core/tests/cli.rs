use std::path::PathBuf;

use twosig::cli::{run, sigfile::parse_signature};
use twosig::lang_std;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("twosig").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn negation_translates_from_a_file() {
    let (code, out, err) = call(&["translate", "pcf2ulc", &example("negate.term"), "--paper-notation"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.trim(), "Abs (Abs (Abs (Abs (3 @ 2 @ 1))) @ 1 @ Abs (Abs 1) @ Abs (Abs 2))");
}

#[test]
fn negation_has_a_function_sort() {
    let (code, out, _) = call(&["typecheck", "pcf", &example("negate.term")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "(~> Bool Bool)");
}

#[test]
fn open_terms_need_a_context() {
    let (code, _, _) = call(&["translate", "pcf2ulc", "(rec [Nat] #0)"]);
    assert_ne!(code, 0);
    let (code, out, _) = call(&["translate", "pcf2ulc", "(rec [Nat] #0)", "--ctx", "(~> Nat Nat)", "--paper-notation"]);
    assert_eq!(code, 0);
    assert!(out.trim().ends_with("@ 1"), "{out}");
}

#[test]
fn normalize_reports_steps_and_status() {
    let (code, out, _) = call(&["normalize", "pcf", "condN · (zero · Nats(0)) · (succ · Nats(1)) · Nats(9)"]);
    assert_eq!(code, 0);
    assert_eq!(out, "(nats {2})\nsteps 3 normal\n");

    // bottom has no rule of its own; a fixpoint of succ unfolds forever
    let (code, out, _) = call(&["normalize", "pcf", "(bottom [Nat])"]);
    assert_eq!((code, out.as_str()), (0, "(bottom [Nat])\nsteps 0 normal\n"));
    let (code, out, _) = call(&["normalize", "pcf", "(rec [Nat] (abs [Nat Nat] (succ · #0)))", "--max", "5"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("steps 5 exhausted\n"), "{out}");
}

#[test]
fn reduce_stops_after_the_requested_steps() {
    let (code, out, _) = call(&["reduce", "pcf", "pred · (succ · (succ · Nats(0)))", "--steps", "1"]);
    assert_eq!(code, 0);
    // pred only cancels a succ applied to a literal, so the inner succ goes first
    assert_eq!(out.trim(), "(app [Nat Nat] pred (app [Nat Nat] succ (nats {1})))");
    let (_, out, _) = call(&["reduce", "pcf", "pred · (succ · (succ · Nats(0)))", "--steps", "2"]);
    assert_eq!(out.trim(), "(nats {1})");
}

#[test]
fn example_signature_files_check() {
    for f in ["pcf.sig", "ulc.sig", "stlc.sig"] {
        let (code, out, err) = call(&["check", &example(f)]);
        assert_eq!(code, 0, "{f}: {err}");
        assert!(out.contains(": ok,"), "{out}");
    }
}

#[test]
fn example_signature_files_match_the_catalog() {
    for (f, sig) in [
        ("pcf.sig", lang_std::pcf_signature()),
        ("ulc.sig", lang_std::ulc_signature()),
        ("stlc.sig", lang_std::stlc_signature()),
    ] {
        let text = std::fs::read_to_string(example(f)).unwrap();
        assert_eq!(parse_signature(&text).unwrap(), sig, "{f}");
    }
}

#[test]
fn a_language_can_come_from_a_file() {
    let (code, out, err) = call(&["reduce", &example("pcf.sig"), "zero · Nats(0)"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.trim(), "ttt");
}

#[test]
fn small_verify_run_passes() {
    let (code, out, _) = call(&["verify", "pcf2ulc", "--samples", "5", "--rule", "app_abs", "--rule", "zero_t"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("app_abs"), "{out}");
    assert!(!out.contains("pred_Succ"), "{out}");
}

#[test]
fn unknown_rule_is_a_usage_error() {
    assert_eq!(call(&["verify", "pcf2ulc", "--rule", "eta"]).0, 2);
}

#[test]
fn laws_subcommand_passes_on_the_catalog() {
    for lang in ["pcf", "ulc", "stlc"] {
        let (code, out, _) = call(&["laws", lang, "--samples", "40"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("monad-assoc"), "{out}");
    }
}

#[test]
fn no_arguments_prints_usage() {
    let (code, _, err) = call(&[]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
}

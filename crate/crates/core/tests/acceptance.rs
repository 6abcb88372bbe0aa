//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_FAILING` are expected to fail for reasons
//! explained in the README; they still print FAIL, and the run only fails
//! when some other criterion fails or a known one starts passing.

mod common;

use std::time::Instant;

use twosig::lang_std::{self, ulc_terms};
use twosig::laws::{check_monad_laws, check_reduction_laws, LawConfig};
use twosig::reduction::{reduces_to, Bounds, Reach};
use twosig::representation::{
    check_faithfulness, check_satisfaction, check_satisfaction_of, check_translation_laws, CheckConfig,
};
use twosig::syntax::text::{parse_term, print_term, Notation};
use twosig::syntax::{Context, Sort, Term};

/// pred (succ n) <= n does not hold by reduction in the untyped calculus
/// for n >= 1 with the Church numerals as printed.
const KNOWN_FAILING: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn pcf_term(ctx: &Context, text: &str) -> Term {
    parse_term(&lang_std::pcf(), ctx, text, Notation::Plain).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn golden_translations() -> Outcome {
    let rep = lang_std::pcf_to_ulc_representation();
    let rep_y = lang_std::pcf_to_ulc_y_representation();
    let nat_fun = Context::from_innermost(vec![Sort::new("~>", vec![Sort::constant("Nat"), Sort::constant("Nat")])]);
    let empty = Context::empty();
    let cases: Vec<(&str, &twosig::Representation, &Context, &str, &str)> = vec![
        ("ULC_True", &rep, &empty, "ttt", "Abs (Abs 2)"),
        ("ULC_False", &rep, &empty, "fff", "Abs (Abs 1)"),
        ("ULC_Nat 0", &rep, &empty, "(nats {0})", "Abs (Abs 1)"),
        ("ULC_Nat 2", &rep, &empty, "(nats {2})", "Abs (Abs (2 @ (Abs (Abs (2 @ (Abs (Abs 1) @ 2 @ 1))) @ 2 @ 1)))"),
        ("ULC_succ", &rep, &empty, "succ", "Abs (Abs (Abs (2 @ (3 @ 2 @ 1))))"),
        ("ULC_pred", &rep, &empty, "pred", "Abs (Abs (Abs (3 @ Abs (Abs (1 @ (2 @ 4))) @ Abs 2 @ Abs 1)))"),
        ("ULC_zero", &rep, &empty, "zero", "Abs (1 @ Abs (Abs (Abs 1)) @ Abs (Abs 2))"),
        ("ULC_cond", &rep, &empty, "condN", "Abs (Abs (Abs (3 @ 2 @ 1)))"),
        ("ULC_omega", &rep, &empty, "(bottom [Nat])", "Abs (1 @ 1) @ Abs (1 @ 1)"),
        // rec g goes to the combinator applied to g, printed left-associated
        (
            "ULC_theta",
            &rep,
            &nat_fun,
            "(rec [Nat] #0)",
            "Abs (Abs (1 @ (2 @ 2 @ 1))) @ Abs (Abs (1 @ (2 @ 2 @ 1))) @ 1",
        ),
        ("ULC_Y", &rep_y, &nat_fun, "(rec [Nat] #0)", "Abs (Abs (2 @ (1 @ 1)) @ Abs (2 @ (1 @ 1))) @ 1"),
        (
            "negation",
            &rep,
            &empty,
            "(abs [Bool Bool] (condB · #0 · fff · ttt))",
            "Abs (Abs (Abs (Abs (3 @ 2 @ 1))) @ 1 @ Abs (Abs 1) @ Abs (Abs 2))",
        ),
    ];
    let mut bad = Vec::new();
    for (name, rep, ctx, src, want) in &cases {
        let got = rep.translate(ctx, &pcf_term(ctx, src)).map(|t| print_term(&t, Notation::Paper));
        if got.as_deref() != Ok(*want) {
            bad.push(format!("{name}: {got:?}"));
        }
    }
    // the combinators on their own
    for (name, t, want) in [
        ("theta", ulc_terms::theta(), "Abs (Abs (1 @ (2 @ 2 @ 1))) @ Abs (Abs (1 @ (2 @ 2 @ 1)))"),
        ("Y", ulc_terms::y(), "Abs (Abs (2 @ (1 @ 1)) @ Abs (2 @ (1 @ 1)))"),
    ] {
        if print_term(&t, Notation::Paper) != want {
            bad.push(name.to_string());
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{} strings exact", cases.len() + 2) } else { bad.join("; ") })
}

fn base_rules() -> Outcome {
    let pcf = lang_std::pcf();
    let e = Context::empty();
    let cases = [
        ("app_abs", "(abs [Nat Nat] (succ · #0)) · Nats(3)", "succ · Nats(3)"),
        ("condN_t", "condN · ttt · Nats(1) · Nats(2)", "Nats(1)"),
        ("condN_f", "condN · fff · Nats(1) · Nats(2)", "Nats(2)"),
        ("condB_t", "condB · ttt · fff · ttt", "fff"),
        ("condB_f", "condB · fff · fff · ttt", "ttt"),
        ("succ_red", "succ · Nats(4)", "Nats(5)"),
        ("zero_t", "zero · Nats(0)", "ttt"),
        ("zero_f", "zero · Nats(3)", "fff"),
        ("pred_Succ", "pred · (succ · Nats(7))", "Nats(7)"),
        ("pred_z", "pred · Nats(0)", "Nats(0)"),
        (
            "rec_a",
            "(rec [Nat] (abs [Nat Nat] (succ · #0)))",
            "(abs [Nat Nat] (succ · #0)) · (rec [Nat] (abs [Nat Nat] (succ · #0)))",
        ),
    ];
    let mut bad = Vec::new();
    for (rule, src, dst) in cases {
        let (s, t) = (pcf_term(&e, src), pcf_term(&e, dst));
        match reduces_to(&pcf, &e, &s, &t, Bounds::steps(1)) {
            Ok(Reach::Yes(tr)) if tr.len() == 1 && &*tr.steps[0].rule == rule && tr.steps[0].path.is_empty() => {}
            other => bad.push(format!("{rule}: {:?}", other.map(|r| r.label()))),
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { "11 rules fire at the root in exactly 1 step".into() } else { bad.join("; ") },
    )
}

fn turing_vs_y() -> Outcome {
    let ulc = lang_std::ulc();
    let ctx = Context::from_innermost(vec![Sort::constant("*")]);
    let g = Term::var(0);
    let ap = |f: Term, a: Term| ulc.node("app", vec![], vec![f, a]);
    let theta = ap(ulc_terms::theta(), g.clone());
    let y = ap(ulc_terms::y(), g.clone());
    let t = reduces_to(&ulc, &ctx, &theta, &ap(g.clone(), theta.clone()), Bounds::new(2, 64)).unwrap();
    let u = reduces_to(&ulc, &ctx, &y, &ap(g, y.clone()), Bounds::new(8, 4096)).unwrap();
    let theta_ok = matches!(&t, Reach::Yes(tr) if tr.len() == 2);
    let pass = theta_ok && !u.is_yes();
    outcome(
        pass,
        format!(
            "theta: {} in {} steps; Y: {}",
            t.label(),
            if let Reach::Yes(tr) = &t { tr.len() } else { 0 },
            u.label()
        ),
    )
}

fn monad_laws() -> Outcome {
    let cfg = LawConfig { samples: 500, depth: 5, ..LawConfig::default() };
    let mut bad = Vec::new();
    let mut parts = Vec::new();
    for lang in [lang_std::pcf(), lang_std::ulc(), lang_std::stlc()] {
        let r = check_monad_laws(&lang, &cfg);
        let terms =
            ["monad-unit-right", "rename-subst-coherence"].iter().map(|l| r.check(l).unwrap().checked).min().unwrap();
        let assoc = r.check("monad-assoc").unwrap().checked;
        if !r.passed() || terms < 500 || assoc < 500 {
            bad.push(format!("{}: failures {} terms {terms} assoc {assoc}", lang.name(), r.failures()));
        }
        parts.push(format!("{} {terms}", lang.name()));
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("zero failures; terms per signature: {}", parts.join(", "))
        } else {
            bad.join("; ")
        },
    )
}

fn oracles() -> Outcome {
    let (many, one, bad_subst) = common::named::compare_random(0x0AC1E, 400);
    let (compared, skipped, bad_eval) = common::pcf_eval::compare_random(0xE7A1, 300);
    let pass = bad_subst.is_empty() && bad_eval.is_empty() && many >= 300 && one >= 300 && compared >= 100;
    let mut detail = format!(
        "subst {many} / subst_one {one} ULC terms, {} disagreements; {compared} PCF programs ({skipped} stuck or out of fuel skipped), {} disagreements",
        bad_subst.len(),
        bad_eval.len()
    );
    if let Some(x) = bad_subst.first().or(bad_eval.first()) {
        detail += &format!("; first: {x}");
    }
    outcome(pass, detail)
}

fn satisfaction() -> Outcome {
    let cfg = CheckConfig { samples: 200, depth: 4, bound: 16, seed: 0xC0FFEE, ..CheckConfig::default() };
    let r = check_satisfaction(&lang_std::pcf_to_ulc_representation(), &cfg);
    let app = r.rule("app_abs").unwrap();
    let rec = r.rule("rec_a").unwrap();
    let beta_ok = app.yes == app.attempted && app.max_yes_steps <= 1;
    let rec_ok = rec.yes == rec.attempted && rec.max_yes_steps <= 2;
    let y = check_satisfaction_of(&lang_std::pcf_to_ulc_y_representation(), &cfg, |r| r == "rec_a");
    let y_rec = y.rule("rec_a").unwrap();
    let offenders: Vec<String> =
        r.rules.iter().filter(|x| x.no > 0).map(|x| format!("{} no {} unknown {}", x.rule, x.no, x.unknown)).collect();
    let pass = r.total_no() == 0 && beta_ok && rec_ok && y_rec.yes == 0;
    outcome(
        pass,
        format!(
            "no {} ({}); app_abs {}/{} max {}; rec_a {}/{} max {}; Y rec_a yes {}",
            r.total_no(),
            if offenders.is_empty() { "none".into() } else { offenders.join(", ") },
            app.yes,
            app.attempted,
            app.max_yes_steps,
            rec.yes,
            rec.attempted,
            rec.max_yes_steps,
            y_rec.yes
        ),
    )
}

fn faithfulness() -> Outcome {
    let cfg = CheckConfig { samples: 200, depth: 4, bound: 32, seed: 0xC0FFEE, ..CheckConfig::default() };
    let r = check_faithfulness(&lang_std::pcf_to_ulc_representation(), &cfg);
    outcome(
        r.terms >= 200 && r.failures() == 0,
        format!("{} terms, {} steps, yes {} unknown {} no {}", r.terms, r.steps_checked, r.yes, r.unknown, r.no),
    )
}

fn translation_laws() -> Outcome {
    let r = check_translation_laws(&lang_std::pcf_to_ulc_representation(), 300, 4, 0xC0FFEE);
    outcome(
        r.failures.is_empty() && r.rename_checked >= 300 && r.subst_checked >= 300,
        format!(
            "rename {} subst {} subst_one {} failures {}",
            r.rename_checked,
            r.subst_checked,
            r.subst_one_checked,
            r.failures.len()
        ),
    )
}

fn reduction_laws() -> Outcome {
    let cfg = LawConfig { samples: 500, depth: 4, ..LawConfig::default() };
    let mut bad = Vec::new();
    let mut least = usize::MAX;
    for lang in [lang_std::pcf(), lang_std::ulc(), lang_std::stlc()] {
        let r = check_reduction_laws(&lang, &cfg);
        for c in &r.checks {
            least = least.min(c.checked);
            if !c.passed() || c.checked < 300 {
                bad.push(format!(
                    "{} {}: checked {} unknown {} failures {}",
                    lang.name(),
                    c.law,
                    c.checked,
                    c.unknown,
                    c.failures.len()
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("all pass, at least {least} samples per law and signature")
        } else {
            bad.join("; ")
        },
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden translations", golden_translations),
        ("PCF base rules", base_rules),
        ("Turing vs Y", turing_vs_y),
        ("monad laws", monad_laws),
        ("oracle equivalence", oracles),
        ("satisfaction", satisfaction),
        ("faithfulness", faithfulness),
        ("translation laws", translation_laws),
        ("reduction laws", reduction_laws),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let start = Instant::now();
        let o = run();
        let known = KNOWN_FAILING.contains(&n);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {n} {name}: {tag}: {} [{:.1?}]", o.detail, start.elapsed());
        if o.pass == known {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

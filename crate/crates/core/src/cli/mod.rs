//! The `twosig` command line. [`run`] takes the full argument vector and
//! writes to the given streams, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 a violation or ill-typed input was found, 2
//! usage or parse error, 3 only bounded searches without an answer.

pub mod sigfile;

use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};

use crate::lang_std;
use crate::laws::{check_laws, LawConfig};
use crate::reduction::{normalize, Strategy, Trace};
use crate::representation::{
    check_faithfulness, check_satisfaction_of, check_translation_laws, CheckConfig, Representation,
};
use crate::signature::Language;
use crate::syntax::text::{parse_context, parse_term_sorted, print_term, Notation, TextError};
use crate::syntax::{typecheck, Context, Sort, Term};

#[derive(Parser, Debug)]
#[command(name = "twosig", version, about = "Languages from 2-signatures: typecheck, reduce, translate, verify")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and validate a signature file.
    Check { sig: String },
    /// Print the sort of a term.
    Typecheck {
        /// Catalog name (pcf, ulc, stlc) or signature file.
        sig: String,
        /// Term text or a file holding it.
        term: String,
        /// Context sorts, innermost (#0) first, comma separated.
        #[arg(long)]
        ctx: Option<String>,
    },
    /// Take leftmost-outermost steps.
    Reduce {
        sig: String,
        term: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        paper_notation: bool,
        #[arg(long)]
        ctx: Option<String>,
    },
    /// Reduce leftmost-outermost until no step applies or the bound is hit.
    Normalize {
        sig: String,
        term: String,
        #[arg(long, default_value_t = 1000)]
        max: usize,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        paper_notation: bool,
        #[arg(long)]
        ctx: Option<String>,
    },
    /// Translate a term along a representation.
    Translate {
        /// pcf2ulc, pcf2ulc-y or identity:<sig>.
        rep: String,
        term: String,
        #[arg(long)]
        ctx: Option<String>,
        #[arg(long)]
        paper_notation: bool,
    },
    /// Sampled satisfaction, faithfulness and translation-law checks.
    Verify {
        rep: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 16)]
        bound: usize,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        /// Step bound for the faithfulness searches.
        #[arg(long, default_value_t = 32)]
        faith_bound: usize,
        /// New terms kept per breadth-first level.
        #[arg(long, default_value_t = 512)]
        frontier: usize,
        /// Only check satisfaction of these rules (repeatable).
        #[arg(long)]
        rule: Vec<String>,
    },
    /// Substitution and reduction law suites on random terms.
    Laws {
        sig: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("bad seed `{s}`: {e}"))
}

/// An error already formatted for the user, with its exit code.
struct Fail(i32, String);

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

/// Runs the command line `args` (program name first).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn read_text(arg: &str) -> Result<String, Fail> {
    std::fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))
}

/// A catalog language, or a signature file named after its stem.
pub fn load_language(arg: &str) -> Result<Language, String> {
    if let Some(l) = lang_std::language(arg) {
        return Ok(l);
    }
    if !Path::new(arg).is_file() {
        return Err(format!(
            "`{arg}` is neither a catalog signature ({}) nor a file",
            lang_std::SIGNATURE_NAMES.join(", ")
        ));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    let sig = sigfile::parse_signature(&text)
        .map_err(|e| e.0.iter().map(|d| format!("{arg}:{d}")).collect::<Vec<_>>().join("\n"))?;
    let name = Path::new(arg).file_stem().map_or(arg.to_string(), |s| s.to_string_lossy().into_owned());
    Language::new(name, sig).map_err(|r| r.to_string())
}

fn load_rep(name: &str) -> Result<Representation, Fail> {
    lang_std::representation(name)
        .ok_or_else(|| usage(format!("unknown representation `{name}` (pcf2ulc, pcf2ulc-y, identity:<sig>)")))
}

fn load_ctx(lang: &Language, ctx: Option<&str>) -> Result<Context, Fail> {
    match ctx {
        None => Ok(Context::empty()),
        Some(text) => parse_context(lang.sorts(), text).map_err(|e| usage(format!("--ctx: {e}"))),
    }
}

/// Reads a term given inline or as a file. Plain syntax is tried first,
/// then the `--paper-notation` form.
fn load_term(lang: &Language, ctx: &Context, arg: &str) -> Result<(Term, Sort), Fail> {
    let text = if Path::new(arg).is_file() { read_text(arg)? } else { arg.to_string() };
    let text = text.trim();
    match parse_term_sorted(lang, ctx, text, Notation::Plain, None) {
        Ok(r) => Ok(r),
        Err(plain) => parse_term_sorted(lang, ctx, text, Notation::Paper, None).map_err(|_| usage(plain.to_string())),
    }
}

fn notation(paper: bool) -> Notation {
    if paper {
        Notation::Paper
    } else {
        Notation::Plain
    }
}

fn print_trace(out: &mut dyn Write, trace: &Trace, n: Notation) -> std::io::Result<()> {
    writeln!(out, "0. {}", print_term(&trace.start, n))?;
    write!(out, "{}", trace.render(n))
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32, Fail> {
    let io = |e: std::io::Error| Fail(1, e.to_string());
    match cmd {
        Cmd::Check { sig } => {
            let text = read_text(&sig)?;
            let parsed = sigfile::parse_signature(&text)
                .map_err(|e| usage(e.0.iter().map(|d| format!("{sig}:{d}")).collect::<Vec<_>>().join("\n")))?;
            let lang = Language::new(sig.clone(), parsed).map_err(|r| usage(r.to_string()))?;
            writeln!(
                out,
                "{sig}: ok, {} sorts, {} arities, {} rules",
                lang.sorts().constructors.len(),
                lang.arities().len(),
                lang.rules().len()
            )
            .map_err(io)?;
            Ok(0)
        }
        Cmd::Typecheck { sig, term, ctx } => {
            let lang = load_language(&sig).map_err(usage)?;
            let ctx = load_ctx(&lang, ctx.as_deref())?;
            let text = if Path::new(&term).is_file() { read_text(&term)? } else { term.clone() };
            match parse_term_sorted(&lang, &ctx, text.trim(), Notation::Plain, None) {
                Ok((t, _)) => {
                    let s = typecheck(&lang, &ctx, &t).map_err(|e| Fail(1, e.to_string()))?;
                    writeln!(out, "{s}").map_err(io)?;
                    Ok(0)
                }
                Err(e @ TextError::Syntax { .. }) => Err(usage(e.to_string())),
                Err(e) => Err(Fail(1, e.to_string())),
            }
        }
        Cmd::Reduce { sig, term, steps, trace, paper_notation, ctx } => {
            let lang = load_language(&sig).map_err(usage)?;
            let ctx = load_ctx(&lang, ctx.as_deref())?;
            let (t, _) = load_term(&lang, &ctx, &term)?;
            let r = normalize(&lang, &t, steps, Strategy::LeftmostOutermost);
            let n = notation(paper_notation);
            if trace {
                print_trace(out, &r.trace, n).map_err(io)?;
            } else {
                writeln!(out, "{}", print_term(&r.term, n)).map_err(io)?;
            }
            Ok(0)
        }
        Cmd::Normalize { sig, term, max, trace, paper_notation, ctx } => {
            let lang = load_language(&sig).map_err(usage)?;
            let ctx = load_ctx(&lang, ctx.as_deref())?;
            let (t, _) = load_term(&lang, &ctx, &term)?;
            let r = normalize(&lang, &t, max, Strategy::LeftmostOutermost);
            let n = notation(paper_notation);
            if trace {
                print_trace(out, &r.trace, n).map_err(io)?;
            }
            writeln!(out, "{}", print_term(&r.term, n)).map_err(io)?;
            let status = if r.exhausted { "exhausted" } else { "normal" };
            writeln!(out, "steps {} {status}", r.trace.len()).map_err(io)?;
            Ok(0)
        }
        Cmd::Translate { rep, term, ctx, paper_notation } => {
            let rep = load_rep(&rep)?;
            let ctx = load_ctx(rep.source(), ctx.as_deref())?;
            let (t, _) = load_term(rep.source(), &ctx, &term)?;
            let u = rep.translate(&ctx, &t).map_err(|e| Fail(1, e.to_string()))?;
            writeln!(out, "{}", print_term(&u, notation(paper_notation))).map_err(io)?;
            Ok(0)
        }
        Cmd::Verify { rep, samples, depth, bound, seed, faith_bound, frontier, rule } => {
            let rep = load_rep(&rep)?;
            let cfg = CheckConfig { samples, depth, bound, max_frontier: frontier, seed };
            writeln!(
                out,
                "verify {} (seed {seed:#x}, samples {samples}, depth {depth}, bound {bound}, faith-bound {faith_bound}, frontier {frontier})",
                rep.name()
            )
            .map_err(io)?;
            if let Some(r) = rule.iter().find(|r| rep.source().signature().rule(r).is_none()) {
                return Err(usage(format!("no rule `{r}` in {}", rep.source().name())));
            }
            let sat = check_satisfaction_of(&rep, &cfg, |r| rule.is_empty() || rule.iter().any(|x| x == r));
            write!(out, "{sat}").map_err(io)?;
            let faith = check_faithfulness(&rep, &CheckConfig { bound: faith_bound, ..cfg });
            write!(out, "{faith}").map_err(io)?;
            let laws = check_translation_laws(&rep, samples, depth, seed);
            write!(out, "{laws}").map_err(io)?;
            let no = sat.total_no() + faith.no + laws.failures.len();
            let unknown = sat.total_unknown() + faith.unknown;
            writeln!(out, "summary: no {no} unknown {unknown}").map_err(io)?;
            Ok(if no > 0 {
                1
            } else if unknown > 0 {
                3
            } else {
                0
            })
        }
        Cmd::Laws { sig, samples, seed, depth } => {
            let lang = load_language(&sig).map_err(usage)?;
            let cfg = LawConfig { samples, seed, depth, ..LawConfig::default() };
            let r = check_laws(&lang, &cfg);
            write!(out, "{r}").map_err(io)?;
            Ok(if r.failures() > 0 {
                1
            } else if r.unknown() > 0 {
                3
            } else {
                0
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("twosig").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn zero_test_reduces_in_one_traced_step() {
        let (code, out, _) = call(&["reduce", "pcf", "(zero · Nats(0))", "--trace"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0. (app [Nat Bool] zero (nats {0}))\n1. [zero_t@root] ttt\n");
    }

    #[test]
    fn seeds_accept_hex_and_decimal() {
        assert_eq!(parse_seed("0xC0FFEE"), Ok(0xC0FFEE));
        assert_eq!(parse_seed("12"), Ok(12));
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["reduce", "pcf", "(zero"]).0, 2);
        assert_eq!(call(&["translate", "nope", "ttt"]).0, 2);
    }

    #[test]
    fn ill_typed_terms_exit_one_on_typecheck() {
        let (code, _, err) = call(&["typecheck", "pcf", "(app [Nat Bool] ttt (nats {0}))"]);
        assert_eq!(code, 1, "{err}");
        assert!(err.contains("cannot have sort"), "{err}");
    }

    #[test]
    fn empty_verify_succeeds() {
        let (code, out, _) = call(&["verify", "pcf2ulc", "--samples", "0"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("seed 0xc0ffee"));
    }
}

//! Leftmost-outermost traces of small PCF programs, one rule per line.
//!
//! cargo run --example pcf_traces

use twosig::lang_std;
use twosig::reduction::{normalize, Strategy};
use twosig::syntax::text::{parse_term, Notation};
use twosig::Context;

const PROGRAMS: &[&str] = &[
    "pred · (succ · Nats(4))",
    "condN · (zero · Nats(0)) · (succ · Nats(1)) · Nats(9)",
    "(abs [Bool Bool] (condB · #0 · fff · ttt)) · (zero · Nats(2))",
    // a fixpoint that ignores its argument stops after one unfolding
    "(rec [Nat] (abs [Nat Nat] Nats(3)))",
];

fn main() {
    let pcf = lang_std::pcf();
    for src in PROGRAMS {
        let t = parse_term(&pcf, &Context::empty(), src, Notation::Plain).expect("PCF term");
        let r = normalize(&pcf, &t, 100, Strategy::LeftmostOutermost);
        println!("0. {src}");
        for (k, step) in r.trace.steps.iter().enumerate() {
            println!("{}. [{}@{}]", k + 1, step.rule, step.path_string());
        }
        println!("   = {}\n", twosig::syntax::text::print_term(&r.term, Notation::Plain));
    }
}

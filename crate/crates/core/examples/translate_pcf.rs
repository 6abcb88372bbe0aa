//! Prints the untyped translation of the PCF constants and a few programs,
//! then normalises the translated programs and decodes the Church results.
//!
//! cargo run --example translate_pcf

use twosig::lang_std::{self, church, ulc_terms};
use twosig::reduction::{normalize, Strategy};
use twosig::syntax::text::{parse_term, print_term, Notation};
use twosig::Context;

fn main() {
    let pcf = lang_std::pcf();
    let ulc = lang_std::ulc();
    let rep = lang_std::pcf_to_ulc_representation();
    let ctx = Context::empty();
    let show = |src: &str| {
        let t = parse_term(&pcf, &ctx, src, Notation::Plain).expect("PCF term");
        let u = rep.translate(&ctx, &t).expect("closed terms translate");
        println!("{src:<40} {}", print_term(&u, Notation::Paper));
        u
    };

    for c in ["ttt", "fff", "(nats {0})", "(nats {2})", "succ", "pred", "zero", "condN", "(bottom [Nat])"] {
        show(c);
    }
    println!();

    let nf = |u| normalize(&ulc, &u, 10_000, Strategy::LeftmostOutermost).term;
    for src in
        ["succ · Nats(2)", "pred · Nats(3)", "zero · (pred · Nats(1))", "condN · fff · Nats(7) · (succ · Nats(0))"]
    {
        let v = nf(show(src));
        let decoded = if v == ulc_terms::tru() {
            "true".to_string()
        } else if v == ulc_terms::fls() {
            // the same term encodes both
            "false or 0".to_string()
        } else {
            (0..10).find(|&n| nf(church(n)) == v).map_or("?".into(), |n| n.to_string())
        };
        println!("{:<40} = {decoded}: {}", "", print_term(&v, Notation::Paper));
    }
}

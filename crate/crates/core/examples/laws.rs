//! Runs the substitution and reduction law suites on every catalog
//! signature.
//!
//! cargo run --release --example laws [samples] [seed]

use twosig::lang_std;
use twosig::laws::{check_laws, LawConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0xC0FFEE);
    let cfg = LawConfig { samples, seed, ..LawConfig::default() };
    for name in lang_std::SIGNATURE_NAMES {
        let lang = lang_std::language(name).expect("catalog signature");
        let report = check_laws(&lang, &cfg);
        print!("{report}");
        println!("{}", if report.passed() { "ok" } else { "FAILED" });
    }
}

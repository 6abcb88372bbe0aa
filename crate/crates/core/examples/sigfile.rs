//! Parses a signature file, reports diagnostics with positions, and prints
//! the signature back in the same format.
//!
//! cargo run --example sigfile -- crates/core/examples/pcf.sig

use twosig::cli::sigfile::{parse_signature, print_signature};
use twosig::signature::Language;

fn main() {
    let path =
        std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pcf.sig").into());
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    match parse_signature(&text) {
        Ok(sig) => {
            let lang = Language::new(path.clone(), sig.clone()).expect("parsed signatures are validated");
            println!(
                "{path}: {} sorts, {} arities, {} rules",
                lang.sorts().constructors.len(),
                lang.arities().len(),
                lang.rules().len()
            );
            print!("{}", print_signature(&sig));
        }
        Err(e) => {
            eprintln!("{path}:\n{e}");
            std::process::exit(2);
        }
    }
}

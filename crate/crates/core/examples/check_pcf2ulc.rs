//! Samples every PCF rule through the PCF to ULC representation and checks
//! that translated reduction steps are matched by ULC reductions.
//!
//! cargo run --release --example check_pcf2ulc [samples]

use twosig::lang_std;
use twosig::representation::{check_faithfulness, check_satisfaction, CheckConfig};

fn main() {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let cfg = CheckConfig { samples, ..CheckConfig::default() };
    for rep in [lang_std::pcf_to_ulc_representation(), lang_std::pcf_to_ulc_y_representation()] {
        println!("== {} (seed {:#x})", rep.name(), cfg.seed);
        print!("{}", check_satisfaction(&rep, &cfg));
    }
    let rep = lang_std::pcf_to_ulc_representation();
    let faith = CheckConfig { bound: 32, ..cfg };
    print!("{}", check_faithfulness(&rep, &faith));
}

//! Turing's Θ unfolds by reduction alone, Curry's Y only up to conversion:
//! `Θ g` reaches `g (Θ g)` in two steps while `Y g` and `g (Y g)` merely
//! share a reduct.
//!
//! cargo run --release --example fixpoints

use twosig::lang_std::{self, ulc_terms};
use twosig::reduction::{reduces_to, step_all, Bounds};
use twosig::syntax::text::{print_term, Notation};
use twosig::{Context, Sort, Term};

fn main() {
    let ulc = lang_std::ulc();
    let ctx = Context::from_innermost(vec![Sort::constant("*")]);
    let g = Term::var(0);
    let ap = |f: Term, a: Term| ulc.node("app", vec![], vec![f, a]);

    for (name, fix, bounds) in
        [("Θ", ulc_terms::theta(), Bounds::new(4, 4096)), ("Y", ulc_terms::y(), Bounds::new(8, 4096))]
    {
        let s = ap(fix, g.clone());
        let t = ap(g.clone(), s.clone());
        let r = reduces_to(&ulc, &ctx, &s, &t, bounds).expect("well sorted");
        println!("{name} g => g ({name} g): {}", r.label());
        if let twosig::Reach::Yes(trace) = &r {
            print!("{}", trace.render(Notation::Paper));
        }
    }

    // two steps from Y g meet one step from g (Y g)
    let yg = ap(ulc_terms::y(), g.clone());
    let left: Vec<Term> =
        step_all(&ulc, &yg).iter().flat_map(|s| step_all(&ulc, &s.result)).map(|s| s.result).collect();
    let gyg = ap(g, yg);
    let common = step_all(&ulc, &gyg).into_iter().map(|s| s.result).find(|r| left.contains(r));
    println!("common reduct: {}", common.map(|t| print_term(&t, Notation::Paper)).unwrap_or_else(|| "none".into()));
}

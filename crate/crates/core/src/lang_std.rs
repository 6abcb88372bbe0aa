//! Built-in languages: PCF, the untyped lambda calculus, the simply-typed
//! lambda calculus, Church encodings, and the PCF to ULC representation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::representation::{Builder, BuilderArgs, Representation};
use crate::signature::{
    ArgSpec, Language, Name, NatPattern, RuleTemplate, SortExpr, SortSignature, TemplateTerm, TermAritySpec,
    TwoSignature,
};
use crate::syntax::Term;

fn v(i: usize) -> SortExpr {
    SortExpr::var(i)
}

fn arrow(a: SortExpr, b: SortExpr) -> SortExpr {
    SortExpr::con("~>", vec![a, b])
}

fn nat() -> SortExpr {
    SortExpr::constant("Nat")
}

fn boolean() -> SortExpr {
    SortExpr::constant("Bool")
}

fn con(name: &str, children: Vec<TemplateTerm>) -> TemplateTerm {
    TemplateTerm::con(name, children)
}

fn meta(name: &str) -> TemplateTerm {
    TemplateTerm::meta(name)
}

fn app(f: TemplateTerm, a: TemplateTerm) -> TemplateTerm {
    con("app", vec![f, a])
}

fn metas(decls: &[(&str, ArgSpec)]) -> BTreeMap<Name, ArgSpec> {
    decls.iter().map(|(n, s)| (Name::from(*n), s.clone())).collect()
}

fn natvars(names: &[&str]) -> BTreeSet<Name> {
    names.iter().map(|n| Name::from(*n)).collect()
}

fn rule(
    name: &str,
    degree: usize,
    metavars: BTreeMap<Name, ArgSpec>,
    natvars: BTreeSet<Name>,
    lhs: TemplateTerm,
    rhs: TemplateTerm,
) -> RuleTemplate {
    RuleTemplate { name: name.into(), degree, metavars, natvars, lhs, rhs }
}

fn beta(name: &str, degree: usize, binder: SortExpr, body: SortExpr) -> RuleTemplate {
    rule(
        name,
        degree,
        metas(&[("M", ArgSpec::binding(vec![binder.clone()], body)), ("N", ArgSpec::plain(binder))]),
        BTreeSet::new(),
        app(con("abs", vec![meta("M")]), meta("N")),
        TemplateTerm::subst1(meta("M"), meta("N")),
    )
}

fn cond_rule(name: &str, arity: &str, guard: &str, sort: SortExpr, a: &str, b: &str, pick: &str) -> RuleTemplate {
    rule(
        name,
        0,
        metas(&[(a, ArgSpec::plain(sort.clone())), (b, ArgSpec::plain(sort))]),
        BTreeSet::new(),
        app(app(app(con(arity, vec![]), con(guard, vec![])), meta(a)), meta(b)),
        meta(pick),
    )
}

pub fn pcf_signature() -> TwoSignature {
    let chain = |s: SortExpr| arrow(boolean(), arrow(s.clone(), arrow(s.clone(), s)));
    let arities = vec![
        TermAritySpec::new("abs", 2, vec![ArgSpec::binding(vec![v(1)], v(2))], arrow(v(1), v(2))),
        TermAritySpec::new("app", 2, vec![ArgSpec::plain(arrow(v(1), v(2))), ArgSpec::plain(v(1))], v(2)),
        TermAritySpec::new("rec", 1, vec![ArgSpec::plain(arrow(v(1), v(1)))], v(1)),
        TermAritySpec::new("bottom", 1, vec![], v(1)),
        TermAritySpec::new("ttt", 0, vec![], boolean()),
        TermAritySpec::new("fff", 0, vec![], boolean()),
        TermAritySpec::new("succ", 0, vec![], arrow(nat(), nat())),
        TermAritySpec::new("pred", 0, vec![], arrow(nat(), nat())),
        TermAritySpec::new("zero", 0, vec![], arrow(nat(), boolean())),
        TermAritySpec::new("condN", 0, vec![], chain(nat())),
        TermAritySpec::new("condB", 0, vec![], chain(boolean())),
        TermAritySpec::nat_indexed("nats", nat()),
    ];
    let nats = |p: NatPattern| TemplateTerm::nat("nats", p);
    let n = || Name::from("n");
    let rules = vec![
        beta("app_abs", 2, v(1), v(2)),
        cond_rule("condN_t", "condN", "ttt", nat(), "n", "m", "n"),
        cond_rule("condN_f", "condN", "fff", nat(), "n", "m", "m"),
        cond_rule("condB_t", "condB", "ttt", boolean(), "u", "v", "u"),
        cond_rule("condB_f", "condB", "fff", boolean(), "u", "v", "v"),
        rule(
            "succ_red",
            0,
            BTreeMap::new(),
            natvars(&["n"]),
            app(con("succ", vec![]), nats(NatPattern::Var(n()))),
            nats(NatPattern::Plus1(n())),
        ),
        rule(
            "zero_t",
            0,
            BTreeMap::new(),
            BTreeSet::new(),
            app(con("zero", vec![]), nats(NatPattern::Zero)),
            con("ttt", vec![]),
        ),
        rule(
            "zero_f",
            0,
            BTreeMap::new(),
            natvars(&["n"]),
            app(con("zero", vec![]), nats(NatPattern::Succ(n()))),
            con("fff", vec![]),
        ),
        rule(
            "pred_Succ",
            0,
            BTreeMap::new(),
            natvars(&["n"]),
            app(con("pred", vec![]), app(con("succ", vec![]), nats(NatPattern::Var(n())))),
            nats(NatPattern::Var(n())),
        ),
        rule(
            "pred_z",
            0,
            BTreeMap::new(),
            BTreeSet::new(),
            app(con("pred", vec![]), nats(NatPattern::Zero)),
            nats(NatPattern::Zero),
        ),
        rule(
            "rec_a",
            1,
            metas(&[("G", ArgSpec::plain(arrow(v(1), v(1))))]),
            BTreeSet::new(),
            con("rec", vec![meta("G")]),
            app(meta("G"), con("rec", vec![meta("G")])),
        ),
    ];
    TwoSignature { sorts: SortSignature::new([("Nat", 0), ("Bool", 0), ("~>", 2)]), arities, rules }
}

pub fn ulc_signature() -> TwoSignature {
    let star = || SortExpr::constant("*");
    TwoSignature {
        sorts: SortSignature::new([("*", 0)]),
        arities: vec![
            TermAritySpec::new("abs", 0, vec![ArgSpec::binding(vec![star()], star())], star()),
            TermAritySpec::new("app", 0, vec![ArgSpec::plain(star()), ArgSpec::plain(star())], star()),
        ],
        rules: vec![beta("beta", 0, star(), star())],
    }
}

pub fn stlc_signature() -> TwoSignature {
    TwoSignature {
        sorts: SortSignature::new([("*", 0), ("~>", 2)]),
        arities: vec![
            TermAritySpec::new("abs", 2, vec![ArgSpec::binding(vec![v(1)], v(2))], arrow(v(1), v(2))),
            TermAritySpec::new("app", 2, vec![ArgSpec::plain(arrow(v(1), v(2))), ArgSpec::plain(v(1))], v(2)),
        ],
        rules: vec![beta("beta", 2, v(1), v(2))],
    }
}

pub fn pcf() -> Language {
    Language::new("pcf", pcf_signature()).expect("pcf signature is valid")
}

pub fn ulc() -> Language {
    Language::new("ulc", ulc_signature()).expect("ulc signature is valid")
}

pub fn stlc() -> Language {
    Language::new("stlc", stlc_signature()).expect("stlc signature is valid")
}

/// Closed ULC terms used by the PCF representation.
pub mod ulc_terms {
    use super::*;
    use crate::syntax::{Node, Scope};

    fn lam(body: Term) -> Term {
        Term::Con(Node { arity: "abs".into(), sorts: vec![], nat: None, children: vec![Scope { binders: 1, body }] })
    }

    fn ap(f: Term, a: Term) -> Term {
        let plain = |body| Scope { binders: 0, body };
        Term::Con(Node { arity: "app".into(), sorts: vec![], nat: None, children: vec![plain(f), plain(a)] })
    }

    fn ap3(f: Term, a: Term, b: Term, c: Term) -> Term {
        ap(ap(ap(f, a), b), c)
    }

    fn x(i: usize) -> Term {
        Term::var(i)
    }

    /// λt f. t
    pub fn tru() -> Term {
        lam(lam(x(1)))
    }

    /// λt f. f
    pub fn fls() -> Term {
        lam(lam(x(0)))
    }

    /// Church numerals, each built from the previous one:
    /// `church(n + 1) = λf x. f (church(n) f x)`.
    pub fn church(n: u64) -> Term {
        let mut c = lam(lam(x(0)));
        for _ in 0..n {
            c = lam(lam(ap(x(1), ap(ap(c, x(1)), x(0)))));
        }
        c
    }

    /// λn f x. f (n f x)
    pub fn succ() -> Term {
        lam(lam(lam(ap(x(1), ap(ap(x(2), x(1)), x(0))))))
    }

    /// λn f x. n (λg h. h (g f)) (λu. x) (λu. u)
    pub fn pred() -> Term {
        lam(lam(lam(ap3(x(2), lam(lam(ap(x(0), ap(x(1), x(3))))), lam(x(1)), lam(x(0))))))
    }

    /// λn. n (λx. F) T
    pub fn zero() -> Term {
        lam(ap(ap(x(0), lam(fls())), tru()))
    }

    /// λp a b. p a b
    pub fn cond() -> Term {
        lam(lam(lam(ap(ap(x(2), x(1)), x(0)))))
    }

    pub fn omega() -> Term {
        let w = lam(ap(x(0), x(0)));
        ap(w.clone(), w)
    }

    /// Turing's fixed-point combinator.
    pub fn theta() -> Term {
        let a = lam(lam(ap(x(0), ap(ap(x(1), x(1)), x(0)))));
        ap(a.clone(), a)
    }

    /// Curry's fixed-point combinator.
    pub fn y() -> Term {
        let half = lam(ap(x(1), ap(x(0), x(0))));
        lam(ap(half.clone(), half))
    }
}

pub use ulc_terms::church;

fn constant(t: Term) -> Builder {
    Arc::new(move |_: &BuilderArgs| t.clone())
}

fn pcf_to_ulc_with_fix(name: &str, fix: Term) -> Representation {
    let star = SortExpr::constant("*");
    let sort_cases = [("Nat", star.clone()), ("Bool", star.clone()), ("~>", star)]
        .into_iter()
        .map(|(k, e)| (Name::from(k), e))
        .collect();
    let mut builders: BTreeMap<Name, Builder> = BTreeMap::new();
    let mut add = |k: &str, b: Builder| {
        builders.insert(Name::from(k), b);
    };
    add("app", Arc::new(|a: &BuilderArgs| a.target.node("app", vec![], a.children.to_vec())));
    add("abs", Arc::new(|a: &BuilderArgs| a.target.node("abs", vec![], a.children.to_vec())));
    add("rec", Arc::new(move |a: &BuilderArgs| a.target.node("app", vec![], vec![fix.clone(), a.children[0].clone()])));
    add("bottom", constant(ulc_terms::omega()));
    add("ttt", constant(ulc_terms::tru()));
    add("fff", constant(ulc_terms::fls()));
    add("succ", constant(ulc_terms::succ()));
    add("pred", constant(ulc_terms::pred()));
    add("zero", constant(ulc_terms::zero()));
    add("condN", constant(ulc_terms::cond()));
    add("condB", constant(ulc_terms::cond()));
    add("nats", Arc::new(|a: &BuilderArgs| church(a.nat.expect("nats carries a literal"))));
    Representation::new(name, pcf(), ulc(), sort_cases, builders).expect("pcf2ulc is complete")
}

/// PCF in the untyped lambda calculus: every sort goes to `*`, `rec` to
/// Turing's Θ applied to the translated argument, constants to their Church
/// encodings and `bottom` to Ω.
pub fn pcf_to_ulc_representation() -> Representation {
    pcf_to_ulc_with_fix("pcf2ulc", ulc_terms::theta())
}

/// Same as [`pcf_to_ulc_representation`] but with `rec` sent to Curry's Y,
/// which does not satisfy the unfolding rule by reduction alone.
pub fn pcf_to_ulc_y_representation() -> Representation {
    pcf_to_ulc_with_fix("pcf2ulc-y", ulc_terms::y())
}

pub const SIGNATURE_NAMES: [&str; 3] = ["pcf", "ulc", "stlc"];

/// Looks up a built-in language by name.
pub fn language(name: &str) -> Option<Language> {
    match name {
        "pcf" => Some(pcf()),
        "ulc" => Some(ulc()),
        "stlc" => Some(stlc()),
        _ => None,
    }
}

/// Looks up a built-in representation: `pcf2ulc`, `pcf2ulc-y` or
/// `identity:<language>`.
pub fn representation(name: &str) -> Option<Representation> {
    match name {
        "pcf2ulc" => Some(pcf_to_ulc_representation()),
        "pcf2ulc-y" => Some(pcf_to_ulc_y_representation()),
        _ => {
            let lang = language(name.strip_prefix("identity:")?)?;
            Some(Representation::identity(&lang))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{reachable, Bounds};
    use crate::signature::{infer_template_sort, validate_signature, Side};
    use crate::syntax::text::{print_term, Notation};

    fn paper(t: &Term) -> String {
        print_term(t, Notation::Paper)
    }

    #[test]
    fn catalog_signatures_validate() {
        for sig in [pcf_signature(), ulc_signature(), stlc_signature()] {
            let r = validate_signature(&sig);
            assert!(r.is_ok(), "{r}");
        }
        assert_eq!(pcf_signature().rules.len(), 11);
    }

    #[test]
    fn cond_n_result_sort() {
        let sig = pcf_signature();
        assert_eq!(sig.arity("condN").unwrap().result.to_string(), "~>(Bool, ~>(Nat, ~>(Nat, Nat)))");
    }

    #[test]
    fn rule_sorts() {
        let sig = pcf_signature();
        let rec = sig.rule("rec_a").unwrap();
        assert_eq!(infer_template_sort(&sig, rec, Side::Lhs), Ok(SortExpr::var(1)));
        let succ = sig.rule("succ_red").unwrap();
        assert_eq!(infer_template_sort(&sig, succ, Side::Lhs), Ok(nat()));
        assert_eq!(infer_template_sort(&sig, succ, Side::Rhs), Ok(nat()));
    }

    #[test]
    fn church_numerals_print_as_published() {
        assert_eq!(paper(&church(0)), "Abs (Abs 1)");
        assert_eq!(paper(&church(2)), "Abs (Abs (2 @ (Abs (Abs (2 @ (Abs (Abs 1) @ 2 @ 1))) @ 2 @ 1)))");
    }

    #[test]
    fn successor_of_zero_reaches_one() {
        let ulc = ulc();
        let t = ulc.node("app", vec![], vec![ulc_terms::succ(), church(0)]);
        assert!(reachable(&ulc, &t, &church(1), Bounds::steps(8)).is_yes());
    }

    #[test]
    fn catalog_lookup() {
        assert!(language("pcf").is_some());
        assert!(language("nope").is_none());
        assert_eq!(representation("identity:stlc").unwrap().name(), "identity:stlc");
        assert!(representation("identity:nope").is_none());
        assert_eq!(representation("pcf2ulc-y").unwrap().name(), "pcf2ulc-y");
    }
}

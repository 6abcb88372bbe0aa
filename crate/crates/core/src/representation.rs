//! Representations of a source language in a target language, the
//! translation they induce, and sampled checks of rule satisfaction,
//! faithfulness and substitution laws.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::reduction::{reachable, step_all, Bounds, Reach};
use crate::signature::{Language, Name, ResolvedTemplate, SortExpr};
use crate::syntax::text::{print_term, Notation};
use crate::syntax::{eval_sort_expr, rename, subst, subst_one, typecheck, Context, Sort, SubstMap, Term, TermGen};

/// What a builder receives for one source constructor node.
pub struct BuilderArgs<'a> {
    pub target: &'a Language,
    /// The node's sort arguments, already mapped into the target.
    pub sorts: &'a [Sort],
    pub nat: Option<u64>,
    /// Translated children, each in the retyped context extended by its
    /// retyped binders.
    pub children: &'a [Term],
}

pub type Builder = Arc<dyn Fn(&BuilderArgs) -> Term + Send + Sync>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("no sort case for source constructor `{0}`")]
    MissingSortCase(Name),
    #[error("sort case for `{con}`: {message}")]
    BadSortCase { con: Name, message: String },
    #[error("no builder for source arity `{0}`")]
    MissingBuilder(Name),
    #[error("builder for unknown arity `{0}`")]
    UnknownArity(Name),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("source term is ill-typed: {0}")]
    Source(String),
    #[error("builder for `{arity}` produced an ill-typed term: {message}")]
    Builder { arity: Name, message: String },
}

/// A sort map given by one case per source sort constructor, plus one
/// builder per source arity.
#[derive(Clone)]
pub struct Representation {
    name: String,
    source: Language,
    target: Language,
    sort_cases: BTreeMap<Name, SortExpr>,
    builders: BTreeMap<Name, Builder>,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representation")
            .field("name", &self.name)
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("sort_cases", &self.sort_cases)
            .field("builders", &self.builders.keys().collect::<Vec<_>>())
            .finish()
    }
}

fn check_case(target: &Language, arity: usize, e: &SortExpr) -> Result<(), String> {
    match e {
        SortExpr::Var(i) if *i == 0 || *i > arity => Err(format!("argument {i} out of range 1..={arity}")),
        SortExpr::Var(_) => Ok(()),
        SortExpr::Con(c, args) => match target.sorts().arity(c) {
            None => Err(format!("unknown target sort constructor `{c}`")),
            Some(n) if n != args.len() => Err(format!("`{c}` expects {n} arguments")),
            Some(_) => args.iter().try_for_each(|a| check_case(target, arity, a)),
        },
    }
}

impl Representation {
    /// `sort_cases[c]` is a target sort expression whose variable `i` stands
    /// for the image of the `i`-th argument of `c`.
    pub fn new(
        name: impl Into<String>,
        source: Language,
        target: Language,
        sort_cases: BTreeMap<Name, SortExpr>,
        builders: BTreeMap<Name, Builder>,
    ) -> Result<Self, RepError> {
        for (con, &arity) in &source.sorts().constructors {
            let case = sort_cases.get(con).ok_or_else(|| RepError::MissingSortCase(con.clone()))?;
            check_case(&target, arity, case).map_err(|message| RepError::BadSortCase { con: con.clone(), message })?;
        }
        for a in source.arities() {
            if !builders.contains_key(&a.name) {
                return Err(RepError::MissingBuilder(a.name.clone()));
            }
        }
        if let Some(extra) = builders.keys().find(|k| source.arity(k).is_none()) {
            return Err(RepError::UnknownArity(extra.clone()));
        }
        Ok(Representation { name: name.into(), source, target, sort_cases, builders })
    }

    /// Every sort maps to itself and every constructor to itself.
    pub fn identity(lang: &Language) -> Self {
        let sort_cases = lang
            .sorts()
            .constructors
            .iter()
            .map(|(c, &n)| (c.clone(), SortExpr::con(c.clone(), (1..=n).map(SortExpr::var).collect())))
            .collect();
        let builders = lang
            .arities()
            .iter()
            .map(|a| {
                let name = a.name.clone();
                let b: Builder = Arc::new(move |args: &BuilderArgs| {
                    args.target.build(&name, args.sorts.to_vec(), args.nat, args.children.to_vec())
                });
                (a.name.clone(), b)
            })
            .collect();
        Representation::new(format!("identity:{}", lang.name()), lang.clone(), lang.clone(), sort_cases, builders)
            .expect("identity representation is complete")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Language {
        &self.source
    }

    pub fn target(&self) -> &Language {
        &self.target
    }

    pub fn sort_cases(&self) -> &BTreeMap<Name, SortExpr> {
        &self.sort_cases
    }

    /// Replaces one builder, keeping everything else.
    pub fn with_builder(mut self, name: impl Into<String>, arity: &str, builder: Builder) -> Self {
        assert!(self.source.arity(arity).is_some(), "unknown arity `{arity}`");
        self.name = name.into();
        self.builders.insert(arity.into(), builder);
        self
    }

    pub fn map_sort(&self, sort: &Sort) -> Sort {
        let args: Vec<Sort> = sort.args.iter().map(|a| self.map_sort(a)).collect();
        let case = &self.sort_cases[&sort.con];
        eval_sort_expr(case, &args).expect("sort case checked at construction")
    }

    /// Pointwise image of a context; indices are unchanged.
    pub fn retype_context(&self, ctx: &Context) -> Context {
        ctx.map(|s| self.map_sort(s))
    }

    /// Runs the builder of `arity` and checks its output in `target_ctx`.
    pub fn build(
        &self,
        target_ctx: &Context,
        arity: &str,
        source_sorts: &[Sort],
        nat: Option<u64>,
        children: &[Term],
    ) -> Result<Term, TranslateError> {
        let spec =
            self.source.arity(arity).ok_or_else(|| TranslateError::Source(format!("unknown arity `{arity}`")))?;
        let sorts: Vec<Sort> = source_sorts.iter().map(|s| self.map_sort(s)).collect();
        let out = (self.builders[&spec.name])(&BuilderArgs { target: &self.target, sorts: &sorts, nat, children });
        let want = eval_sort_expr(&spec.result, source_sorts)
            .map(|s| self.map_sort(&s))
            .map_err(|e| TranslateError::Source(e.to_string()))?;
        match typecheck(&self.target, target_ctx, &out) {
            Ok(got) if got == want => Ok(out),
            Ok(got) => Err(TranslateError::Builder {
                arity: spec.name.clone(),
                message: format!("expected sort {want}, found {got}"),
            }),
            Err(e) => Err(TranslateError::Builder { arity: spec.name.clone(), message: e.to_string() }),
        }
    }

    /// The translation induced by the representation, by structural
    /// recursion; variables map to themselves.
    pub fn translate(&self, ctx: &Context, term: &Term) -> Result<Term, TranslateError> {
        let target_ctx = self.retype_context(ctx);
        self.translate_in(ctx, &target_ctx, term)
    }

    fn translate_in(&self, ctx: &Context, target_ctx: &Context, term: &Term) -> Result<Term, TranslateError> {
        match term {
            Term::Var(i) => {
                if *i >= ctx.len() {
                    return Err(TranslateError::Source(format!("unbound index #{i}")));
                }
                Ok(Term::Var(*i))
            }
            Term::Con(node) => {
                let spec = self
                    .source
                    .arity(&node.arity)
                    .ok_or_else(|| TranslateError::Source(format!("unknown arity `{}`", node.arity)))?;
                if node.sorts.len() != spec.degree || node.children.len() != spec.args.len() {
                    return Err(TranslateError::Source(format!("malformed `{}` node", node.arity)));
                }
                let mut children = Vec::with_capacity(node.children.len());
                for (arg, child) in spec.args.iter().zip(&node.children) {
                    let binders: Vec<Sort> = arg
                        .binders
                        .iter()
                        .map(|b| eval_sort_expr(b, &node.sorts))
                        .collect::<Result<_, _>>()
                        .map_err(|e| TranslateError::Source(e.to_string()))?;
                    let mapped: Vec<Sort> = binders.iter().map(|s| self.map_sort(s)).collect();
                    children.push(self.translate_in(
                        &ctx.extend(&binders),
                        &target_ctx.extend(&mapped),
                        &child.body,
                    )?);
                }
                self.build(target_ctx, &node.arity, &node.sorts, node.nat, &children)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub samples: usize,
    pub depth: usize,
    pub bound: usize,
    pub max_frontier: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { samples: 200, depth: 4, bound: 16, max_frontier: 512, seed: 0xC0FFEE }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub verdict: &'static str,
    pub context: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleReport {
    pub rule: Name,
    pub attempted: usize,
    pub yes: usize,
    pub unknown: usize,
    pub no: usize,
    /// Samples where some metavariable's target sort had no term.
    pub skipped: usize,
    /// Longest witness among the Yes answers.
    pub max_yes_steps: usize,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub rules: Vec<RuleReport>,
}

impl SatisfactionReport {
    pub fn rule(&self, name: &str) -> Option<&RuleReport> {
        self.rules.iter().find(|r| &*r.rule == name)
    }

    pub fn total_no(&self) -> usize {
        self.rules.iter().map(|r| r.no).sum()
    }

    pub fn total_unknown(&self) -> usize {
        self.rules.iter().map(|r| r.unknown).sum()
    }

    pub fn all_yes(&self) -> bool {
        self.total_no() == 0 && self.total_unknown() == 0
    }
}

impl fmt::Display for SatisfactionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(
                f,
                "rule {}: attempted {} yes {} unknown {} no {} skipped {} max-steps {}",
                r.rule, r.attempted, r.yes, r.unknown, r.no, r.skipped, r.max_yes_steps
            )?;
            for c in &r.counterexamples {
                writeln!(f, "  {} in {}: {}  vs  {}", c.verdict, c.context, c.lhs, c.rhs)?;
            }
        }
        Ok(())
    }
}

const MAX_COUNTEREXAMPLES: usize = 3;

/// Evaluates a resolved template through the builders.
fn eval_template(
    rep: &Representation,
    tpl: &ResolvedTemplate,
    source_assignment: &[Sort],
    target_ctx: &Context,
    metas: &BTreeMap<Name, Term>,
    nats: &BTreeMap<Name, u64>,
) -> Result<Term, TranslateError> {
    match tpl {
        ResolvedTemplate::Meta(x) => Ok(metas[x].clone()),
        ResolvedTemplate::Con { arity, sorts, nat, children, .. } => {
            let spec = rep.source.arity(arity).expect("validated rule");
            let node_sorts: Vec<Sort> =
                sorts.iter().map(|e| eval_sort_expr(e, source_assignment).expect("degree in range")).collect();
            let nat = nat.as_ref().map(|p| {
                use crate::signature::NatPattern::*;
                match p {
                    Zero => 0,
                    Const(k) => *k,
                    Var(v) => nats[v],
                    Succ(v) | Plus1(v) => nats[v] + 1,
                }
            });
            let mut out = Vec::new();
            for (arg, child) in spec.args.iter().zip(children) {
                let binders: Vec<Sort> = arg
                    .binders
                    .iter()
                    .map(|b| rep.map_sort(&eval_sort_expr(b, &node_sorts).expect("degree in range")))
                    .collect();
                out.push(eval_template(rep, child, source_assignment, &target_ctx.extend(&binders), metas, nats)?);
            }
            rep.build(target_ctx, arity, &node_sorts, nat, &out)
        }
        ResolvedTemplate::Subst1 { body, arg } => {
            let a = eval_template(rep, arg, source_assignment, target_ctx, metas, nats)?;
            let a_sort = typecheck(&rep.target, target_ctx, &a).map_err(|e| TranslateError::Source(e.to_string()))?;
            let b = eval_template(rep, body, source_assignment, &target_ctx.extend(&[a_sort]), metas, nats)?;
            Ok(subst_one(&b, &a))
        }
    }
}

/// Samples instances of every source rule in the target and asks whether
/// the translated lhs reaches the translated rhs.
pub fn check_satisfaction(rep: &Representation, cfg: &CheckConfig) -> SatisfactionReport {
    check_satisfaction_of(rep, cfg, |_| true)
}

/// [`check_satisfaction`] restricted to the rules whose name passes
/// `select`. Each rule draws from the same seeded stream either way.
pub fn check_satisfaction_of(
    rep: &Representation,
    cfg: &CheckConfig,
    select: impl Fn(&str) -> bool,
) -> SatisfactionReport {
    let mut report = SatisfactionReport::default();
    // searches are pure, and rules without metavariables repeat instances
    let mut memo: HashMap<(Term, Term), Reach> = HashMap::new();
    for (k, rule) in rep.source.rules().iter().enumerate() {
        if !select(&rule.name) {
            continue;
        }
        let mut rr = RuleReport { rule: rule.name.clone(), ..RuleReport::default() };
        let mut src_gen = TermGen::new(&rep.source, cfg.seed.wrapping_add(k as u64));
        let mut tgt_gen = TermGen::new(&rep.target, cfg.seed.wrapping_add(k as u64).wrapping_mul(0x9E37_79B9));
        for _ in 0..cfg.samples {
            rr.attempted += 1;
            let assignment: Vec<Sort> = (0..rule.degree).filter_map(|_| src_gen.random_sort()).collect();
            if assignment.len() != rule.degree {
                rr.skipped += 1;
                continue;
            }
            let ctx = src_gen.random_context(2);
            let target_ctx = rep.retype_context(&ctx);
            let mut metas = BTreeMap::new();
            let mut ok = true;
            for (x, spec) in &rule.metavars {
                let binders: Vec<Sort> = spec
                    .binders
                    .iter()
                    .map(|b| rep.map_sort(&eval_sort_expr(b, &assignment).expect("degree in range")))
                    .collect();
                let body = rep.map_sort(&eval_sort_expr(&spec.body, &assignment).expect("degree in range"));
                match tgt_gen.term(&target_ctx.extend(&binders), &body, cfg.depth) {
                    Some(t) => {
                        metas.insert(x.clone(), t);
                    }
                    None => ok = false,
                }
            }
            if !ok {
                rr.skipped += 1;
                continue;
            }
            let nats: BTreeMap<Name, u64> = rule.natvars.iter().map(|v| (v.clone(), src_gen.random_nat())).collect();
            let sides = eval_template(rep, &rule.lhs, &assignment, &target_ctx, &metas, &nats)
                .and_then(|l| Ok((l, eval_template(rep, &rule.rhs, &assignment, &target_ctx, &metas, &nats)?)));
            let (lhs, rhs) = match sides {
                Ok(p) => p,
                Err(e) => {
                    rr.no += 1;
                    if rr.counterexamples.len() < MAX_COUNTEREXAMPLES {
                        rr.counterexamples.push(Counterexample {
                            verdict: "error",
                            context: target_ctx.to_string(),
                            lhs: e.to_string(),
                            rhs: String::new(),
                        });
                    }
                    continue;
                }
            };
            let verdict = memo
                .entry((lhs.clone(), rhs.clone()))
                .or_insert_with(|| reachable(&rep.target, &lhs, &rhs, Bounds::new(cfg.bound, cfg.max_frontier)))
                .clone();
            match &verdict {
                Reach::Yes(trace) => {
                    rr.yes += 1;
                    rr.max_yes_steps = rr.max_yes_steps.max(trace.len());
                }
                Reach::No => rr.no += 1,
                Reach::Unknown => rr.unknown += 1,
            }
            if !verdict.is_yes() && rr.counterexamples.len() < MAX_COUNTEREXAMPLES {
                rr.counterexamples.push(Counterexample {
                    verdict: verdict.label(),
                    context: target_ctx.to_string(),
                    lhs: print_term(&lhs, Notation::Plain),
                    rhs: print_term(&rhs, Notation::Plain),
                });
            }
        }
        report.rules.push(rr);
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaithfulnessViolation {
    pub verdict: &'static str,
    pub rule: Name,
    pub context: String,
    pub source: String,
    pub reduct: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaithfulnessReport {
    /// Source terms drawn.
    pub terms: usize,
    /// One-step reducts checked.
    pub steps_checked: usize,
    pub yes: usize,
    pub unknown: usize,
    pub no: usize,
    pub max_yes_steps: usize,
    pub violations: Vec<FaithfulnessViolation>,
}

impl FaithfulnessReport {
    pub fn failures(&self) -> usize {
        self.no + self.unknown
    }
}

impl fmt::Display for FaithfulnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "faithfulness: terms {} steps {} yes {} unknown {} no {} max-steps {}",
            self.terms, self.steps_checked, self.yes, self.unknown, self.no, self.max_yes_steps
        )?;
        for v in &self.violations {
            writeln!(f, "  {} after {} in {}: {}  ->  {}", v.verdict, v.rule, v.context, v.source, v.reduct)?;
        }
        Ok(())
    }
}

/// For random source terms and each of their one-step reducts, asks whether
/// the translation of the term reaches the translation of the reduct.
pub fn check_faithfulness(rep: &Representation, cfg: &CheckConfig) -> FaithfulnessReport {
    let mut report = FaithfulnessReport::default();
    let mut memo: HashMap<(Term, Term), Reach> = HashMap::new();
    let mut gen = TermGen::new(&rep.source, cfg.seed);
    for _ in 0..cfg.samples {
        let ctx = gen.random_context(2);
        let Some((_, t)) = gen.any_term(&ctx, cfg.depth) else { continue };
        report.terms += 1;
        let Ok(tt) = rep.translate(&ctx, &t) else { continue };
        for step in step_all(&rep.source, &t) {
            report.steps_checked += 1;
            let verdict = match rep.translate(&ctx, &step.result) {
                Ok(tr) => memo
                    .entry((tt.clone(), tr.clone()))
                    .or_insert_with(|| reachable(&rep.target, &tt, &tr, Bounds::new(cfg.bound, cfg.max_frontier)))
                    .clone(),
                Err(_) => Reach::No,
            };
            match &verdict {
                Reach::Yes(trace) => {
                    report.yes += 1;
                    report.max_yes_steps = report.max_yes_steps.max(trace.len());
                }
                Reach::No => report.no += 1,
                Reach::Unknown => report.unknown += 1,
            }
            if !verdict.is_yes() && report.violations.len() < MAX_COUNTEREXAMPLES * 3 {
                report.violations.push(FaithfulnessViolation {
                    verdict: verdict.label(),
                    rule: step.rule.clone(),
                    context: ctx.to_string(),
                    source: print_term(&t, Notation::Plain),
                    reduct: print_term(&step.result, Notation::Plain),
                });
            }
        }
    }
    report
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub rename_checked: usize,
    pub subst_checked: usize,
    pub subst_one_checked: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn checked(&self) -> usize {
        self.rename_checked + self.subst_checked + self.subst_one_checked
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "translation laws: rename {} subst {} subst_one {} failures {}",
            self.rename_checked,
            self.subst_checked,
            self.subst_one_checked,
            self.failures.len()
        )?;
        for x in &self.failures {
            writeln!(f, "  {x}")?;
        }
        Ok(())
    }
}

/// A random injective renaming of `ctx` into a larger context.
pub(crate) fn random_renaming(gen: &mut TermGen<'_>, ctx: &Context) -> (Context, Vec<usize>) {
    let extra = gen.random_context(2);
    let mut entries: Vec<(Sort, Option<usize>)> = ctx.iter().cloned().enumerate().map(|(i, s)| (s, Some(i))).collect();
    entries.extend(extra.iter().cloned().map(|s| (s, None)));
    entries.shuffle(gen.rng());
    let mut f = vec![0; ctx.len()];
    for (pos, (_, src)) in entries.iter().enumerate() {
        if let Some(i) = src {
            f[*i] = pos;
        }
    }
    (Context::from_innermost(entries.into_iter().map(|(s, _)| s).collect()), f)
}

/// A random well-typed substitution out of `ctx`. The target context holds
/// every sort of `ctx`, so entries always exist; `None` only if generation
/// fails anyway.
pub(crate) fn random_subst_map(gen: &mut TermGen<'_>, ctx: &Context, depth: usize) -> Option<SubstMap> {
    let lang = gen.language();
    let (target, _) = random_renaming(gen, ctx);
    let mut terms = Vec::new();
    for s in ctx.iter() {
        terms.push(gen.term(&target, s, depth)?);
    }
    Some(SubstMap::new(lang, ctx.clone(), target, terms).expect("generated entries are well-typed"))
}

/// Checks that translation commutes with renaming, simultaneous
/// substitution and single-variable substitution, structurally.
pub fn check_translation_laws(rep: &Representation, samples: usize, depth: usize, seed: u64) -> LawReport {
    let mut report = LawReport::default();
    let mut gen = TermGen::new(&rep.source, seed);
    let show = |t: &Term| print_term(t, Notation::Plain);
    for _ in 0..samples {
        let ctx = gen.random_context(3);
        let Some((_, t)) = gen.any_term(&ctx, depth) else { continue };
        let Ok(tt) = rep.translate(&ctx, &t) else {
            report.failures.push(format!("translate failed on {}", show(&t)));
            continue;
        };

        let (delta, f) = random_renaming(&mut gen, &ctx);
        let lhs = rep.translate(&delta, &rename(&t, |i| f[i]));
        let rhs = rename(&tt, |i| f[i]);
        report.rename_checked += 1;
        if lhs.as_ref() != Ok(&rhs) {
            report.failures.push(format!("rename law fails on {}", show(&t)));
        }

        if let Some(m) = random_subst_map(&mut gen, &ctx, depth.min(3)) {
            let translated: Result<Vec<Term>, _> = m.terms().iter().map(|u| rep.translate(m.target(), u)).collect();
            if let Ok(translated) = translated {
                let lhs = rep.translate(m.target(), &subst(&t, &m));
                let rhs = crate::syntax::subst_with(&tt, |i| translated[i].clone());
                report.subst_checked += 1;
                if lhs.as_ref() != Ok(&rhs) {
                    report.failures.push(format!("subst law fails on {}", show(&t)));
                }
            }
        }

        if let Some(s) = gen.random_sort() {
            let ext = ctx.extend(std::slice::from_ref(&s));
            if let (Some((_, body)), Some(arg)) = (gen.any_term(&ext, depth), gen.term(&ctx, &s, depth.min(3))) {
                let lhs = rep.translate(&ctx, &subst_one(&body, &arg));
                let rhs = match (rep.translate(&ext, &body), rep.translate(&ctx, &arg)) {
                    (Ok(b), Ok(a)) => Ok(subst_one(&b, &a)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
                report.subst_one_checked += 1;
                if lhs.is_err() || lhs != rhs {
                    report.failures.push(format!("subst_one law fails on {} [{}]", show(&body), show(&arg)));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang_std;
    use crate::syntax::text::parse_term;

    #[test]
    fn retyping_is_pointwise() {
        let rep = lang_std::pcf_to_ulc_representation();
        let pcf = rep.source().clone();
        let ctx = crate::syntax::text::parse_context(pcf.sorts(), "Nat, (~> Bool Nat)").unwrap();
        assert_eq!(rep.retype_context(&ctx).to_string(), "[*, *]");
        assert_eq!(rep.retype_context(&Context::empty()), Context::empty());
        let id = Representation::identity(&pcf);
        assert_eq!(id.retype_context(&ctx), ctx);
    }

    #[test]
    fn identity_translation_is_the_identity() {
        let pcf = lang_std::pcf();
        let id = Representation::identity(&pcf);
        let t =
            parse_term(&pcf, &Context::empty(), "(abs [Bool Bool] (condB · #0 · fff · ttt))", Notation::Plain).unwrap();
        assert_eq!(id.translate(&Context::empty(), &t), Ok(t));
    }

    #[test]
    fn ill_typed_builder_output_is_caught() {
        let pcf = lang_std::pcf();
        let bad: Builder = Arc::new(|a: &BuilderArgs| a.target.node("fff", vec![], vec![]));
        let rep = Representation::identity(&pcf).with_builder("broken", "succ", bad);
        let t = parse_term(&pcf, &Context::empty(), "succ", Notation::Plain).unwrap();
        assert!(matches!(rep.translate(&Context::empty(), &t), Err(TranslateError::Builder { .. })));
    }

    #[test]
    fn incomplete_representation_is_rejected() {
        let pcf = lang_std::pcf();
        let err = Representation::new("empty", pcf.clone(), pcf, BTreeMap::new(), BTreeMap::new()).unwrap_err();
        assert!(matches!(err, RepError::MissingSortCase(_)));
    }

    #[test]
    fn zero_samples_give_an_empty_report() {
        let rep = lang_std::pcf_to_ulc_representation();
        let cfg = CheckConfig { samples: 0, ..CheckConfig::default() };
        let r = check_satisfaction(&rep, &cfg);
        assert!(r.rules.iter().all(|x| x.attempted == 0));
        assert_eq!(check_faithfulness(&rep, &cfg).steps_checked, 0);
    }
}

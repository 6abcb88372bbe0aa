//! Executable laws of the generated syntax: the relative-monad laws of
//! substitution, rename/subst coherence, and the monotonicity properties of
//! the reduction preorder. Every check runs on seeded random terms.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::reduction::{reachable, step_all, Bounds, Reach};
use crate::representation::{random_renaming, random_subst_map};
use crate::signature::Language;
use crate::syntax::text::{print_term, Notation};
use crate::syntax::{
    rename, subst, subst_with, typecheck, weaken, Context, Node, Scope, Sort, SubstMap, Term, TermGen,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LawConfig {
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    /// Longest random reduction walk used by the monotonicity checks.
    pub walk: usize,
    pub max_frontier: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig { samples: 500, depth: 5, seed: 0xC0FFEE, walk: 2, max_frontier: 4096 }
    }
}

/// Outcome of one law over all samples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub checked: usize,
    /// Samples where the premise could not be set up (no redex, say).
    pub vacuous: usize,
    /// Searches that hit their bound without an answer.
    pub unknown: usize,
    pub failures: Vec<String>,
}

impl LawCheck {
    fn new(law: &'static str) -> Self {
        LawCheck { law, ..LawCheck::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record_reach(&mut self, r: Reach, what: impl FnOnce() -> String) {
        self.checked += 1;
        match r {
            Reach::Yes(_) => {}
            Reach::Unknown => self.unknown += 1,
            Reach::No => self.failures.push(what()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.unknown == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawsReport {
    pub language: String,
    pub config: LawConfig,
    pub checks: Vec<LawCheck>,
}

impl LawsReport {
    pub fn check(&self, law: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == law)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(LawCheck::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures.len()).sum()
    }

    pub fn unknown(&self) -> usize {
        self.checks.iter().map(|c| c.unknown).sum()
    }

    fn merge(mut self, other: LawsReport) -> LawsReport {
        self.checks.extend(other.checks);
        self
    }
}

impl fmt::Display for LawsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "laws {} (seed {:#x}, samples {}, depth {})",
            self.language, self.config.seed, self.config.samples, self.config.depth
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{}: checked {} vacuous {} unknown {} failures {}",
                c.law,
                c.checked,
                c.vacuous,
                c.unknown,
                c.failures.len()
            )?;
            for x in c.failures.iter().take(3) {
                writeln!(f, "  {x}")?;
            }
        }
        Ok(())
    }
}

fn show(t: &Term) -> String {
    print_term(t, Notation::Plain)
}

/// Substitution laws: the three monad laws, functoriality of renaming,
/// renaming as substitution by variables, sort preservation, and
/// constructors commuting with substitution through shifted maps.
pub fn check_monad_laws(lang: &Language, cfg: &LawConfig) -> LawsReport {
    let mut unit_left = LawCheck::new("monad-unit-left");
    let mut unit_right = LawCheck::new("monad-unit-right");
    let mut assoc = LawCheck::new("monad-assoc");
    let mut rename_id = LawCheck::new("rename-identity");
    let mut rename_comp = LawCheck::new("rename-composition");
    let mut coherence = LawCheck::new("rename-subst-coherence");
    let mut preserve = LawCheck::new("subst-preserves-sort");
    let mut module = LawCheck::new("constructor-module-morphism");

    let mut gen = TermGen::new(lang, cfg.seed);
    for _ in 0..cfg.samples {
        let ctx = gen.random_context(3);
        let Some((sort, t)) = gen.any_term(&ctx, cfg.depth) else {
            unit_right.vacuous += 1;
            continue;
        };

        unit_right.record(subst(&t, &SubstMap::identity(&ctx)) == t, || show(&t));
        rename_id.record(rename(&t, |i| i) == t, || show(&t));

        let (delta, f) = random_renaming(&mut gen, &ctx);
        let (_, g) = random_renaming(&mut gen, &delta);
        rename_comp.record(rename(&rename(&t, |i| f[i]), |i| g[i]) == rename(&t, |i| g[f[i]]), || show(&t));
        coherence.record(rename(&t, |i| f[i]) == subst_with(&t, |i| Term::Var(f[i])), || show(&t));

        let Some(m) = random_subst_map(&mut gen, &ctx, cfg.depth.min(3)) else {
            assoc.vacuous += 1;
            continue;
        };
        for i in 0..ctx.len() {
            unit_left.record(subst(&Term::Var(i), &m) == *m.get(i), || format!("index {i}"));
        }
        let st = subst(&t, &m);
        preserve.record(typecheck(lang, m.target(), &st).as_ref() == Ok(&sort), || show(&t));
        if let Term::Con(node) = &t {
            module.record(subst_node(node, &m) == st, || show(&t));
        }

        let Some(n) = random_subst_map(&mut gen, m.target(), cfg.depth.min(3)) else {
            assoc.vacuous += 1;
            continue;
        };
        let composed: Vec<Term> = m.terms().iter().map(|u| subst(u, &n)).collect();
        assoc.record(subst(&st, &n) == subst_with(&t, |i| composed[i].clone()), || show(&t));
    }

    LawsReport {
        language: lang.name().to_string(),
        config: *cfg,
        checks: vec![unit_left, unit_right, assoc, rename_id, rename_comp, coherence, preserve, module],
    }
}

/// Applies `m` to each child of `node` through the map shifted by the
/// child's binders, without going through `subst` on the node itself.
fn subst_node(node: &Node, m: &SubstMap) -> Term {
    Term::Con(Node {
        arity: node.arity.clone(),
        sorts: node.sorts.clone(),
        nat: node.nat,
        children: node
            .children
            .iter()
            .map(|c| {
                let b = c.binders;
                let shifted = |i: usize| if i < b { Term::Var(i) } else { weaken(m.get(i - b), b) };
                Scope { binders: b, body: subst_with(&c.body, shifted) }
            })
            .collect(),
    })
}

/// A random reduction walk of at most `max` steps; returns the end and the
/// number of steps taken.
fn walk(lang: &Language, rng: &mut impl Rng, term: &Term, max: usize) -> (Term, usize) {
    let len = rng.gen_range(1..=max.max(1));
    let mut cur = term.clone();
    for k in 0..len {
        let steps = step_all(lang, &cur);
        let Some(s) = steps.choose(rng) else { return (cur, k) };
        cur = s.result.clone();
    }
    (cur, len)
}

/// Paths to every child slot of `term`, outermost first.
fn slots(term: &Term, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if let Term::Con(node) = term {
        for (i, c) in node.children.iter().enumerate() {
            prefix.push(i);
            out.push(prefix.clone());
            slots(&c.body, prefix, out);
            prefix.pop();
        }
    }
}

/// A random term in `ctx` satisfying `want`, from a bounded number of draws.
fn draw(gen: &mut TermGen<'_>, ctx: &Context, depth: usize, want: impl Fn(&Term) -> bool) -> Option<(Sort, Term)> {
    (0..DRAWS).find_map(|_| gen.any_term(ctx, depth).filter(|(_, t)| want(t)))
}

/// A random term of `sort` in `ctx` that has a redex, if a few draws find one.
fn draw_reducible(gen: &mut TermGen<'_>, ctx: &Context, sort: &Sort, depth: usize) -> Option<Term> {
    let lang = gen.language();
    (0..DRAWS).find_map(|_| gen.term(ctx, sort, depth).filter(|t| !step_all(lang, t).is_empty()))
}

const DRAWS: usize = 32;

/// Subject reduction, constructor monotonicity and both forms of
/// substitution monotonicity. Each law draws terms that meet its premise.
pub fn check_reduction_laws(lang: &Language, cfg: &LawConfig) -> LawsReport {
    let mut subject = LawCheck::new("subject-reduction");
    let mut congruence = LawCheck::new("constructor-monotonicity");
    let mut subst_left = LawCheck::new("subst-monotone-term");
    let mut subst_right = LawCheck::new("subst-monotone-map");
    let has_step = |t: &Term| !step_all(lang, t).is_empty();

    let mut gen = TermGen::new(lang, cfg.seed ^ 0x5EED);
    for _ in 0..cfg.samples {
        let ctx = gen.random_context(3);

        match draw(&mut gen, &ctx, cfg.depth, has_step) {
            None => subject.vacuous += 1,
            Some((sort, t)) => {
                let steps = step_all(lang, &t);
                let bad: Vec<String> = steps
                    .iter()
                    .filter(|s| typecheck(lang, &ctx, &s.result).as_ref() != Ok(&sort))
                    .map(|s| format!("{} --{}--> {}", show(&t), s.rule, show(&s.result)))
                    .collect();
                subject.record(bad.is_empty(), || bad.join("; "));
            }
        }

        // a reduction inside one slot lifts to the whole term
        let slot_with_step = |t: &Term| {
            let mut paths = Vec::new();
            slots(t, &mut Vec::new(), &mut paths);
            paths.into_iter().any(|p| has_step(t.at(&p).expect("slot")))
        };
        match draw(&mut gen, &ctx, cfg.depth, slot_with_step) {
            None => congruence.vacuous += 1,
            Some((_, t)) => {
                let mut paths = Vec::new();
                slots(&t, &mut Vec::new(), &mut paths);
                paths.retain(|p| has_step(t.at(p).expect("slot")));
                let p = paths.choose(gen.rng()).expect("drawn with a reducible slot").clone();
                let c = t.at(&p).expect("slot").clone();
                let (c2, k) = walk(lang, gen.rng(), &c, cfg.walk);
                let whole = t.replace_at(&p, c2);
                let r = reachable(lang, &t, &whole, Bounds::new(k, cfg.max_frontier));
                congruence.record_reach(r, || format!("{} at {:?}", show(&t), p));
            }
        }

        // s <= s' implies s[m] <= s'[m]
        match draw(&mut gen, &ctx, cfg.depth, has_step).zip(random_subst_map(&mut gen, &ctx, 2)) {
            None => subst_left.vacuous += 1,
            Some(((_, t), m)) => {
                let (t2, k) = walk(lang, gen.rng(), &t, cfg.walk);
                let r = reachable(lang, &subst(&t, &m), &subst(&t2, &m), Bounds::new(k, cfg.max_frontier));
                subst_left.record_reach(r, || format!("{} ~> {}", show(&t), show(&t2)));
            }
        }

        // m <= m' pointwise (one step each) implies t[m] <= t[m'] within
        // one step per free occurrence
        let ctx = if ctx.is_empty() { Context::from_innermost(gen.random_sort().into_iter().collect()) } else { ctx };
        let Some((_, t)) = draw(&mut gen, &ctx, cfg.depth.min(4), |t| t.free_occurrences() > 0) else {
            subst_right.vacuous += 1;
            continue;
        };
        let (target, _) = random_renaming(&mut gen, &ctx);
        let mut before = Vec::new();
        let mut after = Vec::new();
        for s in ctx.iter() {
            let u = match draw_reducible(&mut gen, &target, s, 3) {
                Some(u) => u,
                None => gen.term(&target, s, 3).expect("target holds every source sort"),
            };
            let (u2, _) = walk(lang, gen.rng(), &u, 1);
            before.push(u);
            after.push(u2);
        }
        if before == after {
            subst_right.vacuous += 1;
            continue;
        }
        let lhs = subst_with(&t, |i| before[i].clone());
        let rhs = subst_with(&t, |i| after[i].clone());
        let r = reachable(lang, &lhs, &rhs, Bounds::new(t.free_occurrences(), cfg.max_frontier));
        subst_right.record_reach(r, || {
            format!("{} under {}", show(&t), before.iter().map(show).collect::<Vec<_>>().join(", "))
        });
    }

    LawsReport {
        language: lang.name().to_string(),
        config: *cfg,
        checks: vec![subject, congruence, subst_left, subst_right],
    }
}

/// Every law in this module.
pub fn check_laws(lang: &Language, cfg: &LawConfig) -> LawsReport {
    check_monad_laws(lang, cfg).merge(check_reduction_laws(lang, cfg))
}

//! The reduction preorder generated by a signature's rules: root matching,
//! congruence into every child slot, and bounded reflexive-transitive
//! reachability.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::signature::{CompiledRule, Language, Name, NatPattern, ResolvedTemplate, Side};
use crate::syntax::text::{print_term, Notation};
use crate::syntax::{
    eval_sort_expr, match_sort_expr, subst_one, typecheck, Context, Node, Scope, Sort, Term, TypeError,
};

/// Result of matching a rule's lhs against a term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Match {
    /// Degree variable `i` is `sorts[i - 1]`; `None` only for variables the
    /// rule never mentions.
    pub sorts: Vec<Option<Sort>>,
    pub metas: BTreeMap<Name, Term>,
    pub nats: BTreeMap<Name, u64>,
}

fn match_nat(p: &NatPattern, value: u64, nats: &mut BTreeMap<Name, u64>) -> bool {
    match p {
        NatPattern::Zero => value == 0,
        NatPattern::Const(k) => value == *k,
        NatPattern::Var(v) => {
            nats.insert(v.clone(), value);
            true
        }
        NatPattern::Succ(v) | NatPattern::Plus1(v) => {
            if value == 0 {
                return false;
            }
            nats.insert(v.clone(), value - 1);
            true
        }
    }
}

fn eval_nat(p: &NatPattern, nats: &BTreeMap<Name, u64>) -> u64 {
    let get = |v: &Name| *nats.get(v).unwrap_or_else(|| panic!("unbound nat variable `{v}`"));
    match p {
        NatPattern::Zero => 0,
        NatPattern::Const(k) => *k,
        NatPattern::Var(v) => get(v),
        NatPattern::Succ(v) | NatPattern::Plus1(v) => get(v) + 1,
    }
}

fn match_tpl(tpl: &ResolvedTemplate, term: &Term, m: &mut Match) -> bool {
    match tpl {
        ResolvedTemplate::Meta(x) => {
            m.metas.insert(x.clone(), term.clone());
            true
        }
        ResolvedTemplate::Con { arity, sorts, nat, children, .. } => {
            let Term::Con(node) = term else { return false };
            if node.arity != *arity || node.sorts.len() != sorts.len() || node.children.len() != children.len() {
                return false;
            }
            if !sorts.iter().zip(&node.sorts).all(|(e, s)| match_sort_expr(e, s, &mut m.sorts)) {
                return false;
            }
            match (nat, node.nat) {
                (None, None) => {}
                (Some(p), Some(v)) => {
                    if !match_nat(p, v, &mut m.nats) {
                        return false;
                    }
                }
                _ => return false,
            }
            children.iter().zip(&node.children).all(|(t, c)| match_tpl(t, &c.body, m))
        }
        ResolvedTemplate::Subst1 { .. } => false,
    }
}

/// Matches `rule`'s lhs at the root of `term`.
pub fn match_root(rule: &CompiledRule, term: &Term) -> Option<Match> {
    let mut m = Match { sorts: vec![None; rule.degree], ..Match::default() };
    match_tpl(&rule.lhs, term, &mut m).then_some(m)
}

fn inst(tpl: &ResolvedTemplate, m: &Match, assignment: &[Sort]) -> Term {
    match tpl {
        ResolvedTemplate::Meta(x) => m.metas.get(x).unwrap_or_else(|| panic!("unbound metavar `{x}`")).clone(),
        ResolvedTemplate::Con { arity, sorts, nat, binders, children } => Term::Con(Node {
            arity: arity.clone(),
            sorts: sorts.iter().map(|e| eval_sort_expr(e, assignment).expect("degree in range")).collect(),
            nat: nat.as_ref().map(|p| eval_nat(p, &m.nats)),
            children: binders
                .iter()
                .zip(children)
                .map(|(&b, c)| Scope { binders: b, body: inst(c, m, assignment) })
                .collect(),
        }),
        ResolvedTemplate::Subst1 { body, arg } => subst_one(&inst(body, m, assignment), &inst(arg, m, assignment)),
    }
}

/// Builds one side of `rule` from a match.
pub fn instantiate(rule: &CompiledRule, side: Side, m: &Match) -> Term {
    // Unused degree variables never occur in node sorts; any filler will do.
    let filler = Sort::constant("?");
    let assignment: Vec<Sort> = m.sorts.iter().map(|s| s.clone().unwrap_or_else(|| filler.clone())).collect();
    inst(rule.side(side), m, &assignment)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Name,
    /// Child indices from the root to the redex.
    pub path: Vec<usize>,
    pub bindings: Match,
    /// The whole term after the step.
    pub result: Term,
}

impl ReductionStep {
    pub fn path_string(&self) -> String {
        render_path(&self.path)
    }
}

pub fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        return "root".into();
    }
    path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

/// One step per rule matching at the root, in rule-name order.
pub fn root_steps(lang: &Language, term: &Term) -> Vec<ReductionStep> {
    if !matches!(term, Term::Con(_)) {
        return Vec::new();
    }
    lang.rules()
        .iter()
        .filter_map(|r| {
            let m = match_root(r, term)?;
            let result = instantiate(r, Side::Rhs, &m);
            Some(ReductionStep { rule: r.name.clone(), path: Vec::new(), bindings: m, result })
        })
        .collect()
}

/// Rebuilds `term` with the subterm at `path` replaced, copying each node
/// off the path once.
fn replace_path(term: &Term, path: &[usize], with: Term) -> Term {
    let Some((&i, rest)) = path.split_first() else { return with };
    let Term::Con(n) = term else { panic!("path runs through a variable") };
    let mut with = Some(with);
    Term::Con(Node {
        arity: n.arity.clone(),
        sorts: n.sorts.clone(),
        nat: n.nat,
        children: n
            .children
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == i {
                    Scope { binders: c.binders, body: replace_path(&c.body, rest, with.take().expect("one child")) }
                } else {
                    c.clone()
                }
            })
            .collect(),
    })
}

/// Redexes in pre-order; `result` holds the contracted subterm only.
fn collect_redexes(lang: &Language, term: &Term, path: &mut Vec<usize>, out: &mut Vec<ReductionStep>) {
    for mut s in root_steps(lang, term) {
        s.path = path.clone();
        out.push(s);
    }
    if let Term::Con(node) = term {
        for (i, child) in node.children.iter().enumerate() {
            path.push(i);
            collect_redexes(lang, &child.body, path, out);
            path.pop();
        }
    }
}

/// All one-step reducts, ordered by position (pre-order, so leftmost-outermost
/// first) and then rule name. When several rules at the same position yield
/// the same result only the first is kept.
pub fn step_all(lang: &Language, term: &Term) -> Vec<ReductionStep> {
    let mut steps = Vec::new();
    collect_redexes(lang, term, &mut Vec::new(), &mut steps);
    for s in &mut steps {
        let sub = std::mem::replace(&mut s.result, Term::Var(0));
        s.result = replace_path(term, &s.path, sub);
    }
    steps.sort_by(|a, b| a.path.cmp(&b.path).then_with(|| a.rule.cmp(&b.rule)));
    let mut seen = HashSet::new();
    steps.retain(|s| seen.insert((s.path.clone(), s.result.clone())));
    steps
}

/// The leftmost-outermost step, if any, without enumerating the others.
pub fn first_step(lang: &Language, term: &Term) -> Option<ReductionStep> {
    fn find(lang: &Language, term: &Term, path: &mut Vec<usize>) -> Option<ReductionStep> {
        if let Some(mut s) = root_steps(lang, term).into_iter().next() {
            s.path = path.clone();
            return Some(s);
        }
        let Term::Con(node) = term else { return None };
        for (i, child) in node.children.iter().enumerate() {
            path.push(i);
            let found = find(lang, &child.body, path);
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    let mut s = find(lang, term, &mut Vec::new())?;
    let sub = std::mem::replace(&mut s.result, Term::Var(0));
    s.result = replace_path(term, &s.path, sub);
    Some(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<ReductionStep>,
}

impl Trace {
    pub fn empty(start: Term) -> Self {
        Trace { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// One line per step: `<n>. [<rule>@<path>] <term>`.
    pub fn render(&self, notation: Notation) -> String {
        let mut out = String::new();
        for (k, s) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "{}. [{}@{}] {}", k + 1, s.rule, s.path_string(), print_term(&s.result, notation));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_steps: usize,
    /// Cap on the number of new terms per breadth-first level.
    pub max_frontier: usize,
}

impl Bounds {
    pub fn new(max_steps: usize, max_frontier: usize) -> Self {
        Bounds { max_steps, max_frontier }
    }

    pub fn steps(max_steps: usize) -> Self {
        Bounds { max_steps, max_frontier: 50_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reach {
    Yes(Trace),
    /// The whole reachable set was enumerated and the target is not in it.
    No,
    /// A bound was hit before the target was found.
    Unknown,
}

impl Reach {
    pub fn is_yes(&self) -> bool {
        matches!(self, Reach::Yes(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Reach::Yes(_) => "yes",
            Reach::No => "no",
            Reach::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("source: {0}")]
    Source(TypeError),
    #[error("target: {0}")]
    Target(TypeError),
    #[error("sorts differ: {0} vs {1}")]
    SortMismatch(Sort, Sort),
}

/// Bounded reachability `s ⇝* t` after checking both terms in `ctx`.
pub fn reduces_to(lang: &Language, ctx: &Context, s: &Term, t: &Term, bounds: Bounds) -> Result<Reach, ReduceError> {
    let a = typecheck(lang, ctx, s).map_err(ReduceError::Source)?;
    let b = typecheck(lang, ctx, t).map_err(ReduceError::Target)?;
    if a != b {
        return Err(ReduceError::SortMismatch(a, b));
    }
    Ok(reachable(lang, s, t, bounds))
}

/// A searched term and the (parent, rule, path) step that first reached it.
type Visited = (Term, Option<(usize, Name, Vec<usize>)>);

/// Breadth-first search for `t` from `s`; terms are assumed well-typed at
/// the same sort. The witness trace is a shortest one.
pub fn reachable(lang: &Language, s: &Term, t: &Term, bounds: Bounds) -> Reach {
    if s == t {
        return Reach::Yes(Trace::empty(s.clone()));
    }
    // arena of visited terms with the step that first reached each
    let mut nodes: Vec<Visited> = vec![(s.clone(), None)];
    let mut index: HashMap<Term, usize> = HashMap::new();
    index.insert(s.clone(), 0);
    let mut frontier = vec![0usize];
    let mut truncated = false;
    for _ in 0..bounds.max_steps {
        let mut next = Vec::new();
        'level: for &u in &frontier {
            for step in step_all(lang, &nodes[u].0) {
                if index.contains_key(&step.result) {
                    continue;
                }
                if next.len() >= bounds.max_frontier {
                    truncated = true;
                    break 'level;
                }
                let id = nodes.len();
                index.insert(step.result.clone(), id);
                let found = &step.result == t;
                nodes.push((step.result, Some((u, step.rule, step.path))));
                if found {
                    return Reach::Yes(rebuild(lang, &nodes, id));
                }
                next.push(id);
            }
        }
        if next.is_empty() {
            return if truncated { Reach::Unknown } else { Reach::No };
        }
        frontier = next;
    }
    Reach::Unknown
}

fn rebuild(lang: &Language, nodes: &[Visited], end: usize) -> Trace {
    let mut chain = Vec::new();
    let mut cur = end;
    while let Some((p, rule, path)) = &nodes[cur].1 {
        chain.push((*p, rule.clone(), path.clone(), cur));
        cur = *p;
    }
    chain.reverse();
    let steps = chain
        .into_iter()
        .map(|(p, rule, path, r)| {
            step_all(lang, &nodes[p].0)
                .into_iter()
                .find(|st| st.rule == rule && st.path == path && st.result == nodes[r].0)
                .expect("recorded step replays")
        })
        .collect();
    Trace { start: nodes[0].0.clone(), steps }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: Term,
    pub trace: Trace,
    /// The step bound was reached while a redex remained.
    pub exhausted: bool,
}

pub fn normalize(lang: &Language, term: &Term, max_steps: usize, strategy: Strategy) -> Normalized {
    let Strategy::LeftmostOutermost = strategy;
    let mut trace = Trace::empty(term.clone());
    let mut cur = term.clone();
    loop {
        let Some(step) = first_step(lang, &cur) else {
            return Normalized { term: cur, trace, exhausted: false };
        };
        if trace.len() == max_steps {
            return Normalized { term: cur, trace, exhausted: true };
        }
        cur = step.result.clone();
        trace.steps.push(step);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang_std;
    use crate::syntax::text::parse_term;

    fn pcf_term(text: &str) -> Term {
        parse_term(&lang_std::pcf(), &Context::empty(), text, Notation::Plain).unwrap()
    }

    #[test]
    fn beta_matches_and_binds_sorts() {
        let pcf = lang_std::pcf();
        let t = pcf_term("(abs [Nat Bool] (zero · #0)) · Nats(0)");
        let m = match_root(pcf.rule("app_abs").unwrap(), &t).expect("redex");
        assert_eq!(m.sorts, vec![Some(Sort::constant("Nat")), Some(Sort::constant("Bool"))]);
        assert_eq!(m.metas.len(), 2);
        assert!(match_root(pcf.rule("app_abs").unwrap(), &Term::var(0)).is_none());
    }

    #[test]
    fn succ_red_binds_the_literal() {
        let pcf = lang_std::pcf();
        let r = pcf.rule("succ_red").unwrap();
        let m = match_root(r, &pcf_term("succ · Nats(4)")).unwrap();
        assert_eq!(m.nats.get("n"), Some(&4));
        assert_eq!(instantiate(r, Side::Rhs, &m), pcf.nat_node("nats", 5));
    }

    #[test]
    fn zero_f_needs_a_positive_literal() {
        let pcf = lang_std::pcf();
        let r = pcf.rule("zero_f").unwrap();
        assert!(match_root(r, &pcf_term("zero · Nats(0)")).is_none());
        assert_eq!(match_root(r, &pcf_term("zero · Nats(3)")).unwrap().nats.get("n"), Some(&2));
    }

    #[test]
    fn literals_have_no_root_steps() {
        let pcf = lang_std::pcf();
        assert!(root_steps(&pcf, &pcf_term("Nats(3)")).is_empty());
        assert!(step_all(&pcf, &Term::var(0)).is_empty());
    }

    #[test]
    fn two_redexes_in_ulc() {
        let ulc = lang_std::ulc();
        let t = parse_term(&ulc, &Context::empty(), "Abs 1 @ (Abs 1 @ Abs 1)", Notation::Paper).unwrap();
        let steps = step_all(&ulc, &t);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].path, Vec::<usize>::new());
        assert_eq!(steps[1].path, vec![1]);
    }

    #[test]
    fn rec_unfolds_and_diverges() {
        let pcf = lang_std::pcf();
        let t = pcf_term("(rec [Nat] (abs [Nat Nat] #0))");
        let n = normalize(&pcf, &t, 3, Strategy::LeftmostOutermost);
        assert!(n.exhausted);
        assert_eq!(n.trace.len(), 3);
        assert_eq!(n.trace.steps[0].rule.as_ref(), "rec_a");
    }

    #[test]
    fn reflexivity_needs_no_steps() {
        let pcf = lang_std::pcf();
        let t = pcf_term("ttt");
        assert_eq!(reduces_to(&pcf, &Context::empty(), &t, &t, Bounds::steps(0)), Ok(Reach::Yes(Trace::empty(t))));
    }

    #[test]
    fn exhausted_search_answers_no() {
        let pcf = lang_std::pcf();
        let s = pcf_term("zero · Nats(0)");
        assert_eq!(reachable(&pcf, &s, &pcf_term("fff"), Bounds::steps(10)), Reach::No);
        let r = reduces_to(&pcf, &Context::empty(), &s, &pcf_term("Nats(0)"), Bounds::steps(4));
        assert!(matches!(r, Err(ReduceError::SortMismatch(..))));
    }

    #[test]
    fn trace_rendering() {
        let pcf = lang_std::pcf();
        let n = normalize(&pcf, &pcf_term("zero · Nats(0)"), 10, Strategy::LeftmostOutermost);
        assert_eq!(n.trace.render(Notation::Plain), "1. [zero_t@root] ttt\n");
    }
}

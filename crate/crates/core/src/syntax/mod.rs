//! Generated syntax: closed sorts over a sort signature and well-sorted
//! de Bruijn terms over a term signature, with renaming and capture-avoiding
//! substitution.

mod gen;
pub mod text;

use std::fmt;

use thiserror::Error;

use crate::signature::{Language, Name, SortExpr, SortSignature};

pub use gen::{gen_term, TermGen};

/// A closed sort, a finite tree of sort constructors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort {
    pub con: Name,
    pub args: Vec<Sort>,
}

impl Sort {
    pub fn new(con: impl Into<Name>, args: Vec<Sort>) -> Self {
        Sort { con: con.into(), args }
    }

    pub fn constant(con: impl Into<Name>) -> Self {
        Sort::new(con, Vec::new())
    }

    pub fn height(&self) -> usize {
        self.args.iter().map(|a| a.height() + 1).max().unwrap_or(0)
    }

    /// Checks constructor names and argument counts.
    pub fn check(&self, sorts: &SortSignature) -> Result<(), SortError> {
        match sorts.arity(&self.con) {
            None => Err(SortError::UnknownConstructor(self.con.clone())),
            Some(n) if n != self.args.len() => {
                Err(SortError::ArgCount { con: self.con.clone(), expected: n, found: self.args.len() })
            }
            Some(_) => self.args.iter().try_for_each(|a| a.check(sorts)),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.con);
        }
        write!(f, "({}", self.con)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SortError {
    #[error("degree variable {index} out of range (assignment has {len} sorts)")]
    VarOutOfRange { index: usize, len: usize },
    #[error("unknown sort constructor `{0}`")]
    UnknownConstructor(Name),
    #[error("sort constructor `{con}` expects {expected} arguments, got {found}")]
    ArgCount { con: Name, expected: usize, found: usize },
}

/// Replaces the degree variables of `expr` by the assigned sorts (variable
/// `i` is `assignment[i - 1]`).
pub fn eval_sort_expr(expr: &SortExpr, assignment: &[Sort]) -> Result<Sort, SortError> {
    match expr {
        SortExpr::Var(i) => {
            if *i == 0 || *i > assignment.len() {
                Err(SortError::VarOutOfRange { index: *i, len: assignment.len() })
            } else {
                Ok(assignment[i - 1].clone())
            }
        }
        SortExpr::Con(name, args) => Ok(Sort {
            con: name.clone(),
            args: args.iter().map(|a| eval_sort_expr(a, assignment)).collect::<Result<_, _>>()?,
        }),
    }
}

/// First-order matching of a sort expression against a closed sort,
/// extending a partial assignment of degree variables.
pub fn match_sort_expr(expr: &SortExpr, sort: &Sort, assignment: &mut [Option<Sort>]) -> bool {
    match expr {
        SortExpr::Var(i) => match assignment.get_mut(i.wrapping_sub(1)) {
            None => false,
            Some(slot @ None) => {
                *slot = Some(sort.clone());
                true
            }
            Some(Some(s)) => s == sort,
        },
        SortExpr::Con(name, args) => {
            *name == sort.con
                && args.len() == sort.args.len()
                && args.iter().zip(&sort.args).all(|(e, s)| match_sort_expr(e, s, assignment))
        }
    }
}

/// A typing context; position `i` is the sort of de Bruijn index `i`, so
/// position 0 is the innermost binder.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context(Vec<Sort>);

impl Context {
    pub fn empty() -> Self {
        Context(Vec::new())
    }

    /// Builds a context from sorts listed innermost first.
    pub fn from_innermost(sorts: Vec<Sort>) -> Self {
        Context(sorts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Sort> {
        self.0.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sort> {
        self.0.iter()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.0
    }

    /// Pushes `binders` in order; the last one becomes index 0.
    pub fn extend(&self, binders: &[Sort]) -> Context {
        let mut v = Vec::with_capacity(binders.len() + self.0.len());
        v.extend(binders.iter().rev().cloned());
        v.extend(self.0.iter().cloned());
        Context(v)
    }

    pub fn map(&self, f: impl Fn(&Sort) -> Sort) -> Context {
        Context(self.0.iter().map(f).collect())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// A child of a constructor node together with the number of variables it binds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scope {
    pub binders: usize,
    pub body: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub arity: Name,
    /// Instantiation of the arity's degree variables.
    pub sorts: Vec<Sort>,
    pub nat: Option<u64>,
    pub children: Vec<Scope>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Con(Node),
}

impl Term {
    pub fn var(index: usize) -> Term {
        Term::Var(index)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Con(n) => 1 + n.children.iter().map(|c| c.body.size()).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Con(n) => 1 + n.children.iter().map(|c| c.body.depth()).max().unwrap_or(0),
        }
    }

    /// Subterm at a path of child indices.
    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::Var(_) => None,
                Term::Con(n) => n.children.get(i)?.body.at(rest),
            },
        }
    }

    /// Replaces the subterm at `path`.
    pub fn replace_at(&self, path: &[usize], with: Term) -> Term {
        match path.split_first() {
            None => with,
            Some((&i, rest)) => match self {
                Term::Var(_) => panic!("path runs through a variable"),
                Term::Con(n) => {
                    let mut n = n.clone();
                    let child = &mut n.children[i];
                    child.body = child.body.replace_at(rest, with);
                    Term::Con(n)
                }
            },
        }
    }

    /// Number of free-variable occurrences.
    pub fn free_occurrences(&self) -> usize {
        fn go(t: &Term, depth: usize) -> usize {
            match t {
                Term::Var(i) => usize::from(*i >= depth),
                Term::Con(n) => n.children.iter().map(|c| go(&c.body, depth + c.binders)).sum(),
            }
        }
        go(self, 0)
    }
}

impl Language {
    /// Builds a constructor node, taking binder counts from the arity.
    ///
    /// Panics on an unknown arity or a wrong child count; use [`typecheck`]
    /// to validate sorts.
    pub fn node(&self, arity: &str, sorts: Vec<Sort>, children: Vec<Term>) -> Term {
        self.build(arity, sorts, None, children)
    }

    pub fn nat_node(&self, arity: &str, value: u64) -> Term {
        self.build(arity, Vec::new(), Some(value), Vec::new())
    }

    pub fn build(&self, arity: &str, sorts: Vec<Sort>, nat: Option<u64>, children: Vec<Term>) -> Term {
        let spec = self.arity(arity).unwrap_or_else(|| panic!("unknown arity `{arity}`"));
        assert_eq!(spec.args.len(), children.len(), "child count of `{arity}`");
        Term::Con(Node {
            arity: spec.name.clone(),
            sorts,
            nat,
            children: spec
                .args
                .iter()
                .zip(children)
                .map(|(a, body)| Scope { binders: a.binders.len(), body })
                .collect(),
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound index #{index} in a context of length {len}")]
    UnboundIndex { index: usize, len: usize },
    #[error("unknown arity `{0}`")]
    UnknownArity(Name),
    #[error("`{arity}` expects {expected} sort arguments, got {found}")]
    SortArgCount { arity: Name, expected: usize, found: usize },
    #[error("`{arity}` expects {expected} children, got {found}")]
    ChildCount { arity: Name, expected: usize, found: usize },
    #[error("child {child} of `{arity}` binds {found} variables, expected {expected}")]
    BinderCount { arity: Name, child: usize, expected: usize, found: usize },
    #[error("child sort mismatch in `{arity}` child {child}: expected {expected}, found {found}")]
    ChildSortMismatch { arity: Name, child: usize, expected: Sort, found: Sort },
    #[error("missing nat payload on `{0}`")]
    MissingNat(Name),
    #[error("unexpected nat payload on `{0}`")]
    UnexpectedNat(Name),
    #[error("ill-formed sort argument: {0}")]
    Sort(#[from] SortError),
    #[error("expected sort {expected}, found {found}")]
    Expected { expected: Sort, found: Sort },
}

/// Computes the sort of `term` in `ctx`. Syntax-directed: sort arguments are
/// stored on every node, so no inference happens here.
pub fn typecheck(lang: &Language, ctx: &Context, term: &Term) -> Result<Sort, TypeError> {
    match term {
        Term::Var(i) => ctx.get(*i).cloned().ok_or(TypeError::UnboundIndex { index: *i, len: ctx.len() }),
        Term::Con(node) => {
            let spec = lang.arity(&node.arity).ok_or_else(|| TypeError::UnknownArity(node.arity.clone()))?;
            if node.sorts.len() != spec.degree {
                return Err(TypeError::SortArgCount {
                    arity: node.arity.clone(),
                    expected: spec.degree,
                    found: node.sorts.len(),
                });
            }
            for s in &node.sorts {
                s.check(lang.sorts())?;
            }
            match (spec.nat_indexed, node.nat) {
                (true, None) => return Err(TypeError::MissingNat(node.arity.clone())),
                (false, Some(_)) => return Err(TypeError::UnexpectedNat(node.arity.clone())),
                _ => {}
            }
            if node.children.len() != spec.args.len() {
                return Err(TypeError::ChildCount {
                    arity: node.arity.clone(),
                    expected: spec.args.len(),
                    found: node.children.len(),
                });
            }
            for (k, (arg, child)) in spec.args.iter().zip(&node.children).enumerate() {
                if child.binders != arg.binders.len() {
                    return Err(TypeError::BinderCount {
                        arity: node.arity.clone(),
                        child: k,
                        expected: arg.binders.len(),
                        found: child.binders,
                    });
                }
                let binders =
                    arg.binders.iter().map(|b| eval_sort_expr(b, &node.sorts)).collect::<Result<Vec<_>, _>>()?;
                let found = typecheck(lang, &ctx.extend(&binders), &child.body)?;
                let expected = eval_sort_expr(&arg.body, &node.sorts)?;
                if found != expected {
                    return Err(TypeError::ChildSortMismatch { arity: node.arity.clone(), child: k, expected, found });
                }
            }
            Ok(eval_sort_expr(&spec.result, &node.sorts)?)
        }
    }
}

/// Typechecks and compares against an expected sort.
pub fn check_sort(lang: &Language, ctx: &Context, term: &Term, expected: &Sort) -> Result<(), TypeError> {
    let found = typecheck(lang, ctx, term)?;
    if &found == expected {
        Ok(())
    } else {
        Err(TypeError::Expected { expected: expected.clone(), found })
    }
}

fn rename_at(term: &Term, depth: usize, f: &dyn Fn(usize) -> usize) -> Term {
    match term {
        Term::Var(i) if *i < depth => Term::Var(*i),
        Term::Var(i) => Term::Var(f(i - depth) + depth),
        Term::Con(node) => Term::Con(Node {
            arity: node.arity.clone(),
            sorts: node.sorts.clone(),
            nat: node.nat,
            children: node
                .children
                .iter()
                .map(|c| Scope { binders: c.binders, body: rename_at(&c.body, depth + c.binders, f) })
                .collect(),
        }),
    }
}

/// Applies an index map to the free variables of `term`, lifting it under binders.
pub fn rename(term: &Term, f: impl Fn(usize) -> usize) -> Term {
    rename_at(term, 0, &f)
}

/// Weakening by `k` fresh innermost variables.
pub fn weaken(term: &Term, k: usize) -> Term {
    if k == 0 {
        return term.clone();
    }
    rename(term, |i| i + k)
}

fn subst_at(term: &Term, depth: usize, f: &dyn Fn(usize) -> Term) -> Term {
    match term {
        Term::Var(i) if *i < depth => Term::Var(*i),
        Term::Var(i) => weaken(&f(i - depth), depth),
        Term::Con(node) => Term::Con(Node {
            arity: node.arity.clone(),
            sorts: node.sorts.clone(),
            nat: node.nat,
            children: node
                .children
                .iter()
                .map(|c| Scope { binders: c.binders, body: subst_at(&c.body, depth + c.binders, f) })
                .collect(),
        }),
    }
}

/// Simultaneous substitution by an arbitrary index-to-term function; under a
/// binder the shifted map is used.
pub fn subst_with(term: &Term, f: impl Fn(usize) -> Term) -> Term {
    subst_at(term, 0, &f)
}

/// A substitution from context `source` into terms over context `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstMap {
    source: Context,
    target: Context,
    terms: Vec<Term>,
}

impl SubstMap {
    /// Checks that entry `i` has sort `source[i]` in `target`.
    pub fn new(lang: &Language, source: Context, target: Context, terms: Vec<Term>) -> Result<SubstMap, TypeError> {
        if terms.len() != source.len() {
            return Err(TypeError::UnboundIndex { index: terms.len().min(source.len()), len: source.len() });
        }
        for (s, t) in source.iter().zip(&terms) {
            check_sort(lang, &target, t, s)?;
        }
        Ok(SubstMap { source, target, terms })
    }

    /// `i -> Var(i)`.
    pub fn identity(ctx: &Context) -> SubstMap {
        SubstMap { source: ctx.clone(), target: ctx.clone(), terms: (0..ctx.len()).map(Term::Var).collect() }
    }

    pub fn source(&self) -> &Context {
        &self.source
    }

    pub fn target(&self) -> &Context {
        &self.target
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn get(&self, index: usize) -> &Term {
        &self.terms[index]
    }

    /// Applies `f` to every entry, keeping the source context.
    pub fn map_terms(&self, target: Context, f: impl Fn(&Term) -> Term) -> SubstMap {
        SubstMap { source: self.source.clone(), target, terms: self.terms.iter().map(f).collect() }
    }
}

/// Capture-avoiding simultaneous substitution.
pub fn subst(term: &Term, map: &SubstMap) -> Term {
    subst_with(term, |i| map.terms[i].clone())
}

/// `body[*:= arg]`: substitutes `arg` for index 0 and shifts the other free
/// variables of `body` down by one.
pub fn subst_one(body: &Term, arg: &Term) -> Term {
    subst_with(body, |i| if i == 0 { arg.clone() } else { Term::Var(i - 1) })
}

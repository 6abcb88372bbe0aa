//! Untyped lambda terms with named variables and textbook capture-avoiding
//! substitution.

use std::cell::Cell;
use std::collections::{BTreeSet, HashMap};

use twosig::syntax::{Node, Scope, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Named {
    Var(String),
    Lam(String, Box<Named>),
    App(Box<Named>, Box<Named>),
}

/// Converts a ULC de Bruijn term; `free[i]` names the free index `i` and
/// the binder at depth `k` is called `{binder}{k}`.
pub fn to_named(t: &Term, free: &[String], binder: &str) -> Named {
    fn go(t: &Term, bound: &mut Vec<String>, free: &[String], binder: &str) -> Named {
        match t {
            Term::Var(i) => {
                let i = *i;
                if i < bound.len() {
                    Named::Var(bound[bound.len() - 1 - i].clone())
                } else {
                    Named::Var(free[i - bound.len()].clone())
                }
            }
            Term::Con(n) if &*n.arity == "abs" => {
                let name = format!("{binder}{}", bound.len());
                bound.push(name.clone());
                let body = go(&n.children[0].body, bound, free, binder);
                bound.pop();
                Named::Lam(name, Box::new(body))
            }
            Term::Con(n) if &*n.arity == "app" => Named::App(
                Box::new(go(&n.children[0].body, bound, free, binder)),
                Box::new(go(&n.children[1].body, bound, free, binder)),
            ),
            Term::Con(n) => panic!("not a ULC constructor: {}", n.arity),
        }
    }
    go(t, &mut Vec::new(), free, binder)
}

/// Converts back; a free name must appear in `free`.
pub fn from_named(t: &Named, free: &[String]) -> Term {
    fn go(t: &Named, bound: &mut Vec<String>, free: &[String]) -> Term {
        match t {
            Named::Var(x) => match bound.iter().rev().position(|b| b == x) {
                Some(i) => Term::Var(i),
                None => {
                    let k = free.iter().position(|f| f == x).unwrap_or_else(|| panic!("unknown free name {x}"));
                    Term::Var(bound.len() + k)
                }
            },
            Named::Lam(x, body) => {
                bound.push(x.clone());
                let b = go(body, bound, free);
                bound.pop();
                Term::Con(Node {
                    arity: "abs".into(),
                    sorts: vec![],
                    nat: None,
                    children: vec![Scope { binders: 1, body: b }],
                })
            }
            Named::App(f, a) => {
                let plain = |body| Scope { binders: 0, body };
                Term::Con(Node {
                    arity: "app".into(),
                    sorts: vec![],
                    nat: None,
                    children: vec![plain(go(f, bound, free)), plain(go(a, bound, free))],
                })
            }
        }
    }
    go(t, &mut Vec::new(), free)
}

pub fn free_vars(t: &Named) -> BTreeSet<String> {
    match t {
        Named::Var(x) => BTreeSet::from([x.clone()]),
        Named::Lam(x, b) => {
            let mut s = free_vars(b);
            s.remove(x);
            s
        }
        Named::App(f, a) => free_vars(f).union(&free_vars(a)).cloned().collect(),
    }
}

thread_local! {
    static FRESH: Cell<usize> = const { Cell::new(0) };
}

fn fresh() -> String {
    FRESH.with(|c| {
        c.set(c.get() + 1);
        format!("v{}", c.get())
    })
}

/// Simultaneous substitution; names outside the map stay as they are. A
/// binder is renamed when it would capture a free variable of some
/// replacement.
pub fn named_subst(t: &Named, map: &HashMap<String, Named>) -> Named {
    match t {
        Named::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
        Named::App(f, a) => Named::App(Box::new(named_subst(f, map)), Box::new(named_subst(a, map))),
        Named::Lam(x, body) => {
            let mut inner = map.clone();
            inner.remove(x);
            let relevant = free_vars(body);
            let captures =
                relevant.iter().filter(|y| *y != x).filter_map(|y| inner.get(y)).any(|r| free_vars(r).contains(x));
            if captures {
                let z = fresh();
                inner.insert(x.clone(), Named::Var(z.clone()));
                Named::Lam(z, Box::new(named_subst(body, &inner)))
            } else {
                Named::Lam(x.clone(), Box::new(named_subst(body, &inner)))
            }
        }
    }
}

fn star_ctx(n: usize) -> twosig::syntax::Context {
    twosig::syntax::Context::from_innermost(vec![twosig::syntax::Sort::constant("*"); n])
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// `subst(t, m)` computed by the oracle; `t` has `source` free variables
/// and the entries `target`.
pub fn oracle_subst(t: &Term, source: usize, entries: &[Term], target: usize) -> Term {
    let xs = names("x", source);
    let ys = names("y", target);
    let map: HashMap<String, Named> = xs.iter().cloned().zip(entries.iter().map(|e| to_named(e, &ys, "b"))).collect();
    // binders of `t` reuse the target's names, so capture has to be avoided
    from_named(&named_subst(&to_named(t, &xs, "y"), &map), &ys)
}

/// `subst_one(body, arg)` computed by the oracle: `x0` is the variable being
/// replaced, the others keep their names.
pub fn oracle_subst_one(body: &Term, arg: &Term, outer: usize) -> Term {
    let xs = names("x", outer + 1);
    let rest: Vec<String> = xs[1..].to_vec();
    let mut map = HashMap::new();
    map.insert(xs[0].clone(), to_named(arg, &rest, "b"));
    from_named(&named_subst(&to_named(body, &xs, "b"), &map), &rest)
}

/// Compares `subst` and `subst_one` with the oracle on `rounds` random ULC
/// terms of depth at most 4. Returns how many of each were compared and
/// the disagreements.
pub fn compare_random(seed: u64, rounds: usize) -> (usize, usize, Vec<String>) {
    use twosig::syntax::text::{print_term, Notation};
    use twosig::syntax::{subst, subst_one, Sort, SubstMap, TermGen};
    let lang = twosig::lang_std::ulc();
    let star = Sort::constant("*");
    let mut gen = TermGen::new(&lang, seed);
    let (mut many, mut one, mut bad) = (0, 0, Vec::new());
    let show = |t: &Term| print_term(t, Notation::Plain);
    for k in 0..rounds {
        let source = k % 4;
        let target = (k / 4) % 3;
        let Some(t) = gen.term(&star_ctx(source), &star, 4) else { continue };
        let entries: Vec<Term> =
            (0..source).map(|_| gen.term(&star_ctx(target), &star, 3).expect("ulc is inhabited")).collect();
        let m = SubstMap::new(&lang, star_ctx(source), star_ctx(target), entries).expect("well-typed entries");
        if subst(&t, &m) != oracle_subst(&t, source, m.terms(), target) {
            bad.push(format!("subst on {}", show(&t)));
        }
        many += 1;

        let Some(body) = gen.term(&star_ctx(source + 1), &star, 4) else { continue };
        let arg = gen.term(&star_ctx(source), &star, 3).expect("ulc is inhabited");
        if subst_one(&body, &arg) != oracle_subst_one(&body, &arg, source) {
            bad.push(format!("subst_one on {}", show(&body)));
        }
        one += 1;
    }
    (many, one, bad)
}

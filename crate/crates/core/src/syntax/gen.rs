use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{eval_sort_expr, match_sort_expr, Context, Node, Scope, Sort, Term};
use crate::signature::{Language, TermAritySpec};

/// Upper bound on free-degree-variable assignments tried per arity.
const MAX_ASSIGNMENTS: usize = 256;

/// Seeded generator of random well-typed terms.
///
/// Degree variables that the requested sort does not determine (the argument
/// sort of an application, say) are drawn from a pool of small sorts: every
/// sort constant plus every constructor applied to constants.
pub struct TermGen<'a> {
    lang: &'a Language,
    rng: ChaCha8Rng,
    pool: Vec<Sort>,
    memo: HashMap<(Vec<Sort>, Sort, usize), bool>,
    max_nat: u64,
}

impl<'a> TermGen<'a> {
    pub fn new(lang: &'a Language, seed: u64) -> Self {
        let sorts = lang.sorts();
        let constants: Vec<Sort> =
            sorts.constructors.iter().filter(|(_, &a)| a == 0).map(|(n, _)| Sort::constant(n.clone())).collect();
        let mut pool = constants.clone();
        if !constants.is_empty() {
            for (name, &arity) in sorts.constructors.iter().filter(|(_, &a)| a > 0) {
                for combo in tuples(&constants, arity, MAX_ASSIGNMENTS) {
                    pool.push(Sort::new(name.clone(), combo));
                }
            }
        }
        TermGen { lang, rng: ChaCha8Rng::seed_from_u64(seed), pool, memo: HashMap::new(), max_nat: 4 }
    }

    pub fn with_max_nat(mut self, max_nat: u64) -> Self {
        self.max_nat = max_nat;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn language(&self) -> &'a Language {
        self.lang
    }

    /// Small sorts used for unconstrained degree variables. Empty when the
    /// sort signature has no constant.
    pub fn sort_pool(&self) -> &[Sort] {
        &self.pool
    }

    pub fn random_sort(&mut self) -> Option<Sort> {
        self.pool.choose(&mut self.rng).cloned()
    }

    pub fn random_context(&mut self, max_len: usize) -> Context {
        let len = self.rng.gen_range(0..=max_len);
        let sorts = (0..len).filter_map(|_| self.random_sort()).collect();
        Context::from_innermost(sorts)
    }

    pub fn random_nat(&mut self) -> u64 {
        self.rng.gen_range(0..=self.max_nat)
    }

    fn key(ctx: &Context) -> Vec<Sort> {
        let mut v: Vec<Sort> = ctx.iter().cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    /// Whether a term of `sort` with depth at most `depth` exists over the
    /// sorts in `ctx` (only the set of sorts matters).
    fn inhabited(&mut self, ctx: &[Sort], sort: &Sort, depth: usize) -> bool {
        if depth == 0 {
            return false;
        }
        if ctx.binary_search(sort).is_ok() {
            return true;
        }
        let key = (ctx.to_vec(), sort.clone(), depth);
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let lang = self.lang;
        let found = lang.arities().iter().any(|a| !self.options(a, ctx, sort, depth, true).is_empty());
        self.memo.insert(key, found);
        found
    }

    /// Degree-variable assignments under which `arity` builds a term of
    /// `sort` within `depth`.
    fn options(
        &mut self,
        arity: &TermAritySpec,
        ctx: &[Sort],
        sort: &Sort,
        depth: usize,
        first_only: bool,
    ) -> Vec<Vec<Sort>> {
        if !arity.args.is_empty() && depth < 2 {
            return Vec::new();
        }
        let mut partial = vec![None; arity.degree];
        if !match_sort_expr(&arity.result, sort, &mut partial) {
            return Vec::new();
        }
        let free: Vec<usize> = (0..arity.degree).filter(|&i| partial[i].is_none()).collect();
        let combos = if free.is_empty() { vec![Vec::new()] } else { tuples(&self.pool, free.len(), MAX_ASSIGNMENTS) };
        let mut out = Vec::new();
        for combo in combos {
            let mut assignment = partial.clone();
            for (&i, s) in free.iter().zip(combo) {
                assignment[i] = Some(s);
            }
            let assignment: Vec<Sort> = assignment.into_iter().map(|s| s.expect("assigned")).collect();
            let ok = arity.args.iter().all(|arg| {
                let mut inner = ctx.to_vec();
                for b in &arg.binders {
                    inner.push(eval_sort_expr(b, &assignment).expect("degree in range"));
                }
                inner.sort();
                inner.dedup();
                let body = eval_sort_expr(&arg.body, &assignment).expect("degree in range");
                self.inhabited(&inner, &body, depth - 1)
            });
            if ok {
                out.push(assignment);
                if first_only {
                    break;
                }
            }
        }
        out
    }

    /// A random term of `sort` in `ctx` with depth at most `depth`, or `None`
    /// when no such term exists.
    pub fn term(&mut self, ctx: &Context, sort: &Sort, depth: usize) -> Option<Term> {
        if depth == 0 {
            return None;
        }
        let key = Self::key(ctx);
        enum Choice {
            Var(usize),
            Con(usize, Vec<Sort>),
        }
        let mut choices: Vec<(u32, Choice)> = Vec::new();
        for (i, s) in ctx.iter().enumerate() {
            if s == sort {
                choices.push((2, Choice::Var(i)));
            }
        }
        let lang = self.lang;
        for (k, arity) in lang.arities().iter().enumerate() {
            let opts = self.options(arity, &key, sort, depth, false);
            if let Some(a) = opts.choose(&mut self.rng) {
                let weight = if arity.args.is_empty() || depth < 2 { 1 } else { 3 };
                choices.push((weight, Choice::Con(k, a.clone())));
            }
        }
        let total: u32 = choices.iter().map(|(w, _)| w).sum();
        if total == 0 {
            return None;
        }
        let mut pick = self.rng.gen_range(0..total);
        let choice = choices
            .into_iter()
            .find(|(w, _)| {
                if pick < *w {
                    true
                } else {
                    pick -= w;
                    false
                }
            })
            .map(|(_, c)| c)?;
        match choice {
            Choice::Var(i) => Some(Term::Var(i)),
            Choice::Con(k, sorts) => {
                let arity = &lang.arities()[k];
                let mut children = Vec::with_capacity(arity.args.len());
                for arg in &arity.args {
                    let binders: Vec<Sort> =
                        arg.binders.iter().map(|b| eval_sort_expr(b, &sorts).expect("degree in range")).collect();
                    let body_sort = eval_sort_expr(&arg.body, &sorts).expect("degree in range");
                    let body = self.term(&ctx.extend(&binders), &body_sort, depth - 1)?;
                    children.push(Scope { binders: binders.len(), body });
                }
                let nat = arity.nat_indexed.then(|| self.random_nat());
                Some(Term::Con(Node { arity: arity.name.clone(), sorts, nat, children }))
            }
        }
    }

    /// A random sort from the pool together with a term of it, if any sort
    /// in a few tries is inhabited.
    pub fn any_term(&mut self, ctx: &Context, depth: usize) -> Option<(Sort, Term)> {
        for _ in 0..16 {
            let sort = self.random_sort()?;
            if let Some(t) = self.term(ctx, &sort, depth) {
                return Some((sort, t));
            }
        }
        None
    }
}

/// All `len`-tuples over `items` in lexicographic order, at most `cap` of them.
fn tuples(items: &[Sort], len: usize, cap: usize) -> Vec<Vec<Sort>> {
    let mut out: Vec<Vec<Sort>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for it in items {
                if next.len() >= cap {
                    break 'outer;
                }
                let mut p = prefix.clone();
                p.push(it.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// A random well-typed term of `sort` in `ctx` of depth at most `depth`;
/// deterministic in `seed`.
pub fn gen_term(lang: &Language, ctx: &Context, sort: &Sort, depth: usize, seed: u64) -> Option<Term> {
    TermGen::new(lang, seed).term(ctx, sort, depth)
}

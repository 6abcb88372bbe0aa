//! A direct call-by-name evaluator for closed PCF programs of ground sort.
//!
//! `pred` only undoes a `succ`: the rules send `pred (succ n)` to `n` and
//! `pred 0` to `0`, and leave `pred` of any other literal stuck. Numbers
//! therefore remember whether they were produced by `succ`.

use twosig::syntax::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
enum E {
    Var(usize),
    Lam(Box<E>),
    App(Box<E>, Box<E>),
    Rec(Box<E>),
    Bottom,
    Tt,
    Ff,
    Succ,
    Pred,
    Zero,
    Cond,
    Lit(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Nat(u64),
    Bool(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Value),
    Stuck,
    OutOfFuel,
}

fn import(t: &Term) -> E {
    match t {
        Term::Var(i) => E::Var(*i),
        Term::Con(n) => {
            let c = |k: usize| Box::new(import(&n.children[k].body));
            match &*n.arity {
                "abs" => E::Lam(c(0)),
                "app" => E::App(c(0), c(1)),
                "rec" => E::Rec(c(0)),
                "bottom" => E::Bottom,
                "ttt" => E::Tt,
                "fff" => E::Ff,
                "succ" => E::Succ,
                "pred" => E::Pred,
                "zero" => E::Zero,
                "condN" | "condB" => E::Cond,
                "nats" => E::Lit(n.nat.expect("literal")),
                other => panic!("not PCF: {other}"),
            }
        }
    }
}

fn shift(e: &E, by: usize, cutoff: usize) -> E {
    match e {
        E::Var(i) if *i >= cutoff => E::Var(i + by),
        E::Lam(b) => E::Lam(Box::new(shift(b, by, cutoff + 1))),
        E::App(f, a) => E::App(Box::new(shift(f, by, cutoff)), Box::new(shift(a, by, cutoff))),
        E::Rec(g) => E::Rec(Box::new(shift(g, by, cutoff))),
        other => other.clone(),
    }
}

/// `body` with index `depth` replaced by `arg` (closed), indices above it
/// moved down.
fn instantiate(body: &E, arg: &E, depth: usize) -> E {
    match body {
        E::Var(i) if *i == depth => shift(arg, depth, 0),
        E::Var(i) if *i > depth => E::Var(i - 1),
        E::Lam(b) => E::Lam(Box::new(instantiate(b, arg, depth + 1))),
        E::App(f, a) => E::App(Box::new(instantiate(f, arg, depth)), Box::new(instantiate(a, arg, depth))),
        E::Rec(g) => E::Rec(Box::new(instantiate(g, arg, depth))),
        other => other.clone(),
    }
}

/// Weak head forms: numbers carry whether they came from `succ`.
#[derive(Clone, Debug)]
enum Whnf {
    Lam(E),
    Nat(u64, bool),
    Bool(bool),
    /// A primitive waiting for arguments (themselves unevaluated).
    Prim(E, Vec<E>),
}

struct Eval {
    fuel: usize,
}

#[derive(Debug)]
enum Halt {
    Stuck,
    Fuel,
}

impl Eval {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.fuel == 0 {
            return Err(Halt::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn whnf(&mut self, e: &E) -> Result<Whnf, Halt> {
        match e {
            E::Var(_) | E::Bottom => Err(Halt::Stuck),
            E::Lam(b) => Ok(Whnf::Lam((**b).clone())),
            E::Tt => Ok(Whnf::Bool(true)),
            E::Ff => Ok(Whnf::Bool(false)),
            E::Lit(n) => Ok(Whnf::Nat(*n, false)),
            E::Succ | E::Pred | E::Zero | E::Cond => Ok(Whnf::Prim(e.clone(), Vec::new())),
            E::Rec(g) => {
                self.tick()?;
                self.whnf(&E::App(g.clone(), Box::new(e.clone())))
            }
            E::App(f, a) => match self.whnf(f)? {
                Whnf::Lam(body) => {
                    self.tick()?;
                    self.whnf(&instantiate(&body, a, 0))
                }
                Whnf::Prim(p, mut args) => {
                    args.push((**a).clone());
                    self.prim(p, args)
                }
                _ => Err(Halt::Stuck),
            },
        }
    }

    fn nat(&mut self, e: &E) -> Result<(u64, bool), Halt> {
        match self.whnf(e)? {
            Whnf::Nat(n, via) => Ok((n, via)),
            _ => Err(Halt::Stuck),
        }
    }

    fn prim(&mut self, p: E, args: Vec<E>) -> Result<Whnf, Halt> {
        match (&p, args.len()) {
            (E::Succ, 1) => {
                let (n, _) = self.nat(&args[0])?;
                self.tick()?;
                Ok(Whnf::Nat(n + 1, true))
            }
            (E::Pred, 1) => {
                let (n, via) = self.nat(&args[0])?;
                self.tick()?;
                match (n, via) {
                    (0, _) => Ok(Whnf::Nat(0, false)),
                    (n, true) => Ok(Whnf::Nat(n - 1, false)),
                    _ => Err(Halt::Stuck),
                }
            }
            (E::Zero, 1) => {
                let (n, _) = self.nat(&args[0])?;
                self.tick()?;
                Ok(Whnf::Bool(n == 0))
            }
            (E::Cond, 3) => {
                let b = match self.whnf(&args[0])? {
                    Whnf::Bool(b) => b,
                    _ => return Err(Halt::Stuck),
                };
                self.tick()?;
                self.whnf(if b { &args[1] } else { &args[2] })
            }
            _ => Ok(Whnf::Prim(p, args)),
        }
    }
}

/// Evaluates a closed PCF term of sort Nat or Bool with at most `fuel`
/// reduction steps.
pub fn eval(t: &Term, fuel: usize) -> Outcome {
    let mut ev = Eval { fuel };
    match ev.whnf(&import(t)) {
        Ok(Whnf::Nat(n, _)) => Outcome::Value(Value::Nat(n)),
        Ok(Whnf::Bool(b)) => Outcome::Value(Value::Bool(b)),
        Ok(_) => Outcome::Stuck,
        Err(Halt::Stuck) => Outcome::Stuck,
        Err(Halt::Fuel) => Outcome::OutOfFuel,
    }
}

fn value_term(v: &Value) -> Term {
    let pcf = twosig::lang_std::pcf();
    match v {
        Value::Nat(n) => pcf.nat_node("nats", *n),
        Value::Bool(true) => pcf.node("ttt", vec![], vec![]),
        Value::Bool(false) => pcf.node("fff", vec![], vec![]),
    }
}

/// Draws closed PCF programs of sort Nat and Bool (depth at most 5) until
/// `want` of them evaluate within 200 steps, and normalises each
/// leftmost-outermost. Returns (compared, skipped, disagreements).
pub fn compare_random(seed: u64, want: usize) -> (usize, usize, Vec<String>) {
    use twosig::reduction::{normalize, Strategy};
    use twosig::syntax::text::{print_term, Notation};
    use twosig::syntax::{Context, Sort, TermGen};
    let lang = twosig::lang_std::pcf();
    let mut gen = TermGen::new(&lang, seed);
    let sorts = [Sort::constant("Nat"), Sort::constant("Bool")];
    let (mut compared, mut skipped, mut bad) = (0, 0, Vec::new());
    for k in 0..50 * want {
        if compared >= want {
            break;
        }
        let Some(t) = gen.term(&Context::empty(), &sorts[k % 2], 5) else { continue };
        let Outcome::Value(v) = eval(&t, 200) else {
            skipped += 1;
            continue;
        };
        let r = normalize(&lang, &t, 10_000, Strategy::LeftmostOutermost);
        if r.exhausted || r.term != value_term(&v) {
            bad.push(format!(
                "{} gives {} but evaluates to {v:?}",
                print_term(&t, Notation::Plain),
                print_term(&r.term, Notation::Plain)
            ));
        }
        compared += 1;
    }
    (compared, skipped, bad)
}

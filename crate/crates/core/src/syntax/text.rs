//! Concrete syntax for terms and sorts.
//!
//! Plain notation is an s-expression format:
//!
//! ```text
//! (con NAME [SORT ...] {NAT} CHILD ...)     the `con` keyword is optional
//! #k                                        de Bruijn index, 0 = innermost
//! NAME                                      nullary constructor
//! a · b   or   a @ b                        the `app` arity, left-associative
//! Nats(3)                                   nat payload shorthand
//! ```
//!
//! Sorts are prefix terms: `Nat`, `(~> Nat Bool)`. Sort arguments may be
//! omitted wherever they follow from the children or the expected sort.
//!
//! Paper notation uses capitalized constructor names applied by
//! juxtaposition, infix `@` for application, and 1-based indices:
//! `Abs (Abs (2 @ 1))`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{eval_sort_expr, match_sort_expr, typecheck, Context, Node, Scope, Sort, Term, TypeError};
use crate::signature::{Language, SortSignature, TermAritySpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Notation {
    #[default]
    Plain,
    Paper,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: {message}")]
    Elab { line: usize, col: usize, message: String },
    #[error("ill-typed term: {0}")]
    Type(#[from] TypeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    App,
    Hash(usize),
    Num(u64),
    Name(String),
    Eof,
}

fn is_symbol(c: char) -> bool {
    "~><*+-=!&|^%$?".contains(c)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, TextError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '@' | '·' => Tok::App,
            '#' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(TextError::Syntax { line, col, message: "expected digits after `#`".into() });
                }
                let n: String = chars[i + 1..j].iter().collect();
                i = j - 1;
                Tok::Hash(n.parse().map_err(|_| TextError::Syntax { line, col, message: "index too large".into() })?)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let n: String = chars[i..j].iter().collect();
                i = j - 1;
                Tok::Num(n.parse().map_err(|_| TextError::Syntax { line, col, message: "number too large".into() })?)
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident(chars[j]) {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                i = j - 1;
                Tok::Name(s)
            }
            c if is_symbol(c) => {
                let mut j = i;
                while j < chars.len() && is_symbol(chars[j]) {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                i = j - 1;
                Tok::Name(s)
            }
            other => return Err(TextError::Syntax { line, col, message: format!("unexpected character `{other}`") }),
        };
        i += 1;
        col += i - start;
        out.push((tok, pos));
    }
    let end = Pos { line, col };
    out.push((Tok::Eof, end));
    Ok(out)
}

/// Parsed but not yet sort-checked term.
#[derive(Clone, Debug)]
enum Raw {
    Var(usize, Pos),
    Node { name: String, sorts: Option<Vec<RawSort>>, nat: Option<u64>, children: Vec<Raw>, pos: Pos },
    App(Box<Raw>, Box<Raw>, Pos),
}

#[derive(Clone, Debug)]
struct RawSort {
    con: String,
    args: Vec<RawSort>,
}

impl RawSort {
    fn into_sort(self, sorts: &SortSignature) -> Result<Sort, String> {
        let s = self.lower();
        s.check(sorts).map_err(|e| e.to_string())?;
        Ok(s)
    }

    fn lower(self) -> Sort {
        Sort::new(self.con.as_str(), self.args.into_iter().map(RawSort::lower).collect())
    }
}

struct Parser<'t> {
    toks: &'t [(Tok, Pos)],
    at: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, TextError> {
        let p = self.pos();
        Err(TextError::Syntax { line: p.line, col: p.col, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), TextError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn sort(&mut self) -> Result<RawSort, TextError> {
        match self.bump() {
            Tok::Name(n) => Ok(RawSort { con: n, args: Vec::new() }),
            Tok::LParen => {
                let Tok::Name(con) = self.bump() else {
                    return self.err("expected a sort constructor");
                };
                let mut args = Vec::new();
                while !matches!(self.peek(), Tok::RParen) {
                    if matches!(self.peek(), Tok::Comma) {
                        self.bump();
                        continue;
                    }
                    args.push(self.sort()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(RawSort { con, args })
            }
            other => {
                self.at -= 1;
                self.err(format!("expected a sort, found {}", describe(&other)))
            }
        }
    }

    // ---- plain notation ----

    fn plain_expr(&mut self) -> Result<Raw, TextError> {
        let mut lhs = self.plain_atom()?;
        while matches!(self.peek(), Tok::App) {
            let pos = self.pos();
            self.bump();
            let rhs = self.plain_atom()?;
            lhs = Raw::App(Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn nat_sugar(&mut self) -> Option<u64> {
        if let (Tok::LParen, Tok::Num(n), Tok::RParen) = (self.peek(), self.peek_at(1), self.peek_at(2)) {
            let n = *n;
            self.bump();
            self.bump();
            self.bump();
            Some(n)
        } else {
            None
        }
    }

    fn plain_atom(&mut self) -> Result<Raw, TextError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Hash(i) => {
                self.bump();
                Ok(Raw::Var(i, pos))
            }
            Tok::Name(name) => {
                self.bump();
                let nat = self.nat_sugar();
                Ok(Raw::Node { name, sorts: None, nat, children: Vec::new(), pos })
            }
            Tok::LParen => {
                self.bump();
                let inner = if matches!(self.peek(), Tok::Name(_)) {
                    let head = self.plain_node()?;
                    let mut lhs = head;
                    while matches!(self.peek(), Tok::App) {
                        let pos = self.pos();
                        self.bump();
                        let rhs = self.plain_atom()?;
                        lhs = Raw::App(Box::new(lhs), Box::new(rhs), pos);
                    }
                    lhs
                } else {
                    self.plain_expr()?
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => self.err(format!("expected a term, found {}", describe(&other))),
        }
    }

    /// After `(`: optional `con`, a name, sorts, payload and children.
    fn plain_node(&mut self) -> Result<Raw, TextError> {
        let pos = self.pos();
        let Tok::Name(mut name) = self.bump() else { unreachable!() };
        if name == "con" {
            if let Tok::Name(n) = self.peek().clone() {
                self.bump();
                name = n;
            }
        }
        let mut sorts = None;
        if matches!(self.peek(), Tok::LBrack) {
            self.bump();
            let mut v = Vec::new();
            while !matches!(self.peek(), Tok::RBrack) {
                if matches!(self.peek(), Tok::Comma) {
                    self.bump();
                    continue;
                }
                if matches!(self.peek(), Tok::Eof) {
                    return self.err("unterminated sort list");
                }
                v.push(self.sort()?);
            }
            self.bump();
            sorts = Some(v);
        }
        let mut nat = self.nat_sugar();
        if matches!(self.peek(), Tok::LBrace) {
            self.bump();
            match self.bump() {
                Tok::Num(n) => nat = Some(n),
                _ => {
                    self.at -= 1;
                    return self.err("expected a natural number");
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
        }
        let mut children = Vec::new();
        while matches!(self.peek(), Tok::Hash(_) | Tok::Name(_) | Tok::LParen) {
            children.push(self.plain_atom()?);
        }
        Ok(Raw::Node { name, sorts, nat, children, pos })
    }

    // ---- paper notation ----

    fn paper_expr(&mut self, lang: &Language) -> Result<Raw, TextError> {
        let mut lhs = self.paper_app_term(lang)?;
        while matches!(self.peek(), Tok::App) {
            let pos = self.pos();
            self.bump();
            let rhs = self.paper_app_term(lang)?;
            lhs = Raw::App(Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn paper_app_term(&mut self, lang: &Language) -> Result<Raw, TextError> {
        if let Tok::Name(name) = self.peek().clone() {
            let pos = self.pos();
            let spec = resolve_arity(lang, &name).map_err(|m| TextError::Syntax {
                line: pos.line,
                col: pos.col,
                message: m,
            })?;
            self.bump();
            let nat = if spec.nat_indexed {
                match self.bump() {
                    Tok::Num(n) => Some(n),
                    _ => {
                        self.at -= 1;
                        return self.err(format!("`{name}` expects a natural number"));
                    }
                }
            } else {
                None
            };
            let mut children = Vec::new();
            for _ in 0..spec.args.len() {
                children.push(self.paper_atom(lang)?);
            }
            return Ok(Raw::Node { name, sorts: None, nat, children, pos });
        }
        self.paper_atom(lang)
    }

    fn paper_atom(&mut self, lang: &Language) -> Result<Raw, TextError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(0) => self.err("paper notation indices start at 1"),
            Tok::Num(n) => {
                self.bump();
                Ok(Raw::Var(n as usize - 1, pos))
            }
            Tok::Name(name) => {
                let spec = resolve_arity(lang, &name).map_err(|m| TextError::Syntax {
                    line: pos.line,
                    col: pos.col,
                    message: m,
                })?;
                if !spec.args.is_empty() || spec.nat_indexed {
                    return self.err(format!("`{name}` takes arguments; parenthesize it"));
                }
                self.bump();
                Ok(Raw::Node { name, sorts: None, nat: None, children: Vec::new(), pos })
            }
            Tok::LParen => {
                self.bump();
                let e = self.paper_expr(lang)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => self.err(format!("expected a term, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::App => "application operator".into(),
        Tok::Hash(i) => format!("`#{i}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Name(n) => format!("`{n}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Exact name, else the unique case-insensitive match.
fn resolve_arity<'l>(lang: &'l Language, name: &str) -> Result<&'l TermAritySpec, String> {
    if let Some(a) = lang.arity(name) {
        return Ok(a);
    }
    let mut hits = lang.arities().iter().filter(|a| a.name.eq_ignore_ascii_case(name));
    match (hits.next(), hits.next()) {
        (Some(a), None) => Ok(a),
        (Some(_), Some(_)) => Err(format!("ambiguous constructor name `{name}`")),
        _ => Err(format!("unknown constructor `{name}`")),
    }
}

fn raw_pos(r: &Raw) -> Pos {
    match r {
        Raw::Var(_, p) | Raw::App(_, _, p) => *p,
        Raw::Node { pos, .. } => *pos,
    }
}

enum ElabFail {
    /// Not enough information yet; retry once more sorts are known.
    CannotInfer(TextError),
    Hard(TextError),
}

fn elab_err(pos: Pos, message: impl Into<String>) -> ElabFail {
    ElabFail::Hard(TextError::Elab { line: pos.line, col: pos.col, message: message.into() })
}

/// Bidirectional elaboration: fills in omitted sort arguments from the
/// children's sorts and, in checking mode, from the expected sort.
fn elaborate(lang: &Language, ctx: &Context, raw: &Raw, expected: Option<&Sort>) -> Result<(Term, Sort), ElabFail> {
    match raw {
        Raw::Var(i, pos) => {
            let s = ctx
                .get(*i)
                .cloned()
                .ok_or_else(|| elab_err(*pos, format!("unbound index #{i} in a context of length {}", ctx.len())))?;
            if let Some(e) = expected {
                if e != &s {
                    return Err(elab_err(*pos, format!("variable #{i} has sort {s}, expected {e}")));
                }
            }
            Ok((Term::Var(*i), s))
        }
        Raw::App(f, a, pos) => {
            let node = Raw::Node {
                name: "app".into(),
                sorts: None,
                nat: None,
                children: vec![(**f).clone(), (**a).clone()],
                pos: *pos,
            };
            if lang.arity("app").is_none() {
                return Err(elab_err(*pos, "this signature has no `app` arity"));
            }
            elaborate(lang, ctx, &node, expected)
        }
        Raw::Node { name, sorts, nat, children, pos } => {
            let spec = resolve_arity(lang, name).map_err(|m| elab_err(*pos, m))?;
            if spec.args.len() != children.len() {
                return Err(elab_err(
                    *pos,
                    format!("`{}` expects {} children, got {}", spec.name, spec.args.len(), children.len()),
                ));
            }
            match (spec.nat_indexed, nat) {
                (true, None) => return Err(elab_err(*pos, format!("`{}` needs a nat payload", spec.name))),
                (false, Some(_)) => return Err(elab_err(*pos, format!("`{}` takes no nat payload", spec.name))),
                _ => {}
            }
            let mut assignment: Vec<Option<Sort>> = vec![None; spec.degree];
            if let Some(given) = sorts {
                if given.len() != spec.degree {
                    return Err(elab_err(
                        *pos,
                        format!("`{}` expects {} sort arguments, got {}", spec.name, spec.degree, given.len()),
                    ));
                }
                for (slot, s) in assignment.iter_mut().zip(given) {
                    *slot = Some(s.clone().into_sort(lang.sorts()).map_err(|m| elab_err(*pos, m))?);
                }
            }
            if let Some(e) = expected {
                if !match_sort_expr(&spec.result, e, &mut assignment) {
                    return Err(elab_err(*pos, format!("`{}` cannot have sort {e}", spec.name)));
                }
            }
            let known = |a: &[Option<Sort>], e: &crate::signature::SortExpr| -> Option<Sort> {
                let full: Option<Vec<Sort>> = a.iter().cloned().collect();
                match full {
                    Some(full) => eval_sort_expr(e, &full).ok(),
                    None => {
                        let mut vars = std::collections::BTreeSet::new();
                        e.collect_vars(&mut vars);
                        if vars.iter().all(|&v| a.get(v - 1).is_some_and(|s| s.is_some())) {
                            let filled: Vec<Sort> =
                                a.iter().map(|s| s.clone().unwrap_or_else(|| Sort::constant("?"))).collect();
                            eval_sort_expr(e, &filled).ok()
                        } else {
                            None
                        }
                    }
                }
            };
            let mut done: Vec<Option<Term>> = vec![None; children.len()];
            let mut last_err = None;
            loop {
                let mut progress = false;
                for (k, (arg, child)) in spec.args.iter().zip(children).enumerate() {
                    if done[k].is_some() {
                        continue;
                    }
                    let binders: Option<Vec<Sort>> = arg.binders.iter().map(|b| known(&assignment, b)).collect();
                    let Some(binders) = binders else { continue };
                    let inner = ctx.extend(&binders);
                    let want = known(&assignment, &arg.body);
                    match elaborate(lang, &inner, child, want.as_ref()) {
                        Ok((t, s)) => {
                            if want.is_none() && !match_sort_expr(&arg.body, &s, &mut assignment) {
                                return Err(elab_err(
                                    raw_pos(child),
                                    format!("child {k} of `{}` has sort {s}, which does not fit", spec.name),
                                ));
                            }
                            done[k] = Some(t);
                            progress = true;
                        }
                        Err(ElabFail::CannotInfer(e)) => last_err = Some(e),
                        Err(hard) => return Err(hard),
                    }
                }
                if !progress {
                    break;
                }
            }
            if done.iter().any(Option::is_none) || assignment.iter().any(Option::is_none) {
                let e = last_err.unwrap_or(TextError::Elab {
                    line: pos.line,
                    col: pos.col,
                    message: format!("cannot infer the sort arguments of `{}`; give them explicitly", spec.name),
                });
                return Err(ElabFail::CannotInfer(e));
            }
            let sorts: Vec<Sort> = assignment.into_iter().map(|s| s.expect("checked")).collect();
            let result = eval_sort_expr(&spec.result, &sorts).map_err(|e| elab_err(*pos, e.to_string()))?;
            if let Some(e) = expected {
                if e != &result {
                    return Err(elab_err(*pos, format!("expected sort {e}, found {result}")));
                }
            }
            let term = Term::Con(Node {
                arity: spec.name.clone(),
                sorts,
                nat: *nat,
                children: spec
                    .args
                    .iter()
                    .zip(done)
                    .map(|(a, t)| Scope { binders: a.binders.len(), body: t.expect("checked") })
                    .collect(),
            });
            Ok((term, result))
        }
    }
}

/// Parses and typechecks a term in `ctx`.
pub fn parse_term(lang: &Language, ctx: &Context, text: &str, notation: Notation) -> Result<Term, TextError> {
    parse_term_sorted(lang, ctx, text, notation, None).map(|(t, _)| t)
}

/// Like [`parse_term`], optionally checking against an expected sort, and
/// returning the sort.
pub fn parse_term_sorted(
    lang: &Language,
    ctx: &Context,
    text: &str,
    notation: Notation,
    expected: Option<&Sort>,
) -> Result<(Term, Sort), TextError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, at: 0 };
    let raw = match notation {
        Notation::Plain => p.plain_expr()?,
        Notation::Paper => p.paper_expr(lang)?,
    };
    if !matches!(p.peek(), Tok::Eof) {
        return p.err(format!("unexpected {} after the term", describe(p.peek())));
    }
    let (term, sort) = elaborate(lang, ctx, &raw, expected).map_err(|e| match e {
        ElabFail::CannotInfer(e) | ElabFail::Hard(e) => e,
    })?;
    // the elaborator builds well-typed terms; this is a cheap double check
    let checked = typecheck(lang, ctx, &term)?;
    debug_assert_eq!(checked, sort);
    Ok((term, sort))
}

/// Parses a sort in prefix notation, e.g. `(~> Nat Bool)`.
pub fn parse_sort(sorts: &SortSignature, text: &str) -> Result<Sort, TextError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, at: 0 };
    let raw = p.sort()?;
    if !matches!(p.peek(), Tok::Eof) {
        return p.err(format!("unexpected {} after the sort", describe(p.peek())));
    }
    raw.into_sort(sorts).map_err(|m| TextError::Elab { line: 1, col: 1, message: m })
}

/// Parses a comma-separated list of sorts; the first entry is index 0.
pub fn parse_context(sorts: &SortSignature, text: &str) -> Result<Context, TextError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, at: 0 };
    let mut v = Vec::new();
    while !matches!(p.peek(), Tok::Eof) {
        if matches!(p.peek(), Tok::Comma) {
            p.bump();
            continue;
        }
        let pos = p.pos();
        let raw = p.sort()?;
        v.push(raw.into_sort(sorts).map_err(|m| TextError::Elab { line: pos.line, col: pos.col, message: m })?);
    }
    Ok(Context::from_innermost(v))
}

pub fn print_term(term: &Term, notation: Notation) -> String {
    let mut out = String::new();
    match notation {
        Notation::Plain => plain(term, &mut out),
        Notation::Paper => paper(term, PaperPos::Top, &mut out),
    }
    out
}

fn plain(term: &Term, out: &mut String) {
    match term {
        Term::Var(i) => {
            let _ = write!(out, "#{i}");
        }
        Term::Con(n) if n.sorts.is_empty() && n.nat.is_none() && n.children.is_empty() => out.push_str(&n.arity),
        Term::Con(n) => {
            out.push('(');
            out.push_str(&n.arity);
            if !n.sorts.is_empty() {
                out.push_str(" [");
                for (k, s) in n.sorts.iter().enumerate() {
                    if k > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{s}");
                }
                out.push(']');
            }
            if let Some(k) = n.nat {
                let _ = write!(out, " {{{k}}}");
            }
            for c in &n.children {
                out.push(' ');
                plain(&c.body, out);
            }
            out.push(')');
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PaperPos {
    Top,
    Left,
    Right,
    Arg,
}

fn is_app(n: &Node) -> bool {
    &*n.arity == "app" && n.children.len() == 2 && n.children.iter().all(|c| c.binders == 0)
}

fn display_name(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn paper(term: &Term, pos: PaperPos, out: &mut String) {
    match term {
        Term::Var(i) => {
            let _ = write!(out, "{}", i + 1);
        }
        Term::Con(n) if is_app(n) => {
            let wrap = matches!(pos, PaperPos::Right | PaperPos::Arg);
            if wrap {
                out.push('(');
            }
            paper(&n.children[0].body, PaperPos::Left, out);
            out.push_str(" @ ");
            paper(&n.children[1].body, PaperPos::Right, out);
            if wrap {
                out.push(')');
            }
        }
        Term::Con(n) if n.children.is_empty() && n.nat.is_none() => out.push_str(&display_name(&n.arity)),
        Term::Con(n) => {
            let wrap = pos == PaperPos::Arg;
            if wrap {
                out.push('(');
            }
            out.push_str(&display_name(&n.arity));
            if let Some(k) = n.nat {
                let _ = write!(out, " {k}");
            }
            for c in &n.children {
                out.push(' ');
                paper(&c.body, PaperPos::Arg, out);
            }
            if wrap {
                out.push(')');
            }
        }
    }
}

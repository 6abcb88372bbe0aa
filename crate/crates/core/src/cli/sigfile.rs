//! Text format for 2-signatures.
//!
//! ```text
//! sorts { Nat/0; ~>/2; }
//! terms {
//!   abs [deg 2] : (bind [1]. 2) -> ~>(1, 2);
//!   nats [deg 0, nat-indexed] : -> Nat;
//! }
//! rules {
//!   beta [deg 2] { M : bind[1].2; N : 1 } : app(abs(M), N) => M[N];
//!   succ_red [deg 0] { n : nat } : app(succ(), nats(nat:n)) => nats(nat:n+1);
//! }
//! ```
//!
//! Sort expressions are degree variables (numbers), constants (`Nat` or
//! `Nat()`), prefix applications `~>(1, 2)`, or infix applications of a
//! binary symbolic constructor, `1 ~> 2`, which associate to the right.
//! `//` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::signature::{
    validate_signature, ArgSpec, Name, NatPattern, RuleTemplate, SortExpr, SortSignature, TemplateTerm, TermAritySpec,
    TwoSignature,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigDiagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for SigDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigErrors(pub Vec<SigDiagnostic>);

impl fmt::Display for SigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for SigErrors {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Num(u64),
    Sym(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of file"),
        }
    }
}

const SYMBOL_CHARS: &str = "~><*+-=!&|^%$?";
const PUNCT: &str = "{}[]();:,./";

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, SigDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump(c, &mut line, &mut col);
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
                col += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| SigDiagnostic {
                line: l0,
                col: c0,
                message: format!("number too large: {s}"),
            })?;
            out.push((Tok::Num(n), l0, c0));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            // `-` joins words so that `nat-indexed` is one token
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || chars[i] == '_'
                    || chars[i] == '\''
                    || (chars[i] == '-' && chars.get(i + 1).is_some_and(|d| d.is_alphabetic())))
            {
                i += 1;
                col += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), l0, c0));
        } else if SYMBOL_CHARS.contains(c) {
            let start = i;
            while i < chars.len() && SYMBOL_CHARS.contains(chars[i]) {
                i += 1;
                col += 1;
            }
            out.push((Tok::Sym(chars[start..i].iter().collect()), l0, c0));
        } else if PUNCT.contains(c) {
            out.push((Tok::Punct(c), l0, c0));
            i += 1;
            col += 1;
        } else {
            return Err(SigDiagnostic { line: l0, col: c0, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    /// Sort constructors declared so far, for infix parsing.
    sorts: BTreeMap<Name, usize>,
}

type P<T> = Result<T, SigDiagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> P<T> {
        let (line, col) = self.here();
        Err(SigDiagnostic { line, col, message: message.into() })
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Name(x) if x == w)
    }

    fn punct(&mut self, c: char) -> P<()> {
        if self.is_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found {}", self.peek()))
        }
    }

    fn sym(&mut self, s: &str) -> P<()> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    fn word(&mut self, w: &str) -> P<()> {
        if self.is_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {}", self.peek()))
        }
    }

    fn number(&mut self) -> P<u64> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(n)
            }
            t => self.err(format!("expected a number, found {t}")),
        }
    }

    fn name(&mut self) -> P<String> {
        match self.peek().clone() {
            Tok::Name(s) => {
                self.pos += 1;
                Ok(s)
            }
            t => self.err(format!("expected a name, found {t}")),
        }
    }

    /// Sort constructor names may be symbolic (`~>`, `*`).
    fn sort_name(&mut self) -> P<String> {
        match self.peek().clone() {
            Tok::Name(s) | Tok::Sym(s) => {
                self.pos += 1;
                Ok(s)
            }
            t => self.err(format!("expected a sort name, found {t}")),
        }
    }

    fn degree(&mut self) -> P<usize> {
        self.word("deg")?;
        Ok(self.number()? as usize)
    }

    fn file(&mut self) -> P<(TwoSignature, Vec<Item>)> {
        let mut items = Vec::new();
        self.word("sorts")?;
        self.punct('{')?;
        while !self.is_punct('}') {
            let (line, col) = self.here();
            let name = self.sort_name()?;
            self.punct('/')?;
            let arity = self.number()? as usize;
            self.punct(';')?;
            if self.sorts.insert(name.as_str().into(), arity).is_some() {
                return Err(SigDiagnostic { line, col, message: format!("duplicate sort `{name}`") });
            }
        }
        self.punct('}')?;

        let mut arities = Vec::new();
        self.word("terms")?;
        self.punct('{')?;
        while !self.is_punct('}') {
            let (line, col) = self.here();
            let a = self.arity()?;
            items.push(Item { kind: "arity", name: a.name.to_string(), line, col });
            arities.push(a);
        }
        self.punct('}')?;

        let mut rules = Vec::new();
        self.word("rules")?;
        self.punct('{')?;
        while !self.is_punct('}') {
            let (line, col) = self.here();
            let r = self.rule()?;
            items.push(Item { kind: "rule", name: r.name.to_string(), line, col });
            rules.push(r);
        }
        self.punct('}')?;
        if *self.peek() != Tok::Eof {
            return self.err(format!("expected end of file, found {}", self.peek()));
        }
        let sorts = SortSignature { constructors: self.sorts.clone() };
        Ok((TwoSignature { sorts, arities, rules }, items))
    }

    fn arity(&mut self) -> P<TermAritySpec> {
        let name = self.name()?;
        self.punct('[')?;
        let degree = self.degree()?;
        let mut nat_indexed = false;
        if self.is_punct(',') {
            self.pos += 1;
            self.word("nat-indexed")?;
            nat_indexed = true;
        }
        self.punct(']')?;
        self.punct(':')?;
        let mut args = Vec::new();
        if !self.is_sym("->") {
            args.push(self.argspec()?);
            while self.is_punct(',') {
                self.pos += 1;
                args.push(self.argspec()?);
            }
        }
        self.sym("->")?;
        let result = self.sort_expr()?;
        self.punct(';')?;
        Ok(TermAritySpec { name: name.into(), degree, args, result, nat_indexed })
    }

    fn argspec(&mut self) -> P<ArgSpec> {
        if self.is_punct('(') && matches!(self.peek_at(1), Tok::Name(w) if w == "bind") {
            self.pos += 1;
            let a = self.binding()?;
            self.punct(')')?;
            return Ok(a);
        }
        if self.is_word("bind") {
            return self.binding();
        }
        Ok(ArgSpec::plain(self.sort_expr()?))
    }

    fn binding(&mut self) -> P<ArgSpec> {
        self.word("bind")?;
        self.punct('[')?;
        let mut binders = Vec::new();
        if !self.is_punct(']') {
            binders.push(self.sort_expr()?);
            while self.is_punct(',') {
                self.pos += 1;
                binders.push(self.sort_expr()?);
            }
        }
        self.punct(']')?;
        self.punct('.')?;
        Ok(ArgSpec::binding(binders, self.sort_expr()?))
    }

    fn sort_expr(&mut self) -> P<SortExpr> {
        let head = self.sort_atom()?;
        if let Tok::Sym(s) = self.peek().clone() {
            if s != "->" && s != "=>" && self.sorts.get(s.as_str()) == Some(&2) {
                self.pos += 1;
                let rest = self.sort_expr()?;
                return Ok(SortExpr::con(s.as_str(), vec![head, rest]));
            }
        }
        Ok(head)
    }

    fn sort_atom(&mut self) -> P<SortExpr> {
        if let Tok::Num(n) = self.peek() {
            let n = *n as usize;
            self.pos += 1;
            return Ok(SortExpr::var(n));
        }
        if self.is_punct('(') {
            self.pos += 1;
            let e = self.sort_expr()?;
            self.punct(')')?;
            return Ok(e);
        }
        let (line, col) = self.here();
        let name = self.sort_name()?;
        let mut args = Vec::new();
        if self.is_punct('(') {
            self.pos += 1;
            if !self.is_punct(')') {
                args.push(self.sort_expr()?);
                while self.is_punct(',') {
                    self.pos += 1;
                    args.push(self.sort_expr()?);
                }
            }
            self.punct(')')?;
        }
        match self.sorts.get(name.as_str()) {
            None => Err(SigDiagnostic { line, col, message: format!("unknown sort `{name}`") }),
            Some(&n) if n != args.len() => Err(SigDiagnostic {
                line,
                col,
                message: format!("sort `{name}` takes {n} arguments, given {}", args.len()),
            }),
            Some(_) => Ok(SortExpr::con(name.as_str(), args)),
        }
    }

    fn rule(&mut self) -> P<RuleTemplate> {
        let name = self.name()?;
        self.punct('[')?;
        let degree = self.degree()?;
        self.punct(']')?;
        self.punct('{')?;
        let mut metavars = BTreeMap::new();
        let mut natvars = BTreeSet::new();
        while !self.is_punct('}') {
            let (line, col) = self.here();
            let m = self.name()?;
            self.punct(':')?;
            let fresh = if self.is_word("nat") && !matches!(self.peek_at(1), Tok::Punct('(')) {
                self.pos += 1;
                natvars.insert(Name::from(m.as_str()))
            } else {
                let spec = self.argspec()?;
                metavars.insert(Name::from(m.as_str()), spec).is_none()
            };
            if !fresh || (metavars.contains_key(m.as_str()) && natvars.contains(m.as_str())) {
                return Err(SigDiagnostic { line, col, message: format!("`{m}` declared twice") });
            }
            if self.is_punct(';') || self.is_punct(',') {
                self.pos += 1;
            } else if !self.is_punct('}') {
                return self.err(format!("expected `;` or `}}`, found {}", self.peek()));
            }
        }
        self.punct('}')?;
        self.punct(':')?;
        let lhs = self.template(&metavars)?;
        self.sym("=>")?;
        let rhs = self.template(&metavars)?;
        self.punct(';')?;
        Ok(RuleTemplate { name: name.into(), degree, metavars, natvars, lhs, rhs })
    }

    fn template(&mut self, metas: &BTreeMap<Name, ArgSpec>) -> P<TemplateTerm> {
        let mut t = self.template_atom(metas)?;
        while self.is_punct('[') {
            self.pos += 1;
            let arg = self.template(metas)?;
            self.punct(']')?;
            t = TemplateTerm::subst1(t, arg);
        }
        Ok(t)
    }

    fn template_atom(&mut self, metas: &BTreeMap<Name, ArgSpec>) -> P<TemplateTerm> {
        let (line, col) = self.here();
        let name = self.name()?;
        if !self.is_punct('(') {
            if metas.contains_key(name.as_str()) {
                return Ok(TemplateTerm::meta(name.as_str()));
            }
            return Err(SigDiagnostic {
                line,
                col,
                message: format!("`{name}` is not a declared metavariable; write `{name}()` for a constructor"),
            });
        }
        self.pos += 1;
        let mut nat = None;
        let mut children = Vec::new();
        let mut first = true;
        while !self.is_punct(')') {
            if !first {
                self.punct(',')?;
            }
            first = false;
            if self.is_word("nat") && matches!(self.peek_at(1), Tok::Punct(':')) {
                self.pos += 2;
                if nat.is_some() {
                    return self.err("more than one nat pattern");
                }
                nat = Some(self.nat_pattern()?);
            } else {
                children.push(self.template(metas)?);
            }
        }
        self.punct(')')?;
        Ok(TemplateTerm::Con { arity: name.into(), nat, children })
    }

    fn nat_pattern(&mut self) -> P<NatPattern> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.pos += 1;
                Ok(NatPattern::Zero)
            }
            Tok::Num(k) => {
                self.pos += 1;
                Ok(NatPattern::Const(k))
            }
            Tok::Name(s) if s == "S" && matches!(self.peek_at(1), Tok::Punct('(')) => {
                self.pos += 2;
                let v = self.name()?;
                self.punct(')')?;
                Ok(NatPattern::Succ(v.into()))
            }
            Tok::Name(v) => {
                self.pos += 1;
                if self.is_sym("+") {
                    self.pos += 1;
                    let one = self.number()?;
                    if one != 1 {
                        return self.err("only `+1` is supported");
                    }
                    return Ok(NatPattern::Plus1(v.into()));
                }
                Ok(NatPattern::Var(v.into()))
            }
            t => self.err(format!("expected a nat pattern, found {t}")),
        }
    }
}

struct Item {
    kind: &'static str,
    name: String,
    line: usize,
    col: usize,
}

/// Parses and validates a signature file. Validation problems are reported
/// at the declaration they concern.
pub fn parse_signature(text: &str) -> Result<TwoSignature, SigErrors> {
    let toks = lex(text).map_err(|d| SigErrors(vec![d]))?;
    let mut p = Parser { toks, pos: 0, sorts: BTreeMap::new() };
    let (sig, items) = p.file().map_err(|d| SigErrors(vec![d]))?;
    let report = validate_signature(&sig);
    if report.is_ok() {
        return Ok(sig);
    }
    let diags = report
        .diagnostics
        .iter()
        .map(|d| {
            let at = items.iter().find(|it| d.location.starts_with(&format!("{} `{}`", it.kind, it.name)));
            let (line, col) = at.map_or((1, 1), |it| (it.line, it.col));
            SigDiagnostic { line, col, message: format!("{}: {}", d.location, d.message) }
        })
        .collect();
    Err(SigErrors(diags))
}

fn sort_text(e: &SortExpr) -> String {
    match e {
        SortExpr::Var(i) => i.to_string(),
        SortExpr::Con(n, args) if args.is_empty() => n.to_string(),
        SortExpr::Con(n, args) if args.len() == 2 && !n.starts_with(char::is_alphanumeric) => {
            let left = match &args[0] {
                SortExpr::Con(m, a) if a.len() == 2 && !m.starts_with(char::is_alphanumeric) => {
                    format!("({})", sort_text(&args[0]))
                }
                _ => sort_text(&args[0]),
            };
            format!("{left} {n} {}", sort_text(&args[1]))
        }
        SortExpr::Con(n, args) => {
            format!("{n}({})", args.iter().map(sort_text).collect::<Vec<_>>().join(", "))
        }
    }
}

fn arg_text(a: &ArgSpec) -> String {
    if a.binders.is_empty() {
        return sort_text(&a.body);
    }
    let bs: Vec<String> = a.binders.iter().map(sort_text).collect();
    format!("(bind [{}]. {})", bs.join(", "), sort_text(&a.body))
}

/// Renders `sig` in the format read by [`parse_signature`].
pub fn print_signature(sig: &TwoSignature) -> String {
    let s = &sig.sorts;
    let mut out = String::from("sorts {\n");
    for (n, a) in &s.constructors {
        out += &format!("  {n}/{a};\n");
    }
    out += "}\n\nterms {\n";
    for a in &sig.arities {
        let tag = if a.nat_indexed { ", nat-indexed" } else { "" };
        let args: Vec<String> = a.args.iter().map(arg_text).collect();
        let sep = if args.is_empty() { "" } else { " " };
        out +=
            &format!("  {} [deg {}{tag}] : {}{sep}-> {};\n", a.name, a.degree, args.join(", "), sort_text(&a.result));
    }
    out += "}\n\nrules {\n";
    for r in &sig.rules {
        let mut decls: Vec<String> = r.metavars.iter().map(|(m, a)| format!("{m} : {}", arg_text(a))).collect();
        decls.extend(r.natvars.iter().map(|v| format!("{v} : nat")));
        let decls = if decls.is_empty() { "{}".to_string() } else { format!("{{ {} }}", decls.join("; ")) };
        out += &format!("  {} [deg {}] {decls} :\n    {} => {};\n", r.name, r.degree, r.lhs, r.rhs);
    }
    out += "}\n";
    out
}

//! 2-signatures: sort signatures, term arities of degree n, and reduction
//! rules written as templates over metavariables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Interned-ish name used for sort constructors, arities, rules and metavariables.
pub type Name = Arc<str>;

/// Sort constructors and their arity counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortSignature {
    pub constructors: BTreeMap<Name, usize>,
}

impl SortSignature {
    pub fn new<N: Into<Name>>(constructors: impl IntoIterator<Item = (N, usize)>) -> Self {
        SortSignature { constructors: constructors.into_iter().map(|(n, a)| (n.into(), a)).collect() }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.constructors.get(name).copied()
    }

    /// Whether closed sorts exist at all.
    pub fn has_constant(&self) -> bool {
        self.constructors.values().any(|&a| a == 0)
    }
}

/// A sort expression of some degree n: degree variables `1..=n` and sort
/// constructors applied to sort expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SortExpr {
    /// 1-based degree variable.
    Var(usize),
    Con(Name, Vec<SortExpr>),
}

impl SortExpr {
    pub fn var(index: usize) -> Self {
        SortExpr::Var(index)
    }

    pub fn con(name: impl Into<Name>, args: Vec<SortExpr>) -> Self {
        SortExpr::Con(name.into(), args)
    }

    pub fn constant(name: impl Into<Name>) -> Self {
        SortExpr::Con(name.into(), Vec::new())
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            SortExpr::Var(i) => {
                out.insert(*i);
            }
            SortExpr::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

impl fmt::Display for SortExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortExpr::Var(i) => write!(f, "{i}"),
            SortExpr::Con(name, args) if args.is_empty() => write!(f, "{name}"),
            SortExpr::Con(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// One argument slot of an arity: the sorts it binds and the sort of its body.
///
/// Binders are pushed in order, so the last binder is the innermost variable
/// (de Bruijn index 0) inside the body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgSpec {
    pub binders: Vec<SortExpr>,
    pub body: SortExpr,
}

impl ArgSpec {
    pub fn plain(body: SortExpr) -> Self {
        ArgSpec { binders: Vec::new(), body }
    }

    pub fn binding(binders: Vec<SortExpr>, body: SortExpr) -> Self {
        ArgSpec { binders, body }
    }
}

/// A classic arity of degree n, `[(binders_i, body_i)] -> result`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermAritySpec {
    pub name: Name,
    pub degree: usize,
    pub args: Vec<ArgSpec>,
    pub result: SortExpr,
    /// The constructor carries a natural-number literal instead of children.
    pub nat_indexed: bool,
}

impl TermAritySpec {
    pub fn new(name: impl Into<Name>, degree: usize, args: Vec<ArgSpec>, result: SortExpr) -> Self {
        TermAritySpec { name: name.into(), degree, args, result, nat_indexed: false }
    }

    pub fn nat_indexed(name: impl Into<Name>, result: SortExpr) -> Self {
        TermAritySpec { name: name.into(), degree: 0, args: Vec::new(), result, nat_indexed: true }
    }
}

/// Literal patterns for the payload of a nat-indexed constructor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NatPattern {
    Zero,
    /// Matches `k + 1`, binding the variable to `k`.
    Succ(Name),
    Var(Name),
    /// Evaluates to the variable plus one; matches like `Succ`.
    Plus1(Name),
    Const(u64),
}

impl NatPattern {
    pub fn var_name(&self) -> Option<&Name> {
        match self {
            NatPattern::Succ(v) | NatPattern::Var(v) | NatPattern::Plus1(v) => Some(v),
            NatPattern::Zero | NatPattern::Const(_) => None,
        }
    }
}

impl fmt::Display for NatPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatPattern::Zero => write!(f, "0"),
            NatPattern::Succ(v) => write!(f, "S({v})"),
            NatPattern::Var(v) => write!(f, "{v}"),
            NatPattern::Plus1(v) => write!(f, "{v}+1"),
            NatPattern::Const(k) => write!(f, "{k}"),
        }
    }
}

/// One side of a rule. Constructor nodes carry no sort arguments; those are
/// recovered by [`infer_template_sort`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplateTerm {
    Meta(Name),
    Con {
        arity: Name,
        nat: Option<NatPattern>,
        children: Vec<TemplateTerm>,
    },
    /// `body[arg]`: substitute `arg` for the innermost variable of `body`.
    Subst1 {
        body: Box<TemplateTerm>,
        arg: Box<TemplateTerm>,
    },
}

impl TemplateTerm {
    pub fn meta(name: impl Into<Name>) -> Self {
        TemplateTerm::Meta(name.into())
    }

    pub fn con(arity: impl Into<Name>, children: Vec<TemplateTerm>) -> Self {
        TemplateTerm::Con { arity: arity.into(), nat: None, children }
    }

    pub fn nat(arity: impl Into<Name>, pattern: NatPattern) -> Self {
        TemplateTerm::Con { arity: arity.into(), nat: Some(pattern), children: Vec::new() }
    }

    pub fn subst1(body: TemplateTerm, arg: TemplateTerm) -> Self {
        TemplateTerm::Subst1 { body: Box::new(body), arg: Box::new(arg) }
    }

    fn visit(&self, f: &mut impl FnMut(&TemplateTerm)) {
        f(self);
        match self {
            TemplateTerm::Meta(_) => {}
            TemplateTerm::Con { children, .. } => children.iter().for_each(|c| c.visit(f)),
            TemplateTerm::Subst1 { body, arg } => {
                body.visit(f);
                arg.visit(f);
            }
        }
    }
}

impl fmt::Display for TemplateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateTerm::Meta(m) => write!(f, "{m}"),
            TemplateTerm::Con { arity, nat, children } => {
                write!(f, "{arity}(")?;
                let mut first = true;
                if let Some(p) = nat {
                    write!(f, "nat:{p}")?;
                    first = false;
                }
                for c in children {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            TemplateTerm::Subst1 { body, arg } => write!(f, "{body}[{arg}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        })
    }
}

/// An inequation `lhs <= rhs` of some degree, given as two templates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTemplate {
    pub name: Name,
    pub degree: usize,
    pub metavars: BTreeMap<Name, ArgSpec>,
    pub natvars: BTreeSet<Name>,
    pub lhs: TemplateTerm,
    pub rhs: TemplateTerm,
}

impl RuleTemplate {
    pub fn side(&self, side: Side) -> &TemplateTerm {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwoSignature {
    pub sorts: SortSignature,
    pub arities: Vec<TermAritySpec>,
    pub rules: Vec<RuleTemplate>,
}

impl TwoSignature {
    pub fn arity(&self, name: &str) -> Option<&TermAritySpec> {
        self.arities.iter().find(|a| &*a.name == name)
    }

    pub fn rule(&self, name: &str) -> Option<&RuleTemplate> {
        self.rules.iter().find(|r| &*r.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic { location: location.into(), message: message.into() });
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.diagnostics.iter().any(|d| d.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (k, d) in self.diagnostics.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

fn check_sort_expr(sorts: &SortSignature, degree: usize, expr: &SortExpr, loc: &str, report: &mut ValidationReport) {
    match expr {
        SortExpr::Var(i) => {
            if *i == 0 || *i > degree {
                report.push(loc, format!("degree variable out of range: {i} (degree {degree})"));
            }
        }
        SortExpr::Con(name, args) => {
            match sorts.arity(name) {
                None => report.push(loc, format!("unknown sort constructor `{name}`")),
                Some(n) if n != args.len() => {
                    report.push(loc, format!("sort constructor `{name}` expects {n} arguments, got {}", args.len()))
                }
                Some(_) => {}
            }
            for a in args {
                check_sort_expr(sorts, degree, a, loc, report);
            }
        }
    }
}

/// Checks every definitional side condition of a 2-signature.
pub fn validate_signature(sig: &TwoSignature) -> ValidationReport {
    let mut report = ValidationReport::default();

    for name in sig.sorts.constructors.keys() {
        if name.trim().is_empty() {
            report.push("sorts", "empty sort constructor name");
        }
    }

    let mut seen = BTreeSet::new();
    for arity in &sig.arities {
        let loc = format!("arity `{}`", arity.name);
        if arity.name.trim().is_empty() {
            report.push("arities", "empty arity name");
        }
        if !seen.insert(arity.name.clone()) {
            report.push(&loc, "duplicate arity name");
        }
        for arg in &arity.args {
            for b in &arg.binders {
                check_sort_expr(&sig.sorts, arity.degree, b, &loc, &mut report);
            }
            check_sort_expr(&sig.sorts, arity.degree, &arg.body, &loc, &mut report);
        }
        check_sort_expr(&sig.sorts, arity.degree, &arity.result, &loc, &mut report);
        if arity.nat_indexed && !arity.args.is_empty() {
            report.push(&loc, "nat-indexed arity must not take arguments");
        }
    }

    let mut seen = BTreeSet::new();
    for rule in &sig.rules {
        if !seen.insert(rule.name.clone()) {
            report.push(format!("rule `{}`", rule.name), "duplicate rule name");
        }
        validate_rule(sig, rule, &mut report);
    }
    report
}

fn validate_rule(sig: &TwoSignature, rule: &RuleTemplate, report: &mut ValidationReport) {
    let loc = format!("rule `{}`", rule.name);
    let before = report.diagnostics.len();

    for (m, spec) in &rule.metavars {
        for b in &spec.binders {
            check_sort_expr(&sig.sorts, rule.degree, b, &loc, report);
        }
        check_sort_expr(&sig.sorts, rule.degree, &spec.body, &loc, report);
        if rule.natvars.contains(m) {
            report.push(&loc, format!("`{m}` declared both as metavar and as nat variable"));
        }
    }

    if !matches!(rule.lhs, TemplateTerm::Con { .. }) {
        report.push(format!("{loc} lhs"), "lhs must have a constructor at its root");
    }

    // Occurrence counts, linearity and scoping.
    let mut lhs_metas: BTreeMap<Name, usize> = BTreeMap::new();
    let mut lhs_nats: BTreeMap<Name, usize> = BTreeMap::new();
    rule.lhs.visit(&mut |t| match t {
        TemplateTerm::Meta(m) => *lhs_metas.entry(m.clone()).or_default() += 1,
        TemplateTerm::Con { nat: Some(p), .. } => {
            if let Some(v) = p.var_name() {
                *lhs_nats.entry(v.clone()).or_default() += 1;
            }
        }
        _ => {}
    });
    let mut lhs_subst = false;
    rule.lhs.visit(&mut |t| {
        if matches!(t, TemplateTerm::Subst1 { .. }) {
            lhs_subst = true;
        }
    });
    if lhs_subst {
        report.push(format!("{loc} lhs"), "substitution is not allowed in a lhs");
    }
    for (m, n) in &lhs_metas {
        if *n > 1 {
            report.push(format!("{loc} lhs"), format!("nonlinear lhs: metavar `{m}` occurs {n} times"));
        }
    }
    for (v, n) in &lhs_nats {
        if *n > 1 {
            report.push(format!("{loc} lhs"), format!("nonlinear lhs: nat variable `{v}` occurs {n} times"));
        }
    }

    for side in [Side::Lhs, Side::Rhs] {
        let sloc = format!("{loc} {side}");
        rule.side(side).visit(&mut |t| match t {
            TemplateTerm::Meta(m) => {
                if !rule.metavars.contains_key(m) {
                    report.push(&sloc, format!("undeclared metavar `{m}`"));
                } else if side == Side::Rhs && !lhs_metas.contains_key(m) {
                    report.push(&sloc, format!("unbound metavar `{m}` (absent from lhs)"));
                }
            }
            TemplateTerm::Con { arity, nat, .. } => {
                if let Some(p) = nat {
                    if let Some(v) = p.var_name() {
                        if !rule.natvars.contains(v) {
                            report.push(&sloc, format!("undeclared nat variable `{v}`"));
                        } else if side == Side::Rhs && !lhs_nats.contains_key(v) {
                            report.push(&sloc, format!("unbound nat variable `{v}` (absent from lhs)"));
                        }
                    }
                }
                if let Some(spec) = sig.arity(arity) {
                    if nat.is_some() && !spec.nat_indexed {
                        report.push(&sloc, format!("nat literal given to `{arity}`, which is not nat-indexed"));
                    }
                    if nat.is_none() && spec.nat_indexed {
                        report.push(&sloc, format!("nat-indexed `{arity}` needs a nat pattern"));
                    }
                }
            }
            TemplateTerm::Subst1 { .. } => {}
        });
    }

    // Only run sort inference on rules that are otherwise sound.
    if report.diagnostics.len() > before {
        return;
    }
    let lhs = match resolve_template(sig, rule, Side::Lhs) {
        Ok(r) => Some(r),
        Err(e) => {
            report.push(format!("{loc} lhs"), e.to_string());
            None
        }
    };
    let rhs = match resolve_template(sig, rule, Side::Rhs) {
        Ok(r) => Some(r),
        Err(e) => {
            report.push(format!("{loc} rhs"), e.to_string());
            None
        }
    };
    if let (Some((lsort, ltree)), Some((rsort, rtree))) = (lhs, rhs) {
        if lsort != rsort {
            report.push(&loc, format!("lhs and rhs sorts differ: {lsort} vs {rsort}"));
        }
        let mut lhs_vars = BTreeSet::new();
        ltree.collect_node_vars(&mut lhs_vars);
        let mut rhs_vars = BTreeSet::new();
        rtree.collect_node_vars(&mut rhs_vars);
        for (_, spec) in rule.metavars.iter().filter(|(m, _)| lhs_metas.contains_key(*m)) {
            spec.body.collect_vars(&mut rhs_vars);
            spec.binders.iter().for_each(|b| b.collect_vars(&mut rhs_vars));
        }
        for v in rhs_vars.difference(&lhs_vars) {
            report.push(&loc, format!("degree variable {v} is not determined by the lhs constructors"));
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InferError {
    #[error("unknown arity `{0}`")]
    UnknownArity(Name),
    #[error("undeclared metavar `{0}`")]
    UndeclaredMeta(Name),
    #[error("`{arity}` expects {expected} children, got {found}")]
    ChildCount { arity: Name, expected: usize, found: usize },
    #[error("sort mismatch at {at}: {left} vs {right}")]
    Mismatch { at: String, left: String, right: String },
    #[error("metavar `{meta}` is declared with {declared} binders but used under {used}")]
    BinderMismatch { meta: Name, declared: usize, used: usize },
    #[error("substitution body must bind exactly one variable (binder count {found})")]
    SubstBinders { found: usize },
    #[error("ambiguous sort argument in `{0}`")]
    Ambiguous(Name),
}

/// Unification terms: rigid rule degree variables, flexible node variables.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Rigid(usize),
    Flex(usize),
    Con(Name, Vec<Ty>),
}

impl Ty {
    fn from_expr(e: &SortExpr, vars: &dyn Fn(usize) -> Ty) -> Ty {
        match e {
            SortExpr::Var(i) => vars(*i),
            SortExpr::Con(n, args) => Ty::Con(n.clone(), args.iter().map(|a| Ty::from_expr(a, vars)).collect()),
        }
    }
}

#[derive(Default)]
struct Unifier {
    bound: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.bound.push(None);
        Ty::Flex(self.bound.len() - 1)
    }

    fn walk(&self, t: &Ty) -> Ty {
        let mut cur = t.clone();
        while let Ty::Flex(i) = cur {
            match &self.bound[i] {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.walk(t) {
            Ty::Flex(i) => i == v,
            Ty::Rigid(_) => false,
            Ty::Con(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (Ty::Flex(i), Ty::Flex(j)) if i == j => true,
            (Ty::Flex(i), other) | (other, Ty::Flex(i)) => {
                if self.occurs(*i, other) {
                    return false;
                }
                self.bound[*i] = Some(other.clone());
                true
            }
            (Ty::Rigid(i), Ty::Rigid(j)) => i == j,
            (Ty::Con(n, xs), Ty::Con(m, ys)) => {
                n == m && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    fn zonk(&self, t: &Ty) -> Option<SortExpr> {
        match self.walk(t) {
            Ty::Flex(_) => None,
            Ty::Rigid(i) => Some(SortExpr::Var(i)),
            Ty::Con(n, args) => {
                let args = args.iter().map(|a| self.zonk(a)).collect::<Option<Vec<_>>>()?;
                Some(SortExpr::Con(n, args))
            }
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.walk(t) {
            Ty::Flex(i) => format!("?{i}"),
            Ty::Rigid(i) => i.to_string(),
            Ty::Con(n, args) if args.is_empty() => n.to_string(),
            Ty::Con(n, args) => {
                let args: Vec<_> = args.iter().map(|a| self.show(a)).collect();
                format!("{n}({})", args.join(", "))
            }
        }
    }
}

/// A template whose constructor nodes carry their sort arguments as sort
/// expressions over the rule's degree variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolvedTemplate {
    Meta(Name),
    Con {
        arity: Name,
        sorts: Vec<SortExpr>,
        nat: Option<NatPattern>,
        /// Binder count of each child slot.
        binders: Vec<usize>,
        children: Vec<ResolvedTemplate>,
    },
    Subst1 {
        body: Box<ResolvedTemplate>,
        arg: Box<ResolvedTemplate>,
    },
}

impl ResolvedTemplate {
    fn collect_node_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            ResolvedTemplate::Meta(_) => {}
            ResolvedTemplate::Con { sorts, children, .. } => {
                sorts.iter().for_each(|s| s.collect_vars(out));
                children.iter().for_each(|c| c.collect_node_vars(out));
            }
            ResolvedTemplate::Subst1 { body, arg } => {
                body.collect_node_vars(out);
                arg.collect_node_vars(out);
            }
        }
    }
}

enum Pending {
    Meta(Name),
    Con { arity: Name, sorts: Vec<Ty>, nat: Option<NatPattern>, binders: Vec<usize>, children: Vec<Pending> },
    Subst1(Box<Pending>, Box<Pending>),
}

struct Inference<'a> {
    sig: &'a TwoSignature,
    rule: &'a RuleTemplate,
    unifier: Unifier,
}

impl Inference<'_> {
    fn rigid(i: usize) -> Ty {
        Ty::Rigid(i)
    }

    fn infer(&mut self, t: &TemplateTerm, stack: &[Ty]) -> Result<(Ty, Pending), InferError> {
        match t {
            TemplateTerm::Meta(m) => {
                let spec = self.rule.metavars.get(m).ok_or_else(|| InferError::UndeclaredMeta(m.clone()))?;
                if spec.binders.len() != stack.len() {
                    return Err(InferError::BinderMismatch {
                        meta: m.clone(),
                        declared: spec.binders.len(),
                        used: stack.len(),
                    });
                }
                for (k, (declared, used)) in spec.binders.iter().zip(stack).enumerate() {
                    let declared = Ty::from_expr(declared, &Self::rigid);
                    if !self.unifier.unify(&declared, used) {
                        return Err(InferError::Mismatch {
                            at: format!("binder {k} of metavar `{m}`"),
                            left: self.unifier.show(&declared),
                            right: self.unifier.show(used),
                        });
                    }
                }
                Ok((Ty::from_expr(&spec.body, &Self::rigid), Pending::Meta(m.clone())))
            }
            TemplateTerm::Con { arity, nat, children } => {
                let spec = self.sig.arity(arity).ok_or_else(|| InferError::UnknownArity(arity.clone()))?;
                if spec.args.len() != children.len() {
                    return Err(InferError::ChildCount {
                        arity: arity.clone(),
                        expected: spec.args.len(),
                        found: children.len(),
                    });
                }
                let node_vars: Vec<Ty> = (0..spec.degree).map(|_| self.unifier.fresh()).collect();
                // out-of-range variables are reported by validation; keep inference total
                let inst = |e: &SortExpr| {
                    Ty::from_expr(e, &|i| {
                        node_vars
                            .get(i.wrapping_sub(1))
                            .cloned()
                            .unwrap_or_else(|| Ty::Con(Name::from("?"), Vec::new()))
                    })
                };
                let mut pending_children = Vec::new();
                for (k, (arg, child)) in spec.args.iter().zip(children).enumerate() {
                    let mut inner = stack.to_vec();
                    inner.extend(arg.binders.iter().map(&inst));
                    let (got, p) = self.infer(child, &inner)?;
                    let want = inst(&arg.body);
                    if !self.unifier.unify(&want, &got) {
                        return Err(InferError::Mismatch {
                            at: format!("child {k} of `{arity}`"),
                            left: self.unifier.show(&want),
                            right: self.unifier.show(&got),
                        });
                    }
                    pending_children.push(p);
                }
                let result = inst(&spec.result);
                Ok((
                    result,
                    Pending::Con {
                        arity: arity.clone(),
                        sorts: node_vars.clone(),
                        nat: nat.clone(),
                        binders: spec.args.iter().map(|a| a.binders.len()).collect(),
                        children: pending_children,
                    },
                ))
            }
            TemplateTerm::Subst1 { body, arg } => {
                if let TemplateTerm::Meta(m) = &**body {
                    if let Some(spec) = self.rule.metavars.get(m) {
                        if spec.binders.len() != stack.len() + 1 {
                            return Err(InferError::SubstBinders {
                                found: spec.binders.len().saturating_sub(stack.len()),
                            });
                        }
                    }
                }
                let (arg_ty, arg_p) = self.infer(arg, stack)?;
                let mut inner = stack.to_vec();
                inner.push(arg_ty);
                let (body_ty, body_p) = self.infer(body, &inner)?;
                Ok((body_ty, Pending::Subst1(Box::new(body_p), Box::new(arg_p))))
            }
        }
    }

    fn finish(&self, p: Pending) -> Result<ResolvedTemplate, InferError> {
        Ok(match p {
            Pending::Meta(m) => ResolvedTemplate::Meta(m),
            Pending::Con { arity, sorts, nat, binders, children } => {
                let sorts = sorts
                    .iter()
                    .map(|s| self.unifier.zonk(s))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| InferError::Ambiguous(arity.clone()))?;
                let children = children.into_iter().map(|c| self.finish(c)).collect::<Result<_, _>>()?;
                ResolvedTemplate::Con { arity, sorts, nat, binders, children }
            }
            Pending::Subst1(b, a) => {
                ResolvedTemplate::Subst1 { body: Box::new(self.finish(*b)?), arg: Box::new(self.finish(*a)?) }
            }
        })
    }
}

/// Infers the sort of one side of a rule together with the sort arguments
/// of every constructor node on that side.
pub fn resolve_template(
    sig: &TwoSignature,
    rule: &RuleTemplate,
    side: Side,
) -> Result<(SortExpr, ResolvedTemplate), InferError> {
    let mut inf = Inference { sig, rule, unifier: Unifier::default() };
    let (ty, pending) = inf.infer(rule.side(side), &[])?;
    let head = match rule.side(side) {
        TemplateTerm::Con { arity, .. } => arity.clone(),
        TemplateTerm::Meta(m) => m.clone(),
        TemplateTerm::Subst1 { .. } => Name::from("substitution"),
    };
    let sort = inf.unifier.zonk(&ty).ok_or(InferError::Ambiguous(head))?;
    let tree = inf.finish(pending)?;
    Ok((sort, tree))
}

/// The sort expression (over degree variables `1..=degree`) of one side of a rule.
pub fn infer_template_sort(sig: &TwoSignature, rule: &RuleTemplate, side: Side) -> Result<SortExpr, InferError> {
    resolve_template(sig, rule, side).map(|(s, _)| s)
}

/// A validated rule with both sides resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledRule {
    pub name: Name,
    pub degree: usize,
    pub metavars: BTreeMap<Name, ArgSpec>,
    pub natvars: BTreeSet<Name>,
    pub sort: SortExpr,
    pub lhs: ResolvedTemplate,
    pub rhs: ResolvedTemplate,
}

impl CompiledRule {
    pub fn side(&self, side: Side) -> &ResolvedTemplate {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }
}

/// A validated 2-signature with lookup tables, the entry point for building
/// and manipulating terms.
#[derive(Clone, Debug)]
pub struct Language {
    name: String,
    sig: TwoSignature,
    arity_index: HashMap<Name, usize>,
    rules: Vec<CompiledRule>,
}

impl PartialEq for Language {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig
    }
}

impl Language {
    pub fn new(name: impl Into<String>, sig: TwoSignature) -> Result<Language, ValidationReport> {
        let report = validate_signature(&sig);
        if !report.is_ok() {
            return Err(report);
        }
        let arity_index = sig.arities.iter().enumerate().map(|(i, a)| (a.name.clone(), i)).collect();
        let mut rules = Vec::with_capacity(sig.rules.len());
        for rule in &sig.rules {
            // validation succeeded, so both sides resolve
            let (sort, lhs) = resolve_template(&sig, rule, Side::Lhs).expect("validated lhs");
            let (_, rhs) = resolve_template(&sig, rule, Side::Rhs).expect("validated rhs");
            rules.push(CompiledRule {
                name: rule.name.clone(),
                degree: rule.degree,
                metavars: rule.metavars.clone(),
                natvars: rule.natvars.clone(),
                sort,
                lhs,
                rhs,
            });
        }
        rules.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(Language { name: name.into(), sig, arity_index, rules })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &TwoSignature {
        &self.sig
    }

    pub fn sorts(&self) -> &SortSignature {
        &self.sig.sorts
    }

    pub fn arities(&self) -> &[TermAritySpec] {
        &self.sig.arities
    }

    pub fn arity(&self, name: &str) -> Option<&TermAritySpec> {
        self.arity_index.get(name).map(|&i| &self.sig.arities[i])
    }

    /// Rules sorted by name.
    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&CompiledRule> {
        self.rules.iter().find(|r| &*r.name == name)
    }
}

//! Computable finite-model semantics: hereditarily finite values, the fixed
//! operator table, contexts and their state spaces, expression
//! well-formedness, and the meaning function.
//!
//! Membership in the expression set is decided by structural recursion over
//! the five formation cases (constant, context variable, application,
//! operator application, set-builder); at finite desk scale the stratified
//! fixpoint is reached structurally, so no level index is carried around.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{render, Expr, Op};

/// A hereditarily finite semantic value. Sets are kept duplicate-free in a
/// fixed canonical order, so structural equality coincides with extensional
/// equality. Truth values and functions are not sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Truth(bool),
    Atom(u64),
    SetV(Vec<Value>),
    FuncV(Arc<FuncValue>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncValue {
    pub arity: usize,
    pub graph: BTreeMap<Vec<Value>, Value>,
}

impl Value {
    /// Canonicalizing set constructor: sorts and deduplicates.
    pub fn set(mut elems: Vec<Value>) -> Value {
        elems.sort();
        elems.dedup();
        Value::SetV(elems)
    }

    pub fn func(arity: usize, graph: BTreeMap<Vec<Value>, Value>) -> Value {
        debug_assert!(arity >= 1);
        debug_assert!(graph.keys().all(|k| k.len() == arity));
        Value::FuncV(Arc::new(FuncValue { arity, graph }))
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Value::SetV(_))
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Value::Truth(_))
    }

    pub fn as_set(&self) -> Option<&[Value]> {
        match self {
            Value::SetV(elems) => Some(elems),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Value::Truth(true))
    }
}

impl fmt::Display for Value {
    /// Model-file literal syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Truth(b) => write!(f, "{b}"),
            Value::Atom(n) => write!(f, "#{n}"),
            Value::SetV(elems) => {
                f.write_str("{")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
            Value::FuncV(fun) => {
                write!(f, "fun({}){{", fun.arity)?;
                for (i, (args, v)) in fun.graph.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    f.write_str("(")?;
                    for (j, a) in args.iter().enumerate() {
                        if j > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")->{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Applicability predicate of the fixed operator table.
pub fn op_applicable(op: Op, args: &[Value]) -> bool {
    match op {
        Op::And | Op::Or | Op::Implies | Op::Iff => {
            args.len() == 2 && args[0].is_truth() && args[1].is_truth()
        }
        // Negation is applicable to any single value.
        Op::Not => args.len() == 1,
        Op::ForAll | Op::Exists => {
            args.len() == 1
                && args[0]
                    .as_set()
                    .is_some_and(|elems| elems.iter().all(Value::is_truth))
        }
        Op::In => args.len() == 2 && args[1].is_set(),
        Op::Eq => args.len() == 2,
    }
}

/// Value function of the fixed operator table; callers must have checked
/// applicability.
pub fn op_value(op: Op, args: &[Value]) -> Value {
    let truth = |b: bool| Value::Truth(b);
    match op {
        Op::And => truth(args[0].is_true() && args[1].is_true()),
        Op::Or => truth(args[0].is_true() || args[1].is_true()),
        Op::Implies => truth(!args[0].is_true() || args[1].is_true()),
        Op::Iff => truth(args[0].is_true() == args[1].is_true()),
        // "x1 is false": anything other than the truth value false is not false.
        Op::Not => truth(args[0] == Value::Truth(false)),
        Op::ForAll => truth(args[0].as_set().unwrap().iter().all(Value::is_true)),
        Op::Exists => truth(args[0].as_set().unwrap().iter().any(Value::is_true)),
        Op::In => truth(args[1].as_set().unwrap().contains(&args[0])),
        Op::Eq => truth(args[0] == args[1]),
    }
}

/// Meanings of the declared constants; operators live in the fixed table
/// above and have no first-class meaning.
#[derive(Debug, Clone, Default)]
pub struct Interpretation {
    consts: BTreeMap<String, Value>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn insert(&mut self, name: &str, value: Value) -> Option<Value> {
        self.consts.insert(name.to_string(), value)
    }

    pub fn constant(&self, name: &str) -> Option<&Value> {
        self.consts.get(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.consts.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// A state: variables paired with the values they take, in context order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct State {
    entries: Vec<(String, Value)>,
}

impl State {
    pub fn empty() -> State {
        State {
            entries: Vec::new(),
        }
    }

    pub fn from_pairs(entries: Vec<(String, Value)>) -> State {
        State { entries }
    }

    pub fn get(&self, var: &str) -> Option<&Value> {
        self.entries
            .iter()
            .find(|(x, _)| x == var)
            .map(|(_, v)| v)
    }

    pub fn extended(&self, var: &str, value: Value) -> State {
        let mut entries = self.entries.clone();
        entries.push((var.to_string(), value));
        State { entries }
    }

    /// The prefix restriction to the first `n` pairs.
    pub fn prefix(&self, n: usize) -> State {
        State {
            entries: self.entries[..n].to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    /// `self ⊑ other`: self is a prefix of other.
    pub fn is_prefix_of(&self, other: &State) -> bool {
        other.entries.starts_with(&self.entries)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (x, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}={v}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("`{0}` is not an interpreted constant")]
    UnknownConstant(String),
    #[error("variable `{var}` is already bound in the context")]
    DuplicateContextVariable { var: String },
    #[error("ill-formed context: `{expr}` is not an expression over the prefix: {reason}")]
    IllFormedContext { expr: String, reason: String },
    #[error("ill-formed context: `{expr}` is not set-valued at state {state}")]
    NotSetValued { expr: String, state: String },
    #[error("`{expr}` is not an expression: {reason}")]
    NotAnExpression { expr: String, reason: String },
    #[error("precondition violated while evaluating `{expr}`: {reason}")]
    PreconditionViolated { expr: String, reason: String },
}

/// A context: variables paired with set-valued domain expressions, each
/// well formed over the preceding prefix. Constructed only through
/// validating operations, so holders may trust the invariants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context {
    entries: Vec<(String, Expr)>,
}

impl Context {
    pub fn empty() -> Context {
        Context::default()
    }

    /// Validating constructor for `k ∥ (var, domain)`.
    pub fn extended(
        &self,
        var: &str,
        domain: Expr,
        interp: &Interpretation,
    ) -> Result<Context, SemanticsError> {
        let mut cache = StatesCache::default();
        self.extended_cached(var, domain, interp, &mut cache)
    }

    pub(crate) fn extended_cached(
        &self,
        var: &str,
        domain: Expr,
        interp: &Interpretation,
        cache: &mut StatesCache,
    ) -> Result<Context, SemanticsError> {
        if self.lookup(var).is_some() {
            return Err(SemanticsError::DuplicateContextVariable {
                var: var.to_string(),
            });
        }
        is_expr_cached(self, &domain, interp, cache).map_err(|reason| {
            SemanticsError::IllFormedContext {
                expr: render(&domain),
                reason: reason.to_string(),
            }
        })?;
        for state in states_cached(self, interp, cache)?.iter() {
            let v = meaning(self, &domain, state, interp)?;
            if !v.is_set() {
                return Err(SemanticsError::NotSetValued {
                    expr: render(&domain),
                    state: state.to_string(),
                });
            }
        }
        let mut entries = self.entries.clone();
        entries.push((var.to_string(), domain));
        Ok(Context { entries })
    }

    pub fn from_pairs(
        pairs: &[(String, Expr)],
        interp: &Interpretation,
    ) -> Result<Context, SemanticsError> {
        let mut ctx = Context::empty();
        for (var, dom) in pairs {
            ctx = ctx.extended(var, dom.clone(), interp)?;
        }
        Ok(ctx)
    }

    /// Assemble a context without revalidating; callers must know the pairs
    /// form a valid context (e.g. distinct variables over set constants).
    pub(crate) fn from_pairs_unchecked(pairs: Vec<(String, Expr)>) -> Context {
        Context { entries: pairs }
    }

    pub fn lookup(&self, var: &str) -> Option<&Expr> {
        self.entries
            .iter()
            .find(|(x, _)| x == var)
            .map(|(_, e)| e)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.lookup(var).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, Expr)] {
        &self.entries
    }

    /// The prefix context of the first `n` pairs.
    pub fn prefix(&self, n: usize) -> Context {
        Context {
            entries: self.entries[..n].to_vec(),
        }
    }

    pub fn domain(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|(x, _)| x.as_str()).collect()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{}", render(e))?;
        }
        f.write_str("]")
    }
}

/// Memo of state enumerations, shared across the well-formedness checks of
/// one logical operation. Keyed by the context's rendering, which is
/// faithful because rendering is injective. The memo must never be reused
/// across interpretations.
#[derive(Default)]
pub(crate) struct StatesCache {
    map: HashMap<String, Rc<Vec<State>>>,
}

fn ctx_key(ctx: &Context) -> String {
    let mut key = String::new();
    for (var, dom) in &ctx.entries {
        key.push_str(var);
        key.push(':');
        key.push_str(&render(dom));
        key.push(',');
    }
    key
}

pub(crate) fn states_cached(
    ctx: &Context,
    interp: &Interpretation,
    cache: &mut StatesCache,
) -> Result<Rc<Vec<State>>, SemanticsError> {
    let key = ctx_key(ctx);
    if let Some(found) = cache.map.get(&key) {
        return Ok(found.clone());
    }
    let mut acc = vec![State::empty()];
    for (i, (var, dom)) in ctx.entries.iter().enumerate() {
        let prefix = ctx.prefix(i);
        let mut next = Vec::new();
        for sigma in &acc {
            let v = meaning(&prefix, dom, sigma, interp)?;
            let elems = v.as_set().ok_or_else(|| SemanticsError::NotSetValued {
                expr: render(dom),
                state: sigma.to_string(),
            })?;
            for s in elems {
                next.push(sigma.extended(var, s.clone()));
            }
        }
        acc = next;
    }
    let rc = Rc::new(acc);
    cache.map.insert(key, rc.clone());
    Ok(rc)
}

/// Enumerate the state set of a context in canonical order: the empty
/// context has exactly the empty state, and each binder extends every prefix
/// state with the elements of its domain's meaning in canonical value order.
pub fn states(ctx: &Context, interp: &Interpretation) -> Result<Vec<State>, SemanticsError> {
    let mut cache = StatesCache::default();
    states_cached(ctx, interp, &mut cache).map(|rc| (*rc).clone())
}

/// The five mutually exclusive formation cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classified<'a> {
    Constant(&'a str),
    ContextVariable(&'a str),
    Application {
        head: &'a Expr,
        args: &'a [Expr],
    },
    OperatorApplication {
        op: Op,
        args: &'a [Expr],
    },
    Builder {
        binders: &'a [(String, Expr)],
        body: &'a Expr,
        /// The syntactic context extensions `k ∥ (x1,φ1) ∥ … ∥ (xi,φi)`
        /// for i = 1..m, as pair lists (validity is `is_expr`'s concern).
        extended: Vec<Vec<(String, Expr)>>,
    },
}

impl Classified<'_> {
    pub fn case_name(&self) -> &'static str {
        match self {
            Classified::Constant(_) => "constant",
            Classified::ContextVariable(_) => "context-variable",
            Classified::Application { .. } => "application",
            Classified::OperatorApplication { .. } => "operator-application",
            Classified::Builder { .. } => "set-builder",
        }
    }
}

/// Identify which of the five formation cases applies to `t` in `k`.
pub fn classify<'a>(ctx: &Context, t: &'a Expr) -> Result<Classified<'a>, SemanticsError> {
    match t {
        Expr::Const(name) => Ok(Classified::Constant(name)),
        Expr::Var(name) => {
            if ctx.contains(name) {
                Ok(Classified::ContextVariable(name))
            } else {
                Err(SemanticsError::NotAnExpression {
                    expr: render(t),
                    reason: format!("variable `{name}` is not bound by the context"),
                })
            }
        }
        Expr::Apply { head, args } => Ok(Classified::Application { head, args }),
        Expr::OpApply { op, args } => Ok(Classified::OperatorApplication { op: *op, args }),
        Expr::SetBuilder { binders, body } => {
            for (x, _) in binders {
                if ctx.contains(x) {
                    return Err(SemanticsError::NotAnExpression {
                        expr: render(t),
                        reason: format!("binder `{x}` is already bound by the context"),
                    });
                }
            }
            let mut extended = Vec::with_capacity(binders.len());
            let mut pairs: Vec<(String, Expr)> = ctx.entries.clone();
            for (x, dom) in binders {
                pairs.push((x.clone(), dom.clone()));
                extended.push(pairs.clone());
            }
            Ok(Classified::Builder {
                binders,
                body,
                extended,
            })
        }
    }
}

/// Decide membership of `t` in the expressions over `ctx`.
pub fn is_expr(ctx: &Context, t: &Expr, interp: &Interpretation) -> bool {
    is_expr_diag(ctx, t, interp).is_ok()
}

/// Like [`is_expr`] but explains a rejection, carrying the failing state.
pub fn is_expr_diag(ctx: &Context, t: &Expr, interp: &Interpretation) -> Result<(), SemanticsError> {
    let mut cache = StatesCache::default();
    is_expr_cached(ctx, t, interp, &mut cache)
}

pub(crate) fn is_expr_cached(
    ctx: &Context,
    t: &Expr,
    interp: &Interpretation,
    cache: &mut StatesCache,
) -> Result<(), SemanticsError> {
    let not_expr = |reason: String| SemanticsError::NotAnExpression {
        expr: render(t),
        reason,
    };
    match classify(ctx, t)? {
        Classified::Constant(name) => {
            if interp.constant(name).is_some() {
                Ok(())
            } else {
                Err(SemanticsError::UnknownConstant(name.to_string()))
            }
        }
        Classified::ContextVariable(_) => Ok(()),
        Classified::Application { head, args } => {
            is_expr_cached(ctx, head, interp, cache)?;
            for a in args {
                is_expr_cached(ctx, a, interp, cache)?;
            }
            for sigma in states_cached(ctx, interp, cache)?.iter() {
                let hv = meaning(ctx, head, sigma, interp)?;
                let Value::FuncV(f) = &hv else {
                    return Err(not_expr(format!(
                        "head `{}` does not mean a function at state {sigma}",
                        render(head)
                    )));
                };
                if f.arity != args.len() {
                    return Err(not_expr(format!(
                        "head `{}` has arity {} but {} arguments were given",
                        render(head),
                        f.arity,
                        args.len()
                    )));
                }
                let mut tuple = Vec::with_capacity(args.len());
                for a in args {
                    tuple.push(meaning(ctx, a, sigma, interp)?);
                }
                if !f.graph.contains_key(&tuple) {
                    return Err(not_expr(format!(
                        "argument tuple is outside the function's domain at state {sigma}"
                    )));
                }
            }
            Ok(())
        }
        Classified::OperatorApplication { op, args } => {
            for a in args {
                is_expr_cached(ctx, a, interp, cache)?;
            }
            for sigma in states_cached(ctx, interp, cache)?.iter() {
                let mut tuple = Vec::with_capacity(args.len());
                for a in args {
                    tuple.push(meaning(ctx, a, sigma, interp)?);
                }
                if !op_applicable(op, &tuple) {
                    return Err(not_expr(format!(
                        "operator {op} is not applicable at state {sigma}"
                    )));
                }
            }
            Ok(())
        }
        Classified::Builder { binders, body, .. } => {
            let mut k = ctx.clone();
            for (x, dom) in binders {
                // `extended` re-checks that `dom` is a set-valued expression
                // over the prefix at every prefix state.
                k = k
                    .extended_cached(x, dom.clone(), interp, cache)
                    .map_err(|e| match e {
                        SemanticsError::DuplicateContextVariable { var } => not_expr(format!(
                            "binder `{var}` duplicates a context or sibling binder variable"
                        )),
                        other => other,
                    })?;
            }
            is_expr_cached(&k, body, interp, cache)
        }
    }
}

/// The meaning of `t` bound to `ctx` and `sigma`.
///
/// Precondition: `t` is an expression over `ctx` and `sigma ∈ Ξ(ctx)`; the
/// defensive errors are unreachable when the precondition holds.
pub fn meaning(
    ctx: &Context,
    t: &Expr,
    sigma: &State,
    interp: &Interpretation,
) -> Result<Value, SemanticsError> {
    let violated = |reason: String| SemanticsError::PreconditionViolated {
        expr: render(t),
        reason,
    };
    match t {
        Expr::Const(name) => interp
            .constant(name)
            .cloned()
            .ok_or_else(|| SemanticsError::UnknownConstant(name.clone())),
        Expr::Var(name) => sigma
            .get(name)
            .cloned()
            .ok_or_else(|| violated(format!("variable `{name}` is unbound in state {sigma}"))),
        Expr::Apply { head, args } => {
            let hv = meaning(ctx, head, sigma, interp)?;
            let Value::FuncV(f) = hv else {
                return Err(violated("application head is not a function".to_string()));
            };
            let mut tuple = Vec::with_capacity(args.len());
            for a in args {
                tuple.push(meaning(ctx, a, sigma, interp)?);
            }
            f.graph
                .get(&tuple)
                .cloned()
                .ok_or_else(|| violated("argument tuple outside function domain".to_string()))
        }
        Expr::OpApply { op, args } => {
            let mut tuple = Vec::with_capacity(args.len());
            for a in args {
                tuple.push(meaning(ctx, a, sigma, interp)?);
            }
            if !op_applicable(*op, &tuple) {
                return Err(violated(format!("operator {op} not applicable")));
            }
            Ok(op_value(*op, &tuple))
        }
        Expr::SetBuilder { binders, body } => {
            // Collect the body's meaning at every extension of sigma through
            // the binder domains; duplicates collapse extensionally.
            let mut elems = Vec::new();
            collect_builder(ctx, sigma, binders, body, interp, &mut elems)?;
            Ok(Value::set(elems))
        }
    }
}

fn collect_builder(
    ctx: &Context,
    sigma: &State,
    binders: &[(String, Expr)],
    body: &Expr,
    interp: &Interpretation,
    out: &mut Vec<Value>,
) -> Result<(), SemanticsError> {
    match binders.split_first() {
        None => {
            out.push(meaning(ctx, body, sigma, interp)?);
            Ok(())
        }
        Some(((x, dom), rest)) => {
            let dv = meaning(ctx, dom, sigma, interp)?;
            let elems = dv.as_set().ok_or_else(|| SemanticsError::NotSetValued {
                expr: render(dom),
                state: sigma.to_string(),
            })?;
            let extended_ctx = push_unchecked(ctx, x, dom);
            for s in elems {
                let sigma2 = sigma.extended(x, s.clone());
                collect_builder(&extended_ctx, &sigma2, rest, body, interp, out)?;
            }
            Ok(())
        }
    }
}

// Extension without re-validation, for use on paths where the caller has
// already established well-formedness (meaning's precondition).
fn push_unchecked(ctx: &Context, var: &str, dom: &Expr) -> Context {
    let mut entries = ctx.entries.clone();
    entries.push((var.to_string(), dom.clone()));
    Context { entries }
}

/// Variables occurring bound to a set-builder within `t`.
pub fn bound_vars(t: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_bound(t, &mut out);
    out
}

fn collect_bound(t: &Expr, out: &mut BTreeSet<String>) {
    match t {
        Expr::Const(_) | Expr::Var(_) => {}
        Expr::Apply { head, args } => {
            collect_bound(head, out);
            for a in args {
                collect_bound(a, out);
            }
        }
        Expr::OpApply { args, .. } => {
            for a in args {
                collect_bound(a, out);
            }
        }
        Expr::SetBuilder { binders, body } => {
            for (x, dom) in binders {
                out.insert(x.clone());
                collect_bound(dom, out);
            }
            collect_bound(body, out);
        }
    }
}

/// Variables occurring free within `t`: each binder scopes over the later
/// binder domains and the body, but not over its own domain.
pub fn free_vars(t: &Expr) -> BTreeSet<String> {
    match t {
        Expr::Const(_) => BTreeSet::new(),
        Expr::Var(x) => BTreeSet::from([x.clone()]),
        Expr::Apply { head, args } => {
            let mut out = free_vars(head);
            for a in args {
                out.extend(free_vars(a));
            }
            out
        }
        Expr::OpApply { args, .. } => {
            let mut out = BTreeSet::new();
            for a in args {
                out.extend(free_vars(a));
            }
            out
        }
        Expr::SetBuilder { binders, body } => {
            let mut out = BTreeSet::new();
            let mut shadowed: BTreeSet<String> = BTreeSet::new();
            for (x, dom) in binders {
                let mut fv = free_vars(dom);
                for s in &shadowed {
                    fv.remove(s);
                }
                out.extend(fv);
                shadowed.insert(x.clone());
            }
            let mut fv = free_vars(body);
            for s in &shadowed {
                fv.remove(s);
            }
            out.extend(fv);
            out
        }
    }
}

/// A sentence with respect to `ctx`: an expression whose meaning is a truth
/// value at every state.
pub fn is_sentence(ctx: &Context, t: &Expr, interp: &Interpretation) -> bool {
    is_sentence_diag(ctx, t, interp).is_ok()
}

pub fn is_sentence_diag(
    ctx: &Context,
    t: &Expr,
    interp: &Interpretation,
) -> Result<(), SemanticsError> {
    let mut cache = StatesCache::default();
    is_sentence_cached(ctx, t, interp, &mut cache)
}

pub(crate) fn is_sentence_cached(
    ctx: &Context,
    t: &Expr,
    interp: &Interpretation,
    cache: &mut StatesCache,
) -> Result<(), SemanticsError> {
    is_expr_cached(ctx, t, interp, cache)?;
    for sigma in states_cached(ctx, interp, cache)?.iter() {
        let v = meaning(ctx, t, sigma, interp)?;
        if !v.is_truth() {
            return Err(SemanticsError::NotAnExpression {
                expr: render(t),
                reason: format!("meaning at state {sigma} is {v}, not a truth value"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Expr;

    fn atom(n: u64) -> Value {
        Value::Atom(n)
    }

    fn interp_sets() -> Interpretation {
        let mut i = Interpretation::new();
        i.insert("a", atom(1));
        i.insert("A", Value::set(vec![atom(1), atom(2)]));
        i.insert("B", Value::set(vec![atom(2), atom(3), atom(4)]));
        i.insert("E", Value::set(vec![]));
        i
    }

    #[test]
    fn set_equality_is_extensional() {
        let s1 = Value::set(vec![atom(2), atom(1), atom(2)]);
        let s2 = Value::set(vec![atom(1), atom(2)]);
        assert_eq!(s1, s2);
    }

    #[test]
    fn quantifiers_over_empty_set() {
        assert_eq!(op_value(Op::ForAll, &[Value::set(vec![])]), Value::Truth(true));
        assert_eq!(op_value(Op::Exists, &[Value::set(vec![])]), Value::Truth(false));
    }

    #[test]
    fn negation_applies_to_anything() {
        assert!(op_applicable(Op::Not, &[Value::set(vec![])]));
        assert_eq!(op_value(Op::Not, &[Value::set(vec![])]), Value::Truth(false));
        assert_eq!(op_value(Op::Not, &[Value::Truth(false)]), Value::Truth(true));
    }

    #[test]
    fn states_of_empty_context() {
        let i = interp_sets();
        let s = states(&Context::empty(), &i).unwrap();
        assert_eq!(s, vec![State::empty()]);
    }

    #[test]
    fn states_of_single_binder() {
        let i = interp_sets();
        let k = Context::empty()
            .extended("x1", Expr::constant("A"), &i)
            .unwrap();
        let s = states(&k, &i).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].get("x1"), Some(&atom(1)));
        assert_eq!(s[1].get("x1"), Some(&atom(2)));
    }

    #[test]
    fn states_cartesian_count() {
        let i = interp_sets();
        let k = Context::from_pairs(
            &[
                ("x".to_string(), Expr::constant("A")),
                ("y".to_string(), Expr::constant("B")),
            ],
            &i,
        )
        .unwrap();
        // oracle: brute-force product of the two domains
        let expected = 2 * 3;
        assert_eq!(states(&k, &i).unwrap().len(), expected);
    }

    #[test]
    fn states_deterministic_across_runs() {
        let i = interp_sets();
        let k = Context::from_pairs(
            &[
                ("x".to_string(), Expr::constant("A")),
                ("y".to_string(), Expr::constant("B")),
            ],
            &i,
        )
        .unwrap();
        assert_eq!(states(&k, &i).unwrap(), states(&k, &i).unwrap());
    }

    #[test]
    fn context_may_have_empty_state_space() {
        let i = interp_sets();
        let k = Context::empty()
            .extended("x", Expr::constant("E"), &i)
            .unwrap();
        assert_eq!(states(&k, &i).unwrap().len(), 0);
        // downstream quantification is vacuous but well-formed
        let t = Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("A")]);
        assert!(is_sentence(&k, &t, &i));
    }

    #[test]
    fn classify_cases() {
        let i = interp_sets();
        let k = Context::empty()
            .extended("x", Expr::constant("A"), &i)
            .unwrap();
        assert_eq!(
            classify(&k, &Expr::var("x")).unwrap().case_name(),
            "context-variable"
        );
        assert_eq!(
            classify(&Context::empty(), &Expr::constant("a"))
                .unwrap()
                .case_name(),
            "constant"
        );
        assert!(matches!(
            classify(&Context::empty(), &Expr::var("X")),
            Err(SemanticsError::NotAnExpression { .. })
        ));
    }

    #[test]
    fn is_expr_rejects_unbound_variable() {
        let i = interp_sets();
        assert!(!is_expr(&Context::empty(), &Expr::var("X"), &i));
    }

    #[test]
    fn constant_is_expression_everywhere() {
        let i = interp_sets();
        assert!(is_expr(&Context::empty(), &Expr::constant("a"), &i));
    }

    #[test]
    fn membership_meaning() {
        let i = interp_sets();
        let t = Expr::op(Op::In, vec![Expr::constant("a"), Expr::constant("B")]);
        // #(a)=Atom 1 is not a member of #(B)={2,3,4}
        let v = meaning(&Context::empty(), &t, &State::empty(), &i).unwrap();
        assert_eq!(v, Value::Truth(false));
    }

    #[test]
    fn forall_membership_tautology() {
        let i = interp_sets();
        // (∀)({}(x:A,(∈)(x,A))) over #(A)={1,2}
        let t = Expr::op(
            Op::ForAll,
            vec![Expr::builder(
                vec![("x".to_string(), Expr::constant("A"))],
                Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("A")]),
            )],
        );
        // oracle: enumerate the domain and conjoin by brute force
        let dom = [atom(1), atom(2)];
        let expected = dom.iter().all(|s| dom.contains(s));
        let v = meaning(&Context::empty(), &t, &State::empty(), &i).unwrap();
        assert_eq!(v, Value::Truth(expected));
        assert!(is_sentence(&Context::empty(), &t, &i));
    }

    #[test]
    fn variable_meaning_reads_state() {
        let i = interp_sets();
        let k = Context::empty()
            .extended("x", Expr::constant("A"), &i)
            .unwrap();
        let sigma = State::empty().extended("x", atom(2));
        assert_eq!(
            meaning(&k, &Expr::var("x"), &sigma, &i).unwrap(),
            atom(2)
        );
    }

    #[test]
    fn free_and_bound_vars() {
        let c = Expr::constant("a");
        assert!(free_vars(&c).is_empty());
        assert!(bound_vars(&c).is_empty());

        let inner = Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("B")]);
        assert_eq!(free_vars(&inner), BTreeSet::from(["x".to_string()]));

        let b = Expr::builder(vec![("x".to_string(), Expr::constant("A"))], inner);
        assert_eq!(bound_vars(&b), BTreeSet::from(["x".to_string()]));
        assert!(free_vars(&b).is_empty());
    }

    #[test]
    fn set_valued_constant_is_not_a_sentence() {
        let i = interp_sets();
        assert!(is_expr(&Context::empty(), &Expr::constant("A"), &i));
        assert!(!is_sentence(&Context::empty(), &Expr::constant("A"), &i));
    }

    #[test]
    fn equality_of_expressions_is_sentence() {
        let i = interp_sets();
        let t = Expr::op(Op::Eq, vec![Expr::constant("a"), Expr::constant("a")]);
        assert!(is_sentence(&Context::empty(), &t, &i));
        assert_eq!(
            meaning(&Context::empty(), &t, &State::empty(), &i).unwrap(),
            Value::Truth(true)
        );
    }

    #[test]
    fn function_constant_as_head_and_standalone() {
        let mut i = interp_sets();
        let mut graph = BTreeMap::new();
        graph.insert(vec![atom(1)], atom(2));
        graph.insert(vec![atom(2)], atom(1));
        i.insert("f", Value::func(1, graph));
        // standalone expression
        assert!(is_expr(&Context::empty(), &Expr::constant("f"), &i));
        // head of an application
        let t = Expr::apply(Expr::constant("f"), vec![Expr::constant("a")]);
        assert!(is_expr(&Context::empty(), &t, &i));
        assert_eq!(
            meaning(&Context::empty(), &t, &State::empty(), &i).unwrap(),
            atom(2)
        );
        // arity mismatch is rejected
        let bad = Expr::apply(Expr::constant("f"), vec![Expr::constant("a"), Expr::constant("a")]);
        assert!(!is_expr(&Context::empty(), &bad, &i));
    }

    #[test]
    fn builder_rejects_context_shadowing() {
        let i = interp_sets();
        let k = Context::empty()
            .extended("x", Expr::constant("A"), &i)
            .unwrap();
        let t = Expr::builder(
            vec![("x".to_string(), Expr::constant("B"))],
            Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("B")]),
        );
        assert!(!is_expr(&k, &t, &i));
    }

    #[test]
    fn weakening_preserves_meaning() {
        // t ∈ E(h), y ∉ Vb(t), k = h∥(y,φ): t ∈ E(k) and meanings agree
        // along state restriction.
        let i = interp_sets();
        let h = Context::empty()
            .extended("x", Expr::constant("A"), &i)
            .unwrap();
        let t = Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("B")]);
        let k = h.extended("y", Expr::constant("B"), &i).unwrap();
        assert!(is_expr(&k, &t, &i));
        for sigma in states(&k, &i).unwrap() {
            let rho = sigma.prefix(1);
            assert_eq!(
                meaning(&k, &t, &sigma, &i).unwrap(),
                meaning(&h, &t, &rho, &i).unwrap()
            );
        }
    }

    #[test]
    fn divisibility_atoms_are_expressions_over_number_contexts() {
        // the mod-6 interpretation: (|)(x,y) is an expression over
        // k[x:N,y:N,z:N] because the head means a total 2-ary function
        let mut i = Interpretation::new();
        let atoms: Vec<Value> = (0..6).map(Value::Atom).collect();
        i.insert("N", Value::set(atoms));
        let mut div = BTreeMap::new();
        for a in 0..6u64 {
            for b in 0..6u64 {
                let divides = (0..6u64).any(|e| a * e % 6 == b);
                div.insert(vec![Value::Atom(a), Value::Atom(b)], Value::Truth(divides));
            }
        }
        i.insert("|", Value::func(2, div));
        let k = Context::from_pairs(
            &[
                ("x".to_string(), Expr::constant("N")),
                ("y".to_string(), Expr::constant("N")),
                ("z".to_string(), Expr::constant("N")),
            ],
            &i,
        )
        .unwrap();
        for (a, b) in [("x", "y"), ("y", "z"), ("x", "z")] {
            let t = Expr::apply(Expr::constant("|"), vec![Expr::var(a), Expr::var(b)]);
            assert!(is_expr(&k, &t, &i));
            assert!(is_sentence(&k, &t, &i));
        }
    }

    #[test]
    fn context_independence_on_shared_variables() {
        // contexts agreeing on shared variables give equal meanings for
        // expressions accepted in both, at states agreeing on the shared part
        let i = interp_sets();
        let kappa = Context::from_pairs(
            &[
                ("x".to_string(), Expr::constant("A")),
                ("y".to_string(), Expr::constant("B")),
            ],
            &i,
        )
        .unwrap();
        let k = Context::from_pairs(
            &[
                ("x".to_string(), Expr::constant("A")),
                ("z".to_string(), Expr::constant("B")),
            ],
            &i,
        )
        .unwrap();
        let t = Expr::op(Op::In, vec![Expr::var("x"), Expr::constant("B")]);
        for sk in states(&kappa, &i).unwrap() {
            for rk in states(&k, &i).unwrap() {
                if sk.get("x") == rk.get("x") {
                    assert_eq!(
                        meaning(&kappa, &t, &sk, &i).unwrap(),
                        meaning(&k, &t, &rk, &i).unwrap()
                    );
                }
            }
        }
    }
}

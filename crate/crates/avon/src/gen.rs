//! Seeded generators for expressions, finite models, contexts and sentences.
//! Shared by the `roundtrip` subcommand and the randomized test suites, so
//! all of them honor the same seed discipline.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::semantics::{
    is_sentence, meaning, states, Context, Interpretation, State, Value,
};
use crate::syntax::{Expr, Op, SymbolTable};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from the `AVON_SEED` environment variable, default 0.
pub fn env_seed() -> u64 {
    std::env::var("AVON_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

const GEN_VARS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
const GEN_CONSTS: [&str; 5] = ["A", "B", "D", "a", "f"];

/// The symbol table the syntactic generator draws from.
pub fn gen_table() -> SymbolTable {
    let mut t = SymbolTable::new();
    for v in GEN_VARS {
        t.declare_variable(v).unwrap();
    }
    for c in GEN_CONSTS {
        t.declare_constant(c).unwrap();
    }
    t
}

/// A random syntactically well-formed expression tree (no semantic
/// constraints): exercise the parser and renderer over the whole grammar.
pub fn gen_expr(rng: &mut impl Rng, depth: usize) -> Expr {
    let leaf = depth == 0;
    match if leaf { rng.gen_range(0..2) } else { rng.gen_range(0..5) } {
        0 => Expr::constant(GEN_CONSTS.choose(rng).unwrap()),
        1 => Expr::var(GEN_VARS.choose(rng).unwrap()),
        2 => {
            let op = *Op::ALL.choose(rng).unwrap();
            let n = rng.gen_range(1..=3);
            let args = (0..n).map(|_| gen_expr(rng, depth - 1)).collect();
            Expr::op(op, args)
        }
        3 => {
            let head = gen_expr(rng, depth - 1);
            let n = rng.gen_range(1..=3);
            let args = (0..n).map(|_| gen_expr(rng, depth - 1)).collect();
            Expr::apply(head, args)
        }
        _ => {
            let mut pool: Vec<&str> = GEN_VARS.to_vec();
            pool.shuffle(rng);
            let n = rng.gen_range(1..=2.min(pool.len()));
            let binders = pool[..n]
                .iter()
                .map(|v| (v.to_string(), gen_expr(rng, depth - 1)))
                .collect();
            Expr::builder(binders, gen_expr(rng, depth - 1))
        }
    }
}

/// Names used by the semantic generator, all distinct from the variables.
const SET_CONSTS: [&str; 3] = ["A", "B", "D"];

/// A random interpretation over a universe of at most `max_universe` atoms:
/// a few set constants with known inclusions plus one element constant per
/// set, so domain-membership preconditions are easy to satisfy.
pub fn gen_model(rng: &mut impl Rng, max_universe: u64) -> Interpretation {
    let universe = rng.gen_range(1..=max_universe.max(1));
    let mut interp = Interpretation::new();
    let mut sets: Vec<Vec<Value>> = Vec::new();
    for name in SET_CONSTS {
        let mut elems: Vec<Value> = (0..universe)
            .filter(|_| rng.gen_bool(0.6))
            .map(Value::Atom)
            .collect();
        if elems.is_empty() {
            elems.push(Value::Atom(rng.gen_range(0..universe)));
        }
        interp.insert(name, Value::set(elems.clone()));
        sets.push(elems);
    }
    // one known member per set, usable as a substitution replacement
    for (idx, name) in ["eA", "eB", "eD"].iter().enumerate() {
        let elem = sets[idx].choose(rng).unwrap().clone();
        interp.insert(name, elem);
    }
    interp
}

/// Declare the semantic generator's names on top of a symbol table.
pub fn declare_gen_names(table: &mut SymbolTable) {
    for v in GEN_VARS {
        let _ = table.declare_variable(v);
    }
    for c in ["A", "B", "D", "eA", "eB", "eD"] {
        let _ = table.declare_constant(c);
    }
}

/// A random valid context of up to `max_binders` variables, each ranging
/// over one of the set constants.
pub fn gen_context(
    rng: &mut impl Rng,
    interp: &Interpretation,
    max_binders: usize,
) -> Context {
    let n = rng.gen_range(0..=max_binders);
    let mut ctx = Context::empty();
    let mut pool: Vec<&str> = GEN_VARS.to_vec();
    pool.shuffle(rng);
    for var in pool.into_iter().take(n) {
        let dom = Expr::constant(SET_CONSTS.choose(rng).unwrap());
        ctx = ctx
            .extended(var, dom, interp)
            .expect("set constants are always valid domains");
    }
    ctx
}

/// An expression denoting an element (an atom of the universe) over `ctx`:
/// a context variable or an element constant.
fn gen_element_expr(rng: &mut impl Rng, ctx: &Context) -> Expr {
    let vars: Vec<&str> = ctx.entries().iter().map(|(v, _)| v.as_str()).collect();
    if !vars.is_empty() && rng.gen_bool(0.5) {
        Expr::var(vars.choose(rng).unwrap())
    } else {
        Expr::constant(["eA", "eB", "eD"].choose(rng).unwrap())
    }
}

/// A random sentence over `ctx`, built so that it is a sentence by
/// construction (and double-checked by the caller when it matters).
pub fn gen_sentence(rng: &mut impl Rng, ctx: &Context, depth: usize) -> Expr {
    if depth == 0 {
        let lhs = gen_element_expr(rng, ctx);
        return match rng.gen_range(0..3) {
            0 => Expr::op(
                Op::In,
                vec![lhs, Expr::constant(SET_CONSTS.choose(rng).unwrap())],
            ),
            1 => Expr::op(Op::Eq, vec![lhs.clone(), gen_element_expr(rng, ctx)]),
            _ => Expr::op(
                Op::Eq,
                vec![
                    Expr::constant(SET_CONSTS.choose(rng).unwrap()),
                    Expr::constant(SET_CONSTS.choose(rng).unwrap()),
                ],
            ),
        };
    }
    match rng.gen_range(0..6) {
        0 => Expr::op(
            *[Op::And, Op::Or, Op::Implies, Op::Iff].choose(rng).unwrap(),
            vec![
                gen_sentence(rng, ctx, depth - 1),
                gen_sentence(rng, ctx, depth - 1),
            ],
        ),
        1 => Expr::op(Op::Not, vec![gen_sentence(rng, ctx, depth - 1)]),
        2 | 3 => {
            // quantify over a fresh variable
            let used: Vec<&str> = ctx.entries().iter().map(|(v, _)| v.as_str()).collect();
            let fresh: Vec<&str> = GEN_VARS
                .iter()
                .copied()
                .filter(|v| !used.contains(v))
                .collect();
            match fresh.first() {
                None => gen_sentence(rng, ctx, 0),
                Some(var) => {
                    let dom = Expr::constant(SET_CONSTS.choose(rng).unwrap());
                    // the body may mention the fresh variable; extend a
                    // shadow context to generate it
                    let interp_free_ctx = push_pair(ctx, var, &dom);
                    let body = gen_sentence(rng, &interp_free_ctx, depth - 1);
                    let q = if rng.gen_bool(0.5) { Op::ForAll } else { Op::Exists };
                    Expr::op(q, vec![Expr::builder(vec![(var.to_string(), dom)], body)])
                }
            }
        }
        _ => gen_sentence(rng, ctx, 0),
    }
}

// A purely syntactic context extension for generation: semantic validity is
// established afterwards by the callers that need it.
fn push_pair(ctx: &Context, var: &str, dom: &Expr) -> Context {
    let mut pairs: Vec<(String, Expr)> = ctx.entries().to_vec();
    pairs.push((var.to_string(), dom.clone()));
    // set constants are always valid domains, so this cannot fail for the
    // shapes this generator produces
    Context::from_pairs_unchecked(pairs)
}

/// A generated sentence that in addition evaluates true at every state
/// (useful as a semantic axiom seed); `None` if none found in `attempts`.
pub fn gen_true_sentence(
    rng: &mut impl Rng,
    ctx: &Context,
    interp: &Interpretation,
    attempts: usize,
) -> Option<Expr> {
    for _ in 0..attempts {
        let s = gen_sentence(rng, ctx, 2);
        if !is_sentence(ctx, &s, interp) {
            continue;
        }
        let all_states = states(ctx, interp).ok()?;
        let all_true = all_states
            .iter()
            .all(|sigma| meaning(ctx, &s, sigma, interp).is_ok_and(|v| v.is_true()));
        if all_true {
            return Some(s);
        }
    }
    None
}

/// Evaluate a closed sentence, when it is one.
pub fn closed_truth(e: &Expr, interp: &Interpretation) -> Option<bool> {
    let empty = Context::empty();
    if !is_sentence(&empty, e, interp) {
        return None;
    }
    match meaning(&empty, e, &State::empty(), interp) {
        Ok(v) => Some(v.is_true()),
        Err(_) => None,
    }
}

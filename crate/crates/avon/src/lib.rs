//! A logic kernel for a context-based expression language.
//!
//! Expressions live in contexts that assign each variable a set-valued
//! domain expression over the preceding prefix; meanings are computed over
//! hereditarily finite models by exhaustive state enumeration. On top of the
//! semantics sit capture-free substitution of context variables, a fixed
//! catalogue of axiom and rule schemas with semantic side conditions, and a
//! proof-script checker with soundness and consistency post-checks.

pub mod calculus;
pub mod gen;
pub mod model;
pub mod proofcheck;
pub mod semantics;
pub mod subst;
pub mod syntax;

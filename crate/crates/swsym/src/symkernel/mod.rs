//! Minimal computer-algebra kernel: expressions over exact rationals, exact
//! differentiation, substitution, normal-form simplification and numeric
//! evaluation. Everything the rest of the engine computes on lives here.
//!
//! Values are immutable and cheaply shared; all operations are pure.

pub mod diff;
pub mod eval;
pub mod expr;
pub mod parse;
pub mod ratfunc;
pub mod render;
pub mod sample;
pub mod subst;
pub mod symbol;

pub use diff::diff;
pub use eval::{eval, EvalError};
pub use expr::{simplify, Expr, ExprNode, Func, OpaqueFn};
pub use parse::{parse, parse_with, ParseContext, ParseError};
pub use render::{render, render_latex};
pub use sample::{clear_denominators, equivalent, is_zero, is_zero_seeded, Sampler, ZeroVerdict};
pub use subst::{substitute, substitute_symbols, SubstError};
pub use symbol::{Symbol, SymbolKind};

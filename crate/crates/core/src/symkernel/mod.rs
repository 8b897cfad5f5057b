//! Exact symbolic expressions over the rationals.

mod context;
mod diff;
mod equals;
mod expr;
pub(crate) mod normal;
mod parse;
mod render;
mod subst;

pub use context::Context;
pub use diff::differentiate;
pub use equals::{equals, numerator, zero_test, Equality, ZeroTest};
pub use expr::{q_frac, q_int, Apply, Builtin, DerivRule, Expr, FunctionSymbol, Node, Q};
pub use render::{render, render_compact};
pub use subst::{collect_monomials, collect_powers, instantiate_function, substitute, Bindings};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("syntax error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("derivative of `{0}` is not available symbolically")]
    UnsupportedDerivative(String),
    #[error("not polynomial in `{var}`: {reason}")]
    NotPolynomial { var: String, reason: String },
    #[error("division by zero")]
    DivisionByZero,
}

#[cfg(test)]
mod tests;

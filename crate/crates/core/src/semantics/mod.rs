//! Bitvector values, the operator catalogue, expressions and their concrete evaluator.

mod expr;
mod op;
mod value;

pub use expr::{eval, Env, EvalError, Expr, ExprKind};
pub use op::Op;
pub use value::{mask, BitVecValue, MAX_WIDTH};

//! SyGuS-IF (v1 subset) frontend: problem loading, example extraction and solution
//! printing.

mod emit;
mod grammar;
mod parse;
pub mod sexp;

use thiserror::Error;

pub use emit::{emit_solution, parse_solution, parse_term, Solution};
pub use grammar::{Grammar, GrammarError, NtId, Production};
pub use parse::{detect_pbe, parse_problem};

use crate::semantics::{BitVecValue, Env};

/// One input/output pair, in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub index: usize,
    pub inputs: Vec<BitVecValue>,
    pub output: BitVecValue,
}

/// A validated PBE synthesis problem for a unary bitvector function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    /// Formal parameters. Always exactly one.
    pub params: Vec<String>,
    pub width: u32,
    pub grammar: Grammar,
    pub examples: Vec<Example>,
}

impl Problem {
    /// The evaluation environment binding the parameters to `example`'s inputs.
    pub fn env(&self, example: &Example) -> Env {
        let mut env = Env::new(self.width);
        for (p, v) in self.params.iter().zip(&example.inputs) {
            env.bind(p.as_str(), *v);
        }
        env
    }

    pub fn envs(&self) -> Vec<Env> {
        self.examples.iter().map(|e| self.env(e)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unsupported arity {0}: only unary functions are supported")]
    UnsupportedArity(usize),
    #[error("grammar has no `if0` rule")]
    MissingIf0Rule,
    #[error("examples {first} and {second} share inputs but disagree on the output")]
    InconsistentExamples { first: usize, second: usize },
    #[error("not a PBE task: {0}")]
    NotPbe(String),
    #[error("problem has no examples")]
    NoExamples,
    #[error("unknown operator `{name}` at {line}:{col}")]
    UnknownOperator {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid grammar: {0}")]
    Grammar(GrammarError),
}

impl From<GrammarError> for FrontendError {
    fn from(e: GrammarError) -> Self {
        match e {
            GrammarError::MissingIf0Rule => FrontendError::MissingIf0Rule,
            other => FrontendError::Grammar(other),
        }
    }
}

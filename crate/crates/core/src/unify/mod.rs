//! Two-phase unification: terminal expressions per example, then a decision tree
//! of enumerated `if0` conditions over the conflicting examples.

mod terminals;
mod tree;

use thiserror::Error;

use crate::enumerate::SearchError;

pub use terminals::{map_terminals, rank_examples, TerminalMap};
pub use tree::{build_tree, find_condition, tree_to_expr, Branch, Condition, DecisionTree};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("no terminal expression for example {index}: {cause}")]
    UnsolvableExample { index: usize, cause: SearchError },
    #[error("no condition separates examples {a} and {b}: {cause}")]
    UnunifiablePair {
        a: usize,
        b: usize,
        cause: SearchError,
    },
    #[error("solution is not derivable from the grammar: {0}")]
    GrammarViolation(String),
    #[error("no examples to unify")]
    NoExamples,
}

impl UnifyError {
    /// The search failure behind this error, if any.
    pub fn search_cause(&self) -> Option<SearchError> {
        match self {
            UnifyError::UnsolvableExample { cause, .. }
            | UnifyError::UnunifiablePair { cause, .. } => Some(*cause),
            _ => None,
        }
    }
}

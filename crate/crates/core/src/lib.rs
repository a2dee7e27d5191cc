//! Programming-by-example synthesis of unary bitvector functions.
//!
//! Solving runs in two phases. Size-ordered enumeration with signature pruning
//! finds a branch-free expression for every example, then conflicting examples are
//! unified under enumerated `if0` conditions in a decision tree.

pub mod bench;
pub mod corpus;
pub mod enumerate;
pub mod semantics;
pub mod solver;
pub mod sygus;
pub mod unify;

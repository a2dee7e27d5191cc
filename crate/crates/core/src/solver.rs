//! The end-to-end pipeline: load, map terminals, unify, verify.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::enumerate::{Enumerator, Limits, SearchError};
use crate::semantics::{eval, EvalError, Expr, Op};
use crate::sygus::{emit_solution, parse_problem, FrontendError, Problem};
use crate::unify::{
    build_tree, map_terminals, tree_to_expr, DecisionTree, TerminalMap, UnifyError,
};

/// Search budgets, applied to each individual search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub max_size: usize,
    pub max_candidates: u64,
    /// Wall-clock limit for the whole solve.
    pub timeout: Option<Duration>,
}

impl Default for Budgets {
    fn default() -> Self {
        let limits = Limits::default();
        Budgets {
            max_size: limits.max_size,
            max_candidates: limits.max_candidates,
            timeout: None,
        }
    }
}

impl Budgets {
    fn limits(&self, started: Instant) -> Limits {
        Limits {
            max_size: self.max_size,
            max_candidates: self.max_candidates,
            deadline: self.timeout.map(|t| started + t),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Candidates examined by all searches.
    pub candidates: u64,
    pub signatures_stored: u64,
    pub pruned_duplicates: u64,
    /// Every expression the enumerator evaluated; `signatures_stored + pruned_duplicates`.
    pub evaluations: u64,
    pub phase1: Duration,
    pub phase2: Duration,
    pub internal_nodes: usize,
    pub distinct_terminals: usize,
    pub solution_size: usize,
    pub examples: usize,
}

impl fmt::Display for RunStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "examples            {}", self.examples)?;
        writeln!(f, "distinct terminals  {}", self.distinct_terminals)?;
        writeln!(f, "candidates          {}", self.candidates)?;
        writeln!(f, "evaluations         {}", self.evaluations)?;
        writeln!(f, "signatures stored   {}", self.signatures_stored)?;
        writeln!(f, "pruned duplicates   {}", self.pruned_duplicates)?;
        writeln!(
            f,
            "phase 1             {:.3} ms",
            self.phase1.as_secs_f64() * 1e3
        )?;
        writeln!(
            f,
            "phase 2             {:.3} ms",
            self.phase2.as_secs_f64() * 1e3
        )?;
        writeln!(f, "internal nodes      {}", self.internal_nodes)?;
        write!(f, "solution size       {}", self.solution_size)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solution: Expr,
    /// The printed `define-fun`.
    pub text: String,
    pub terminals: TerminalMap,
    pub tree: DecisionTree,
    pub stats: RunStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Unify(#[from] UnifyError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("solution is wrong on example {0}")]
    Verification(usize),
}

impl SolveError {
    /// 2 for input problems outside the accepted shape, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SolveError::Frontend(_) => 2,
            _ => 1,
        }
    }

    /// True when a search ran out of budget rather than out of language.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            SolveError::Unify(u) if matches!(u.search_cause(), Some(SearchError::NotFound(_)))
        )
    }
}

/// Checks `solution` against every example.
pub fn verify(problem: &Problem, solution: &Expr) -> Result<(), SolveError> {
    for ex in &problem.examples {
        if eval(solution, &problem.env(ex))? != ex.output {
            return Err(SolveError::Verification(ex.index));
        }
    }
    Ok(())
}

/// Runs both phases on a loaded problem. The solution is verified before it is
/// returned.
pub fn solve(problem: &Problem, budgets: &Budgets) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let limits = budgets.limits(started);
    let grammar = &problem.grammar;
    let condition_nt = grammar
        .if0_operands()
        .ok_or(FrontendError::MissingIf0Rule)?[0];

    let mut engine = Enumerator::new(grammar, problem.envs(), problem.width, &[Op::If0])?;
    let terminals = map_terminals(problem, &mut engine, &limits)?;
    let phase1 = started.elapsed();

    let tree = build_tree(&terminals, &mut engine, condition_nt, &limits)?;
    let solution = tree_to_expr(&tree, grammar)?;
    let phase2 = started.elapsed() - phase1;

    verify(problem, &solution)?;

    let es = engine.stats();
    let stats = RunStats {
        candidates: es.emitted,
        signatures_stored: es.stored,
        pruned_duplicates: es.pruned,
        evaluations: es.evaluations,
        phase1,
        phase2,
        internal_nodes: tree.internal_count(),
        distinct_terminals: terminals.distinct(),
        solution_size: solution.size(),
        examples: problem.examples.len(),
    };
    Ok(SolveOutcome {
        text: emit_solution(problem, &solution),
        solution,
        terminals,
        tree,
        stats,
    })
}

/// Parses and solves a problem text.
pub fn solve_text(text: &str, budgets: &Budgets) -> Result<(Problem, SolveOutcome), SolveError> {
    let problem = parse_problem(text)?;
    let outcome = solve(&problem, budgets)?;
    Ok((problem, outcome))
}

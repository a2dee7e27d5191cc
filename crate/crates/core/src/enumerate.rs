//! Size-ordered bottom-up enumeration with signature (observational equivalence)
//! pruning.
//!
//! Expressions are grown layer by layer: every retained expression of size `s` is
//! built from retained operands of smaller sizes. An expression is retained only if
//! its signature (its values on every example input) has not been seen before at
//! the same nonterminal, so each pool holds one smallest representative per
//! signature.
//!
//! A layer is built lazily through a resumable cursor. Streams read the pools of a
//! nonterminal in (size, insertion) order and drive the builder when they run past
//! what has been built so far, so independent searches share all prior work.

use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::semantics::{eval, BitVecValue, Env, EvalError, Expr, Op};
use crate::sygus::{Grammar, NtId, Production};

/// Values of an expression on every example input, in example order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature(Arc<[u64]>);

impl Signature {
    pub fn from_bits(bits: &[u64]) -> Signature {
        Signature(Arc::from(bits))
    }

    pub fn bits(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, k: usize, width: u32) -> BitVecValue {
        BitVecValue::new(width, self.0[k])
    }

    /// True when fewer than two distinct values occur.
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl Borrow<[u64]> for Signature {
    fn borrow(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v:#x}")?;
        }
        f.write_str("]")
    }
}

/// Evaluates `expr` on each environment.
pub fn signature_of(expr: &Expr, envs: &[Env]) -> Result<Signature, EvalError> {
    let bits = envs
        .iter()
        .map(|env| eval(expr, env).map(BitVecValue::bits))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Signature::from_bits(&bits))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Size(usize),
    Candidates(u64),
    Time,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Size(n) => write!(f, "max size {n}"),
            Limit::Candidates(n) => write!(f, "{n} candidates"),
            Limit::Time => f.write_str("time limit"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no expression found within {0}")]
    NotFound(Limit),
    #[error("the pruned language is exhausted")]
    Exhausted,
}

/// Per-search budget. `max_candidates` bounds the number of expressions the engine
/// composes and evaluates on behalf of one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_size: usize,
    pub max_candidates: u64,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_size: 12,
            max_candidates: 5_000_000,
            deadline: None,
        }
    }
}

/// How often, in evaluations, the wall clock is consulted.
const DEADLINE_STRIDE: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    /// Expressions evaluated (leaves and compositions).
    pub evaluations: u64,
    /// Representatives retained.
    pub stored: u64,
    /// Evaluations discarded because their signature was already stored.
    pub pruned: u64,
    /// Candidates handed out by streams.
    pub emitted: u64,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub expr: Expr,
    pub signature: Signature,
}

struct Entry {
    expr: Expr,
    sig: Signature,
}

struct WorkItem {
    nt: usize,
    prod: usize,
    /// Operand sizes; empty for terminal productions.
    split: Vec<usize>,
}

/// Resumable cursor over the compositions of one size.
struct Layer {
    size: usize,
    items: Vec<WorkItem>,
    item: usize,
    /// Operand pool indices for `items[item]`; `None` before the item starts.
    odometer: Option<Vec<usize>>,
    produced: bool,
}

/// Position of one consumer in a nonterminal's candidate sequence.
#[derive(Clone, Debug)]
pub struct Stream {
    nt: NtId,
    size: usize,
    idx: usize,
    evals_at_start: u64,
}

impl Stream {
    pub fn nonterminal(&self) -> NtId {
        self.nt
    }
}

enum Step {
    Progress,
    Exhausted,
}

pub struct Enumerator<'g> {
    grammar: &'g Grammar,
    width: u32,
    envs: Vec<Env>,
    excluded: Vec<Op>,
    /// `pools[nt][size]`, index 0 unused.
    pools: Vec<Vec<Vec<Entry>>>,
    stores: Vec<FxHashSet<Signature>>,
    layer: Option<Layer>,
    complete: usize,
    last_nonempty: usize,
    max_arity: usize,
    exhausted: bool,
    next_deadline_check: u64,
    scratch: Vec<u64>,
    stats: EnumStats,
}

impl fmt::Debug for Enumerator<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enumerator")
            .field("width", &self.width)
            .field("examples", &self.envs.len())
            .field("complete", &self.complete)
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

impl<'g> Enumerator<'g> {
    /// Prepares enumeration over `grammar` with signatures taken on `envs`.
    /// Productions applying an operator in `excluded` are never used.
    pub fn new(
        grammar: &'g Grammar,
        envs: Vec<Env>,
        width: u32,
        excluded: &[Op],
    ) -> Result<Self, EvalError> {
        for env in &envs {
            for nt in grammar.nonterminals() {
                for p in grammar.productions(nt) {
                    if let Production::Terminal(t) = p {
                        eval(t, env)?;
                    }
                }
            }
        }
        let max_arity = grammar
            .nonterminals()
            .flat_map(|nt| grammar.productions(nt))
            .filter_map(|p| match p {
                Production::Op { op, .. } if !excluded.contains(op) => Some(op.arity()),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let n = grammar.len();
        Ok(Enumerator {
            grammar,
            width,
            scratch: vec![0; envs.len()],
            envs,
            excluded: excluded.to_vec(),
            pools: (0..n).map(|_| vec![Vec::new()]).collect(),
            stores: (0..n).map(|_| FxHashSet::default()).collect(),
            layer: None,
            complete: 0,
            last_nonempty: 0,
            max_arity,
            exhausted: false,
            next_deadline_check: DEADLINE_STRIDE,
            stats: EnumStats::default(),
        })
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn example_count(&self) -> usize {
        self.envs.len()
    }

    pub fn stats(&self) -> EnumStats {
        self.stats
    }

    /// Largest size whose pools are complete.
    pub fn complete_size(&self) -> usize {
        self.complete
    }

    /// A fresh stream over `nt`, starting again from size 1.
    pub fn stream(&self, nt: NtId) -> Stream {
        Stream {
            nt,
            size: 1,
            idx: 0,
            evals_at_start: self.stats.evaluations,
        }
    }

    /// Next representative of the stream's nonterminal, in non-decreasing size.
    pub fn next_candidate(
        &mut self,
        stream: &mut Stream,
        limits: &Limits,
    ) -> Result<Candidate, SearchError> {
        let nt = stream.nt.0;
        loop {
            if stream.size > limits.max_size {
                return Err(SearchError::NotFound(Limit::Size(limits.max_size)));
            }
            if let Some(entry) = self.pools[nt]
                .get(stream.size)
                .and_then(|p| p.get(stream.idx))
            {
                stream.idx += 1;
                self.stats.emitted += 1;
                return Ok(Candidate {
                    expr: entry.expr.clone(),
                    signature: entry.sig.clone(),
                });
            }
            if stream.size <= self.complete {
                stream.size += 1;
                stream.idx = 0;
                continue;
            }
            if self.stats.evaluations - stream.evals_at_start >= limits.max_candidates {
                return Err(SearchError::NotFound(Limit::Candidates(
                    limits.max_candidates,
                )));
            }
            if let Some(deadline) = limits.deadline {
                if self.stats.evaluations >= self.next_deadline_check {
                    self.next_deadline_check = self.stats.evaluations + DEADLINE_STRIDE;
                    if Instant::now() >= deadline {
                        return Err(SearchError::NotFound(Limit::Time));
                    }
                }
            }
            if let Step::Exhausted = self.step(256) {
                return Err(SearchError::Exhausted);
            }
        }
    }

    /// The first candidate of `nt` whose signature satisfies `accept`.
    ///
    /// Starts from size 1 every time, re-reading retained pools before growing
    /// them, so the result has the minimum size of any derivable expression
    /// satisfying a signature-only predicate.
    pub fn enumerate_until(
        &mut self,
        nt: NtId,
        mut accept: impl FnMut(&Signature) -> bool,
        limits: &Limits,
    ) -> Result<Candidate, SearchError> {
        let mut stream = self.stream(nt);
        loop {
            let c = self.next_candidate(&mut stream, limits)?;
            if accept(&c.signature) {
                return Ok(c);
            }
        }
    }

    /// Completes every layer up to `size`, or until the language is exhausted.
    pub fn build_through(&mut self, size: usize) {
        while self.complete < size {
            if let Step::Exhausted = self.step(usize::MAX) {
                return;
            }
        }
    }

    /// Retained representatives of `nt` up to `max_size`, in stream order.
    pub fn retained(&self, nt: NtId, max_size: usize) -> impl Iterator<Item = (&Expr, &Signature)> {
        self.pools[nt.0]
            .iter()
            .take(max_size + 1)
            .flatten()
            .map(|e| (&e.expr, &e.sig))
    }

    pub fn is_stored(&self, nt: NtId, sig: &Signature) -> bool {
        self.stores[nt.0].contains(sig)
    }

    /// Performs up to `budget` evaluations, stopping early when a representative
    /// is stored or the current layer completes.
    fn step(&mut self, budget: usize) -> Step {
        if self.exhausted {
            return Step::Exhausted;
        }
        if self.layer.is_none() {
            let size = self.complete + 1;
            if size > 1 && size > self.max_arity * self.last_nonempty + 1 {
                self.exhausted = true;
                return Step::Exhausted;
            }
            self.layer = Some(self.plan_layer(size));
            for pools in &mut self.pools {
                pools.push(Vec::new());
            }
        }
        let mut done = 0;
        while done < budget {
            let layer = self.layer.as_mut().expect("layer planned");
            if layer.item == layer.items.len() {
                let layer = self.layer.take().expect("layer planned");
                self.complete = layer.size;
                if layer.produced {
                    self.last_nonempty = layer.size;
                }
                return Step::Progress;
            }
            done += 1;
            if self.compose_next() {
                return Step::Progress;
            }
        }
        Step::Progress
    }

    fn plan_layer(&self, size: usize) -> Layer {
        let mut items = Vec::new();
        for nt in self.grammar.nonterminals() {
            for (prod, p) in self.grammar.productions(nt).iter().enumerate() {
                match p {
                    Production::Terminal(_) => {
                        if size == 1 {
                            items.push(WorkItem {
                                nt: nt.0,
                                prod,
                                split: Vec::new(),
                            });
                        }
                    }
                    Production::Op { op, operands } => {
                        if self.excluded.contains(op) || size < operands.len() + 1 {
                            continue;
                        }
                        for split in compositions(size - 1, operands.len()) {
                            let feasible = operands
                                .iter()
                                .zip(&split)
                                .all(|(o, &s)| !self.pools[o.0][s].is_empty());
                            if feasible {
                                items.push(WorkItem {
                                    nt: nt.0,
                                    prod,
                                    split,
                                });
                            }
                        }
                    }
                }
            }
        }
        Layer {
            size,
            items,
            item: 0,
            odometer: None,
            produced: false,
        }
    }

    /// Evaluates the next composition of the current layer. Returns true when it
    /// was stored as a new representative.
    fn compose_next(&mut self) -> bool {
        let layer = self.layer.as_mut().expect("layer planned");
        let size = layer.size;
        let item = &layer.items[layer.item];
        let nt = item.nt;

        let (op, operand_nts) = match &self.grammar.productions(NtId(nt))[item.prod] {
            Production::Terminal(leaf) => {
                layer.item += 1;
                for (slot, env) in self.scratch.iter_mut().zip(&self.envs) {
                    *slot = eval(leaf, env)
                        .expect("terminals checked at construction")
                        .bits();
                }
                let leaf = leaf.clone();
                return self.offer(nt, size, || leaf);
            }
            Production::Op { op, operands } => (*op, operands),
        };

        let arity = operand_nts.len();
        let odometer = layer.odometer.get_or_insert_with(|| vec![0; arity]);
        let pools = &self.pools;
        let operand_pool = |j: usize| &pools[operand_nts[j].0][item.split[j]];

        let mut args = [0u64; 3];
        for (k, slot) in self.scratch.iter_mut().enumerate() {
            for j in 0..arity {
                args[j] = operand_pool(j)[odometer[j]].sig.0[k];
            }
            *slot = op.apply(self.width, &args[..arity]);
        }
        let operands: Vec<Expr> = (0..arity)
            .map(|j| operand_pool(j)[odometer[j]].expr.clone())
            .collect();

        // advance: last operand varies fastest
        let mut j = arity;
        let mut finished = true;
        while j > 0 {
            j -= 1;
            odometer[j] += 1;
            if odometer[j] < operand_pool(j).len() {
                finished = false;
                break;
            }
            odometer[j] = 0;
        }
        if finished {
            layer.item += 1;
            layer.odometer = None;
        }
        self.offer(nt, size, || Expr::apply(op, operands))
    }

    /// Stores the expression whose signature is in `scratch` unless it is already known.
    fn offer(&mut self, nt: usize, size: usize, build: impl FnOnce() -> Expr) -> bool {
        self.stats.evaluations += 1;
        if self.stores[nt].contains(self.scratch.as_slice()) {
            self.stats.pruned += 1;
            return false;
        }
        let sig = Signature::from_bits(&self.scratch);
        self.stores[nt].insert(sig.clone());
        self.pools[nt][size].push(Entry { expr: build(), sig });
        self.stats.stored += 1;
        if let Some(layer) = self.layer.as_mut() {
            layer.produced = true;
        }
        true
    }
}

/// All ways to write `total` as an ordered sum of `parts` positive integers, in
/// lexicographically increasing order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 && total >= parts {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

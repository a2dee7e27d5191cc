//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use bvsynth::semantics::{eval, BitVecValue, Env, Expr, Op};
use bvsynth::solver::SolveOutcome;
use bvsynth::sygus::{Example, Grammar, NtId, Problem, Production};
use bvsynth::unify::DecisionTree;
use rand::seq::SliceRandom;
use rand::Rng;

/// Unpruned bottom-up enumeration: every derivable expression of each size.
pub struct BruteForce<'g> {
    grammar: &'g Grammar,
    excluded: Vec<Op>,
    memo: HashMap<(usize, usize), Vec<Expr>>,
}

impl<'g> BruteForce<'g> {
    pub fn new(grammar: &'g Grammar, excluded: &[Op]) -> Self {
        BruteForce {
            grammar,
            excluded: excluded.to_vec(),
            memo: HashMap::new(),
        }
    }

    /// All expressions of exactly `size` nodes derivable from `nt`.
    pub fn exprs(&mut self, nt: NtId, size: usize) -> Vec<Expr> {
        if let Some(v) = self.memo.get(&(nt.0, size)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for p in self.grammar.productions(nt).to_vec() {
            match p {
                Production::Terminal(t) => {
                    if size == 1 {
                        out.push(t);
                    }
                }
                Production::Op { op, operands } => {
                    if self.excluded.contains(&op) || size <= operands.len() {
                        continue;
                    }
                    for split in splits(size - 1, operands.len()) {
                        let choices: Vec<Vec<Expr>> = operands
                            .iter()
                            .zip(&split)
                            .map(|(o, s)| self.exprs(*o, *s))
                            .collect();
                        for args in product(&choices) {
                            out.push(Expr::apply(op, args));
                        }
                    }
                }
            }
        }
        self.memo.insert((nt.0, size), out.clone());
        out
    }

    /// Smallest size at which some expression's signature satisfies `accept`.
    pub fn min_size(
        &mut self,
        nt: NtId,
        envs: &[Env],
        max_size: usize,
        mut accept: impl FnMut(&[u64]) -> bool,
    ) -> Option<usize> {
        (1..=max_size).find(|&s| {
            self.exprs(nt, s)
                .iter()
                .any(|e| accept(&signature(e, envs)))
        })
    }

    /// Distinct signatures of every expression up to `max_size`.
    pub fn signatures(&mut self, nt: NtId, envs: &[Env], max_size: usize) -> BTreeSet<Vec<u64>> {
        (1..=max_size)
            .flat_map(|s| self.exprs(nt, s))
            .map(|e| signature(&e, envs))
            .collect()
    }
}

/// Every way to write `total` as `parts` positive summands.
pub fn splits(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (1..total)
        .flat_map(|first| {
            splits(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

fn product(choices: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    choices.iter().fold(vec![Vec::new()], |acc, options| {
        acc.iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

pub fn signature(expr: &Expr, envs: &[Env]) -> Vec<u64> {
    envs.iter()
        .map(|env| eval(expr, env).expect("closed expression").bits())
        .collect()
}

pub fn envs(width: u32, xs: &[u64]) -> Vec<Env> {
    xs.iter()
        .map(|&x| Env::new(width).with("x", BitVecValue::new(width, x)))
        .collect()
}

pub fn bv(width: u32, bits: u64) -> BitVecValue {
    BitVecValue::new(width, bits)
}

pub fn x() -> Expr {
    Expr::var("x")
}

pub fn c(width: u32, bits: u64) -> Expr {
    Expr::constant(bv(width, bits))
}

/// A single-nonterminal grammar over `x`, the given constants and operators, with
/// `if0` appended.
pub fn simple_grammar(width: u32, consts: &[u64], ops: &[Op]) -> Grammar {
    let s = NtId(0);
    let mut prods = vec![Production::Terminal(x())];
    prods.extend(consts.iter().map(|&k| Production::Terminal(c(width, k))));
    prods.extend(
        ops.iter()
            .map(|&op| Production::op(op, vec![s; op.arity()])),
    );
    prods.push(Production::op(Op::If0, [s, s, s]));
    Grammar::single(prods).unwrap()
}

pub fn problem(grammar: Grammar, width: u32, pairs: &[(u64, u64)]) -> Problem {
    Problem {
        name: "f".into(),
        params: vec!["x".into()],
        width,
        grammar,
        examples: pairs
            .iter()
            .enumerate()
            .map(|(index, &(i, o))| Example {
                index,
                inputs: vec![bv(width, i)],
                output: bv(width, o),
            })
            .collect(),
    }
}

const NON_IF0: [Op; 13] = [
    Op::BvNot,
    Op::BvAnd,
    Op::BvOr,
    Op::BvXor,
    Op::BvAdd,
    Op::BvSub,
    Op::BvShl,
    Op::BvLshr,
    Op::BvAshr,
    Op::Shl1,
    Op::Shr1,
    Op::Shr4,
    Op::Shr16,
];

/// A random grammar with at most eight productions in total. Sometimes a second
/// nonterminal supplies some operands and the `if0` condition.
pub fn random_grammar(rng: &mut impl Rng, width: u32) -> Grammar {
    let two = rng.gen_ratio(1, 3);
    let start = NtId(0);
    let aux = NtId(1);
    let mut start_prods = vec![Production::Terminal(x())];
    let mut pool = [0, 1, 2, 3, rng.gen::<u64>()];
    pool.shuffle(rng);
    for &k in pool.iter().take(rng.gen_range(0..=2)) {
        let t = Production::Terminal(c(width, k));
        if !start_prods.contains(&t) {
            start_prods.push(t);
        }
    }
    let aux_prods = if two {
        let leaf = if rng.gen() {
            x()
        } else {
            c(width, rng.gen_range(0..4))
        };
        let op = *[Op::BvNot, Op::Shr1, Op::Shl1].choose(rng).unwrap();
        vec![Production::Terminal(leaf), Production::op(op, [aux])]
    } else {
        Vec::new()
    };
    let room = 8 - 1 - start_prods.len() - aux_prods.len();
    let mut ops = NON_IF0.to_vec();
    ops.shuffle(rng);
    for &op in ops.iter().take(rng.gen_range(1..=room.min(4))) {
        let operands: Vec<NtId> = (0..op.arity())
            .map(|_| {
                if two && rng.gen_ratio(1, 3) {
                    aux
                } else {
                    start
                }
            })
            .collect();
        start_prods.push(Production::op(op, operands));
    }
    let cond = if two && rng.gen() { aux } else { start };
    start_prods.push(Production::op(Op::If0, [cond, start, start]));
    let mut rules = vec![("Start".to_string(), start_prods)];
    if two {
        rules.push(("Aux".to_string(), aux_prods));
    }
    let g = Grammar::new(rules).unwrap();
    assert!(g.production_count() <= 8);
    g
}

/// A uniformly chosen expression of `nt` with at most `max_size` nodes
/// (the largest non-empty size not above a random draw).
pub fn random_target(
    rng: &mut impl Rng,
    brute: &mut BruteForce<'_>,
    nt: NtId,
    max_size: usize,
) -> Expr {
    let mut size = rng.gen_range(1..=max_size);
    loop {
        let all = brute.exprs(nt, size);
        if let Some(e) = all.choose(rng) {
            return e.clone();
        }
        size -= 1;
    }
}

pub fn fixture_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(kind)
}

/// The `.sl` files of a fixture directory, sorted by name.
pub fn fixtures(kind: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixture_dir(kind))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sl"))
        .collect();
    v.sort();
    v
}

/// Checks the structural guarantees of a solved problem's decision tree.
pub fn tree_invariants(p: &Problem, out: &SolveOutcome) -> Result<(), String> {
    let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(what) };
    let n = p.examples.len();
    check(
        out.tree.internal_count() < n.max(1),
        format!(
            "{} internal nodes for {n} examples",
            out.tree.internal_count()
        ),
    )?;
    if out.terminals.distinct() == 1 {
        check(
            out.tree.internal_count() == 0,
            "nodes despite one terminal".into(),
        )?;
    }
    for (ex, env) in p.examples.iter().zip(p.envs()) {
        check(
            eval(&out.solution, &env).ok() == Some(ex.output),
            format!("solution wrong on {}", ex.index),
        )?;
        let (leaf, _) = out.tree.route(&env).map_err(|e| e.to_string())?;
        let DecisionTree::Leaf { expr, bucket, .. } = leaf else {
            return Err("routing ended at an internal node".into());
        };
        check(
            bucket.contains(&ex.index),
            format!("example {} routes to a foreign leaf", ex.index),
        )?;
        check(
            eval(expr, &env).ok() == Some(ex.output),
            format!("leaf wrong on {}", ex.index),
        )?;
    }
    for cond in out.tree.conditions() {
        check(
            !cond.expr.contains_op(Op::If0),
            format!("if0 in condition {}", cond.expr),
        )?;
        check(
            !cond.signature.is_constant(),
            format!("constant condition {}", cond.expr),
        )?;
        check(
            cond.signature.bits()[cond.then_example] == 1,
            "then-side value is not 1".into(),
        )?;
        check(
            cond.signature.bits()[cond.else_example] != 1,
            "else-side value is 1".into(),
        )?;
    }
    let mut members = Vec::new();
    for leaf in out.tree.leaves() {
        let DecisionTree::Leaf { expr, bucket, .. } = leaf else {
            unreachable!()
        };
        check(!expr.contains_op(Op::If0), format!("if0 in leaf {expr}"))?;
        members.extend(bucket.iter().copied());
    }
    members.sort_unstable();
    check(
        members == (0..n).collect::<Vec<_>>(),
        "buckets do not partition the examples".into(),
    )
}

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::op::Op;
use super::value::BitVecValue;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Var(Arc<str>),
    Const(BitVecValue),
    Apply(Op, Box<[Expr]>),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Node {
    kind: ExprKind,
    size: usize,
}

/// An immutable, cheaply clonable expression tree with cached node count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn var(name: impl Into<Arc<str>>) -> Expr {
        Expr(Arc::new(Node {
            kind: ExprKind::Var(name.into()),
            size: 1,
        }))
    }

    pub fn constant(value: BitVecValue) -> Expr {
        Expr(Arc::new(Node {
            kind: ExprKind::Const(value),
            size: 1,
        }))
    }

    /// Panics if `args.len()` differs from the operator's arity.
    pub fn apply(op: Op, args: impl Into<Box<[Expr]>>) -> Expr {
        let args = args.into();
        assert_eq!(
            args.len(),
            op.arity(),
            "{op} expects {} operands",
            op.arity()
        );
        let size = 1 + args.iter().map(Expr::size).sum::<usize>();
        Expr(Arc::new(Node {
            kind: ExprKind::Apply(op, args),
            size,
        }))
    }

    pub fn unary(op: Op, a: Expr) -> Expr {
        Expr::apply(op, vec![a])
    }

    pub fn binary(op: Op, a: Expr, b: Expr) -> Expr {
        Expr::apply(op, vec![a, b])
    }

    pub fn if0(cond: Expr, then_branch: Expr, else_branch: Expr) -> Expr {
        Expr::apply(Op::If0, vec![cond, then_branch, else_branch])
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    /// Total node count.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// True if any node applies `op`.
    pub fn contains_op(&self, op: Op) -> bool {
        match self.kind() {
            ExprKind::Apply(o, args) => *o == op || args.iter().any(|a| a.contains_op(op)),
            _ => false,
        }
    }

    pub fn count_op(&self, op: Op) -> usize {
        match self.kind() {
            ExprKind::Apply(o, args) => {
                usize::from(*o == op) + args.iter().map(|a| a.count_op(op)).sum::<usize>()
            }
            _ => 0,
        }
    }

    /// Names of all variables occurring in the expression.
    pub fn free_vars(&self) -> Vec<Arc<str>> {
        fn walk(e: &Expr, out: &mut Vec<Arc<str>>) {
            match e.kind() {
                ExprKind::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                ExprKind::Const(_) => {}
                ExprKind::Apply(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Canonical S-expression text. Constants are emitted as lower-case literals
    /// padded to the full width.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out);
        out
    }

    fn write_sexpr(&self, out: &mut String) {
        match self.kind() {
            ExprKind::Var(v) => out.push_str(v),
            ExprKind::Const(c) => out.push_str(&c.to_literal()),
            ExprKind::Apply(op, args) => {
                out.push('(');
                out.push_str(op.name());
                for a in args.iter() {
                    out.push(' ');
                    a.write_sexpr(out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

/// Variable bindings for evaluation. All values share one width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Env {
    width: u32,
    bindings: BTreeMap<Arc<str>, BitVecValue>,
}

impl Env {
    pub fn new(width: u32) -> Env {
        Env {
            width,
            bindings: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<Arc<str>>, value: BitVecValue) -> Env {
        self.bind(name, value);
        self
    }

    pub fn bind(&mut self, name: impl Into<Arc<str>>, value: BitVecValue) {
        self.bindings.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<BitVecValue> {
        self.bindings.get(name).copied()
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("width mismatch: expected {expected} bits, found {found}")]
    WidthMismatch { expected: u32, found: u32 },
}

/// Concretely evaluates `expr` under `env`.
pub fn eval(expr: &Expr, env: &Env) -> Result<BitVecValue, EvalError> {
    eval_bits(expr, env).map(|bits| BitVecValue::new(env.width, bits))
}

fn eval_bits(expr: &Expr, env: &Env) -> Result<u64, EvalError> {
    let checked = |v: BitVecValue| {
        if v.width() == env.width {
            Ok(v.bits())
        } else {
            Err(EvalError::WidthMismatch {
                expected: env.width,
                found: v.width(),
            })
        }
    };
    match expr.kind() {
        ExprKind::Var(name) => env
            .get(name)
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
            .and_then(checked),
        ExprKind::Const(c) => checked(*c),
        ExprKind::Apply(Op::If0, args) => {
            if eval_bits(&args[0], env)? == 1 {
                eval_bits(&args[1], env)
            } else {
                eval_bits(&args[2], env)
            }
        }
        ExprKind::Apply(op, args) => {
            let mut vals = [0u64; 3];
            for (slot, a) in vals.iter_mut().zip(args.iter()) {
                *slot = eval_bits(a, env)?;
            }
            Ok(op.apply(env.width, &vals[..args.len()]))
        }
    }
}

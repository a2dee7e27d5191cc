use std::fmt;

use thiserror::Error;

use crate::semantics::{Expr, ExprKind, Op};

/// Index of a nonterminal within its grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Production {
    /// A variable or constant leaf.
    Terminal(Expr),
    /// An operator applied to one nonterminal per operand.
    Op { op: Op, operands: Vec<NtId> },
}

impl Production {
    pub fn op(op: Op, operands: impl Into<Vec<NtId>>) -> Production {
        Production::Op {
            op,
            operands: operands.into(),
        }
    }

    pub fn is_if0(&self) -> bool {
        matches!(self, Production::Op { op: Op::If0, .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("grammar has no nonterminals")]
    Empty,
    #[error("nonterminal `{0}` is declared twice")]
    DuplicateNonterminal(String),
    #[error("production of `{nonterminal}` references unknown nonterminal #{operand}")]
    UnknownOperand { nonterminal: String, operand: usize },
    #[error("`{op}` in `{nonterminal}` takes {expected} operands, got {found}")]
    Arity {
        nonterminal: String,
        op: Op,
        expected: usize,
        found: usize,
    },
    #[error("grammar has no `if0` production")]
    MissingIf0Rule,
    #[error("nonterminal `{0}` derives no finite expression")]
    Unproductive(String),
}

/// A context-free grammar over bitvector expressions.
///
/// Nonterminal 0 is the start symbol. Production order is declaration order and
/// drives the enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    names: Vec<String>,
    productions: Vec<Vec<Production>>,
}

impl Grammar {
    /// Validates and builds a grammar. The first nonterminal is the start symbol.
    pub fn new(rules: Vec<(String, Vec<Production>)>) -> Result<Grammar, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::Empty);
        }
        let (names, productions): (Vec<_>, Vec<_>) = rules.into_iter().unzip();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(GrammarError::DuplicateNonterminal(n.clone()));
            }
        }
        for (nt, prods) in productions.iter().enumerate() {
            for p in prods {
                if let Production::Op { op, operands } = p {
                    if operands.len() != op.arity() {
                        return Err(GrammarError::Arity {
                            nonterminal: names[nt].clone(),
                            op: *op,
                            expected: op.arity(),
                            found: operands.len(),
                        });
                    }
                    if let Some(bad) = operands.iter().find(|o| o.0 >= names.len()) {
                        return Err(GrammarError::UnknownOperand {
                            nonterminal: names[nt].clone(),
                            operand: bad.0,
                        });
                    }
                }
            }
        }
        let grammar = Grammar { names, productions };
        if !grammar.productions.iter().flatten().any(Production::is_if0) {
            return Err(GrammarError::MissingIf0Rule);
        }
        let productive = grammar.productive();
        if let Some(nt) = productive.iter().position(|p| !p) {
            return Err(GrammarError::Unproductive(grammar.names[nt].clone()));
        }
        Ok(grammar)
    }

    /// A grammar with the single nonterminal `Start`.
    pub fn single(productions: Vec<Production>) -> Result<Grammar, GrammarError> {
        Grammar::new(vec![("Start".to_string(), productions)])
    }

    fn productive(&self) -> Vec<bool> {
        let mut productive = vec![false; self.names.len()];
        loop {
            let mut changed = false;
            for (nt, prods) in self.productions.iter().enumerate() {
                if productive[nt] {
                    continue;
                }
                let ok = prods.iter().any(|p| match p {
                    Production::Terminal(_) => true,
                    Production::Op { operands, .. } => operands.iter().all(|o| productive[o.0]),
                });
                if ok {
                    productive[nt] = true;
                    changed = true;
                }
            }
            if !changed {
                return productive;
            }
        }
    }

    pub fn start(&self) -> NtId {
        NtId(0)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, nt: NtId) -> &str {
        &self.names[nt.0]
    }

    pub fn lookup(&self, name: &str) -> Option<NtId> {
        self.names.iter().position(|n| n == name).map(NtId)
    }

    pub fn productions(&self, nt: NtId) -> &[Production] {
        &self.productions[nt.0]
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = NtId> {
        (0..self.names.len()).map(NtId)
    }

    pub fn production_count(&self) -> usize {
        self.productions.iter().map(Vec::len).sum()
    }

    /// The `if0` production used for decision nodes: the first one reachable in the
    /// start symbol, otherwise the first one anywhere.
    pub fn if0_operands(&self) -> Option<[NtId; 3]> {
        let find = |prods: &[Production]| {
            prods.iter().find_map(|p| match p {
                Production::Op {
                    op: Op::If0,
                    operands,
                } => Some([operands[0], operands[1], operands[2]]),
                _ => None,
            })
        };
        find(self.productions(self.start()))
            .or_else(|| self.productions.iter().find_map(|p| find(p)))
    }

    /// Whether `expr` is derivable from `nt`.
    pub fn derives(&self, nt: NtId, expr: &Expr) -> bool {
        self.productions(nt).iter().any(|p| match (p, expr.kind()) {
            (Production::Terminal(t), ExprKind::Var(_) | ExprKind::Const(_)) => t == expr,
            (Production::Op { op, operands }, ExprKind::Apply(eop, args)) => {
                op == eop
                    && operands
                        .iter()
                        .zip(args.iter())
                        .all(|(o, a)| self.derives(*o, a))
            }
            _ => false,
        })
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (nt, prods) in self.productions.iter().enumerate() {
            write!(f, "{} ::=", self.names[nt])?;
            for (i, p) in prods.iter().enumerate() {
                f.write_str(if i == 0 { " " } else { " | " })?;
                match p {
                    Production::Terminal(e) => write!(f, "{e}")?,
                    Production::Op { op, operands } => {
                        write!(f, "({op}")?;
                        for o in operands {
                            write!(f, " {}", self.names[o.0])?;
                        }
                        f.write_str(")")?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::BitVecValue;

    const S: NtId = NtId(0);

    fn basic() -> Grammar {
        Grammar::single(vec![
            Production::Terminal(Expr::var("x")),
            Production::Terminal(Expr::constant(BitVecValue::new(8, 1))),
            Production::op(Op::BvNot, [S]),
            Production::op(Op::If0, [S, S, S]),
        ])
        .unwrap()
    }

    #[test]
    fn derivability() {
        let g = basic();
        let x = Expr::var("x");
        assert!(g.derives(
            S,
            &Expr::if0(x.clone(), Expr::unary(Op::BvNot, x.clone()), x.clone())
        ));
        assert!(!g.derives(S, &Expr::var("y")));
        assert!(!g.derives(S, &Expr::binary(Op::BvAnd, x.clone(), x)));
    }

    #[test]
    fn if0_required() {
        let err = Grammar::single(vec![Production::Terminal(Expr::var("x"))]).unwrap_err();
        assert_eq!(err, GrammarError::MissingIf0Rule);
    }

    #[test]
    fn unproductive_nonterminal() {
        let err = Grammar::new(vec![
            (
                "Start".into(),
                vec![
                    Production::Terminal(Expr::var("x")),
                    Production::op(Op::If0, [S, S, NtId(1)]),
                ],
            ),
            ("Loop".into(), vec![Production::op(Op::BvNot, [NtId(1)])]),
        ])
        .unwrap_err();
        assert_eq!(err, GrammarError::Unproductive("Loop".into()));
    }

    #[test]
    fn unknown_operand() {
        let err = Grammar::single(vec![
            Production::Terminal(Expr::var("x")),
            Production::op(Op::If0, [S, S, NtId(4)]),
        ])
        .unwrap_err();
        assert!(matches!(err, GrammarError::UnknownOperand { .. }));
    }

    #[test]
    fn if0_operands_prefer_start() {
        let g = basic();
        assert_eq!(g.if0_operands(), Some([S, S, S]));
        assert_eq!(g.production_count(), 4);
    }
}

use std::collections::BTreeSet;

use super::terminals::{rank_examples, TerminalMap};
use super::UnifyError;
use crate::enumerate::{Enumerator, Limits, Signature};
use crate::semantics::{eval, Env, EvalError, Expr};
use crate::sygus::{Grammar, NtId};

/// A condition separating two conflicting examples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub expr: Expr,
    /// Values on every example input.
    pub signature: Signature,
    /// The example on which the condition evaluates to 1.
    pub then_example: usize,
    pub else_example: usize,
}

/// Smallest condition that is 1 on exactly one of examples `a` and `b` and is
/// non-constant over all examples.
pub fn find_condition(
    engine: &mut Enumerator<'_>,
    nt: NtId,
    a: usize,
    b: usize,
    limits: &Limits,
) -> Result<Condition, UnifyError> {
    let found = engine
        .enumerate_until(
            nt,
            |sig| {
                let bits = sig.bits();
                (bits[a] == 1) != (bits[b] == 1) && !sig.is_constant()
            },
            limits,
        )
        .map_err(|cause| UnifyError::UnunifiablePair { a, b, cause })?;
    let (then_example, else_example) = if found.signature.bits()[a] == 1 {
        (a, b)
    } else {
        (b, a)
    };
    Ok(Condition {
        expr: found.expr,
        signature: found.signature,
        then_example,
        else_example,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Then,
    Else,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionTree {
    Leaf {
        expr: Expr,
        /// Registry identity of `expr` in the terminal map.
        class: usize,
        bucket: BTreeSet<usize>,
    },
    Internal {
        condition: Condition,
        then_branch: Box<DecisionTree>,
        else_branch: Box<DecisionTree>,
    },
}

impl DecisionTree {
    fn leaf(map: &TerminalMap, example: usize) -> DecisionTree {
        DecisionTree::Leaf {
            expr: map.expr(example).clone(),
            class: map.class(example),
            bucket: BTreeSet::from([example]),
        }
    }

    /// Follows the branches an input takes, evaluating each condition.
    pub fn route(&self, env: &Env) -> Result<(&DecisionTree, Vec<Branch>), EvalError> {
        let mut node = self;
        let mut path = Vec::new();
        while let DecisionTree::Internal {
            condition,
            then_branch,
            else_branch,
        } = node
        {
            if eval(&condition.expr, env)?.bits() == 1 {
                path.push(Branch::Then);
                node = then_branch;
            } else {
                path.push(Branch::Else);
                node = else_branch;
            }
        }
        Ok((node, path))
    }

    /// Routing for a known example, using the conditions' cached signatures.
    fn leaf_for_mut(&mut self, example: usize) -> &mut DecisionTree {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Internal {
                    condition,
                    then_branch,
                    else_branch,
                } => {
                    node = if condition.signature.bits()[example] == 1 {
                        then_branch
                    } else {
                        else_branch
                    };
                }
                leaf => return leaf,
            }
        }
    }

    /// Adds `example` to the tree.
    ///
    /// If the reached leaf already serves the example's expression the example joins
    /// its bucket. Otherwise a condition separating it from the leaf's lowest-index
    /// example replaces the leaf with a decision node. Bucket members that the new
    /// condition sends away from their expression are inserted again.
    pub fn insert_example(
        &mut self,
        example: usize,
        map: &TerminalMap,
        engine: &mut Enumerator<'_>,
        condition_nt: NtId,
        limits: &Limits,
    ) -> Result<(), UnifyError> {
        let mut pending = vec![example];
        while let Some(e) = pending.pop() {
            let node = self.leaf_for_mut(e);
            let DecisionTree::Leaf { class, bucket, .. } = node else {
                unreachable!("routing ends at a leaf")
            };
            if *class == map.class(e) {
                bucket.insert(e);
                continue;
            }
            let rep = *bucket.first().expect("leaves are never empty");
            let condition = find_condition(engine, condition_nt, e, rep, limits)?;

            let DecisionTree::Leaf {
                expr,
                class,
                bucket,
            } = std::mem::replace(node, DecisionTree::leaf(map, e))
            else {
                unreachable!()
            };
            let rep_on_then = condition.then_example == rep;
            let mut kept = BTreeSet::new();
            let mut displaced = Vec::new();
            for m in bucket {
                if (condition.signature.bits()[m] == 1) == rep_on_then {
                    kept.insert(m);
                } else {
                    displaced.push(m);
                }
            }
            let old = DecisionTree::Leaf {
                expr,
                class,
                bucket: kept,
            };
            let new = DecisionTree::leaf(map, e);
            let (then_branch, else_branch) = if rep_on_then { (old, new) } else { (new, old) };
            *node = DecisionTree::Internal {
                condition,
                then_branch: Box::new(then_branch),
                else_branch: Box::new(else_branch),
            };
            pending.extend(displaced.into_iter().rev());
        }
        Ok(())
    }

    pub fn internal_count(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Internal {
                then_branch,
                else_branch,
                ..
            } => 1 + then_branch.internal_count() + else_branch.internal_count(),
        }
    }

    /// Leaves in then-first depth-first order.
    pub fn leaves(&self) -> Vec<&DecisionTree> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if let DecisionTree::Leaf { .. } = n {
                out.push(n)
            }
        });
        out
    }

    pub fn conditions(&self) -> Vec<&Condition> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if let DecisionTree::Internal { condition, .. } = n {
                out.push(condition)
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a DecisionTree)) {
        f(self);
        if let DecisionTree::Internal {
            then_branch,
            else_branch,
            ..
        } = self
        {
            then_branch.visit(f);
            else_branch.visit(f);
        }
    }
}

/// Builds the decision tree for a complete terminal map.
///
/// With a single distinct expression the result is one leaf holding every example.
/// Otherwise the first example in rank order is separated from the first later
/// example with a different expression, and the rest are inserted in rank order.
pub fn build_tree(
    map: &TerminalMap,
    engine: &mut Enumerator<'_>,
    condition_nt: NtId,
    limits: &Limits,
) -> Result<DecisionTree, UnifyError> {
    let order = rank_examples(map);
    let Some(&first) = order.first() else {
        return Err(UnifyError::NoExamples);
    };
    let Some(&partner) = order.iter().find(|&&k| map.class(k) != map.class(first)) else {
        return Ok(DecisionTree::Leaf {
            expr: map.expr(first).clone(),
            class: map.class(first),
            bucket: order.into_iter().collect(),
        });
    };
    let condition = find_condition(engine, condition_nt, first, partner, limits)?;
    let then_leaf = DecisionTree::leaf(map, condition.then_example);
    let else_leaf = DecisionTree::leaf(map, condition.else_example);
    let mut tree = DecisionTree::Internal {
        condition,
        then_branch: Box::new(then_leaf),
        else_branch: Box::new(else_leaf),
    };
    for &k in &order {
        if k != first && k != partner {
            tree.insert_example(k, map, engine, condition_nt, limits)?;
        }
    }
    Ok(tree)
}

/// Materializes the tree as nested `if0` applications and checks the result is
/// derivable from the grammar's start symbol.
pub fn tree_to_expr(tree: &DecisionTree, grammar: &Grammar) -> Result<Expr, UnifyError> {
    fn build(tree: &DecisionTree) -> Expr {
        match tree {
            DecisionTree::Leaf { expr, .. } => expr.clone(),
            DecisionTree::Internal {
                condition,
                then_branch,
                else_branch,
            } => Expr::if0(
                condition.expr.clone(),
                build(then_branch),
                build(else_branch),
            ),
        }
    }
    let expr = build(tree);
    if grammar.derives(grammar.start(), &expr) {
        Ok(expr)
    } else {
        Err(UnifyError::GrammarViolation(expr.to_sexpr()))
    }
}

use std::collections::BTreeSet;

use super::UnifyError;
use crate::enumerate::{Enumerator, Limits};
use crate::semantics::Expr;
use crate::sygus::Problem;

/// Assignment of a branch-free expression to every example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalMap {
    /// Distinct expressions in discovery order, with the examples they serve.
    registry: Vec<(Expr, BTreeSet<usize>)>,
    /// Registry slot of each example.
    class: Vec<usize>,
}

impl TerminalMap {
    /// Groups structurally equal expressions. `assignment[k]` belongs to example `k`.
    pub fn from_assignment(assignment: Vec<Expr>) -> TerminalMap {
        let mut registry: Vec<(Expr, BTreeSet<usize>)> = Vec::new();
        let mut class = Vec::with_capacity(assignment.len());
        for (k, e) in assignment.into_iter().enumerate() {
            match registry.iter().position(|(r, _)| *r == e) {
                Some(slot) => {
                    registry[slot].1.insert(k);
                    class.push(slot);
                }
                None => {
                    class.push(registry.len());
                    registry.push((e, BTreeSet::from([k])));
                }
            }
        }
        TerminalMap { registry, class }
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn expr(&self, example: usize) -> &Expr {
        &self.registry[self.class[example]].0
    }

    /// Registry identity of the example's expression.
    pub fn class(&self, example: usize) -> usize {
        self.class[example]
    }

    /// Number of examples sharing this example's expression.
    pub fn popularity(&self, example: usize) -> usize {
        self.registry[self.class[example]].1.len()
    }

    pub fn distinct(&self) -> usize {
        self.registry.len()
    }

    pub fn registry(&self) -> &[(Expr, BTreeSet<usize>)] {
        &self.registry
    }
}

/// Finds a terminal expression for every example.
///
/// Examples are visited in index order. Each still-unmapped example gets the first
/// candidate consistent with it, and that candidate is also assigned to every
/// other unmapped example it satisfies. All searches share `engine`.
pub fn map_terminals(
    problem: &Problem,
    engine: &mut Enumerator<'_>,
    limits: &Limits,
) -> Result<TerminalMap, UnifyError> {
    let outputs: Vec<u64> = problem.examples.iter().map(|e| e.output.bits()).collect();
    let mut assignment: Vec<Option<Expr>> = vec![None; outputs.len()];
    let start = problem.grammar.start();
    for k in 0..outputs.len() {
        if assignment[k].is_some() {
            continue;
        }
        let found = engine
            .enumerate_until(start, |sig| sig.bits()[k] == outputs[k], limits)
            .map_err(|cause| UnifyError::UnsolvableExample { index: k, cause })?;
        let bits = found.signature.bits();
        for (j, slot) in assignment.iter_mut().enumerate().skip(k) {
            if slot.is_none() && bits[j] == outputs[j] {
                *slot = Some(found.expr.clone());
            }
        }
    }
    Ok(TerminalMap::from_assignment(
        assignment
            .into_iter()
            .map(|e| e.expect("every example mapped"))
            .collect(),
    ))
}

/// Example indices ordered by ascending popularity of their expression, ties by index.
pub fn rank_examples(map: &TerminalMap) -> Vec<usize> {
    let mut order: Vec<usize> = (0..map.len()).collect();
    order.sort_by_key(|&k| (map.popularity(k), k));
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{BitVecValue, Env, Op};
    use crate::sygus::{Example, Grammar, NtId, Production};

    fn x() -> Expr {
        Expr::var("x")
    }

    fn not_x() -> Expr {
        Expr::unary(Op::BvNot, x())
    }

    #[test]
    fn rank_unique_first() {
        // t1 serves {0, 2, 3}, t2 serves {1}
        let map = TerminalMap::from_assignment(vec![x(), not_x(), x(), x()]);
        assert_eq!(rank_examples(&map), vec![1, 0, 2, 3]);
    }

    #[test]
    fn rank_degenerate_cases() {
        let same = TerminalMap::from_assignment(vec![x(); 4]);
        assert_eq!(rank_examples(&same), vec![0, 1, 2, 3]);
        let c = |b| Expr::constant(BitVecValue::new(8, b));
        let unique = TerminalMap::from_assignment(vec![c(3), c(1), c(2)]);
        assert_eq!(rank_examples(&unique), vec![0, 1, 2]);
    }

    #[test]
    fn registry_tracks_identity() {
        let map = TerminalMap::from_assignment(vec![x(), not_x(), x()]);
        assert_eq!(map.distinct(), 2);
        assert_eq!(map.class(0), map.class(2));
        assert_ne!(map.class(0), map.class(1));
        assert_eq!(map.popularity(0), 2);
        assert_eq!(map.registry()[1].1, BTreeSet::from([1]));
    }

    fn problem(pairs: &[(u64, u64)]) -> Problem {
        let s = NtId(0);
        let w = 8;
        Problem {
            name: "f".into(),
            params: vec!["x".into()],
            width: w,
            grammar: Grammar::single(vec![
                Production::Terminal(x()),
                Production::Terminal(Expr::constant(BitVecValue::new(w, 0))),
                Production::Terminal(Expr::constant(BitVecValue::new(w, 1))),
                Production::op(Op::BvAdd, [s, s]),
                Production::op(Op::BvAnd, [s, s]),
                Production::op(Op::If0, [s, s, s]),
            ])
            .unwrap(),
            examples: pairs
                .iter()
                .enumerate()
                .map(|(index, &(i, o))| Example {
                    index,
                    inputs: vec![BitVecValue::new(w, i)],
                    output: BitVecValue::new(w, o),
                })
                .collect(),
        }
    }

    fn envs(p: &Problem) -> Vec<Env> {
        p.envs()
    }

    #[test]
    fn shared_expression_maps_several_examples() {
        let p = problem(&[(5, 5), (9, 9), (3, 6)]);
        let mut en = Enumerator::new(&p.grammar, envs(&p), p.width, &[Op::If0]).unwrap();
        let map = map_terminals(&p, &mut en, &Limits::default()).unwrap();
        assert_eq!(*map.expr(0), x());
        assert_eq!(*map.expr(1), x());
        assert_eq!(map.expr(2).to_sexpr(), "(bvadd x x)");
        assert_eq!(map.distinct(), 2);
    }

    #[test]
    fn single_example() {
        let p = problem(&[(7, 14)]);
        let mut en = Enumerator::new(&p.grammar, envs(&p), p.width, &[Op::If0]).unwrap();
        let map = map_terminals(&p, &mut en, &Limits::default()).unwrap();
        assert_eq!(map.len(), 1);
        assert_eq!(map.distinct(), 1);
    }

    #[test]
    fn unreachable_output_reports_example() {
        // 0x80 -> 0x7f needs more than three nodes
        let p = problem(&[(0, 0), (0x80, 0x7F)]);
        let mut en = Enumerator::new(&p.grammar, envs(&p), p.width, &[Op::If0]).unwrap();
        let limits = Limits {
            max_size: 4,
            ..Limits::default()
        };
        let err = map_terminals(&p, &mut en, &limits).unwrap_err();
        assert!(
            matches!(err, UnifyError::UnsolvableExample { index: 1, .. }),
            "{err}"
        );
    }
}

use super::sexp::{read_all, SExp};
use super::{FrontendError, Problem};
use crate::semantics::{BitVecValue, Expr, Op};

/// Renders the solution as a single `define-fun`.
pub fn emit_solution(problem: &Problem, solution: &Expr) -> String {
    let w = problem.width;
    format!(
        "(define-fun {} (({} (BitVec {w}))) (BitVec {w}) {})",
        problem.name,
        problem.params[0],
        solution.to_sexpr()
    )
}

/// A parsed `define-fun` for a unary bitvector function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub name: String,
    pub param: String,
    pub width: u32,
    pub body: Expr,
}

fn bad(sexp: &SExp, message: &str) -> FrontendError {
    let pos = sexp.pos();
    FrontendError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.to_string(),
    }
}

fn sort_width(sexp: &SExp) -> Option<u32> {
    match sexp.as_list()? {
        [SExp::Atom(b, _), SExp::Atom(n, _)] if b == "BitVec" => n.parse().ok(),
        [SExp::Atom(u, _), SExp::Atom(b, _), SExp::Atom(n, _)] if u == "_" && b == "BitVec" => {
            n.parse().ok()
        }
        _ => None,
    }
    .filter(|w| (1..=64).contains(w))
}

/// Parses the output of [`emit_solution`] back.
pub fn parse_solution(text: &str) -> Result<Solution, FrontendError> {
    let items = read_all(text).map_err(|e| FrontendError::Syntax {
        line: e.pos.line,
        col: e.pos.col,
        message: e.message,
    })?;
    let [def] = items.as_slice() else {
        return Err(FrontendError::Unsupported(
            "expected exactly one define-fun".into(),
        ));
    };
    let Some([SExp::Atom(kw, _), SExp::Atom(name, _), SExp::List(params, _), ret, body]) =
        def.as_list()
    else {
        return Err(bad(
            def,
            "expected (define-fun <name> (<param>) <sort> <body>)",
        ));
    };
    if kw != "define-fun" {
        return Err(bad(def, "expected define-fun"));
    }
    let [param] = params.as_slice() else {
        return Err(FrontendError::UnsupportedArity(params.len()));
    };
    let Some([SExp::Atom(param, _), sort]) = param.as_list() else {
        return Err(bad(param, "expected (<name> <sort>)"));
    };
    let width = sort_width(sort).ok_or_else(|| bad(sort, "expected a bitvector sort"))?;
    if sort_width(ret) != Some(width) {
        return Err(bad(ret, "return sort differs from parameter sort"));
    }
    let body = parse_term(body, &[param.as_str()], width)?;
    Ok(Solution {
        name: name.clone(),
        param: param.clone(),
        width,
        body,
    })
}

/// Converts a term over `params`, literals and catalogue operators into an [`Expr`].
pub fn parse_term(sexp: &SExp, params: &[&str], width: u32) -> Result<Expr, FrontendError> {
    match sexp {
        SExp::Atom(a, _) => {
            if params.contains(&a.as_str()) {
                return Ok(Expr::var(a.as_str()));
            }
            match BitVecValue::parse_literal(a) {
                Some(v) if v.width() == width => Ok(Expr::constant(v)),
                Some(_) => Err(bad(sexp, "literal width mismatch")),
                None => Err(bad(sexp, "unknown symbol")),
            }
        }
        SExp::List(items, _) => {
            let head = sexp
                .head()
                .ok_or_else(|| bad(sexp, "expected an application"))?;
            let op = Op::from_name(head).ok_or_else(|| FrontendError::UnknownOperator {
                name: head.to_string(),
                line: sexp.pos().line,
                col: sexp.pos().col,
            })?;
            if items.len() - 1 != op.arity() {
                return Err(bad(sexp, "wrong operand count"));
            }
            let args = items[1..]
                .iter()
                .map(|a| parse_term(a, params, width))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Expr::apply(op, args))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sygus::{Example, Grammar, Production};

    fn problem(width: u32) -> Problem {
        Problem {
            name: "f".into(),
            params: vec!["x".into()],
            width,
            grammar: Grammar::single(vec![
                Production::Terminal(Expr::var("x")),
                Production::op(Op::If0, [crate::sygus::NtId(0); 3]),
            ])
            .unwrap(),
            examples: vec![Example {
                index: 0,
                inputs: vec![BitVecValue::zero(width)],
                output: BitVecValue::zero(width),
            }],
        }
    }

    #[test]
    fn identity_solution() {
        assert_eq!(
            emit_solution(&problem(64), &Expr::var("x")),
            "(define-fun f ((x (BitVec 64))) (BitVec 64) x)"
        );
    }

    #[test]
    fn width_appears_twice() {
        let text = emit_solution(&problem(8), &Expr::var("x"));
        assert_eq!(text.matches("(BitVec 8)").count(), 2);
    }

    #[test]
    fn if0_body_round_trips() {
        let x = Expr::var("x");
        let body = Expr::if0(
            Expr::binary(Op::BvAnd, x.clone(), Expr::constant(BitVecValue::one(16))),
            Expr::unary(Op::BvNot, x.clone()),
            x,
        );
        let text = emit_solution(&problem(16), &body);
        assert_eq!(
            text,
            "(define-fun f ((x (BitVec 16))) (BitVec 16) (if0 (bvand x #x0001) (bvnot x) x))"
        );
        let parsed = parse_solution(&text).unwrap();
        assert_eq!(parsed.body, body);
        assert_eq!(parsed.width, 16);
        assert_eq!(parsed.param, "x");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_solution("(define-fun f ((x (BitVec 8))) (BitVec 8) y)").is_err());
        assert!(parse_solution("(define-fun f ((x (BitVec 8))) (BitVec 16) x)").is_err());
        assert!(parse_solution("(define-fun f () (BitVec 8) #x00)").is_err());
    }
}

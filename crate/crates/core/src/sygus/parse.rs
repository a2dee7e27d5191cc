use rustc_hash::FxHashMap;

use super::grammar::{Grammar, NtId, Production};
use super::sexp::{read_all, Pos, SExp};
use super::{Example, FrontendError, Problem};
use crate::semantics::{mask, BitVecValue, Expr, Op};

fn syntax(pos: Pos, message: impl Into<String>) -> FrontendError {
    FrontendError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn unsupported(pos: Pos, message: impl std::fmt::Display) -> FrontendError {
    FrontendError::Unsupported(format!("{message} (at {pos})"))
}

/// `(BitVec n)` or `(_ BitVec n)`.
fn parse_sort(sexp: &SExp) -> Result<u32, FrontendError> {
    let width = match sexp.as_list() {
        Some([SExp::Atom(b, _), SExp::Atom(n, _)]) if b == "BitVec" => n.parse::<u32>().ok(),
        Some([SExp::Atom(u, _), SExp::Atom(b, _), SExp::Atom(n, _)])
            if u == "_" && b == "BitVec" =>
        {
            n.parse::<u32>().ok()
        }
        _ => None,
    };
    match width {
        Some(w) if (1..=64).contains(&w) => Ok(w),
        _ => Err(unsupported(sexp.pos(), format_args!("sort `{sexp}`"))),
    }
}

fn literal(text: &str, pos: Pos, width: u32) -> Result<Option<BitVecValue>, FrontendError> {
    if !text.starts_with('#') {
        return Ok(None);
    }
    let value = BitVecValue::parse_literal(text)
        .ok_or_else(|| syntax(pos, format!("bad literal `{text}`")))?;
    if value.width() != width {
        return Err(syntax(
            pos,
            format!(
                "literal `{text}` has width {}, expected {width}",
                value.width()
            ),
        ));
    }
    Ok(Some(value))
}

struct SynthFun {
    name: String,
    param: String,
    width: u32,
    grammar_sexp: SExp,
}

struct MacroDef {
    op: Op,
    params: Vec<(String, u32)>,
    ret: u32,
    body: SExp,
    pos: Pos,
}

/// Parses a SyGuS-IF v1 problem and validates it as a unary PBE task.
pub fn parse_problem(text: &str) -> Result<Problem, FrontendError> {
    let commands = read_all(text).map_err(|e| syntax(e.pos, e.message))?;

    let mut synth: Option<SynthFun> = None;
    let mut macros = Vec::new();
    let mut vars: Vec<(String, u32, Pos)> = Vec::new();
    let mut constraints = Vec::new();

    for cmd in &commands {
        let pos = cmd.pos();
        let items = cmd
            .as_list()
            .ok_or_else(|| syntax(pos, "expected a command"))?;
        let head = cmd
            .head()
            .ok_or_else(|| syntax(pos, "expected a command"))?;
        match head {
            "set-logic" => match items.get(1).and_then(SExp::as_atom) {
                Some(logic) if logic.ends_with("BV") => {}
                Some(logic) => return Err(unsupported(pos, format_args!("logic `{logic}`"))),
                None => return Err(syntax(pos, "set-logic needs a logic name")),
            },
            "set-option" | "set-info" | "check-synth" => {}
            "define-fun" => macros.push(parse_macro(items, pos)?),
            "declare-var" => {
                let [_, SExp::Atom(name, _), sort] = items else {
                    return Err(syntax(pos, "expected (declare-var <name> <sort>)"));
                };
                vars.push((name.clone(), parse_sort(sort)?, pos));
            }
            "constraint" => {
                let [_, term] = items else {
                    return Err(syntax(pos, "expected (constraint <term>)"));
                };
                constraints.push(term.clone());
            }
            "synth-fun" => {
                if synth.is_some() {
                    return Err(unsupported(pos, "more than one synth-fun"));
                }
                synth = Some(parse_synth_fun(items, pos)?);
            }
            other => return Err(unsupported(pos, format_args!("command `{other}`"))),
        }
    }

    let synth = synth.ok_or_else(|| FrontendError::Unsupported("no synth-fun command".into()))?;
    let width = synth.width;

    for m in &macros {
        check_macro(m, width)?;
    }
    for (name, w, pos) in &vars {
        if *w != width {
            return Err(unsupported(
                *pos,
                format_args!("variable `{name}` has width {w}"),
            ));
        }
    }

    let grammar = parse_grammar(&synth.grammar_sexp, &synth.param, width)?;
    let declared: Vec<String> = vars.into_iter().map(|(n, ..)| n).collect();
    let examples = detect_pbe(&constraints, &synth.name, &declared, width)?;
    if examples.is_empty() {
        return Err(FrontendError::NoExamples);
    }
    let mut seen: FxHashMap<&[BitVecValue], &Example> = FxHashMap::default();
    for ex in &examples {
        if let Some(prev) = seen.insert(&ex.inputs, ex) {
            if prev.output != ex.output {
                return Err(FrontendError::InconsistentExamples {
                    first: prev.index,
                    second: ex.index,
                });
            }
        }
    }

    Ok(Problem {
        name: synth.name,
        params: vec![synth.param],
        width,
        grammar,
        examples,
    })
}

fn parse_synth_fun(items: &[SExp], pos: Pos) -> Result<SynthFun, FrontendError> {
    if items.len() < 4 {
        return Err(syntax(
            pos,
            "expected (synth-fun <name> (<params>) <sort> <grammar>)",
        ));
    }
    let name = items[1]
        .as_atom()
        .ok_or_else(|| syntax(items[1].pos(), "expected function name"))?;
    let params = items[2]
        .as_list()
        .ok_or_else(|| syntax(items[2].pos(), "expected parameter list"))?;
    if params.len() != 1 {
        return Err(FrontendError::UnsupportedArity(params.len()));
    }
    let Some([SExp::Atom(param, _), sort]) = params[0].as_list() else {
        return Err(syntax(params[0].pos(), "expected (<name> <sort>)"));
    };
    let width = parse_sort(sort)?;
    let ret = parse_sort(&items[3])?;
    if ret != width {
        return Err(unsupported(pos, "parameter and return widths differ"));
    }
    let grammar_sexp = match items.len() {
        4 => return Err(unsupported(pos, "synth-fun without a grammar")),
        5 => items[4].clone(),
        6 => {
            return Err(unsupported(
                pos,
                "SyGuS v2 grammar syntax; only the v1 format is accepted",
            ))
        }
        _ => return Err(syntax(pos, "malformed synth-fun")),
    };
    Ok(SynthFun {
        name: name.to_string(),
        param: param.clone(),
        width,
        grammar_sexp,
    })
}

struct GrammarBuilder<'a> {
    names: Vec<String>,
    rules: Vec<Vec<Production>>,
    param: &'a str,
    width: u32,
}

impl GrammarBuilder<'_> {
    fn production(&mut self, owner: usize, sexp: &SExp) -> Result<Production, FrontendError> {
        let pos = sexp.pos();
        match sexp {
            SExp::Atom(a, _) => {
                if a == self.param {
                    Ok(Production::Terminal(Expr::var(a.as_str())))
                } else if let Some(v) = literal(a, pos, self.width)? {
                    Ok(Production::Terminal(Expr::constant(v)))
                } else if self.names.contains(a) {
                    Err(unsupported(pos, format_args!("unit production `{a}`")))
                } else {
                    Err(syntax(pos, format!("unknown symbol `{a}` in grammar")))
                }
            }
            SExp::List(items, _) => {
                let head = sexp
                    .head()
                    .ok_or_else(|| syntax(pos, "expected a production"))?;
                if matches!(
                    head,
                    "Constant" | "Variable" | "InputVariable" | "LocalVariable"
                ) {
                    return Err(unsupported(pos, format_args!("`{head}` productions")));
                }
                let op = Op::from_name(head).ok_or_else(|| FrontendError::UnknownOperator {
                    name: head.to_string(),
                    line: pos.line,
                    col: pos.col,
                })?;
                if items.len() - 1 != op.arity() {
                    return Err(syntax(
                        pos,
                        format!(
                            "`{op}` takes {} operands, got {}",
                            op.arity(),
                            items.len() - 1
                        ),
                    ));
                }
                let operands = items[1..]
                    .iter()
                    .map(|o| self.operand(owner, o))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Production::op(op, operands))
            }
        }
    }

    /// Nonterminal names resolve directly; any other operand becomes an auxiliary
    /// nonterminal with that single production.
    fn operand(&mut self, owner: usize, sexp: &SExp) -> Result<NtId, FrontendError> {
        if let Some(a) = sexp.as_atom() {
            if let Some(i) = self.names.iter().position(|n| n == a) {
                return Ok(NtId(i));
            }
        }
        let id = self.names.len();
        self.names.push(format!("{}${}", self.names[owner], id));
        self.rules.push(Vec::new());
        let p = self.production(id, sexp)?;
        self.rules[id].push(p);
        Ok(NtId(id))
    }
}

fn parse_grammar(sexp: &SExp, param: &str, width: u32) -> Result<Grammar, FrontendError> {
    let defs = sexp
        .as_list()
        .ok_or_else(|| syntax(sexp.pos(), "expected grammar rule list"))?;
    let mut builder = GrammarBuilder {
        names: Vec::new(),
        rules: Vec::new(),
        param,
        width,
    };
    let mut bodies = Vec::new();
    for def in defs {
        let Some([SExp::Atom(name, _), sort, SExp::List(prods, _)]) = def.as_list() else {
            return Err(syntax(
                def.pos(),
                "expected (<nonterminal> <sort> (<productions>))",
            ));
        };
        if parse_sort(sort)? != width {
            return Err(unsupported(
                sort.pos(),
                "nonterminal sort differs from the function width",
            ));
        }
        builder.names.push(name.clone());
        builder.rules.push(Vec::new());
        bodies.push(prods);
    }
    for (nt, prods) in bodies.into_iter().enumerate() {
        for p in prods {
            let prod = builder.production(nt, p)?;
            builder.rules[nt].push(prod);
        }
    }
    Ok(Grammar::new(
        builder.names.into_iter().zip(builder.rules).collect(),
    )?)
}

fn parse_macro(items: &[SExp], pos: Pos) -> Result<MacroDef, FrontendError> {
    let [_, SExp::Atom(name, _), SExp::List(params, _), ret, body] = items else {
        return Err(syntax(
            pos,
            "expected (define-fun <name> (<params>) <sort> <body>)",
        ));
    };
    let op = Op::from_name(name).ok_or_else(|| {
        unsupported(
            pos,
            format_args!("define-fun `{name}` is not a catalogue operator"),
        )
    })?;
    let params = params
        .iter()
        .map(|p| match p.as_list() {
            Some([SExp::Atom(n, _), sort]) => Ok((n.clone(), parse_sort(sort)?)),
            _ => Err(syntax(p.pos(), "expected (<name> <sort>)")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if params.len() != op.arity() {
        return Err(unsupported(
            pos,
            format_args!(
                "define-fun `{name}` has {} parameters, `{op}` takes {}",
                params.len(),
                op.arity()
            ),
        ));
    }
    Ok(MacroDef {
        op,
        params,
        ret: parse_sort(ret)?,
        body: body.clone(),
        pos,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Bv(u64),
    Bool(bool),
}

/// Evaluates a macro body made of core connectives and catalogue operators.
fn eval_body(t: &SExp, env: &[(String, u64)], width: u32) -> Option<Val> {
    match t {
        SExp::Atom(a, pos) => match a.as_str() {
            "true" => Some(Val::Bool(true)),
            "false" => Some(Val::Bool(false)),
            _ => {
                if let Some((_, v)) = env.iter().find(|(n, _)| n == a) {
                    return Some(Val::Bv(*v));
                }
                literal(a, *pos, width)
                    .ok()
                    .flatten()
                    .map(|v| Val::Bv(v.bits()))
            }
        },
        SExp::List(items, _) => {
            let head = t.head()?;
            let args = items[1..]
                .iter()
                .map(|a| eval_body(a, env, width))
                .collect::<Option<Vec<_>>>()?;
            let bool_at = |i: usize| match args.get(i)? {
                Val::Bool(b) => Some(*b),
                Val::Bv(_) => None,
            };
            match head {
                "ite" if args.len() == 3 => Some(if bool_at(0)? { args[1] } else { args[2] }),
                "=" if args.len() == 2 => Some(Val::Bool(args[0] == args[1])),
                "not" if args.len() == 1 => Some(Val::Bool(!bool_at(0)?)),
                "and" => (0..args.len())
                    .try_fold(true, |acc, i| Some(acc && bool_at(i)?))
                    .map(Val::Bool),
                "or" => (0..args.len())
                    .try_fold(false, |acc, i| Some(acc || bool_at(i)?))
                    .map(Val::Bool),
                _ => {
                    let op = Op::from_name(head)?;
                    if args.len() != op.arity() {
                        return None;
                    }
                    let bits = args
                        .iter()
                        .map(|a| match a {
                            Val::Bv(b) => Some(*b),
                            Val::Bool(_) => None,
                        })
                        .collect::<Option<Vec<_>>>()?;
                    Some(Val::Bv(op.apply(width, &bits)))
                }
            }
        }
    }
}

/// A define-fun may only rename a catalogue operator; its body is probed on a
/// fixed set of inputs to confirm it agrees with the built-in semantics.
fn check_macro(m: &MacroDef, width: u32) -> Result<(), FrontendError> {
    if m.ret != width || m.params.iter().any(|(_, w)| *w != width) {
        return Err(unsupported(
            m.pos,
            format_args!("define-fun `{}` uses another width", m.op),
        ));
    }
    let full = mask(width);
    let probes: Vec<u64> = [
        0,
        1,
        2,
        3,
        0x10,
        full >> 1,
        full,
        0x0123_4567_89ab_cdef & full,
        1 << (width - 1),
    ]
    .into_iter()
    .collect();
    let mut tuple = vec![0usize; m.op.arity()];
    loop {
        let args: Vec<u64> = tuple.iter().map(|&i| probes[i]).collect();
        let env: Vec<(String, u64)> = m
            .params
            .iter()
            .map(|(n, _)| n.clone())
            .zip(args.iter().copied())
            .collect();
        match eval_body(&m.body, &env, width) {
            Some(Val::Bv(v)) if v == m.op.apply(width, &args) => {}
            Some(_) => {
                return Err(unsupported(
                    m.pos,
                    format_args!(
                        "define-fun `{}` disagrees with the built-in semantics",
                        m.op
                    ),
                ))
            }
            None => {
                return Err(unsupported(
                    m.pos,
                    format_args!(
                        "define-fun `{}` has a body outside the supported fragment",
                        m.op
                    ),
                ))
            }
        }
        // odometer over the probe tuple
        let mut i = 0;
        loop {
            if i == tuple.len() {
                return Ok(());
            }
            tuple[i] += 1;
            if tuple[i] < probes.len() {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

enum Side<'a> {
    Call(&'a [SExp]),
    Lit(BitVecValue),
    Var(&'a str),
    Other,
}

fn classify<'a>(
    t: &'a SExp,
    function: &str,
    declared: &[String],
    width: u32,
) -> Result<Side<'a>, FrontendError> {
    Ok(match t {
        SExp::Atom(a, pos) => {
            if let Some(v) = literal(a, *pos, width)? {
                Side::Lit(v)
            } else if declared.iter().any(|d| d == a) {
                Side::Var(a)
            } else {
                Side::Other
            }
        }
        SExp::List(items, _) if t.head() == Some(function) => Side::Call(&items[1..]),
        SExp::List(..) => Side::Other,
    })
}

fn equality(t: &SExp) -> Option<(&SExp, &SExp)> {
    match t.as_list()? {
        [SExp::Atom(eq, _), a, b] if eq == "=" => Some((a, b)),
        _ => None,
    }
}

fn not_pbe(t: &SExp) -> FrontendError {
    FrontendError::NotPbe(format!(
        "constraint at {} is not an input/output example: {t}",
        t.pos()
    ))
}

/// Extracts one example per constraint, in file order.
///
/// Accepts `(= (f <lit>) <lit>)` in either argument order, and the implication form
/// `(=> (and (= v <lit>) ... (= (f v) t)) (= t <lit>))` which is canonicalized into the
/// direct form.
pub fn detect_pbe(
    constraints: &[SExp],
    function: &str,
    declared: &[String],
    width: u32,
) -> Result<Vec<Example>, FrontendError> {
    let mut examples = Vec::with_capacity(constraints.len());
    for (index, c) in constraints.iter().enumerate() {
        let (inputs, output) = match c.head() {
            Some("=") => direct_example(c, function, declared, width)?,
            Some("=>") => implication_example(c, function, declared, width)?,
            _ => return Err(not_pbe(c)),
        };
        examples.push(Example {
            index,
            inputs,
            output,
        });
    }
    Ok(examples)
}

fn ground_args(args: &[SExp], c: &SExp, width: u32) -> Result<Vec<BitVecValue>, FrontendError> {
    args.iter()
        .map(|a| match a {
            SExp::Atom(text, pos) => literal(text, *pos, width)?.ok_or_else(|| not_pbe(c)),
            SExp::List(..) => Err(not_pbe(c)),
        })
        .collect()
}

fn direct_example(
    c: &SExp,
    function: &str,
    declared: &[String],
    width: u32,
) -> Result<(Vec<BitVecValue>, BitVecValue), FrontendError> {
    let (a, b) = equality(c).ok_or_else(|| not_pbe(c))?;
    match (
        classify(a, function, declared, width)?,
        classify(b, function, declared, width)?,
    ) {
        (Side::Call(args), Side::Lit(o)) | (Side::Lit(o), Side::Call(args)) => {
            Ok((ground_args(args, c, width)?, o))
        }
        _ => Err(not_pbe(c)),
    }
}

fn implication_example(
    c: &SExp,
    function: &str,
    declared: &[String],
    width: u32,
) -> Result<(Vec<BitVecValue>, BitVecValue), FrontendError> {
    let Some([_, antecedent, consequent]) = c.as_list() else {
        return Err(not_pbe(c));
    };
    let conjuncts: &[SExp] = match antecedent.as_list() {
        Some([SExp::Atom(and, _), rest @ ..]) if and == "and" => rest,
        _ => std::slice::from_ref(antecedent),
    };

    let mut bindings: Vec<(&str, BitVecValue)> = Vec::new();
    let mut call: Option<(&[SExp], &str)> = None;
    for conj in conjuncts {
        let (a, b) = equality(conj).ok_or_else(|| not_pbe(c))?;
        match (
            classify(a, function, declared, width)?,
            classify(b, function, declared, width)?,
        ) {
            (Side::Var(v), Side::Lit(l)) | (Side::Lit(l), Side::Var(v)) => {
                if bindings.iter().any(|(n, old)| *n == v && *old != l) {
                    return Err(not_pbe(c));
                }
                bindings.push((v, l));
            }
            (Side::Call(args), Side::Var(t)) | (Side::Var(t), Side::Call(args))
                if call.is_none() =>
            {
                call = Some((args, t));
            }
            _ => return Err(not_pbe(c)),
        }
    }

    let (a, b) = equality(consequent).ok_or_else(|| not_pbe(c))?;
    let (args, output) = match (
        classify(a, function, declared, width)?,
        classify(b, function, declared, width)?,
    ) {
        (Side::Var(t), Side::Lit(o)) | (Side::Lit(o), Side::Var(t)) => match call {
            Some((args, result)) if result == t => (args, o),
            _ => return Err(not_pbe(c)),
        },
        (Side::Call(args), Side::Lit(o)) | (Side::Lit(o), Side::Call(args)) if call.is_none() => {
            (args, o)
        }
        _ => return Err(not_pbe(c)),
    };

    let inputs = args
        .iter()
        .map(|arg| match classify(arg, function, declared, width)? {
            Side::Lit(v) => Ok(v),
            Side::Var(v) => bindings
                .iter()
                .find(|(n, _)| *n == v)
                .map(|(_, l)| *l)
                .ok_or_else(|| not_pbe(c)),
            _ => Err(not_pbe(c)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((inputs, output))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "(set-logic BV)\n\
        (synth-fun f ((x (BitVec 8))) (BitVec 8)\n\
          ((Start (BitVec 8) (x #x00 #x01 (bvnot Start) (bvand Start Start) (bvadd Start Start) (if0 Start Start Start)))))\n";

    fn problem(constraints: &str) -> Result<Problem, FrontendError> {
        parse_problem(&format!("{HEADER}{constraints}\n(check-synth)\n"))
    }

    fn bv(bits: u64) -> BitVecValue {
        BitVecValue::new(8, bits)
    }

    #[test]
    fn direct_constraint() {
        let p = problem("(constraint (= (f #x03) #x06))").unwrap();
        assert_eq!(
            p.examples,
            vec![Example {
                index: 0,
                inputs: vec![bv(3)],
                output: bv(6)
            }]
        );
        assert_eq!(p.params, vec!["x".to_string()]);
        assert_eq!(p.width, 8);
    }

    #[test]
    fn reversed_constraint() {
        let p = problem("(constraint (= #x0A (f #x05)))").unwrap();
        assert_eq!(p.examples[0].inputs, vec![bv(5)]);
        assert_eq!(p.examples[0].output, bv(0x0A));
    }

    #[test]
    fn implication_constraint() {
        let p = problem(
            "(declare-var v0 (BitVec 8))\n(declare-var vt (BitVec 8))\n\
             (constraint (=> (and (= v0 #x01) (= (f v0) vt)) (= vt #x02)))",
        )
        .unwrap();
        assert_eq!(p.examples[0].inputs, vec![bv(1)]);
        assert_eq!(p.examples[0].output, bv(2));
    }

    #[test]
    fn non_ground_constraint_is_not_pbe() {
        let err = problem("(declare-var x (BitVec 8))\n(constraint (bvult (f x) x))").unwrap_err();
        assert!(matches!(err, FrontendError::NotPbe(_)), "{err}");
        let err = problem("(declare-var y (BitVec 8))\n(constraint (= (f y) #x01))").unwrap_err();
        assert!(matches!(err, FrontendError::NotPbe(_)), "{err}");
    }

    #[test]
    fn arity_two_rejected() {
        let err = parse_problem(
            "(synth-fun f ((x (BitVec 8)) (y (BitVec 8))) (BitVec 8) ((Start (BitVec 8) (x y (if0 Start Start Start)))))",
        )
        .unwrap_err();
        assert_eq!(err, FrontendError::UnsupportedArity(2));
    }

    #[test]
    fn missing_if0_rejected() {
        let err = parse_problem(
            "(synth-fun f ((x (BitVec 8))) (BitVec 8) ((Start (BitVec 8) (x (bvnot Start)))))\n(constraint (= (f #x00) #xff))",
        )
        .unwrap_err();
        assert_eq!(err, FrontendError::MissingIf0Rule);
    }

    #[test]
    fn inconsistent_examples() {
        let err = problem("(constraint (= (f #x01) #x02))\n(constraint (= (f #x03) #x02))\n(constraint (= (f #x01) #x03))")
            .unwrap_err();
        assert_eq!(
            err,
            FrontendError::InconsistentExamples {
                first: 0,
                second: 2
            }
        );
        // duplicates that agree are fine
        assert_eq!(
            problem("(constraint (= (f #x01) #x02))\n(constraint (= (f #x01) #x02))")
                .unwrap()
                .examples
                .len(),
            2
        );
    }

    #[test]
    fn no_examples() {
        assert_eq!(problem("").unwrap_err(), FrontendError::NoExamples);
    }

    #[test]
    fn v2_grammar_rejected() {
        let err = parse_problem(
            "(synth-fun f ((x (_ BitVec 8))) (_ BitVec 8) ((Start (_ BitVec 8))) ((Start (_ BitVec 8) (x (if0 Start Start Start)))))",
        )
        .unwrap_err();
        assert!(
            matches!(err, FrontendError::Unsupported(ref m) if m.contains("v2")),
            "{err}"
        );
    }

    #[test]
    fn unknown_operator() {
        let err = parse_problem("(synth-fun f ((x (BitVec 8))) (BitVec 8) ((Start (BitVec 8) (x (bvmul Start Start)))))")
            .unwrap_err();
        assert!(
            matches!(err, FrontendError::UnknownOperator { ref name, line: 1, .. } if name == "bvmul"),
            "{err}"
        );
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_problem("(set-logic BV)\n(synth-fun f").unwrap_err();
        assert_eq!(err, syntax(Pos { line: 2, col: 1 }, "unclosed `(`"));
    }

    #[test]
    fn nested_productions_become_auxiliary_nonterminals() {
        let p = parse_problem(
            "(synth-fun f ((x (BitVec 8))) (BitVec 8) ((Start (BitVec 8) (x (bvand Start #x0f) (bvnot (shl1 Start)) (if0 Start Start Start)))))\n\
             (constraint (= (f #x01) #x01))",
        )
        .unwrap();
        let g = &p.grammar;
        assert_eq!(g.len(), 3);
        let x = Expr::var("x");
        let c = Expr::constant(bv(0x0f));
        assert!(g.derives(g.start(), &Expr::binary(Op::BvAnd, x.clone(), c)));
        assert!(g.derives(
            g.start(),
            &Expr::unary(Op::BvNot, Expr::unary(Op::Shl1, x.clone()))
        ));
        assert!(!g.derives(g.start(), &Expr::unary(Op::BvNot, x)));
    }

    #[test]
    fn icfp_style_macros() {
        let text = "(set-logic BV)\n\
            (define-fun shr1 ((x (BitVec 64))) (BitVec 64) (bvlshr x #x0000000000000001))\n\
            (define-fun shl1 ((x (BitVec 64))) (BitVec 64) (bvshl x #x0000000000000001))\n\
            (define-fun shr4 ((x (BitVec 64))) (BitVec 64) (bvlshr x #x0000000000000004))\n\
            (define-fun shr16 ((x (BitVec 64))) (BitVec 64) (bvlshr x #x0000000000000010))\n\
            (define-fun if0 ((x (BitVec 64)) (y (BitVec 64)) (z (BitVec 64))) (BitVec 64) (ite (= x #x0000000000000001) y z))\n\
            (synth-fun f ((x (BitVec 64))) (BitVec 64) ((Start (BitVec 64) (#x0000000000000000 #x0000000000000001 x (bvnot Start) (shl1 Start) (shr1 Start) (shr4 Start) (shr16 Start) (bvand Start Start) (bvor Start Start) (bvxor Start Start) (bvadd Start Start) (if0 Start Start Start)))))\n\
            (constraint (= (f #x0000000000000002) #x0000000000000001))\n(check-synth)\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.grammar.production_count(), 13);
        let wrong = text.replace(
            "(ite (= x #x0000000000000001) y z)",
            "(ite (= x #x0000000000000000) y z)",
        );
        let err = parse_problem(&wrong).unwrap_err();
        assert!(
            matches!(err, FrontendError::Unsupported(ref m) if m.contains("disagrees")),
            "{err}"
        );
    }

    #[test]
    fn foreign_macro_rejected() {
        let err = parse_problem("(define-fun g ((x (BitVec 8))) (BitVec 8) x)").unwrap_err();
        assert!(
            matches!(err, FrontendError::Unsupported(ref m) if m.contains("`g`")),
            "{err}"
        );
    }

    #[test]
    fn crlf_matches_lf() {
        let text = format!("{HEADER}; comment\n(constraint (= (f #x03) #x06))\n(check-synth)\n");
        assert_eq!(
            parse_problem(&text),
            parse_problem(&text.replace('\n', "\r\n"))
        );
        assert!(parse_problem(&text.replace('\n', "\r\n")).is_ok());
    }

    #[test]
    fn width_mismatch_in_constraint() {
        let err = problem("(constraint (= (f #x0003) #x06))").unwrap_err();
        assert!(matches!(err, FrontendError::Syntax { .. }), "{err}");
    }
}

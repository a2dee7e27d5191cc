//! Deterministic generation of solvable PBE problem files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semantics::{eval, mask, BitVecValue, Env, Expr, Op};

/// Grammar family used for generated problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    /// Constants 0 and 1, `x`, bvnot, the fixed shifts, bvand/bvor/bvxor/bvadd and
    /// `if0`, with the fixed shifts and `if0` declared via `define-fun`.
    Icfp,
    /// Constants 0 and 1, `x`, bvnot, bvand, bvor, bvxor, bvadd, bvsub, bvshl,
    /// bvlshr and `if0`.
    SmtLib,
}

impl Template {
    pub fn name(self) -> &'static str {
        match self {
            Template::Icfp => "icfp",
            Template::SmtLib => "smtlib",
        }
    }

    fn ops(self) -> &'static [Op] {
        match self {
            Template::Icfp => &[
                Op::BvNot,
                Op::Shl1,
                Op::Shr1,
                Op::Shr4,
                Op::Shr16,
                Op::BvAnd,
                Op::BvOr,
                Op::BvXor,
                Op::BvAdd,
                Op::If0,
            ],
            Template::SmtLib => &[
                Op::BvNot,
                Op::BvAnd,
                Op::BvOr,
                Op::BvXor,
                Op::BvAdd,
                Op::BvSub,
                Op::BvShl,
                Op::BvLshr,
                Op::If0,
            ],
        }
    }
}

impl FromStr for Template {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "icfp" => Ok(Template::Icfp),
            "smtlib" => Ok(Template::SmtLib),
            other => Err(format!(
                "unknown template `{other}` (expected icfp or smtlib)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub count: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub examples: usize,
    pub width: u32,
    pub seed: u64,
    pub template: Template,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 10,
            size_min: 3,
            size_max: 7,
            examples: 8,
            width: 64,
            seed: 1,
            template: Template::Icfp,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.size_min == 0 || self.size_min > self.size_max {
            return Err(format!(
                "invalid size range {}..={}",
                self.size_min, self.size_max
            ));
        }
        if !(1..=64).contains(&self.width) {
            return Err(format!("width {} outside 1..=64", self.width));
        }
        if self.template == Template::Icfp && self.width < 8 {
            return Err("the icfp template needs a width of at least 8".into());
        }
        if self.examples == 0 {
            return Err("at least one example is required".into());
        }
        if self.width < 64 && self.examples as u128 > 1u128 << self.width {
            return Err(format!(
                "{} distinct inputs do not fit in {} bits",
                self.examples, self.width
            ));
        }
        Ok(())
    }
}

/// One generated problem.
#[derive(Clone, Debug)]
pub struct Instance {
    pub target: Expr,
    pub text: String,
}

fn leaves(width: u32) -> [Expr; 3] {
    [
        Expr::constant(BitVecValue::zero(width)),
        Expr::constant(BitVecValue::one(width)),
        Expr::var("x"),
    ]
}

/// A random expression with exactly `size` nodes over the template's productions.
fn random_expr(rng: &mut impl Rng, template: Template, width: u32, size: usize) -> Expr {
    if size == 1 {
        return leaves(width).choose(rng).expect("non-empty").clone();
    }
    let feasible: Vec<Op> = template
        .ops()
        .iter()
        .copied()
        .filter(|op| op.arity() < size)
        .collect();
    let op = *feasible
        .choose(rng)
        .expect("unary operators fit every size above 1");
    let arity = op.arity();
    // uniform composition of size - 1 into `arity` positive parts via cut points
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, size - 2, arity - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(arity);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(size - 1)) {
        parts.push(c - prev);
        prev = c;
    }
    let args: Vec<Expr> = parts
        .into_iter()
        .map(|s| random_expr(rng, template, width, s))
        .collect();
    Expr::apply(op, args)
}

fn literal(width: u32, bits: u64) -> String {
    BitVecValue::new(width, bits).to_literal()
}

fn render(
    spec: &CorpusSpec,
    index: usize,
    target: &Expr,
    pairs: &[(BitVecValue, BitVecValue)],
) -> String {
    let w = spec.width;
    let sort = format!("(BitVec {w})");
    let mut out = String::new();
    let _ = writeln!(
        out,
        "; generated instance {index} (template {}, seed {})",
        spec.template.name(),
        spec.seed
    );
    let _ = writeln!(out, "; target: {target}");
    out.push_str("(set-logic BV)\n\n");
    if spec.template == Template::Icfp {
        for (name, body) in [
            ("shr1", format!("(bvlshr x {})", literal(w, 1))),
            ("shr4", format!("(bvlshr x {})", literal(w, 4))),
            ("shr16", format!("(bvlshr x {})", literal(w, 16))),
            ("shl1", format!("(bvshl x {})", literal(w, 1))),
        ] {
            let _ = writeln!(out, "(define-fun {name} ((x {sort})) {sort} {body})");
        }
        let _ = writeln!(
            out,
            "(define-fun if0 ((x {sort}) (y {sort}) (z {sort})) {sort} (ite (= x {}) y z))",
            literal(w, 1)
        );
        out.push('\n');
    }
    let mut prods = vec![literal(w, 0), literal(w, 1), "x".to_string()];
    for op in spec.template.ops() {
        let operands = vec!["Start"; op.arity()].join(" ");
        prods.push(format!("({op} {operands})"));
    }
    let _ = writeln!(out, "(synth-fun f ((x {sort})) {sort}");
    let _ = writeln!(out, "    ((Start {sort} ({}))))", prods.join(" "));
    out.push('\n');
    for (i, o) in pairs {
        let _ = writeln!(out, "(constraint (= (f {i}) {o}))");
    }
    out.push_str("\n(check-synth)\n");
    out
}

/// Generates instance `index` of the corpus. Each instance draws from its own
/// random stream, so it depends only on the seed and its index.
pub fn generate_instance(spec: &CorpusSpec, index: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let size = rng.gen_range(spec.size_min..=spec.size_max);
    let target = random_expr(&mut rng, spec.template, spec.width, size);
    let m = mask(spec.width);
    let mut inputs: Vec<u64> = Vec::with_capacity(spec.examples);
    while inputs.len() < spec.examples {
        let v = rng.gen::<u64>() & m;
        if !inputs.contains(&v) {
            inputs.push(v);
        }
    }
    let pairs: Vec<_> = inputs
        .into_iter()
        .map(|i| {
            let input = BitVecValue::new(spec.width, i);
            let env = Env::new(spec.width).with("x", input);
            (input, eval(&target, &env).expect("target is closed over x"))
        })
        .collect();
    let text = render(spec, index, &target, &pairs);
    Instance { target, text }
}

/// Writes `gen_NNNN.sl` files into `out_dir` (created if missing).
pub fn generate_corpus(spec: &CorpusSpec, out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    spec.validate()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    fs::create_dir_all(out_dir)?;
    (0..spec.count)
        .map(|i| {
            let path = out_dir.join(format!("gen_{i:04}.sl"));
            fs::write(&path, generate_instance(spec, i).text)?;
            Ok(path)
        })
        .collect()
}

//! Seeded random propositional programs and quantified programs, for differential
//! testing of the evaluator and the rewriter.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rewrite::SuffixType;
use crate::syntax::{parse_subprogram, Block, ParseMode, Program, QuantifiedProgram, Quantifier};

/// Knobs for [`random_program`].
#[derive(Clone, Debug)]
pub struct ProgramShape {
    pub rules: RangeInclusive<usize>,
    pub choices: RangeInclusive<usize>,
    pub constraints: RangeInclusive<usize>,
    pub weaks: RangeInclusive<usize>,
    pub max_body: usize,
    pub negation: f64,
    pub aggregates: f64,
    pub levels: i64,
    pub weights: RangeInclusive<i64>,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            rules: 1..=5,
            choices: 0..=2,
            constraints: 0..=1,
            weaks: 0..=0,
            max_body: 3,
            negation: 0.35,
            aggregates: 0.1,
            levels: 2,
            weights: 1..=3,
        }
    }
}

impl ProgramShape {
    pub fn plain(self) -> Self {
        ProgramShape { weaks: 0..=0, ..self }
    }

    pub fn weighted(self) -> Self {
        ProgramShape { weaks: 1..=3, ..self }
    }
}

fn literal(rng: &mut impl Rng, pool: &[String], negation: f64) -> String {
    let a = pool.choose(rng).expect("non-empty pool");
    if rng.gen_bool(negation) {
        format!("not {a}")
    } else {
        a.clone()
    }
}

fn aggregate(rng: &mut impl Rng, pool: &[String], shape: &ProgramShape) -> String {
    let n = rng.gen_range(1..=pool.len().min(3));
    let elems: Vec<String> = pool
        .choose_multiple(rng, n)
        .enumerate()
        .map(|(k, a)| {
            let w = if rng.gen_bool(0.7) { rng.gen_range(1..=2) } else { -1 };
            let cond = if rng.gen_bool(shape.negation / 2.0) { format!("not {a}") } else { a.clone() };
            format!("{w},{k} : {cond}")
        })
        .collect();
    let func = if rng.gen_bool(0.5) { "#count" } else { "#sum" };
    let op = ["<", "<=", "=", "!=", ">", ">="].choose(rng).expect("ops");
    let guard = rng.gen_range(0..=2);
    let neg = if rng.gen_bool(shape.negation / 2.0) { "not " } else { "" };
    format!("{neg}{func}{{{}}} {op} {guard}", elems.join("; "))
}

fn body(rng: &mut impl Rng, pool: &[String], shape: &ProgramShape, min: usize) -> Vec<String> {
    if pool.is_empty() {
        return Vec::new();
    }
    let n = rng.gen_range(min..=shape.max_body.max(min));
    (0..n)
        .map(|_| {
            if rng.gen_bool(shape.aggregates) {
                aggregate(rng, pool, shape)
            } else {
                literal(rng, pool, shape.negation)
            }
        })
        .collect()
}

fn join_body(b: &[String]) -> String {
    if b.is_empty() {
        String::new()
    } else {
        format!(" :- {}", b.join(", "))
    }
}

/// Program text with heads drawn from `heads` and bodies over `heads ∪ inputs`.
pub fn random_program_text(rng: &mut impl Rng, shape: &ProgramShape, heads: &[String], inputs: &[String]) -> String {
    let pool: Vec<String> = heads.iter().chain(inputs).cloned().collect();
    let mut s = String::new();
    if !heads.is_empty() {
        for _ in 0..rng.gen_range(shape.choices.clone()) {
            let n = rng.gen_range(1..=heads.len().min(3));
            let elems: Vec<String> = heads.choose_multiple(rng, n).cloned().collect();
            let exact = if rng.gen_bool(0.3) { format!(" = {}", rng.gen_range(0..=n.min(1))) } else { String::new() };
            let b = if rng.gen_bool(0.5) { body(rng, &pool, shape, 1) } else { Vec::new() };
            writeln!(s, "{{{}}}{exact}{}.", elems.join("; "), join_body(&b)).unwrap();
        }
        for _ in 0..rng.gen_range(shape.rules.clone()) {
            let h = heads.choose(rng).expect("heads");
            let b = body(rng, &pool, shape, 0);
            writeln!(s, "{h}{}.", join_body(&b)).unwrap();
        }
    }
    if !pool.is_empty() {
        for _ in 0..rng.gen_range(shape.constraints.clone()) {
            let b = body(rng, &pool, shape, 1);
            writeln!(s, ":- {}.", b.join(", ")).unwrap();
        }
        for _ in 0..rng.gen_range(shape.weaks.clone()) {
            let b = body(rng, &pool, shape, 1);
            let w = rng.gen_range(shape.weights.clone());
            let l = rng.gen_range(1..=shape.levels.max(1));
            let t = if rng.gen_bool(0.3) { format!(", {}", rng.gen_range(0..2)) } else { String::new() };
            writeln!(s, ":~ {}. [{w}@{l}{t}]", b.join(", ")).unwrap();
        }
    }
    s
}

pub fn random_program(rng: &mut impl Rng, shape: &ProgramShape, heads: &[String], inputs: &[String]) -> Program {
    let text = random_program_text(rng, shape, heads, inputs);
    parse_subprogram(&text, ParseMode::User).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"))
}

/// Atom names `{prefix}0 .. {prefix}{n-1}`.
pub fn atom_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// Per-block layout of a random quantified program.
#[derive(Clone, Debug)]
pub struct QuantifiedShape {
    /// Quantifier and plainness of each block.
    pub blocks: Vec<(Quantifier, bool)>,
    pub atoms: RangeInclusive<usize>,
    pub program: ProgramShape,
    /// Add global weak constraints (only meaningful for an existential first block).
    pub global: bool,
}

const PREFIXES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// A quantified program satisfying the stratified definition assumption: block `k`
/// only defines its own atoms and reads those of earlier blocks; the constraint
/// program is stratified.
pub fn random_quantified(rng: &mut impl Rng, shape: &QuantifiedShape) -> QuantifiedProgram {
    let mut seen: Vec<String> = Vec::new();
    let mut blocks = Vec::new();
    for (k, &(quantifier, plain)) in shape.blocks.iter().enumerate() {
        let own = atom_names(PREFIXES[k % PREFIXES.len()], rng.gen_range(shape.atoms.clone()).max(1));
        let ps = if plain { shape.program.clone().plain() } else { shape.program.clone().weighted() };
        let mut p = random_program(rng, &ps, &own, &seen);
        if !plain && p.weaks().next().is_none() {
            let a = own.choose(rng).expect("atoms");
            p.extend(&parse_subprogram(&format!(":~ {a}. [1@1]\n"), ParseMode::User).expect("weak"));
        }
        blocks.push(Block::new(quantifier, p));
        seen.extend(own);
    }
    let helper = atom_names("c", 2);
    let cshape = ProgramShape { choices: 0..=0, rules: 0..=2, constraints: 1..=2, weaks: 0..=0, aggregates: 0.0, ..shape.program.clone() };
    let mut text = String::new();
    for h in &helper {
        if rng.gen_bool(0.5) {
            let b = body(rng, &seen, &cshape, 1);
            writeln!(text, "{h} :- {}.", b.join(", ")).unwrap();
        }
    }
    let mut cpool = seen.clone();
    cpool.extend(helper.iter().filter(|h| text.contains(&format!("{h} :-"))).cloned());
    for _ in 0..rng.gen_range(cshape.constraints.clone()) {
        let b = body(rng, &cpool, &ProgramShape { negation: 0.0, ..cshape.clone() }, 1);
        let extra = literal(rng, &seen, shape.program.negation);
        writeln!(text, ":- {}, {extra}.", b.join(", ")).unwrap();
    }
    let constraint = parse_subprogram(&text, ParseMode::User).expect("constraint program");
    let mut global = Vec::new();
    if shape.global && shape.blocks.first().is_some_and(|b| b.0 == Quantifier::Exists) {
        let first: Vec<String> = blocks[0].program.predicates().into_iter().map(|p| p.name.to_string()).collect();
        let ws = ProgramShape { aggregates: 0.0, weaks: 1..=2, ..shape.program.clone() };
        let mut t = String::new();
        for _ in 0..rng.gen_range(ws.weaks.clone()) {
            let b = body(rng, &first, &ws, 1);
            writeln!(t, ":~ {}. [{}@{}]", b.join(", "), rng.gen_range(ws.weights.clone()), rng.gen_range(1..=ws.levels)).unwrap();
        }
        global = parse_subprogram(&t, ParseMode::User).expect("global weaks").weaks().cloned().collect();
    }
    QuantifiedProgram { blocks, constraint, global }
}

/// Block layout with a suffix of type `ty` starting at the returned index, at most
/// `max_blocks` blocks in total.
pub fn layout_for(rng: &mut impl Rng, ty: SuffixType, max_blocks: usize) -> (Vec<(Quantifier, bool)>, usize) {
    use Quantifier::{Exists as E, Forall as A};
    let mut suffix = match ty {
        SuffixType::Type1 => {
            let q = if rng.gen_bool(0.5) { E } else { A };
            vec![(q, true), (q, true)]
        }
        SuffixType::Type2 => vec![(E, false), (E, true)],
        SuffixType::Type3 => vec![(A, false), (A, true)],
        SuffixType::Type4 => vec![(E, false)],
        SuffixType::Type5 => vec![(A, false)],
        SuffixType::None => Vec::new(),
    };
    let room = max_blocks.saturating_sub(suffix.len());
    let tail = rng.gen_range(0..=room);
    for _ in 0..tail {
        let q = suffix.last().map_or(E, |b: &(Quantifier, bool)| b.0.dual());
        // Type2/3 tails may be weighted, Type4/5 tails must be plain
        let plain = !matches!(ty, SuffixType::Type2 | SuffixType::Type3) || rng.gen_bool(0.5);
        suffix.push((q, plain));
    }
    let prefix = rng.gen_range(0..=max_blocks - suffix.len());
    let mut blocks: Vec<(Quantifier, bool)> =
        (0..prefix).map(|_| (if rng.gen_bool(0.5) { E } else { A }, rng.gen_bool(0.5))).collect();
    blocks.extend(suffix);
    (blocks, prefix)
}

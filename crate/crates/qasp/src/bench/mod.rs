//! Encoders for the showcase problems, brute-force oracles, and seeded instance
//! generators.
//!
//! [`Instance`] is the JSON instance format; [`Instance::solve`] answers the problem
//! through the encoding and [`Instance::oracle`] answers it by exhaustive search, in
//! the same [`Answer`] shape.

pub mod minmax;
pub mod pap;
pub mod qbf;
pub mod random;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ground::Interpretation;
use crate::quantsem::{is_coherent, optimal_quantified_answer_sets, EvalOptions};
use crate::syntax::{parse_program, GroundAtom, QuantifiedProgram};

pub use minmax::{encode_minmax_clique, oracle_minmax, random_minmax, MinmaxCell, MinmaxCliqueInstance};
pub use pap::{encode_pap, encode_pap_solution_check, is_solution, minimal_solutions, oracle_pap, random_pap, PapInstance, PapLiteral};
pub use qbf::{
    encode_2qbf_ee, encode_lex_qbf, encode_qbf_sequence, oracle_lex_min, oracle_qbf, oracle_sequence_value, random_qbf,
    MatrixForm, QbfBlock, QbfFormula,
};

pub(crate) fn build(text: &str) -> QuantifiedProgram {
    parse_program(text).unwrap_or_else(|e| panic!("encoder produced an unparsable program: {e}\n{text}"))
}

/// `{a; b; c} [= k] [:- body].`
pub(crate) fn choice_line(atoms: &[String], exactly: Option<usize>, body: &str) -> String {
    let mut s = format!("{{{}}}", atoms.join("; "));
    if let Some(k) = exactly {
        s.push_str(&format!(" = {k}"));
    }
    if !body.is_empty() {
        s.push_str(&format!(" :- {body}"));
    }
    s.push_str(".\n");
    s
}

/// The problems `gen` knows about.
pub const PROBLEMS: [&str; 6] = ["minmax-clique", "pap", "pap-check", "qbf-ee", "qbf-lex", "qbf-seq"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum Instance {
    MinmaxClique(MinmaxCliqueInstance),
    Pap {
        #[serde(flatten)]
        instance: PapInstance,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relevance: Option<String>,
    },
    PapCheck {
        #[serde(flatten)]
        instance: PapInstance,
        candidate: Vec<String>,
    },
    QbfEe(QbfFormula),
    QbfLex(QbfFormula),
    QbfSeq { formulas: Vec<QbfFormula> },
}

/// A problem-level answer, comparable between the encoding and the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "camelCase")]
pub enum Answer {
    /// The formula is true, or the candidate is a solution.
    Coherent(bool),
    /// Distinct first-block assignments selected as optimal.
    Assignments(Vec<Vec<bool>>),
    /// Whether the sequence value is odd.
    Odd(bool),
    /// Distinct clique-size values selected as optimal.
    Values(Vec<i64>),
    /// Distinct optimal solutions.
    Solutions(Vec<Vec<String>>),
}

fn atoms_of<'a>(m: &'a Interpretation, pred: &'a str) -> impl Iterator<Item = &'a GroundAtom> + 'a {
    m.iter().filter(move |a| &*a.predicate == pred)
}

impl Instance {
    pub fn problem(&self) -> &'static str {
        match self {
            Instance::MinmaxClique(_) => "minmax-clique",
            Instance::Pap { .. } => "pap",
            Instance::PapCheck { .. } => "pap-check",
            Instance::QbfEe(_) => "qbf-ee",
            Instance::QbfLex(_) => "qbf-lex",
            Instance::QbfSeq { .. } => "qbf-seq",
        }
    }

    pub fn encode(&self) -> Result<QuantifiedProgram> {
        match self {
            Instance::MinmaxClique(i) => encode_minmax_clique(i),
            Instance::Pap { instance, relevance } => encode_pap(instance, relevance.as_deref()),
            Instance::PapCheck { instance, candidate } => encode_pap_solution_check(instance, candidate),
            Instance::QbfEe(f) => encode_2qbf_ee(f),
            Instance::QbfLex(f) => encode_lex_qbf(f),
            Instance::QbfSeq { formulas } => encode_qbf_sequence(formulas, false),
        }
    }

    /// Answer computed from the encoding with the direct evaluator.
    pub fn solve(&self, opts: &EvalOptions) -> Result<Answer> {
        let q = self.encode()?;
        let optimal = |q: &QuantifiedProgram| optimal_quantified_answer_sets(q, opts).map(|(_, sets)| sets);
        Ok(match self {
            Instance::QbfEe(_) | Instance::PapCheck { .. } => Answer::Coherent(is_coherent(&q, opts)?.coherent),
            Instance::QbfLex(f) => {
                let first = &f.blocks[0].variables;
                let mut out: BTreeSet<Vec<bool>> = BTreeSet::new();
                for m in optimal(&q)? {
                    let names: BTreeSet<String> = m.iter().map(|a| a.to_string()).collect();
                    out.insert(first.iter().map(|&v| names.contains(&qbf::qbf_var(v))).collect());
                }
                Answer::Assignments(out.into_iter().collect())
            }
            Instance::QbfSeq { .. } => {
                Answer::Odd(optimal(&q)?.iter().any(|m| atoms_of(m, "odd").next().is_some()))
            }
            Instance::MinmaxClique(_) => {
                let mut ks: BTreeSet<i64> = BTreeSet::new();
                for m in optimal(&q)? {
                    ks.extend(atoms_of(&m, "valK").filter_map(|a| a.args[0].as_int()));
                }
                Answer::Values(ks.into_iter().collect())
            }
            Instance::Pap { .. } => {
                let mut sols: BTreeSet<Vec<String>> = BTreeSet::new();
                for m in optimal(&q)? {
                    sols.insert(atoms_of(&m, "s").map(|a| a.args[0].to_string()).collect());
                }
                Answer::Solutions(sols.into_iter().collect())
            }
        })
    }

    /// Answer computed by exhaustive search over the instance itself.
    pub fn oracle(&self) -> Result<Answer> {
        Ok(match self {
            Instance::QbfEe(f) => Answer::Coherent(oracle_qbf(f)?),
            Instance::PapCheck { instance, candidate } => {
                Answer::Coherent(is_solution(instance, &candidate.iter().cloned().collect())?)
            }
            Instance::QbfLex(f) => Answer::Assignments(oracle_lex_min(f)?.into_iter().collect()),
            Instance::QbfSeq { formulas } => Answer::Odd(oracle_sequence_value(formulas)?.is_some_and(|v| v % 2 == 1)),
            Instance::MinmaxClique(i) => Answer::Values(vec![oracle_minmax(i)? as i64]),
            Instance::Pap { instance, relevance } => {
                let mut best = minimal_solutions(&oracle_pap(instance)?);
                if let Some(h) = relevance {
                    if best.iter().any(|s| s.contains(h)) {
                        best.retain(|s| s.contains(h));
                    }
                }
                Answer::Solutions(best.into_iter().map(|s| s.into_iter().collect()).collect())
            }
        })
    }
}

/// Size parameters for [`generate`]; fields irrelevant to a problem are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenParams {
    /// Variables per quantifier block (QBF problems).
    pub vars: Vec<usize>,
    /// Matrix terms (QBF) or clauses (PAP).
    pub terms: usize,
    /// Formulas in a sequence.
    pub formulas: usize,
    pub nodes: usize,
    pub i: usize,
    pub j: usize,
    /// Percent chance of each edge.
    pub edge_percent: u32,
    /// Variables, hypotheses and manifestations of a PAP instance.
    pub pap_vars: usize,
    pub hypotheses: usize,
    pub manifestations: usize,
    pub relevance: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            vars: vec![2, 2],
            terms: 3,
            formulas: 2,
            nodes: 4,
            i: 2,
            j: 2,
            edge_percent: 50,
            pap_vars: 3,
            hypotheses: 2,
            manifestations: 1,
            relevance: false,
        }
    }
}

/// A random instance of `problem`; `None` for an unknown problem name.
pub fn generate(problem: &str, params: &GenParams, rng: &mut impl rand::Rng) -> Option<Result<Instance>> {
    use crate::syntax::Quantifier::Exists;
    Some(match problem {
        "minmax-clique" => random_minmax(rng, params.nodes, params.i, params.j, params.edge_percent as f64 / 100.0)
            .map(Instance::MinmaxClique),
        "pap" => {
            let instance = random_pap(rng, params.pap_vars, params.terms, params.hypotheses, params.manifestations);
            let relevance = if params.relevance { instance.hypotheses.first().cloned() } else { None };
            Ok(Instance::Pap { instance, relevance })
        }
        "pap-check" => {
            let instance = random_pap(rng, params.pap_vars, params.terms, params.hypotheses, params.manifestations);
            let candidate = instance.hypotheses.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            Ok(Instance::PapCheck { instance, candidate })
        }
        "qbf-ee" => {
            let vars = two_blocks(&params.vars);
            Ok(Instance::QbfEe(random_qbf(rng, Exists, &vars, params.terms, MatrixForm::Dnf)))
        }
        "qbf-lex" => {
            let form = if params.vars.len().is_multiple_of(2) { MatrixForm::Dnf } else { MatrixForm::Cnf };
            let vars: Vec<usize> = params.vars.iter().map(|&v| v.max(1)).collect();
            Ok(Instance::QbfLex(random_qbf(rng, Exists, &vars, params.terms, form)))
        }
        "qbf-seq" => random_sequence(rng, params.formulas.max(1), &params.vars, params.terms)
            .map(|formulas| Instance::QbfSeq { formulas }),
        _ => return None,
    })
}

fn two_blocks(vars: &[usize]) -> Vec<usize> {
    vec![vars.first().copied().unwrap_or(1), vars.get(1).copied().unwrap_or(1)]
}

/// `m` random formulas sharing a prefix with an even number of blocks, reordered so
/// that the true ones come first (which makes the sequence monotone).
pub fn random_sequence(rng: &mut impl rand::Rng, m: usize, vars: &[usize], terms: usize) -> Result<Vec<QbfFormula>> {
    let mut vars: Vec<usize> = vars.iter().map(|&v| v.max(1)).collect();
    if vars.len() < 2 {
        vars.resize(2, 1);
    }
    if vars.len() % 2 == 1 {
        vars.push(1);
    }
    let mut tagged = Vec::with_capacity(m);
    for _ in 0..m {
        let f = random_qbf(rng, crate::syntax::Quantifier::Exists, &vars, terms, MatrixForm::Dnf);
        tagged.push((!oracle_qbf(&f)?, f));
    }
    tagged.sort_by_key(|(unsat, _)| *unsat);
    Ok(tagged.into_iter().map(|(_, f)| f).collect())
}

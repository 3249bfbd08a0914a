//! Quantified Boolean formulas: the brute-force evaluator, random generators and the
//! three QBF-based encodings (∃∃ 2QBF, lexicographic minimum, formula sequences).

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{QuantifiedProgram, Quantifier};

use super::{build, choice_line};

/// Brute-force cap on the number of variables of one formula.
pub const MAX_ORACLE_VARS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixForm {
    /// Disjunction of conjuncts.
    Dnf,
    /// Conjunction of clauses.
    Cnf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbfBlock {
    pub quantifier: Quantifier,
    pub variables: Vec<u32>,
}

/// A prenex QBF. Literals are DIMACS-style: `v` or `-v` for variable `v >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbfFormula {
    pub blocks: Vec<QbfBlock>,
    pub form: MatrixForm,
    pub matrix: Vec<Vec<i32>>,
}

impl QbfFormula {
    pub fn num_vars(&self) -> usize {
        self.blocks.iter().map(|b| b.variables.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.blocks {
            for &v in &b.variables {
                if v == 0 || !seen.insert(v) {
                    return Err(Error::Invalid(format!("variable {v} is zero or bound twice")));
                }
            }
        }
        for t in &self.matrix {
            for &l in t {
                if !seen.contains(&l.unsigned_abs()) {
                    return Err(Error::Invalid(format!("literal {l} uses an unbound variable")));
                }
            }
        }
        Ok(())
    }

    fn eval_matrix(&self, truth: &[bool]) -> bool {
        let lit = |l: i32| truth[l.unsigned_abs() as usize] == (l > 0);
        match self.form {
            MatrixForm::Dnf => self.matrix.iter().any(|t| t.iter().all(|&l| lit(l))),
            MatrixForm::Cnf => self.matrix.iter().all(|c| c.iter().any(|&l| lit(l))),
        }
    }

    fn eval_from(&self, block: usize, truth: &mut Vec<bool>) -> bool {
        let Some(b) = self.blocks.get(block) else { return self.eval_matrix(truth) };
        let n = b.variables.len();
        let mut any = false;
        let mut all = true;
        for bits in 0u64..1 << n {
            for (k, &v) in b.variables.iter().enumerate() {
                truth[v as usize] = bits >> k & 1 == 1;
            }
            let r = self.eval_from(block + 1, truth);
            any |= r;
            all &= r;
            if (b.quantifier == Quantifier::Exists && any) || (b.quantifier == Quantifier::Forall && !all) {
                break;
            }
        }
        match b.quantifier {
            Quantifier::Exists => any,
            Quantifier::Forall => all,
        }
    }

    fn truth_vector(&self) -> Vec<bool> {
        let max = self.blocks.iter().flat_map(|b| b.variables.iter()).copied().max().unwrap_or(0);
        vec![false; max as usize + 1]
    }
}

fn check_cap(phi: &QbfFormula) -> Result<()> {
    if phi.num_vars() > MAX_ORACLE_VARS {
        return Err(Error::Resource { cap: "oracle variables", limit: MAX_ORACLE_VARS as u64 });
    }
    Ok(())
}

/// Truth of `phi` by recursive expansion.
pub fn oracle_qbf(phi: &QbfFormula) -> Result<bool> {
    phi.validate()?;
    check_cap(phi)?;
    let mut truth = phi.truth_vector();
    Ok(phi.eval_from(0, &mut truth))
}

/// Lexicographically least assignment of the first block (false before true, first
/// variable most significant) under which the rest of `phi` holds.
pub fn oracle_lex_min(phi: &QbfFormula) -> Result<Option<Vec<bool>>> {
    phi.validate()?;
    check_cap(phi)?;
    let Some(first) = phi.blocks.first() else {
        return Ok(oracle_qbf(phi)?.then(Vec::new));
    };
    let m = first.variables.len();
    let mut truth = phi.truth_vector();
    for k in 0u64..1 << m {
        let tau: Vec<bool> = (0..m).map(|i| k >> (m - 1 - i) & 1 == 1).collect();
        for (&v, &b) in first.variables.iter().zip(&tau) {
            truth[v as usize] = b;
        }
        if phi.eval_from(1, &mut truth) {
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

/// `max { j | phis[j-1] is true }`, 1-based.
pub fn oracle_sequence_value(phis: &[QbfFormula]) -> Result<Option<usize>> {
    let mut best = None;
    for (j, phi) in phis.iter().enumerate() {
        if oracle_qbf(phi)? {
            best = Some(j + 1);
        }
    }
    Ok(best)
}

/// A formula with the given quantifier prefix, `vars[i]` variables in block `i` and
/// `terms` random 3-literal terms.
pub fn random_qbf(rng: &mut impl Rng, first: Quantifier, vars: &[usize], terms: usize, form: MatrixForm) -> QbfFormula {
    let mut next = 1u32;
    let mut q = first;
    let mut blocks = Vec::new();
    for &n in vars {
        blocks.push(QbfBlock { quantifier: q, variables: (next..next + n as u32).collect() });
        next += n as u32;
        q = q.dual();
    }
    let total = next - 1;
    let matrix = if total == 0 {
        Vec::new()
    } else {
        (0..terms)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = rng.gen_range(1..=total) as i32;
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect()
    };
    QbfFormula { blocks, form, matrix }
}

fn var_name(prefix: &str, v: u32) -> String {
    format!("{prefix}x{v}")
}

fn body(prefix: &str, lits: impl IntoIterator<Item = i32>, negate: bool) -> String {
    lits.into_iter()
        .map(|l| {
            let name = var_name(prefix, l.unsigned_abs());
            if (l > 0) != negate {
                name
            } else {
                format!("not {name}")
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn expect_shape(phi: &QbfFormula, ok: bool, what: &str) -> Result<()> {
    phi.validate()?;
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!("formula has the wrong shape: expected {what}")))
    }
}

fn alternates(phi: &QbfFormula) -> bool {
    phi.blocks.windows(2).all(|w| w[0].quantifier != w[1].quantifier)
}

/// `∃P1 ∃P2 : C`: the universal block becomes an existential one whose weak constraint
/// prefers counterexamples.
pub fn encode_2qbf_ee(phi: &QbfFormula) -> Result<QuantifiedProgram> {
    let shape = phi.blocks.len() == 2
        && phi.blocks[0].quantifier == Quantifier::Exists
        && phi.blocks[1].quantifier == Quantifier::Forall
        && phi.form == MatrixForm::Dnf;
    expect_shape(phi, shape, "∃X1 ∀X2 with a DNF matrix")?;
    let mut s = String::from("%@exists\n");
    for &v in &phi.blocks[0].variables {
        writeln!(s, "{{{}}}.", var_name("", v)).unwrap();
    }
    s.push_str("%@exists\n");
    for &v in &phi.blocks[1].variables {
        writeln!(s, "{{{}}}.", var_name("", v)).unwrap();
    }
    for t in &phi.matrix {
        writeln!(s, "sat :- {}.", body("", t.iter().copied(), false)).unwrap();
    }
    s.push_str(":~ sat. [1@1]\n%@constraint\n:- not sat.\n");
    Ok(build(&s))
}

/// Plain alternating program whose optimal quantified answer sets encode the
/// lexicographically least satisfying assignment of the first block.
pub fn encode_lex_qbf(phi: &QbfFormula) -> Result<QuantifiedProgram> {
    let want = if phi.blocks.len().is_multiple_of(2) { MatrixForm::Dnf } else { MatrixForm::Cnf };
    let shape = !phi.blocks.is_empty()
        && phi.blocks[0].quantifier == Quantifier::Exists
        && alternates(phi)
        && phi.blocks.iter().all(|b| !b.variables.is_empty())
        && phi.form == want;
    expect_shape(phi, shape, "alternating ∃-first prefix, DNF for an even and CNF for an odd number of blocks")?;
    let mut s = String::new();
    for b in &phi.blocks {
        writeln!(s, "%@{}", b.quantifier).unwrap();
        let names: Vec<String> = b.variables.iter().map(|&v| var_name("", v)).collect();
        s.push_str(&choice_line(&names, None, ""));
    }
    s.push_str("%@constraint\n");
    match phi.form {
        MatrixForm::Dnf => {
            for t in &phi.matrix {
                writeln!(s, "sat :- {}.", body("", t.iter().copied(), false)).unwrap();
            }
            s.push_str(":- not sat.\n");
        }
        MatrixForm::Cnf => {
            for c in &phi.matrix {
                writeln!(s, ":- {}.", body("", c.iter().copied(), true)).unwrap();
            }
        }
    }
    s.push_str("%@global\n");
    let first = &phi.blocks[0].variables;
    let m = first.len();
    for (i, &v) in first.iter().enumerate() {
        writeln!(s, ":~ {}. [1@{}]", var_name("", v), m - i).unwrap();
    }
    Ok(build(&s))
}

/// Program in which `odd` belongs to some optimal quantified answer set iff the largest
/// index of a true formula is odd. With `check_monotone`, sequences where a false
/// formula precedes a true one are rejected (this runs the brute-force oracle).
pub fn encode_qbf_sequence(phis: &[QbfFormula], check_monotone: bool) -> Result<QuantifiedProgram> {
    let Some(first) = phis.first() else { return Err(Error::Invalid("empty formula sequence".into())) };
    let prefix: Vec<Quantifier> = first.blocks.iter().map(|b| b.quantifier).collect();
    for phi in phis {
        let same: Vec<Quantifier> = phi.blocks.iter().map(|b| b.quantifier).collect();
        let shape = same == prefix
            && prefix.len() >= 2
            && prefix.len().is_multiple_of(2)
            && prefix[0] == Quantifier::Exists
            && alternates(phi)
            && phi.form == MatrixForm::Dnf;
        expect_shape(phi, shape, "k-existential DNF formulas (k even, at least 2) with one shared prefix")?;
    }
    if check_monotone {
        let truth: Vec<bool> = phis.iter().map(oracle_qbf).collect::<Result<_>>()?;
        if truth.windows(2).any(|w| !w[0] && w[1]) {
            return Err(Error::Invalid("formula sequence is not monotone".into()));
        }
    }
    let m = phis.len();
    let prefix_of = |j: usize| format!("f{j}");
    let mut s = String::from("%@exists\n");
    let solve: Vec<String> = (1..=m).map(|j| format!("solve({j})")).collect();
    s.push_str(&choice_line(&solve, Some(1), ""));
    for j in 1..=m {
        for i in j + 1..=m {
            writeln!(s, "unsolved({i}) :- solve({j}).").unwrap();
        }
        if j % 2 == 1 {
            writeln!(s, "odd :- solve({j}).").unwrap();
        }
    }
    for (k, q) in prefix.iter().enumerate() {
        if k > 0 {
            writeln!(s, "%@{q}").unwrap();
        }
        for (j, phi) in phis.iter().enumerate() {
            let names: Vec<String> = phi.blocks[k].variables.iter().map(|&v| var_name(&prefix_of(j + 1), v)).collect();
            if !names.is_empty() {
                s.push_str(&choice_line(&names, None, &format!("solve({})", j + 1)));
            }
        }
    }
    s.push_str("%@constraint\n");
    for (j, phi) in phis.iter().enumerate() {
        for t in &phi.matrix {
            writeln!(s, "sat({}) :- {}.", j + 1, body(&prefix_of(j + 1), t.iter().copied(), false)).unwrap();
        }
        writeln!(s, ":- solve({0}), not sat({0}).", j + 1).unwrap();
    }
    s.push_str("%@global\n");
    // unsolved(1) is never derived, so its weak constraint is left out
    for i in 2..=m {
        writeln!(s, ":~ unsolved({i}). [1@1,{i}]").unwrap();
    }
    Ok(build(&s))
}

/// Atom name of variable `v` of the `j`-th formula (1-based) in [`encode_qbf_sequence`].
pub fn sequence_var(j: usize, v: u32) -> String {
    var_name(&format!("f{j}"), v)
}

/// Atom name of variable `v` in the single-formula encodings.
pub fn qbf_var(v: u32) -> String {
    var_name("", v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(blocks: &[(Quantifier, &[u32])], form: MatrixForm, matrix: &[&[i32]]) -> QbfFormula {
        QbfFormula {
            blocks: blocks.iter().map(|(q, v)| QbfBlock { quantifier: *q, variables: v.to_vec() }).collect(),
            form,
            matrix: matrix.iter().map(|t| t.to_vec()).collect(),
        }
    }

    use Quantifier::{Exists as E, Forall as A};

    #[test]
    fn evaluator_basics() {
        // ∃x ∀y (x∧y) ∨ (x∧¬y)
        let f = phi(&[(E, &[1]), (A, &[2])], MatrixForm::Dnf, &[&[1, 2, 2], &[1, -2, -2]]);
        assert!(oracle_qbf(&f).unwrap());
        let g = phi(&[(E, &[1]), (A, &[2])], MatrixForm::Dnf, &[&[1, 2, 2]]);
        assert!(!oracle_qbf(&g).unwrap());
        let taut = phi(&[(A, &[1])], MatrixForm::Cnf, &[&[1, -1, 1]]);
        assert!(oracle_qbf(&taut).unwrap());
    }

    #[test]
    fn lex_min_order() {
        // satisfied by exactly (x1,x2) ∈ {(0,1),(1,0)}
        let f = phi(&[(E, &[1, 2])], MatrixForm::Cnf, &[&[1, 2, 2], &[-1, -2, -2]]);
        assert_eq!(oracle_lex_min(&f).unwrap(), Some(vec![false, true]));
    }

    #[test]
    fn shape_errors() {
        let f = phi(&[(A, &[1]), (E, &[2])], MatrixForm::Dnf, &[]);
        assert!(matches!(encode_2qbf_ee(&f), Err(Error::Invalid(_))));
        let unsat = phi(&[(E, &[1]), (A, &[2])], MatrixForm::Dnf, &[&[1, 2, 2]]);
        let sat = phi(&[(E, &[1]), (A, &[2])], MatrixForm::Dnf, &[&[1, 1, 1]]);
        assert!(encode_qbf_sequence(&[unsat.clone(), sat.clone()], true).is_err());
        assert!(encode_qbf_sequence(&[sat, unsat], true).is_ok());
    }

    #[test]
    fn ee_program_text() {
        let f = phi(&[(E, &[1]), (A, &[2])], MatrixForm::Dnf, &[&[1, -2, 2]]);
        let q = encode_2qbf_ee(&f).unwrap();
        assert_eq!(q.blocks[1].program.to_string(), "{x2}.\nsat :- x1, not x2, x2.\n:~ sat. [1@1]\n");
    }
}

//! Propositional abduction: the `∃∀` encoding with cardinality-minimal solutions,
//! the single-block solution check, and the brute-force solution oracle.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::IteratorRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::QuantifiedProgram;

use super::build;

pub const MAX_ORACLE_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PapLiteral {
    pub var: String,
    pub positive: bool,
}

/// `⟨V, T, H, M⟩` with `T` a list of clauses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PapInstance {
    pub variables: Vec<String>,
    pub clauses: Vec<Vec<PapLiteral>>,
    pub hypotheses: Vec<String>,
    pub manifestations: Vec<String>,
}

fn is_constant(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PapInstance {
    pub fn validate(&self) -> Result<()> {
        let vs: BTreeSet<&str> = self.variables.iter().map(String::as_str).collect();
        if let Some(v) = self.variables.iter().find(|v| !is_constant(v) || *v == "t" || *v == "f") {
            return Err(Error::Invalid(format!("variable name {v:?} is not a usable constant")));
        }
        let all = self
            .clauses
            .iter()
            .flatten()
            .map(|l| &l.var)
            .chain(&self.hypotheses)
            .chain(&self.manifestations);
        for v in all {
            if !vs.contains(v.as_str()) {
                return Err(Error::Invalid(format!("unknown variable {v}")));
            }
        }
        Ok(())
    }

    fn facts(&self) -> String {
        let mut s = String::new();
        for v in &self.variables {
            writeln!(s, "v({v}).").unwrap();
        }
        for (k, c) in self.clauses.iter().enumerate() {
            for l in c {
                writeln!(s, "lit({},{},{}).", k + 1, l.var, if l.positive { "t" } else { "f" }).unwrap();
            }
        }
        for h in &self.hypotheses {
            writeln!(s, "h({h}).").unwrap();
        }
        for m in &self.manifestations {
            writeln!(s, "m({m}).").unwrap();
        }
        s
    }

    /// Whether the assignment (bit `k` for `variables[k]`) satisfies every clause.
    fn satisfies(&self, truth: u64) -> bool {
        let idx = |v: &str| self.variables.iter().position(|x| x == v).expect("validated");
        self.clauses.iter().all(|c| c.iter().any(|l| (truth >> idx(&l.var) & 1 == 1) == l.positive))
    }
}

const CONSISTENCY: &str = "\
cl(X) :- lit(X,_,_).
{tau(X,t); tau(X,f)} = 1 :- v(X).
satCl(C) :- lit(C,A,V), tau(A,V).
";

const PRIMED: &str = "\
{tau'(X,t); tau'(X,f)} = 1 :- v(X).
satCl'(C) :- lit(C,A,V), tau'(A,V).
unsatTS' :- cl(C), not satCl'(C).
unsatTS' :- s(X), tau'(X,f).
";

/// `∃P1 ∀P2 : C : Cw`; with `relevance = Some(h)` the global weak constraint
/// `:~ not s(h). [1@0]` is added.
pub fn encode_pap(inst: &PapInstance, relevance: Option<&str>) -> Result<QuantifiedProgram> {
    inst.validate()?;
    if let Some(h) = relevance {
        if !inst.hypotheses.iter().any(|x| x == h) {
            return Err(Error::Invalid(format!("{h} is not a hypothesis")));
        }
    }
    let mut s = String::from("%@exists\n");
    s.push_str(&inst.facts());
    s.push_str("{s(X) : h(X)}.\n");
    s.push_str(CONSISTENCY);
    s.push_str(":- cl(C), not satCl(C).\n:- s(X), tau(X,f).\n");
    s.push_str("%@forall\n");
    s.push_str(PRIMED);
    s.push_str("%@constraint\n:- not unsatTS', m(X), tau'(X,f).\n");
    s.push_str("%@global\n:~ s(X). [1@1,X]\n");
    if let Some(h) = relevance {
        writeln!(s, ":~ not s({h}). [1@0]").unwrap();
    }
    Ok(build(&s))
}

/// `∃P : C`, coherent iff `candidate` is a solution.
pub fn encode_pap_solution_check(inst: &PapInstance, candidate: &[String]) -> Result<QuantifiedProgram> {
    inst.validate()?;
    if let Some(x) = candidate.iter().find(|x| !inst.hypotheses.contains(x)) {
        return Err(Error::Invalid(format!("{x} is not a hypothesis")));
    }
    let mut s = String::from("%@exists\n");
    s.push_str(&inst.facts());
    for x in candidate {
        writeln!(s, "s({x}).").unwrap();
    }
    s.push_str(CONSISTENCY);
    s.push_str("unsatTS :- cl(C), not satCl(C).\nunsatTS :- s(X), tau(X,f).\n:- unsatTS.\n");
    s.push_str(PRIMED);
    s.push_str("satTS :- not unsatTS'.\nnotEntail :- satTS, m(X), tau'(X,f).\n:~ not notEntail. [1@1]\n");
    s.push_str("%@constraint\n:- notEntail.\n");
    Ok(build(&s))
}

/// Whether `T ∪ S` is consistent and entails every manifestation.
pub fn is_solution(inst: &PapInstance, candidate: &BTreeSet<String>) -> Result<bool> {
    inst.validate()?;
    let n = inst.variables.len();
    if n > MAX_ORACLE_VARS {
        return Err(Error::Resource { cap: "oracle variables", limit: MAX_ORACLE_VARS as u64 });
    }
    let bit = |v: &str| 1u64 << inst.variables.iter().position(|x| x == v).expect("validated");
    let s_mask: u64 = candidate.iter().map(|v| bit(v)).sum();
    let m_mask: u64 = inst.manifestations.iter().map(|v| bit(v)).fold(0, |a, b| a | b);
    let mut consistent = false;
    for truth in 0u64..1 << n {
        if truth & s_mask != s_mask || !inst.satisfies(truth) {
            continue;
        }
        consistent = true;
        if truth & m_mask != m_mask {
            return Ok(false);
        }
    }
    Ok(consistent)
}

/// Every solution `S ⊆ H`, in order of the hypothesis bitmask.
pub fn oracle_pap(inst: &PapInstance) -> Result<Vec<BTreeSet<String>>> {
    inst.validate()?;
    let hs: Vec<&String> = inst.hypotheses.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << hs.len() {
        let s: BTreeSet<String> = (0..hs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| hs[k].clone()).collect();
        if is_solution(inst, &s)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// The solutions of minimum cardinality.
pub fn minimal_solutions(solutions: &[BTreeSet<String>]) -> Vec<BTreeSet<String>> {
    let Some(min) = solutions.iter().map(BTreeSet::len).min() else { return Vec::new() };
    let mut out: Vec<_> = solutions.iter().filter(|s| s.len() == min).cloned().collect();
    out.sort();
    out
}

/// Random instance over `x1..xn` with 3-literal clauses.
pub fn random_pap(rng: &mut impl Rng, vars: usize, clauses: usize, hypotheses: usize, manifestations: usize) -> PapInstance {
    let variables: Vec<String> = (1..=vars).map(|k| format!("x{k}")).collect();
    let clauses = if vars == 0 {
        Vec::new()
    } else {
        (0..clauses)
            .map(|_| {
                (0..3)
                    .map(|_| PapLiteral { var: variables[rng.gen_range(0..vars)].clone(), positive: rng.gen_bool(0.5) })
                    .collect()
            })
            .collect()
    };
    let mut pick = |n: usize| {
        let mut v: Vec<String> = variables.iter().cloned().choose_multiple(rng, n.min(vars));
        v.sort();
        v
    };
    let hypotheses = pick(hypotheses);
    let manifestations = pick(manifestations);
    PapInstance { variables, clauses, hypotheses, manifestations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: &str, positive: bool) -> PapLiteral {
        PapLiteral { var: v.into(), positive }
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn oracle_examples() {
        let trivial = PapInstance {
            variables: vec!["a".into()],
            clauses: vec![vec![lit("a", true), lit("a", true), lit("a", true)]],
            hypotheses: vec!["a".into()],
            manifestations: vec!["a".into()],
        };
        assert_eq!(minimal_solutions(&oracle_pap(&trivial).unwrap()), vec![set(&[])]);
        let empty_theory = PapInstance { clauses: vec![], ..trivial.clone() };
        assert_eq!(oracle_pap(&empty_theory).unwrap(), vec![set(&["a"])]);
        let inconsistent = PapInstance {
            clauses: vec![vec![lit("a", false), lit("a", false), lit("a", false)]],
            ..trivial
        };
        assert!(!is_solution(&inconsistent, &set(&["a"])).unwrap());
    }

    #[test]
    fn relevance_requires_hypothesis() {
        let inst = PapInstance {
            variables: vec!["a".into(), "b".into()],
            clauses: vec![],
            hypotheses: vec!["a".into()],
            manifestations: vec![],
        };
        assert!(encode_pap(&inst, Some("b")).is_err());
        assert!(encode_pap(&inst, Some("a")).is_ok());
    }
}

//! Direct evaluation of quantified programs: coherence, quantified answer sets and
//! optimal quantified answer sets, by recursion over the quantifier blocks.
//!
//! Each block is grounded once, with the atoms derivable by earlier blocks as
//! externals. For a candidate interpretation `M` of the prefix, the block is
//! extended with `fix`: facts for the atoms of the prefix base that are in `M`,
//! constraints for those that are not.

mod par;

use std::collections::{BTreeSet, HashMap};
use std::sync::RwLock;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{ground_with, possible_atoms, AtomId, GroundOptions, GroundProgram, Interpretation};
use crate::rewrite::{remap_quantified, satisfies_sda};
use crate::solve::{cost_of, first_answer_set, optimal_answer_sets, Cost, SolveOptions};
use crate::syntax::{
    check_stratified, herbrand_universe, Atom, Constant, GroundAtom, Predicate, Program, QuantifiedProgram,
    Quantifier, Rule, Statement,
};

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub solve: SolveOptions,
    pub ground: GroundOptions,
    /// Evaluate candidate branches concurrently (needs the `parallel` feature).
    pub parallel: bool,
    /// Rewrite inputs violating the stratified definition assumption before evaluation.
    pub normalize: bool,
    pub timeout: Option<Duration>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            solve: SolveOptions::default(),
            ground: GroundOptions::default(),
            parallel: cfg!(feature = "parallel"),
            normalize: true,
            timeout: Some(Duration::from_secs(600)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoherenceResult {
    pub coherent: bool,
    /// Lexicographically least witness for the first block, when it is existential.
    pub witness: Option<Interpretation>,
    pub notes: Vec<String>,
}

/// Ground atoms `p(c1..cn)` for every predicate of `p` and constants of its universe.
pub fn herbrand_base(p: &Program) -> BTreeSet<GroundAtom> {
    let universe: Vec<Constant> = herbrand_universe(p).into_iter().collect();
    let mut out = BTreeSet::new();
    for Predicate { name, arity } in p.predicates() {
        let mut idx = vec![0usize; arity];
        loop {
            out.insert(GroundAtom { predicate: name.clone(), args: idx.iter().map(|&k| universe[k].clone()).collect() });
            let Some(pos) = (0..arity).rev().find(|&k| idx[k] + 1 < universe.len()) else { break };
            idx[pos] += 1;
            idx[pos + 1..].iter_mut().for_each(|k| *k = 0);
        }
    }
    out
}

/// Facts for `m ∩ HB_p` and constraints `:- a` for `a ∈ HB_p \ m`.
pub fn fix(p: &Program, m: &Interpretation) -> Program {
    let mut out = Program::new();
    for a in herbrand_base(p) {
        let atom = Atom::from(&a);
        if m.contains(&a) {
            out.push(Statement::Rule(Rule::fact(atom)));
        } else {
            out.push(Statement::Rule(Rule::constraint(vec![crate::syntax::Literal::pos(atom)])));
        }
    }
    out
}

/// Ground atoms of a stage that lie in the base of the preceding blocks.
struct Stage {
    ground: GroundProgram,
    fixable: Vec<(AtomId, bool)>,
}

impl Stage {
    fn new(ground: GroundProgram, prev_preds: &BTreeSet<Predicate>, prev_consts: &BTreeSet<Constant>) -> Self {
        let heads = ground.head_atoms();
        let fixable = (0..ground.len() as AtomId)
            .filter(|&a| {
                let g = ground.atom(a);
                prev_preds.contains(&g.signature()) && g.args.iter().all(|c| prev_consts.contains(c))
            })
            .map(|a| (a, heads.contains(&a)))
            .collect();
        Stage { ground, fixable }
    }

    fn fixed(&self, m: &Interpretation) -> GroundProgram {
        let mut facts = Vec::new();
        let mut forbidden = Vec::new();
        for &(a, is_head) in &self.fixable {
            if m.contains(self.ground.atom(a)) {
                facts.push(a);
            } else if is_head {
                forbidden.push(a);
            }
        }
        self.ground.with_fixed(&facts, &forbidden)
    }
}

type MemoKey = (usize, Interpretation);

/// Evaluator for one quantified program; grounds every block up front.
pub struct Evaluator {
    quantifiers: Vec<Quantifier>,
    stages: Vec<Stage>,
    first_weaks: GroundProgram,
    opts: EvalOptions,
    deadline: Option<(Instant, u64)>,
    memo: RwLock<HashMap<MemoKey, bool>>,
    notes: Vec<String>,
}

impl Evaluator {
    pub fn new(q: &QuantifiedProgram, opts: &EvalOptions) -> Result<Self> {
        if !check_stratified(&q.constraint) {
            return Err(Error::NotStratified);
        }
        let mut notes = Vec::new();
        let normalized;
        let q = if !satisfies_sda(q) && opts.normalize {
            normalized = remap_quantified(q);
            let msg = "input violates the stratified definition assumption; evaluating the remapped program";
            log::warn!("{msg}");
            notes.push(msg.to_string());
            &normalized
        } else {
            q
        };
        let deadline = opts.timeout.map(|t| (Instant::now() + t, t.as_secs()));
        let mut solve = opts.solve.clone();
        solve.deadline = deadline;

        let mut ext: Vec<GroundAtom> = Vec::new();
        let mut preds = BTreeSet::new();
        let mut consts = BTreeSet::new();
        let mut stages = Vec::new();
        for b in &q.blocks {
            let g = ground_with(&b.program, &ext, &opts.ground)?;
            stages.push(Stage::new(g, &preds, &consts));
            ext = possible_atoms(&b.program, &ext)?.into_iter().collect();
            preds.extend(b.program.predicates());
            consts.extend(b.program.constants());
        }
        let gc = ground_with(&q.constraint, &ext, &opts.ground)?;
        stages.push(Stage::new(gc, &preds, &consts));

        let mut first = q.blocks[0].program.clone();
        for w in &q.global {
            first.push(Statement::Weak(w.clone()));
        }
        let first_weaks = ground_with(&first, &[], &opts.ground)?;

        Ok(Evaluator {
            quantifiers: q.blocks.iter().map(|b| b.quantifier).collect(),
            stages,
            first_weaks,
            opts: EvalOptions { solve, ..opts.clone() },
            deadline,
            memo: RwLock::new(HashMap::new()),
            notes,
        })
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some((d, secs)) if Instant::now() >= d => Err(Error::Resource { cap: "time", limit: secs }),
            _ => Ok(()),
        }
    }

    /// Optimal answer sets of block `i` with the prefix fixed to `m`, each joined with `m`.
    fn candidates(&self, i: usize, m: &Interpretation) -> Result<Vec<Interpretation>> {
        let stage = &self.stages[i];
        let g = stage.fixed(m);
        let (_, sets) = optimal_answer_sets(&g, &self.opts.solve)?;
        let mut out: Vec<Interpretation> = sets
            .iter()
            .map(|s| {
                let mut mi = m.clone();
                mi.extend(g.interpretation(s));
                mi
            })
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Coherence of the suffix starting at block `i` with the prefix fixed to `m`.
    fn coherent_from(&self, i: usize, m: &Interpretation) -> Result<bool> {
        self.check_deadline()?;
        if i == self.quantifiers.len() {
            let g = self.stages[i].fixed(m);
            return Ok(first_answer_set(&g, &self.opts.solve)?.is_some());
        }
        let key = (i, m.clone());
        if let Some(&v) = self.memo.read().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let cands = self.candidates(i, m)?;
        let next = |c: &Interpretation| self.coherent_from(i + 1, c);
        let v = match self.quantifiers[i] {
            Quantifier::Exists => par::exists(&cands, self.opts.parallel, next)?,
            Quantifier::Forall => par::forall(&cands, self.opts.parallel, next)?,
        };
        self.memo.write().expect("memo lock").insert(key, v);
        Ok(v)
    }

    pub fn is_coherent(&self) -> Result<CoherenceResult> {
        let empty = Interpretation::new();
        let (coherent, witness) = match self.quantifiers[0] {
            Quantifier::Exists => {
                let cands = self.candidates(0, &empty)?;
                let hit = par::position(&cands, self.opts.parallel, |c| self.coherent_from(1, c))?;
                (hit.is_some(), hit.map(|k| cands[k].clone()))
            }
            Quantifier::Forall => (self.coherent_from(0, &empty)?, None),
        };
        Ok(CoherenceResult { coherent, witness, notes: self.notes.clone() })
    }

    pub fn quantified_answer_sets(&self) -> Result<Vec<Interpretation>> {
        if self.quantifiers[0] != Quantifier::Exists {
            return Err(Error::Usage("quantified answer sets need an existential first block".into()));
        }
        let cands = self.candidates(0, &Interpretation::new())?;
        par::filter(&cands, self.opts.parallel, |c| self.coherent_from(1, c))
    }

    /// Cost of `m` under the weak constraints of the first block together with the global ones.
    pub fn global_cost(&self, m: &Interpretation) -> Cost {
        let g = &self.first_weaks;
        cost_of(g.weaks(), |a| m.contains(g.atom(a)))
    }

    /// Quantified answer sets of minimum global cost, with that cost.
    pub fn optimal_quantified_answer_sets(&self) -> Result<(Cost, Vec<Interpretation>)> {
        let qas = self.quantified_answer_sets()?;
        let costs: Vec<Cost> = qas.iter().map(|m| self.global_cost(m)).collect();
        let Some(best) = costs.iter().min().cloned() else { return Ok((Cost::default(), Vec::new())) };
        let out = qas.into_iter().zip(&costs).filter(|(_, c)| **c == best).map(|(m, _)| m).collect();
        Ok((best, out))
    }
}

pub fn is_coherent(q: &QuantifiedProgram, opts: &EvalOptions) -> Result<CoherenceResult> {
    Evaluator::new(q, opts)?.is_coherent()
}

pub fn quantified_answer_sets(q: &QuantifiedProgram, opts: &EvalOptions) -> Result<Vec<Interpretation>> {
    Evaluator::new(q, opts)?.quantified_answer_sets()
}

pub fn optimal_quantified_answer_sets(q: &QuantifiedProgram, opts: &EvalOptions) -> Result<(Cost, Vec<Interpretation>)> {
    Evaluator::new(q, opts)?.optimal_quantified_answer_sets()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_subprogram, ParseMode};

    fn names(m: &Interpretation) -> Vec<String> {
        m.iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn fix_small_base() {
        let p = parse_subprogram("a. b :- a.", ParseMode::User).unwrap();
        let m: Interpretation = [GroundAtom::prop("a")].into_iter().collect();
        assert_eq!(fix(&p, &m).to_string(), "a.\n:- b.\n");
        assert_eq!(fix(&p, &Interpretation::new()).to_string(), ":- a.\n:- b.\n");
    }

    #[test]
    fn herbrand_base_product() {
        let p = parse_subprogram("p(1,a).", ParseMode::User).unwrap();
        assert_eq!(herbrand_base(&p).len(), 4);
    }

    #[test]
    fn vacuous_universal() {
        let q = parse_program("%@forall\na :- not a.\n%@constraint\n:- .").unwrap();
        assert!(is_coherent(&q, &EvalOptions::default()).unwrap().coherent);
    }

    #[test]
    fn fact_block_has_one_quantified_answer_set() {
        let q = parse_program("%@exists\na.").unwrap();
        let r = quantified_answer_sets(&q, &EvalOptions::default()).unwrap();
        assert_eq!(r.iter().map(names).collect::<Vec<_>>(), vec![vec!["a"]]);
    }

    #[test]
    fn universal_first_block_has_no_answer_sets() {
        let q = parse_program("%@forall\na.").unwrap();
        assert!(matches!(quantified_answer_sets(&q, &EvalOptions::default()), Err(Error::Usage(_))));
    }

    #[test]
    fn witness_is_least() {
        let q = parse_program("%@exists\n{a; b} = 1.\n%@constraint\n:- .\n").unwrap();
        assert!(!is_coherent(&q, &EvalOptions::default()).unwrap().coherent);
        let q = parse_program("%@exists\n{b; a} = 1.\n%@forall\n{c}.\n").unwrap();
        let r = is_coherent(&q, &EvalOptions::default()).unwrap();
        assert_eq!(names(r.witness.as_ref().unwrap()), vec!["a"]);
    }
}

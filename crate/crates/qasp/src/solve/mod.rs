//! Answer sets and optimal answer sets of ground programs.

mod cost;
mod eval;
mod search;
mod unfounded;

use std::ops::ControlFlow;
use std::time::Instant;

use serde::Serialize;

pub use cost::{cost_of, Cost};
pub use eval::{aggregate_status, bounds, interval_status, literal_status, Val};

use crate::error::Result;
use crate::ground::{AtomId, GroundLiteral, GroundProgram, GroundRule};
use search::Search;

/// Which reduct defines answer sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduct {
    /// Rules with a false body are dropped and negative literals, including negated
    /// aggregates, are removed from the remaining bodies.
    #[default]
    Flp,
    /// Rules with a false body are dropped; remaining bodies are kept intact.
    FlpClassic,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub reduct: Reduct,
    /// Maximum number of branching decisions along one search path.
    pub max_decisions: usize,
    /// Maximum number of atoms searched exhaustively by the unfounded-set check.
    pub max_unfounded: usize,
    /// Wall-clock deadline together with the budget in seconds it was derived from.
    pub deadline: Option<(Instant, u64)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { reduct: Reduct::Flp, max_decisions: 22, max_unfounded: 20, deadline: None }
    }
}

fn truth(i: &[bool]) -> impl Fn(AtomId) -> bool + '_ {
    move |a| i[a as usize]
}

pub fn is_model(g: &GroundProgram, i: &[bool]) -> bool {
    let t = truth(i);
    g.rules().iter().all(|r| !r.body.iter().all(|l| l.holds(&t)) || r.head.is_some_and(|h| i[h as usize]))
}

/// The reduct of `g` w.r.t. `i`.
pub fn flp_reduct(g: &GroundProgram, i: &[bool], reduct: Reduct) -> Vec<GroundRule> {
    let t = truth(i);
    g.rules()
        .iter()
        .filter(|r| r.body.iter().all(|l| l.holds(&t)))
        .map(|r| match reduct {
            Reduct::Flp => GroundRule {
                head: r.head,
                body: r.body.iter().filter(|l| !l.is_negative()).cloned().collect(),
            },
            Reduct::FlpClassic => r.clone(),
        })
        .collect()
}

/// Dense truth vector for a set of atom ids.
pub fn to_truth(g: &GroundProgram, set: &[AtomId]) -> Vec<bool> {
    let mut i = vec![false; g.len()];
    for &a in set {
        i[a as usize] = true;
    }
    i
}

pub fn is_answer_set(g: &GroundProgram, set: &[AtomId], opts: &SolveOptions) -> Result<bool> {
    let i = to_truth(g, set);
    Ok(is_model(g, &i) && unfounded::unfounded_free(g, &i, opts.reduct, opts.max_unfounded)?)
}

/// Streams answer sets in search order until `f` breaks.
pub fn for_each_answer_set(
    g: &GroundProgram,
    opts: &SolveOptions,
    mut f: impl FnMut(&[AtomId]) -> ControlFlow<()>,
) -> Result<()> {
    Search::new(g, opts).run(&mut f)
}

/// All answer sets, each sorted, in lexicographic order.
pub fn answer_sets(g: &GroundProgram, opts: &SolveOptions) -> Result<Vec<Vec<AtomId>>> {
    let mut out = Vec::new();
    for_each_answer_set(g, opts, |s| {
        out.push(s.to_vec());
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

pub fn first_answer_set(g: &GroundProgram, opts: &SolveOptions) -> Result<Option<Vec<AtomId>>> {
    let mut out = None;
    for_each_answer_set(g, opts, |s| {
        out = Some(s.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(out)
}

pub fn is_coherent(g: &GroundProgram, opts: &SolveOptions) -> Result<bool> {
    Ok(first_answer_set(g, opts)?.is_some())
}

/// Answer sets of minimum cost under the weak constraints of `g`, with that cost.
pub fn optimal_answer_sets(g: &GroundProgram, opts: &SolveOptions) -> Result<(Cost, Vec<Vec<AtomId>>)> {
    let mut best: Option<Cost> = None;
    let mut out: Vec<Vec<AtomId>> = Vec::new();
    for_each_answer_set(g, opts, |s| {
        let i = to_truth(g, s);
        let c = cost_of(g.weaks(), truth(&i));
        match &best {
            Some(b) if c > *b => {}
            Some(b) if c == *b => out.push(s.to_vec()),
            _ => {
                best = Some(c);
                out = vec![s.to_vec()];
            }
        }
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok((best.unwrap_or_default(), out))
}

/// Body literal truth under a total interpretation given as a dense vector.
pub fn body_holds(body: &[GroundLiteral], i: &[bool]) -> bool {
    let t = truth(i);
    body.iter().all(|l| l.holds(&t))
}

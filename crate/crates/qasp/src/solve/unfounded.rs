use crate::error::{Error, Result};
use crate::ground::{AtomId, GroundLiteral, GroundProgram, GroundRule};

use super::eval::{aggregate_status, Val};
use super::Reduct;

/// Truth of a rule body of the reduct w.r.t. `I` when evaluated in `J ⊆ I`.
/// Negative atoms are true in `J` because the rule belongs to the reduct.
fn reduct_body_in(body: &[GroundLiteral], j: &impl Fn(AtomId) -> bool, reduct: Reduct) -> bool {
    body.iter().all(|l| match l {
        GroundLiteral::Pos(a) => j(*a),
        GroundLiteral::Neg(_) => true,
        GroundLiteral::Agg { negated: false, aggregate } => aggregate.holds(j),
        GroundLiteral::Agg { negated: true, aggregate } => match reduct {
            Reduct::Flp => true,
            Reduct::FlpClassic => !aggregate.holds(j),
        },
    })
}

/// Rules of the reduct of `g` w.r.t. `i` with a head in `i`.
fn reduct_rules<'g>(g: &'g GroundProgram, i: &[bool]) -> Vec<&'g GroundRule> {
    let t = |a: AtomId| i[a as usize];
    g.rules()
        .iter()
        .filter(|r| r.head.is_some_and(|h| i[h as usize]) && r.body.iter().all(|l| l.holds(&t)))
        .collect()
}

/// Atoms of `i` that belong to `I \ U` for every unfounded set `U`.
fn founded(rules: &[&GroundRule], i: &[bool], reduct: Reduct) -> Vec<bool> {
    let mut s = vec![false; i.len()];
    loop {
        let mut changed = false;
        for r in rules {
            let h = r.head.expect("reduct rules have heads") as usize;
            if s[h] {
                continue;
            }
            let val = |a: AtomId| {
                if s[a as usize] {
                    Val::True
                } else if i[a as usize] {
                    Val::Unknown
                } else {
                    Val::False
                }
            };
            let certain = r.body.iter().all(|l| match l {
                GroundLiteral::Pos(a) => s[*a as usize],
                GroundLiteral::Neg(_) => true,
                GroundLiteral::Agg { negated: false, aggregate } => aggregate_status(aggregate, &val) == Val::True,
                GroundLiteral::Agg { negated: true, aggregate } => match reduct {
                    Reduct::Flp => true,
                    Reduct::FlpClassic => aggregate_status(aggregate, &val) == Val::False,
                },
            });
            if certain {
                s[h] = true;
                changed = true;
            }
        }
        if !changed {
            return s;
        }
    }
}

fn is_unfounded(rules: &[&GroundRule], i: &[bool], u: &[AtomId], reduct: Reduct) -> bool {
    let mut j = i.to_vec();
    for &a in u {
        j[a as usize] = false;
    }
    let jt = |a: AtomId| j[a as usize];
    rules
        .iter()
        .filter(|r| !j[r.head.expect("reduct rules have heads") as usize])
        .all(|r| !reduct_body_in(&r.body, &jt, reduct))
}

/// Whether the model `i` of `g` has no nonempty unfounded subset, i.e. is a minimal
/// model of its reduct. Atoms not settled by the founded fixpoint are searched
/// exhaustively, up to `max_candidates` of them.
pub fn unfounded_free(g: &GroundProgram, i: &[bool], reduct: Reduct, max_candidates: usize) -> Result<bool> {
    let rules = reduct_rules(g, i);
    let s = founded(&rules, i, reduct);
    let d: Vec<AtomId> = (0..i.len()).filter(|&a| i[a] && !s[a]).map(|a| a as AtomId).collect();
    if d.is_empty() {
        return Ok(true);
    }
    if is_unfounded(&rules, i, &d, reduct) {
        return Ok(false);
    }
    if d.len() > max_candidates {
        return Err(Error::Resource { cap: "unfounded-set candidates", limit: max_candidates as u64 });
    }
    let full = (1u64 << d.len()) - 1;
    for mask in 1..full {
        let u: Vec<AtomId> = d.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &a)| a).collect();
        if is_unfounded(&rules, i, &u, reduct) {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Instantiation of non-ground programs into [`GroundProgram`]s.
//!
//! Grounding is join-based: positive body atoms are matched against the set of
//! atoms that can possibly be derived, computed as the least fixpoint of the
//! program with negation and aggregates ignored. Atoms of earlier quantifier
//! blocks enter as externals.

mod program;

use std::collections::{BTreeSet, HashMap};

pub use program::*;

use crate::error::{Error, Result};
use crate::syntax::{
    expand_choices, Aggregate, Atom, Constant, FreshNames, GroundAtom, Literal, Name, Predicate,
    Program, Rule, Term, WeakConstraint,
};

#[derive(Clone, Debug)]
pub struct GroundOptions {
    /// Upper bound on the number of ground rules and weak constraints.
    pub max_rules: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { max_rules: 50_000 }
    }
}

type Subst = Vec<(Name, Constant)>;

#[derive(Default)]
struct Index {
    by_pred: HashMap<Predicate, Vec<GroundAtom>>,
    all: BTreeSet<GroundAtom>,
}

impl Index {
    fn insert(&mut self, a: GroundAtom) -> bool {
        if self.all.contains(&a) {
            return false;
        }
        self.by_pred.entry(a.signature()).or_default().push(a.clone());
        self.all.insert(a);
        true
    }

    fn candidates(&self, a: &Atom) -> &[GroundAtom] {
        self.by_pred.get(&a.signature()).map_or(&[], Vec::as_slice)
    }
}

fn lookup<'a>(s: &'a Subst, v: &str) -> Option<&'a Constant> {
    s.iter().rev().find(|(n, _)| &**n == v).map(|(_, c)| c)
}

fn subst_term(t: &Term, s: &Subst) -> Option<Constant> {
    match t {
        Term::Const(c) => Some(c.clone()),
        Term::Var(v) => lookup(s, v).cloned(),
    }
}

fn subst_atom(a: &Atom, s: &Subst) -> Option<GroundAtom> {
    let args = a.args.iter().map(|t| subst_term(t, s)).collect::<Option<Vec<_>>>()?;
    Some(GroundAtom { predicate: a.predicate.clone(), args })
}

fn unify(a: &Atom, g: &GroundAtom, s: &mut Subst) -> bool {
    let mark = s.len();
    for (t, c) in a.args.iter().zip(&g.args) {
        let ok = match t {
            Term::Const(k) => k == c,
            Term::Var(v) => match lookup(s, v) {
                Some(b) => b == c,
                None => {
                    s.push((v.clone(), c.clone()));
                    true
                }
            },
        };
        if !ok {
            s.truncate(mark);
            return false;
        }
    }
    true
}

fn bound_score(a: &Atom, s: &Subst) -> usize {
    a.args
        .iter()
        .filter(|t| match t {
            Term::Const(_) => true,
            Term::Var(v) => lookup(s, v).is_some(),
        })
        .count()
}

/// Enumerates substitutions extending `s` that map every atom in `atoms` into `idx`.
fn join(
    atoms: &mut Vec<&Atom>,
    idx: &Index,
    s: &mut Subst,
    f: &mut dyn FnMut(&Subst) -> Result<()>,
) -> Result<()> {
    if atoms.is_empty() {
        return f(s);
    }
    let best = (0..atoms.len())
        .max_by_key(|&i| (bound_score(atoms[i], s), usize::MAX - idx.candidates(atoms[i]).len()))
        .expect("nonempty");
    let a = atoms.swap_remove(best);
    for g in idx.candidates(a) {
        let mark = s.len();
        if unify(a, g, s) {
            let r = join(atoms, idx, s, f);
            s.truncate(mark);
            r?;
        }
    }
    atoms.push(a);
    let last = atoms.len() - 1;
    atoms.swap(best, last);
    Ok(())
}

fn comparisons_hold(body: &[Literal], s: &Subst) -> Result<bool> {
    for l in body {
        if let Literal::Comparison { left, op, right } = l {
            let (Some(x), Some(y)) = (subst_term(left, s), subst_term(right, s)) else {
                return Err(Error::Internal(format!("unbound variable in comparison {l}")));
            };
            if !op.holds(&x, &y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn positive_atoms(body: &[Literal]) -> Vec<&Atom> {
    body.iter()
        .filter_map(|l| match l {
            Literal::Atom { atom, negated: false } => Some(atom),
            _ => None,
        })
        .collect()
}

fn possible_index(rules: &[&Rule], externals: &[GroundAtom]) -> Result<Index> {
    let mut idx = Index::default();
    for e in externals {
        idx.insert(e.clone());
    }
    loop {
        let mut new = Vec::new();
        for r in rules {
            let Some(head) = &r.head else { continue };
            let mut pos = positive_atoms(&r.body);
            join(&mut pos, &idx, &mut Vec::new(), &mut |s| {
                if comparisons_hold(&r.body, s)? {
                    let g = subst_atom(head, s)
                        .ok_or_else(|| Error::Internal(format!("unsafe rule reached grounding: {r}")))?;
                    if !idx.all.contains(&g) {
                        new.push(g);
                    }
                }
                Ok(())
            })?;
        }
        let mut changed = false;
        for g in new {
            changed |= idx.insert(g);
        }
        if !changed {
            return Ok(idx);
        }
    }
}

fn fresh_for(p: &Program, externals: &[GroundAtom]) -> FreshNames {
    let mut names: BTreeSet<Name> = p.predicates().into_iter().map(|q| q.name).collect();
    names.extend(externals.iter().map(|a| a.predicate.clone()));
    FreshNames::new(&names)
}

/// Atoms derivable from `p` plus `externals` when negation and aggregates are ignored.
/// Choice atoms count as derivable; auxiliary complement atoms are not reported.
pub fn possible_atoms(p: &Program, externals: &[GroundAtom]) -> Result<BTreeSet<GroundAtom>> {
    let mut fresh = fresh_for(p, externals);
    let expanded = expand_choices(p, &mut fresh);
    let rules: Vec<&Rule> = expanded.program.rules().collect();
    let idx = possible_index(&rules, externals)?;
    let hidden: BTreeSet<&Name> = expanded.complements.iter().collect();
    Ok(idx.all.into_iter().filter(|a| !hidden.contains(&a.predicate)).collect())
}

pub fn ground(p: &Program) -> Result<GroundProgram> {
    ground_with(p, &[], &GroundOptions::default())
}

/// Grounds `p` assuming the atoms in `externals` may be supplied from outside.
pub fn ground_with(p: &Program, externals: &[GroundAtom], opts: &GroundOptions) -> Result<GroundProgram> {
    let mut fresh = fresh_for(p, externals);
    let expanded = expand_choices(p, &mut fresh);
    let rules: Vec<&Rule> = expanded.program.rules().collect();
    let idx = possible_index(&rules, externals)?;
    let mut g = Grounder { idx: &idx, b: GroundBuilder::new(), count: 0, max: opts.max_rules };
    for c in &expanded.complements {
        g.b.hide_predicate(c.clone());
    }
    for r in &rules {
        g.rule(r)?;
    }
    for w in expanded.program.weaks() {
        g.weak(w)?;
    }
    Ok(g.b.build())
}

struct Grounder<'a> {
    idx: &'a Index,
    b: GroundBuilder,
    count: usize,
    max: usize,
}

impl Grounder<'_> {
    fn bump(&mut self) -> Result<()> {
        self.count += 1;
        if self.count > self.max {
            return Err(Error::Resource { cap: "ground rules", limit: self.max as u64 });
        }
        Ok(())
    }

    fn instances(&self, body: &[Literal]) -> Result<Vec<Subst>> {
        let mut out = Vec::new();
        let mut pos = positive_atoms(body);
        join(&mut pos, self.idx, &mut Vec::new(), &mut |s| {
            if comparisons_hold(body, s)? {
                out.push(s.clone());
            }
            Ok(())
        })?;
        Ok(out)
    }

    fn rule(&mut self, r: &Rule) -> Result<()> {
        for s in self.instances(&r.body)? {
            self.bump()?;
            let head = match &r.head {
                Some(h) => {
                    let g = subst_atom(h, &s).ok_or_else(|| Error::Internal(format!("unbound head in {r}")))?;
                    Some(self.b.intern(&g))
                }
                None => None,
            };
            let body = self.body(&r.body, &s)?;
            self.b.add_rule(GroundRule { head, body });
        }
        Ok(())
    }

    fn weak(&mut self, w: &WeakConstraint) -> Result<()> {
        for s in self.instances(&w.body)? {
            self.bump()?;
            let unbound = || Error::Internal(format!("unbound term in {w}"));
            let weight = subst_term(&w.weight, &s).ok_or_else(unbound)?;
            let level = subst_term(&w.level, &s).ok_or_else(unbound)?;
            let tuple = w.terms.iter().map(|t| subst_term(t, &s)).collect::<Option<Vec<_>>>().ok_or_else(unbound)?;
            let body = self.body(&w.body, &s)?;
            self.b.add_weak(GroundWeak { body, weight, level, tuple });
        }
        Ok(())
    }

    fn body(&mut self, body: &[Literal], s: &Subst) -> Result<Vec<GroundLiteral>> {
        let mut out = Vec::new();
        for l in body {
            match l {
                Literal::Atom { atom, negated } => {
                    let g = subst_atom(atom, s).ok_or_else(|| Error::Internal(format!("unbound atom {atom}")))?;
                    if *negated {
                        if self.idx.all.contains(&g) {
                            out.push(GroundLiteral::Neg(self.b.intern(&g)));
                        }
                    } else {
                        out.push(GroundLiteral::Pos(self.b.intern(&g)));
                    }
                }
                Literal::Aggregate { aggregate, negated } => {
                    let aggregate = self.aggregate(aggregate, s)?;
                    out.push(GroundLiteral::Agg { negated: *negated, aggregate });
                }
                Literal::Comparison { .. } => {}
            }
        }
        Ok(out)
    }

    fn aggregate(&mut self, a: &Aggregate, s: &Subst) -> Result<GroundAggregate> {
        let guard = match subst_term(&a.guard, s) {
            Some(Constant::Int(v)) => v,
            Some(c) => return Err(Error::Invalid(format!("aggregate guard must be an integer, found {c} in {a}"))),
            None => return Err(Error::Internal(format!("unbound guard in {a}"))),
        };
        let mut elements = Vec::new();
        for e in &a.elements {
            let mut pos = positive_atoms(&e.condition);
            let mut matches = Vec::new();
            join(&mut pos, self.idx, &mut s.clone(), &mut |s2| {
                if comparisons_hold(&e.condition, s2)? {
                    matches.push(s2.clone());
                }
                Ok(())
            })?;
            for s2 in matches {
                let tuple = e
                    .terms
                    .iter()
                    .map(|t| subst_term(t, &s2))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Internal(format!("unbound element term in {a}")))?;
                let mut condition = Vec::new();
                for l in &e.condition {
                    if let Literal::Atom { atom, negated } = l {
                        let g = subst_atom(atom, &s2)
                            .ok_or_else(|| Error::Internal(format!("unbound atom {atom}")))?;
                        if !*negated || self.idx.all.contains(&g) {
                            condition.push((self.b.intern(&g), *negated));
                        }
                    }
                }
                condition.sort();
                condition.dedup();
                elements.push(GroundElement { tuple, condition });
            }
        }
        elements.sort();
        elements.dedup();
        Ok(GroundAggregate { function: a.function, elements, op: a.op, guard })
    }
}

//! Compilation of quantified programs with weak constraints into plain,
//! quantifier-alternating quantified programs.
//!
//! The driver repeatedly picks the innermost suffix matching one of five shapes
//! (checked in order) and collapses it, then drops the global weak constraints.

mod check;
mod transform;

use std::collections::BTreeSet;

use serde::Serialize;

pub use check::{build_gadget, check_gadget, GadgetNames};
pub use transform::{
    clone, clone_atom, clone_body_except, clone_except, cloned_name, or_transform, remap, remap_quantified,
    remap_with, satisfies_sda, sda_violation,
};

use crate::error::{Error, Result};
use crate::ground::{ground_with, possible_atoms, GroundOptions};
use crate::syntax::{
    Atom, Block, ChoiceElement, ChoiceRule, FreshNames, GroundAtom, Literal, Predicate, QuantifiedProgram,
    Quantifier, Rule, Statement, Term, WeakConstraint,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SuffixType {
    Type1,
    Type2,
    Type3,
    Type4,
    Type5,
    None,
}

impl SuffixType {
    pub const ORDER: [SuffixType; 5] =
        [SuffixType::Type1, SuffixType::Type2, SuffixType::Type3, SuffixType::Type4, SuffixType::Type5];
}

fn alternating(blocks: &[Block]) -> bool {
    blocks.windows(2).all(|w| w[0].quantifier != w[1].quantifier)
}

fn plain(b: &Block) -> bool {
    b.program.is_plain()
}

/// Shape of the suffix of `q` starting at block `i` (0-based).
pub fn classify_suffix(q: &QuantifiedProgram, i: usize) -> SuffixType {
    let s = &q.blocks[i.min(q.blocks.len())..];
    let Some(first) = s.first() else { return SuffixType::None };
    if let Some(second) = s.get(1) {
        if first.quantifier == second.quantifier {
            if plain(first) && plain(second) {
                return SuffixType::Type1;
            }
            if !plain(first) && plain(second) && alternating(&s[1..]) {
                return match first.quantifier {
                    Quantifier::Exists => SuffixType::Type2,
                    Quantifier::Forall => SuffixType::Type3,
                };
            }
            return SuffixType::None;
        }
    }
    if !plain(first) && s[1..].iter().all(plain) && alternating(s) {
        return match first.quantifier {
            Quantifier::Exists => SuffixType::Type4,
            Quantifier::Forall => SuffixType::Type5,
        };
    }
    SuffixType::None
}

#[derive(Clone, Debug, Serialize)]
pub struct RewriteStep {
    #[serde(rename = "type")]
    pub ty: SuffixType,
    pub index: usize,
    #[serde(skip)]
    pub before: QuantifiedProgram,
    #[serde(skip)]
    pub after: QuantifiedProgram,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RewriteTrace {
    pub steps: Vec<RewriteStep>,
    pub notes: Vec<String>,
}

fn ban(a: &Atom) -> Rule {
    Rule::constraint(vec![Literal::pos(a.clone())])
}

fn prefix_predicates(q: &QuantifiedProgram, i: usize) -> BTreeSet<Predicate> {
    q.blocks[..i].iter().flat_map(|b| b.program.predicates()).collect()
}

/// Applies the collapsing transformations; owns the fresh-name supply so that names
/// stay unique across a whole rewriting run.
pub struct Rewriter {
    fresh: FreshNames,
    ground: GroundOptions,
}

impl Rewriter {
    pub fn new(q: &QuantifiedProgram) -> Self {
        Self::with_options(q, GroundOptions::default())
    }

    pub fn with_options(q: &QuantifiedProgram, ground: GroundOptions) -> Self {
        Rewriter { fresh: FreshNames::for_program(q), ground }
    }

    fn expect(q: &QuantifiedProgram, i: usize, ty: SuffixType) -> Result<()> {
        let got = classify_suffix(q, i);
        if got != ty {
            return Err(Error::Usage(format!("suffix at block {} is {got:?}, expected {ty:?}", i + 1)));
        }
        Ok(())
    }

    fn externals(&self, q: &QuantifiedProgram, i: usize) -> Result<Vec<GroundAtom>> {
        let mut ext = Vec::new();
        for b in &q.blocks[..i] {
            ext = possible_atoms(&b.program, &ext)?.into_iter().collect();
        }
        Ok(ext)
    }

    /// Merges two plain blocks with the same quantifier.
    pub fn col1(&mut self, q: &QuantifiedProgram, i: usize) -> Result<QuantifiedProgram> {
        Self::expect(q, i, SuffixType::Type1)?;
        let mut out = q.clone();
        let second = out.blocks.remove(i + 1);
        out.blocks[i].program.extend(&second.program);
        Ok(out)
    }

    /// The merged block `B1 ∪ or(B2, unsat) ∪ W` shared by col2 and col3.
    fn merge_with_unsat(&mut self, q: &QuantifiedProgram, i: usize) -> Result<(QuantifiedProgram, Atom)> {
        let b1 = &q.blocks[i].program;
        let ext = self.externals(q, i)?;
        let g = ground_with(b1, &ext, &self.ground)?;
        let lmin = g.weaks().iter().filter_map(|w| w.level.as_int()).min().unwrap_or(0);
        let u = Atom::prop(&self.fresh.numbered("unsat"));
        let mut merged = b1.clone();
        merged.extend(&or_transform(&q.blocks[i + 1].program, &u)?);
        merged.push(Statement::Choice(ChoiceRule {
            elements: vec![ChoiceElement { atom: u.clone(), condition: Vec::new() }],
            exactly: None,
            body: Vec::new(),
        }));
        merged.push(Statement::Weak(WeakConstraint {
            body: vec![Literal::pos(u.clone())],
            weight: Term::int(1),
            level: Term::int(lmin - 1),
            terms: Vec::new(),
        }));
        let mut out = q.clone();
        out.blocks.remove(i + 1);
        out.blocks[i].program = merged;
        Ok((out, u))
    }

    /// `∃B1 ∃B2` with `B1` not plain and `B2` plain.
    pub fn col2(&mut self, q: &QuantifiedProgram, i: usize) -> Result<QuantifiedProgram> {
        Self::expect(q, i, SuffixType::Type2)?;
        let (mut out, u) = self.merge_with_unsat(q, i)?;
        if i + 1 == out.blocks.len() {
            out.constraint.push_rule(ban(&u));
        } else {
            out.blocks[i + 1].program = or_transform(&out.blocks[i + 1].program, &u)?;
            match out.blocks.get_mut(i + 2) {
                Some(b) => b.program.push_rule(ban(&u)),
                None => out.constraint.push_rule(ban(&u)),
            }
        }
        Ok(out)
    }

    /// `∀B1 ∀B2` with `B1` not plain and `B2` plain.
    pub fn col3(&mut self, q: &QuantifiedProgram, i: usize) -> Result<QuantifiedProgram> {
        Self::expect(q, i, SuffixType::Type3)?;
        let (mut out, u) = self.merge_with_unsat(q, i)?;
        if i + 1 == out.blocks.len() {
            out.constraint = or_transform(&out.constraint, &u)?;
        } else {
            out.blocks[i + 1].program = or_transform(&out.blocks[i + 1].program, &u)?;
            match out.blocks.get_mut(i + 2) {
                Some(b) => b.program.push_rule(ban(&u)),
                None => out.constraint = or_transform(&out.constraint, &u)?,
            }
        }
        Ok(out)
    }

    /// Strips the weak constraints of block `i` and inserts a dual block holding a
    /// clone of it, the check gadget and (if present) the guarded next block.
    fn expand_check(&mut self, q: &QuantifiedProgram, i: usize) -> Result<(QuantifiedProgram, Atom)> {
        let b1 = &q.blocks[i].program;
        let keep = prefix_predicates(q, i);
        let cloned: BTreeSet<_> =
            b1.predicates().into_iter().filter(|p| !keep.contains(p)).map(|p| p.name).collect();
        let tag = self.fresh.tag("o", &cloned, &|_| Vec::new());
        let gtag = self.fresh.tag("P", &BTreeSet::new(), &GadgetNames::list);
        let names = GadgetNames::new(&gtag);
        let ext = self.externals(q, i)?;
        let gadget = build_gadget(b1, &ext, &tag, &keep, &names, &self.ground)?;
        let rules = b1.without_weaks();
        let mut inserted = clone_except(&rules, &tag, &keep);
        inserted.extend(&gadget);
        let dom = names.dom_atom();
        let dual = q.blocks[i].quantifier.dual();
        let mut out = q.clone();
        out.blocks[i].program = rules;
        match out.blocks.get_mut(i + 1) {
            Some(b2) => {
                inserted.extend(&or_transform(&b2.program, &dom)?);
                b2.program = inserted;
            }
            None => out.blocks.insert(i + 1, Block::new(dual, inserted)),
        }
        Ok((out, dom))
    }

    /// Existential non-plain block followed by a plain alternating tail.
    pub fn col4(&mut self, q: &QuantifiedProgram, i: usize) -> Result<QuantifiedProgram> {
        Self::expect(q, i, SuffixType::Type4)?;
        let (mut out, dom) = self.expand_check(q, i)?;
        match out.blocks.get_mut(i + 2) {
            Some(b) => b.program.push_rule(ban(&dom)),
            None => out.constraint.push_rule(ban(&dom)),
        }
        Ok(out)
    }

    /// Universal non-plain block followed by a plain alternating tail.
    pub fn col5(&mut self, q: &QuantifiedProgram, i: usize) -> Result<QuantifiedProgram> {
        Self::expect(q, i, SuffixType::Type5)?;
        let (mut out, dom) = self.expand_check(q, i)?;
        match out.blocks.get_mut(i + 2) {
            Some(b) => b.program.push_rule(ban(&dom)),
            None => out.constraint = or_transform(&out.constraint, &dom)?,
        }
        Ok(out)
    }

    pub fn apply(&mut self, ty: SuffixType, q: &QuantifiedProgram, i: usize) -> Result<QuantifiedProgram> {
        match ty {
            SuffixType::Type1 => self.col1(q, i),
            SuffixType::Type2 => self.col2(q, i),
            SuffixType::Type3 => self.col3(q, i),
            SuffixType::Type4 => self.col4(q, i),
            SuffixType::Type5 => self.col5(q, i),
            SuffixType::None => Err(Error::Usage("no transformation for suffix type None".into())),
        }
    }
}

/// Rewrites `q` into an equi-coherent plain, alternating program without global weak
/// constraints. Inputs violating the stratified definition assumption are remapped first.
pub fn rewrite_to_aspq(q: &QuantifiedProgram) -> Result<(QuantifiedProgram, RewriteTrace)> {
    rewrite_to_aspq_with(q, &GroundOptions::default())
}

pub fn rewrite_to_aspq_with(q: &QuantifiedProgram, ground: &GroundOptions) -> Result<(QuantifiedProgram, RewriteTrace)> {
    let mut trace = RewriteTrace::default();
    let mut q = q.clone();
    if !satisfies_sda(&q) {
        q = remap_quantified(&q);
        trace.notes.push("input violates the stratified definition assumption; remapped before rewriting".into());
    }
    let mut rw = Rewriter::with_options(&q, ground.clone());
    let limit = 10 * (q.blocks.len() + 1) + 10;
    'search: loop {
        for ty in SuffixType::ORDER {
            let Some(i) = (0..q.blocks.len()).rev().find(|&i| classify_suffix(&q, i) == ty) else { continue };
            if trace.steps.len() >= limit {
                return Err(Error::Internal(format!("rewriting did not terminate within {limit} steps")));
            }
            let after = rw.apply(ty, &q, i)?;
            log::debug!("{ty:?} at block {}", i + 1);
            trace.steps.push(RewriteStep { ty, index: i, before: q, after: after.clone() });
            q = after;
            continue 'search;
        }
        break;
    }
    if !q.global.is_empty() {
        if q.blocks[0].quantifier == Quantifier::Forall {
            let msg = "global weak constraints have no effect on a universal program and were dropped";
            log::warn!("{msg}");
            trace.notes.push(msg.into());
        }
        q.global.clear();
    }
    Ok((q, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn q(s: &str) -> QuantifiedProgram {
        parse_program(s).unwrap()
    }

    #[test]
    fn classification() {
        let p = q("%@exists\n{a}.\n%@exists\n{b}.\n");
        assert_eq!(classify_suffix(&p, 0), SuffixType::Type1);
        let p = q("%@exists\n{a}.\n:~ a. [1@1]\n%@exists\n{b}.\n%@forall\n{c}.\n");
        assert_eq!(classify_suffix(&p, 0), SuffixType::Type2);
        let p = q("%@forall\n{a}.\n:~ a. [1@1]\n%@exists\n{b}.\n");
        assert_eq!(classify_suffix(&p, 0), SuffixType::Type5);
        assert_eq!(classify_suffix(&p, 1), SuffixType::None);
        let p = q("%@exists\n{a}.\n%@forall\n{b}.\n");
        assert_eq!(classify_suffix(&p, 0), SuffixType::None);
    }

    #[test]
    fn col1_merges() {
        let p = q("%@exists\na.\n%@exists\nb :- a.\n");
        let r = Rewriter::new(&p).col1(&p, 0).unwrap();
        assert_eq!(r.blocks.len(), 1);
        assert_eq!(r.blocks[0].program.to_string(), "a.\nb :- a.\n");
    }

    #[test]
    fn col4_inserts_universal_block() {
        let p = q("%@exists\n{a}.\n:~ a. [1@1]\n%@constraint\n:- not a.\n");
        let r = Rewriter::new(&p).col4(&p, 0).unwrap();
        assert_eq!(r.blocks.len(), 2);
        assert_eq!(r.blocks[1].quantifier, Quantifier::Forall);
        assert!(r.is_plain());
        assert!(r.constraint.to_string().contains(":- dom$P."));
    }

    #[test]
    fn precondition_is_checked() {
        let p = q("%@exists\na.\n");
        assert!(matches!(Rewriter::new(&p).col2(&p, 0), Err(Error::Usage(_))));
    }

    #[test]
    fn plain_alternating_is_untouched() {
        let p = q("%@exists\n{a}.\n%@forall\n{b}.\n%@constraint\n:- a, b.\n");
        let (r, t) = rewrite_to_aspq(&p).unwrap();
        assert_eq!(r, p);
        assert!(t.steps.is_empty());
    }
}

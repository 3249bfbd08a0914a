use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::{
    herbrand_universe, name, AggElement, Aggregate, Atom, ChoiceElement, ChoiceRule, FreshNames, Literal, Name,
    Predicate, Program, QuantifiedProgram, Rule, Statement, Term, WeakConstraint,
};

fn rename_atom(a: &Atom, f: &dyn Fn(&Atom) -> Option<Name>) -> Atom {
    match f(a) {
        Some(n) => Atom { predicate: n, args: a.args.clone() },
        None => a.clone(),
    }
}

fn rename_body(body: &[Literal], f: &dyn Fn(&Atom) -> Option<Name>) -> Vec<Literal> {
    body.iter()
        .map(|l| match l {
            Literal::Atom { atom, negated } => Literal::Atom { atom: rename_atom(atom, f), negated: *negated },
            Literal::Aggregate { aggregate, negated } => Literal::Aggregate {
                aggregate: Aggregate {
                    elements: aggregate
                        .elements
                        .iter()
                        .map(|e| AggElement { terms: e.terms.clone(), condition: rename_body(&e.condition, f) })
                        .collect(),
                    ..aggregate.clone()
                },
                negated: *negated,
            },
            Literal::Comparison { .. } => l.clone(),
        })
        .collect()
}

fn rename_program(p: &Program, f: &dyn Fn(&Atom) -> Option<Name>) -> Program {
    let statements = p
        .statements
        .iter()
        .map(|s| match s {
            Statement::Rule(r) => Statement::Rule(Rule {
                head: r.head.as_ref().map(|h| rename_atom(h, f)),
                body: rename_body(&r.body, f),
            }),
            Statement::Choice(c) => Statement::Choice(ChoiceRule {
                elements: c
                    .elements
                    .iter()
                    .map(|e| ChoiceElement { atom: rename_atom(&e.atom, f), condition: rename_body(&e.condition, f) })
                    .collect(),
                exactly: c.exactly,
                body: rename_body(&c.body, f),
            }),
            Statement::Weak(w) => Statement::Weak(WeakConstraint { body: rename_body(&w.body, f), ..w.clone() }),
        })
        .collect();
    Program { statements }
}

pub fn cloned_name(predicate: &str, tag: &str) -> Name {
    name(&format!("{predicate}${tag}"))
}

/// Renames every predicate `p` to `p$tag`.
pub fn clone(p: &Program, tag: &str) -> Program {
    rename_program(p, &|a| Some(cloned_name(&a.predicate, tag)))
}

/// As [`clone`], leaving the predicates in `keep` untouched.
pub fn clone_except(p: &Program, tag: &str, keep: &BTreeSet<Predicate>) -> Program {
    rename_program(p, &|a| (!keep.contains(&a.signature())).then(|| cloned_name(&a.predicate, tag)))
}

/// Body of a rule renamed as by [`clone_except`].
pub fn clone_body_except(body: &[Literal], tag: &str, keep: &BTreeSet<Predicate>) -> Vec<Literal> {
    rename_body(body, &|a| (!keep.contains(&a.signature())).then(|| cloned_name(&a.predicate, tag)))
}

pub fn clone_atom(a: &Atom, tag: &str) -> Atom {
    Atom { predicate: cloned_name(&a.predicate, tag), args: a.args.clone() }
}

/// Adds `not l` to every rule, choice and weak constraint body of `p`.
pub fn or_transform(p: &Program, l: &Atom) -> Result<Program> {
    if p.predicates().contains(&l.signature()) {
        return Err(Error::Usage(format!("or: predicate of {l} already occurs in the program")));
    }
    let guard = Literal::neg(l.clone());
    let statements = p
        .statements
        .iter()
        .map(|s| {
            let mut s = s.clone();
            match &mut s {
                Statement::Rule(r) => r.body.push(guard.clone()),
                Statement::Choice(c) => c.body.push(guard.clone()),
                Statement::Weak(w) => w.body.push(guard.clone()),
            }
            s
        })
        .collect();
    Ok(Program { statements })
}

fn vars(n: usize) -> Vec<Term> {
    (1..=n).map(|k| Term::var(&format!("X{k}"))).collect()
}

/// `clone(p2, tag)` plus bridges tying `q$tag` to `q` on the base of `p1`:
/// `q$tag(X..) :- q(X..).` and `:- q$tag(X..), not q(X..), dom(X1), ...` where `dom`
/// holds the universe of `p1` (omitted when every predicate of `p1` is 0-ary).
pub fn remap_with(p2: &Program, p1: &Program, tag: &str, fresh: &mut FreshNames) -> Program {
    let mut out = clone(p2, tag);
    let preds = p1.predicates();
    let domain = preds.iter().any(|q| q.arity > 0).then(|| fresh.numbered("hu"));
    if let Some(d) = &domain {
        for c in herbrand_universe(p1) {
            out.push_rule(Rule::fact(Atom { predicate: d.clone(), args: vec![Term::Const(c)] }));
        }
    }
    for q in &preds {
        let args = vars(q.arity);
        let orig = Atom { predicate: q.name.clone(), args: args.clone() };
        let copy = Atom { predicate: cloned_name(&q.name, tag), args: args.clone() };
        out.push_rule(Rule { head: Some(copy.clone()), body: vec![Literal::pos(orig.clone())] });
        let mut body = vec![Literal::pos(copy), Literal::neg(orig)];
        if let Some(d) = &domain {
            body.extend(args.iter().map(|x| Literal::pos(Atom { predicate: d.clone(), args: vec![x.clone()] })));
        }
        out.push_rule(Rule::constraint(body));
    }
    out
}

/// [`remap_with`] using tag `c`.
pub fn remap(p2: &Program, p1: &Program) -> Program {
    let mut names: BTreeSet<Name> = p1.predicates().into_iter().chain(p2.predicates()).map(|q| q.name).collect();
    let clones: Vec<Name> = names.iter().map(|n| cloned_name(n, "c")).collect();
    names.extend(clones);
    remap_with(p2, p1, "c", &mut FreshNames::new(&names))
}

/// Stages of `q`: the blocks followed by the constraint program.
fn stage_count(q: &QuantifiedProgram) -> usize {
    q.blocks.len() + 1
}

fn stage(q: &QuantifiedProgram, i: usize) -> &Program {
    if i < q.blocks.len() {
        &q.blocks[i].program
    } else {
        &q.constraint
    }
}

fn stage_mut(q: &mut QuantifiedProgram, i: usize) -> &mut Program {
    if i < q.blocks.len() {
        &mut q.blocks[i].program
    } else {
        &mut q.constraint
    }
}

fn prefix_program(q: &QuantifiedProgram, i: usize) -> Program {
    let mut p = Program::new();
    for b in &q.blocks[..i] {
        p.extend(&b.program);
    }
    p
}

/// Index of the first stage (block, or the constraint program as the last stage)
/// defining a predicate that occurs in an earlier block.
pub fn sda_violation(q: &QuantifiedProgram) -> Option<usize> {
    let mut seen: BTreeSet<Predicate> = BTreeSet::new();
    for i in 0..stage_count(q) {
        let p = stage(q, i);
        if p.head_predicates().iter().any(|h| seen.contains(h)) {
            return Some(i);
        }
        seen.extend(p.predicates());
    }
    None
}

/// Whether no block (nor the constraint program) defines a predicate of an earlier block.
pub fn satisfies_sda(q: &QuantifiedProgram) -> bool {
    sda_violation(q).is_none()
}

/// Normalizes `q` to satisfy the stratified definition assumption. Each offending
/// stage is remapped against the union of the blocks before it, with a tag fresh for
/// that stage, and every later stage is cloned with the same tag.
pub fn remap_quantified(q: &QuantifiedProgram) -> QuantifiedProgram {
    let mut q = q.clone();
    let mut fresh = FreshNames::for_program(&q);
    let n = stage_count(&q);
    for i in 1..n {
        let prefix = prefix_program(&q, i);
        let prefix_preds = prefix.predicates();
        if stage(&q, i).head_predicates().is_disjoint(&prefix_preds) {
            continue;
        }
        let mut names: BTreeSet<Name> = prefix_preds.iter().map(|p| p.name.clone()).collect();
        for j in i..n {
            names.extend(stage(&q, j).predicates().into_iter().map(|p| p.name));
        }
        let tag = fresh.tag("c", &names, &|_| Vec::new());
        let remapped = remap_with(stage(&q, i), &prefix, &tag, &mut fresh);
        *stage_mut(&mut q, i) = remapped;
        for j in i + 1..n {
            let cloned = clone(stage(&q, j), &tag);
            *stage_mut(&mut q, j) = cloned;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_subprogram, ParseMode};

    fn prog(s: &str) -> Program {
        parse_subprogram(s, ParseMode::User).unwrap()
    }

    #[test]
    fn clone_renames_everything() {
        assert_eq!(clone(&prog("a :- b, not c."), "o").to_string(), "a$o :- b$o, not c$o.\n");
        assert_eq!(clone(&prog(":~ p(X). [X@1, X]"), "o").to_string(), ":~ p$o(X). [X@1, X]\n");
    }

    #[test]
    fn or_guards_bodies() {
        let u = Atom::prop("u");
        assert_eq!(or_transform(&prog("a :- b."), &u).unwrap().to_string(), "a :- b, not u.\n");
        assert_eq!(or_transform(&prog("{a}."), &u).unwrap().to_string(), "{a} :- not u.\n");
        assert!(or_transform(&prog("u :- b."), &u).is_err());
    }

    #[test]
    fn remap_propositional() {
        let r = remap(&prog("b :- a."), &prog("a."));
        assert_eq!(r.to_string(), "b$c :- a$c.\na$c :- a.\n:- a$c, not a.\n");
    }

    #[test]
    fn sda_detection_and_repair() {
        let q = parse_program("%@exists\n{a}.\n%@forall\na :- b.\n{b}.\n%@exists\nc :- a.\n").unwrap();
        assert_eq!(sda_violation(&q), Some(1));
        let r = remap_quantified(&q);
        assert!(satisfies_sda(&r));
        assert_eq!(r.blocks[0], q.blocks[0]);
        assert!(r.blocks[2].program.to_string().contains("c$c :- a$c."));
    }
}

//! Independent oracles shared by the integration tests and the acceptance harness.
//! Nothing here reuses the library's evaluation code: aggregates, models, reducts,
//! minimality and costs are recomputed from the ground program data.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use qasp::ground::{AtomId, GroundAggregate, GroundBuilder, GroundElement, GroundLiteral, GroundProgram, GroundRule, GroundWeak, Interpretation};
use qasp::syntax::{
    expand_choices, herbrand_universe, parse_program, AggFunction, Atom, Constant, FreshNames, GroundAtom, Literal,
    Name, Program, QuantifiedProgram, Statement, Term,
};

pub fn fixture(name: &str) -> QuantifiedProgram {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_program(&text).unwrap()
}

pub fn fixture_names() -> Vec<&'static str> {
    vec!["example1_pi1.qasp", "example1_pi2.qasp", "example2.qasp", "sda_violation.qasp", "nonground.qasp"]
}

pub fn names(m: &Interpretation) -> Vec<String> {
    m.iter().map(|a| a.to_string()).collect()
}

// ---- aggregates, models, answer sets ----

fn agg_value(a: &GroundAggregate, i: &BTreeSet<AtomId>) -> i64 {
    let mut seen: Vec<&Vec<Constant>> = Vec::new();
    for e in &a.elements {
        let on = e.condition.iter().all(|&(x, neg)| i.contains(&x) != neg);
        if on && !seen.contains(&&e.tuple) {
            seen.push(&e.tuple);
        }
    }
    match a.function {
        AggFunction::Count => seen.len() as i64,
        AggFunction::Sum => seen.iter().filter_map(|t| t.first().and_then(Constant::as_int)).sum(),
    }
}

fn agg_true(a: &GroundAggregate, i: &BTreeSet<AtomId>) -> bool {
    a.op.holds(&agg_value(a, i), &a.guard)
}

fn lit_true(l: &GroundLiteral, i: &BTreeSet<AtomId>) -> bool {
    match l {
        GroundLiteral::Pos(a) => i.contains(a),
        GroundLiteral::Neg(a) => !i.contains(a),
        GroundLiteral::Agg { negated, aggregate } => agg_true(aggregate, i) != *negated,
    }
}

fn body_true(b: &[GroundLiteral], i: &BTreeSet<AtomId>) -> bool {
    b.iter().all(|l| lit_true(l, i))
}

fn model_of(rules: &[GroundRule], i: &BTreeSet<AtomId>) -> bool {
    rules.iter().all(|r| !body_true(&r.body, i) || r.head.is_some_and(|h| i.contains(&h)))
}

fn subsets(items: &[AtomId]) -> impl Iterator<Item = BTreeSet<AtomId>> + '_ {
    (0u64..1 << items.len()).map(move |m| (0..items.len()).filter(|&k| m >> k & 1 == 1).map(|k| items[k]).collect())
}

/// Answer sets by enumerating subsets of the head atoms that are not facts; the reduct keeps the rules
/// whose body holds and, unless `classic`, strips their negative literals (negated
/// atoms and negated aggregates). Sorted, as sets of visible atoms.
pub fn oracle_answer_sets(g: &GroundProgram, classic: bool) -> Vec<Interpretation> {
    // facts belong to every model, so only the other heads are enumerated
    let forced: BTreeSet<AtomId> = g.rules().iter().filter(|r| r.body.is_empty()).filter_map(|r| r.head).collect();
    let heads: Vec<AtomId> =
        g.rules().iter().filter_map(|r| r.head).filter(|h| !forced.contains(h)).collect::<BTreeSet<_>>().into_iter().collect();
    assert!(heads.len() <= 16, "oracle cap");
    let mut out = Vec::new();
    for mut i in subsets(&heads) {
        i.extend(&forced);
        if !model_of(g.rules(), &i) {
            continue;
        }
        let reduct: Vec<GroundRule> = g
            .rules()
            .iter()
            .filter(|r| body_true(&r.body, &i))
            .map(|r| GroundRule {
                head: r.head,
                body: if classic {
                    r.body.clone()
                } else {
                    r.body
                        .iter()
                        .filter(|l| !matches!(l, GroundLiteral::Neg(_) | GroundLiteral::Agg { negated: true, .. }))
                        .cloned()
                        .collect()
                },
            })
            .collect();
        let members: Vec<AtomId> = i.iter().copied().collect();
        let minimal = subsets(&members).all(|j| j.len() == i.len() || !model_of(&reduct, &j));
        if minimal {
            out.push(visible(g, &i));
        }
    }
    out.sort();
    out
}

pub fn visible(g: &GroundProgram, i: &BTreeSet<AtomId>) -> Interpretation {
    i.iter().filter(|&&a| !g.is_hidden(a)).map(|&a| g.atom(a).clone()).collect()
}

pub fn ids(g: &GroundProgram, m: &Interpretation) -> BTreeSet<AtomId> {
    m.iter().map(|a| g.id_of(a).expect("atom of program")).collect()
}

// ---- costs ----

/// Per-level cost: sum of weights over the distinct `(w, l, tuple)` with a true body.
pub fn oracle_cost(g: &GroundProgram, i: &BTreeSet<AtomId>) -> BTreeMap<i64, i64> {
    let mut hit: BTreeSet<(i64, i64, Vec<Constant>)> = BTreeSet::new();
    for w in g.weaks() {
        if let (Constant::Int(wt), Constant::Int(l)) = (&w.weight, &w.level) {
            if body_true(&w.body, i) {
                hit.insert((*wt, *l, w.tuple.clone()));
            }
        }
    }
    let mut out = BTreeMap::new();
    for (w, l, _) in hit {
        *out.entry(l).or_insert(0) += w;
    }
    out
}

/// `a` is dominated by `b`: strictly cheaper at some level, equal at every higher one.
pub fn oracle_dominated(a: &BTreeMap<i64, i64>, b: &BTreeMap<i64, i64>) -> bool {
    let levels: BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    for l in levels.into_iter().rev() {
        let (x, y) = (a.get(&l).copied().unwrap_or(0), b.get(&l).copied().unwrap_or(0));
        if x != y {
            return y < x;
        }
    }
    false
}

// ---- unpruned grounding ----

type Subst = BTreeMap<Name, Constant>;

fn vars_of_term(t: &Term, out: &mut BTreeSet<Name>) {
    if let Term::Var(v) = t {
        out.insert(v.clone());
    }
}

fn global_vars(head: Option<&Atom>, body: &[Literal], extra: &[&Term]) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    if let Some(a) = head {
        a.args.iter().for_each(|t| vars_of_term(t, &mut out));
    }
    for l in body {
        match l {
            Literal::Atom { atom, .. } => atom.args.iter().for_each(|t| vars_of_term(t, &mut out)),
            Literal::Comparison { left, right, .. } => {
                vars_of_term(left, &mut out);
                vars_of_term(right, &mut out);
            }
            Literal::Aggregate { aggregate, .. } => vars_of_term(&aggregate.guard, &mut out),
        }
    }
    extra.iter().for_each(|t| vars_of_term(t, &mut out));
    out
}

fn assignments(vars: &[Name], hu: &[Constant], base: &Subst) -> Vec<Subst> {
    let mut out = vec![base.clone()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                hu.iter().map(move |c| {
                    let mut s = s.clone();
                    s.insert(v.clone(), c.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn term(t: &Term, s: &Subst) -> Constant {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => s[v].clone(),
    }
}

fn ground_atom(a: &Atom, s: &Subst) -> GroundAtom {
    GroundAtom { predicate: a.predicate.clone(), args: a.args.iter().map(|t| term(t, s)).collect() }
}

/// Instantiates every rule over the full Herbrand universe with no pruning of any
/// kind; comparisons are the only literals evaluated during instantiation.
pub fn exhaustive_ground(p: &Program) -> GroundProgram {
    let used: BTreeSet<Name> = p.predicates().into_iter().map(|q| q.name).collect();
    let ex = expand_choices(p, &mut FreshNames::new(&used));
    let hu: Vec<Constant> = herbrand_universe(p).into_iter().collect();
    let mut b = GroundBuilder::new();
    for c in &ex.complements {
        b.hide_predicate(c.clone());
    }
    for st in &ex.program.statements {
        let (head, body, extra): (Option<&Atom>, &[Literal], Vec<&Term>) = match st {
            Statement::Rule(r) => (r.head.as_ref(), &r.body, vec![]),
            Statement::Weak(w) => {
                let mut e = vec![&w.weight, &w.level];
                e.extend(w.terms.iter());
                (None, &w.body, e)
            }
            Statement::Choice(_) => unreachable!("choices are expanded"),
        };
        let vars: Vec<Name> = global_vars(head, body, &extra).into_iter().collect();
        'subst: for s in assignments(&vars, &hu, &Subst::new()) {
            let mut lits = Vec::new();
            for l in body {
                match l {
                    Literal::Comparison { left, op, right } => {
                        if !op.holds(&term(left, &s), &term(right, &s)) {
                            continue 'subst;
                        }
                    }
                    Literal::Atom { atom, negated } => {
                        let id = b.intern(&ground_atom(atom, &s));
                        lits.push(if *negated { GroundLiteral::Neg(id) } else { GroundLiteral::Pos(id) });
                    }
                    Literal::Aggregate { aggregate, negated } => {
                        let Constant::Int(guard) = term(&aggregate.guard, &s) else { continue 'subst };
                        let mut elements = Vec::new();
                        for e in &aggregate.elements {
                            let mut local = BTreeSet::new();
                            e.terms.iter().for_each(|t| vars_of_term(t, &mut local));
                            for c in &e.condition {
                                match c {
                                    Literal::Atom { atom, .. } => atom.args.iter().for_each(|t| vars_of_term(t, &mut local)),
                                    Literal::Comparison { left, right, .. } => {
                                        vars_of_term(left, &mut local);
                                        vars_of_term(right, &mut local);
                                    }
                                    Literal::Aggregate { .. } => {}
                                }
                            }
                            let local: Vec<Name> = local.into_iter().filter(|v| !s.contains_key(v)).collect();
                            'elem: for ls in assignments(&local, &hu, &s) {
                                let mut condition = Vec::new();
                                for c in &e.condition {
                                    match c {
                                        Literal::Atom { atom, negated } => {
                                            condition.push((b.intern(&ground_atom(atom, &ls)), *negated))
                                        }
                                        Literal::Comparison { left, op, right } => {
                                            if !op.holds(&term(left, &ls), &term(right, &ls)) {
                                                continue 'elem;
                                            }
                                        }
                                        Literal::Aggregate { .. } => panic!("nested aggregate"),
                                    }
                                }
                                elements.push(GroundElement { tuple: e.terms.iter().map(|t| term(t, &ls)).collect(), condition });
                            }
                        }
                        let aggregate =
                            GroundAggregate { function: aggregate.function, elements, op: aggregate.op, guard };
                        lits.push(GroundLiteral::Agg { negated: *negated, aggregate });
                    }
                }
            }
            match st {
                Statement::Weak(w) => b.add_weak(GroundWeak {
                    body: lits,
                    weight: term(&w.weight, &s),
                    level: term(&w.level, &s),
                    tuple: w.terms.iter().map(|t| term(t, &s)).collect(),
                }),
                _ => {
                    let head = head.map(|h| b.intern(&ground_atom(h, &s)));
                    b.add_rule(GroundRule { head, body: lits });
                }
            }
        }
    }
    b.build()
}

// ---- library-side helpers ----

use qasp::ground::ground;
use qasp::solve::{answer_sets, Reduct, SolveOptions};

/// Answer sets computed by the library, as sorted sets of visible atoms.
pub fn solver_answer_sets(g: &GroundProgram, reduct: Reduct) -> Vec<Interpretation> {
    let opts = SolveOptions { reduct, ..Default::default() };
    let mut out: Vec<Interpretation> =
        answer_sets(g, &opts).expect("within caps").iter().map(|s| g.interpretation(s)).collect();
    out.sort();
    out
}

pub fn program_answer_sets(p: &Program) -> Vec<Interpretation> {
    solver_answer_sets(&ground(p).expect("grounds"), Reduct::Flp)
}

/// `m` with every predicate renamed by `tag`.
pub fn clone_interpretation(m: &Interpretation, tag: &str) -> Interpretation {
    m.iter().map(|a| GroundAtom { predicate: qasp::rewrite::cloned_name(&a.predicate, tag), args: a.args.clone() }).collect()
}

pub fn facts(m: &Interpretation) -> Program {
    let mut p = Program::new();
    for a in m {
        p.push_rule(qasp::syntax::Rule::fact(Atom::from(a)));
    }
    p
}

pub fn project(m: &Interpretation, base: &BTreeSet<GroundAtom>) -> Interpretation {
    m.intersection(base).cloned().collect()
}

//! Abstract syntax, concrete syntax and static checks for quantified programs.

mod ast;
mod lexer;
mod parser;
mod render;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

pub use ast::*;
pub use parser::{parse_program, parse_program_with, parse_subprogram, ParseMode};
pub use render::render_program;

/// A safety violation: `variable` is not bound by a positive literal in `statement`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub statement: String,
    pub variable: Name,
}

pub fn term_vars(t: &Term, out: &mut BTreeSet<Name>) {
    if let Term::Var(v) = t {
        out.insert(v.clone());
    }
}

fn atom_vars(a: &Atom, out: &mut BTreeSet<Name>) {
    a.args.iter().for_each(|t| term_vars(t, out));
}

/// Variables occurring outside aggregate elements (the global variables of a body).
fn global_body_vars(body: &[Literal], out: &mut BTreeSet<Name>) {
    for l in body {
        match l {
            Literal::Atom { atom, .. } => atom_vars(atom, out),
            Literal::Aggregate { aggregate, .. } => term_vars(&aggregate.guard, out),
            Literal::Comparison { left, right, .. } => {
                term_vars(left, out);
                term_vars(right, out);
            }
        }
    }
}

fn positive_vars(body: &[Literal], out: &mut BTreeSet<Name>) {
    for l in body {
        if let Literal::Atom { atom, negated: false } = l {
            atom_vars(atom, out);
        }
    }
}

fn all_vars(body: &[Literal], out: &mut BTreeSet<Name>) {
    for l in body {
        match l {
            Literal::Atom { atom, .. } => atom_vars(atom, out),
            Literal::Aggregate { aggregate, .. } => {
                term_vars(&aggregate.guard, out);
                for e in &aggregate.elements {
                    e.terms.iter().for_each(|t| term_vars(t, out));
                    all_vars(&e.condition, out);
                }
            }
            Literal::Comparison { left, right, .. } => {
                term_vars(left, out);
                term_vars(right, out);
            }
        }
    }
}

/// Checks `needed ⊆ bound` plus aggregate-local safety, pushing violations.
fn check_body(
    statement: &dyn std::fmt::Display,
    needed: BTreeSet<Name>,
    body: &[Literal],
    out: &mut Vec<Violation>,
) {
    let mut bound = BTreeSet::new();
    positive_vars(body, &mut bound);
    let report = |v: &Name, out: &mut Vec<Violation>| {
        if !out.iter().any(|x| &x.variable == v) {
            out.push(Violation { statement: statement.to_string(), variable: v.clone() });
        }
    };
    let mut globals = needed;
    global_body_vars(body, &mut globals);
    for v in globals.difference(&bound) {
        report(v, out);
    }
    for l in body {
        if let Literal::Aggregate { aggregate, .. } = l {
            for e in &aggregate.elements {
                let mut local = BTreeSet::new();
                e.terms.iter().for_each(|t| term_vars(t, &mut local));
                all_vars(&e.condition, &mut local);
                let mut elem_bound = bound.clone();
                positive_vars(&e.condition, &mut elem_bound);
                for v in local.difference(&elem_bound) {
                    report(v, out);
                }
            }
        }
    }
}

/// Reports every unsafe variable of every statement of `p`.
pub fn check_safety(p: &Program) -> Vec<Violation> {
    let mut out = Vec::new();
    for s in &p.statements {
        match s {
            Statement::Rule(r) => {
                let mut needed = BTreeSet::new();
                if let Some(h) = &r.head {
                    atom_vars(h, &mut needed);
                }
                check_body(r, needed, &r.body, &mut out);
            }
            Statement::Choice(c) => {
                for e in &c.elements {
                    let mut needed = BTreeSet::new();
                    atom_vars(&e.atom, &mut needed);
                    let mut body = e.condition.clone();
                    body.extend(c.body.iter().cloned());
                    check_body(c, needed, &body, &mut out);
                }
                check_body(c, BTreeSet::new(), &c.body, &mut out);
            }
            Statement::Weak(w) => {
                let mut needed = BTreeSet::new();
                term_vars(&w.weight, &mut needed);
                term_vars(&w.level, &mut needed);
                w.terms.iter().for_each(|t| term_vars(t, &mut needed));
                check_body(w, needed, &w.body, &mut out);
            }
        }
    }
    out
}

/// True iff no predicate depends on itself through negation or an aggregate.
/// Hard constraints never contribute edges; choice rules are inherently unstratified.
pub fn check_stratified(p: &Program) -> bool {
    if p.choices().next().is_some() {
        return false;
    }
    let mut graph: DiGraph<Predicate, bool> = DiGraph::new();
    let mut nodes = HashMap::new();
    let mut node = |g: &mut DiGraph<Predicate, bool>, pr: Predicate| {
        *nodes.entry(pr.clone()).or_insert_with(|| g.add_node(pr))
    };
    for r in p.rules() {
        let Some(h) = &r.head else { continue };
        let hn = node(&mut graph, h.signature());
        for l in &r.body {
            match l {
                Literal::Atom { atom, negated } => {
                    let bn = node(&mut graph, atom.signature());
                    graph.add_edge(hn, bn, *negated);
                }
                Literal::Aggregate { .. } => {
                    let mut preds = Vec::new();
                    for_each_body_atom(std::slice::from_ref(l), &mut |a| preds.push(a.signature()));
                    for pr in preds {
                        let bn = node(&mut graph, pr);
                        graph.add_edge(hn, bn, true);
                    }
                }
                Literal::Comparison { .. } => {}
            }
        }
    }
    for scc in tarjan_scc(&graph) {
        let members: HashSet<_> = scc.iter().copied().collect();
        for &n in &scc {
            for e in graph.edges(n) {
                use petgraph::visit::EdgeRef;
                if *e.weight() && members.contains(&e.target()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Constants of `p`, or the singleton `{c0}` when there are none.
pub fn herbrand_universe(p: &Program) -> BTreeSet<Constant> {
    herbrand_constants(p)
}

pub(crate) fn herbrand_constants(p: &Program) -> BTreeSet<Constant> {
    let mut u = p.constants();
    if u.is_empty() {
        u.insert(Constant::sym("c0"));
    }
    u
}

/// Generator of predicate names that do not occur in a given set.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    used: HashSet<Name>,
}

impl FreshNames {
    pub fn new<'a>(used: impl IntoIterator<Item = &'a Name>) -> Self {
        FreshNames { used: used.into_iter().cloned().collect() }
    }

    pub fn for_program(q: &QuantifiedProgram) -> Self {
        FreshNames { used: q.predicate_names().into_iter().collect() }
    }

    pub fn is_used(&self, n: &str) -> bool {
        self.used.contains(n)
    }

    pub fn mark_used(&mut self, n: Name) {
        self.used.insert(n);
    }

    /// `base$0`, `base$1`, ... : the first one not in use.
    pub fn numbered(&mut self, base: &str) -> Name {
        let n = (0..)
            .map(|i| format!("{base}${i}"))
            .find(|c| !self.used.contains(c.as_str()))
            .expect("unbounded range");
        let n = name(&n);
        self.used.insert(n.clone());
        n
    }

    /// A tag such that `p$tag` is unused for every `p` in `preds`, and `extra(tag)` names are unused.
    pub fn tag<'a>(
        &mut self,
        base: &str,
        preds: impl IntoIterator<Item = &'a Name> + Clone,
        extra: &dyn Fn(&str) -> Vec<String>,
    ) -> String {
        let candidates = std::iter::once(base.to_string()).chain((1..).map(|i| format!("{base}{i}")));
        for tag in candidates {
            let mut names: Vec<String> =
                preds.clone().into_iter().map(|p| format!("{p}${tag}")).collect();
            names.extend(extra(&tag));
            if names.iter().all(|n| !self.used.contains(n.as_str())) {
                for n in names {
                    self.used.insert(name(&n));
                }
                return tag;
            }
        }
        unreachable!("unbounded range")
    }
}

/// Result of choice expansion: plain rules plus the complement predicates it introduced.
#[derive(Clone, Debug, Default)]
pub struct Expanded {
    pub program: Program,
    pub complements: BTreeSet<Name>,
}

/// Rewrites every choice rule of `p` into guess rules over complement predicates
/// (and a counting constraint for `= k` bounds). Other statements are kept.
pub fn expand_choices(p: &Program, fresh: &mut FreshNames) -> Expanded {
    let mut complement: BTreeMap<Name, Name> = BTreeMap::new();
    let mut out = Expanded::default();
    for s in &p.statements {
        match s {
            Statement::Choice(c) => {
                for r in expand_choice_with(c, fresh, &mut complement) {
                    out.program.push_rule(r);
                }
            }
            other => out.program.push(other.clone()),
        }
    }
    out.complements = complement.into_values().collect();
    out
}

/// Expands one choice rule; complement predicates are named `p$n` (numbered on clashes).
pub fn expand_choice(c: &ChoiceRule, fresh: &mut FreshNames) -> Vec<Rule> {
    expand_choice_with(c, fresh, &mut BTreeMap::new())
}

fn expand_choice_with(
    c: &ChoiceRule,
    fresh: &mut FreshNames,
    complement: &mut BTreeMap<Name, Name>,
) -> Vec<Rule> {
    let mut rules = Vec::new();
    for e in &c.elements {
        let comp = complement
            .entry(e.atom.predicate.clone())
            .or_insert_with(|| {
                let base = format!("{}$n", e.atom.predicate);
                if fresh.is_used(&base) {
                    fresh.numbered(&base)
                } else {
                    let n = name(&base);
                    fresh.mark_used(n.clone());
                    n
                }
            })
            .clone();
        let na = Atom { predicate: comp, args: e.atom.args.clone() };
        let mut guard = e.condition.clone();
        guard.extend(c.body.iter().cloned());
        let mut b1 = guard.clone();
        b1.push(Literal::neg(na.clone()));
        rules.push(Rule { head: Some(e.atom.clone()), body: b1 });
        let mut b2 = guard;
        b2.push(Literal::neg(e.atom.clone()));
        rules.push(Rule { head: Some(na), body: b2 });
    }
    if let Some(k) = c.exactly {
        let elements = c
            .elements
            .iter()
            .map(|e| {
                let mut terms = vec![Term::Const(Constant::Sym(e.atom.predicate.clone()))];
                terms.extend(e.atom.args.iter().cloned());
                let mut condition = vec![Literal::pos(e.atom.clone())];
                condition.extend(e.condition.iter().cloned());
                AggElement { terms, condition }
            })
            .collect();
        let aggregate = Aggregate { function: AggFunction::Count, elements, op: CmpOp::Eq, guard: Term::int(k) };
        let mut body = c.body.clone();
        body.push(Literal::Aggregate { aggregate, negated: true });
        rules.push(Rule::constraint(body));
    }
    rules
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(s: &str) -> Program {
        parse_subprogram(s, ParseMode::User).unwrap()
    }

    #[test]
    fn safety_examples() {
        assert!(check_safety(&prog("p(X) :- q(X).")).is_empty());
        assert!(check_safety(&prog(":~ p(X). [X@1]")).is_empty());
        let v = check_safety(&prog(":~ not p(X). [1@1]"));
        assert_eq!(v.len(), 1);
        assert_eq!(&*v[0].variable, "X");
    }

    #[test]
    fn aggregate_local_safety() {
        assert!(check_safety(&prog(":- k(K), #count{X : v(X)} != K.")).is_empty());
        assert_eq!(check_safety(&prog(":- k(K), #count{X : not v(X)} != K.")).len(), 1);
        assert_eq!(check_safety(&prog(":- #count{X : v(X)} != K.")).len(), 1);
        assert_eq!(check_safety(&prog(":- v(X), X < Y.")).len(), 1);
    }

    #[test]
    fn choice_safety() {
        assert!(check_safety(&prog("{f(I,J) : inJ(J)} = 1 :- inI(I).")).is_empty());
        assert_eq!(check_safety(&prog("{f(I,J)} :- inI(I).")).len(), 1);
    }

    #[test]
    fn stratification_examples() {
        assert!(check_stratified(&prog("a :- not b. b.")));
        assert!(!check_stratified(&prog("a :- not a.")));
        assert!(check_stratified(&prog(":- valK(K), #count{X : inClique(X)} != K.")));
        assert!(check_stratified(&prog("a :- b. b :- a. :- not a.")));
        assert!(!check_stratified(&prog("a :- #count{1 : a} = 0.")));
    }

    #[test]
    fn universe() {
        assert_eq!(herbrand_universe(&prog("p(1). q(X) :- p(X).")), [Constant::Int(1)].into());
        assert_eq!(herbrand_universe(&prog("a.")), [Constant::sym("c0")].into());
    }

    #[test]
    fn single_choice_expansion() {
        let p = prog("{a}.");
        let mut fresh = FreshNames::new(&[name("a")]);
        let c = p.choices().next().unwrap();
        let rules = expand_choice(c, &mut fresh);
        let text: Vec<String> = rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(text, vec!["a :- not a$n.", "a$n :- not a."]);
    }

    #[test]
    fn complement_names_avoid_clashes() {
        let mut fresh = FreshNames::new(&[name("a"), name("a$n")]);
        let p = parse_subprogram("{a}.", ParseMode::Internal).unwrap();
        let e = expand_choices(&p, &mut fresh);
        assert_eq!(e.complements.len(), 1);
        assert!(!e.complements.contains("a$n"));
    }

    #[test]
    fn bounded_choice_adds_count_constraint() {
        let p = prog("{a;b}=1.");
        let mut fresh = FreshNames::default();
        let e = expand_choices(&p, &mut fresh);
        assert_eq!(e.program.rules().count(), 5);
        let last = e.program.rules().last().unwrap().to_string();
        assert_eq!(last, ":- not #count{a : a; b : b} = 1.");
    }
}

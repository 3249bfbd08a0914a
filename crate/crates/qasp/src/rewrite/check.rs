use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ground::{ground_with, GroundAggregate, GroundLiteral, GroundOptions, GroundProgram};
use crate::syntax::{
    name, AggElement, AggFunction, Aggregate, Atom, CmpOp, Constant, GroundAtom, Literal, Name, Predicate, Program,
    Rule, Term,
};

use super::transform::clone_body_except;

/// Fresh predicate names used by one check gadget.
#[derive(Clone, Debug)]
pub struct GadgetNames {
    pub viol: Name,
    pub viol_o: Name,
    pub cl: Name,
    pub cl_o: Name,
    pub eq: Name,
    pub above: Name,
    pub dom: Name,
}

impl GadgetNames {
    pub fn list(tag: &str) -> Vec<String> {
        ["viol", "viol$o", "cl", "cl$o", "eq", "above", "dom"]
            .iter()
            .map(|b| match b.split_once('$') {
                Some((head, tail)) => format!("{head}${tag}${tail}"),
                None => format!("{b}${tag}"),
            })
            .collect()
    }

    pub fn new(tag: &str) -> Self {
        let l = Self::list(tag);
        let n = |k: usize| name(&l[k]);
        GadgetNames { viol: n(0), viol_o: n(1), cl: n(2), cl_o: n(3), eq: n(4), above: n(5), dom: n(6) }
    }

    pub fn dom_atom(&self) -> Atom {
        Atom { predicate: self.dom.clone(), args: Vec::new() }
    }
}

fn ground_atom(a: &GroundAtom) -> Atom {
    Atom::from(a)
}

fn literal_from_ground(g: &GroundProgram, l: &GroundLiteral) -> Literal {
    match l {
        GroundLiteral::Pos(a) => Literal::pos(ground_atom(g.atom(*a))),
        GroundLiteral::Neg(a) => Literal::neg(ground_atom(g.atom(*a))),
        GroundLiteral::Agg { negated, aggregate } => {
            Literal::Aggregate { aggregate: aggregate_from_ground(g, aggregate), negated: *negated }
        }
    }
}

fn aggregate_from_ground(g: &GroundProgram, a: &GroundAggregate) -> Aggregate {
    Aggregate {
        function: a.function,
        elements: a
            .elements
            .iter()
            .map(|e| AggElement {
                terms: e.tuple.iter().cloned().map(Term::Const).collect(),
                condition: e
                    .condition
                    .iter()
                    .map(|&(x, neg)| {
                        let atom = ground_atom(g.atom(x));
                        if neg {
                            Literal::neg(atom)
                        } else {
                            Literal::pos(atom)
                        }
                    })
                    .collect(),
            })
            .collect(),
        op: a.op,
        guard: Term::int(a.guard),
    }
}

fn atom(p: &Name, args: Vec<Term>) -> Atom {
    Atom { predicate: p.clone(), args }
}

/// Builds the stratified program comparing the weak-constraint cost of an answer set
/// of `p` (original predicates) with that of a clone (predicates renamed with
/// `clone_tag`, except those in `keep`). The 0-ary atom `names.dom` is derived iff the
/// original is strictly dominated by the clone. Weak constraints are grounded with
/// `externals` as possible input atoms.
pub fn build_gadget(
    p: &Program,
    externals: &[GroundAtom],
    clone_tag: &str,
    keep: &BTreeSet<Predicate>,
    names: &GadgetNames,
    opts: &GroundOptions,
) -> Result<Program> {
    let g = ground_with(p, externals, opts)?;
    let mut out = Program::new();
    let mut triples: BTreeMap<(i64, i64, Vec<Constant>), i64> = BTreeMap::new();
    for w in g.weaks() {
        let (Some(weight), Some(level)) = (w.weight.as_int(), w.level.as_int()) else {
            return Err(Error::Invalid(format!(
                "weak constraint weight and level must be integers, found {}@{}",
                w.weight, w.level
            )));
        };
        let next = triples.len() as i64;
        let k = *triples.entry((weight, level, w.tuple.clone())).or_insert(next);
        let body: Vec<Literal> = w.body.iter().map(|l| literal_from_ground(&g, l)).collect();
        out.push_rule(Rule { head: Some(atom(&names.viol, vec![Term::int(k)])), body: body.clone() });
        let body_o = clone_body_except(&body, clone_tag, keep);
        out.push_rule(Rule { head: Some(atom(&names.viol_o, vec![Term::int(k)])), body: body_o });
    }

    let mut levels: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for (&(w, l, _), &k) in &triples {
        levels.entry(l).or_default().push((w, k));
    }
    for (&l, elems) in &levels {
        let lo: i64 = elems.iter().map(|&(w, _)| w.min(0)).sum();
        let hi: i64 = elems.iter().map(|&(w, _)| w.max(0)).sum();
        for (cl, viol) in [(&names.cl, &names.viol), (&names.cl_o, &names.viol_o)] {
            let elements: Vec<AggElement> = elems
                .iter()
                .map(|&(w, k)| AggElement {
                    terms: vec![Term::int(w), Term::int(k)],
                    condition: vec![Literal::pos(atom(viol, vec![Term::int(k)]))],
                })
                .collect();
            for c in lo..=hi {
                let aggregate =
                    Aggregate { function: AggFunction::Sum, elements: elements.clone(), op: CmpOp::Eq, guard: Term::int(c) };
                out.push_rule(Rule {
                    head: Some(atom(cl, vec![Term::int(l), Term::int(c)])),
                    body: vec![Literal::Aggregate { aggregate, negated: false }],
                });
            }
        }
    }

    let desc: Vec<i64> = levels.keys().rev().copied().collect();
    if let Some(&top) = desc.first() {
        out.push_rule(Rule::fact(atom(&names.above, vec![Term::int(top)])));
    }
    for pair in desc.windows(2) {
        out.push_rule(Rule {
            head: Some(atom(&names.above, vec![Term::int(pair[1])])),
            body: vec![
                Literal::pos(atom(&names.above, vec![Term::int(pair[0])])),
                Literal::pos(atom(&names.eq, vec![Term::int(pair[0])])),
            ],
        });
    }
    let (l, c, c1, c2) = (Term::var("L"), Term::var("C"), Term::var("C1"), Term::var("C2"));
    if !levels.is_empty() {
        out.push_rule(Rule {
            head: Some(atom(&names.eq, vec![l.clone()])),
            body: vec![
                Literal::pos(atom(&names.cl, vec![l.clone(), c.clone()])),
                Literal::pos(atom(&names.cl_o, vec![l.clone(), c])),
            ],
        });
        out.push_rule(Rule {
            head: Some(names.dom_atom()),
            body: vec![
                Literal::pos(atom(&names.cl, vec![l.clone(), c1.clone()])),
                Literal::pos(atom(&names.cl_o, vec![l.clone(), c2.clone()])),
                Literal::Comparison { left: c2, op: CmpOp::Lt, right: c1 },
                Literal::pos(atom(&names.above, vec![l])),
            ],
        });
    }
    Ok(out)
}

/// The check gadget of `p` against its clone with tag `o`, deriving `dom$P`.
pub fn check_gadget(p: &Program) -> Result<Program> {
    build_gadget(p, &[], "o", &BTreeSet::new(), &GadgetNames::new("P"), &GroundOptions::default())
}

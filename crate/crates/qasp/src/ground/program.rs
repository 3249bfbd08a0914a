use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::syntax::{AggFunction, CmpOp, Constant, GroundAtom, Name};

pub type AtomId = u32;

/// A set of ground atoms, ordered lexicographically.
pub type Interpretation = BTreeSet<GroundAtom>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundElement {
    pub tuple: Vec<Constant>,
    /// `(atom, negated)` pairs.
    pub condition: Vec<(AtomId, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAggregate {
    pub function: AggFunction,
    pub elements: Vec<GroundElement>,
    pub op: CmpOp,
    pub guard: i64,
}

impl GroundAggregate {
    /// Value of the aggregate for a given set of true tuples (set semantics over tuples).
    pub fn value<'a>(&self, tuples: impl Iterator<Item = &'a Vec<Constant>>) -> i64 {
        let set: BTreeSet<&Vec<Constant>> = tuples.collect();
        match self.function {
            AggFunction::Count => set.len() as i64,
            AggFunction::Sum => set.iter().map(|t| t.first().and_then(Constant::as_int).unwrap_or(0)).sum(),
        }
    }

    /// Truth of the aggregate atom under a total interpretation.
    pub fn holds(&self, truth: impl Fn(AtomId) -> bool) -> bool {
        let tuples = self
            .elements
            .iter()
            .filter(|e| e.condition.iter().all(|&(a, neg)| truth(a) != neg))
            .map(|e| &e.tuple);
        let v = self.value(tuples);
        self.op.holds(&v, &self.guard)
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.elements.iter().flat_map(|e| e.condition.iter().map(|&(a, _)| a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundLiteral {
    Pos(AtomId),
    Neg(AtomId),
    Agg { negated: bool, aggregate: GroundAggregate },
}

impl GroundLiteral {
    pub fn holds(&self, truth: &impl Fn(AtomId) -> bool) -> bool {
        match self {
            GroundLiteral::Pos(a) => truth(*a),
            GroundLiteral::Neg(a) => !truth(*a),
            GroundLiteral::Agg { negated, aggregate } => aggregate.holds(truth) != *negated,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, GroundLiteral::Neg(_) | GroundLiteral::Agg { negated: true, .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Option<AtomId>,
    pub body: Vec<GroundLiteral>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundWeak {
    pub body: Vec<GroundLiteral>,
    pub weight: Constant,
    pub level: Constant,
    pub tuple: Vec<Constant>,
}

/// A variable-free program over an indexed, lexicographically sorted base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundProgram {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    hidden: Vec<bool>,
    rules: Vec<GroundRule>,
    weaks: Vec<GroundWeak>,
}

impl GroundProgram {
    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn id_of(&self, a: &GroundAtom) -> Option<AtomId> {
        self.index.get(a).copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Auxiliary atoms (choice complements) that are not part of the program's own signature.
    pub fn is_hidden(&self, id: AtomId) -> bool {
        self.hidden[id as usize]
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn weaks(&self) -> &[GroundWeak] {
        &self.weaks
    }

    pub fn head_atoms(&self) -> BTreeSet<AtomId> {
        self.rules.iter().filter_map(|r| r.head).collect()
    }

    /// The non-hidden atoms of `set`.
    pub fn interpretation(&self, set: &[AtomId]) -> Interpretation {
        set.iter().filter(|&&a| !self.is_hidden(a)).map(|&a| self.atom(a).clone()).collect()
    }

    /// A copy with facts for `facts` and constraints `:- a` for `forbidden`.
    pub fn with_fixed(&self, facts: &[AtomId], forbidden: &[AtomId]) -> GroundProgram {
        let mut g = self.clone();
        g.rules.extend(facts.iter().map(|&a| GroundRule { head: Some(a), body: Vec::new() }));
        g.rules
            .extend(forbidden.iter().map(|&a| GroundRule { head: None, body: vec![GroundLiteral::Pos(a)] }));
        g
    }

    /// The same program without weak constraints.
    pub fn without_weaks(&self) -> GroundProgram {
        GroundProgram { weaks: Vec::new(), ..self.clone() }
    }

    pub fn with_rules(&self, rules: Vec<GroundRule>) -> GroundProgram {
        GroundProgram { rules, ..self.clone() }
    }

    fn fmt_literal(&self, f: &mut fmt::Formatter<'_>, l: &GroundLiteral) -> fmt::Result {
        match l {
            GroundLiteral::Pos(a) => write!(f, "{}", self.atom(*a)),
            GroundLiteral::Neg(a) => write!(f, "not {}", self.atom(*a)),
            GroundLiteral::Agg { negated, aggregate } => {
                if *negated {
                    write!(f, "not ")?;
                }
                write!(f, "{}{{", aggregate.function)?;
                for (i, e) in aggregate.elements.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    for (j, t) in e.tuple.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{t}")?;
                    }
                    if !e.condition.is_empty() {
                        write!(f, " : ")?;
                        for (j, &(a, neg)) in e.condition.iter().enumerate() {
                            if j > 0 {
                                write!(f, ", ")?;
                            }
                            if neg {
                                write!(f, "not ")?;
                            }
                            write!(f, "{}", self.atom(a))?;
                        }
                    }
                }
                write!(f, "}} {} {}", aggregate.op, aggregate.guard)
            }
        }
    }

    fn fmt_body(&self, f: &mut fmt::Formatter<'_>, body: &[GroundLiteral]) -> fmt::Result {
        for (i, l) in body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            self.fmt_literal(f, l)?;
        }
        Ok(())
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            match (r.head, r.body.is_empty()) {
                (Some(h), true) => writeln!(f, "{}.", self.atom(h))?,
                (Some(h), false) => {
                    write!(f, "{} :- ", self.atom(h))?;
                    self.fmt_body(f, &r.body)?;
                    writeln!(f, ".")?;
                }
                (None, _) => {
                    write!(f, ":- ")?;
                    self.fmt_body(f, &r.body)?;
                    writeln!(f, ".")?;
                }
            }
        }
        for w in &self.weaks {
            write!(f, ":~ ")?;
            self.fmt_body(f, &w.body)?;
            write!(f, ". [{}@{}", w.weight, w.level)?;
            for t in &w.tuple {
                write!(f, ", {t}")?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Incremental construction of a [`GroundProgram`]; ids handed out here are
/// provisional and get remapped to sorted order by [`GroundBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct GroundBuilder {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    hidden_predicates: BTreeSet<Name>,
    rules: Vec<GroundRule>,
    weaks: Vec<GroundWeak>,
}

impl GroundBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, a: &GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(a) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.atoms.push(a.clone());
        self.index.insert(a.clone(), id);
        id
    }

    pub fn hide_predicate(&mut self, p: Name) {
        self.hidden_predicates.insert(p);
    }

    pub fn add_rule(&mut self, r: GroundRule) {
        self.rules.push(r);
    }

    pub fn add_weak(&mut self, w: GroundWeak) {
        self.weaks.push(w);
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn build(self) -> GroundProgram {
        let mut order: Vec<AtomId> = (0..self.atoms.len() as AtomId).collect();
        order.sort_by(|&a, &b| self.atoms[a as usize].cmp(&self.atoms[b as usize]));
        let mut remap = vec![0; self.atoms.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as AtomId;
        }
        let atoms: Vec<GroundAtom> = order.iter().map(|&o| self.atoms[o as usize].clone()).collect();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i as AtomId)).collect();
        let hidden = atoms.iter().map(|a| self.hidden_predicates.contains(&a.predicate)).collect();
        let m = |a: AtomId| remap[a as usize];
        let map_lit = |l: &GroundLiteral| match l {
            GroundLiteral::Pos(a) => GroundLiteral::Pos(m(*a)),
            GroundLiteral::Neg(a) => GroundLiteral::Neg(m(*a)),
            GroundLiteral::Agg { negated, aggregate } => GroundLiteral::Agg {
                negated: *negated,
                aggregate: GroundAggregate {
                    elements: aggregate
                        .elements
                        .iter()
                        .map(|e| GroundElement {
                            tuple: e.tuple.clone(),
                            condition: e.condition.iter().map(|&(a, n)| (m(a), n)).collect(),
                        })
                        .collect(),
                    ..aggregate.clone()
                },
            },
        };
        let mut rules: Vec<GroundRule> = self
            .rules
            .iter()
            .map(|r| GroundRule { head: r.head.map(m), body: r.body.iter().map(map_lit).collect() })
            .collect();
        rules.sort();
        rules.dedup();
        let mut weaks: Vec<GroundWeak> = self
            .weaks
            .iter()
            .map(|w| GroundWeak { body: w.body.iter().map(map_lit).collect(), ..w.clone() })
            .collect();
        weaks.sort();
        weaks.dedup();
        GroundProgram { atoms, index, hidden, rules, weaks }
    }
}

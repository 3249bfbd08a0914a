use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

/// Interned-by-refcount name used for predicates, symbolic constants and variables.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Int(i64),
    Sym(Name),
}

impl Constant {
    pub fn sym(s: &str) -> Self {
        Constant::Sym(name(s))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Constant::Int(v) => Some(*v),
            Constant::Sym(_) => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(v) => write!(f, "{v}"),
            Constant::Sym(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Constant),
    Var(Name),
}

impl Term {
    pub fn int(v: i64) -> Self {
        Term::Const(Constant::Int(v))
    }

    pub fn sym(s: &str) -> Self {
        Term::Const(Constant::sym(s))
    }

    pub fn var(s: &str) -> Self {
        Term::Var(name(s))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => write!(f, "{v}"),
        }
    }
}

/// Predicate identity: name plus arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: Name,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom { predicate: name(predicate), args }
    }

    pub fn prop(predicate: &str) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn signature(&self) -> Predicate {
        Predicate { name: self.predicate.clone(), arity: self.args.len() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }
}

impl From<&GroundAtom> for Atom {
    fn from(a: &GroundAtom) -> Self {
        Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().cloned().map(Term::Const).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            write_sep(f, &self.args, ",")?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: Name,
    pub args: Vec<Constant>,
}

impl GroundAtom {
    pub fn new(predicate: &str, args: Vec<Constant>) -> Self {
        GroundAtom { predicate: name(predicate), args }
    }

    pub fn prop(predicate: &str) -> Self {
        GroundAtom::new(predicate, Vec::new())
    }

    pub fn signature(&self) -> Predicate {
        Predicate { name: self.predicate.clone(), arity: self.args.len() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            write_sep(f, &self.args, ",")?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn holds<T: Ord>(self, left: &T, right: &T) -> bool {
        match self {
            CmpOp::Lt => left < right,
            CmpOp::Le => left <= right,
            CmpOp::Gt => left > right,
            CmpOp::Ge => left >= right,
            CmpOp::Eq => left == right,
            CmpOp::Ne => left != right,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AggFunction {
    Count,
    Sum,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AggElement {
    pub terms: Vec<Term>,
    pub condition: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Aggregate {
    pub function: AggFunction,
    pub elements: Vec<AggElement>,
    pub op: CmpOp,
    pub guard: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Atom { atom: Atom, negated: bool },
    Aggregate { aggregate: Aggregate, negated: bool },
    Comparison { left: Term, op: CmpOp, right: Term },
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal::Atom { atom, negated: false }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal::Atom { atom, negated: true }
    }

    pub fn is_positive_atom(&self) -> bool {
        matches!(self, Literal::Atom { negated: false, .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Option<Atom>,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn fact(head: Atom) -> Self {
        Rule { head: Some(head), body: Vec::new() }
    }

    pub fn constraint(body: Vec<Literal>) -> Self {
        Rule { head: None, body }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub condition: Vec<Literal>,
}

/// `{e1; ...; en} [= k] :- body.`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChoiceRule {
    pub elements: Vec<ChoiceElement>,
    pub exactly: Option<i64>,
    pub body: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakConstraint {
    pub body: Vec<Literal>,
    pub weight: Term,
    pub level: Term,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statement {
    Rule(Rule),
    Choice(ChoiceRule),
    Weak(WeakConstraint),
}

/// An ASP subprogram. Statement order is kept for rendering only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub statements: Vec<Statement>,
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    pub fn from_statements(statements: Vec<Statement>) -> Self {
        Program { statements }
    }

    pub fn push(&mut self, s: Statement) {
        self.statements.push(s);
    }

    pub fn push_rule(&mut self, r: Rule) {
        self.statements.push(Statement::Rule(r));
    }

    pub fn extend(&mut self, other: &Program) {
        self.statements.extend(other.statements.iter().cloned());
    }

    pub fn union(&self, other: &Program) -> Program {
        let mut p = self.clone();
        p.extend(other);
        p
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Rule(r) => Some(r),
            _ => None,
        })
    }

    pub fn choices(&self) -> impl Iterator<Item = &ChoiceRule> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Choice(c) => Some(c),
            _ => None,
        })
    }

    pub fn weaks(&self) -> impl Iterator<Item = &WeakConstraint> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Weak(w) => Some(w),
            _ => None,
        })
    }

    /// No weak constraints.
    pub fn is_plain(&self) -> bool {
        self.weaks().next().is_none()
    }

    /// The program without its weak constraints.
    pub fn without_weaks(&self) -> Program {
        Program {
            statements: self
                .statements
                .iter()
                .filter(|s| !matches!(s, Statement::Weak(_)))
                .cloned()
                .collect(),
        }
    }

    /// Every predicate occurring anywhere in the program.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        for_each_atom(self, &mut |a| {
            out.insert(a.signature());
        });
        out
    }

    /// Predicates occurring in rule heads or as choice elements.
    pub fn head_predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        for s in &self.statements {
            match s {
                Statement::Rule(r) => {
                    if let Some(h) = &r.head {
                        out.insert(h.signature());
                    }
                }
                Statement::Choice(c) => {
                    for e in &c.elements {
                        out.insert(e.atom.signature());
                    }
                }
                Statement::Weak(_) => {}
            }
        }
        out
    }

    /// Every constant occurring anywhere in the program (weights and tuples included).
    pub fn constants(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        let mut term = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        for s in &self.statements {
            match s {
                Statement::Rule(r) => {
                    if let Some(h) = &r.head {
                        h.args.iter().for_each(&mut term);
                    }
                    body_terms(&r.body, &mut term);
                }
                Statement::Choice(c) => {
                    for e in &c.elements {
                        e.atom.args.iter().for_each(&mut term);
                        body_terms(&e.condition, &mut term);
                    }
                    body_terms(&c.body, &mut term);
                }
                Statement::Weak(w) => {
                    body_terms(&w.body, &mut term);
                    term(&w.weight);
                    term(&w.level);
                    w.terms.iter().for_each(&mut term);
                }
            }
        }
        out
    }
}

fn body_terms(body: &[Literal], f: &mut impl FnMut(&Term)) {
    for l in body {
        match l {
            Literal::Atom { atom, .. } => atom.args.iter().for_each(&mut *f),
            Literal::Aggregate { aggregate, .. } => {
                for e in &aggregate.elements {
                    e.terms.iter().for_each(&mut *f);
                    body_terms(&e.condition, f);
                }
                f(&aggregate.guard);
            }
            Literal::Comparison { left, right, .. } => {
                f(left);
                f(right);
            }
        }
    }
}

/// Visits every atom occurrence of a literal list, including atoms inside aggregates.
pub fn for_each_body_atom(body: &[Literal], f: &mut impl FnMut(&Atom)) {
    for l in body {
        match l {
            Literal::Atom { atom, .. } => f(atom),
            Literal::Aggregate { aggregate, .. } => {
                for e in &aggregate.elements {
                    for_each_body_atom(&e.condition, f);
                }
            }
            Literal::Comparison { .. } => {}
        }
    }
}

pub fn for_each_atom(p: &Program, f: &mut impl FnMut(&Atom)) {
    for s in &p.statements {
        match s {
            Statement::Rule(r) => {
                if let Some(h) = &r.head {
                    f(h);
                }
                for_each_body_atom(&r.body, f);
            }
            Statement::Choice(c) => {
                for e in &c.elements {
                    f(&e.atom);
                    for_each_body_atom(&e.condition, f);
                }
                for_each_body_atom(&c.body, f);
            }
            Statement::Weak(w) => for_each_body_atom(&w.body, f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Exists => write!(f, "exists"),
            Quantifier::Forall => write!(f, "forall"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub quantifier: Quantifier,
    pub program: Program,
}

impl Block {
    pub fn new(quantifier: Quantifier, program: Program) -> Self {
        Block { quantifier, program }
    }
}

/// `Q1 P1 ... Qn Pn : C : Cw`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantifiedProgram {
    pub blocks: Vec<Block>,
    pub constraint: Program,
    pub global: Vec<WeakConstraint>,
}

impl QuantifiedProgram {
    pub fn new(blocks: Vec<Block>, constraint: Program, global: Vec<WeakConstraint>) -> Self {
        QuantifiedProgram { blocks, constraint, global }
    }

    pub fn n_quant(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_plain(&self) -> bool {
        self.blocks.iter().all(|b| b.program.is_plain())
    }

    pub fn is_alternating(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].quantifier != w[1].quantifier)
    }

    /// The global weak constraints as a program.
    pub fn global_program(&self) -> Program {
        Program::from_statements(self.global.iter().cloned().map(Statement::Weak).collect())
    }

    /// Every predicate name used anywhere, for fresh-name generation.
    pub fn predicate_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut add = |p: &Program| {
            for_each_atom(p, &mut |a| {
                out.insert(a.predicate.clone());
            })
        };
        for b in &self.blocks {
            add(&b.program);
        }
        add(&self.constraint);
        add(&self.global_program());
        out
    }
}

pub(crate) fn write_sep<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: &[T],
    sep: &str,
) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

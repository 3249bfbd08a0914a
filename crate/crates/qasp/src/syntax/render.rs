use std::fmt;

use super::ast::*;

impl fmt::Display for AggFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggFunction::Count => write!(f, "#count"),
            AggFunction::Sum => write!(f, "#sum"),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for AggElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sep(f, &self.terms, ",")?;
        if !self.condition.is_empty() {
            write!(f, " : ")?;
            write_sep(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.function)?;
        write_sep(f, &self.elements, "; ")?;
        write!(f, "}} {} {}", self.op, self.guard)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom { atom, negated } => {
                if *negated {
                    write!(f, "not ")?;
                }
                write!(f, "{atom}")
            }
            Literal::Aggregate { aggregate, negated } => {
                if *negated {
                    write!(f, "not ")?;
                }
                write!(f, "{aggregate}")
            }
            Literal::Comparison { left, op, right } => write!(f, "{left} {op} {right}"),
        }
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[Literal]) -> fmt::Result {
    write_sep(f, body, ", ")
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.head, self.body.is_empty()) {
            (Some(h), true) => write!(f, "{h}."),
            (Some(h), false) => {
                write!(f, "{h} :- ")?;
                write_body(f, &self.body)?;
                write!(f, ".")
            }
            (None, true) => write!(f, ":- ."),
            (None, false) => {
                write!(f, ":- ")?;
                write_body(f, &self.body)?;
                write!(f, ".")
            }
        }
    }
}

impl fmt::Display for ChoiceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        if !self.condition.is_empty() {
            write!(f, " : ")?;
            write_sep(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl fmt::Display for ChoiceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        write_sep(f, &self.elements, "; ")?;
        write!(f, "}}")?;
        if let Some(k) = self.exactly {
            write!(f, " = {k}")?;
        }
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            write_body(f, &self.body)?;
        }
        write!(f, ".")
    }
}

impl fmt::Display for WeakConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":~ ")?;
        write_body(f, &self.body)?;
        write!(f, ". [{}@{}", self.weight, self.level)?;
        for t in &self.terms {
            write!(f, ", {t}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Rule(r) => r.fmt(f),
            Statement::Choice(c) => c.fmt(f),
            Statement::Weak(w) => w.fmt(f),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Display for QuantifiedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            writeln!(f, "%@{}", b.quantifier)?;
            write!(f, "{}", b.program)?;
        }
        if !self.constraint.is_empty() {
            writeln!(f, "%@constraint")?;
            write!(f, "{}", self.constraint)?;
        }
        if !self.global.is_empty() {
            writeln!(f, "%@global")?;
            for w in &self.global {
                writeln!(f, "{w}")?;
            }
        }
        Ok(())
    }
}

/// Text form accepted by [`super::parse_program`]; empty sections are omitted.
pub fn render_program(q: &QuantifiedProgram) -> String {
    q.to_string()
}

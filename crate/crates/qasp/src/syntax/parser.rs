use super::ast::*;
use super::lexer::{tokenize, Section, Tok, Token};
use super::{check_safety, check_stratified, herbrand_constants};
use crate::error::{Error, Result};

/// Which identifiers the parser accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// User input: `$` is rejected so generated names can never clash.
    #[default]
    User,
    /// Programs emitted by the rewriter, which contain `$`-mangled names.
    Internal,
}

/// Parses a quantified program from user input.
pub fn parse_program(text: &str) -> Result<QuantifiedProgram> {
    parse_program_with(text, ParseMode::User)
}

pub fn parse_program_with(text: &str, mode: ParseMode) -> Result<QuantifiedProgram> {
    let tokens = tokenize(text, mode == ParseMode::Internal)?;
    let mut p = Parser { tokens, pos: 0, anon: 0 };
    let q = p.quantified()?;
    validate(&q)?;
    Ok(q)
}

/// Parses a single subprogram (no directives), e.g. for tests and tools.
pub fn parse_subprogram(text: &str, mode: ParseMode) -> Result<Program> {
    let tokens = tokenize(text, mode == ParseMode::Internal)?;
    let mut p = Parser { tokens, pos: 0, anon: 0 };
    let mut prog = Program::new();
    while p.peek() != &Tok::Eof {
        if let Tok::Directive(_) = p.peek() {
            return p.error("directives are not allowed here");
        }
        prog.push(p.statement()?);
    }
    Ok(prog)
}

fn validate(q: &QuantifiedProgram) -> Result<()> {
    if q.blocks.is_empty() {
        return Err(Error::Invalid("program has no quantified block".into()));
    }
    let mut all = q.blocks.iter().map(|b| &b.program).collect::<Vec<_>>();
    all.push(&q.constraint);
    for p in all {
        if let Some(v) = check_safety(p).into_iter().next() {
            return Err(Error::Unsafe { variable: v.variable.to_string(), statement: v.statement });
        }
    }
    let global = q.global_program();
    if let Some(v) = check_safety(&global).into_iter().next() {
        return Err(Error::Unsafe { variable: v.variable.to_string(), statement: v.statement });
    }
    if !check_stratified(&q.constraint) {
        return Err(Error::NotStratified);
    }
    let first = &q.blocks[0].program;
    let preds = first.predicates();
    let universe = herbrand_constants(first);
    let mut outside = None;
    for_each_atom(&global, &mut |a| {
        let in_base = preds.contains(&a.signature())
            && a.args.iter().all(|t| match t {
                Term::Const(c) => universe.contains(c),
                Term::Var(_) => true,
            });
        if !in_base && outside.is_none() {
            outside = Some(a.to_string());
        }
    });
    if let Some(atom) = outside {
        return Err(Error::GlobalOutsideBase { atom });
    }
    Ok(())
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.tokens[self.pos];
        Err(Error::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn quantified(&mut self) -> Result<QuantifiedProgram> {
        let mut blocks = Vec::new();
        let mut constraint = Program::new();
        let mut global = Vec::new();
        let mut section: Option<Section> = None;
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Directive(s) => {
                    self.next();
                    match s {
                        Section::Exists => blocks.push(Block::new(Quantifier::Exists, Program::new())),
                        Section::Forall => blocks.push(Block::new(Quantifier::Forall, Program::new())),
                        Section::Constraint | Section::Global => {
                            if blocks.is_empty() {
                                return self.error("a quantified block must come first");
                            }
                        }
                    }
                    if matches!(section, Some(Section::Constraint | Section::Global))
                        && matches!(s, Section::Exists | Section::Forall)
                    {
                        return self.error("quantified blocks must precede %@constraint and %@global");
                    }
                    section = Some(s);
                }
                _ => {
                    let line_tok = self.pos;
                    let st = self.statement()?;
                    match section {
                        None => {
                            self.pos = line_tok;
                            return self.error("statement outside of any block");
                        }
                        Some(Section::Exists | Section::Forall) => {
                            blocks.last_mut().expect("block opened").program.push(st)
                        }
                        Some(Section::Constraint) => match st {
                            Statement::Weak(_) => {
                                self.pos = line_tok;
                                return self.error("weak constraints are not allowed in %@constraint");
                            }
                            other => constraint.push(other),
                        },
                        Some(Section::Global) => match st {
                            Statement::Weak(w) => global.push(w),
                            _ => {
                                self.pos = line_tok;
                                return self.error("only weak constraints are allowed in %@global");
                            }
                        },
                    }
                }
            }
        }
        Ok(QuantifiedProgram { blocks, constraint, global })
    }

    fn statement(&mut self) -> Result<Statement> {
        match self.peek() {
            Tok::LBrace => self.choice().map(Statement::Choice),
            Tok::WeakIf => self.weak().map(Statement::Weak),
            Tok::If => {
                self.next();
                let body = self.body_until_dot()?;
                Ok(Statement::Rule(Rule { head: None, body }))
            }
            Tok::Ident(_) => {
                let head = self.atom()?;
                let body = match self.next() {
                    Tok::Dot => Vec::new(),
                    Tok::If => self.body_until_dot()?,
                    other => {
                        self.pos -= 1;
                        return self.error(format!("expected '.' or ':-', found {}", describe(&other)));
                    }
                };
                Ok(Statement::Rule(Rule { head: Some(head), body }))
            }
            other => self.error(format!("unexpected {}", describe(other))),
        }
    }

    /// Body literals followed by the terminating dot (an empty body is allowed).
    fn body_until_dot(&mut self) -> Result<Vec<Literal>> {
        if *self.peek() == Tok::Dot {
            self.next();
            return Ok(Vec::new());
        }
        let body = self.literals()?;
        self.expect(Tok::Dot, "'.'")?;
        Ok(body)
    }

    fn literals(&mut self) -> Result<Vec<Literal>> {
        let mut out = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<Literal> {
        match self.peek().clone() {
            Tok::Not => {
                self.next();
                match self.peek() {
                    Tok::Agg(_) => Ok(Literal::Aggregate { aggregate: self.aggregate()?, negated: true }),
                    Tok::Ident(_) => Ok(Literal::Atom { atom: self.atom()?, negated: true }),
                    other => self.error(format!("expected atom after 'not', found {}", describe(other))),
                }
            }
            Tok::Agg(_) => Ok(Literal::Aggregate { aggregate: self.aggregate()?, negated: false }),
            Tok::Ident(_) => {
                if matches!(self.peek_at(1), Tok::Cmp(_)) {
                    return self.comparison();
                }
                Ok(Literal::Atom { atom: self.atom()?, negated: false })
            }
            Tok::Var(_) | Tok::Int(_) | Tok::Anon => self.comparison(),
            other => self.error(format!("expected literal, found {}", describe(&other))),
        }
    }

    fn comparison(&mut self) -> Result<Literal> {
        let left = self.term()?;
        let op = match self.next() {
            Tok::Cmp(op) => op,
            other => {
                self.pos -= 1;
                return self.error(format!("expected comparison operator, found {}", describe(&other)));
            }
        };
        let right = self.term()?;
        Ok(Literal::Comparison { left, op, right })
    }

    fn term(&mut self) -> Result<Term> {
        match self.next() {
            Tok::Var(v) => Ok(Term::Var(name(&v))),
            Tok::Anon => {
                let v = format!("_{}", self.anon);
                self.anon += 1;
                Ok(Term::Var(name(&v)))
            }
            Tok::Int(i) => Ok(Term::int(i)),
            Tok::Ident(s) => {
                if *self.peek() == Tok::LParen {
                    return self.error("function symbols are not supported");
                }
                Ok(Term::sym(&s))
            }
            other => {
                self.pos -= 1;
                self.error(format!("expected term, found {}", describe(&other)))
            }
        }
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        let mut out = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.term()?);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Atom> {
        let pred = match self.next() {
            Tok::Ident(s) => s,
            other => {
                self.pos -= 1;
                return self.error(format!("expected predicate, found {}", describe(&other)));
            }
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            args = self.terms()?;
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(Atom::new(&pred, args))
    }

    fn aggregate(&mut self) -> Result<Aggregate> {
        let function = match self.next() {
            Tok::Agg(f) => f,
            _ => unreachable!("caller checked for an aggregate token"),
        };
        self.expect(Tok::LBrace, "'{'")?;
        let mut elements = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                let terms = self.terms()?;
                let condition = if *self.peek() == Tok::Colon {
                    self.next();
                    self.literals()?
                } else {
                    Vec::new()
                };
                elements.push(AggElement { terms, condition });
                if *self.peek() == Tok::Semi {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace, "'}'")?;
        let op = match self.next() {
            Tok::Cmp(op) => op,
            other => {
                self.pos -= 1;
                return self.error(format!("expected aggregate comparison, found {}", describe(&other)));
            }
        };
        let guard = self.term()?;
        Ok(Aggregate { function, elements, op, guard })
    }

    fn choice(&mut self) -> Result<ChoiceRule> {
        self.expect(Tok::LBrace, "'{'")?;
        if *self.peek() == Tok::RBrace {
            return self.error("choice rule without elements");
        }
        let mut elements = Vec::new();
        loop {
            let atom = self.atom()?;
            let condition = if *self.peek() == Tok::Colon {
                self.next();
                self.literals()?
            } else {
                Vec::new()
            };
            elements.push(ChoiceElement { atom, condition });
            if *self.peek() == Tok::Semi {
                self.next();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace, "'}'")?;
        let mut exactly = None;
        if let Tok::Cmp(op) = self.peek().clone() {
            if op != CmpOp::Eq {
                return self.error("only '= k' bounds are supported on choice rules");
            }
            self.next();
            match self.next() {
                Tok::Int(k) if k >= 0 => exactly = Some(k),
                other => {
                    self.pos -= 1;
                    return self.error(format!("expected a non-negative bound, found {}", describe(&other)));
                }
            }
        }
        let body = match self.next() {
            Tok::Dot => Vec::new(),
            Tok::If => self.body_until_dot()?,
            other => {
                self.pos -= 1;
                return self.error(format!("expected '.' or ':-', found {}", describe(&other)));
            }
        };
        Ok(ChoiceRule { elements, exactly, body })
    }

    fn weak(&mut self) -> Result<WeakConstraint> {
        self.expect(Tok::WeakIf, "':~'")?;
        let body = self.body_until_dot()?;
        self.expect(Tok::LBracket, "'['")?;
        let weight = self.term()?;
        self.expect(Tok::At, "'@'")?;
        let level = self.term()?;
        let mut terms = Vec::new();
        while *self.peek() == Tok::Comma {
            self.next();
            terms.push(self.term()?);
        }
        self.expect(Tok::RBracket, "']'")?;
        Ok(WeakConstraint { body, weight, level, terms })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Var(s) => format!("'{s}'"),
        Tok::Int(i) => format!("'{i}'"),
        Tok::Eof => "end of input".into(),
        Tok::Directive(_) => "directive".into(),
        other => format!("{other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = "%@exists\n{a;b}=1.\n{c;d}=1.\n:~ c. [1@1]\n%@forall\n{e;f}.\n:- not e, not f.\n:~ e,f. [1@1]\n%@constraint\n:- d, f.";

    #[test]
    fn example_one_shape() {
        let q = parse_program(EXAMPLE1).unwrap();
        assert_eq!(q.blocks.len(), 2);
        assert_eq!(q.blocks[0].quantifier, Quantifier::Exists);
        assert_eq!(q.blocks[1].quantifier, Quantifier::Forall);
        assert_eq!(q.blocks[0].program.choices().count(), 2);
        assert_eq!(q.blocks[0].program.weaks().count(), 1);
        assert_eq!(q.constraint.rules().count(), 1);
        assert!(q.global.is_empty());
    }

    #[test]
    fn single_fact() {
        let q = parse_program("%@exists\na.").unwrap();
        assert_eq!(q.blocks[0].program.statements, vec![Statement::Rule(Rule::fact(Atom::prop("a")))]);
        assert!(q.constraint.is_empty() && q.global.is_empty());
    }

    #[test]
    fn unsafe_variable_is_named() {
        match parse_program("%@exists\np(X) :- not q(X).") {
            Err(Error::Unsafe { variable, .. }) => assert_eq!(variable, "X"),
            other => panic!("expected unsafe error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_misplaced_statements() {
        assert!(matches!(parse_program("a."), Err(Error::Syntax { .. })));
        assert!(matches!(parse_program(""), Err(Error::Invalid(_))));
        assert!(parse_program("%@exists\na.\n%@constraint\n:~ a. [1@1]").is_err());
        assert!(parse_program("%@exists\na.\n%@global\nb :- a.").is_err());
        assert!(matches!(
            parse_program("%@exists\n{a}.\n%@constraint\nb :- not c.\nc :- not b."),
            Err(Error::NotStratified)
        ));
        assert!(matches!(
            parse_program("%@exists\n{a}.\n%@global\n:~ z. [1@1]"),
            Err(Error::GlobalOutsideBase { .. })
        ));
    }

    #[test]
    fn aggregates_and_comparisons() {
        let q = parse_program(
            "%@exists\n{v(1);v(2)}.\nk(1).\n%@constraint\n:- k(K), #count{X : v(X)} != K.\n:- v(X), v(Y), X < Y.",
        )
        .unwrap();
        let r = q.constraint.rules().next().unwrap();
        match &r.body[1] {
            Literal::Aggregate { aggregate, negated: false } => {
                assert_eq!(aggregate.op, CmpOp::Ne);
                assert_eq!(aggregate.elements.len(), 1);
            }
            other => panic!("unexpected literal {other:?}"),
        }
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let p = parse_subprogram("cl(X) :- lit(X,_,_).", ParseMode::User).unwrap();
        let r = p.rules().next().unwrap();
        match &r.body[0] {
            Literal::Atom { atom, .. } => assert_ne!(atom.args[1], atom.args[2]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn error_positions() {
        match parse_program("%@exists\na :- b\nc.") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}

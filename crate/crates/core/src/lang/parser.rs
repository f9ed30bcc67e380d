use super::ast::{Deed, Event, GoalKind, Guard, GuardAtom, Plan};
use super::lexer::{tokenize, Tok, Token};
use super::term::Term;
use super::{ParseError, SyntaxError};

/// Parses a whole program. Either every plan parses or an error is
/// returned; there are no partial results.
pub fn parse_program(text: &str) -> Result<Vec<Plan>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut plans = Vec::new();
    while p.peek().tok != Tok::Eof {
        let index = plans.len();
        let start = p.peek().clone();
        let plan = p.plan(index)?;
        check_bindings(&plan, &start)?;
        plans.push(plan);
    }
    Ok(plans)
}

/// Parses a single ground-or-not term such as `proximity_to_centre(in)`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let t = p.arg()?;
    p.expect(&Tok::Eof, &["end of input"])?;
    Ok(t)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = self.peek();
        SyntaxError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, tok: &Tok, expected: &[&str]) -> Result<Token, SyntaxError> {
        let same = match (&self.peek().tok, tok) {
            (Tok::LParen { .. }, Tok::LParen { .. }) => true,
            (a, b) => a == b,
        };
        if same {
            Ok(self.next())
        } else {
            Err(self.error(expected))
        }
    }

    fn plan(&mut self, source_index: usize) -> Result<Plan, SyntaxError> {
        let trigger = self.trigger()?;
        self.expect(&Tok::Colon, &["`:`"])?;
        let guard = self.guard()?;
        self.expect(&Tok::Arrow, &["`<-`"])?;
        let mut deeds = vec![self.deed()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            deeds.push(self.deed()?);
        }
        self.expect(&Tok::Semi, &["`,`", "`;`"])?;
        Ok(Plan {
            trigger,
            guard,
            deeds,
            source_index,
        })
    }

    fn trigger(&mut self) -> Result<Event, SyntaxError> {
        match self.peek().tok {
            Tok::Plus => {
                self.next();
                if self.peek().tok == Tok::Bang {
                    self.next();
                    Ok(Event::goal(self.compound()?))
                } else {
                    Ok(Event::belief_add(self.compound()?))
                }
            }
            Tok::Minus => {
                self.next();
                Ok(Event::belief_del(self.compound()?))
            }
            _ => Err(self.error(&["`+`", "`-`"])),
        }
    }

    fn guard(&mut self) -> Result<Guard, SyntaxError> {
        self.expect(&Tok::LBrace, &["`{`"])?;
        let mut atoms = vec![self.guard_atom()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            atoms.push(self.guard_atom()?);
        }
        self.expect(&Tok::RBrace, &["`,`", "`}`"])?;
        Ok(Guard::new(atoms).expect("guard has at least one conjunct"))
    }

    fn guard_atom(&mut self) -> Result<GuardAtom, SyntaxError> {
        match self.peek().tok {
            Tok::True => {
                self.next();
                Ok(GuardAtom::True)
            }
            Tok::Believes => {
                self.next();
                Ok(GuardAtom::Believes(self.compound()?))
            }
            _ => Err(self.error(&["`True`", "`.B`"])),
        }
    }

    fn deed(&mut self) -> Result<Deed, SyntaxError> {
        match self.peek().tok {
            Tok::Plus => {
                self.next();
                if self.peek().tok == Tok::Bang {
                    self.next();
                    let goal = self.compound()?;
                    let kind = self.goal_annotation()?;
                    Ok(Deed::AddGoal(goal, kind))
                } else {
                    Ok(Deed::AddBelief(self.compound()?))
                }
            }
            Tok::Minus => {
                self.next();
                Ok(Deed::DelBelief(self.compound()?))
            }
            Tok::Ident(_) => Ok(Deed::Action(self.compound()?)),
            _ => Err(self.error(&["`+`", "`-`", "action"])),
        }
    }

    fn goal_annotation(&mut self) -> Result<GoalKind, SyntaxError> {
        if !matches!(self.peek().tok, Tok::LParen { .. }) {
            return Ok(GoalKind::Perform);
        }
        self.next();
        match &self.peek().tok {
            Tok::Ident(s) if s == "perform" => {
                self.next();
            }
            _ => return Err(self.error(&["`perform`"])),
        }
        self.expect(&Tok::RParen, &["`)`"])?;
        Ok(GoalKind::Perform)
    }

    fn compound(&mut self) -> Result<Term, SyntaxError> {
        let functor = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(&["identifier"])),
        };
        self.next();
        let mut args = Vec::new();
        if self.peek().tok == (Tok::LParen { adjacent: true }) {
            self.next();
            args.push(self.arg()?);
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.arg()?);
            }
            self.expect(&Tok::RParen, &["`,`", "`)`"])?;
        }
        Ok(Term::Compound { functor, args })
    }

    fn arg(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().tok.clone() {
            Tok::Var(v) => {
                self.next();
                Ok(Term::Var(v))
            }
            Tok::Number(n) => {
                self.next();
                Ok(Term::num(n))
            }
            Tok::Minus => {
                self.next();
                match self.peek().tok {
                    Tok::Number(n) => {
                        self.next();
                        Ok(Term::num(-n))
                    }
                    _ => Err(self.error(&["number"])),
                }
            }
            Tok::Ident(_) => self.compound(),
            _ => Err(self.error(&["variable", "number", "identifier"])),
        }
    }
}

/// Variables added as beliefs or posted as goals must already be bound
/// by the trigger, the guard, or an earlier action (whose free
/// arguments are outputs). Deletion patterns may keep free variables.
fn check_bindings(plan: &Plan, start: &Token) -> Result<(), ParseError> {
    let mut bound = Vec::new();
    plan.trigger.term.collect_vars(&mut bound);
    for c in plan.guard.conjuncts() {
        if let GuardAtom::Believes(t) = c {
            t.collect_vars(&mut bound);
        }
    }
    for deed in &plan.deeds {
        match deed {
            Deed::AddBelief(t) | Deed::AddGoal(t, _) => {
                if let Some(v) = t.vars().into_iter().find(|v| !bound.contains(v)) {
                    return Err(ParseError::UnboundVariable {
                        variable: v,
                        plan: plan.source_index,
                        line: start.line,
                        column: start.column,
                    });
                }
            }
            Deed::Action(t) => t.collect_vars(&mut bound),
            Deed::DelBelief(_) => {}
        }
    }
    Ok(())
}

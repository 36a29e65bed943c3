use thiserror::Error;

use super::{ConditionalEquation, Hypothesis, Relation, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    SyntaxError { pos: usize, message: String },
    #[error("equation has no conclusion")]
    EmptyConclusion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(String),
    Zero,
    One,
    Prime,
    Meet,
    Join,
    Arrow,
    LParen,
    RParen,
    Comma,
    Orth,
    Commutes,
    Turnstile,
    Le,
    Eq,
}

fn describe(tok: Option<&Tok>) -> String {
    match tok {
        None => "end of input".into(),
        Some(Tok::Var(v)) => format!("variable {v}"),
        Some(t) => format!("{t:?}"),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| ParseError::SyntaxError { pos, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two = |s: &str| chars[i..].iter().take(2).collect::<String>() == s;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0' => Tok::Zero,
            '1' => Tok::One,
            '\'' => Tok::Prime,
            '^' => Tok::Meet,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '#' => Tok::Orth,
            'C' => Tok::Commutes,
            '-' if two("->") => {
                i += 1;
                Tok::Arrow
            }
            '|' if two("|-") => {
                i += 1;
                Tok::Turnstile
            }
            '<' if two("<=") => {
                i += 1;
                Tok::Le
            }
            '=' if two("==") => {
                i += 1;
                Tok::Eq
            }
            c if c.is_ascii_lowercase() => {
                let mut name = c.to_string();
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    name.push(chars[i]);
                }
                if name == "v" {
                    Tok::Join
                } else {
                    Tok::Var(name)
                }
            }
            c => return Err(err(start, format!("unexpected character {c:?}"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::SyntaxError {
            pos: self.offset(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn arrow(&mut self) -> Result<Term, ParseError> {
        let lhs = self.join()?;
        if self.eat(&Tok::Arrow) {
            Ok(lhs.arrow(self.arrow()?))
        } else {
            Ok(lhs)
        }
    }

    fn join(&mut self) -> Result<Term, ParseError> {
        let mut t = self.meet()?;
        while self.eat(&Tok::Join) {
            t = t.join(self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<Term, ParseError> {
        let mut t = self.postfix()?;
        while self.eat(&Tok::Meet) {
            t = t.meet(self.postfix()?);
        }
        Ok(t)
    }

    fn postfix(&mut self) -> Result<Term, ParseError> {
        let mut t = self.primary()?;
        while self.eat(&Tok::Prime) {
            t = t.comp();
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let t = match self.peek() {
            Some(Tok::Var(v)) => Term::Var(v.clone()),
            Some(Tok::Zero) => Term::Zero,
            Some(Tok::One) => Term::One,
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.arrow()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("')'"));
                }
                return Ok(inner);
            }
            _ => return Err(self.error("a term")),
        };
        self.pos += 1;
        Ok(t)
    }

    fn hypothesis(&mut self) -> Result<Hypothesis, ParseError> {
        let a = self.arrow()?;
        if self.eat(&Tok::Orth) {
            Ok(Hypothesis::Orthogonal(a, self.arrow()?))
        } else if self.eat(&Tok::Commutes) {
            Ok(Hypothesis::Commutes(a, self.arrow()?))
        } else {
            Err(self.error("'#' or 'C'"))
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("end of input")),
        }
    }
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        end: text.chars().count(),
    };
    let t = p.arrow()?;
    p.done()?;
    Ok(t)
}

/// Parses `hyp, hyp, ... |- t <= u` (or `==`). The hypothesis part and
/// the turnstile may be omitted.
pub fn parse_equation(text: &str) -> Result<ConditionalEquation, ParseError> {
    let toks = tokenize(text)?;
    let turnstile = toks.iter().position(|(_, t)| *t == Tok::Turnstile);
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let mut hypotheses = Vec::new();
    if let Some(ts) = turnstile {
        if ts > 0 {
            loop {
                hypotheses.push(p.hypothesis()?);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        if !p.eat(&Tok::Turnstile) {
            return Err(p.error("',' or '|-'"));
        }
    }
    if p.peek().is_none() {
        return Err(ParseError::EmptyConclusion);
    }
    let lhs = p.arrow()?;
    let relation = if p.eat(&Tok::Le) {
        Relation::Le
    } else if p.eat(&Tok::Eq) {
        Relation::Eq
    } else {
        return Err(p.error("'<=' or '=='"));
    };
    let rhs = p.arrow()?;
    p.done()?;
    Ok(ConditionalEquation::new(hypotheses, relation, lhs, rhs))
}

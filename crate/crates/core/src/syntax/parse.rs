//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula   := iff
//! iff       := implies ( "<->" implies )*
//! implies   := or ( "->" implies )?
//! or        := and ( "|" and )*
//! and       := unary ( "&" unary )*
//! unary     := "!" unary
//!            | "K[" agent "]" unary
//!            | "Kinf[" agent "]" unary
//!            | "[" formula "]" unary
//!            | "<" formula ">" unary
//!            | primary
//! primary   := "true" | "false"
//!            | "E[" agent "," depth "]" | "P[" agent "," depth "]"
//!            | ident | "(" formula ")"
//! ```
//!
//! Precedence from tightest to loosest: `!` and the prefix operators, `&`,
//! `|`, `->` (right associative), `<->`. Derived connectives are desugared
//! while parsing.

use thiserror::Error;

use super::ast::{AgentId, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: negative depth literal {value}")]
    NegativeDepth {
        line: usize,
        column: usize,
        value: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_column) = (line, column);
        let advance = |n: usize, i: &mut usize, column: &mut usize| {
            *i += n;
            *column += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut column);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let tok = if rest.starts_with("<->") {
            advance(3, &mut i, &mut column);
            Tok::DoubleArrow
        } else if rest.starts_with("->") {
            advance(2, &mut i, &mut column);
            Tok::Arrow
        } else if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            advance(1, &mut i, &mut column);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut column);
            }
            let literal: String = chars[start..i].iter().collect();
            let value = literal.parse::<i64>().map_err(|_| ParseError::Syntax {
                line: start_line,
                column: start_column,
                message: format!("integer literal `{literal}` out of range"),
            })?;
            Tok::Int(value)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i, &mut column);
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            let tok = match c {
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                ',' => Tok::Comma,
                other => {
                    return Err(ParseError::Syntax {
                        line: start_line,
                        column: start_column,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            advance(1, &mut i, &mut column);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_column,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn non_negative(&mut self, what: &str) -> Result<i64, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) if v >= 0 => Ok(v),
            Tok::Int(v) => Err(ParseError::NegativeDepth {
                line: t.line,
                column: t.column,
                value: v,
            }),
            other => Err(ParseError::Syntax {
                line: t.line,
                column: t.column,
                message: format!("expected {what}, found {}", other.describe()),
            }),
        }
    }

    fn agent(&mut self) -> Result<AgentId, ParseError> {
        let t = self.toks[self.pos].clone();
        match t.tok {
            Tok::Int(v) if v >= 0 => {
                self.next();
                Ok(AgentId(v as usize))
            }
            Tok::Int(_) => Err(ParseError::Syntax {
                line: t.line,
                column: t.column,
                message: "agent ids are non-negative".into(),
            }),
            other => Err(self.error_here(format!("expected agent id, found {}", other.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::DoubleArrow {
            self.next();
            let rhs = self.implies()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.next();
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.next();
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.next();
                Ok(self.unary()?.not())
            }
            Tok::LBracket => {
                self.next();
                let announced = self.formula()?;
                self.expect(Tok::RBracket)?;
                let body = self.unary()?;
                Ok(Formula::announce(announced, body))
            }
            Tok::Lt => {
                self.next();
                let announced = self.formula()?;
                self.expect(Tok::Gt)?;
                let body = self.unary()?;
                Ok(Formula::dual_announce(announced, body))
            }
            Tok::Ident(name)
                if (name == "K" || name == "Kinf") && *self.peek_at(1) == Tok::LBracket =>
            {
                self.next();
                self.next();
                let agent = self.agent()?;
                self.expect(Tok::RBracket)?;
                let body = self.unary()?;
                Ok(if name == "K" {
                    Formula::know(agent, body)
                } else {
                    Formula::know_inf(agent, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name)
                if (name == "E" || name == "P") && *self.peek_at(1) == Tok::LBracket =>
            {
                self.next();
                self.next();
                let agent = self.agent()?;
                self.expect(Tok::Comma)?;
                let d = self.non_negative("depth")?;
                self.expect(Tok::RBracket)?;
                Ok(if name == "E" {
                    Formula::DepthExact(agent, d)
                } else {
                    Formula::DepthAtLeast(agent, d)
                })
            }
            Tok::Ident(name) => {
                self.next();
                Ok(match name.as_str() {
                    "true" => Formula::top(),
                    "false" => Formula::bottom(),
                    _ => Formula::Atom(name),
                })
            }
            other => {
                Err(self.error_here(format!("expected a formula, found {}", other.describe())))
            }
        }
    }
}

/// Parses a formula, desugaring derived connectives.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error_here(format!(
            "unexpected {} after formula",
            parser.peek().describe()
        )));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

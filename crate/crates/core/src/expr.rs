//! Recursive-descent parser shared by the polynomial grammar and the
//! enveloping-algebra element grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" INTEGER)?
//! atom   := INTEGER ("/" INTEGER)? | IDENT | "d" "(" expr ")" | "(" expr ")"
//! ```
//!
//! There is no implicit multiplication. Positions in errors are 1-based
//! character columns.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::poly::{Polynomial, Rational, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at column {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("negative exponent at column {pos}")]
    NegativeExponent { pos: usize },
    #[error("differential `d(...)` is not allowed in a polynomial (column {pos})")]
    UnexpectedDifferential { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, pos)),
            '-' => out.push((Tok::Minus, pos)),
            '*' => out.push((Tok::Star, pos)),
            '/' => out.push((Tok::Slash, pos)),
            '^' => out.push((Tok::Caret, pos)),
            '(' => out.push((Tok::LParen, pos)),
            ')' => out.push((Tok::RParen, pos)),
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((Tok::Int(digits.parse().expect("ascii digits")), pos));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// Parsed expression tree. Variable names are not yet resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var { name: String, pos: usize },
    D { arg: Box<Expr>, pos: usize },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump().0 {
            Tok::Int(n) => {
                let e: u32 = n.try_into().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                })?;
                Ok(Expr::Pow(Box::new(base), e))
            }
            Tok::Minus => Err(ParseError::NegativeExponent { pos }),
            _ => Err(ParseError::Syntax {
                pos,
                msg: "exponent must be a nonnegative integer literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump().0 {
            Tok::Int(n) => {
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump().0 {
                        Tok::Int(d) if !d.is_zero() => Ok(Expr::Num(Rational::new(n, d))),
                        Tok::Int(_) => Err(ParseError::Syntax {
                            pos: dpos,
                            msg: "zero denominator".into(),
                        }),
                        _ => Err(ParseError::Syntax {
                            pos: dpos,
                            msg: "expected integer denominator".into(),
                        }),
                    }
                } else {
                    Ok(Expr::Num(Rational::from_integer(n)))
                }
            }
            Tok::Ident(name) if name == "d" => {
                self.expect(Tok::LParen, "`(` after `d`")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::D {
                    arg: Box::new(arg),
                    pos,
                })
            }
            Tok::Ident(name) => Ok(Expr::Var { name, pos }),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::End => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parses `text` into an unresolved expression tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Evaluates an expression tree as a commutative polynomial over `vars`.
pub fn eval_poly(e: &Expr, vars: &Arc<VarTable>) -> Result<Polynomial, ParseError> {
    Ok(match e {
        Expr::Num(c) => Polynomial::constant(vars, c.clone()),
        Expr::Var { name, pos } => match vars.index_of(name) {
            Some(i) => Polynomial::var(vars, i).expect("index from table"),
            None => {
                return Err(ParseError::UnknownVariable {
                    name: name.clone(),
                    pos: *pos,
                })
            }
        },
        Expr::D { pos, .. } => return Err(ParseError::UnexpectedDifferential { pos: *pos }),
        Expr::Add(a, b) => &eval_poly(a, vars)? + &eval_poly(b, vars)?,
        Expr::Sub(a, b) => &eval_poly(a, vars)? - &eval_poly(b, vars)?,
        Expr::Mul(a, b) => &eval_poly(a, vars)? * &eval_poly(b, vars)?,
        Expr::Neg(a) => -eval_poly(a, vars)?,
        Expr::Pow(a, k) => eval_poly(a, vars)?.pow(*k),
    })
}

/// Parses a polynomial over `vars`.
pub fn parse_poly(text: &str, vars: &Arc<VarTable>) -> Result<Polynomial, ParseError> {
    eval_poly(&parse_expr(text)?, vars)
}

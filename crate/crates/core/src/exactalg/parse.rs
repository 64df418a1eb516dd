//! Reader for the text form of ring elements.
//!
//! Grammar:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' ['-'] digits | '^' '(' '-' digits ')')?
//! atom   := integer ['/' integer] | identifier | '(' expr ')'
//! ```
//!
//! Juxtaposed parenthesised groups such as `(1-a1)(a2-a1^2)` are accepted as
//! products. Everything [`MPoly`]'s `Display` writes reads back unchanged.

use std::sync::Arc;

use num_bigint::BigInt;

use super::{AlgebraError, Coefficient, MPoly, Space};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>, AlgebraError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Int(s.parse().expect("digit run")));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            other => return Err(AlgebraError::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a, S> {
    tokens: Vec<Token>,
    pos: usize,
    space: &'a Arc<Space>,
    _marker: std::marker::PhantomData<S>,
}

impl<S: Coefficient> Parser<'_, S> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), AlgebraError> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(AlgebraError::Parse(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<MPoly<S>, AlgebraError> {
        let mut acc = MPoly::zero(self.space);
        let mut sign = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Token::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.checked_sub(&t)? } else { acc.checked_add(&t)? };
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly<S>, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.checked_mul(&f)?;
                }
                Some(Token::LParen) => {
                    let f = self.factor()?;
                    acc = acc.checked_mul(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exponent(&mut self) -> Result<i32, AlgebraError> {
        let paren = matches!(self.peek(), Some(Token::LParen));
        if paren {
            self.pos += 1;
        }
        let negative = matches!(self.peek(), Some(Token::Minus));
        if negative {
            self.pos += 1;
        }
        let value = match self.next() {
            Some(Token::Int(v)) => i32::try_from(v)
                .map_err(|_| AlgebraError::Parse("exponent out of range".into()))?,
            got => return Err(AlgebraError::Parse(format!("expected exponent, found {got:?}"))),
        };
        if paren {
            self.expect(Token::RParen)?;
        }
        Ok(if negative { -value } else { value })
    }

    fn factor(&mut self) -> Result<MPoly<S>, AlgebraError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if !matches!(self.peek(), Some(Token::Caret)) {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        if e >= 0 {
            return Ok(base.pow(e as u32));
        }
        let inv = base
            .monomial_inverse()
            .ok_or_else(|| AlgebraError::Parse("negative power of a non-monomial".into()))?;
        Ok(inv.pow((-e) as u32))
    }

    fn atom(&mut self) -> Result<MPoly<S>, AlgebraError> {
        match self.next() {
            Some(Token::Int(n)) => {
                if matches!(self.peek(), Some(Token::Slash)) {
                    self.pos += 1;
                    let d = match self.next() {
                        Some(Token::Int(d)) => d,
                        got => {
                            return Err(AlgebraError::Parse(format!(
                                "expected denominator, found {got:?}"
                            )))
                        }
                    };
                    let c = S::from_ratio(n.clone(), d.clone()).ok_or_else(|| {
                        AlgebraError::Parse(format!("{n}/{d} is not in the coefficient ring {}", S::NAME))
                    })?;
                    Ok(MPoly::constant(self.space, c))
                } else {
                    Ok(MPoly::constant(self.space, S::from_bigint(n)))
                }
            }
            Some(Token::Ident(name)) => MPoly::var_named(self.space, &name),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            got => Err(AlgebraError::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

impl<S: Coefficient> MPoly<S> {
    /// Parses the text form of an element of `space`.
    pub fn parse(space: &Arc<Space>, text: &str) -> Result<Self, AlgebraError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err(AlgebraError::Parse("empty expression".into()));
        }
        let mut p = Parser { tokens, pos: 0, space, _marker: std::marker::PhantomData };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(AlgebraError::Parse(format!("trailing input at token {}", p.pos)));
        }
        Ok(e)
    }
}

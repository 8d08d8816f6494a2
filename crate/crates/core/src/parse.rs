//! Concrete syntax for univariate expressions.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' NAT)?
//! atom   := 'x' | NAT | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. `+` and `*` associate to the left. A literal `n`
//! becomes the double-and-add sum of ones (`3` is `((1+1)+1)`), and `a^k`
//! becomes the tree that [`crate::monomial`] builds by square-and-multiply.
//! The output of [`SymExpr`]'s `Display` parses back to the same tree.

use thiserror::Error;

use crate::expr::monomial;
use crate::semiring::nat_embed;
use crate::symbolic::{SymExpr, SyntaxSemiring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {offset}, expected {expected}")]
    Unexpected {
        offset: usize,
        found: char,
        expected: &'static str,
    },
    #[error("unexpected end of input at byte {offset}, expected {expected}")]
    UnexpectedEnd {
        offset: usize,
        expected: &'static str,
    },
    #[error("integer literal at byte {offset} does not fit in 64 bits")]
    LiteralTooLarge { offset: usize },
    #[error("exponent at byte {offset} must be a natural-number literal")]
    NonLiteralExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match *self {
            ParseError::Unexpected { offset, .. }
            | ParseError::UnexpectedEnd { offset, .. }
            | ParseError::LiteralTooLarge { offset }
            | ParseError::NonLiteralExponent { offset } => offset,
        }
    }
}

/// Parses `source` into a tree over `x`.
pub fn parse(source: &str) -> Result<SymExpr, ParseError> {
    let mut p = Parser {
        src: source,
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(c) => Err(ParseError::Unexpected {
            offset: p.pos,
            found: c,
            expected: "'+', '*' or end of input",
        }),
    }
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace()) {
            self.pos += c.len_utf8();
        }
    }

    /// Consumes `c` if it is the next non-blank character.
    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SymExpr, ParseError> {
        let mut acc = self.term()?;
        while self.eat('+') {
            acc = SymExpr::add(acc, self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SymExpr, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = SymExpr::mul(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SymExpr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(ParseError::NonLiteralExponent { offset: self.pos });
        }
        let k = self.nat()?;
        Ok(monomial(k).evaluate(&SyntaxSemiring, base))
    }

    fn atom(&mut self) -> Result<SymExpr, ParseError> {
        const EXPECTED: &str = "'x', a natural number or '('";
        self.skip_ws();
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok(SymExpr::x())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(e)
                    }
                    Some(found) => Err(ParseError::Unexpected {
                        offset: self.pos,
                        found,
                        expected: "')'",
                    }),
                    None => Err(ParseError::UnexpectedEnd {
                        offset: self.pos,
                        expected: "')'",
                    }),
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(nat_embed(&SyntaxSemiring, self.nat()?)),
            Some(found) => Err(ParseError::Unexpected {
                offset: self.pos,
                found,
                expected: EXPECTED,
            }),
            None => Err(ParseError::UnexpectedEnd {
                offset: self.pos,
                expected: EXPECTED,
            }),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        self.pos += len;
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::LiteralTooLarge { offset: start })
    }
}

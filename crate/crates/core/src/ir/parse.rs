//! Parser for the expression grammar; inverse of canonical rendering on
//! normalized expressions.

use super::{AlgebraTag, Atom, Expr, MapSymbol, Rat, ScalarKind};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown map symbol `{name}` at byte {pos}")]
    UnknownMap { pos: usize, name: String },
    #[error("negative time at byte {pos}")]
    NegativeTime { pos: usize },
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { pos, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Num(Rat),
    Gen(AlgebraTag, u32, bool),
    MapOpen(MapSymbol),
    ScalOpen(ScalarKind),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn read_uint(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return err(start, "expected digits");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .map_err(|_| ParseError::Syntax { pos: start, msg: "integer out of range".into() })
    }

    fn read_rat(&mut self) -> Result<Rat, ParseError> {
        let neg = if self.pos < self.src.len() && self.src[self.pos] == b'-' {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.read_uint()?;
        let d = if self.pos < self.src.len() && self.src[self.pos] == b'/' {
            self.pos += 1;
            let at = self.pos;
            let d = self.read_uint()?;
            if d == 0 {
                return err(at, "zero denominator");
            }
            d
        } else {
            1
        };
        Ok(Rat::new(if neg { -n } else { n }, d))
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.pos < self.src.len() && self.src[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            err(self.pos, format!("expected `{}`", c as char))
        }
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let at = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => Tok::Num(self.read_rat()?),
            b'a' | b'b' if self.pos + 1 < self.src.len() && self.src[self.pos + 1].is_ascii_digit() => {
                let tag = if c == b'a' { AlgebraTag::A } else { AlgebraTag::B };
                self.pos += 1;
                let id = self.read_uint()?;
                let adjoint = if self.pos < self.src.len() && self.src[self.pos] == b'*' {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                Tok::Gen(tag, id as u32, adjoint)
            }
            b'r' | b'R' => {
                self.pos += 1;
                self.expect(b'(')?;
                Tok::MapOpen(if c == b'r' { MapSymbol::Rho } else { MapSymbol::CapR })
            }
            b'p' => {
                self.pos += 1;
                self.expect(b'[')?;
                let tat = self.pos;
                let t = self.read_rat()?;
                if t < Rat::from_integer(0) {
                    return Err(ParseError::NegativeTime { pos: tat });
                }
                self.expect(b']')?;
                self.expect(b'(')?;
                Tok::MapOpen(MapSymbol::Phi(t))
            }
            b'w' | b'v' => {
                self.pos += 1;
                self.expect(b'(')?;
                Tok::ScalOpen(if c == b'w' { ScalarKind::Omega } else { ScalarKind::Nu })
            }
            _ if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                return Err(ParseError::UnknownMap { pos: start, name });
            }
            _ => return err(at, format!("unexpected character `{}`", c as char)),
        };
        Ok(Some((at, tok)))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    /// expr := ['-'] term (('+'|'-') term)*
    fn expr(&mut self, nested: bool) -> Result<Expr, ParseError> {
        let mut acc;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            acc = self.term()?.neg();
        } else {
            acc = self.term()?;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                Some(Tok::RParen) if nested => {
                    self.bump();
                    return Ok(acc);
                }
                None if !nested => return Ok(acc),
                Some(_) => return err(self.pos(), "expected `+`, `-`, or end of expression"),
                None => return err(self.end, "unbalanced parenthesis"),
            }
        }
    }

    /// term := unit+ with optional `*` separators between units
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = Expr::one();
        let mut units = 0usize;
        let mut star_pending = false;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    if units == 0 || star_pending {
                        return err(self.pos(), "misplaced `*`");
                    }
                    star_pending = true;
                    self.bump();
                }
                Some(Tok::Num(_)) => {
                    if let Some(Tok::Num(r)) = self.bump() {
                        acc = acc.scale(r);
                    }
                    units += 1;
                    star_pending = false;
                }
                Some(Tok::Gen(..)) => {
                    if let Some(Tok::Gen(tag, id, adjoint)) = self.bump() {
                        acc = acc.mul(&Expr::from_atom(Atom::Gen { tag, id, adjoint }));
                    }
                    units += 1;
                    star_pending = false;
                }
                Some(Tok::MapOpen(_)) => {
                    if let Some(Tok::MapOpen(sym)) = self.bump() {
                        let arg = self.expr(true)?;
                        acc = acc.mul(&Expr::from_atom(Atom::Map { sym, arg }));
                    }
                    units += 1;
                    star_pending = false;
                }
                Some(Tok::ScalOpen(_)) => {
                    if let Some(Tok::ScalOpen(kind)) = self.bump() {
                        let arg = self.expr(true)?;
                        acc = acc.mul(&Expr::scalar(kind, &arg));
                    }
                    units += 1;
                    star_pending = false;
                }
                Some(Tok::LParen) => {
                    self.bump();
                    let sub = self.expr(true)?;
                    acc = acc.mul(&sub);
                    units += 1;
                    star_pending = false;
                }
                _ => break,
            }
        }
        if units == 0 {
            return err(self.pos(), "expected a term");
        }
        if star_pending {
            return err(self.pos(), "dangling `*`");
        }
        Ok(acc)
    }
}

/// Parses the expression grammar and normalizes the result.
pub fn parse(s: &str) -> Result<Expr, ParseError> {
    let mut lx = Lexer { src: s.as_bytes(), pos: 0 };
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    if toks.is_empty() {
        return err(0, "empty input");
    }
    // Bare zero is not producible by the term grammar; accept it directly.
    if toks.len() == 1 {
        if let Tok::Num(r) = toks[0].1 {
            if r == Rat::from_integer(0) {
                return Ok(Expr::zero());
            }
        }
    }
    let end = s.len();
    let mut p = Parser { toks, idx: 0, end };
    let e = p.expr(false)?;
    Ok(e.normalize())
}

/// Parses a bare rational (`<int>` or `<int>/<posint>`, optional sign).
pub fn parse_rat(s: &str) -> Result<Rat, ParseError> {
    let mut lx = Lexer { src: s.trim().as_bytes(), pos: 0 };
    let r = lx.read_rat()?;
    if lx.pos != s.trim().len() {
        return err(lx.pos, "trailing input after rational");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::canonical_text;
    use super::*;

    #[test]
    fn word_of_three_generators() {
        let e = parse("b0 a1 b1").unwrap();
        assert_eq!(canonical_text(&e), "b0 a1 b1");
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].word.len(), 3);
    }

    #[test]
    fn two_term_expression() {
        let e = parse("w(b1) * a1 + 3/2 a2").unwrap();
        assert_eq!(e.terms.len(), 2);
        assert_eq!(canonical_text(&e), "w(b1) * a1 + 3/2 a2");
    }

    #[test]
    fn negative_time_rejected() {
        match parse("p[-1](a1)") {
            Err(ParseError::NegativeTime { .. }) => {}
            other => panic!("expected negative-time error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_map_rejected() {
        assert!(matches!(parse("q(a1)"), Err(ParseError::UnknownMap { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse("a1 + + a2") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn zero_and_one_round_trip() {
        assert_eq!(canonical_text(&parse("0").unwrap()), "0");
        assert_eq!(canonical_text(&parse("1").unwrap()), "1");
    }
}

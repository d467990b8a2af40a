//! Recursive-descent parser for the formula syntax.
//!
//! ```text
//! formula  := iff
//! iff      := implies ('<->' implies)?
//! implies  := or ('-->' implies)?
//! or       := and ('|' and)*
//! and      := unary ('&' unary)*
//! unary    := '~' unary | ('ALL' | 'EX') ident+ '.' formula | cmp
//! cmp      := union (('=' | '~=' | '<' | '<=' | ':' | '~:') union)?
//! union    := arith ('Un' arith)*
//! arith    := postfix (('+' | '-') postfix)*
//! postfix  := atom ('..' ident)*
//! atom     := '(' formula ')' | 'true' | 'false' | 'null' | '-'? int
//!           | 'reach' field postfix postfix
//!           | field '(' formula ')' | ident
//!           | '{' ident '.' formula '}' | '{' formula '}' | '{' '}'
//! field    := ident ('[' formula ':=' formula ']')*
//! ```

use super::ast::{Expr, Field};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dot,
    DotDot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Iff,
    Eq,
    Neq,
    Lt,
    Le,
    Colon,
    NotIn,
    Assign,
    Plus,
    Minus,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |offset: usize, message: String| ParseError { offset, message };
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &src[i..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i + 1;
            while j < bytes.len() {
                let d = bytes[j] as char;
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    j += 1;
                } else {
                    break;
                }
            }
            (Tok::Ident(src[i..j].to_string()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                j += 1;
            }
            let value = src[i..j]
                .parse::<i64>()
                .map_err(|e| err(i, format!("bad integer literal: {e}")))?;
            (Tok::Int(value), j - i)
        } else if rest.starts_with("-->") {
            (Tok::Arrow, 3)
        } else if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with("~=") {
            (Tok::Neq, 2)
        } else if rest.starts_with("~:") {
            (Tok::NotIn, 2)
        } else if rest.starts_with(":=") {
            (Tok::Assign, 2)
        } else if rest.starts_with("..") {
            (Tok::DotDot, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '.' => Tok::Dot,
                '~' => Tok::Tilde,
                '&' => Tok::Amp,
                '|' => Tok::Bar,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                ':' => Tok::Colon,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                ',' => Tok::Comma,
                _ => return Err(err(i, format!("unexpected character `{c}`"))),
            };
            (t, 1)
        };
        out.push((start, tok));
        i += len;
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &["ALL", "EX", "true", "false", "null", "reach", "Un"];

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(format!("expected {t:?}, found {:?}", self.peek()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other:?}")),
        }
    }

    fn formula(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.implies()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            return Ok(Expr::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Expr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let first = self.and()?;
        if self.peek() != Some(&Tok::Bar) {
            return Ok(first);
        }
        let mut xs = vec![first];
        while self.eat(&Tok::Bar) {
            xs.push(self.and()?);
        }
        Ok(Expr::Or(xs))
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let first = self.unary()?;
        if self.peek() != Some(&Tok::Amp) {
            return Ok(first);
        }
        let mut xs = vec![first];
        while self.eat(&Tok::Amp) {
            xs.push(self.unary()?);
        }
        Ok(Expr::And(xs))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Expr::not(self.unary()?));
        }
        if self.is_keyword("ALL") || self.is_keyword("EX") {
            let universal = self.is_keyword("ALL");
            self.pos += 1;
            let mut vars = vec![self.ident()?];
            while let Some(Tok::Ident(_)) = self.peek() {
                vars.push(self.ident()?);
            }
            self.expect(&Tok::Dot)?;
            let body = self.formula()?;
            return Ok(if universal {
                Expr::forall(vars, body)
            } else {
                Expr::exists(vars, body)
            });
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.union()?;
        let op = match self.peek() {
            Some(t @ (Tok::Eq | Tok::Neq | Tok::Lt | Tok::Le | Tok::Colon | Tok::NotIn)) => {
                t.clone()
            }
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.union()?;
        Ok(match op {
            Tok::Eq => Expr::eq(lhs, rhs),
            Tok::Neq => Expr::neq(lhs, rhs),
            Tok::Lt => Expr::lt(lhs, rhs),
            Tok::Le => Expr::le(lhs, rhs),
            Tok::Colon => Expr::member(lhs, rhs),
            Tok::NotIn => Expr::not(Expr::member(lhs, rhs)),
            _ => unreachable!(),
        })
    }

    fn union(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.arith()?;
        while self.is_keyword("Un") {
            self.pos += 1;
            let rhs = self.arith()?;
            lhs = Expr::Union(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.postfix()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.postfix()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.postfix()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.eat(&Tok::DotDot) {
            let f = self.ident()?;
            e = Expr::app(f, e);
        }
        Ok(e)
    }

    fn field(&mut self) -> Result<Field, ParseError> {
        let mut f = Field::Named(self.ident()?);
        while self.eat(&Tok::LBracket) {
            let at = self.formula()?;
            self.expect(&Tok::Assign)?;
            let to = self.formula()?;
            self.expect(&Tok::RBracket)?;
            f = f.update(at, to);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Int(i)) => {
                self.pos += 1;
                Ok(Expr::Int(i))
            }
            Some(Tok::Minus) => {
                if let Some(Tok::Int(i)) = self.peek_at(1).cloned() {
                    self.pos += 2;
                    Ok(Expr::Int(-i))
                } else {
                    self.error("expected integer after unary minus")
                }
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                if self.eat(&Tok::RBrace) {
                    return Ok(Expr::EmptySet);
                }
                let comprehension = matches!(self.peek(), Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()))
                    && self.peek_at(1) == Some(&Tok::Dot);
                let e = if comprehension {
                    let w = self.ident()?;
                    self.expect(&Tok::Dot)?;
                    Expr::Compr(w, Box::new(self.formula()?))
                } else {
                    Expr::Singleton(Box::new(self.formula()?))
                };
                self.expect(&Tok::RBrace)?;
                Ok(e)
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.pos += 1;
                    Ok(Expr::Bool(false))
                }
                "null" => {
                    self.pos += 1;
                    Ok(Expr::Null)
                }
                "reach" => {
                    self.pos += 1;
                    let f = self.field()?;
                    let a = self.postfix()?;
                    let b = self.postfix()?;
                    Ok(Expr::reach(f, a, b))
                }
                "ALL" | "EX" | "Un" => self.error(format!("unexpected keyword `{s}`")),
                _ => {
                    if matches!(self.peek_at(1), Some(Tok::LParen | Tok::LBracket)) {
                        let f = self.field()?;
                        self.expect(&Tok::LParen)?;
                        let arg = self.formula()?;
                        self.expect(&Tok::RParen)?;
                        Ok(Expr::App(f, Box::new(arg)))
                    } else {
                        self.pos += 1;
                        Ok(Expr::Var(s))
                    }
                }
            },
            other => self.error(format!("unexpected token {other:?}")),
        }
    }
}

fn run<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let out = f(&mut p)?;
    if p.pos < p.toks.len() {
        return p.error(format!("trailing input starting with {:?}", p.peek()));
    }
    Ok(out)
}

/// Parses a formula or term.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    run(src, |p| p.formula())
}

/// Parses a field term such as `next[x := y]`.
pub fn parse_field(src: &str) -> Result<Field, ParseError> {
    run(src, |p| p.field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::print::print;

    #[test]
    fn parses_mathematical_notation() {
        let f = parse("ALL v. v : content & v..next ~= null --> v..data <= v..next..data").unwrap();
        match f {
            Expr::Forall(vs, body) => {
                assert_eq!(vs, vec!["v".to_string()]);
                assert!(matches!(*body, Expr::Implies(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn field_update_application() {
        let f = parse("next[n := curr][prev := n](x) = y").unwrap();
        let printed = print(&f);
        assert_eq!(printed, "next[n := curr][prev := n](x) = y");
        assert_eq!(parse(&printed).unwrap(), f);
    }

    #[test]
    fn comprehension_vs_singleton() {
        assert!(matches!(parse("{w. w = x}").unwrap(), Expr::Compr(..)));
        assert!(matches!(parse("{x..next}").unwrap(), Expr::Singleton(..)));
        assert_eq!(parse("{}").unwrap(), Expr::EmptySet);
    }

    #[test]
    fn reach_arguments_are_postfix_terms() {
        let f = parse("reach next x..next y").unwrap();
        assert_eq!(
            f,
            Expr::reach(
                Field::named("next"),
                Expr::app("next", Expr::var("x")),
                Expr::var("y")
            )
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("x = ").is_err());
        assert!(parse("x # y").is_err());
        assert!(parse("(x = y").is_err());
        assert!(parse("x = y)").is_err());
    }

    #[test]
    fn precedence_round_trip() {
        for src in [
            "a & b | c --> d",
            "~(a & b)",
            "~x = y",
            "(ALL x. p(x)) & q",
            "a --> b --> c",
            "(a --> b) --> c",
            "x Un y Un {z} = s",
            "x + 1 - y < 3",
            "x + (-3) <= 0",
            "a <-> (b <-> c)",
            "EX w. w ~: s & (ALL u. u = w)",
        ] {
            let e = parse(src).unwrap();
            let back = parse(&print(&e)).unwrap();
            assert_eq!(back, e, "{src} printed as {}", print(&e));
        }
    }
}

//! Recursive-descent parser for quantifier-free sign conditions.
//!
//! ```text
//! formula := or ; or := and ("||" and)* ; and := unary ("&&" unary)* ;
//! unary   := "!" unary | "(" formula ")" | atom ;
//! atom    := poly rel "0" ; rel := "=" | "<=" | ">=" | "<" | ">" ;
//! poly    := polynomial over x1..xN and "l", integer or rational ("a/b")
//!            coefficients, "^" integer powers, "+ - *" operators.
//! ```
//!
//! A leading `(` is ambiguous between a parenthesized sub-formula and a
//! parenthesized polynomial factor; the parser resolves it by trying the
//! atom production first and backtracking.

use super::poly::Polynomial;
use super::Relation;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(usize), // zero-based x-variable index
    Param,
    Int(BigInt),
    AndAnd,
    OrOr,
    Bang,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let (tline, tcol) = (line, col);
        let mut push = |tok: Tok| out.push(Spanned { tok, line: tline, col: tcol });
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '+' => push(Tok::Plus),
            '-' => push(Tok::Minus),
            '*' => push(Tok::Star),
            '^' => push(Tok::Caret),
            '/' => push(Tok::Slash),
            '=' => push(Tok::Eq),
            '!' => push(Tok::Bang),
            '<' => {
                if bytes.get(i + 1) == Some(&'=') {
                    push(Tok::Le);
                    i += 1;
                    col += 1;
                } else {
                    push(Tok::Lt);
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&'=') {
                    push(Tok::Ge);
                    i += 1;
                    col += 1;
                } else {
                    push(Tok::Gt);
                }
            }
            '&' => {
                if bytes.get(i + 1) == Some(&'&') {
                    push(Tok::AndAnd);
                    i += 1;
                    col += 1;
                } else {
                    return Err(Error::Syntax { line, col, msg: "expected `&&`".into() });
                }
            }
            '|' => {
                if bytes.get(i + 1) == Some(&'|') {
                    push(Tok::OrOr);
                    i += 1;
                    col += 1;
                } else {
                    return Err(Error::Syntax { line, col, msg: "expected `||`".into() });
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                col += i - start;
                out.push(Spanned { tok: Tok::Int(s.parse().unwrap()), line: tline, col: tcol });
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                col += i - start;
                let tok = ident_token(&s, tline, tcol)?;
                out.push(Spanned { tok, line: tline, col: tcol });
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

fn ident_token(s: &str, line: usize, col: usize) -> Result<Tok> {
    if s == "l" {
        return Ok(Tok::Param);
    }
    if let Some(rest) = s.strip_prefix('x') {
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            let idx: usize = rest.parse().map_err(|_| Error::UnknownVariable {
                name: s.to_string(),
                line,
                col,
            })?;
            if idx >= 1 {
                return Ok(Tok::Var(idx - 1));
            }
        }
    }
    Err(Error::UnknownVariable { name: s.to_string(), line, col })
}

pub(super) struct ParsedTree {
    pub num_vars: usize,
    pub root: RawNode,
}

/// Parse tree prior to polynomial interning.
pub(super) enum RawNode {
    And(Vec<RawNode>),
    Or(Vec<RawNode>),
    Not(Box<RawNode>),
    Atom(Polynomial, Relation),
}

pub(super) fn parse(text: &str) -> Result<ParsedTree> {
    let toks = lex(text)?;
    // The polynomial ring needs the variable count up front.
    let num_vars = toks
        .iter()
        .filter_map(|t| match t.tok {
            Tok::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut p = Parser { toks, pos: 0, num_vars };
    let root = p.or()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(ParsedTree { num_vars, root })
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    num_vars: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let t = self.peek();
        Error::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn or(&mut self) -> Result<RawNode> {
        let first = self.and()?;
        let mut items = vec![first];
        while self.peek().tok == Tok::OrOr {
            self.bump();
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RawNode::Or(items) })
    }

    fn and(&mut self) -> Result<RawNode> {
        let first = self.unary()?;
        let mut items = vec![first];
        while self.peek().tok == Tok::AndAnd {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RawNode::And(items) })
    }

    fn unary(&mut self) -> Result<RawNode> {
        if self.peek().tok == Tok::Bang {
            self.bump();
            return Ok(RawNode::Not(Box::new(self.unary()?)));
        }
        // Atom first; on failure reparse a leading "(" as a sub-formula.
        let save = self.pos;
        match self.atom() {
            Ok(a) => Ok(a),
            Err(atom_err) => {
                self.pos = save;
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    let inner = self.or()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(inner)
                } else {
                    Err(atom_err)
                }
            }
        }
    }

    fn atom(&mut self) -> Result<RawNode> {
        let poly = self.poly_expr()?;
        let rel = match self.peek().tok {
            Tok::Eq => Relation::Eq,
            Tok::Le => Relation::Le,
            Tok::Ge => Relation::Ge,
            Tok::Lt => Relation::Lt,
            Tok::Gt => Relation::Gt,
            _ => return Err(self.err("expected a relation (`=`, `<=`, `>=`, `<`, `>`)")),
        };
        self.bump();
        match &self.peek().tok {
            Tok::Int(v) if v == &BigInt::from(0) => {
                self.bump();
            }
            _ => return Err(self.err("expected `0` on the right-hand side of the relation")),
        }
        Ok(RawNode::Atom(poly, rel))
    }

    fn poly_expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.poly_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.poly_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.poly_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn poly_term(&mut self) -> Result<Polynomial> {
        let mut acc = self.poly_factor()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            acc = acc.mul(&self.poly_factor()?);
        }
        Ok(acc)
    }

    fn poly_factor(&mut self) -> Result<Polynomial> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(self.poly_factor()?.neg());
        }
        let base = self.poly_primary()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exp = match &self.peek().tok {
                Tok::Int(v) => {
                    let e = u32::try_from(v.clone())
                        .map_err(|_| self.err("exponent too large"))?;
                    self.bump();
                    e
                }
                _ => return Err(self.err("exponent must be a non-negative integer")),
            };
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn poly_primary(&mut self) -> Result<Polynomial> {
        match self.peek().tok.clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.poly_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Var(i) => {
                self.bump();
                Ok(Polynomial::var(self.num_vars, i))
            }
            Tok::Param => {
                self.bump();
                Ok(Polynomial::param(self.num_vars))
            }
            Tok::Int(n) => {
                self.bump();
                // "a/b" makes an exact rational coefficient.
                if self.peek().tok == Tok::Slash {
                    self.bump();
                    match self.peek().tok.clone() {
                        Tok::Int(d) if !matches!(&d, d if d == &BigInt::from(0)) => {
                            self.bump();
                            Ok(Polynomial::constant(self.num_vars, BigRational::new(n, d)))
                        }
                        Tok::Int(_) => Err(self.err("division by zero in rational literal")),
                        _ => Err(self.err(
                            "`/` is only allowed between integer literals (rational coefficient)",
                        )),
                    }
                } else {
                    Ok(Polynomial::constant(
                        self.num_vars,
                        BigRational::new(n, BigInt::one()),
                    ))
                }
            }
            _ => Err(self.err("expected a polynomial")),
        }
    }
}

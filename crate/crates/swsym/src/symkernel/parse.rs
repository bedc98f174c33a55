//! Recursive-descent parser for the expression grammar (see docs/grammar.md).
//!
//! Without a declaration context every bare name parses as a parameter.
//! With a context, names must be declared; a name with an underscore parses
//! as a jet coordinate (`v_tx`), the suffix being a sequence of declared
//! independent-variable names.

use num::bigint::BigInt;
use num::BigRational;
use thiserror::Error;

use super::expr::{Expr, Func};
use super::symbol::Symbol;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },
}

/// Declaration context: declared symbols that bare names resolve to.
#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    pub symbols: Vec<Symbol>,
}

impl ParseContext {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        ParseContext { symbols }
    }

    fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| s.name() == name)
    }

    fn independents(&self) -> Vec<&Symbol> {
        self.symbols.iter().filter(|s| s.is_independent()).collect()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: Option<&'a ParseContext>,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(Expr::add(terms))
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = Expr::mul(vec![acc, rhs]);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    // power := atom ('^' unary)?   (right associative, unary minus allowed)
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = if self.eat(b'-') {
                self.power()?.neg()
            } else {
                self.power()?
            };
            Ok(Expr::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut numer: BigInt = int_part.parse().map_err(|_| self.err("bad integer"))?;
        let mut denom = BigInt::from(1);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == fs {
                return Err(self.err("digits expected after decimal point"));
            }
            let frac = std::str::from_utf8(&self.src[fs..self.pos]).unwrap();
            let fval: BigInt = frac.parse().map_err(|_| self.err("bad fraction"))?;
            let ten = BigInt::from(10);
            for _ in 0..frac.len() {
                numer = numer * &ten;
                denom = denom * &ten;
            }
            numer += fval;
        }
        Ok(Expr::num(BigRational::new(numer, denom)))
    }

    fn name(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();

        // function call?
        if let Some(f) = Func::from_name(&word) {
            if self.peek() == Some(b'(') {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b')')?;
                return Ok(Expr::call(f, a));
            }
        }

        match self.ctx {
            None => Ok(Expr::sym(Symbol::param(&word))),
            Some(ctx) => {
                if let Some(s) = ctx.lookup(&word) {
                    return Ok(Expr::sym(s.clone()));
                }
                // jet form: base_suffix with suffix a run of independents
                if let Some(uidx) = word.find('_') {
                    let (base, suffix) = word.split_at(uidx);
                    let suffix = &suffix[1..];
                    if let Some(dep) = ctx.lookup(base).filter(|s| s.is_dependent()) {
                        if let Some(idx) = split_jet_suffix(suffix, &ctx.independents()) {
                            let wrt: Vec<&str> = idx.iter().map(|s| s.as_str()).collect();
                            return Ok(Expr::sym(Symbol::jet(dep, &wrt)));
                        }
                    }
                }
                Err(ParseError::UnknownSymbol {
                    name: word,
                    offset: start,
                })
            }
        }
    }
}

/// Greedily split a jet suffix into declared independent names.
fn split_jet_suffix(suffix: &str, independents: &[&Symbol]) -> Option<Vec<String>> {
    let mut rest = suffix;
    let mut out = Vec::new();
    'outer: while !rest.is_empty() {
        // longest match first, so "xi" wins over a hypothetical "x"
        let mut names: Vec<&str> = independents.iter().map(|s| s.name()).collect();
        names.sort_by_key(|n| std::cmp::Reverse(n.len()));
        for n in names {
            if let Some(r) = rest.strip_prefix(n) {
                out.push(n.to_string());
                rest = r;
                continue 'outer;
            }
        }
        return None;
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_impl(text, None)
}

pub fn parse_with(text: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    parse_impl(text, Some(ctx))
}

fn parse_impl(text: &str, ctx: Option<&ParseContext>) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::render::render;

    fn ctx() -> ParseContext {
        ParseContext::new(vec![
            Symbol::indep("t"),
            Symbol::indep("x"),
            Symbol::dep("h", &["t", "x"]),
            Symbol::dep("u", &["t", "x"]),
            Symbol::dep("v", &["t", "x"]),
            Symbol::param("gamma"),
            Symbol::param("t0"),
        ])
    }

    #[test]
    fn jet_suffix_parses() {
        let c = ctx();
        let e = parse_with("h^2 * u_x", &c).unwrap();
        let h = Symbol::dep("h", &["t", "x"]);
        let u = Symbol::dep("u", &["t", "x"]);
        let want = Expr::mul(vec![
            Expr::pow(Expr::sym(h), Expr::int(2)),
            Expr::sym(Symbol::jet(&u, &["x"])),
        ]);
        assert_eq!(e, want);
    }

    #[test]
    fn call_of_sum() {
        let c = ctx();
        let e = parse_with("cos(t+t0)", &c).unwrap();
        let want = Expr::call(
            Func::Cos,
            Expr::add(vec![
                Expr::sym(Symbol::indep("t")),
                Expr::sym(Symbol::param("t0")),
            ]),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn middle_momentum_term() {
        let c = ctx();
        let e = parse_with("h^(gamma-1)*h_x - v", &c).unwrap();
        let h = Symbol::dep("h", &["t", "x"]);
        let v = Symbol::dep("v", &["t", "x"]);
        let want = Expr::add(vec![
            Expr::mul(vec![
                Expr::pow(
                    Expr::sym(h.clone()),
                    Expr::add(vec![Expr::sym(Symbol::param("gamma")), Expr::int(-1)]),
                ),
                Expr::sym(Symbol::jet(&h, &["x"])),
            ]),
            Expr::sym(v).neg(),
        ]);
        assert_eq!(e, want);
    }

    #[test]
    fn unknown_symbol_with_context() {
        let c = ctx();
        let err = parse_with("h + q", &c).unwrap_err();
        assert!(matches!(err, ParseError::UnknownSymbol { ref name, .. } if name == "q"));
    }

    #[test]
    fn syntax_error_carries_offset() {
        let err = parse("1 + * 2").unwrap_err();
        match err {
            ParseError::Syntax { offset, .. } => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decimals_are_exact_rationals() {
        let e = parse("0.5").unwrap();
        assert_eq!(e, Expr::rat(1, 2));
    }

    #[test]
    fn render_parse_round_trip() {
        let c = ctx();
        let e = parse_with("h^(gamma-1)*h_x - v + 2/3*cos(t+t0)", &c).unwrap();
        let text = render(&e);
        let back = parse_with(&text, &c).unwrap();
        assert_eq!(e, back);
    }
}

//! Parser for operators written in the conventional notation, e.g.
//! `8D^2 - tD - t^2(5D+8)(11D+8)`.
//!
//! Expressions are read as normal-ordered: every `t` is understood to stand
//! to the left of every `D`, so products can be expanded commutatively.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{DifferentialOperator, PfError};
use crate::arith::{parse_rational, Rational};

type Bivariate = BTreeMap<(usize, usize), Rational>;

pub fn parse_operator(s: &str) -> Result<DifferentialOperator, PfError> {
    let tokens = tokenize(s)?;
    let mut p = Parser { tokens, pos: 0 };
    let poly = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(PfError::Parse(format!("unexpected {:?}", p.tokens[p.pos])));
    }
    Ok(DifferentialOperator::from_entries(poly.into_iter().map(|((k, j), a)| (k, j, a))))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    T,
    D,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PfError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\\' => {}
            't' => out.push(Tok::T),
            'D' => out.push(Tok::D),
            '+' => out.push(Tok::Plus),
            '-' | '−' => out.push(Tok::Minus),
            '*' | '·' => out.push(Tok::Star),
            '^' => out.push(Tok::Caret),
            '(' | '{' => out.push(Tok::Open),
            ')' | '}' => out.push(Tok::Close),
            d if d.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '/') {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                let r = parse_rational(&text).ok_or_else(|| PfError::Parse(format!("bad number {text:?}")))?;
                out.push(Tok::Num(r));
            }
            other => return Err(PfError::Parse(format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Bivariate, PfError> {
        let mut acc = Bivariate::new();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    Rational::one()
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    -Rational::one()
                }
                _ if first => Rational::one(),
                _ => break,
            };
            first = false;
            let term = self.term()?;
            for (key, a) in term {
                *acc.entry(key).or_insert_with(Rational::zero) += a * &sign;
            }
        }
        acc.retain(|_, a| !a.is_zero());
        Ok(acc)
    }

    fn term(&mut self) -> Result<Bivariate, PfError> {
        let mut acc = Bivariate::from([((0, 0), Rational::one())]);
        let mut any = false;
        loop {
            match self.peek() {
                Some(Tok::Star) if any => {
                    self.pos += 1;
                }
                Some(Tok::Num(_) | Tok::T | Tok::D | Tok::Open) => {}
                _ => break,
            }
            let f = self.power()?;
            acc = mul(&acc, &f);
            any = true;
        }
        if !any {
            return Err(PfError::Parse("empty term".into()));
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Bivariate, PfError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let braced = self.peek() == Some(&Tok::Open);
            if braced {
                self.pos += 1;
            }
            let e = match self.tokens.get(self.pos) {
                Some(Tok::Num(r)) if r.is_integer() => r.to_integer(),
                _ => return Err(PfError::Parse("exponent must be a nonnegative integer".into())),
            };
            self.pos += 1;
            if braced {
                if self.peek() != Some(&Tok::Close) {
                    return Err(PfError::Parse("unclosed exponent".into()));
                }
                self.pos += 1;
            }
            let e: u32 = e.try_into().map_err(|_| PfError::Parse("exponent too large".into()))?;
            let mut acc = Bivariate::from([((0, 0), Rational::one())]);
            for _ in 0..e {
                acc = mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Bivariate, PfError> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(r)) => Ok(Bivariate::from([((0, 0), r)])),
            Some(Tok::T) => Ok(Bivariate::from([((1, 0), Rational::one())])),
            Some(Tok::D) => Ok(Bivariate::from([((0, 1), Rational::one())])),
            Some(Tok::Open) => {
                let inner = self.expr()?;
                if self.tokens.get(self.pos) != Some(&Tok::Close) {
                    return Err(PfError::Parse("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(PfError::Parse(format!("unexpected {other:?}"))),
        }
    }
}

fn mul(a: &Bivariate, b: &Bivariate) -> Bivariate {
    let mut out = Bivariate::new();
    for ((k1, j1), x) in a {
        for ((k2, j2), y) in b {
            *out.entry((k1 + k2, j1 + j2)).or_insert_with(Rational::zero) += x * y;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

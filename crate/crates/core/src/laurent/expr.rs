//! Parser for the human-readable expression syntax printed by
//! `LaurentPolynomial`'s `Display`, e.g. `x + y + 3*x^-1 - 1/2*x^-1*y^2`.
//! Factors may also be juxtaposed with spaces (`3 x^-1 y`) and exponents
//! may be braced (`x^{-1}`).

use super::{LaurentError, LaurentPolynomial};
use crate::arith::{parse_rational, Rational};
use num_traits::One;

pub fn parse_expression(s: &str, dim: usize) -> Result<LaurentPolynomial, LaurentError> {
    let names = LaurentPolynomial::variable_names(dim);
    let err = |msg: String| LaurentError::Parse(msg);
    let cleaned: String = s.replace(['{', '}'], "");

    // Split into signed terms at `+`/`-` not directly following `^`.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign: Option<bool> = None;
    let mut prev = ' ';
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && prev != '^' {
            if cur.trim().is_empty() {
                if sign.is_some() {
                    return Err(err(format!("dangling sign in {s:?}")));
                }
            } else {
                terms.push((sign.unwrap_or(false), std::mem::take(&mut cur)));
            }
            cur.clear();
            sign = Some(ch == '-');
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = ch;
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign.unwrap_or(false), cur));
    } else if sign.is_some() {
        return Err(err(format!("trailing sign in {s:?}")));
    }
    if terms.is_empty() {
        return if cleaned.trim() == "0" {
            Ok(LaurentPolynomial::zero(dim))
        } else {
            Err(err("empty expression".into()))
        };
    }

    let mut out = Vec::new();
    for (neg, term) in terms {
        let mut coeff = Rational::one();
        let mut exps = vec![0i64; dim];
        for factor in term.split(|c: char| c == '*' || c.is_whitespace()).filter(|f| !f.is_empty()) {
            if factor.starts_with(|c: char| c.is_ascii_digit()) {
                // Allow `3x^2`: leading digits (and `/q`) then a variable.
                let split = factor
                    .find(|c: char| !(c.is_ascii_digit() || c == '/'))
                    .unwrap_or(factor.len());
                let (num, rest) = factor.split_at(split);
                coeff *= parse_rational(num).ok_or_else(|| err(format!("bad coefficient {num:?}")))?;
                if !rest.is_empty() {
                    apply_power(rest, &names, &mut exps).map_err(err)?;
                }
            } else {
                apply_power(factor, &names, &mut exps).map_err(err)?;
            }
        }
        if neg {
            coeff = -coeff;
        }
        out.push((exps, coeff));
    }
    LaurentPolynomial::from_terms(dim, out)
}

/// Applies a run of juxtaposed powers such as `x^-1y^2z`.
fn apply_power(factor: &str, names: &[String], exps: &mut [i64]) -> Result<(), String> {
    let mut rest = factor;
    while !rest.is_empty() {
        let (idx, name) = names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len())
            .ok_or_else(|| format!("unknown variable in {factor:?}"))?;
        rest = &rest[name.len()..];
        let mut pow = 1;
        if let Some(after) = rest.strip_prefix('^') {
            let digits_end = after
                .char_indices()
                .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && c == '-')))
                .map_or(after.len(), |(i, _)| i);
            pow = after[..digits_end]
                .parse::<i64>()
                .map_err(|_| format!("bad exponent in {factor:?}"))?;
            rest = &after[digits_end..];
        }
        exps[idx] += pow;
    }
    Ok(())
}

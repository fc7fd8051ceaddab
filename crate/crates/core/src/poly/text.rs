//! One term per line: `coeff * x^e * y`, highest monomial first, `0` for zero.

use std::fmt::Write as _;

use super::{var_list, Exponents, SparsePolynomial};
use crate::circuit::valid_ident;
use crate::error::{Error, Result};
use crate::field::Field;

pub fn format_polynomial(p: &SparsePolynomial) -> String {
    if p.is_zero() {
        return "0\n".to_string();
    }
    let mut out = String::new();
    for (e, c) in p.terms().iter().rev() {
        out.push_str(&c.to_string());
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => write!(out, " * {}", p.vars()[i]).unwrap(),
                _ => write!(out, " * {}^{}", p.vars()[i], k).unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

/// Parses the term-per-line format. Variables are ordered by first
/// appearance; blank lines and `#` comments are ignored.
pub fn parse_polynomial(text: &str, field: Field) -> Result<SparsePolynomial> {
    let mut vars: Vec<String> = Vec::new();
    let mut raw: Vec<(Vec<(usize, u32)>, crate::field::FieldElement)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::Syntax { line: lineno + 1, message: m.to_string() };
        let mut factors = line.split('*').map(str::trim);
        let first = factors.next().ok_or_else(|| bad("empty term"))?;
        let mut coeff = field.one();
        let mut powers = Vec::new();
        let mut pending = Some(first);
        if first.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+') {
            coeff = field.parse_literal(first)?;
            pending = None;
        }
        for f in pending.into_iter().chain(factors) {
            let (name, exp) = match f.split_once('^') {
                Some((n, k)) => (n.trim(), k.trim().parse::<u32>().map_err(|_| bad("bad exponent"))?),
                None => (f, 1),
            };
            if !valid_ident(name) {
                return Err(bad(&format!("bad factor `{f}`")));
            }
            let idx = match vars.iter().position(|v| v == name) {
                Some(i) => i,
                None => {
                    vars.push(name.to_string());
                    vars.len() - 1
                }
            };
            powers.push((idx, exp));
        }
        raw.push((powers, coeff));
    }
    let vars = var_list(&vars);
    let mut p = SparsePolynomial::zero(field, vars.clone());
    for (powers, c) in raw {
        let mut e: Exponents = vec![0; vars.len()];
        for (i, k) in powers {
            e[i] += k;
        }
        p.add_term(e, c);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_in_descending_order() {
        let q = Field::rationals();
        let p = parse_polynomial("1 * y^2\n-1 * x^3\n1\n x * y", q).unwrap();
        let text = format_polynomial(&p);
        assert_eq!(text, "1 * y^2\n1 * y * x\n-1 * x^3\n1\n");
        assert_eq!(parse_polynomial(&text, q).unwrap(), p);
    }

    #[test]
    fn zero_polynomial() {
        let q = Field::rationals();
        let z = parse_polynomial("0\n", q).unwrap();
        assert!(z.is_zero());
        assert_eq!(format_polynomial(&z), "0\n");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("2 * 3x", Field::rationals()).is_err());
        assert!(parse_polynomial("x^-1", Field::rationals()).is_err());
    }
}

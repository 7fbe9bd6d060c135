//! Plain-text polynomial format: `coeff * x1^a1 ... xn^an` terms joined by
//! ` + `, highest graded-lex term first. Zero exponents are omitted, the
//! zero polynomial is `0`, and a constant term is written as its coefficient.

use std::fmt;

use super::{Monomial, MultiPoly, PolyError};
use crate::field::Field;

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            let mut first = true;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                write!(f, "{}x{}^{}", if first { " * " } else { " " }, i + 1, e)?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Parses the text format back into a polynomial in `nvars` variables.
///
/// Also accepts `*` between factors, bare variables (`x2`), omitted
/// coefficients, and ` - ` as a separator.
pub fn parse_poly(field: Field, nvars: usize, s: &str) -> Result<MultiPoly, PolyError> {
    let normalized = s.replace(" - ", " + -1 * ");
    let mut p = MultiPoly::zero(field, nvars);
    if normalized.trim() == "0" {
        return Ok(p);
    }
    for term in normalized.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(PolyError::Parse(format!("empty term in {s:?}")));
        }
        let mut coeff = field.one();
        let mut exps = vec![0u32; nvars];
        for tok in term.split(|c: char| c == '*' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            if let Some(rest) = tok.strip_prefix('x') {
                let (idx, exp) = match rest.split_once('^') {
                    Some((i, e)) => (i, e),
                    None => (rest, "1"),
                };
                let idx: usize = idx
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("bad variable {tok:?}")))?;
                let exp: u32 = exp
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("bad exponent {tok:?}")))?;
                if idx == 0 || idx > nvars {
                    return Err(PolyError::Parse(format!("variable {tok:?} outside x1..x{nvars}")));
                }
                exps[idx - 1] += exp;
            } else {
                let c = field.parse_value(tok).map_err(|e| PolyError::Parse(e.to_string()))?;
                coeff *= &c;
            }
        }
        p.add_term(Monomial::new(&exps), &coeff);
    }
    Ok(p)
}

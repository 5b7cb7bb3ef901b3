//! A small recursive-descent parser for field expressions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary
//! primary := number | variable | '(' expr ')'
//! ```
//!
//! Variables are `x1..xn` (state) and `y1..ym` (perturbation), one-based in
//! the source text. Numeric literals are decimal (optionally with a fractional
//! part and an exponent); exact rationals such as `1/3` are written with the
//! division operator.

use super::expr::Expr;
use crate::{Error, Result};

/// Parses a scalar expression over `states` state variables and
/// `perturbs` perturbation variables.
///
/// Errors carry the byte offset of the offending token.
pub fn parse_expr(src: &str, states: usize, perturbs: usize) -> Result<Expr> {
    let mut p = Parser {
        bytes: src.as_bytes(),
        pos: 0,
        states,
        perturbs,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    states: usize,
    perturbs: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc / self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'x') => self.variable(false),
            Some(b'y') => self.variable(true),
            Some(_) => Err(self.error("expected a number, variable, or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut end = self.pos;
        let digits = |b: &mut usize, bytes: &[u8]| {
            while *b < bytes.len() && bytes[*b].is_ascii_digit() {
                *b += 1;
            }
        };
        digits(&mut end, self.bytes);
        if self.bytes.get(end) == Some(&b'.') {
            end += 1;
            digits(&mut end, self.bytes);
        }
        if matches!(self.bytes.get(end), Some(b'e') | Some(b'E')) {
            let mut exp_end = end + 1;
            if matches!(self.bytes.get(exp_end), Some(b'+') | Some(b'-')) {
                exp_end += 1;
            }
            let exp_digits_start = exp_end;
            digits(&mut exp_end, self.bytes);
            if exp_end > exp_digits_start {
                end = exp_end;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..end]).expect("ascii slice");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = end;
                Ok(Expr::Const(v))
            }
            _ => Err(self.error("invalid numeric literal")),
        }
    }

    fn variable(&mut self, perturbation: bool) -> Result<Expr> {
        let start = self.pos;
        let mut end = self.pos + 1;
        while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == self.pos + 1 {
            self.pos += 1;
            return Err(self.error("variable needs a one-based index, like x1 or y2"));
        }
        let text = std::str::from_utf8(&self.bytes[start + 1..end]).expect("ascii slice");
        let index: usize = text
            .parse()
            .map_err(|_| self.error("variable index out of range"))?;
        let limit = if perturbation {
            self.perturbs
        } else {
            self.states
        };
        if index == 0 || index > limit {
            let kind = if perturbation {
                "perturbation"
            } else {
                "state"
            };
            return Err(self.error(&format!(
                "{kind} variable index {index} outside 1..={limit}"
            )));
        }
        self.pos = end;
        Ok(if perturbation {
            Expr::Perturb(index - 1)
        } else {
            Expr::State(index - 1)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IVector;

    fn eval_at(e: &Expr, x: &[f64], y: &[f64]) -> f64 {
        e.eval(&IVector::point(x), &IVector::point(y))
            .unwrap()
            .mid()
    }

    #[test]
    fn parses_arithmetic_with_precedence() {
        let e = parse_expr("1 + 2 * 3 - 4 / 2", 0, 0).unwrap();
        assert_eq!(eval_at(&e, &[], &[]), 5.0);
    }

    #[test]
    fn parses_parentheses_and_unary_minus() {
        let e = parse_expr("-(x1 - 3) * -2", 1, 0).unwrap();
        assert_eq!(eval_at(&e, &[1.0], &[]), -4.0);
    }

    #[test]
    fn parses_variables_one_based() {
        let e = parse_expr("x2 + y1", 2, 1).unwrap();
        assert_eq!(e, Expr::state(1) + Expr::perturb(0));
    }

    #[test]
    fn parses_scientific_literals() {
        let e = parse_expr("2.5e-3 + 1E2", 0, 0).unwrap();
        assert_eq!(eval_at(&e, &[], &[]), 100.0025);
    }

    #[test]
    fn rational_constants_via_division() {
        let e = parse_expr("1/3", 0, 0).unwrap();
        let v = e.eval(&IVector::zeros(0), &IVector::zeros(0)).unwrap();
        assert!(v.contains(1.0 / 3.0));
        assert!(v.diam() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn rejects_out_of_range_variables() {
        let err = parse_expr("x1 + x4", 3, 0).unwrap_err();
        match err {
            Error::Parse { position, message } => {
                assert_eq!(position, 5);
                assert!(
                    message.contains("x") || message.contains("state"),
                    "{message}"
                );
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_expr("y1", 1, 0).is_err());
        assert!(parse_expr("x0", 1, 0).is_err());
    }

    #[test]
    fn rejects_malformed_input_with_position() {
        for (src, bad_pos) in [("1 +", 3), ("(x1", 3), ("x1 4", 3), ("x", 1)] {
            match parse_expr(src, 2, 0).unwrap_err() {
                Error::Parse { position, .. } => assert_eq!(position, bad_pos, "src={src:?}"),
                other => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn subtraction_is_left_associative() {
        let e = parse_expr("8 - 3 - 2", 0, 0).unwrap();
        assert_eq!(eval_at(&e, &[], &[]), 3.0);
    }
}

//! Closed-form field components: a small expression language over the chart
//! coordinates `x1..xn` with exact rational constants.
//!
//! Grammar (infix, usual precedence, `^` binds tightest):
//!
//! ```text
//! expression := term (('+' | '-') term)*
//! term       := factor (('*' | '/') factor)*
//! factor     := '-' factor | power
//! power      := atom ('^' uint)?
//! atom       := number | variable | '(' expression ')'
//! number     := digits ('.' digits)?        exact rational, e.g. 0.25 = 1/4
//! variable   := 'x' digits                  1-based: x1, x2, ...
//! ```
//!
//! Derivatives are symbolic; no finite-difference step tuning enters the
//! Jacobians used for index computations.

use crate::error::{Error, Result};
use crate::rational::Rational;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Rational),
    /// 0-based variable index; `x1` parses to `Var(0)`.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        Parser::new(src).parse()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let v = self.eval_inner(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval {
                message: format!("non-finite value at {x:?}"),
            })
        }
    }

    fn eval_inner(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c.numer() as f64 / *c.denom() as f64,
            Expr::Var(i) => *x.get(*i).ok_or_else(|| Error::Eval {
                message: format!("variable x{} out of range for dimension {}", i + 1, x.len()),
            })?,
            Expr::Add(a, b) => a.eval_inner(x)? + b.eval_inner(x)?,
            Expr::Sub(a, b) => a.eval_inner(x)? - b.eval_inner(x)?,
            Expr::Mul(a, b) => a.eval_inner(x)? * b.eval_inner(x)?,
            Expr::Div(a, b) => {
                let d = b.eval_inner(x)?;
                if d == 0.0 {
                    return Err(Error::Eval {
                        message: format!("division by zero at {x:?}"),
                    });
                }
                a.eval_inner(x)? / d
            }
            Expr::Neg(a) => -a.eval_inner(x)?,
            Expr::Pow(a, k) => a.eval_inner(x)?.powi(*k as i32),
        })
    }

    /// Symbolic partial derivative with respect to variable `var` (0-based).
    pub fn diff(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(a, b) => add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => add(
                mul(a.diff(var), (**b).clone()),
                mul((**a).clone(), b.diff(var)),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = (a'b - ab') / b^2
                let num = sub(
                    mul(a.diff(var), (**b).clone()),
                    mul((**a).clone(), b.diff(var)),
                );
                div(num, pow((**b).clone(), 2))
            }
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Pow(a, k) => {
                if *k == 0 {
                    Expr::zero()
                } else {
                    // (a^k)' = k a^(k-1) a'
                    mul(
                        mul(
                            Expr::Const(Rational::from_integer(*k as i64)),
                            pow((**a).clone(), k - 1),
                        ),
                        a.diff(var),
                    )
                }
            }
        }
    }

    pub fn zero() -> Expr {
        Expr::Const(Rational::from_integer(0))
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::from_integer(1))
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.numer() == &0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c == &Rational::from_integer(1))
    }

    /// Highest variable index used, plus one. A constant expression reports 0.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
            Expr::Neg(a) => a.arity(),
            Expr::Pow(a, _) => a.arity(),
        }
    }
}

// Simplifying constructors keep symbolic Jacobians small. They fold constants
// and strip additive/multiplicative identities; nothing deeper is attempted.

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, b) if a.is_zero() => b,
        (a, b) if b.is_zero() => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, b) if b.is_zero() => a,
        (a, b) if a.is_zero() => neg(b),
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, _) if a.is_zero() => Expr::zero(),
        (_, b) if b.is_zero() => Expr::zero(),
        (a, b) if a.is_one() => b,
        (a, b) if b.is_one() => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, b) if a.is_zero() && !b.is_zero() => Expr::zero(),
        (a, b) if b.is_one() => a,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        a if a.is_zero() => Expr::zero(),
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn pow(a: Expr, k: u32) -> Expr {
    match k {
        0 => Expr::one(),
        1 => a,
        _ => Expr::Pow(Box::new(a), k),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                // Negative constants are parenthesized so the rendered text
                // reparses with the same binding (-1^2 would mean -(1^2)).
                if c.denom() == &1 {
                    if c.numer() < &0 {
                        write!(f, "({})", c.numer())
                    } else {
                        write!(f, "{}", c.numer())
                    }
                } else {
                    write!(f, "({}/{})", c.numer(), c.denom())
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, b) => write!(f, "({} / {})", a, b),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Pow(a, k) => write!(f, "({}^{})", a, k),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn parse(mut self) -> Result<Expr> {
        let e = self.expression()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing input"));
        }
        Ok(e)
    }

    fn err(&self, message: &str) -> Error {
        Error::ExprParse {
            at: self.pos,
            message: message.to_string(),
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

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.uint()? as u32;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expression()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                let idx = self.uint()?;
                if idx == 0 {
                    return Err(self.err("variables are 1-based: x1, x2, ..."));
                }
                Ok(Expr::Var(idx as usize - 1))
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            _ => Err(self.err("expected a number, variable, or `(`")),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn number(&mut self) -> Result<Expr> {
        let whole = self.uint()? as i64;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let start = self.pos;
            let frac = self.uint()? as i64;
            let digits = (self.pos - start) as u32;
            let den = 10i64
                .checked_pow(digits)
                .ok_or_else(|| self.err("too many decimal digits"))?;
            let value = Rational::from_integer(whole) + Rational::new(frac, den);
            return Ok(Expr::Const(value));
        }
        Ok(Expr::Const(Rational::from_integer(whole)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(src: &str, x: &[f64]) -> f64 {
        Expr::parse(src).unwrap().evaluate(x).unwrap()
    }

    #[test]
    fn parses_with_usual_precedence() {
        assert_eq!(eval("1 + 2 * 3", &[]), 7.0);
        assert_eq!(eval("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(eval("-x1^2", &[3.0]), -9.0);
        assert_eq!(eval("2 * x1 - x2 / 4", &[1.0, 8.0]), 0.0);
        assert_eq!(eval("0.25 * x1", &[8.0]), 2.0);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Expr::parse("x0").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("y1").is_err());
        assert!(Expr::parse("x1^x2").is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = Expr::parse("1 / x1").unwrap();
        assert!(e.evaluate(&[0.0]).is_err());
        assert_eq!(e.evaluate(&[2.0]).unwrap(), 0.5);
    }

    #[test]
    fn derivative_of_saddle_components() {
        let fx = Expr::parse("x1").unwrap();
        let fy = Expr::parse("-x2").unwrap();
        assert_eq!(fx.diff(0).evaluate(&[5.0, 5.0]).unwrap(), 1.0);
        assert_eq!(fx.diff(1).evaluate(&[5.0, 5.0]).unwrap(), 0.0);
        assert_eq!(fy.diff(1).evaluate(&[5.0, 5.0]).unwrap(), -1.0);
    }

    #[test]
    fn derivative_of_quotient_matches_hand_result() {
        // d/dx (x^2 / (1 + x)) = (x^2 + 2x) / (1 + x)^2
        let e = Expr::parse("x1^2 / (1 + x1)").unwrap();
        let d = e.diff(0);
        let x = 3.0;
        let expected = (x * x + 2.0 * x) / ((1.0 + x) * (1.0 + x));
        assert!((d.evaluate(&[x]).unwrap() - expected).abs() < 1e-12);
    }

    // Random polynomial expressions (no division, so finite differences are
    // a trustworthy oracle for the symbolic derivative).
    fn arb_poly(depth: u32) -> BoxedStrategy<Expr> {
        let leaf = prop_oneof![
            (-4i64..5).prop_map(|n| Expr::Const(Rational::from_integer(n))),
            (0usize..2).prop_map(Expr::Var),
        ];
        leaf.prop_recursive(depth, 64, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner, 0u32..4).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            ]
        })
        .boxed()
    }

    proptest! {
        #[test]
        fn symbolic_derivative_matches_central_difference(
            e in arb_poly(3),
            x in -1.5f64..1.5,
            y in -1.5f64..1.5,
        ) {
            let h = 1e-5;
            let d = e.diff(0);
            let at = [x, y];
            let fd = (e.evaluate(&[x + h, y]).unwrap() - e.evaluate(&[x - h, y]).unwrap()) / (2.0 * h);
            let sym = d.evaluate(&at).unwrap();
            let scale = 1.0 + fd.abs().max(sym.abs());
            prop_assert!((sym - fd).abs() / scale < 1e-4, "sym {sym} vs fd {fd}");
        }

        #[test]
        fn display_then_parse_preserves_values(
            e in arb_poly(3),
            x in -1.5f64..1.5,
            y in -1.5f64..1.5,
        ) {
            let reparsed = Expr::parse(&e.to_string()).unwrap();
            let a = e.evaluate(&[x, y]).unwrap();
            let b = reparsed.evaluate(&[x, y]).unwrap();
            let scale = 1.0 + a.abs();
            prop_assert!((a - b).abs() / scale < 1e-12);
        }
    }
}

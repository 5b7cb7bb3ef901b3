//! Expression trees for vector-field components.
//!
//! One tree serves three purposes: interval evaluation (which automatically
//! yields enclosures of the pointwise image), symbolic differentiation, and
//! Taylor-coefficient recursion through jet arithmetic.

use crate::interval::Interval;
use crate::linalg::IVector;
use crate::{Error, Result};
use std::fmt;
use std::ops;

/// A scalar expression over state variables `x1..xn`, perturbation
/// variables `y1..ym`, constants, and `{+, -, *, /}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based state variable index.
    State(usize),
    /// Zero-based perturbation variable index.
    Perturb(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

/// A differentiation target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    State(usize),
    Perturb(usize),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// The state variable `x_{i+1}` (zero-based index).
    pub fn state(i: usize) -> Expr {
        Expr::State(i)
    }

    /// The perturbation variable `y_{j+1}` (zero-based index).
    pub fn perturb(j: usize) -> Expr {
        Expr::Perturb(j)
    }

    /// Interval evaluation; encloses the pointwise image over the boxes.
    pub fn eval(&self, x: &IVector, y: &IVector) -> Result<Interval> {
        Ok(match self {
            Expr::Const(c) => Interval::point(*c),
            Expr::State(i) => x[*i],
            Expr::Perturb(j) => y[*j],
            Expr::Neg(a) => -a.eval(x, y)?,
            Expr::Add(a, b) => a.eval(x, y)? + b.eval(x, y)?,
            Expr::Sub(a, b) => a.eval(x, y)? - b.eval(x, y)?,
            Expr::Mul(a, b) => a.eval(x, y)? * b.eval(x, y)?,
            Expr::Div(a, b) => a
                .eval(x, y)?
                .checked_div(b.eval(x, y)?)
                .map_err(|_| DIV_DOMAIN)?,
        })
    }

    /// Symbolic partial derivative with light structural simplification.
    pub fn diff(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::State(i) => Expr::Const(if v == Var::State(*i) { 1.0 } else { 0.0 }),
            Expr::Perturb(j) => Expr::Const(if v == Var::Perturb(*j) { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(v)),
            Expr::Add(a, b) => add(a.diff(v), b.diff(v)),
            Expr::Sub(a, b) => sub(a.diff(v), b.diff(v)),
            Expr::Mul(a, b) => add(mul(a.diff(v), (**b).clone()), mul((**a).clone(), b.diff(v))),
            // (a/b)' = (a'·b − a·b') / b²
            Expr::Div(a, b) => Expr::Div(
                Box::new(sub(
                    mul(a.diff(v), (**b).clone()),
                    mul((**a).clone(), b.diff(v)),
                )),
                Box::new(mul((**b).clone(), (**b).clone())),
            ),
        }
    }

    /// Largest zero-based state index used, if any.
    pub fn max_state(&self) -> Option<usize> {
        self.fold_max(&|e| match e {
            Expr::State(i) => Some(*i),
            _ => None,
        })
    }

    /// Largest zero-based perturbation index used, if any.
    pub fn max_perturb(&self) -> Option<usize> {
        self.fold_max(&|e| match e {
            Expr::Perturb(j) => Some(*j),
            _ => None,
        })
    }

    fn fold_max(&self, pick: &impl Fn(&Expr) -> Option<usize>) -> Option<usize> {
        let local = pick(self);
        let inner = match self {
            Expr::Const(_) | Expr::State(_) | Expr::Perturb(_) => None,
            Expr::Neg(a) => a.fold_max(pick),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                opt_max(a.fold_max(pick), b.fold_max(pick))
            }
        };
        opt_max(local, inner)
    }
}

pub(crate) const DIV_DOMAIN: Error =
    Error::Domain("division by an interval containing zero during evaluation");

fn opt_max(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::Add(Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::Sub(Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Const(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::State(i) => write!(f, "x{}", i + 1),
            Expr::Perturb(j) => write!(f, "y{}", j + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

//! Truncated Taylor series ("jets") with interval coefficients.
//!
//! A jet stores the normalized coefficients `c[k] = x^{(k)}(t0) / k!` of a
//! scalar function of time, truncated at a fixed order. Arithmetic on jets
//! mirrors arithmetic on the underlying functions, so propagating the state
//! variables' jets through a field expression yields the jets of the field
//! components — the engine behind automatic Taylor-coefficient generation.

use super::expr::{Expr, DIV_DOMAIN};
use crate::interval::Interval;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Jet {
    /// `c[k]` is the k-th normalized Taylor coefficient.
    pub c: Vec<Interval>,
}

impl Jet {
    /// The jet of the constant function `v`, truncated at `len - 1`.
    pub fn constant(v: Interval, len: usize) -> Jet {
        let mut c = vec![Interval::zero(); len];
        c[0] = v;
        Jet { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    fn add(&self, rhs: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| *a + *b).collect(),
        }
    }

    fn sub(&self, rhs: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| *a - *b).collect(),
        }
    }

    fn neg(&self) -> Jet {
        Jet {
            c: self.c.iter().map(|a| -*a).collect(),
        }
    }

    /// Cauchy product truncated to the common length.
    fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.len().min(rhs.len());
        let mut c = vec![Interval::zero(); n];
        for (k, slot) in c.iter_mut().enumerate() {
            let mut acc = Interval::zero();
            for i in 0..=k {
                acc = acc + self.c[i] * rhs.c[k - i];
            }
            *slot = acc;
        }
        Jet { c }
    }

    /// Quotient jet: solves `q * rhs = self` coefficient by coefficient.
    ///
    /// Fails when the leading coefficient of `rhs` contains zero.
    #[allow(clippy::needless_range_loop)] // convolution indexes q[i] and rhs.c[k-i]
    fn div(&self, rhs: &Jet) -> Result<Jet> {
        let n = self.len().min(rhs.len());
        let mut q = vec![Interval::zero(); n];
        for k in 0..n {
            let mut acc = self.c[k];
            for i in 0..k {
                acc = acc - q[i] * rhs.c[k - i];
            }
            q[k] = acc.checked_div(rhs.c[0]).map_err(|_| DIV_DOMAIN)?;
        }
        Ok(Jet { c: q })
    }
}

impl Expr {
    /// Propagates jets of the state and perturbation variables through the
    /// expression. All jets must share the same length.
    pub(crate) fn eval_jet(&self, x: &[Jet], y: &[Jet], len: usize) -> Result<Jet> {
        Ok(match self {
            Expr::Const(c) => Jet::constant(Interval::point(*c), len),
            Expr::State(i) => x[*i].clone(),
            Expr::Perturb(j) => y[*j].clone(),
            Expr::Neg(a) => a.eval_jet(x, y, len)?.neg(),
            Expr::Add(a, b) => a.eval_jet(x, y, len)?.add(&b.eval_jet(x, y, len)?),
            Expr::Sub(a, b) => a.eval_jet(x, y, len)?.sub(&b.eval_jet(x, y, len)?),
            Expr::Mul(a, b) => a.eval_jet(x, y, len)?.mul(&b.eval_jet(x, y, len)?),
            Expr::Div(a, b) => a.eval_jet(x, y, len)?.div(&b.eval_jet(x, y, len)?)?,
        })
    }
}

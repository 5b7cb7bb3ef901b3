//! Closed intervals of binary64 numbers with outward rounding.
//!
//! Every operation returns an interval that contains the exact real image of
//! its operands, so chains of operations yield mathematically valid
//! enclosures. Endpoint rounding is handled by the error-free primitives in
//! [`crate::round`]: results of `+`, `-`, `*` are exact whenever the real
//! result is representable, and otherwise off by at most one ulp per
//! endpoint.

use crate::round;
use crate::{Error, Result};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A closed interval `[lo, hi]` with `lo <= hi` and no NaN endpoints.
///
/// Infinite endpoints are allowed so "whole line" values can be expressed,
/// but none of the library's algorithms produce them from finite inputs.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`. Panics if `lo > hi` or an endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval endpoints [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not a valid interval point");
        Interval { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Interval { lo: 0.0, hi: 0.0 }
    }

    pub fn one() -> Self {
        Interval { lo: 1.0, hi: 1.0 }
    }

    /// `[x - r, x + r]` with outward rounding; `r >= 0`.
    pub fn centered(x: f64, r: f64) -> Self {
        assert!(r >= 0.0, "radius must be nonnegative, got {r}");
        Interval {
            lo: round::sub_down(x, r),
            hi: round::add_up(x, r),
        }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    /// A midpoint guaranteed to lie inside the interval.
    pub fn mid(self) -> f64 {
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            return 0.0;
        }
        if self.lo == f64::NEG_INFINITY {
            return self.hi;
        }
        if self.hi == f64::INFINITY {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Width `hi - lo`, rounded up.
    pub fn diam(self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    /// Magnitude: the largest absolute value of any point in the interval.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Mignitude: the smallest absolute value of any point in the interval.
    pub fn mig(self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// Enclosure of `{|x| : x in self}`, i.e. `[mig, mag]`.
    pub fn abs(self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    /// Non-strict set inclusion `self ⊆ other`.
    pub fn subset(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Smallest interval containing both operands.
    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Widens both endpoints outward by the absolute amount `eps >= 0`.
    pub fn widen(self, eps: f64) -> Interval {
        debug_assert!(eps >= 0.0);
        Interval {
            lo: round::sub_down(self.lo, eps),
            hi: round::add_up(self.hi, eps),
        }
    }

    /// Scales the interval about its midpoint by `factor >= 1` and widens by
    /// `eps`; the result contains the original.
    pub fn inflate(self, factor: f64, eps: f64) -> Interval {
        debug_assert!(factor >= 1.0);
        let m = Interval::point(self.mid());
        let scaled = m + Interval::point(factor) * (self - m);
        self.hull(scaled).widen(eps)
    }

    /// Division; errors when the denominator contains zero.
    pub fn checked_div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = [
            (
                round::div_down(self.lo, rhs.lo),
                round::div_up(self.lo, rhs.lo),
            ),
            (
                round::div_down(self.lo, rhs.hi),
                round::div_up(self.lo, rhs.hi),
            ),
            (
                round::div_down(self.hi, rhs.lo),
                round::div_up(self.hi, rhs.lo),
            ),
            (
                round::div_down(self.hi, rhs.hi),
                round::div_up(self.hi, rhs.hi),
            ),
        ];
        Ok(Interval {
            lo: c.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
            hi: c.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Enclosure of `{x^2 : x in self}`; tighter than `self * self`.
    pub fn sq(self) -> Interval {
        let (mig, mag) = (self.mig(), self.mag());
        Interval {
            lo: round::mul_down(mig, mig),
            hi: round::mul_up(mag, mag),
        }
    }

    /// Enclosure of `{sqrt(x) : x in self}`; errors when `lo < 0`.
    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::Domain("square root of a negative interval"));
        }
        Ok(Interval {
            lo: round::sqrt_down(self.lo),
            hi: round::sqrt_up(self.hi),
        })
    }

    /// Rigorous enclosure of `{e^x : x in self}`.
    pub fn exp(self) -> Interval {
        Interval {
            lo: exp_point(self.lo).lo,
            hi: exp_point(self.hi).hi,
        }
    }
}

/// Encloses `e^t` for a single double `t` by summing the Taylor series in
/// interval arithmetic with a geometric tail bound.
fn exp_point(t: f64) -> Interval {
    if t >= 710.0 {
        // e^710 overflows; fall back to the value at 710's lower bound.
        return Interval::new(exp_point(709.0).lo, f64::INFINITY);
    }
    if t <= -710.0 {
        return Interval::new(0.0, exp_point(-709.0).hi);
    }
    let ti = Interval::point(t);
    let mut term = Interval::one();
    let mut sum = Interval::one();
    let mut k = 1usize;
    loop {
        term = (term * ti)
            .checked_div(Interval::point(k as f64))
            .expect("nonzero integer divisor");
        sum = sum + term;
        // Once the term ratio |t|/(k+1) drops below 1/2, the remaining terms
        // are dominated by a geometric series.
        let ratio = Interval::point(t.abs())
            .checked_div(Interval::point((k + 1) as f64))
            .expect("nonzero integer divisor");
        if ratio.hi() <= 0.5 && (term.mag() <= sum.mag() * 1e-18 || k > 1500) {
            let q = Interval::point(ratio.hi());
            let tail = (Interval::point(term.mag()) * q)
                .checked_div(Interval::one() - q)
                .expect("denominator >= 1/2");
            sum = sum + Interval::new(-tail.hi(), tail.hi());
            break;
        }
        k += 1;
        assert!(k < 4000, "exponential series failed to converge");
    }
    // e^t is positive regardless of rounding noise.
    Interval::new(sum.lo().max(0.0), sum.hi())
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::add_down(self.lo, rhs.lo),
            hi: round::add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::sub_down(self.lo, rhs.hi),
            hi: round::sub_up(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let pairs = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in pairs {
            lo = lo.min(round::mul_down(a, b));
            hi = hi.max(round::mul_up(a, b));
        }
        Interval { lo, hi }
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::point(self) * rhs
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

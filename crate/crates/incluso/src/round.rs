//! Directed rounding for binary64 built from error-free transformations.
//!
//! Rust gives no portable access to the hardware rounding mode, so each
//! primitive computes the nearest-rounded result together with an exact or
//! sign-correct residual and then nudges the result one ulp outward only
//! when the residual shows the nearest rounding fell on the wrong side.
//! Addition, subtraction and multiplication are therefore *exact* whenever
//! the true result is representable; division and square root give up at
//! most one ulp.

/// Largest double `<=` the true sum `a + b`.
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == f64::INFINITY {
        // The nearest rounding only overflows when the true sum exceeds
        // f64::MAX, unless an operand was already infinite.
        return if a == f64::INFINITY || b == f64::INFINITY {
            s
        } else {
            f64::MAX
        };
    }
    if s == f64::NEG_INFINITY {
        return s;
    }
    match two_sum_err(s, a, b) {
        Some(e) if e >= 0.0 => s,
        _ => s.next_down(),
    }
}

/// Smallest double `>=` the true sum `a + b`.
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == f64::NEG_INFINITY {
        return if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
            s
        } else {
            f64::MIN
        };
    }
    if s == f64::INFINITY {
        return s;
    }
    match two_sum_err(s, a, b) {
        Some(e) if e <= 0.0 => s,
        _ => s.next_up(),
    }
}

/// TwoSum residual: returns `Some(a + b - s)` exactly, or `None` when an
/// intermediate overflowed and the residual cannot be trusted.
fn two_sum_err(s: f64, a: f64, b: f64) -> Option<f64> {
    let a1 = s - b;
    let b1 = s - a1;
    let e = (a - a1) + (b - b1);
    e.is_finite().then_some(e)
}

pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Largest double `<=` the true product `a * b`.
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    // An exact zero factor gives an exact zero product; this also fixes the
    // endpoint convention 0 * inf = 0 used by interval multiplication.
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p == f64::INFINITY {
        return if a.is_infinite() || b.is_infinite() {
            p
        } else {
            f64::MAX
        };
    }
    if p == f64::NEG_INFINITY {
        return p;
    }
    if p.abs() < RESIDUAL_SAFE {
        // Near the underflow range the fused residual may itself round and
        // lose its sign; widen blindly instead of trusting it.
        return p.next_down();
    }
    let e = a.mul_add(b, -p);
    if e >= 0.0 {
        p
    } else {
        p.next_down()
    }
}

/// Below this magnitude the error term of a product (or squared root) may
/// fall inside the subnormal range where the fused residual is inexact.
const RESIDUAL_SAFE: f64 = 1e-290;

/// Smallest double `>=` the true product `a * b`.
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p == f64::NEG_INFINITY {
        return if a.is_infinite() || b.is_infinite() {
            p
        } else {
            f64::MIN
        };
    }
    if p == f64::INFINITY {
        return p;
    }
    if p.abs() < RESIDUAL_SAFE {
        return p.next_up();
    }
    let e = a.mul_add(b, -p);
    if e <= 0.0 {
        p
    } else {
        p.next_up()
    }
}

/// Largest double `<=` the true quotient `a / b` (`b != 0`).
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q == f64::INFINITY {
        return if a.is_infinite() { q } else { f64::MAX };
    }
    if q == f64::NEG_INFINITY {
        return q;
    }
    q.next_down()
}

/// Smallest double `>=` the true quotient `a / b` (`b != 0`).
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q == f64::NEG_INFINITY {
        return if a.is_infinite() { q } else { f64::MIN };
    }
    if q == f64::INFINITY {
        return q;
    }
    q.next_up()
}

/// Largest double `<=` the true square root of `a` (`a >= 0`).
pub(crate) fn sqrt_down(a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    if a == 0.0 {
        return 0.0;
    }
    let s = a.sqrt();
    if a < RESIDUAL_SAFE || !s.is_finite() {
        return s.next_down().max(0.0);
    }
    // Away from the underflow range s*s - a is computed exactly by the fused
    // multiply-add, so the sign tells on which side of the true root s lies.
    let e = s.mul_add(s, -a);
    if e > 0.0 {
        s.next_down()
    } else {
        s
    }
}

/// Smallest double `>=` the true square root of `a` (`a >= 0`).
pub(crate) fn sqrt_up(a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    if a == 0.0 {
        return 0.0;
    }
    let s = a.sqrt();
    if a < RESIDUAL_SAFE || !s.is_finite() {
        return s.next_up();
    }
    let e = s.mul_add(s, -a);
    if e < 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_stay_exact() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(1.0, 3.0), 4.0);
        assert_eq!(sub_down(0.5, 0.25), 0.25);
        assert_eq!(sub_up(0.5, 0.25), 0.25);
        assert_eq!(mul_down(3.0, -4.0), -12.0);
        assert_eq!(mul_up(3.0, -4.0), -12.0);
        assert_eq!(add_down(0.1, 0.0), 0.1);
        assert_eq!(mul_up(0.1, 1.0), 0.1);
    }

    #[test]
    fn inexact_operations_bracket_the_truth() {
        // 0.1 + 0.2 is famously inexact.
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert!(lo < hi);
        assert_eq!(hi, lo.next_up());
        assert!(lo <= 0.3 && 0.3 <= hi);

        let lo = mul_down(0.1, 0.1);
        let hi = mul_up(0.1, 0.1);
        assert!(lo < hi && lo <= 0.01 && 0.01 <= hi);
    }

    #[test]
    fn division_brackets_one_third() {
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert!(lo < hi);
        // lo < 1/3 < hi checked in exact integer arithmetic: for a double
        // m * 2^-e the comparison 3m 2^-e < 1 is 3m < 2^e.
        fn times3_vs_pow2(x: f64) -> std::cmp::Ordering {
            let bits = x.to_bits();
            let exp = ((bits >> 52) & 0x7ff) as i64 - 1075;
            let mant = (bits & ((1 << 52) - 1)) | (1 << 52);
            let three_m = 3u128 * mant as u128;
            assert!((-128..0).contains(&exp));
            three_m.cmp(&(1u128 << (-exp) as u32))
        }
        assert_eq!(times3_vs_pow2(lo), std::cmp::Ordering::Less);
        assert_eq!(times3_vs_pow2(hi), std::cmp::Ordering::Greater);
    }

    #[test]
    fn sqrt_brackets_and_exactness() {
        assert_eq!(sqrt_down(4.0), 2.0);
        assert_eq!(sqrt_up(4.0), 2.0);
        let lo = sqrt_down(2.0);
        let hi = sqrt_up(2.0);
        assert!(lo < hi);
        assert!(lo * lo < 2.0 && hi * hi > 2.0);
    }

    #[test]
    fn overflow_saturates_on_the_safe_side() {
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(mul_down(1e300, 1e300), f64::MAX);
        assert_eq!(mul_up(1e300, 1e300), f64::INFINITY);
        assert_eq!(mul_up(-1e300, 1e300), f64::MIN);
        assert_eq!(add_down(f64::NEG_INFINITY, 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn underflow_is_bracketed() {
        let tiny = f64::MIN_POSITIVE;
        let lo = mul_down(tiny, 0.5);
        let hi = mul_up(tiny, 0.5);
        assert!(lo < hi);
        assert!(lo <= tiny / 2.0 && tiny / 2.0 <= hi);
        // A product that rounds to zero still gets a nonzero upper bound.
        let lo = mul_down(5e-324, 0.25);
        let hi = mul_up(5e-324, 0.25);
        assert!(lo <= 0.0 && hi > 0.0);
    }

    #[test]
    fn directed_bounds_hold_on_random_pairs() {
        // Deterministic xorshift so the test needs no external crate.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            f64::from_bits((state >> 12) | (1023u64 << 52)) - 1.5 // in [-0.5, 0.5)
        };
        for _ in 0..10_000 {
            let a = next() * 1e3;
            let b = next() * 1e3;
            assert!(add_down(a, b) <= add_up(a, b));
            assert!(add_up(a, b) - add_down(a, b) <= f64::EPSILON * (a + b).abs().max(1.0));
            assert!(mul_down(a, b) <= a * b && a * b <= mul_up(a, b));
            if b != 0.0 {
                assert!(div_down(a, b) <= a / b && a / b <= div_up(a, b));
            }
        }
    }
}

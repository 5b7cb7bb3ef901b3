//! Plain floating-point reference integrators.
//!
//! These are deliberately non-rigorous: classical Runge–Kutta plus Richardson
//! extrapolation, used by the test suites to cross-check that guaranteed
//! enclosures actually contain accurate point trajectories. Nothing here
//! carries error bounds.

/// One classical fourth-order Runge–Kutta step for `x' = f(t, x)`.
pub fn rk4_step<F>(f: &F, t: f64, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let n = x.len();
    let k1 = f(t, x);
    let stage =
        |k: &[f64], scale: f64| -> Vec<f64> { (0..n).map(|i| x[i] + scale * h * k[i]).collect() };
    let k2 = f(t + 0.5 * h, &stage(&k1, 0.5));
    let k3 = f(t + 0.5 * h, &stage(&k2, 0.5));
    let k4 = f(t + h, &stage(&k3, 1.0));
    (0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates `x' = f(t, x)` from `t0` over `steps` equal steps of size `h`.
pub fn rk4_integrate<F>(f: &F, t0: f64, x0: &[f64], h: f64, steps: usize) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let mut x = x0.to_vec();
    let mut t = t0;
    for _ in 0..steps {
        x = rk4_step(f, t, &x, h);
        t += h;
    }
    x
}

/// Richardson-extrapolated endpoint value at `t1`: runs `base_steps` and
/// `2 · base_steps` Runge–Kutta steps and cancels the leading `O(h⁴)` error
/// term, giving a fifth-order reference value.
pub fn richardson<F>(f: &F, t0: f64, x0: &[f64], t1: f64, base_steps: usize) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    assert!(base_steps > 0);
    let h1 = (t1 - t0) / base_steps as f64;
    let coarse = rk4_integrate(f, t0, x0, h1, base_steps);
    let fine = rk4_integrate(f, t0, x0, h1 / 2.0, 2 * base_steps);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, fv)| fv + (fv - c) / 15.0)
        .collect()
}

/// Integrates until the trajectory crosses the hyperplane `⟨normal, x⟩ =
/// offset` in the increasing direction, then refines the crossing by
/// bisection on the final partial step. The trajectory must first visit the
/// negative side (`⟨normal, x⟩ < offset`) before a crossing is accepted, so
/// starting exactly on the section is fine.
///
/// Returns `(t_cross, x_cross)`, or `None` if no crossing occurs within
/// `max_steps` whole steps.
pub fn section_crossing<F>(
    f: &F,
    t0: f64,
    x0: &[f64],
    h: f64,
    normal: &[f64],
    offset: f64,
    max_steps: usize,
) -> Option<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let alpha =
        |x: &[f64]| -> f64 { x.iter().zip(normal).map(|(xi, ni)| xi * ni).sum::<f64>() - offset };
    let mut x = x0.to_vec();
    let mut t = t0;
    let mut armed = false;
    for _ in 0..max_steps {
        let a0 = alpha(&x);
        if a0 < 0.0 {
            armed = true;
        }
        let next = rk4_step(f, t, &x, h);
        let a1 = alpha(&next);
        if armed && a0 < 0.0 && a1 >= 0.0 {
            // Bisect the step fraction for the crossing.
            let (mut lo, mut hi) = (0.0f64, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let xm = rk4_step(f, t, &x, mid);
                if alpha(&xm) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let xc = rk4_step(f, t, &x, hi);
            return Some((t + hi, xc));
        }
        x = next;
        t += h;
    }
    None
}

/// Reference value of `∫₀ʰ e^{J(h−s)} C ds` by a plain floating-point
/// power series: `h · Σ_{m=0}^{terms} (Jh)ᵐ/(m+1)! · C`. `j` is row-major
/// `n × n`. With `‖Jh‖ ≤ 1` and 50 terms the truncation error is far below
/// machine precision.
pub fn exp_integral_series(j: &[f64], n: usize, c: &[f64], h: f64, terms: usize) -> Vec<f64> {
    assert_eq!(j.len(), n * n);
    assert_eq!(c.len(), n);
    let mut a: Vec<f64> = (0..n * n)
        .map(|k| if k / n == k % n { 1.0 } else { 0.0 })
        .collect();
    let mut sum = a.clone();
    for m in 0..terms {
        let mut next = vec![0.0; n * n];
        for r in 0..n {
            for cc in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += a[r * n + k] * j[k * n + cc] * h;
                }
                next[r * n + cc] = acc / (m + 2) as f64;
            }
        }
        a = next;
        for (s, v) in sum.iter_mut().zip(&a) {
            *s += v;
        }
    }
    (0..n)
        .map(|r| h * (0..n).map(|k| sum[r * n + k] * c[k]).sum::<f64>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_field(_t: f64, x: &[f64]) -> Vec<f64> {
        vec![x[0]]
    }

    fn oscillator(_t: f64, x: &[f64]) -> Vec<f64> {
        vec![x[1], -x[0]]
    }

    #[test]
    fn rk4_matches_exponential() {
        let x = rk4_integrate(&exp_field, 0.0, &[1.0], 0.01, 100);
        assert!((x[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn rk4_matches_cosine() {
        let x = rk4_integrate(&oscillator, 0.0, &[1.0, 0.0], 0.01, 100);
        assert!((x[0] - 1.0f64.cos()).abs() < 1e-9);
        assert!((x[1] + 1.0f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn richardson_beats_plain_rk4() {
        let plain = rk4_integrate(&exp_field, 0.0, &[1.0], 0.1, 10);
        let extra = richardson(&exp_field, 0.0, &[1.0], 1.0, 10);
        let e = std::f64::consts::E;
        assert!((extra[0] - e).abs() < (plain[0] - e).abs() / 10.0);
        assert!((extra[0] - e).abs() < 1e-8);
    }

    #[test]
    fn oscillator_crossing_at_pi() {
        // Start at (1, 0): x1(t) = cos t crosses x1 = 0 upward at t = 3π/2;
        // section ⟨(1,0), x⟩ = 0 with increasing x1.
        let (t, x) = section_crossing(&oscillator, 0.0, &[1.0, 0.0], 0.01, &[1.0, 0.0], 0.0, 1000)
            .expect("crossing exists");
        assert!((t - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-5);
        assert!(x[0].abs() < 1e-9);
        assert!((x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn series_integral_matches_scalar_closed_form() {
        // ∫₀ʰ e^{l(h−s)} c ds = c (e^{lh} − 1)/l.
        for (l, c, h) in [(0.9, 2.0, 0.8), (-1.5, 0.3, 0.5)] {
            let got = exp_integral_series(&[l], 1, &[c], h, 50);
            let want = c * ((l * h).exp() - 1.0) / l;
            assert!((got[0] - want).abs() < 1e-14 * want.abs(), "{got:?}");
        }
        // Coupled symmetric case: (ε(cosh h − 1), ε sinh h).
        let got = exp_integral_series(&[0.0, 1.0, 1.0, 0.0], 2, &[0.0, 0.1], 0.7, 50);
        assert!((got[0] - 0.1 * (0.7f64.cosh() - 1.0)).abs() < 1e-15);
        assert!((got[1] - 0.1 * 0.7f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn crossing_requires_visiting_negative_side() {
        // A trajectory that never leaves the positive side yields no crossing.
        let (..) = match section_crossing(&exp_field, 0.0, &[1.0], 0.1, &[1.0], 0.0, 100) {
            None => ((), ()),
            Some(_) => panic!("unexpected crossing"),
        };
    }
}

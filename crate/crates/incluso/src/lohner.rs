//! Structured set representations and the guaranteed Taylor step for the
//! flow with the perturbation input frozen at a reference selection.
//!
//! A step has three movable parts: an a-priori ("rough") enclosure valid for
//! the whole step interval, a Taylor-with-remainder image of the set at the
//! end of the step, and a rearrangement that folds a symmetric error box into
//! the structured representation. Boxes are the simplest representation but
//! suffer from the wrapping effect under rotations; the doubleton and
//! quadruple forms carry a near-orthogonal moving frame to control it.

use crate::interval::Interval;
use crate::linalg::{mat_norm, orthogonal_inverse, qr_orthogonal, IMatrix, IVector, NormKind};
use crate::model::PerturbedSystem;
use crate::{Error, Result};

/// Which structured representation the integrator maintains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// A plain interval box.
    Box,
    /// `x + [B]·[r̃]`: point center plus a spread box in a moving frame.
    Doubleton,
    /// `x + C·[r0] + [B]·[r̃]`: the initial-condition part is propagated by
    /// an exactly-representable point matrix, accumulated errors go into the
    /// moving-frame spread.
    Quadruple,
}

/// Retry policy for the a-priori enclosure search.
#[derive(Clone, Debug)]
pub struct InflationPolicy {
    /// Multiplicative widening about the midpoint on each failed attempt.
    pub factor: f64,
    /// Absolute widening added on each failed attempt.
    pub abs_eps: f64,
    /// Number of inflation retries after the initial candidate.
    pub max_retries: usize,
}

impl Default for InflationPolicy {
    fn default() -> Self {
        InflationPolicy {
            factor: 1.5,
            abs_eps: 1e-10,
            max_retries: 20,
        }
    }
}

/// A structured enclosure of a set of states.
///
/// The basis and initial-condition matrices always hold degenerate (point)
/// intervals; centers are points after [`rearrange`] and stay thin interval
/// vectors mid-step.
#[derive(Clone, Debug)]
pub enum EnclosureSet {
    Box(IVector),
    Doubleton {
        center: IVector,
        basis: IMatrix,
        spread: IVector,
    },
    Quadruple {
        center: IVector,
        c_mat: IMatrix,
        r0: IVector,
        basis: IMatrix,
        spread: IVector,
    },
}

impl EnclosureSet {
    /// Wraps a box in the requested representation.
    pub fn from_box(b: &IVector, rep: Representation) -> EnclosureSet {
        match rep {
            Representation::Box => EnclosureSet::Box(b.clone()),
            Representation::Doubleton => {
                let c = b.mid();
                let spread = b - &IVector::point(&c);
                EnclosureSet::Doubleton {
                    center: IVector::point(&c),
                    basis: IMatrix::identity(b.len()),
                    spread,
                }
            }
            Representation::Quadruple => {
                let c = b.mid();
                let r0 = b - &IVector::point(&c);
                EnclosureSet::Quadruple {
                    center: IVector::point(&c),
                    c_mat: IMatrix::identity(b.len()),
                    r0,
                    basis: IMatrix::identity(b.len()),
                    spread: IVector::zeros(b.len()),
                }
            }
        }
    }

    pub fn boxed(b: &IVector) -> EnclosureSet {
        EnclosureSet::from_box(b, Representation::Box)
    }

    pub fn doubleton(b: &IVector) -> EnclosureSet {
        EnclosureSet::from_box(b, Representation::Doubleton)
    }

    pub fn quadruple(b: &IVector) -> EnclosureSet {
        EnclosureSet::from_box(b, Representation::Quadruple)
    }

    pub fn representation(&self) -> Representation {
        match self {
            EnclosureSet::Box(_) => Representation::Box,
            EnclosureSet::Doubleton { .. } => Representation::Doubleton,
            EnclosureSet::Quadruple { .. } => Representation::Quadruple,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EnclosureSet::Box(b) => b.len(),
            EnclosureSet::Doubleton { center, .. } | EnclosureSet::Quadruple { center, .. } => {
                center.len()
            }
        }
    }

    /// The interval box hull of the represented set.
    pub fn hull(&self) -> IVector {
        match self {
            EnclosureSet::Box(b) => b.clone(),
            EnclosureSet::Doubleton {
                center,
                basis,
                spread,
            } => center + &(basis * spread),
            EnclosureSet::Quadruple {
                center,
                c_mat,
                r0,
                basis,
                spread,
            } => &(center + &(c_mat * r0)) + &(basis * spread),
        }
    }
}

/// Searches for a box `[W]` with
/// `hull(set) + [0,h]·f([W], ybox) ⊆ [W]`,
/// which guarantees that every trajectory started in the set, driven by any
/// selection `y(t) ∈ ybox`, stays in `[W]` for the whole step `[0, h]`.
///
/// The first candidate is `hull + [0,h]·f(hull, ybox)`; on failure the
/// candidate is inflated per `policy` and retried. The box returned is the
/// candidate that passed the test.
pub fn rough_enclosure(
    sys: &PerturbedSystem,
    set: &EnclosureSet,
    h: f64,
    ybox: &IVector,
    policy: &InflationPolicy,
) -> Result<IVector> {
    assert!(h > 0.0, "step size must be positive");
    let hull = set.hull();
    let span = Interval::new(0.0, h);
    let mut candidate = &hull + &(&sys.eval_field(&hull, ybox)? * span);
    for _ in 0..=policy.max_retries {
        let image = &hull + &(&sys.eval_field(&candidate, ybox)? * span);
        if image.subset(&candidate) {
            return Ok(candidate);
        }
        // Absorb the directions the test overshot, then widen.
        candidate = candidate
            .hull(&image)
            .inflate(policy.factor, policy.abs_eps);
    }
    Err(Error::RoughEnclosureFailure {
        step: h,
        attempts: policy.max_retries + 1,
    })
}

/// `base^e` in interval arithmetic.
fn int_pow(base: Interval, e: usize) -> Interval {
    let mut acc = Interval::one();
    for _ in 0..e {
        acc = acc * base;
    }
    acc
}

/// Propagates the set by time `h` under `x' = f(x, y_c)` (the perturbation
/// frozen at the reference selection).
///
/// Returns the image set and the a-priori box `[W1]` covering the frozen-
/// selection trajectories over the step interval. Both the set image and
/// (for the structured representations) the flow Jacobian are evaluated by
/// Taylor expansion to order `p` with remainder coefficients taken over
/// `[W1]`; the new frames come from a QR factorization of the propagated
/// basis midpoint.
pub fn unperturbed_step(
    sys: &PerturbedSystem,
    set: &EnclosureSet,
    h: f64,
    y_c: &[f64],
    p: usize,
    policy: &InflationPolicy,
) -> Result<(EnclosureSet, IVector)> {
    assert!(p >= 1, "Taylor order must be at least 1");
    let n = sys.dim();
    let ybox = IVector::point(y_c);
    let w1 = rough_enclosure(sys, set, h, &ybox, policy)?;
    let hull = set.hull();
    let ih = Interval::point(h);
    let hp1 = int_pow(ih, p + 1);

    // End-of-step image of the center: Taylor polynomial at the center point
    // plus the order-(p+1) remainder coefficient taken over [W1].
    let c_pt = match set {
        EnclosureSet::Box(b) => b.mid(),
        EnclosureSet::Doubleton { center, .. } | EnclosureSet::Quadruple { center, .. } => {
            center.mid()
        }
    };
    let tc_center = sys.taylor_coefficients(&IVector::point(&c_pt), y_c, p)?;
    let tc_rough = sys.taylor_coefficients(&w1, y_c, p + 1)?;
    let xbar_c = &tc_center.eval(ih, p) + &(tc_rough.coeff(p + 1) * hp1);

    // Flow Jacobian over the whole set: variational Taylor polynomial on the
    // hull, remainder over [W1] multiplied by an a-priori bound on the
    // variational solution itself (‖V(t) − I‖ ≤ e^{t‖A‖} − 1 entrywise).
    let vs = sys.variational_coeffs(&hull, y_c, &IMatrix::identity(n), p)?;
    let mut v = vs[p].clone();
    for k in (0..p).rev() {
        v = &vs[k] + &v.scale(ih);
    }
    let a_box = sys.jacobian_x(&w1, &ybox)?;
    let a_norm = mat_norm(&a_box, NormKind::Max).hi();
    let growth = ((ih * Interval::point(a_norm)).exp() - Interval::one()).hi();
    let v_rough = IMatrix::identity(n).widen_all(growth);
    let v_rem_coeffs = sys.variational_coeffs(&w1, y_c, &IMatrix::identity(n), p + 1)?;
    let v = &v + &(&v_rem_coeffs[p + 1] * &v_rough).scale(hp1);

    let center_pt = IVector::point(&c_pt);
    let next = match set {
        EnclosureSet::Box(b) => {
            let dev = b - &center_pt;
            EnclosureSet::Box(&xbar_c + &(&v * &dev))
        }
        EnclosureSet::Doubleton {
            center,
            basis,
            spread,
        } => {
            let vb = &v * basis;
            let q = qr_orthogonal(&vb.mid(), n);
            let q_mat = IMatrix::from_point(n, n, &q);
            let q_inv = orthogonal_inverse(&q, n)?;
            let c_next = xbar_c.mid();
            let c_defect = &xbar_c - &IVector::point(&c_next);
            let c_dev = center - &center_pt;
            let extra = &c_defect + &(&v * &c_dev);
            let spread_next = &(&(&q_inv * &vb) * spread) + &(&q_inv * &extra);
            EnclosureSet::Doubleton {
                center: IVector::point(&c_next),
                basis: q_mat,
                spread: spread_next,
            }
        }
        EnclosureSet::Quadruple {
            center,
            c_mat,
            r0,
            basis,
            spread,
        } => {
            let vc = &v * c_mat;
            let c_mat_next = IMatrix::from_point(n, n, &vc.mid());
            let vc_defect = &vc - &c_mat_next;
            let vb = &v * basis;
            let q = qr_orthogonal(&vb.mid(), n);
            let q_mat = IMatrix::from_point(n, n, &q);
            let q_inv = orthogonal_inverse(&q, n)?;
            let c_next = xbar_c.mid();
            let c_defect = &xbar_c - &IVector::point(&c_next);
            let c_dev = center - &center_pt;
            let extra = &c_defect + &(&v * &c_dev);
            let spread_next = &(&(&(&q_inv * &vb) * spread) + &(&(&q_inv * &vc_defect) * r0))
                + &(&q_inv * &extra);
            EnclosureSet::Quadruple {
                center: IVector::point(&c_next),
                c_mat: c_mat_next,
                r0: r0.clone(),
                basis: q_mat,
                spread: spread_next,
            }
        }
    };
    Ok((next, w1))
}

/// Absorbs a symmetric error box into the structured representation: the new
/// center is the midpoint of `center + delta`, and the leftover (mapped
/// through the inverse frame) widens the spread. The frame itself is
/// unchanged.
pub fn rearrange(set_bar: &EnclosureSet, delta: &IVector) -> Result<EnclosureSet> {
    match set_bar {
        EnclosureSet::Box(b) => Ok(EnclosureSet::Box(b + delta)),
        EnclosureSet::Doubleton {
            center,
            basis,
            spread,
        } => {
            let shifted = center + delta;
            let c_next = shifted.mid();
            let defect = &shifted - &IVector::point(&c_next);
            let q_inv = orthogonal_inverse(&basis.mid(), basis.rows())?;
            Ok(EnclosureSet::Doubleton {
                center: IVector::point(&c_next),
                basis: basis.clone(),
                spread: spread + &(&q_inv * &defect),
            })
        }
        EnclosureSet::Quadruple {
            center,
            c_mat,
            r0,
            basis,
            spread,
        } => {
            let shifted = center + delta;
            let c_next = shifted.mid();
            let defect = &shifted - &IVector::point(&c_next);
            let q_inv = orthogonal_inverse(&basis.mid(), basis.rows())?;
            Ok(EnclosureSet::Quadruple {
                center: IVector::point(&c_next),
                c_mat: c_mat.clone(),
                r0: r0.clone(),
                basis: basis.clone(),
                spread: spread + &(&q_inv * &defect),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Expr;

    fn oscillator(eps1: f64, eps2: f64) -> PerturbedSystem {
        PerturbedSystem::additive(
            vec![Expr::state(1), -Expr::state(0)],
            IVector::from(vec![
                Interval::centered(0.0, eps1),
                Interval::centered(0.0, eps2),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn constant_field_validates_immediately() {
        // x' = (1, -2) + y with y frozen to a point box.
        let sys = PerturbedSystem::additive(
            vec![Expr::constant(1.0), Expr::constant(-2.0)],
            IVector::point(&[0.0, 0.0]),
        )
        .unwrap();
        let set = EnclosureSet::boxed(&IVector::point(&[0.0, 0.0]));
        let policy = InflationPolicy {
            max_retries: 0,
            ..InflationPolicy::default()
        };
        let w = rough_enclosure(&sys, &set, 0.5, &IVector::point(&[0.0, 0.0]), &policy).unwrap();
        assert_eq!(w[0], Interval::new(0.0, 0.5));
        assert_eq!(w[1], Interval::new(-1.0, 0.0));
    }

    #[test]
    fn oscillator_rough_enclosure_fails_for_unit_step() {
        let sys = oscillator(0.1, 0.1);
        let set = EnclosureSet::boxed(&IVector::point(&[1.0, 0.0]));
        let err =
            rough_enclosure(&sys, &set, 1.0, sys.wy(), &InflationPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::RoughEnclosureFailure { .. }));
    }

    #[test]
    fn oscillator_rough_enclosure_contains_trajectory() {
        let sys = oscillator(0.0, 0.0);
        let set = EnclosureSet::boxed(&IVector::point(&[1.0, 0.0]));
        let w = rough_enclosure(&sys, &set, 0.1, sys.wy(), &InflationPolicy::default()).unwrap();
        for k in 0..=100 {
            let t = 0.1 * k as f64 / 100.0;
            assert!(w.contains_point(&[t.cos(), -t.sin()]), "t={t}");
        }
    }

    #[test]
    fn zero_field_step_is_identity() {
        let sys = PerturbedSystem::additive(
            vec![Expr::constant(0.0), Expr::constant(0.0)],
            IVector::point(&[0.0, 0.0]),
        )
        .unwrap();
        let b = IVector::from(vec![Interval::new(1.0, 2.0), Interval::new(-0.5, 0.5)]);
        let set = EnclosureSet::boxed(&b);
        let (next, w1) = unperturbed_step(
            &sys,
            &set,
            0.25,
            &[0.0, 0.0],
            4,
            &InflationPolicy::default(),
        )
        .unwrap();
        assert_eq!(w1, b);
        assert_eq!(next.hull(), b);
    }

    #[test]
    fn point_rotation_step_is_tight() {
        let sys = oscillator(0.0, 0.0);
        let set = EnclosureSet::boxed(&IVector::point(&[1.0, 0.0]));
        let (next, _) = unperturbed_step(
            &sys,
            &set,
            0.1,
            &[0.0, 0.0],
            10,
            &InflationPolicy::default(),
        )
        .unwrap();
        let hull = next.hull();
        assert!(hull.contains_point(&[(0.1f64).cos(), -(0.1f64).sin()]));
        assert!(hull.max_diam() <= 1e-12, "diam = {:?}", hull.diam());
    }

    #[test]
    fn exponential_step_encloses_exp() {
        let sys = PerturbedSystem::additive(vec![Expr::state(0)], IVector::point(&[0.0])).unwrap();
        let set = EnclosureSet::boxed(&IVector::point(&[1.0]));
        let (next, _) =
            unperturbed_step(&sys, &set, 0.01, &[0.0], 5, &InflationPolicy::default()).unwrap();
        let hull = next.hull();
        assert!(hull.contains_point(&[(0.01f64).exp()]));
        assert!(hull.max_diam() <= 1e-12);
    }

    #[test]
    fn doubleton_and_quadruple_track_boxes() {
        let sys = oscillator(0.0, 0.0);
        let b = IVector::from(vec![
            Interval::centered(1.0, 0.01),
            Interval::centered(0.0, 0.01),
        ]);
        for rep in [
            Representation::Box,
            Representation::Doubleton,
            Representation::Quadruple,
        ] {
            let set = EnclosureSet::from_box(&b, rep);
            assert_eq!(set.representation(), rep);
            assert_eq!(set.dim(), 2);
            assert!(b.subset(&set.hull()));
            let (next, _) =
                unperturbed_step(&sys, &set, 0.1, &[0.0, 0.0], 8, &InflationPolicy::default())
                    .unwrap();
            // The rotated corner points stay inside.
            let (c, s) = ((0.1f64).cos(), (0.1f64).sin());
            for dx in [-0.01, 0.01] {
                for dy in [-0.01, 0.01] {
                    let (x0, y0) = (1.0 + dx, dy);
                    let target = [x0 * c + y0 * s, -x0 * s + y0 * c];
                    assert!(next.hull().contains_point(&target), "{rep:?} {target:?}");
                }
            }
        }
    }

    #[test]
    fn rearrange_examples() {
        // Box: plain componentwise sum.
        let set = EnclosureSet::boxed(&IVector::point(&[1.0, 2.0]));
        let delta = IVector::from(vec![Interval::centered(0.0, 0.5); 2]);
        let out = rearrange(&set, &delta).unwrap();
        assert_eq!(out.hull()[0], Interval::new(0.5, 1.5));

        // Doubleton identity-frame example.
        let set = EnclosureSet::Doubleton {
            center: IVector::point(&[0.0, 0.0]),
            basis: IMatrix::identity(2),
            spread: IVector::from(vec![Interval::new(-1.0, 1.0); 2]),
        };
        let delta = IVector::from(vec![Interval::centered(0.0, 0.1); 2]);
        let out = rearrange(&set, &delta).unwrap();
        match &out {
            EnclosureSet::Doubleton { center, spread, .. } => {
                assert_eq!(center.mid(), vec![0.0, 0.0]);
                assert!((spread[0].lo() + 1.1).abs() < 1e-15);
                assert!((spread[0].hi() - 1.1).abs() < 1e-15);
            }
            other => panic!("unexpected representation {other:?}"),
        }

        // Zero delta keeps the set unchanged up to rounding.
        let set = EnclosureSet::doubleton(&IVector::from(vec![
            Interval::centered(0.3, 0.2),
            Interval::centered(-0.1, 0.05),
        ]));
        let zero = IVector::zeros(2);
        let out = rearrange(&set, &zero).unwrap();
        assert!(set.hull().subset(&out.hull()));
        assert!(out.hull().max_diam() <= set.hull().max_diam() + 1e-14);
    }

    #[test]
    fn wrapping_is_controlled_by_moving_frame() {
        let sys = oscillator(0.0, 0.0);
        let b = IVector::from(vec![
            Interval::centered(1.0, 0.01),
            Interval::centered(0.0, 0.01),
        ]);
        let steps = 100usize;
        let h = 2.0 * std::f64::consts::PI / steps as f64;
        let mut set = EnclosureSet::doubleton(&b);
        for _ in 0..steps {
            let (next, _) =
                unperturbed_step(&sys, &set, h, &[0.0, 0.0], 10, &InflationPolicy::default())
                    .unwrap();
            set = rearrange(&next, &IVector::zeros(2)).unwrap();
        }
        let final_diam = set.hull().max_diam();
        assert!(b.subset(&set.hull()), "final hull {:?}", set.hull());
        assert!(
            final_diam <= 10.0 * b.max_diam(),
            "wrapping blow-up: {final_diam}"
        );
    }
}

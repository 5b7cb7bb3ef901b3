//! Rigorous first-return maps to a linear section for perturbed systems.
//!
//! The section is the hyperplane `α(x) = ⟨normal, x⟩ − offset = 0` together
//! with a required crossing direction (the sign of `d/dt α` along the
//! flow). The map steps until the reachable set has passed the section,
//! brackets the crossing with whole-step tube enclosures, then repeats the
//! passage with bisected sub-steps until the time bracket stops improving
//! or reaches the tolerance `1e-10 · h`. Every tube that touches the
//! section must cross it strictly in the required direction; the image is
//! the hull of those tubes intersected with the section constraint.

use crate::inclusion::{inclusion_step, SolverConfig};
use crate::interval::Interval;
use crate::linalg::IVector;
use crate::lohner::EnclosureSet;
use crate::model::PerturbedSystem;
use crate::{Error, Result};

/// Required sign of `d/dt α` at a counted crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingDirection {
    Positive,
    Negative,
}

/// A linear section `⟨normal, x⟩ = offset` with a crossing direction.
#[derive(Clone, Debug)]
pub struct Section {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub direction: CrossingDirection,
}

impl Section {
    pub fn new(normal: Vec<f64>, offset: f64, direction: CrossingDirection) -> Result<Self> {
        if normal.iter().all(|&c| c == 0.0) || normal.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("section normal must be finite and nonzero"));
        }
        if !offset.is_finite() {
            return Err(Error::Domain("section offset must be finite"));
        }
        Ok(Section {
            normal,
            offset,
            direction,
        })
    }

    /// The coordinate hyperplane `x_i = offset`.
    pub fn coordinate(i: usize, dim: usize, offset: f64, direction: CrossingDirection) -> Self {
        assert!(i < dim, "coordinate index out of range");
        let mut normal = vec![0.0; dim];
        normal[i] = 1.0;
        Section {
            normal,
            offset,
            direction,
        }
    }

    /// Interval range of `α(x) = ⟨normal, x⟩ − offset` over a box.
    pub fn alpha(&self, x: &IVector) -> Interval {
        assert_eq!(self.normal.len(), x.len());
        let mut acc = Interval::point(-self.offset);
        for (ni, xi) in self.normal.iter().zip(x.iter()) {
            if *ni != 0.0 {
                acc = acc + *xi * *ni;
            }
        }
        acc
    }
}

/// Evaluates the first-return map of `set0` to `sec`.
///
/// Returns a box containing the section hit of every admissible trajectory
/// starting in `set0`, and an interval containing every hit time (measured
/// from `0`). The first crossing in the required direction after the set
/// has been strictly on the approaching side is the one evaluated.
/// `max_steps` bounds the number of whole steps taken before the crossing
/// is detected.
pub fn poincare_map(
    sys: &PerturbedSystem,
    set0: &EnclosureSet,
    sec: &Section,
    cfg: &SolverConfig,
    max_steps: usize,
) -> Result<(IVector, Interval)> {
    if sec.normal.len() != sys.dim() {
        return Err(Error::Domain("section dimension does not match the system"));
    }
    // Work with the direction-positive form: crossings raise α through 0.
    let oriented = match sec.direction {
        CrossingDirection::Positive => Section {
            normal: sec.normal.clone(),
            offset: sec.offset,
            direction: CrossingDirection::Positive,
        },
        CrossingDirection::Negative => Section {
            normal: sec.normal.iter().map(|c| -c).collect(),
            offset: -sec.offset,
            direction: CrossingDirection::Positive,
        },
    };
    let runner = Runner {
        sys,
        sec: oriented,
        cfg,
    };
    runner.run(set0, max_steps)
}

struct Runner<'a> {
    sys: &'a PerturbedSystem,
    sec: Section,
    cfg: &'a SolverConfig,
}

/// Bound on sub-steps spent inside a single bracketing sweep.
const SWEEP_CAP: usize = 100_000;
/// Bound on strictly-approaching sub-steps per refinement level.
const ADVANCE_CAP: usize = 4_096;

impl Runner<'_> {
    fn run(&self, set0: &EnclosureSet, max_steps: usize) -> Result<(IVector, Interval)> {
        let mut set = set0.clone();
        let mut t = 0.0;
        let mut armed = self.sec.alpha(&set.hull()).hi() < 0.0;
        for _ in 0..max_steps {
            let b = inclusion_step(self.sys, &set, t, self.cfg)?;
            let a_next = self.sec.alpha(&b.set_next.hull());
            if armed && a_next.hi() >= 0.0 {
                return self.refine(set, t);
            }
            if a_next.hi() < 0.0 {
                armed = true;
            }
            set = b.set_next;
            t = b.t_next;
        }
        Err(Error::NoCrossing { steps: max_steps })
    }

    /// `set` at time `t` is strictly below the section and crosses within
    /// the next whole step. Re-run the passage at ever finer sub-steps,
    /// each time first approaching as close as the sub-step allows, until
    /// the time bracket stops shrinking or hits the tolerance.
    fn refine(&self, set: EnclosureSet, t: f64) -> Result<(IVector, Interval)> {
        let h = self.cfg.step;
        let tol = 1e-10 * h;
        let mut hs = h;
        let mut set = set;
        let mut t = t;
        let mut prev_width = f64::INFINITY;
        loop {
            let mut advanced = 0;
            while advanced < ADVANCE_CAP {
                let b = self.step_with(&set, t, hs)?;
                if self.sec.alpha(&b.set_next.hull()).hi() < 0.0 {
                    set = b.set_next;
                    t = b.t_next;
                    advanced += 1;
                } else {
                    break;
                }
            }
            let (image, t_hi) = self.sweep(&set, t, hs)?;
            let width = t_hi - t;
            if hs <= tol || width >= 0.7 * prev_width || advanced >= ADVANCE_CAP {
                let slack = 1e-9 * (1.0 + t_hi.abs());
                return Ok((image, Interval::new(t - slack, t_hi + slack)));
            }
            prev_width = width;
            hs *= 0.5;
        }
    }

    /// Advances sub-steps from a strictly-below `set` until the whole set
    /// is strictly past the section, hulling the section constraint over
    /// every tube that touches it. Each such tube must cross strictly
    /// upward in `α`.
    fn sweep(&self, set: &EnclosureSet, t0: f64, hs: f64) -> Result<(IVector, f64)> {
        let mut set = set.clone();
        let mut t = t0;
        let mut image: Option<IVector> = None;
        for _ in 0..SWEEP_CAP {
            let b = self.step_with(&set, t, hs)?;
            let a_tube = self.sec.alpha(&b.ek);
            if a_tube.contains_zero() {
                let speed = self.alpha_rate(&b.ek)?;
                if speed.lo() <= 0.0 {
                    return Err(Error::NonTransversal);
                }
                let part = self.constrain(&b.ek);
                image = Some(match image {
                    None => part,
                    Some(acc) => acc.hull(&part),
                });
            }
            let a_next = self.sec.alpha(&b.set_next.hull());
            if a_next.lo() > 0.0 {
                let image = image.ok_or(Error::NonTransversal)?;
                return Ok((image, b.t_next));
            }
            set = b.set_next;
            t = b.t_next;
        }
        Err(Error::NoCrossing { steps: SWEEP_CAP })
    }

    fn step_with(
        &self,
        set: &EnclosureSet,
        t: f64,
        hs: f64,
    ) -> Result<crate::inclusion::StepBundle> {
        let mut sub = self.cfg.clone();
        sub.step = hs;
        inclusion_step(self.sys, set, t, &sub)
    }

    /// Range of `d/dt α = ⟨normal, f(x) + y⟩` over a tube.
    fn alpha_rate(&self, tube: &IVector) -> Result<Interval> {
        let f = self.sys.eval_field(tube, self.sys.wy())?;
        let mut acc = Interval::zero();
        for (ni, fi) in self.sec.normal.iter().zip(f.iter()) {
            if *ni != 0.0 {
                acc = acc + *fi * *ni;
            }
        }
        Ok(acc)
    }

    /// Intersects a tube with the section hyperplane: each coordinate with
    /// a nonzero normal component is solved from the others.
    #[allow(clippy::needless_range_loop)] // i indexes both the normal and the output
    fn constrain(&self, tube: &IVector) -> IVector {
        let n = tube.len();
        let mut out: Vec<Interval> = tube.iter().copied().collect();
        for i in 0..n {
            let ni = self.sec.normal[i];
            if ni == 0.0 {
                continue;
            }
            let mut rest = Interval::point(self.sec.offset);
            for j in 0..n {
                if j != i && self.sec.normal[j] != 0.0 {
                    rest = rest - tube[j] * self.sec.normal[j];
                }
            }
            let solved = rest
                .checked_div(Interval::point(ni))
                .expect("normal component is nonzero");
            if let Some(tight) = out[i].intersect(solved) {
                out[i] = tight;
            }
        }
        out.into_iter().collect()
    }
}

//! Perturbation bounds and the composed one-step algorithm for
//! `x' ∈ f(x) + [perturbation]`.
//!
//! One step: (1) an a-priori box `[W2]` covering *all* admissible
//! trajectories over the step; (2) the guaranteed Taylor step for the flow
//! with the perturbation frozen at the reference selection `y_c`, producing
//! the image set and the tighter a-priori box `[W1]`; (3) a symmetric bound
//! `[Δ] = [−D, D]ⁿ` on the distance between any admissible trajectory and
//! the frozen-selection one, via either a logarithmic-norm estimate or a
//! componentwise integral estimate; (4) a rearrangement folding `[Δ]` into
//! the structured set; (5) an enclosure `[E]` valid for the whole step
//! interval, not only its endpoint.

use crate::interval::Interval;
use crate::linalg::{lognorm, mat_norm, vec_norm, IMatrix, IVector, NormKind};
use crate::lohner::{
    rearrange, rough_enclosure, unperturbed_step, EnclosureSet, InflationPolicy, Representation,
};
use crate::model::PerturbedSystem;
use crate::{Error, Result};

/// Hard cap on the series depth searched by [`exp_integral`].
const SERIES_CAP: usize = 60;

/// How the deviation bound `[Δ]` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// One scalar bound from a logarithmic norm of the Jacobian.
    LogNorm,
    /// A componentwise bound through a matrix-exponential integral.
    ComponentWise,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ln" => Ok(Method::LogNorm),
            "cw" => Ok(Method::ComponentWise),
            other => Err(format!("unknown method {other:?} (expected ln|cw)")),
        }
    }
}

/// Which a-priori box the componentwise defect `[δ]` is evaluated on.
///
/// `DeltaOnW1` uses the tighter frozen-selection box for `[δ]` and the full
/// box (with the perturbation ranging over its bound) for the Jacobian;
/// `DeltaOnW2` evaluates `[δ]` on the full box but may use the frozen
/// selection in the Jacobian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CwVariant {
    DeltaOnW1,
    DeltaOnW2,
}

impl std::str::FromStr for CwVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "w1" => Ok(CwVariant::DeltaOnW1),
            "w2" => Ok(CwVariant::DeltaOnW2),
            other => Err(format!("unknown variant {other:?} (expected w1|w2)")),
        }
    }
}

/// Everything a step needs beyond the system itself.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub method: Method,
    pub cw_variant: CwVariant,
    /// Norm used by the logarithmic-norm method.
    pub ln_norm: NormKind,
    /// Starting depth for the exp-integral series (auto-increased as needed).
    pub series_depth: usize,
    /// Taylor order of the guaranteed step.
    pub taylor_order: usize,
    /// Fixed step size.
    pub step: f64,
    /// Representation drivers wrap initial boxes in.
    pub representation: Representation,
    pub inflation: InflationPolicy,
}

impl SolverConfig {
    pub fn new(step: f64) -> Self {
        assert!(step > 0.0, "step size must be positive");
        SolverConfig {
            method: Method::ComponentWise,
            cw_variant: CwVariant::DeltaOnW1,
            ln_norm: NormKind::Euclid,
            series_depth: 20,
            taylor_order: 10,
            step,
            representation: Representation::Doubleton,
            inflation: InflationPolicy::default(),
        }
    }
}

/// The deviation bound `[Δ]` plus the quantities it was built from.
#[derive(Clone, Debug)]
pub struct DeltaResult {
    /// Symmetric box `[−D, D]` per coordinate.
    pub delta: IVector,
    pub diagnostics: DeltaDiagnostics,
}

#[derive(Clone, Debug)]
pub enum DeltaDiagnostics {
    LogNorm {
        /// Upper bound on the logarithmic norm of the Jacobian.
        l: f64,
        /// Upper bound on the norm of the defect set.
        c: f64,
    },
    ComponentWise {
        /// The comparison matrix fed to the series.
        j: IMatrix,
        /// Componentwise defect magnitudes.
        c: Vec<f64>,
        /// Series tail bound.
        remainder: f64,
        /// Depth actually used.
        depth: usize,
    },
}

/// The outcome of [`exp_integral`].
#[derive(Clone, Debug)]
pub struct SeriesBound {
    /// Componentwise upper bound on the integral.
    pub d: Vec<f64>,
    /// Entrywise tail bound added to the partial sum.
    pub remainder: f64,
    /// Depth actually used.
    pub depth: usize,
}

/// Rigorous componentwise upper bound on `∫₀ʰ e^{J(h−s)} C ds`.
///
/// Uses `∫₀ʰ e^{J(h−s)} C ds = h (Σ_{m≥0} (Jh)ᵐ/(m+1)!) C`, truncating at
/// depth `N` with the tail bounded by `‖A_N‖·‖Ã‖/(N+2−‖Ã‖)` for
/// `Ã = Jh`, `A_m = Ãᵐ/(m+1)!` (valid once `‖Ã‖/(N+2) < 1`; the depth is
/// increased from the requested value until that holds). All arithmetic is
/// outward-rounded interval arithmetic; the right endpoints are returned.
pub fn exp_integral(j: &IMatrix, c: &IVector, h: f64, depth: usize) -> Result<SeriesBound> {
    assert_eq!(j.rows(), j.cols(), "square matrix required");
    assert_eq!(c.len(), j.rows());
    assert!(h > 0.0, "step size must be positive");
    let n = j.rows();
    let atilde = j.scale(Interval::point(h));
    let anorm = mat_norm(&atilde, NormKind::Max).hi();
    let mut n_depth = depth;
    // Negated so a NaN norm keeps raising the depth until the cap trips.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    while !(anorm / (n_depth as f64 + 2.0) < 1.0) {
        n_depth += 1;
        if n_depth > SERIES_CAP {
            return Err(Error::SeriesDivergence { norm: anorm });
        }
    }
    let mut a_m = IMatrix::identity(n);
    let mut sum = IMatrix::identity(n);
    for m in 0..n_depth {
        let inv = Interval::one()
            .checked_div(Interval::point((m + 2) as f64))
            .expect("divisor is a positive integer");
        a_m = (&a_m * &atilde).scale(inv);
        sum = &sum + &a_m;
    }
    let tail = (Interval::point(mat_norm(&a_m, NormKind::Max).hi()) * Interval::point(anorm))
        .checked_div(Interval::point(n_depth as f64 + 2.0) - Interval::point(anorm))
        .expect("denominator positive by choice of depth")
        .hi();
    let v = &sum.widen_all(tail) * c;
    let ih = Interval::point(h);
    let d = v.iter().map(|vi| (*vi * ih).hi().max(0.0)).collect();
    Ok(SeriesBound {
        d,
        remainder: tail,
        depth: n_depth,
    })
}

/// `(e^z − 1)/z` extended continuously by `1` at `z = 0`.
///
/// The function is increasing, so the enclosure evaluates the endpoints: by
/// series with a geometric tail bound for `|z| ≤ 1`, by the closed form
/// otherwise.
pub(crate) fn phi1(z: Interval) -> Interval {
    Interval::new(phi1_endpoint(z.lo()).lo(), phi1_endpoint(z.hi()).hi())
}

fn phi1_endpoint(t: f64) -> Interval {
    let z = Interval::point(t);
    if t.abs() <= 1.0 {
        // Σ_{k≥0} z^k/(k+1)!; after k = K the term ratio is ≤ |z|/(K+3).
        const K: usize = 25;
        let mut term = Interval::one();
        let mut sum = term;
        for k in 1..=K {
            term = (term * z)
                .checked_div(Interval::point((k + 1) as f64))
                .expect("divisor is a positive integer");
            sum = sum + term;
        }
        let q = Interval::point(z.mag())
            .checked_div(Interval::point((K + 3) as f64))
            .expect("divisor is a positive integer");
        let tail = (Interval::point(term.mag()) * q)
            .checked_div(Interval::one() - q)
            .expect("ratio is below one for |z| ≤ 1")
            .hi();
        sum + Interval::new(-tail, tail)
    } else {
        (z.exp() - Interval::one())
            .checked_div(z)
            .expect("nonzero by branch condition")
    }
}

/// Logarithmic-norm deviation bound: `D = C·h·φ₁(l·h)` with
/// `C ≥ ‖[δ]‖` on `[W1]` and `l ≥ μ(∂f/∂x)` on `[W2]` with the perturbation
/// frozen at `y_c`. Equals `C(e^{lh}−1)/l` for `l ≠ 0` and `C·h` at `l = 0`.
pub fn delta_ln(
    sys: &PerturbedSystem,
    w1: &IVector,
    w2: &IVector,
    y_c: &[f64],
    h: f64,
    cfg: &SolverConfig,
) -> Result<DeltaResult> {
    let defect = sys.delta_set(w1, y_c)?;
    let c = vec_norm(&defect, cfg.ln_norm).hi();
    let jac = sys.jacobian_x(w2, &IVector::point(y_c))?;
    let l = lognorm(&jac, cfg.ln_norm)?.hi();
    let z = Interval::point(l) * Interval::point(h);
    let d = (Interval::point(c) * Interval::point(h) * phi1(z))
        .hi()
        .max(0.0);
    let delta = (0..sys.dim()).map(|_| Interval::new(-d, d)).collect();
    Ok(DeltaResult {
        delta,
        diagnostics: DeltaDiagnostics::LogNorm { l, c },
    })
}

/// Componentwise deviation bound `D = ∫₀ʰ e^{J(h−s)} C ds` with
/// `C_i ≥ |[δ_i]|` and `J` the one-sided comparison matrix
/// (`J_ii ≥ ∂f_i/∂x_i`, `J_ij ≥ |∂f_i/∂x_j|` off the diagonal).
pub fn delta_cw(
    sys: &PerturbedSystem,
    w1: &IVector,
    w2: &IVector,
    y_c: &[f64],
    h: f64,
    cfg: &SolverConfig,
) -> Result<DeltaResult> {
    let n = sys.dim();
    let (defect, jac) = match cfg.cw_variant {
        CwVariant::DeltaOnW1 => (sys.delta_set(w1, y_c)?, sys.jacobian_x(w2, sys.wy())?),
        CwVariant::DeltaOnW2 => (
            sys.delta_set(w2, y_c)?,
            sys.jacobian_x(w2, &IVector::point(y_c))?,
        ),
    };
    let c: Vec<f64> = defect.iter().map(|d| d.mag()).collect();
    let j = IMatrix::from_fn(n, n, |i, k| {
        let e = jac[(i, k)];
        Interval::point(if i == k { e.hi() } else { e.mag() })
    });
    let series = exp_integral(&j, &IVector::point(&c), h, cfg.series_depth)?;
    let delta = series.d.iter().map(|&d| Interval::new(-d, d)).collect();
    Ok(DeltaResult {
        delta,
        diagnostics: DeltaDiagnostics::ComponentWise {
            j,
            c,
            remainder: series.remainder,
            depth: series.depth,
        },
    })
}

/// Everything produced by one guaranteed step.
#[derive(Clone, Debug)]
pub struct StepBundle {
    pub t_next: f64,
    /// Enclosure of the reachable set at `t_next`.
    pub set_next: EnclosureSet,
    /// A-priori box for the frozen-selection trajectories over the step
    /// (intersected with `w2`).
    pub w1: IVector,
    /// A-priori box for all admissible trajectories over the step.
    pub w2: IVector,
    /// The symmetric deviation bound used.
    pub delta: IVector,
    /// Enclosure of the reachable tube over the whole step interval.
    pub ek: IVector,
}

/// One guaranteed step of size `cfg.step` from time `t_k`.
///
/// For every initial state in `set` and every measurable selection of the
/// perturbation inside the system's bound, the true state at `t_k + h` lies
/// in `set_next` and the whole trajectory over the step lies in `ek`.
pub fn inclusion_step(
    sys: &PerturbedSystem,
    set: &EnclosureSet,
    t_k: f64,
    cfg: &SolverConfig,
) -> Result<StepBundle> {
    let h = cfg.step;
    let y_c = sys.y_center();
    let w2 = rough_enclosure(sys, set, h, sys.wy(), &cfg.inflation)?;
    let (set_bar, w1_raw) = unperturbed_step(sys, set, h, &y_c, cfg.taylor_order, &cfg.inflation)?;
    let w1 = match w1_raw.intersect(&w2) {
        Some(tight) => tight,
        None => w1_raw,
    };
    let dres = match cfg.method {
        Method::LogNorm => delta_ln(sys, &w1, &w2, &y_c, h, cfg)?,
        Method::ComponentWise => delta_cw(sys, &w1, &w2, &y_c, h, cfg)?,
    };
    let set_next = rearrange(&set_bar, &dres.delta)?;
    let ek = between_steps(
        sys,
        &set.hull(),
        &set_bar.hull(),
        &set_next.hull(),
        &w1,
        &w2,
        &dres.delta,
        &y_c,
        h,
    )?;
    Ok(StepBundle {
        t_next: t_k + h,
        set_next,
        w1,
        w2,
        delta: dres.delta,
        ek,
    })
}

/// Enclosure of the reachable tube over the whole step interval `[0, h]`.
///
/// Coordinates whose velocity cannot vanish on `[W2] × [Wy]` are monotone
/// along every admissible trajectory, so the hull of the endpoint
/// enclosures suffices. Other coordinates use the frozen-selection tube —
/// the hull of the endpoints of the unperturbed step plus a second-order
/// chord-deviation bound — widened by the deviation bound `[Δ]` (valid for
/// intermediate times because the bound is nondecreasing in time).
#[allow(clippy::too_many_arguments)]
pub fn between_steps(
    sys: &PerturbedSystem,
    set_hull: &IVector,
    bar_hull: &IVector,
    next_hull: &IVector,
    w1: &IVector,
    w2: &IVector,
    delta: &IVector,
    y_c: &[f64],
    h: f64,
) -> Result<IVector> {
    let n = sys.dim();
    let f_range = sys.eval_field(w2, sys.wy())?;
    let c2 = sys.taylor_coefficients(w1, y_c, 2)?;
    let quarter_h2 = Interval::point(h) * Interval::point(h) * Interval::point(0.25);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let e_i = if !f_range[i].contains_zero() {
            set_hull[i].hull(next_hull[i])
        } else {
            // |x̄_i(t) − chord(t)| ≤ h²/8 · max|x̄_i''| = h²/4 · |c2_i|.
            let sag = (quarter_h2 * Interval::point(c2.coeff(2)[i].mag())).hi();
            let ebar = set_hull[i].hull(bar_hull[i]).widen(sag);
            let ebar = ebar.intersect(w1[i]).unwrap_or(ebar);
            ebar + delta[i]
        };
        out.push(e_i.intersect(w2[i]).unwrap_or(e_i));
    }
    Ok(out.into_iter().collect())
}

/// Folds [`inclusion_step`] over `steps` steps; returns the end time and
/// the final set.
pub fn integrate(
    sys: &PerturbedSystem,
    set0: &EnclosureSet,
    t0: f64,
    steps: usize,
    cfg: &SolverConfig,
) -> Result<(f64, EnclosureSet)> {
    integrate_observed(sys, set0, t0, steps, cfg, |_| {}, |_, _| None)
}

/// Like [`integrate`] but keeps every step's [`StepBundle`].
pub fn integrate_trace(
    sys: &PerturbedSystem,
    set0: &EnclosureSet,
    t0: f64,
    steps: usize,
    cfg: &SolverConfig,
) -> Result<Vec<StepBundle>> {
    let mut trace = Vec::with_capacity(steps);
    integrate_observed(
        sys,
        set0,
        t0,
        steps,
        cfg,
        |b| trace.push(b.clone()),
        |_, _| None,
    )?;
    Ok(trace)
}

/// The driver underneath the integration helpers. `observe` sees every step
/// bundle; `rebound` may return a replacement perturbation box after each
/// step (for time-varying bounds) — `None` keeps the current one.
pub fn integrate_observed<F, G>(
    sys: &PerturbedSystem,
    set0: &EnclosureSet,
    t0: f64,
    steps: usize,
    cfg: &SolverConfig,
    mut observe: F,
    mut rebound: G,
) -> Result<(f64, EnclosureSet)>
where
    F: FnMut(&StepBundle),
    G: FnMut(usize, f64) -> Option<IVector>,
{
    let mut work = sys.clone();
    let mut set = set0.clone();
    let mut t = t0;
    for k in 0..steps {
        let bundle = inclusion_step(&work, &set, t, cfg)?;
        t = bundle.t_next;
        set = bundle.set_next.clone();
        observe(&bundle);
        if let Some(wy) = rebound(k, t) {
            work.set_perturbation(wy)?;
        }
    }
    Ok((t, set))
}

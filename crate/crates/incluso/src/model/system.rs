//! Vector fields with a set-valued perturbation input.

use super::expr::{Expr, Var};
use super::jet::Jet;
use super::parse::parse_expr;
use crate::interval::Interval;
use crate::linalg::{IMatrix, IVector};
use crate::{Error, Result};

/// A right-hand side `x' = f(x, y)` together with the box `[Wy]` that the
/// perturbation input `y(t)` is allowed to range over.
///
/// The common special case is the additive form `x' = g(x) + y` with `y`
/// matching the state dimension; it admits an exact perturbation-defect
/// computation, so it is tracked separately from the general form.
#[derive(Clone, Debug)]
pub struct PerturbedSystem {
    dim: usize,
    pdim: usize,
    additive: bool,
    /// Full right-hand side components `f_i(x, y)`.
    field: Vec<Expr>,
    /// Row-major `∂f_i/∂x_j`.
    jac_x: Vec<Expr>,
    /// Row-major `∂f_i/∂y_j`.
    jac_y: Vec<Expr>,
    wy: IVector,
}

impl PerturbedSystem {
    /// Builds `x' = g(x) + y` with `y(t) ∈ wy`; `g` must not mention
    /// perturbation variables and `wy` must match the state dimension.
    pub fn additive(g: Vec<Expr>, wy: IVector) -> Result<Self> {
        let n = g.len();
        if wy.len() != n {
            return Err(Error::Domain(
                "additive perturbation box must match the state dimension",
            ));
        }
        for gi in &g {
            if gi.max_state().is_some_and(|i| i >= n) {
                return Err(Error::Domain(
                    "state variable index exceeds the system dimension",
                ));
            }
            if gi.max_perturb().is_some() {
                return Err(Error::Domain(
                    "additive field components must not mention perturbation variables",
                ));
            }
        }
        let field = g
            .into_iter()
            .enumerate()
            .map(|(i, gi)| gi + Expr::perturb(i))
            .collect();
        Ok(Self::finish(n, n, true, field, wy))
    }

    /// Builds the general form `x' = f(x, y)` with `y(t) ∈ wy` of dimension
    /// `perturb_dim`.
    pub fn general(f: Vec<Expr>, perturb_dim: usize, wy: IVector) -> Result<Self> {
        let n = f.len();
        if wy.len() != perturb_dim {
            return Err(Error::Domain(
                "perturbation box must match the perturbation dimension",
            ));
        }
        for fi in &f {
            if fi.max_state().is_some_and(|i| i >= n) {
                return Err(Error::Domain(
                    "state variable index exceeds the system dimension",
                ));
            }
            if fi.max_perturb().is_some_and(|j| j >= perturb_dim) {
                return Err(Error::Domain(
                    "perturbation variable index exceeds the perturbation dimension",
                ));
            }
        }
        Ok(Self::finish(n, perturb_dim, false, f, wy))
    }

    /// Parses `components[i]` as the i-th component of `g` in `x' = g(x) + y`.
    pub fn parse_additive(components: &[&str], wy: IVector) -> Result<Self> {
        let n = components.len();
        let g = components
            .iter()
            .map(|s| parse_expr(s, n, 0))
            .collect::<Result<Vec<_>>>()?;
        Self::additive(g, wy)
    }

    /// Parses `components[i]` as the i-th component of `f` in `x' = f(x, y)`.
    pub fn parse_general(components: &[&str], perturb_dim: usize, wy: IVector) -> Result<Self> {
        let n = components.len();
        let f = components
            .iter()
            .map(|s| parse_expr(s, n, perturb_dim))
            .collect::<Result<Vec<_>>>()?;
        Self::general(f, perturb_dim, wy)
    }

    fn finish(dim: usize, pdim: usize, additive: bool, field: Vec<Expr>, wy: IVector) -> Self {
        let mut jac_x = Vec::with_capacity(dim * dim);
        let mut jac_y = Vec::with_capacity(dim * pdim);
        for fi in &field {
            for j in 0..dim {
                jac_x.push(fi.diff(Var::State(j)));
            }
            for j in 0..pdim {
                jac_y.push(fi.diff(Var::Perturb(j)));
            }
        }
        PerturbedSystem {
            dim,
            pdim,
            additive,
            field,
            jac_x,
            jac_y,
            wy,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn perturb_dim(&self) -> usize {
        self.pdim
    }

    pub fn is_additive(&self) -> bool {
        self.additive
    }

    /// The box the perturbation input ranges over.
    pub fn wy(&self) -> &IVector {
        &self.wy
    }

    /// The reference (center) selection of the perturbation box.
    pub fn y_center(&self) -> Vec<f64> {
        self.wy.mid()
    }

    /// Replaces the perturbation box (dimension must be unchanged).
    pub fn set_perturbation(&mut self, wy: IVector) -> Result<()> {
        if wy.len() != self.pdim {
            return Err(Error::Domain(
                "perturbation box must match the perturbation dimension",
            ));
        }
        self.wy = wy;
        Ok(())
    }

    /// Builder-style variant of [`set_perturbation`](Self::set_perturbation).
    pub fn with_perturbation(mut self, wy: IVector) -> Result<Self> {
        self.set_perturbation(wy)?;
        Ok(self)
    }

    /// Encloses `{f(x, y) : x ∈ [x], y ∈ [y]}` componentwise.
    pub fn eval_field(&self, x: &IVector, y: &IVector) -> Result<IVector> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.pdim);
        self.field.iter().map(|fi| fi.eval(x, y)).collect()
    }

    /// Encloses the state Jacobian `∂f/∂x` over the boxes.
    pub fn jacobian_x(&self, x: &IVector, y: &IVector) -> Result<IMatrix> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.pdim);
        let entries = self
            .jac_x
            .iter()
            .map(|e| e.eval(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(IMatrix::from_fn(self.dim, self.dim, |i, j| {
            entries[i * self.dim + j]
        }))
    }

    /// Encloses the perturbation Jacobian `∂f/∂y` over the boxes.
    pub fn jacobian_y(&self, x: &IVector, y: &IVector) -> Result<IMatrix> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.pdim);
        let entries = self
            .jac_y
            .iter()
            .map(|e| e.eval(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(IMatrix::from_fn(self.dim, self.pdim, |i, j| {
            entries[i * self.pdim + j]
        }))
    }

    /// Encloses the perturbation defect
    /// `δ = { f(x, y_c) − f(x, y) : x ∈ [x], y ∈ [Wy] }`.
    ///
    /// For additive systems this is exactly `y_c − [Wy]` (in particular `0`
    /// when `[Wy]` is a single point); in general it is bounded through the
    /// mean value form `∂f/∂y([x], [Wy]) · (y_c − [Wy])`, which requires
    /// `y_c ∈ [Wy]`.
    pub fn delta_set(&self, x: &IVector, y_c: &[f64]) -> Result<IVector> {
        assert_eq!(y_c.len(), self.pdim);
        debug_assert!(self.wy.contains_point(y_c));
        let dy: IVector = y_c
            .iter()
            .zip(self.wy.iter())
            .map(|(&c, w)| Interval::point(c) - *w)
            .collect();
        if self.additive {
            return Ok(dy);
        }
        let jy = self.jacobian_y(x, &self.wy)?;
        Ok(&jy * &dy)
    }

    /// Jets of the solution components of `x' = f(x, y_c)` started on the box
    /// `[x]`, carried through order `p` (coefficients `0..=p`).
    fn state_jets(&self, x: &IVector, y_c: &[f64], p: usize) -> Result<Vec<Jet>> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y_c.len(), self.pdim);
        let len = p + 1;
        let yj: Vec<Jet> = y_c
            .iter()
            .map(|&v| Jet::constant(Interval::point(v), len))
            .collect();
        let mut xj: Vec<Jet> = x.iter().map(|&v| Jet::constant(v, len)).collect();
        for k in 0..p {
            let mut next = Vec::with_capacity(self.dim);
            for fi in &self.field {
                let fj = fi.eval_jet(&xj, &yj, len)?;
                let c = fj.c[k]
                    .checked_div(Interval::point((k + 1) as f64))
                    .expect("divisor is a positive integer");
                next.push(c);
            }
            for (i, c) in next.into_iter().enumerate() {
                xj[i].c[k + 1] = c;
            }
        }
        Ok(xj)
    }

    /// Taylor coefficients of the solution of `x' = f(x, y_c)` about the
    /// initial box `[x]`, through order `p`.
    pub fn taylor_coefficients(&self, x: &IVector, y_c: &[f64], p: usize) -> Result<TaylorCoeffs> {
        let xj = self.state_jets(x, y_c, p)?;
        let coeffs = (0..=p)
            .map(|k| xj.iter().map(|j| j.c[k]).collect::<IVector>())
            .collect();
        Ok(TaylorCoeffs { coeffs })
    }

    /// Taylor coefficients `V_0..V_p` of the solution of the variational
    /// equation `V' = (∂f/∂x)(x(t), y_c) · V`, `V(0) = v0`, with `x(t)`
    /// expanded about the initial box `[x]`.
    pub fn variational_coeffs(
        &self,
        x: &IVector,
        y_c: &[f64],
        v0: &IMatrix,
        p: usize,
    ) -> Result<Vec<IMatrix>> {
        assert_eq!(v0.rows(), self.dim);
        assert_eq!(v0.cols(), self.dim);
        let n = self.dim;
        let len = p + 1;
        let xj = self.state_jets(x, y_c, p)?;
        let yj: Vec<Jet> = y_c
            .iter()
            .map(|&v| Jet::constant(Interval::point(v), len))
            .collect();
        let entry_jets = self
            .jac_x
            .iter()
            .map(|e| e.eval_jet(&xj, &yj, len))
            .collect::<Result<Vec<_>>>()?;
        let a_mats: Vec<IMatrix> = (0..p)
            .map(|k| IMatrix::from_fn(n, n, |i, j| entry_jets[i * n + j].c[k]))
            .collect();
        let mut vs = Vec::with_capacity(p + 1);
        vs.push(v0.clone());
        for k in 0..p {
            let mut s = IMatrix::zeros(n, n);
            for j in 0..=k {
                s = &s + &(&a_mats[j] * &vs[k - j]);
            }
            let inv = Interval::one()
                .checked_div(Interval::point((k + 1) as f64))
                .expect("divisor is a positive integer");
            vs.push(s.scale(inv));
        }
        Ok(vs)
    }
}

/// Normalized Taylor coefficients `c_k` of a solution, so that the truncated
/// expansion is `Σ_k c_k t^k`.
#[derive(Clone, Debug)]
pub struct TaylorCoeffs {
    pub coeffs: Vec<IVector>,
}

impl TaylorCoeffs {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &IVector {
        &self.coeffs[k]
    }

    /// Horner evaluation of `Σ_{k=0..=upto} c_k t^k`.
    pub fn eval(&self, t: Interval, upto: usize) -> IVector {
        assert!(upto < self.coeffs.len());
        let mut acc = self.coeffs[upto].clone();
        for k in (0..upto).rev() {
            acc = &self.coeffs[k] + &(&acc * t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(eps1: f64, eps2: f64) -> PerturbedSystem {
        let g = vec![Expr::state(1), -Expr::state(0)];
        let wy = IVector::from(vec![
            Interval::centered(0.0, eps1),
            Interval::centered(0.0, eps2),
        ]);
        PerturbedSystem::additive(g, wy).unwrap()
    }

    fn rossler() -> PerturbedSystem {
        let a = 5.7;
        let f = vec![
            -(Expr::state(1) + Expr::state(2)),
            Expr::state(0) + Expr::constant(0.2) * Expr::state(1),
            Expr::constant(0.2) + Expr::state(2) * (Expr::state(0) - Expr::constant(a)),
        ];
        let wy = IVector::from(vec![Interval::centered(0.0, 1e-4); 3]);
        PerturbedSystem::additive(f, wy).unwrap()
    }

    #[test]
    fn field_and_jacobian_values() {
        let sys = oscillator(0.1, 0.1);
        let x = IVector::point(&[1.0, 0.0]);
        let y = IVector::zeros(2);
        let f = sys.eval_field(&x, &y).unwrap();
        assert_eq!(f[0], Interval::zero());
        assert_eq!(f[1], Interval::point(-1.0));

        let jx = sys.jacobian_x(&x, &y).unwrap();
        assert_eq!(jx[(0, 0)], Interval::zero());
        assert_eq!(jx[(0, 1)], Interval::one());
        assert_eq!(jx[(1, 0)], Interval::point(-1.0));
        assert_eq!(jx[(1, 1)], Interval::zero());

        let jy = sys.jacobian_y(&x, &y).unwrap();
        assert_eq!(jy[(0, 0)], Interval::one());
        assert_eq!(jy[(0, 1)], Interval::zero());
        assert_eq!(jy[(1, 1)], Interval::one());
    }

    #[test]
    fn additive_delta_is_exact() {
        let sys = oscillator(0.1, 0.2);
        let x = IVector::point(&[1.0, 0.0]);
        let d = sys.delta_set(&x, &[0.0, 0.0]).unwrap();
        assert_eq!(d[0], Interval::new(-0.1, 0.1));
        assert_eq!(d[1], Interval::new(-0.2, 0.2));
    }

    #[test]
    fn degenerate_perturbation_gives_exactly_zero_delta() {
        let g = vec![Expr::state(1), -Expr::state(0)];
        let wy = IVector::point(&[0.05, -0.02]);
        let sys = PerturbedSystem::additive(g, wy).unwrap();
        let y_c = sys.y_center();
        assert_eq!(y_c, vec![0.05, -0.02]);
        let d = sys.delta_set(&IVector::point(&[1.0, 2.0]), &y_c).unwrap();
        assert_eq!(d[0], Interval::zero());
        assert_eq!(d[1], Interval::zero());
    }

    #[test]
    fn general_delta_via_mean_value() {
        // f = x1 * y1 with y ∈ [0.9, 1.1], reference selection y_c = 1:
        // δ = x1 · (1 − y) = 2 · [−0.1, 0.1].
        let f = vec![Expr::state(0) * Expr::perturb(0)];
        let wy = IVector::from(vec![Interval::new(0.9, 1.1)]);
        let sys = PerturbedSystem::general(f, 1, wy).unwrap();
        let d = sys.delta_set(&IVector::point(&[2.0]), &[1.0]).unwrap();
        assert!((d[0].lo() + 0.2).abs() < 1e-14);
        assert!((d[0].hi() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn construction_validates_dimensions() {
        let g = vec![Expr::state(1), -Expr::state(0)];
        assert!(PerturbedSystem::additive(g.clone(), IVector::zeros(3)).is_err());
        let with_y = vec![Expr::perturb(0), Expr::state(0)];
        assert!(PerturbedSystem::additive(with_y, IVector::zeros(2)).is_err());
        let out_of_range = vec![Expr::state(2), Expr::state(0)];
        assert!(PerturbedSystem::additive(out_of_range, IVector::zeros(2)).is_err());
        assert!(PerturbedSystem::general(vec![Expr::perturb(1)], 1, IVector::zeros(1)).is_err());
    }

    #[test]
    fn parse_constructors() {
        let wy = IVector::from(vec![Interval::centered(0.0, 0.1); 2]);
        let sys = PerturbedSystem::parse_additive(&["x2", "-x1"], wy.clone()).unwrap();
        assert!(sys.is_additive());
        assert_eq!(sys.dim(), 2);

        let gen = PerturbedSystem::parse_general(&["x2 + y1", "-x1 + y2"], 2, wy).unwrap();
        assert!(!gen.is_additive());
        let f = gen
            .eval_field(&IVector::point(&[1.0, 0.0]), &IVector::point(&[0.0, 0.5]))
            .unwrap();
        assert_eq!(f[1], Interval::point(-0.5));
    }

    #[test]
    fn oscillator_taylor_coefficients_match_cosine() {
        let sys = oscillator(0.0, 0.0);
        let tc = sys
            .taylor_coefficients(&IVector::point(&[1.0, 0.0]), &[0.0, 0.0], 4)
            .unwrap();
        // x1(t) = cos t, x2(t) = −sin t.
        let expect1 = [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0];
        let expect2 = [0.0, -1.0, 0.0, 1.0 / 6.0, 0.0];
        for k in 0..=4 {
            assert!(tc.coeff(k)[0].contains(expect1[k]), "k={k}");
            assert!(tc.coeff(k)[1].contains(expect2[k]), "k={k}");
            assert!(tc.coeff(k)[0].diam() <= 1e-15, "k={k}");
        }
        // Horner evaluation at t = 0.1 is close to cos(0.1).
        let v = tc.eval(Interval::point(0.1), 4);
        assert!((v[0].mid() - (0.1f64).cos()).abs() < 1e-8);
    }

    #[test]
    fn rossler_first_coefficients() {
        let sys = rossler();
        let x0 = IVector::point(&[0.0, -10.3, 0.03]);
        let tc = sys.taylor_coefficients(&x0, &[0.0, 0.0, 0.0], 3).unwrap();
        let c1 = tc.coeff(1);
        assert!(c1[0].contains(10.27) && c1[0].diam() < 1e-12);
        assert!(c1[1].contains(-2.06) && c1[1].diam() < 1e-12);
        assert!(c1[2].contains(0.2 + 0.03 * (0.0 - 5.7)) && c1[2].diam() < 1e-12);
    }

    #[test]
    fn variational_coefficients_of_rotation() {
        let sys = oscillator(0.0, 0.0);
        let vs = sys
            .variational_coeffs(
                &IVector::point(&[1.0, 0.0]),
                &[0.0, 0.0],
                &IMatrix::identity(2),
                4,
            )
            .unwrap();
        // V(t) = [[cos t, sin t], [−sin t, cos t]].
        assert_eq!(vs[0][(0, 0)], Interval::one());
        assert!(vs[1][(0, 1)].contains(1.0));
        assert!(vs[1][(1, 0)].contains(-1.0));
        assert!(vs[2][(0, 0)].contains(-0.5));
        assert!(vs[2][(0, 1)].contains(0.0));
        assert!(vs[3][(1, 0)].contains(1.0 / 6.0));
        assert!(vs[4][(0, 0)].contains(1.0 / 24.0));
        for v in &vs {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(v[(i, j)].diam() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let sys = rossler();
        let x0 = [0.4, -3.2, 1.7];
        let y0 = [0.0, 0.0, 0.0];
        let jx = sys
            .jacobian_x(&IVector::point(&x0), &IVector::point(&y0))
            .unwrap();
        let h = 1e-6;
        for i in 0..3 {
            for j in 0..3 {
                let mut xp = x0;
                let mut xm = x0;
                xp[j] += h;
                xm[j] -= h;
                let fp = sys
                    .eval_field(&IVector::point(&xp), &IVector::point(&y0))
                    .unwrap();
                let fm = sys
                    .eval_field(&IVector::point(&xm), &IVector::point(&y0))
                    .unwrap();
                let fd = (fp[i].mid() - fm[i].mid()) / (2.0 * h);
                assert!(
                    (jx[(i, j)].mid() - fd).abs() < 1e-6,
                    "entry ({i},{j}): {} vs {fd}",
                    jx[(i, j)].mid()
                );
            }
        }
    }

    #[test]
    fn perturbation_box_replacement() {
        let mut sys = oscillator(0.1, 0.1);
        assert!(sys.set_perturbation(IVector::zeros(3)).is_err());
        sys.set_perturbation(IVector::point(&[0.0, 0.0])).unwrap();
        assert_eq!(sys.wy()[0], Interval::zero());
        let sys2 = sys.with_perturbation(IVector::zeros(2)).unwrap();
        assert_eq!(sys2.wy()[1], Interval::zero());
    }
}

//! Interval vectors and matrices, norms, logarithmic norms, and the
//! orthogonal-basis helpers used by the set representations.

use crate::interval::Interval;
use crate::{Error, Result};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// A fixed-dimension vector of intervals (an axis-aligned box).
#[derive(Clone, PartialEq)]
pub struct IVector {
    data: Vec<Interval>,
}

impl IVector {
    pub fn zeros(n: usize) -> Self {
        IVector {
            data: vec![Interval::zero(); n],
        }
    }

    /// A degenerate box holding exactly the given point.
    pub fn point(xs: &[f64]) -> Self {
        IVector {
            data: xs.iter().map(|&x| Interval::point(x)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.data.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }

    /// Componentwise hull.
    pub fn hull(&self, other: &IVector) -> IVector {
        assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| a.hull(*b))
            .collect()
    }

    /// Componentwise intersection; `None` when any component is disjoint.
    pub fn intersect(&self, other: &IVector) -> Option<IVector> {
        assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| a.intersect(*b))
            .collect()
    }

    /// Non-strict componentwise inclusion.
    pub fn subset(&self, other: &IVector) -> bool {
        assert_eq!(self.len(), other.len());
        self.iter().zip(other.iter()).all(|(a, b)| a.subset(*b))
    }

    pub fn contains_point(&self, xs: &[f64]) -> bool {
        assert_eq!(self.len(), xs.len());
        self.iter().zip(xs).all(|(a, &x)| a.contains(x))
    }

    pub fn mid(&self) -> Vec<f64> {
        self.iter().map(|a| a.mid()).collect()
    }

    pub fn diam(&self) -> Vec<f64> {
        self.iter().map(|a| a.diam()).collect()
    }

    pub fn max_diam(&self) -> f64 {
        self.iter().map(|a| a.diam()).fold(0.0, f64::max)
    }

    pub fn widen(&self, eps: f64) -> IVector {
        self.iter().map(|a| a.widen(eps)).collect()
    }

    pub fn inflate(&self, factor: f64, eps: f64) -> IVector {
        self.iter().map(|a| a.inflate(factor, eps)).collect()
    }
}

impl From<Vec<Interval>> for IVector {
    fn from(data: Vec<Interval>) -> Self {
        IVector { data }
    }
}

impl FromIterator<Interval> for IVector {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IVector {
            data: iter.into_iter().collect(),
        }
    }
}

impl Index<usize> for IVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.data[i]
    }
}

impl IndexMut<usize> for IVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.data[i]
    }
}

impl Add for &IVector {
    type Output = IVector;
    fn add(self, rhs: &IVector) -> IVector {
        assert_eq!(self.len(), rhs.len());
        self.iter().zip(rhs.iter()).map(|(a, b)| *a + *b).collect()
    }
}

impl Sub for &IVector {
    type Output = IVector;
    fn sub(self, rhs: &IVector) -> IVector {
        assert_eq!(self.len(), rhs.len());
        self.iter().zip(rhs.iter()).map(|(a, b)| *a - *b).collect()
    }
}

impl Mul<Interval> for &IVector {
    type Output = IVector;
    fn mul(self, rhs: Interval) -> IVector {
        self.iter().map(|a| *a * rhs).collect()
    }
}

impl fmt::Debug for IVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl fmt::Display for IVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A row-major rectangular matrix of intervals.
#[derive(Clone, PartialEq)]
pub struct IMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMatrix {
            rows,
            cols,
            data: vec![Interval::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Interval::one();
        }
        m
    }

    /// A degenerate matrix holding exactly the given row-major point entries.
    pub fn from_point(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        IMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| Interval::point(x)).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> IMatrix {
        IMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Row-major midpoints of all entries.
    pub fn mid(&self) -> Vec<f64> {
        self.data.iter().map(|a| a.mid()).collect()
    }

    /// Widens every entry outward by `r`.
    pub fn widen_all(&self, r: f64) -> IMatrix {
        IMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.widen(r)).collect(),
        }
    }

    pub fn scale(&self, s: Interval) -> IMatrix {
        IMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| *a * s).collect(),
        }
    }

    pub fn hull(&self, other: &IMatrix) -> IMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a.hull(*b))
                .collect(),
        }
    }

    pub fn subset(&self, other: &IMatrix) -> bool {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .all(|(a, b)| a.subset(*b))
    }
}

impl Index<(usize, usize)> for IMatrix {
    type Output = Interval;
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &IMatrix {
    type Output = IMatrix;
    fn add(self, rhs: &IMatrix) -> IMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl Sub for &IMatrix {
    type Output = IMatrix;
    fn sub(self, rhs: &IMatrix) -> IMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl Mul for &IMatrix {
    type Output = IMatrix;
    fn mul(self, rhs: &IMatrix) -> IMatrix {
        assert_eq!(self.cols, rhs.rows);
        IMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Interval::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * rhs[(k, j)];
            }
            acc
        })
    }
}

impl Mul<&IVector> for &IMatrix {
    type Output = IVector;
    fn mul(self, rhs: &IVector) -> IVector {
        assert_eq!(self.cols, rhs.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Interval::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)] * rhs[k];
                }
                acc
            })
            .collect()
    }
}

impl fmt::Debug for IMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// The vector norms (and induced matrix norms) available to the bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// `max_i |x_i|`; induced matrix norm is the max row sum.
    Max,
    /// `sum_i |x_i|`; induced matrix norm is the max column sum.
    Sum,
    /// `sqrt(sum_i x_i^2)`; induced matrix norm is the spectral norm,
    /// bounded rigorously rather than computed exactly.
    Euclid,
}

impl std::str::FromStr for NormKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "max" => Ok(NormKind::Max),
            "sum" => Ok(NormKind::Sum),
            "euclid" => Ok(NormKind::Euclid),
            other => Err(format!("unknown norm {other:?} (expected max|sum|euclid)")),
        }
    }
}

/// Encloses the set of norms `{‖x‖ : x ∈ [v]}`.
pub fn vec_norm(v: &IVector, k: NormKind) -> Interval {
    match k {
        NormKind::Max => {
            let lo = v.iter().map(|a| a.mig()).fold(0.0, f64::max);
            let hi = v.iter().map(|a| a.mag()).fold(0.0, f64::max);
            Interval::new(lo, hi)
        }
        NormKind::Sum => v
            .iter()
            .map(|a| a.abs())
            .fold(Interval::zero(), |acc, a| acc + a),
        NormKind::Euclid => v
            .iter()
            .map(|a| a.sq())
            .fold(Interval::zero(), |acc, a| acc + a)
            .sqrt()
            .expect("sum of squares is nonnegative"),
    }
}

/// Encloses the set of induced operator norms `{‖A‖ : A ∈ [M]}`.
///
/// For `Euclid` the upper endpoint is the classical bound
/// `min(sqrt(‖A‖_sum · ‖A‖_max), ‖A‖_Frobenius)` rather than the exact
/// spectral norm; the lower endpoint uses `‖A‖ ≥ max_ij |a_ij|`.
pub fn mat_norm(m: &IMatrix, k: NormKind) -> Interval {
    match k {
        NormKind::Max => (0..m.rows())
            .map(|i| row_abs_sum(m, i))
            .reduce(max_interval)
            .unwrap_or_else(Interval::zero),
        NormKind::Sum => (0..m.cols())
            .map(|j| col_abs_sum(m, j))
            .reduce(max_interval)
            .unwrap_or_else(Interval::zero),
        NormKind::Euclid => {
            let n1 = mat_norm(m, NormKind::Sum).hi();
            let ninf = mat_norm(m, NormKind::Max).hi();
            let geo = (Interval::point(n1) * Interval::point(ninf))
                .sqrt()
                .expect("product of norms is nonnegative")
                .hi();
            let frob = m
                .data
                .iter()
                .map(|a| a.sq())
                .fold(Interval::zero(), |acc, a| acc + a)
                .sqrt()
                .expect("sum of squares is nonnegative")
                .hi();
            let hi = geo.min(frob);
            let lo = m.data.iter().map(|a| a.mig()).fold(0.0, f64::max).min(hi);
            Interval::new(lo, hi)
        }
    }
}

fn row_abs_sum(m: &IMatrix, i: usize) -> Interval {
    (0..m.cols())
        .map(|j| m[(i, j)].abs())
        .fold(Interval::zero(), |acc, a| acc + a)
}

fn col_abs_sum(m: &IMatrix, j: usize) -> Interval {
    (0..m.rows())
        .map(|i| m[(i, j)].abs())
        .fold(Interval::zero(), |acc, a| acc + a)
}

/// Max of two interval-valued quantities that vary independently.
fn max_interval(a: Interval, b: Interval) -> Interval {
    Interval::new(a.lo().max(b.lo()), a.hi().max(b.hi()))
}

/// Encloses `sup {μ_k(A) : A ∈ [M]}`, the worst-case logarithmic norm.
///
/// Formulas: `μ_max(A) = max_i (a_ii + Σ_{j≠i} |a_ij|)`, `μ_sum` the column
/// variant, and `μ_euclid(A) = λ_max((A + Aᵀ)/2)` bounded by Gershgorin
/// discs of the symmetric part. Since `−‖A‖ ≤ μ(A) ≤ ‖A‖` for the induced
/// norm, the result is clamped to `±mat_norm(M, k)`, which also keeps the
/// computed bounds consistent with each other.
pub fn lognorm(m: &IMatrix, k: NormKind) -> Result<Interval> {
    if m.rows() != m.cols() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let raw = match k {
        NormKind::Max => (0..n)
            .map(|i| {
                let off = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| m[(i, j)].abs())
                    .fold(Interval::zero(), |acc, a| acc + a);
                m[(i, i)] + off
            })
            .reduce(max_interval)
            .unwrap_or_else(Interval::zero),
        NormKind::Sum => (0..n)
            .map(|j| {
                let off = (0..n)
                    .filter(|&i| i != j)
                    .map(|i| m[(i, j)].abs())
                    .fold(Interval::zero(), |acc, a| acc + a);
                m[(j, j)] + off
            })
            .reduce(max_interval)
            .unwrap_or_else(Interval::zero),
        NormKind::Euclid => {
            let sym = (m + &m.transpose()).scale(Interval::point(0.5));
            // λ_max ≥ every diagonal entry; λ_max ≤ the largest Gershgorin
            // disc right edge.
            let lo = (0..n)
                .map(|i| sym[(i, i)].lo())
                .fold(f64::NEG_INFINITY, f64::max);
            let hi = (0..n)
                .map(|i| {
                    let off = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| sym[(i, j)].abs())
                        .fold(Interval::zero(), |acc, a| acc + a);
                    (sym[(i, i)] + off).hi()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            Interval::new(lo, hi)
        }
    };
    let bound = mat_norm(m, k).hi();
    Ok(Interval::new(
        raw.lo().max(-bound).min(bound),
        raw.hi().min(bound).max(-bound),
    ))
}

/// Householder QR of a point matrix; returns the orthogonal factor `Q`
/// (row-major), sign-normalized so the triangular factor has a nonnegative
/// diagonal (in particular `Q(identity) = identity`).
pub(crate) fn qr_orthogonal(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut r = a.to_vec();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let mut v = vec![0.0; n];
    for k in 0..n {
        let norm = (k..n)
            .map(|i| r[i * n + k] * r[i * n + k])
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[k * n + k] >= 0.0 { -norm } else { norm };
        for i in k..n {
            v[i] = r[i * n + k];
        }
        v[k] -= alpha;
        let vtv: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        if vtv == 0.0 {
            continue;
        }
        // r <- (I - 2 v vᵀ / vᵀv) r, applied to the remaining columns.
        for j in k..n {
            let dot: f64 = (k..n).map(|i| v[i] * r[i * n + j]).sum();
            let c = 2.0 * dot / vtv;
            for i in k..n {
                r[i * n + j] -= c * v[i];
            }
        }
        // q <- q (I - 2 v vᵀ / vᵀv).
        for i in 0..n {
            let dot: f64 = (k..n).map(|j| q[i * n + j] * v[j]).sum();
            let c = 2.0 * dot / vtv;
            for j in k..n {
                q[i * n + j] -= c * v[j];
            }
        }
    }
    for k in 0..n {
        if r[k * n + k] < 0.0 {
            for i in 0..n {
                q[i * n + k] = -q[i * n + k];
            }
        }
    }
    q
}

/// Rigorous enclosure of the inverse of a numerically orthogonal point
/// matrix `Q`: writing `QᵀQ = I − E`, if `ρ = ‖E‖ < 1` then
/// `Q⁻¹ = (I + F) Qᵀ` with `‖F‖ ≤ ρ/(1−ρ)`, which bounds every entry.
pub(crate) fn orthogonal_inverse(q: &[f64], n: usize) -> Result<IMatrix> {
    let qi = IMatrix::from_point(n, n, q);
    let qt = qi.transpose();
    let prod = &qt * &qi;
    let defect = IMatrix::from_fn(n, n, |i, j| {
        let id = if i == j {
            Interval::one()
        } else {
            Interval::zero()
        };
        id - prod[(i, j)]
    });
    let rho = mat_norm(&defect, NormKind::Max).hi();
    // Negated so a NaN defect is rejected rather than accepted.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(rho < 1.0) {
        return Err(Error::SingularBasis { defect: rho });
    }
    let sigma = (Interval::point(rho))
        .checked_div(Interval::one() - Interval::point(rho))
        .expect("1 - rho > 0")
        .hi();
    // |(F Qᵀ)_ij| <= ‖F‖_max · max_k |Qᵀ_kj|.
    let col_mag: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|k| qt[(k, j)].mag()).fold(0.0, f64::max))
        .collect();
    Ok(IMatrix::from_fn(n, n, |i, j| {
        let err = (Interval::point(sigma) * Interval::point(col_mag[j])).hi();
        qt[(i, j)] + Interval::new(-err, err)
    }))
}

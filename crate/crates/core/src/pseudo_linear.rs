//! Signature-aware dense linear algebra on a single tangent space.
//!
//! Everything here works in a fixed real coordinate frame of dimension `d`.
//! Metrics may be indefinite; orthonormal frames carry signs `ε_a = ±1`, and
//! the exterior square `Λ²` is indexed by lexicographic pairs `(a, b)`, `a < b`,
//! with inner product
//!
//! ```text
//! ⟨A∧B, C∧X⟩ = h(A,C) h(B,X) − h(A,X) h(B,C).
//! ```
//!
//! With this normalisation the plain operator trace on the `a < b` basis
//! coincides with the quarter-weighted four-index sum over an orthonormal
//! frame.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::flat_model::{ModelParams, Point};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Smallest admissible `|h(v,v)|` pivot during Gram–Schmidt.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Relative central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A `(1,1)`-tensor at a point, as a `d×d` matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism(Matrix);

impl Endomorphism {
    pub fn new(matrix: Matrix) -> Self {
        assert!(matrix.is_square(), "endomorphism must be square");
        Self(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        Self(&self.0 * &other.0)
    }

    pub fn pow(&self, n: u32) -> Endomorphism {
        let mut out = Self::identity(self.dim());
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn commutator(&self, other: &Endomorphism) -> Endomorphism {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn scale(&self, s: f64) -> Endomorphism {
        Self(&self.0 * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Mul for &Endomorphism {
    type Output = Endomorphism;
    fn mul(self, rhs: &Endomorphism) -> Endomorphism {
        self.compose(rhs)
    }
}

impl Add for &Endomorphism {
    type Output = Endomorphism;
    fn add(self, rhs: &Endomorphism) -> Endomorphism {
        Endomorphism(&self.0 + &rhs.0)
    }
}

impl Sub for &Endomorphism {
    type Output = Endomorphism;
    fn sub(self, rhs: &Endomorphism) -> Endomorphism {
        Endomorphism(&self.0 - &rhs.0)
    }
}

impl Neg for &Endomorphism {
    type Output = Endomorphism;
    fn neg(self) -> Endomorphism {
        Endomorphism(-&self.0)
    }
}

/// Symmetry tag of a [`BilinearForm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    None,
}

/// A `(0,2)`-tensor at a point: `B(x, y) = xᵀ M y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    matrix: Matrix,
    symmetry: Symmetry,
}

impl BilinearForm {
    /// Wraps a matrix, tagging it by exact (bitwise) symmetry.
    pub fn new(matrix: Matrix) -> Self {
        assert!(matrix.is_square(), "bilinear form must be square");
        let symmetry = if matrix == matrix.transpose() {
            Symmetry::Symmetric
        } else if matrix == -matrix.transpose() {
            Symmetry::Antisymmetric
        } else {
            Symmetry::None
        };
        Self { matrix, symmetry }
    }

    /// Symmetric part `(M + Mᵀ)/2`, exactly symmetric.
    pub fn symmetrized(matrix: &Matrix) -> Self {
        Self {
            matrix: (matrix + matrix.transpose()) * 0.5,
            symmetry: Symmetry::Symmetric,
        }
    }

    /// Antisymmetric part `(M − Mᵀ)/2`, exactly antisymmetric.
    pub fn antisymmetrized(matrix: &Matrix) -> Self {
        Self {
            matrix: (matrix - matrix.transpose()) * 0.5,
            symmetry: Symmetry::Antisymmetric,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(Matrix::identity(dim, dim))
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self::new(Matrix::from_diagonal(&Vector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.matrix * y))
    }

    /// The covector `B(v, ·)`.
    pub fn flat(&self, v: &Vector) -> Vector {
        self.matrix.tr_mul(v)
    }

    /// The form `(x, y) ↦ B(E x, y)`.
    pub fn precompose(&self, e: &Endomorphism) -> BilinearForm {
        BilinearForm::new(e.matrix().tr_mul(&self.matrix))
    }

    pub fn scale(&self, s: f64) -> BilinearForm {
        Self {
            matrix: &self.matrix * s,
            symmetry: self.symmetry,
        }
    }

    /// `E` with `B(E x, y) = self(x, y)`, i.e. `B⁻¹ ∘ self` read as maps to covectors.
    pub fn raise_with(&self, metric: &BilinearForm) -> Result<Endomorphism> {
        let inv = metric_inverse(metric)?;
        Ok(Endomorphism::new((&self.matrix * inv).transpose()))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }
}

/// A pseudo-orthonormal frame: columns `e_a` with `h(e_a, e_b) = ε_a δ_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Matrix,
    signs: Vec<f64>,
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// Frame vectors as the columns of a matrix.
    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn vector(&self, a: usize) -> Vector {
        self.vectors.column(a).into_owned()
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// Gram matrix `h(e_a, e_b)`.
    pub fn gramian(&self, metric: &BilinearForm) -> Matrix {
        self.vectors.transpose() * metric.matrix() * &self.vectors
    }

    /// Coordinates of `v` in this frame.
    pub fn coordinates(&self, v: &Vector, metric: &BilinearForm) -> Vector {
        let mut out = self.vectors.tr_mul(&(metric.matrix() * v));
        for (x, s) in out.iter_mut().zip(&self.signs) {
            *x *= s;
        }
        out
    }
}

/// Dense covariant 4-tensor `T(A, B, C, X)`, `d⁴` entries, last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadCov {
    dim: usize,
    data: Vec<f64>,
}

impl QuadCov {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim.pow(4));
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for x in 0..dim {
                        data.push(f(a, b, c, x));
                    }
                }
            }
        }
        Self { dim, data }
    }

    /// `α ⊗ β`: `(A,B,C,X) ↦ α(A,B) β(C,X)`.
    pub fn outer(alpha: &BilinearForm, beta: &BilinearForm) -> Self {
        let (am, bm) = (alpha.matrix(), beta.matrix());
        Self::from_fn(alpha.dim(), |a, b, c, x| am[(a, b)] * bm[(c, x)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, x: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + x
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, x: usize) -> f64 {
        self.data[self.idx(a, b, c, x)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, x: usize, v: f64) {
        let i = self.idx(a, b, c, x);
        self.data[i] = v;
    }

    /// Full contraction with four vectors.
    pub fn eval(&self, a: &Vector, b: &Vector, c: &Vector, x: &Vector) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let ab = a[i] * b[j];
                if ab == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let abc = ab * c[k];
                    if abc == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    let row = &self.data[base..base + d];
                    total += abc * row.iter().zip(x.iter()).map(|(t, v)| t * v).sum::<f64>();
                }
            }
        }
        total
    }

    /// Contracts the first three slots: the covector `T(A, B, C, ·)`.
    pub fn partial3(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let d = self.dim;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let ab = a[i] * b[j];
                if ab == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let abc = ab * c[k];
                    if abc == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    for x in 0..d {
                        out[x] += abc * self.data[base + x];
                    }
                }
            }
        }
        out
    }

    /// Components in a new basis given by the columns of `basis`.
    pub fn in_basis(&self, basis: &Matrix) -> QuadCov {
        let mut t = self.clone();
        for slot in 0..4 {
            t = t.contract_slot(slot, basis);
        }
        t
    }

    pub fn in_frame(&self, frame: &Frame) -> QuadCov {
        self.in_basis(frame.vectors())
    }

    fn contract_slot(&self, slot: usize, basis: &Matrix) -> QuadCov {
        let d = self.dim;
        let stride = d.pow(3 - slot as u32);
        let mut out = vec![0.0; self.data.len()];
        for (n, o) in out.iter_mut().enumerate() {
            let new_index = (n / stride) % d;
            let base = n - new_index * stride;
            let mut acc = 0.0;
            for old in 0..d {
                let w = basis[(old, new_index)];
                if w != 0.0 {
                    acc += w * self.data[base + old * stride];
                }
            }
            *o = acc;
        }
        QuadCov { dim: d, data: out }
    }

    pub fn permuted(&self, f: impl Fn([usize; 4]) -> [usize; 4]) -> QuadCov {
        Self::from_fn(self.dim, |a, b, c, x| {
            let [p, q, r, s] = f([a, b, c, x]);
            self.get(p, q, r, s)
        })
    }

    pub fn scale(&self, s: f64) -> QuadCov {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &QuadCov, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += s * y;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &QuadCov) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `max |T(A,B,C,X) + T(B,A,C,X)|, |T(A,B,C,X) + T(A,B,X,C)|`.
    pub fn pair_antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for x in 0..d {
                        let t = self.get(a, b, c, x);
                        r = r.max((t + self.get(b, a, c, x)).abs());
                        r = r.max((t + self.get(a, b, x, c)).abs());
                    }
                }
            }
        }
        r
    }

    /// `max |T(A,B,C,X) − T(C,X,A,B)|`.
    pub fn pair_symmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for x in 0..d {
                        r = r.max((self.get(a, b, c, x) - self.get(c, x, a, b)).abs());
                    }
                }
            }
        }
        r
    }

    /// `max |T(A,B,C,X) + T(B,C,A,X) + T(C,A,B,X)|`.
    pub fn bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for x in 0..d {
                        let s = self.get(a, b, c, x) + self.get(b, c, a, x) + self.get(c, a, b, x);
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }

    /// Largest violation among pair antisymmetry, pair symmetry and first Bianchi.
    pub fn curvature_symmetry_residual(&self) -> f64 {
        self.pair_antisymmetry_residual()
            .max(self.pair_symmetry_residual())
            .max(self.bianchi_residual())
    }
}

impl Add for &QuadCov {
    type Output = QuadCov;
    fn add(self, rhs: &QuadCov) -> QuadCov {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub for &QuadCov {
    type Output = QuadCov;
    fn sub(self, rhs: &QuadCov) -> QuadCov {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

/// Number of lexicographic pairs `a < b` for dimension `d`.
pub fn lambda2_dim(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Index of the pair `(a, b)`, `a < b`, in lexicographic order.
pub fn pair_index(a: usize, b: usize, d: usize) -> usize {
    debug_assert!(a < b && b < d);
    a * d - a * (a + 1) / 2 + (b - a - 1)
}

/// Lexicographic list of pairs `(a, b)`, `a < b`.
pub fn pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect()
}

/// An endomorphism of `Λ²` on the `a < b` basis of an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda2Operator {
    dim: usize,
    matrix: Matrix,
    pair_signs: Vec<f64>,
}

impl Lambda2Operator {
    pub fn zeros(dim: usize) -> Self {
        let n = lambda2_dim(dim);
        Self {
            dim,
            matrix: Matrix::zeros(n, n),
            pair_signs: vec![1.0; n],
        }
    }

    /// Tangent dimension `d` (not the `Λ²` dimension).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `ε_a ε_b` for each basis pair: the (diagonal) `Λ²` inner product.
    pub fn pair_signs(&self) -> &[f64] {
        &self.pair_signs
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn compose(&self, other: &Lambda2Operator) -> Lambda2Operator {
        Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
            pair_signs: self.pair_signs.clone(),
        }
    }

    /// `tr(self ∘ other)` without forming the product.
    pub fn trace_of_product(&self, other: &Lambda2Operator) -> f64 {
        self.matrix.component_mul(&other.matrix.transpose()).sum()
    }

    pub fn add(&self, other: &Lambda2Operator) -> Lambda2Operator {
        Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
            pair_signs: self.pair_signs.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> Lambda2Operator {
        Self {
            dim: self.dim,
            matrix: &self.matrix * s,
            pair_signs: self.pair_signs.clone(),
        }
    }

    /// Violation of self-adjointness w.r.t. the induced `Λ²` inner product.
    pub fn self_adjointness_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = self.pair_signs[i] * self.matrix[(i, j)];
                let rhs = self.pair_signs[j] * self.matrix[(j, i)];
                r = r.max((lhs - rhs).abs());
            }
        }
        r
    }
}

/// Inverse of a metric, or `DegenerateMetric`.
pub fn metric_inverse(metric: &BilinearForm) -> Result<Matrix> {
    let m = metric.matrix();
    let lu = m.clone().lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if max.is_nan() || max <= 0.0 || min <= 1e-14 * max {
        return Err(Error::DegenerateMetric {
            pivot: min,
            threshold: 1e-14 * max,
        });
    }
    lu.try_inverse().ok_or(Error::DegenerateMetric {
        pivot: 0.0,
        threshold: 0.0,
    })
}

/// Pivoted modified Gram–Schmidt with respect to an indefinite metric.
///
/// At each step the remaining candidate of largest `|h(v,v)|` is normalised
/// next. If every candidate is null, sums and differences of candidate pairs
/// are tried before giving up.
pub fn pseudo_gram_schmidt(metric: &BilinearForm, seed_basis: &Matrix) -> Result<Frame> {
    let d = metric.dim();
    assert_eq!(seed_basis.nrows(), d);
    let h = metric.matrix();
    let mut candidates: Vec<Vector> = seed_basis.column_iter().map(|c| c.into_owned()).collect();
    let mut vectors = Vec::with_capacity(candidates.len());
    let mut signs = Vec::with_capacity(candidates.len());

    while !candidates.is_empty() {
        let norm = |v: &Vector| v.dot(&(h * v));
        let (mut best, mut best_norm) = (0, 0.0f64);
        for (i, v) in candidates.iter().enumerate() {
            let n = norm(v);
            if n.abs() > best_norm.abs() {
                best = i;
                best_norm = n;
            }
        }
        if best_norm.abs() <= DEGENERACY_THRESHOLD {
            // all remaining candidates are null; look for a non-null combination
            let mut found = None;
            'search: for i in 0..candidates.len() {
                for j in i + 1..candidates.len() {
                    for s in [1.0, -1.0] {
                        let w = &candidates[i] + &candidates[j] * s;
                        let n = norm(&w);
                        if n.abs() > DEGENERACY_THRESHOLD {
                            found = Some((i, w, n));
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some((i, w, n)) => {
                    candidates[i] = w;
                    best = i;
                    best_norm = n;
                }
                None => {
                    return Err(Error::DegenerateMetric {
                        pivot: best_norm.abs(),
                        threshold: DEGENERACY_THRESHOLD,
                    })
                }
            }
        }
        let v = candidates.swap_remove(best);
        let sign = best_norm.signum();
        let e = v / best_norm.abs().sqrt();
        let he = h * &e;
        for w in candidates.iter_mut() {
            let proj = sign * w.dot(&he);
            *w -= &e * proj;
        }
        vectors.push(e);
        signs.push(sign);
    }

    Ok(Frame {
        vectors: Matrix::from_columns(&vectors),
        signs,
    })
}

/// Metric adjoint `E*` with `h(E* x, y) = h(x, E y)`.
pub fn adjoint(e: &Endomorphism, metric: &BilinearForm) -> Result<Endomorphism> {
    let inv = metric_inverse(metric)?;
    let h = metric.matrix();
    // E* = h⁻ᵀ Eᵀ hᵀ (reduces to h⁻¹ Eᵀ h for symmetric h)
    Ok(Endomorphism::new(
        inv.transpose() * e.matrix().transpose() * h.transpose(),
    ))
}

/// `max |h(Ex, y) − s·h(x, Ey)|` over basis vectors, `s = +1` (self-adjoint) or `−1` (skew).
pub fn adjointness_residual(e: &Endomorphism, metric: &BilinearForm, sign: f64) -> f64 {
    let h = metric.matrix();
    let lhs = e.matrix().transpose() * h;
    let rhs = h * e.matrix() * sign;
    (lhs - rhs).amax()
}

/// The `Λ²` operator `M` with `⟨M(e_a∧e_b), e_c∧e_d⟩ = T(e_a, e_b, e_c, e_d)`.
///
/// A metric-orthonormal frame is built from the standard basis.
pub fn quadcov_to_lambda2_op(t: &QuadCov, metric: &BilinearForm) -> Result<Lambda2Operator> {
    let scale = t.max_abs().max(1.0);
    let residual = t.pair_antisymmetry_residual();
    if residual > 1e-10 * scale {
        return Err(Error::PairAntisymmetryViolated { residual });
    }
    let d = metric.dim();
    let frame = pseudo_gram_schmidt(metric, &Matrix::identity(d, d))?;
    Ok(quadcov_to_lambda2_op_in_frame(t, &frame))
}

/// As [`quadcov_to_lambda2_op`], on the `Λ²` basis induced by a given frame.
pub fn quadcov_to_lambda2_op_in_frame(t: &QuadCov, frame: &Frame) -> Lambda2Operator {
    lambda2_op_from_frame_components(&t.in_frame(frame), frame.signs())
}

/// As [`quadcov_to_lambda2_op`] for components `tf` already taken in an
/// orthonormal frame with the given signs.
pub fn lambda2_op_from_frame_components(tf: &QuadCov, eps: &[f64]) -> Lambda2Operator {
    let d = tf.dim();
    assert_eq!(eps.len(), d);
    let pairs = pairs(d);
    let n = pairs.len();
    let pair_signs: Vec<f64> = pairs.iter().map(|&(a, b)| eps[a] * eps[b]).collect();
    let mut matrix = Matrix::zeros(n, n);
    for (col, &(a, b)) in pairs.iter().enumerate() {
        for (row, &(c, e)) in pairs.iter().enumerate() {
            matrix[(row, col)] = pair_signs[row] * tf.get(a, b, c, e);
        }
    }
    Lambda2Operator {
        dim: d,
        matrix,
        pair_signs,
    }
}

/// Values that can be central-differenced.
pub trait FdValue: Sized + Clone {
    fn central_difference(plus: Self, minus: Self, h: f64) -> Self;
    /// `(k·fine − coarse)/(k − 1)`: with `k = 2^p` this cancels the `h^p`
    /// error term of two estimates taken with steps `h` and `2h`.
    fn richardson(fine: Self, coarse: Self, k: f64) -> Self;
}

impl FdValue for f64 {
    fn central_difference(plus: f64, minus: f64, h: f64) -> f64 {
        (plus - minus) / (2.0 * h)
    }

    fn richardson(fine: f64, coarse: f64, k: f64) -> f64 {
        (k * fine - coarse) / (k - 1.0)
    }
}

impl FdValue for Matrix {
    fn central_difference(plus: Matrix, minus: Matrix, h: f64) -> Matrix {
        (plus - minus) / (2.0 * h)
    }

    fn richardson(fine: Matrix, coarse: Matrix, k: f64) -> Matrix {
        (fine * k - coarse) / (k - 1.0)
    }
}

impl FdValue for Vector {
    fn central_difference(plus: Vector, minus: Vector, h: f64) -> Vector {
        (plus - minus) / (2.0 * h)
    }

    fn richardson(fine: Vector, coarse: Vector, k: f64) -> Vector {
        (fine * k - coarse) / (k - 1.0)
    }
}

impl FdValue for Vec<f64> {
    fn central_difference(plus: Vec<f64>, minus: Vec<f64>, h: f64) -> Vec<f64> {
        plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()
    }

    fn richardson(fine: Vec<f64>, coarse: Vec<f64>, k: f64) -> Vec<f64> {
        fine.iter().zip(&coarse).map(|(f, c)| (k * f - c) / (k - 1.0)).collect()
    }
}

/// Difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    /// Two-point central difference, error `O(h²)`.
    Central,
    /// Four-point Richardson-extrapolated central difference, error `O(h⁴)`.
    Richardson,
    /// Six-point, extrapolated twice, error `O(h⁶)`.
    Richardson6,
}

/// Step used along a coordinate currently at value `x`.
pub fn fd_step(x: f64, relative: f64) -> f64 {
    relative * x.abs().max(1.0)
}

/// Richardson-extrapolated central difference of `field` at `point` along a
/// coordinate axis, with the default relative step.
pub fn finite_diff<T: FdValue>(
    params: &ModelParams,
    field: impl Fn(&Point) -> Result<T>,
    point: &Point,
    direction: usize,
) -> Result<T> {
    finite_diff_with_step(params, field, point, direction, DEFAULT_FD_STEP)
}

pub fn finite_diff_with_step<T: FdValue>(
    params: &ModelParams,
    field: impl Fn(&Point) -> Result<T>,
    point: &Point,
    direction: usize,
    relative_step: f64,
) -> Result<T> {
    finite_diff_with_scheme(params, field, point, direction, relative_step, FdScheme::Richardson)
}

pub fn finite_diff_with_scheme<T: FdValue>(
    params: &ModelParams,
    field: impl Fn(&Point) -> Result<T>,
    point: &Point,
    direction: usize,
    relative_step: f64,
    scheme: FdScheme,
) -> Result<T> {
    let x = point.coords()[direction];
    let h = fd_step(x, relative_step);
    let central = |h: f64| -> Result<T> {
        let plus = point.shifted(direction, h);
        let minus = point.shifted(direction, -h);
        for p in [&plus, &minus] {
            params.check_domain(p).map_err(|_| {
                Error::DomainViolation(format!(
                    "finite-difference sample along coordinate {direction} leaves f_Z > 0"
                ))
            })?;
        }
        Ok(T::central_difference(field(&plus)?, field(&minus)?, h))
    };
    match scheme {
        FdScheme::Central => central(h),
        FdScheme::Richardson => Ok(T::richardson(central(h)?, central(2.0 * h)?, 4.0)),
        FdScheme::Richardson6 => {
            let d2 = central(2.0 * h)?;
            let fine = T::richardson(central(h)?, d2.clone(), 4.0);
            let coarse = T::richardson(d2, central(4.0 * h)?, 4.0);
            Ok(T::richardson(fine, coarse, 16.0))
        }
    }
}

/// Richardson-extrapolated differences along every coordinate direction.
pub fn gradient<T: FdValue>(
    params: &ModelParams,
    field: impl Fn(&Point) -> Result<T>,
    point: &Point,
    relative_step: f64,
) -> Result<Vec<T>> {
    gradient_with_scheme(params, field, point, relative_step, FdScheme::Richardson)
}

pub fn gradient_with_scheme<T: FdValue>(
    params: &ModelParams,
    field: impl Fn(&Point) -> Result<T>,
    point: &Point,
    relative_step: f64,
    scheme: FdScheme,
) -> Result<Vec<T>> {
    (0..point.dim())
        .map(|dir| finite_diff_with_scheme(params, &field, point, dir, relative_step, scheme))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, d: usize) -> Matrix {
        Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn gram_schmidt_euclidean_identity() {
        let f = pseudo_gram_schmidt(&BilinearForm::identity(2), &Matrix::identity(2, 2)).unwrap();
        assert_eq!(f.vectors(), &Matrix::identity(2, 2));
        assert_eq!(f.signs(), &[1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_minkowski() {
        let h = BilinearForm::diagonal(&[-1.0, 1.0]);
        let f = pseudo_gram_schmidt(&h, &Matrix::identity(2, 2)).unwrap();
        assert_eq!(f.vectors(), &Matrix::identity(2, 2));
        assert_eq!(f.signs(), &[-1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 6);
        let h = BilinearForm::symmetrized(&(&a * a.transpose() + Matrix::identity(6, 6)));
        let seed = random_matrix(&mut rng, 6);
        let f = pseudo_gram_schmidt(&h, &seed).unwrap();
        let gram = f.gramian(&h);
        assert!((gram - Matrix::identity(6, 6)).amax() < 1e-10);
    }

    #[test]
    fn gram_schmidt_null_seed_basis() {
        // hyperbolic plane in light-cone coordinates: both seed vectors null
        let h = BilinearForm::new(Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let f = pseudo_gram_schmidt(&h, &Matrix::identity(2, 2)).unwrap();
        let gram = f.gramian(&h);
        let expected = Matrix::from_diagonal(&Vector::from_column_slice(f.signs()));
        assert!((gram - expected).amax() < 1e-12);
        let mut s = f.signs().to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(s, vec![-1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_degenerate() {
        let h = BilinearForm::diagonal(&[1.0, 0.0]);
        let err = pseudo_gram_schmidt(&h, &Matrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::DegenerateMetric { .. }));
    }

    #[test]
    fn adjoint_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = BilinearForm::diagonal(&[-1.0, 1.0, 2.0, 0.5]);
        let id = Endomorphism::identity(4);
        assert_eq!(adjoint(&id, &h).unwrap(), id);

        let w = BilinearForm::antisymmetrized(&random_matrix(&mut rng, 4));
        let e = w.raise_with(&h).unwrap();
        let adj = adjoint(&e, &h).unwrap();
        assert!((adj.matrix() + e.matrix()).amax() < 1e-12);

        let e = Endomorphism::new(random_matrix(&mut rng, 5));
        let adj = adjoint(&e, &BilinearForm::identity(5)).unwrap();
        assert!((adj.matrix() - e.matrix().transpose()).amax() < 1e-14);
    }

    #[test]
    fn adjoint_degenerate() {
        let h = BilinearForm::diagonal(&[1.0, 0.0, 1.0]);
        assert!(matches!(
            adjoint(&Endomorphism::identity(3), &h),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn adjoint_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6);
            let h = BilinearForm::symmetrized(&(&a + a.transpose() + Matrix::identity(6, 6) * 3.0));
            let e = Endomorphism::new(random_matrix(&mut rng, 6));
            let back = adjoint(&adjoint(&e, &h).unwrap(), &h).unwrap();
            assert!((back.matrix() - e.matrix()).amax() < 1e-12 * e.max_abs().max(1.0) * 10.0);
        }
    }

    #[test]
    fn pair_indexing() {
        for d in [2, 4, 7] {
            for (i, (a, b)) in pairs(d).into_iter().enumerate() {
                assert_eq!(pair_index(a, b, d), i);
            }
            assert_eq!(pairs(d).len(), lambda2_dim(d));
        }
    }

    #[test]
    fn zero_tensor_gives_zero_operator() {
        let op = quadcov_to_lambda2_op(&QuadCov::zeros(4), &BilinearForm::identity(4)).unwrap();
        assert_eq!(op.matrix().amax(), 0.0);
    }

    #[test]
    fn rejects_non_antisymmetric_input() {
        let t = QuadCov::outer(&BilinearForm::identity(3), &BilinearForm::identity(3));
        assert!(matches!(
            quadcov_to_lambda2_op(&t, &BilinearForm::identity(3)),
            Err(Error::PairAntisymmetryViolated { .. })
        ));
    }

    #[test]
    fn in_basis_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 3;
        let t = QuadCov::from_fn(d, |_, _, _, _| rng.random_range(-1.0..1.0));
        let basis = random_matrix(&mut rng, d);
        let tb = t.in_basis(&basis);
        for (a, b, c, x) in [(0, 1, 2, 0), (2, 2, 1, 0), (1, 0, 0, 2)] {
            let col = |i: usize| basis.column(i).into_owned();
            let direct = t.eval(&col(a), &col(b), &col(c), &col(x));
            assert!((direct - tb.get(a, b, c, x)).abs() < 1e-13);
        }
    }
}

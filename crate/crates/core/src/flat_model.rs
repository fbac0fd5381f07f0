//! The flat pseudo-hyper-Kähler family `N_m` and its twist data.
//!
//! Coordinates are `z_0..z_m, w_0..w_m ∈ ℂ`, realised as `d = 4(m+1)` reals in
//! the fixed order
//!
//! ```text
//! (x_0, y_0, …, x_m, y_m, u_0, v_0, …, u_m, v_m),   z_j = x_j + i y_j,  w_j = u_j + i v_j.
//! ```
//!
//! The metric is negative on the `(z_0, w_0)` block and positive elsewhere.
//! Complex structures follow `ω(X, Y) = g(I X, Y)`, so as matrices
//! `I = g⁻¹ Ωᵀ`. All tensors of the model except `Z` itself are constant; the
//! point dependence enters through `Z`, the moment maps and the elementary
//! deformation `g_H`.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::pseudo_linear::{gradient, metric_inverse, BilinearForm, Endomorphism, Matrix, Vector, DEFAULT_FD_STEP};

/// Points with `f_Z` at or below this value are rejected.
pub const DOMAIN_EPS: f64 = 1e-8;

/// Family index `m` and deformation constant `c ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    m: usize,
    c: f64,
    corrupt_omega2: bool,
}

impl ModelParams {
    pub fn new(m: usize, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Config(format!(
                "deformation constant c must be finite and ≥ 0, got {c}"
            )));
        }
        Ok(Self {
            m,
            c,
            corrupt_omega2: false,
        })
    }

    /// Negative control: flips the sign of `ω_2` so the quaternion relations break.
    pub fn with_corrupted_omega2(mut self) -> Self {
        self.corrupt_omega2 = true;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_corrupted(&self) -> bool {
        self.corrupt_omega2
    }

    /// Real dimension `d = 4(m+1)`.
    pub fn dim(&self) -> usize {
        4 * (self.m + 1)
    }

    /// Quaternionic dimension `q = m+1`.
    pub fn quaternionic_dim(&self) -> usize {
        self.m + 1
    }

    /// `½(|z_0|² − Σ_{j≥1} |z_j|²)`.
    fn half_z_norm(&self, point: &Point) -> f64 {
        let x = point.coords();
        let mut s = 0.0;
        for j in 0..=self.m {
            let r2 = x[xi(j)].powi(2) + x[yi(j)].powi(2);
            s += eta(j) * r2;
        }
        -0.5 * s
    }

    pub fn f_z(&self, point: &Point) -> f64 {
        self.half_z_norm(point) - 0.5 * self.c
    }

    pub fn f_h(&self, point: &Point) -> f64 {
        -self.half_z_norm(point) - 0.5 * self.c
    }

    pub fn check_domain(&self, point: &Point) -> Result<()> {
        if point.dim() != self.dim() {
            return Err(Error::DomainViolation(format!(
                "point has {} coordinates, model needs {}",
                point.dim(),
                self.dim()
            )));
        }
        if point.coords().iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainViolation("non-finite coordinate".into()));
        }
        let f_z = self.f_z(point);
        if f_z <= DOMAIN_EPS {
            return Err(Error::DomainViolation(format!(
                "f_Z = {f_z:.6e} is not positive (need f_Z > {DOMAIN_EPS:e})"
            )));
        }
        Ok(())
    }

    /// A validated point from real coordinates.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        let p = Point::new(coords.to_vec());
        self.check_domain(&p)?;
        Ok(p)
    }
}

#[inline]
fn eta(j: usize) -> f64 {
    if j == 0 {
        -1.0
    } else {
        1.0
    }
}

#[inline]
fn xi(j: usize) -> usize {
    2 * j
}

#[inline]
fn yi(j: usize) -> usize {
    2 * j + 1
}

/// Index of `u_j` for a model with `q = m+1` blocks.
#[inline]
fn ui(j: usize, q: usize) -> usize {
    2 * q + 2 * j
}

#[inline]
fn vi(j: usize, q: usize) -> usize {
    2 * q + 2 * j + 1
}

/// A point of `N_m` in real coordinates. Validity against a [`ModelParams`]
/// is checked by [`ModelParams::point`] / [`ModelParams::check_domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vector,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self {
            coords: Vector::from_vec(coords),
        }
    }

    pub fn from_complex(z: &[Complex<f64>], w: &[Complex<f64>]) -> Self {
        assert_eq!(z.len(), w.len(), "z and w must have the same length");
        let mut coords = Vec::with_capacity(4 * z.len());
        for c in z.iter().chain(w) {
            coords.push(c.re);
            coords.push(c.im);
        }
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn z(&self, j: usize) -> Complex<f64> {
        Complex::new(self.coords[xi(j)], self.coords[yi(j)])
    }

    pub fn w(&self, j: usize) -> Complex<f64> {
        let q = self.dim() / 4;
        Complex::new(self.coords[ui(j, q)], self.coords[vi(j, q)])
    }

    pub fn shifted(&self, direction: usize, h: f64) -> Point {
        let mut coords = self.coords.clone();
        coords[direction] += h;
        Point { coords }
    }
}

/// The constant tensors of the model.
#[derive(Debug, Clone)]
pub struct ConstantTensors {
    pub g: BilinearForm,
    /// `ω_1, ω_2, ω_3`.
    pub omega: [BilinearForm; 3],
    /// `ω_H` transcribed from its coordinate expression.
    pub omega_h: BilinearForm,
    /// `I_1, I_2, I_3` with `ω_k = g(I_k ·, ·)`.
    pub complex: [Endomorphism; 3],
    /// Coordinate Jacobian of `Z`: `D_A Z = DZ · A`.
    pub dz: Endomorphism,
}

fn wedge(m: &mut Matrix, a: usize, b: usize, coeff: f64) {
    m[(a, b)] += coeff;
    m[(b, a)] -= coeff;
}

pub fn constant_tensors(params: &ModelParams) -> ConstantTensors {
    let q = params.quaternionic_dim();
    let d = params.dim();

    let mut g = Matrix::zeros(d, d);
    let mut w1 = Matrix::zeros(d, d);
    let mut w2 = Matrix::zeros(d, d);
    let mut w3 = Matrix::zeros(d, d);
    let mut wh = Matrix::zeros(d, d);
    let mut dz = Matrix::zeros(d, d);
    let s2 = if params.corrupt_omega2 { -1.0 } else { 1.0 };

    for j in 0..q {
        let e = eta(j);
        let (x, y, u, v) = (xi(j), yi(j), ui(j, q), vi(j, q));
        for i in [x, y, u, v] {
            g[(i, i)] = e;
        }
        // (i/2) dz∧dz̄ = dx∧dy
        wedge(&mut w1, x, y, e);
        wedge(&mut w1, u, v, e);
        // (i/2)(dz∧dw − dz̄∧dw̄) = −(dx∧dv + dy∧du)
        wedge(&mut w2, x, v, -s2);
        wedge(&mut w2, y, u, -s2);
        // ½(dz∧dw + dz̄∧dw̄) = dx∧du − dy∧dv
        wedge(&mut w3, x, u, 1.0);
        wedge(&mut w3, y, v, -1.0);
        // ω_H: signs flipped on the z-planes relative to ω_1
        wedge(&mut wh, x, y, -e);
        wedge(&mut wh, u, v, e);
        // Z = y ∂_x − x ∂_y on every z-plane
        dz[(x, y)] = 1.0;
        dz[(y, x)] = -1.0;
    }

    let g = BilinearForm::new(g);
    let omega = [w1, w2, w3].map(BilinearForm::new);
    let g_inv = metric_inverse(&g).expect("flat metric is nondegenerate");
    let complex = omega
        .clone()
        .map(|w| Endomorphism::new(&g_inv * w.matrix().transpose()));

    ConstantTensors {
        g,
        omega,
        omega_h: BilinearForm::new(wh),
        complex,
        dz: Endomorphism::new(dz),
    }
}

/// Real components of `Z = −i Σ (z_j ∂_{z_j} − z̄_j ∂_{z̄_j})`.
pub fn vector_z(params: &ModelParams, point: &Point) -> Vector {
    let q = params.quaternionic_dim();
    let x = point.coords();
    let mut z = Vector::zeros(params.dim());
    for j in 0..q {
        z[xi(j)] = x[yi(j)];
        z[yi(j)] = -x[xi(j)];
    }
    z
}

/// `f_Z`, `f_H` and `g(Z, Z)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalars {
    pub f_z: f64,
    pub f_h: f64,
    pub g_zz: f64,
}

pub fn scalars(params: &ModelParams, point: &Point) -> Result<Scalars> {
    params.check_domain(point)?;
    let x = point.coords();
    let mut g_zz = 0.0;
    for j in 0..params.quaternionic_dim() {
        g_zz += eta(j) * (x[xi(j)].powi(2) + x[yi(j)].powi(2));
    }
    Ok(Scalars {
        f_z: params.f_z(point),
        f_h: params.f_h(point),
        g_zz,
    })
}

/// Every tensor of the construction evaluated at one point.
#[derive(Debug, Clone)]
pub struct GeometryAt {
    pub params: ModelParams,
    pub point: Point,
    pub g: BilinearForm,
    /// `ω_0 = g, ω_1, ω_2, ω_3`.
    pub omega: [BilinearForm; 4],
    pub omega_h: BilinearForm,
    /// `I_0 = id, I_1, I_2, I_3`.
    pub complex: [Endomorphism; 4],
    pub i_h: Endomorphism,
    pub dz: Endomorphism,
    pub k: Endomorphism,
    pub z: Vector,
    /// `α_μ = ι_Z ω_μ` as covectors.
    pub alpha: [Vector; 4],
    pub f_z: f64,
    pub f_h: f64,
    pub g_zz: f64,
    pub g_h: BilinearForm,
    pub g_alpha: BilinearForm,
    g_h_inv: Matrix,
}

impl GeometryAt {
    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn g_h_inv(&self) -> &Matrix {
        &self.g_h_inv
    }

    /// `I_μ Z`.
    pub fn i_z(&self, mu: usize) -> Vector {
        self.complex[mu].apply(&self.z)
    }

    /// `f_Z·id − (f_Z/f_H) Σ_λ α_λ(·) I_λ Z`.
    pub fn k_closed(&self) -> Endomorphism {
        let mut k = Matrix::identity(self.dim(), self.dim()) * self.f_z;
        let s = self.f_z / self.f_h;
        for mu in 0..4 {
            k -= self.i_z(mu) * self.alpha[mu].transpose() * s;
        }
        Endomorphism::new(k)
    }

    /// Solves `g_H(v, ·) = covector`.
    pub fn raise_h(&self, covector: &Vector) -> Vector {
        &self.g_h_inv * covector
    }

    /// The form `(A, B) ↦ form(I_k A, B)`.
    pub fn twisted(&self, form: &BilinearForm, k: usize) -> BilinearForm {
        form.precompose(&self.complex[k])
    }
}

pub fn geometry_at(params: &ModelParams, point: &Point) -> Result<GeometryAt> {
    let s = scalars(params, point)?;
    let consts = constant_tensors(params);
    let d = params.dim();
    let g = consts.g.clone();
    let [w1, w2, w3] = consts.omega.clone();
    let omega = [g.clone(), w1, w2, w3];
    let [i1, i2, i3] = consts.complex.clone();
    let complex = [Endomorphism::identity(d), i1, i2, i3];
    let z = vector_z(params, point);

    let alpha: [Vector; 4] = std::array::from_fn(|mu| g.matrix() * complex[mu].apply(&z));
    let mut g_alpha = Matrix::zeros(d, d);
    for a in &alpha {
        g_alpha += a * a.transpose();
    }
    let g_alpha = BilinearForm::new(g_alpha);
    let g_h = BilinearForm::new(g.matrix() / s.f_z + g_alpha.matrix() / (s.f_z * s.f_z));

    let i_h = &complex[1] + &consts.dz.scale(2.0);
    let omega_h = BilinearForm::antisymmetrized(&(i_h.matrix().transpose() * g.matrix()));

    let chol = g_h
        .matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DomainViolation("elementary deformation g_H is not positive-definite".into()))?;
    let g_h_inv = chol.inverse();
    let k = Endomorphism::new(chol.solve(g.matrix()));

    Ok(GeometryAt {
        params: *params,
        point: point.clone(),
        g,
        omega,
        omega_h,
        complex,
        i_h,
        dz: consts.dz,
        k,
        z,
        alpha,
        f_z: s.f_z,
        f_h: s.f_h,
        g_zz: s.g_zz,
        g_h,
        g_alpha,
        g_h_inv,
    })
}

/// Draws a valid point: `f_Z` uniform in `[0.1, 5]`, random directions, `z_0`
/// rescaled to hit the target, `w` standard normal.
pub fn sample_point(params: &ModelParams, rng: &mut impl Rng) -> Point {
    let f_z = Uniform::new_inclusive(0.1, 5.0).expect("valid range").sample(rng);
    sample_point_with_f_z(params, f_z, rng)
}

/// As [`sample_point`] with a prescribed value of `f_Z > 0`.
pub fn sample_point_with_f_z(params: &ModelParams, f_z: f64, rng: &mut impl Rng) -> Point {
    assert!(f_z > 0.0, "target f_Z must be positive");
    let q = params.quaternionic_dim();
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let mut z: Vec<Complex<f64>> = (0..q).map(|_| Complex::new(normal(), normal())).collect();
    let w: Vec<Complex<f64>> = (0..q).map(|_| Complex::new(normal(), normal())).collect();
    let rest: f64 = z.iter().skip(1).map(|c| c.norm_sqr()).sum();
    let r0 = (2.0 * f_z + params.c() + rest).sqrt();
    let dir = z[0] / z[0].norm();
    z[0] = dir * r0;
    Point::from_complex(&z, &w)
}

/// Largest residual of each differential identity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialReport {
    /// `dα_0(A,B) − 2g(D_A Z, B)` (finite differences).
    pub d_alpha0: f64,
    /// `dα_k(A,B) − ω_k(D_A Z, B) − ω_k(A, D_B Z)` (finite differences).
    pub d_alpha_k: f64,
    /// `ι_Z ω_1 + df_Z` (finite differences).
    pub moment_map_omega1: f64,
    /// `ι_Z ω_H + df_H` (finite differences).
    pub moment_map_omega_h: f64,
    /// `L_Z g = 0`, `L_Z ω_1 = 0`, `L_Z ω_2 = ω_3`, `L_Z ω_3 = −ω_2`, `DZ` from finite differences of `Z`.
    pub rotating_symmetry: f64,
    /// `ω_H − ω_1 − d(ι_Z g)` (finite differences).
    pub omega_h_exterior: f64,
    /// Summed identity for `Σ_μ (ω_μ(D_A Z, B) − ω_μ(D_B Z, A)) I_μ I_1 C`.
    pub sum_identity: f64,
    /// The three-line identity block for `ω_1, ω_2, ω_3`.
    pub omega_identities: f64,
}

impl DifferentialReport {
    pub fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("d_alpha0", self.d_alpha0),
            ("d_alpha_k", self.d_alpha_k),
            ("moment_map_omega1", self.moment_map_omega1),
            ("moment_map_omega_h", self.moment_map_omega_h),
            ("rotating_symmetry", self.rotating_symmetry),
            ("omega_h_exterior", self.omega_h_exterior),
            ("sum_identity", self.sum_identity),
            ("omega_identities", self.omega_identities),
        ]
    }
}

/// Matrix of `(d ξ)(e_a, e_b) = ∂_a ξ_b − ∂_b ξ_a` from a list of partials `∂_a ξ`.
fn exterior_derivative(partials: &[Vector]) -> Matrix {
    let d = partials.len();
    Matrix::from_fn(d, d, |a, b| partials[a][b] - partials[b][a])
}

/// `(L_Z ω)(A,B) = ω(D_A Z, B) + ω(A, D_B Z)` for a constant form `ω`.
pub(crate) fn lie_derivative_constant(form: &Matrix, dz: &Matrix) -> Matrix {
    dz.transpose() * form + form * dz
}

pub fn verify_differential_identities(params: &ModelParams, point: &Point) -> Result<DifferentialReport> {
    verify_differential_identities_with_step(params, point, DEFAULT_FD_STEP)
}

pub fn verify_differential_identities_with_step(
    params: &ModelParams,
    point: &Point,
    step: f64,
) -> Result<DifferentialReport> {
    let geom = geometry_at(params, point)?;
    let d = geom.dim();
    let dz = geom.dz.matrix();

    let d_alpha: Vec<Matrix> = (0..4)
        .map(|mu| {
            let partials = gradient(
                params,
                |p| {
                    let z = vector_z(params, p);
                    Ok(geom.g.matrix() * geom.complex[mu].apply(&z))
                },
                point,
                step,
            )?;
            Ok(exterior_derivative(&partials))
        })
        .collect::<Result<_>>()?;

    let d_alpha0 = (&d_alpha[0] - dz.transpose() * geom.g.matrix() * 2.0).amax();
    let d_alpha_k = (1..4)
        .map(|k| (&d_alpha[k] - lie_derivative_constant(geom.omega[k].matrix(), dz)).amax())
        .fold(0.0, f64::max);

    let grad_f_z = Vector::from_vec(gradient(params, |p| Ok(params.f_z(p)), point, step)?);
    let grad_f_h = Vector::from_vec(gradient(params, |p| Ok(params.f_h(p)), point, step)?);
    let iota = |form: &BilinearForm| form.matrix().tr_mul(&geom.z);
    let moment_map_omega1 = (iota(&geom.omega[1]) + &grad_f_z).amax();
    let moment_map_omega_h = (iota(&geom.omega_h) + &grad_f_h).amax();

    // DZ from finite differences of Z: column a is ∂_a Z
    let z_partials = gradient(params, |p| Ok(vector_z(params, p)), point, step)?;
    let dz_fd = Matrix::from_columns(&z_partials);
    let lie = |k: usize| lie_derivative_constant(geom.omega[k].matrix(), &dz_fd);
    let rotating_symmetry = [
        lie(0).amax(),
        lie(1).amax(),
        (lie(2) - geom.omega[3].matrix()).amax(),
        (lie(3) + geom.omega[2].matrix()).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let omega_h_exterior = (geom.omega_h.matrix() - geom.omega[1].matrix() - &d_alpha[0]).amax();

    // Σ_μ (ω_μ(D_A Z, B) − ω_μ(D_B Z, A)) I_μ I_1 C
    //   = −½ Σ_μ (ω_μ(A,B) − ω_μ(B,A)) I_μ C + ω_H(A,B) I_1 C
    let i_mu_i1: Vec<Matrix> = (0..4)
        .map(|mu| geom.complex[mu].matrix() * geom.complex[1].matrix())
        .collect();
    let w_dz: Vec<Matrix> = (0..4).map(|mu| dz.transpose() * geom.omega[mu].matrix()).collect();
    let mut sum_identity: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let mut lhs = Matrix::zeros(d, d);
            let mut rhs = geom.complex[1].matrix() * geom.omega_h.matrix()[(a, b)];
            for mu in 0..4 {
                let w = geom.omega[mu].matrix();
                lhs += &i_mu_i1[mu] * (w_dz[mu][(a, b)] - w_dz[mu][(b, a)]);
                rhs -= geom.complex[mu].matrix() * (0.5 * (w[(a, b)] - w[(b, a)]));
            }
            // columns index C
            sum_identity = sum_identity.max((lhs - rhs).amax());
        }
    }

    // 2ω_k(D_A Z,B) + 2ω_k(A,D_B Z) = {0, 2ω_3, −2ω_2} = ω_1(I_k A,B) − ω_1(I_k B,A)
    let w1 = geom.omega[1].matrix();
    let mut omega_identities: f64 = 0.0;
    let middles = [
        Matrix::zeros(d, d),
        geom.omega[3].matrix() * 2.0,
        geom.omega[2].matrix() * -2.0,
    ];
    for k in 1..4 {
        let left = lie_derivative_constant(geom.omega[k].matrix(), dz) * 2.0;
        let ik_w1 = geom.complex[k].matrix().transpose() * w1;
        let right = &ik_w1 - ik_w1.transpose();
        // the k = 1 line reads −ω_1(I_1 A,B) + ω_1(I_1 B,A)
        let right = if k == 1 { -right } else { right };
        let middle = &middles[k - 1];
        omega_identities = omega_identities
            .max((&left - middle).amax())
            .max((middle - &right).amax());
    }

    Ok(DifferentialReport {
        d_alpha0,
        d_alpha_k,
        moment_map_omega1,
        moment_map_omega_h,
        rotating_symmetry,
        omega_h_exterior,
        sum_identity,
        omega_identities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudo_linear::adjointness_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference_point() -> (ModelParams, Point) {
        let params = ModelParams::new(0, 1.0).unwrap();
        let p = params.point(&[2.0, 0.0, 0.0, 0.0]).unwrap();
        (params, p)
    }

    #[test]
    fn m0_metric_is_negative_definite() {
        let consts = constant_tensors(&ModelParams::new(0, 0.0).unwrap());
        assert_eq!(consts.g.matrix(), &(-Matrix::identity(4, 4)));
    }

    #[test]
    fn m1_metric_signature() {
        let consts = constant_tensors(&ModelParams::new(1, 0.0).unwrap());
        let eig = consts.g.matrix().clone().symmetric_eigen().eigenvalues;
        let pos = eig.iter().filter(|&&v| v > 0.0).count();
        let neg = eig.iter().filter(|&&v| v < 0.0).count();
        assert_eq!((pos, neg), (4, 4));
    }

    #[test]
    fn quaternion_relations_hold_exactly() {
        for m in 0..4 {
            let consts = constant_tensors(&ModelParams::new(m, 0.5).unwrap());
            let [i1, i2, i3] = &consts.complex;
            let id = Endomorphism::identity(4 * (m + 1));
            assert_eq!((i1 * i2).matrix(), i3.matrix());
            assert_eq!((i2 * i3).matrix(), i1.matrix());
            assert_eq!((i3 * i1).matrix(), i2.matrix());
            for i in [i1, i2, i3] {
                assert_eq!((i * i).matrix(), (-&id).matrix());
            }
        }
    }

    #[test]
    fn corrupted_omega2_breaks_quaternion_relation() {
        let params = ModelParams::new(1, 1.0).unwrap().with_corrupted_omega2();
        let consts = constant_tensors(&params);
        let [i1, i2, i3] = &consts.complex;
        assert!(((i1 * i2).matrix() - i3.matrix()).amax() > 1.0);
    }

    #[test]
    fn z_at_reference_point() {
        let (params, p) = reference_point();
        let z = vector_z(&params, &p);
        assert_eq!(z.as_slice(), &[0.0, -2.0, 0.0, 0.0]);
        let origin = Point::new(vec![0.0; 4]);
        assert_eq!(vector_z(&params, &origin).amax(), 0.0);
        assert!(params.check_domain(&origin).is_err());
    }

    #[test]
    fn scalars_at_reference_point() {
        let (params, p) = reference_point();
        let s = scalars(&params, &p).unwrap();
        assert_eq!(s.f_z, 1.5);
        assert_eq!(s.g_zz, -4.0);
        assert_eq!(s.f_h, -2.5);
        assert_eq!(s.f_h, -s.f_z - params.c());
    }

    #[test]
    fn c_zero_gives_opposite_moment_maps() {
        let params = ModelParams::new(2, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let p = sample_point(&params, &mut rng);
            let s = scalars(&params, &p).unwrap();
            assert_eq!(s.f_h, -s.f_z);
        }
    }

    #[test]
    fn g_zz_matches_coordinate_formula() {
        let params = ModelParams::new(2, 0.5).unwrap();
        let consts = constant_tensors(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let p = sample_point(&params, &mut rng);
            let z = vector_z(&params, &p);
            let expected = -(p.z(0).norm_sqr() - p.z(1).norm_sqr() - p.z(2).norm_sqr());
            assert!((consts.g.eval(&z, &z) - expected).abs() < 1e-12 * expected.abs().max(1.0));
            let s = scalars(&params, &p).unwrap();
            assert!((s.f_h - (s.f_z + s.g_zz)).abs() < 1e-12 * s.f_h.abs().max(1.0));
        }
    }

    #[test]
    fn domain_violation() {
        let params = ModelParams::new(0, 1.0).unwrap();
        // f_Z = ½·1 − ½ = 0
        assert!(matches!(
            params.point(&[1.0, 0.0, 0.0, 0.0]),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            geometry_at(&params, &Point::new(vec![0.5, 0.0, 3.0, 0.0])),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn omega_h_matches_display() {
        let params = ModelParams::new(2, 0.5).unwrap();
        let consts = constant_tensors(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let geom = geometry_at(&params, &sample_point(&params, &mut rng)).unwrap();
            assert_eq!(geom.omega_h.matrix(), consts.omega_h.matrix());
        }
    }

    #[test]
    fn k_spectrum_and_trace() {
        let (params, p) = reference_point();
        let geom = geometry_at(&params, &p).unwrap();
        let k2 = (&geom.k * &geom.k).trace();
        assert!((k2 - 3.24).abs() < 1e-12);

        let params = ModelParams::new(2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let geom = geometry_at(&params, &sample_point(&params, &mut rng)).unwrap();
        let mut eig: Vec<f64> = geom
            .k
            .matrix()
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        // K is g-self-adjoint, not symmetric; use the general eigen solver instead
        eig.clear();
        let ev = geom.k.matrix().complex_eigenvalues();
        for v in ev.iter() {
            assert!(v.im.abs() < 1e-8);
            eig.push(v.re);
        }
        let along = geom.f_z * geom.f_z / geom.f_h;
        let n_perp = eig.iter().filter(|v| (*v - geom.f_z).abs() < 1e-8 * geom.f_z).count();
        let n_along = eig.iter().filter(|v| (*v - along).abs() < 1e-8 * along.abs()).count();
        assert_eq!((n_perp, n_along), (8, 4));
    }

    #[test]
    fn k_closed_form_and_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in 0..3 {
            let params = ModelParams::new(m, 0.5).unwrap();
            for _ in 0..5 {
                let geom = geometry_at(&params, &sample_point(&params, &mut rng)).unwrap();
                let scale = geom.k.max_abs().max(1.0);
                assert!((geom.k.matrix() - geom.k_closed().matrix()).amax() < 1e-10 * scale);
                let lowered = geom.g_h.precompose(&geom.k);
                assert!((lowered.matrix() - geom.g.matrix()).amax() < 1e-10);
                assert!(adjointness_residual(&geom.k, &geom.g, 1.0) < 1e-10 * scale);
                assert!(adjointness_residual(&geom.i_h, &geom.g, -1.0) < 1e-12);
                let ih2 = &geom.i_h * &geom.i_h;
                assert!((ih2.matrix() + Matrix::identity(geom.dim(), geom.dim())).amax() < 1e-12);
                for mu in 0..4 {
                    assert!(geom.k.commutator(&geom.complex[mu]).max_abs() < 1e-10 * scale);
                    assert!(geom.i_h.commutator(&geom.complex[mu]).max_abs() < 1e-12);
                }
                assert!(geom.k.commutator(&geom.i_h).max_abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn differential_identities_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (m, c) in [(0, 0.0), (1, 1.0), (2, 0.5)] {
            let params = ModelParams::new(m, c).unwrap();
            for _ in 0..4 {
                let p = sample_point(&params, &mut rng);
                let r = verify_differential_identities(&params, &p).unwrap();
                for (name, v) in r.entries() {
                    let tol = if name == "sum_identity" || name == "omega_identities" {
                        1e-8
                    } else {
                        1e-6
                    };
                    assert!(v < tol, "{name} residual {v:e} at m={m} c={c}");
                }
            }
        }
    }

    #[test]
    fn sampled_points_hit_target_f_z() {
        let params = ModelParams::new(3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for target in [0.1, 1.0, 4.5] {
            let p = sample_point_with_f_z(&params, target, &mut rng);
            assert!((params.f_z(&p) - target).abs() < 1e-12 * target.max(1.0) * 10.0);
        }
    }
}

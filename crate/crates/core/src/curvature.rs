//! Invariants of `R̃`: the `Λ²` curvature operator and its norm, scalar
//! curvature, the split `R̃ = νR_0 + R_1`, and traces of powers of `K`.
//!
//! All formulas are in terms of the quaternionic dimension `q = m + 1`.
//! On the model with `q` quaternionic dimensions, at a point with `t = f_Z/f_H`,
//!
//! ```text
//! ‖R‖² = q(5q+1) + 3(t³ + (q−1)t)² + 3(t⁶ + (q−1)t²),    scal = −4q(q+2).
//! ```

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::correspondence::{rtilde_closed_in_frame, rtilde_groups};
use crate::error::{Error, Result};
use crate::flat_model::GeometryAt;
use crate::pseudo_linear::{
    lambda2_op_from_frame_components, pseudo_gram_schmidt, Endomorphism, Frame, Lambda2Operator, Matrix, QuadCov,
    Vector,
};

/// The reduced scalar curvature of every metric in the family.
pub const NU: f64 = -1.0;

/// A `g_H`-orthonormal frame, built from the coordinate basis.
pub fn g_h_frame(geom: &GeometryAt) -> Result<Frame> {
    let d = geom.dim();
    pseudo_gram_schmidt(&geom.g_h, &Matrix::identity(d, d))
}

/// Components of `R̃` in a `g_H`-orthonormal frame.
#[derive(Debug, Clone)]
pub struct FrameCurvature {
    pub frame: Frame,
    pub components: QuadCov,
}

impl FrameCurvature {
    /// A coordinate tensor moved into the frame of [`g_h_frame`].
    pub fn from_coordinates(geom: &GeometryAt, rtilde: &QuadCov) -> Result<Self> {
        let frame = g_h_frame(geom)?;
        let components = rtilde.in_frame(&frame);
        Ok(FrameCurvature { frame, components })
    }

    /// The closed expression assembled directly in the frame. Far better
    /// conditioned than [`FrameCurvature::from_coordinates`] of
    /// [`rtilde_closed`] when `g_H` is ill-conditioned (small `f_Z`).
    pub fn closed(geom: &GeometryAt) -> Result<Self> {
        let frame = g_h_frame(geom)?;
        let components = rtilde_closed_in_frame(geom, &frame);
        Ok(FrameCurvature { frame, components })
    }

    /// The `Λ²` operator, `M[(c,x),(a,b)] = ε_c ε_x R̃(a,b,c,x)`.
    pub fn operator(&self) -> Result<Lambda2Operator> {
        let r = &self.components;
        let residual = r.pair_antisymmetry_residual();
        if residual > 1e-10 * r.max_abs().max(1.0) {
            return Err(Error::PairAntisymmetryViolated { residual });
        }
        Ok(lambda2_op_from_frame_components(r, self.frame.signs()))
    }

    /// `‖R‖² = tr(M²)`.
    pub fn norm(&self) -> Result<f64> {
        let op = self.operator()?;
        Ok(op.trace_of_product(&op))
    }

    /// `scal = Σ_b ε_b Ric(e_b, e_b)` with `Ric(B, C) = Σ_a ε_a R̃(e_a, B, C, e_a)`.
    pub fn scalar_curvature(&self) -> f64 {
        let eps = self.frame.signs();
        let r = &self.components;
        let mut scal = 0.0;
        for b in 0..r.dim() {
            let ric: f64 = (0..r.dim()).map(|a| eps[a] * r.get(a, b, b, a)).sum();
            scal += eps[b] * ric;
        }
        scal
    }
}

/// `R̃` (coordinate components) as a self-adjoint operator on `Λ²` in the basis
/// induced by a `g_H`-orthonormal frame.
pub fn curvature_operator(geom: &GeometryAt, rtilde: &QuadCov) -> Result<Lambda2Operator> {
    FrameCurvature::from_coordinates(geom, rtilde)?.operator()
}

/// `‖R‖² = tr(M²)` for the `Λ²` operator `M` of a coordinate tensor.
pub fn curvature_norm_frame(geom: &GeometryAt, rtilde: &QuadCov) -> Result<f64> {
    FrameCurvature::from_coordinates(geom, rtilde)?.norm()
}

/// `‖R‖²` of the closed expression, assembled in the frame.
pub fn closed_norm_frame(geom: &GeometryAt) -> Result<f64> {
    FrameCurvature::closed(geom)?.norm()
}

/// The closed form of `‖R‖²` in terms of `q`, `f_Z > 0`, `f_H < 0`.
pub fn curvature_norm_closed(q: usize, f_z: f64, f_h: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::Config("quaternionic dimension must be positive".into()));
    }
    if !(f_z > 0.0 && f_h < 0.0) {
        return Err(Error::DomainViolation(format!(
            "closed norm needs f_Z > 0 and f_H < 0, got f_Z = {f_z:e}, f_H = {f_h:e}"
        )));
    }
    let q = q as f64;
    let t = f_z / f_h;
    Ok(q * (5.0 * q + 1.0) + 3.0 * (t.powi(3) + (q - 1.0) * t).powi(2) + 3.0 * (t.powi(6) + (q - 1.0) * t * t))
}

/// The closed norm as a function of `ρ = 2f_Z` at deformation constant `c`.
pub fn norm_at_rho(q: usize, c: f64, rho: f64) -> Result<f64> {
    let f_z = 0.5 * rho;
    curvature_norm_closed(q, f_z, -f_z - c)
}

/// Scalar curvature of a coordinate tensor.
pub fn scalar_curvature(geom: &GeometryAt, rtilde: &QuadCov) -> Result<f64> {
    Ok(FrameCurvature::from_coordinates(geom, rtilde)?.scalar_curvature())
}

/// `tr(K^n)` from the explicit matrix and from its closed form, together with
/// the traces that must vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTraces {
    pub power: u32,
    pub closed: f64,
    /// `4((q−1) f_Z^n + f_Z^{2n} / |f_H|^n)`, the size of the terms of `closed`.
    pub magnitude: f64,
    pub matrix: f64,
    /// `max_k |tr(K^n I_k)|`.
    pub with_i_k: f64,
    /// `|tr(K^n I_H)|`.
    pub with_i_h: f64,
    /// `max_k |tr(K^n I_H I_k)|`.
    pub with_i_h_i_k: f64,
}

impl KTraces {
    /// Error relative to [`KTraces::magnitude`]; `closed` itself cancels to 0
    /// for odd `n` when `q = 2` and `c = 0`.
    pub fn relative_error(&self) -> f64 {
        (self.matrix - self.closed).abs() / self.magnitude
    }

    pub fn max_vanishing(&self) -> f64 {
        self.with_i_k.max(self.with_i_h).max(self.with_i_h_i_k)
    }
}

/// `4((q−1) f_Z^n + f_Z^{2n} / f_H^n)`.
pub fn trace_k_closed(q: usize, f_z: f64, f_h: f64, power: u32) -> f64 {
    let n = power as i32;
    4.0 * ((q as f64 - 1.0) * f_z.powi(n) + f_z.powi(2 * n) / f_h.powi(n))
}

pub fn trace_k_powers(geom: &GeometryAt, power: u32) -> KTraces {
    let kn = geom.k.pow(power);
    let i_h = &geom.i_h;
    let mut with_i_k: f64 = 0.0;
    let mut with_i_h_i_k: f64 = 0.0;
    for k in 1..4 {
        let ik = &geom.complex[k];
        with_i_k = with_i_k.max((&kn * ik).trace().abs());
        with_i_h_i_k = with_i_h_i_k.max((&(&kn * i_h) * ik).trace().abs());
    }
    KTraces {
        power,
        closed: trace_k_closed(geom.params.quaternionic_dim(), geom.f_z, geom.f_h, power),
        magnitude: trace_k_closed(geom.params.quaternionic_dim(), geom.f_z, geom.f_h.abs(), power),
        matrix: kn.trace(),
        with_i_k,
        with_i_h: (&kn * i_h).trace().abs(),
        with_i_h_i_k,
    }
}

/// `R̃ = ν R_0 + R_1` with `R_0` the curvature of quaternionic projective space.
#[derive(Debug, Clone)]
pub struct AlekseevskySplit {
    /// `−⅛(g_H ⊙ g_H + Σ_k g_H(I_k·,·) ⊘ g_H(I_k·,·))`.
    pub r0_part: QuadCov,
    /// `R̃ − ν R_0`.
    pub r1_part: QuadCov,
    pub nu: f64,
}

pub fn alekseevsky_split(geom: &GeometryAt, rtilde: &QuadCov) -> AlekseevskySplit {
    let r0_part = rtilde_groups(geom).metric_group.scale(-1.0);
    let mut r1_part = rtilde.clone();
    r1_part.add_scaled(&r0_part, -NU);
    AlekseevskySplit {
        r0_part,
        r1_part,
        nu: NU,
    }
}

/// The endomorphism `C ↦ R(A,B)C` of a `g_H`-lowered tensor.
pub fn raised_endomorphism(geom: &GeometryAt, lowered: &QuadCov, a: &Vector, b: &Vector) -> Endomorphism {
    let d = geom.dim();
    // l[(c, x)] = R(A, B, e_c, e_x)
    let mut l = Matrix::zeros(d, d);
    for c in 0..d {
        for x in 0..d {
            let mut acc = 0.0;
            for i in 0..d {
                if a[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    acc += a[i] * b[j] * lowered.get(i, j, c, x);
                }
            }
            l[(c, x)] = acc;
        }
    }
    Endomorphism::new(geom.g_h_inv() * l.transpose())
}

/// A random vector of unit `g_H`-length.
pub fn random_g_h_unit(geom: &GeometryAt, rng: &mut impl Rng) -> Vector {
    let v = Vector::from_fn(geom.dim(), |_, _| StandardNormal.sample(rng));
    let n = geom.g_h.eval(&v, &v).sqrt();
    v / n
}

/// `max_k ‖[R_1(A,B), I_k]‖_F` over `samples` random `g_H`-unit pairs.
pub fn hk_type_residual(geom: &GeometryAt, r1: &QuadCov, samples: usize, rng: &mut impl Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = random_g_h_unit(geom, rng);
        let b = random_g_h_unit(geom, rng);
        let e = raised_endomorphism(geom, r1, &a, &b);
        for k in 1..4 {
            worst = worst.max(e.commutator(&geom.complex[k]).matrix().norm());
        }
    }
    worst
}

/// `max |Φ(A,B,I_j C,I_j X) − Φ(A,B,C,X)|` for `Φ = ω_H ⊘ ω_H + Σ_k ω_H(I_k·,·) ⊙ ω_H(I_k·,·)`,
/// over `samples` random `g_H`-unit tuples and `j = 1, 2, 3`, relative to `max(1, |Φ|)`.
pub fn invariance_residual(geom: &GeometryAt, samples: usize, rng: &mut impl Rng) -> f64 {
    let phi = rtilde_groups(geom).twist_group;
    let scale = phi.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let [a, b, c, x] = std::array::from_fn(|_| random_g_h_unit(geom, rng));
        let base = phi.eval(&a, &b, &c, &x);
        for j in 1..4 {
            let ic = geom.complex[j].apply(&c);
            let ix = geom.complex[j].apply(&x);
            worst = worst.max((phi.eval(&a, &b, &ic, &ix) - base).abs() / scale);
        }
    }
    worst
}

/// The curvature summary at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub q: usize,
    pub f_z: f64,
    pub f_h: f64,
    pub rho: f64,
    pub norm_frame: f64,
    pub norm_closed: f64,
    pub scal: f64,
    pub nu: f64,
    /// `|norm_frame − norm_closed| / norm_closed`.
    pub norm_residual: f64,
    /// `|scal + 4q(q+2)| / 4q(q+2)`.
    pub scal_residual: f64,
    /// Largest asymmetry of the `Λ²` operator.
    pub operator_residual: f64,
}

/// The report for frame components `r`, e.g. [`FrameCurvature::closed`].
pub fn norm_report(geom: &GeometryAt, r: &FrameCurvature) -> Result<NormReport> {
    let q = geom.params.quaternionic_dim();
    let op = r.operator()?;
    let norm_frame = op.trace_of_product(&op);
    let norm_closed = curvature_norm_closed(q, geom.f_z, geom.f_h)?;
    let scal = r.scalar_curvature();
    let expected_scal = -4.0 * (q * (q + 2)) as f64;
    Ok(NormReport {
        q,
        f_z: geom.f_z,
        f_h: geom.f_h,
        rho: 2.0 * geom.f_z,
        norm_frame,
        norm_closed,
        scal,
        nu: scal / (4.0 * (q * (q + 2)) as f64),
        norm_residual: (norm_frame - norm_closed).abs() / norm_closed,
        scal_residual: (scal - expected_scal).abs() / expected_scal.abs(),
        operator_residual: op.self_adjointness_residual(),
    })
}

/// `true` when consecutive values strictly increase, or all strictly decrease.
pub fn is_strictly_monotone(values: &[f64]) -> bool {
    let inc = values.windows(2).all(|w| w[1] > w[0]);
    let dec = values.windows(2).all(|w| w[1] < w[0]);
    inc || dec
}

//! The connection correction `S` with `∇^S = D + S`, and the curvature `R̃`.
//!
//! `S` is available in closed form and from its two parts `S^H` (Koszul
//! formula for `g_H`, derivatives by finite differences) and `S^Q` (the twist
//! contribution). `R̃` is available from the closed Kulkarni–Nomizu expression
//! and directly, by differentiating `S` numerically and assembling
//!
//! ```text
//! T(A,B)C = (D_A S)_B C − (D_B S)_A C + [S_A, S_B]C − f_H⁻¹ ω_H(A,B)(D_C Z + S_Z C).
//! ```
//!
//! The flat model has `R ≡ 0`; it is still carried explicitly.

use crate::error::{Error, Result};
use crate::flat_model::{geometry_at, GeometryAt};
use crate::kulkarni::{obar, owedge};
use crate::pseudo_linear::{gradient_with_scheme, BilinearForm, FdScheme, Frame, Matrix, QuadCov, Vector};

/// Relative step for the nested differences of [`SPath::FromParts`]. Much
/// smaller steps drown the outer difference in rounding noise from the inner one.
pub const NESTED_FD_STEP: f64 = 2e-4;

/// A `(1,2)` tensor at a point: `(A, B) ↦ S_A B`.
///
/// Stored with the output index fastest: `data[(a·d + b)·d + c] = (S_{e_a} e_b)^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCorrection {
    dim: usize,
    data: Vec<f64>,
}

impl ConnectionCorrection {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    /// Builds the tensor from its values on basis pairs.
    pub fn from_basis(dim: usize, mut f: impl FnMut(usize, usize) -> Vector) -> Self {
        let mut s = Self::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                let v = f(a, b);
                s.slot_mut(a, b).copy_from_slice(v.as_slice());
            }
        }
        s
    }

    fn from_data(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn slot(&self, a: usize, b: usize) -> &[f64] {
        let start = (a * self.dim + b) * self.dim;
        &self.data[start..start + self.dim]
    }

    fn slot_mut(&mut self, a: usize, b: usize) -> &mut [f64] {
        let start = (a * self.dim + b) * self.dim;
        &mut self.data[start..start + self.dim]
    }

    /// `(S_{e_a} e_b)^c`.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    pub fn apply(&self, a: &Vector, b: &Vector) -> Vector {
        let d = self.dim;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = a[i] * b[j];
                if w == 0.0 {
                    continue;
                }
                for (o, s) in out.iter_mut().zip(self.slot(i, j)) {
                    *o += w * s;
                }
            }
        }
        out
    }

    /// The endomorphism `S_A = S(A, ·)`.
    pub fn s_a(&self, a: &Vector) -> Matrix {
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                for (c, s) in self.slot(i, j).iter().enumerate() {
                    m[(c, j)] += a[i] * s;
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &ConnectionCorrection) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn add(&self, other: &ConnectionCorrection) -> ConnectionCorrection {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::from_data(self.dim, data)
    }

    /// `max |S_AB − S_BA − f_H⁻¹ ω_H(A,B) Z|` over basis pairs.
    pub fn torsion_residual(&self, geom: &GeometryAt) -> f64 {
        let d = self.dim;
        let wh = geom.omega_h.matrix();
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let t = self.get(a, b, c) - self.get(b, a, c) - wh[(a, b)] * geom.z[c] / geom.f_h;
                    r = r.max(t.abs());
                }
            }
        }
        r
    }

    /// `max |(D_A g_H)(B,C) − g_H(S_AB, C) − g_H(B, S_AC)|`, with `D g_H` by finite differences.
    pub fn metric_compatibility_residual(&self, geom: &GeometryAt, step: f64) -> Result<f64> {
        let d = self.dim;
        let dg = g_h_derivatives(geom, step)?;
        let gh = geom.g_h.matrix();
        let mut r: f64 = 0.0;
        for (a, dg_a) in dg.iter().enumerate() {
            // lowered[b][c] = g_H(S_{e_a} e_b, e_c)
            let s_a = self.s_a(&basis(d, a));
            let lowered = s_a.transpose() * gh;
            let rhs = &lowered + lowered.transpose();
            r = r.max((dg_a - rhs).amax());
        }
        Ok(r)
    }

    /// `max |g_H(S_AB, C) + g_H(S_AC, B)|`: skewness in the last two slots.
    pub fn skew_residual(&self, metric: &BilinearForm) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for a in 0..d {
            let lowered = self.s_a(&basis(d, a)).transpose() * metric.matrix();
            r = r.max((&lowered + lowered.transpose()).amax());
        }
        r
    }

    /// `max |S_AB − S_BA|`.
    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..a {
                for c in 0..d {
                    r = r.max((self.get(a, b, c) - self.get(b, a, c)).abs());
                }
            }
        }
        r
    }
}

fn basis(d: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[i] = 1.0;
    v
}

/// Matrices used repeatedly by the closed formula for `S`.
struct SData {
    /// `M_μ` with `g(I_μ I_H A, B) = Aᵀ M_μ B`.
    m: [Matrix; 4],
    /// `I_μ I_1`.
    p: [Matrix; 4],
    iz: [Vector; 4],
}

impl SData {
    fn new(geom: &GeometryAt) -> Self {
        let g = geom.g.matrix();
        Self {
            m: std::array::from_fn(|mu| (geom.complex[mu].matrix() * geom.i_h.matrix()).transpose() * g),
            p: std::array::from_fn(|mu| geom.complex[mu].matrix() * geom.complex[1].matrix()),
            iz: std::array::from_fn(|mu| geom.i_z(mu)),
        }
    }
}

/// `S_AB = ½ Σ_μ [f_H⁻¹ g(I_μ I_H A, B) I_μ Z − f_Z⁻¹(α_μ(A) I_μ I_1 B + α_μ(B) I_μ I_1 A)]`.
pub fn s_closed(geom: &GeometryAt, a: &Vector, b: &Vector) -> Vector {
    let mut out = Vector::zeros(geom.dim());
    for mu in 0..4 {
        let i_mu = geom.complex[mu].matrix();
        let i1 = geom.complex[1].matrix();
        let ih_a = i_mu * (geom.i_h.matrix() * a);
        out += geom.i_z(mu) * (geom.g.eval(&ih_a, b) / geom.f_h);
        let alpha_a = geom.alpha[mu].dot(a);
        let alpha_b = geom.alpha[mu].dot(b);
        out -= (i_mu * (i1 * b)) * (alpha_a / geom.f_z) + (i_mu * (i1 * a)) * (alpha_b / geom.f_z);
    }
    out * 0.5
}

/// The closed formula for `S` on all basis pairs.
pub fn s_closed_tensor(geom: &GeometryAt) -> ConnectionCorrection {
    let d = geom.dim();
    let sd = SData::new(geom);
    let mut data = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            let out = &mut data[(a * d + b) * d..(a * d + b + 1) * d];
            for mu in 0..4 {
                let twist = 0.5 * sd.m[mu][(a, b)] / geom.f_h;
                let aa = 0.5 * geom.alpha[mu][a] / geom.f_z;
                let ab = 0.5 * geom.alpha[mu][b] / geom.f_z;
                for (c, o) in out.iter_mut().enumerate() {
                    *o += twist * sd.iz[mu][c] - aa * sd.p[mu][(c, b)] - ab * sd.p[mu][(c, a)];
                }
            }
        }
    }
    ConnectionCorrection::from_data(d, data)
}

/// `∂_a g_H` for every coordinate direction, by central differences.
pub fn g_h_derivatives(geom: &GeometryAt, step: f64) -> Result<Vec<Matrix>> {
    g_h_derivatives_with_scheme(geom, step, FdScheme::Richardson)
}

pub fn g_h_derivatives_with_scheme(geom: &GeometryAt, step: f64, scheme: FdScheme) -> Result<Vec<Matrix>> {
    let params = geom.params;
    gradient_with_scheme(
        &params,
        |p| Ok(geometry_at(&params, p)?.g_h.matrix().clone()),
        &geom.point,
        step,
        scheme,
    )
}

/// `S = S^H + S^Q`.
#[derive(Debug, Clone)]
pub struct SplitCorrection {
    /// Difference of the Levi-Civita connections of `g_H` and `g`.
    pub s_h: ConnectionCorrection,
    /// Twist contribution, skew for `g_H`.
    pub s_q: ConnectionCorrection,
}

impl SplitCorrection {
    pub fn total(&self) -> ConnectionCorrection {
        self.s_h.add(&self.s_q)
    }
}

/// `S^H` from the Koszul formula with finite-difference derivatives of `g_H`,
/// and `S^Q` from the twist data.
pub fn s_from_parts_tensor(geom: &GeometryAt, step: f64) -> Result<SplitCorrection> {
    s_from_parts_tensor_with_scheme(geom, step, FdScheme::Richardson)
}

pub fn s_from_parts_tensor_with_scheme(geom: &GeometryAt, step: f64, scheme: FdScheme) -> Result<SplitCorrection> {
    let d = geom.dim();
    let dg = g_h_derivatives_with_scheme(geom, step, scheme)?;
    let gh_inv = geom.g_h_inv();
    let wh = geom.omega_h.matrix();
    let gh_z = geom.g_h.flat(&geom.z);
    let mut s_h = ConnectionCorrection::zeros(d);
    let mut s_q = ConnectionCorrection::zeros(d);
    let mut cov = Vector::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                cov[c] = 0.5 * (dg[a][(b, c)] + dg[b][(c, a)] - dg[c][(a, b)]);
            }
            s_h.slot_mut(a, b).copy_from_slice((gh_inv * &cov).as_slice());
            for c in 0..d {
                cov[c] = 0.5 * (gh_z[c] * wh[(a, b)] - gh_z[a] * wh[(b, c)] - gh_z[b] * wh[(a, c)]) / geom.f_h;
            }
            s_q.slot_mut(a, b).copy_from_slice((gh_inv * &cov).as_slice());
        }
    }
    if !s_h.data.iter().chain(&s_q.data).all(|v| v.is_finite()) {
        return Err(Error::DomainViolation("non-finite connection coefficients".into()));
    }
    Ok(SplitCorrection { s_h, s_q })
}

/// `S^H_AB + S^Q_AB`.
pub fn s_from_parts(geom: &GeometryAt, a: &Vector, b: &Vector, step: f64) -> Result<Vector> {
    Ok(s_from_parts_tensor(geom, step)?.total().apply(a, b))
}

/// Which construction of `S` feeds the direct curvature path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SPath {
    /// Closed formula, differentiated once numerically.
    Closed,
    /// `S^H + S^Q` with `S^H` itself from finite differences, so two nested differences.
    FromParts,
}

/// `S` at the point of `geom` by the chosen construction.
pub fn s_for_path(geom: &GeometryAt, path: SPath, step: f64) -> Result<ConnectionCorrection> {
    match path {
        SPath::Closed => Ok(s_closed_tensor(geom)),
        SPath::FromParts => Ok(s_from_parts_tensor_with_scheme(geom, step, FdScheme::Richardson6)?.total()),
    }
}

/// `∂_a S` for every coordinate direction.
pub fn s_derivatives(geom: &GeometryAt, path: SPath, step: f64) -> Result<Vec<ConnectionCorrection>> {
    let params = geom.params;
    let d = geom.dim();
    let scheme = match path {
        SPath::Closed => FdScheme::Richardson,
        SPath::FromParts => FdScheme::Richardson6,
    };
    let partials = gradient_with_scheme(
        &params,
        |p| Ok(s_for_path(&geometry_at(&params, p)?, path, step)?.data),
        &geom.point,
        step,
        scheme,
    )?;
    Ok(partials
        .into_iter()
        .map(|data| ConnectionCorrection::from_data(d, data))
        .collect())
}

/// The three constituents of `T(A,B)C` evaluated by their closed displays.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaTerms {
    /// `(D_A S)_B C − (D_B S)_A C`.
    pub ds: Vector,
    /// `[S_A, S_B] C`.
    pub comm: Vector,
    /// `D_C Z + S_Z C`.
    pub dzsz: Vector,
}

/// Precomputed tensors for evaluating the closed displays many times at one point.
pub struct LemmaContext<'a> {
    geom: &'a GeometryAt,
    /// `I_μ Z`.
    iz: [Vector; 4],
    /// `g(I_μ I_1 Z, ·)`.
    ci1z: [Vector; 4],
    /// `g(I_μ I_H ·, ·)` as a matrix.
    mih: [Matrix; 4],
    /// `g(I_μ I_H ·, Z)`.
    cihz: [Vector; 4],
    /// `g(I_μ I_H Z, ·)`.
    cihz_first: [Vector; 4],
    /// `g(I_μ I_1 I_H ·, ·) + g(I_μ ·, ·)`.
    p: [Matrix; 4],
    /// `ω_μ(·,·) − ω_μ(·,·)ᵀ`.
    wskew: [Matrix; 4],
    /// `I_μ D Z`.
    i_dz: [Matrix; 4],
    /// `I_μ I_λ` indexed `[μ][λ]`.
    ii: [[Matrix; 4]; 4],
    /// `I_μ I_1`.
    ii1: [Matrix; 4],
    /// `ω_H(Z, ·)`.
    whz: Vector,
    /// `½(I_H − (f_H/f_Z) I_1)`.
    dzsz_linear: Matrix,
}

impl<'a> LemmaContext<'a> {
    pub fn new(geom: &'a GeometryAt) -> Self {
        let g = geom.g.matrix();
        let i = |mu: usize| geom.complex[mu].matrix();
        let ih = geom.i_h.matrix();
        let z = &geom.z;
        let iz: [Vector; 4] = std::array::from_fn(|mu| i(mu) * z);
        let i1z = i(1) * z;
        Self {
            geom,
            ci1z: std::array::from_fn(|mu| g * (i(mu) * &i1z)),
            mih: std::array::from_fn(|mu| (i(mu) * ih).transpose() * g),
            cihz: std::array::from_fn(|mu| (i(mu) * ih).transpose() * (g * z)),
            cihz_first: std::array::from_fn(|mu| g * (i(mu) * (ih * z))),
            p: std::array::from_fn(|mu| (i(mu) * i(1) * ih).transpose() * g + i(mu).transpose() * g),
            wskew: std::array::from_fn(|mu| {
                let w = geom.omega[mu].matrix();
                w - w.transpose()
            }),
            i_dz: std::array::from_fn(|mu| i(mu) * geom.dz.matrix()),
            ii: std::array::from_fn(|mu| std::array::from_fn(|la| i(mu) * i(la))),
            ii1: std::array::from_fn(|mu| i(mu) * i(1)),
            whz: geom.omega_h.matrix().tr_mul(z),
            dzsz_linear: (ih - i(1) * (geom.f_h / geom.f_z)) * 0.5,
            iz,
        }
    }

    /// The closed display for `(D_A S)_B C − (D_B S)_A C` with `R = 0`.
    pub fn term_ds(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let geom = self.geom;
        let (f_z, f_h) = (geom.f_z, geom.f_h);
        let i = |mu: usize| geom.complex[mu].matrix();
        let wh_za = self.whz.dot(a);
        let wh_zb = self.whz.dot(b);
        let a1a = geom.alpha[1].dot(a);
        let a1b = geom.alpha[1].dot(b);
        let mut sum = Vector::zeros(geom.dim());
        for mu in 0..4 {
            let w_hb_c = (self.mih[mu].tr_mul(b)).dot(c);
            let w_ha_c = (self.mih[mu].tr_mul(a)).dot(c);
            let (ga, gb, gc) = (self.ci1z[mu].dot(a), self.ci1z[mu].dot(b), self.ci1z[mu].dot(c));
            let ia = i(mu) * a;
            let ib = i(mu) * b;
            let ic = i(mu) * c;

            sum += &self.iz[mu] * ((wh_za * w_hb_c - wh_zb * w_ha_c) / (f_h * f_h));
            sum += (&ic * gb + &ib * gc) * (a1a / (f_z * f_z));
            sum -= (&ic * ga + &ia * gc) * (a1b / (f_z * f_z));
            sum += (&self.i_dz[mu] * a * w_hb_c - &self.i_dz[mu] * b * w_ha_c) / f_h;
            let pa = self.p[mu].tr_mul(a).dot(c);
            let pb = self.p[mu].tr_mul(b).dot(c);
            sum += (&ib * pa - &ia * pb) / (2.0 * f_z);
            let wab = self.wskew[mu].tr_mul(a).dot(b);
            sum += &ic * (wab / (2.0 * f_z));
        }
        let wh_ab = geom.omega_h.eval(a, b);
        sum * 0.5 - (i(1) * c) * (wh_ab / (2.0 * f_z))
    }

    /// The closed display for `[S_A, S_B] C`.
    pub fn term_comm(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let geom = self.geom;
        let (f_z, f_h) = (geom.f_z, geom.f_h);
        let d = geom.dim();
        let mut quad = Vector::zeros(d);
        let h_az: [f64; 4] = std::array::from_fn(|mu| self.cihz[mu].dot(a));
        let h_bz: [f64; 4] = std::array::from_fn(|mu| self.cihz[mu].dot(b));
        let h_bc: [f64; 4] = std::array::from_fn(|mu| self.mih[mu].tr_mul(b).dot(c));
        let h_ac: [f64; 4] = std::array::from_fn(|mu| self.mih[mu].tr_mul(a).dot(c));
        let ga: [f64; 4] = std::array::from_fn(|mu| self.ci1z[mu].dot(a));
        let gb: [f64; 4] = std::array::from_fn(|mu| self.ci1z[mu].dot(b));
        let gc: [f64; 4] = std::array::from_fn(|mu| self.ci1z[mu].dot(c));
        for mu in 0..4 {
            for la in 0..4 {
                let coeff_z = (h_az[mu] * h_bc[la] - h_bz[mu] * h_ac[la]) / (f_h * f_h);
                quad += &self.ii[la][mu] * &geom.z * coeff_z;
                let coeff_c = (ga[mu] * gb[la] - gb[mu] * ga[la]) / (f_z * f_z);
                quad += &self.ii[mu][la] * c * coeff_c;
                quad += &self.ii[la][mu] * a * (gb[mu] * gc[la] / (f_z * f_z));
                quad -= &self.ii[la][mu] * b * (ga[mu] * gc[la] / (f_z * f_z));
            }
        }
        let wh_ab = geom.omega_h.eval(a, b);
        let mut lin = Vector::zeros(d);
        for mu in 0..4 {
            lin += &self.iz[mu] * (2.0 * wh_ab * gc[mu]);
            lin -= (&self.ii1[mu] * a * h_bc[mu] - &self.ii1[mu] * b * h_ac[mu]) * geom.g_zz;
        }
        quad * 0.25 + lin / (4.0 * f_z * f_h)
    }

    /// The closed display for `D_C Z + S_Z C`.
    pub fn term_dzsz(&self, c: &Vector) -> Vector {
        let geom = self.geom;
        let mut out = &self.dzsz_linear * c;
        for mu in 0..4 {
            let coeff = self.cihz_first[mu].dot(c) / geom.f_h + self.ci1z[mu].dot(c) / geom.f_z;
            out += &self.iz[mu] * (0.5 * coeff);
        }
        out
    }

    pub fn terms(&self, a: &Vector, b: &Vector, c: &Vector) -> LemmaTerms {
        LemmaTerms {
            ds: self.term_ds(a, b, c),
            comm: self.term_comm(a, b, c),
            dzsz: self.term_dzsz(c),
        }
    }

    /// `T(A,B)C` assembled from the three closed displays.
    pub fn t_assembled(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let t = self.terms(a, b, c);
        let wh_ab = self.geom.omega_h.eval(a, b);
        t.ds + t.comm - t.dzsz * (wh_ab / self.geom.f_h)
    }
}

/// The three closed displays at one triple.
pub fn lemma_terms(geom: &GeometryAt, a: &Vector, b: &Vector, c: &Vector) -> LemmaTerms {
    LemmaContext::new(geom).terms(a, b, c)
}

/// Direct (numerical) evaluation of each constituent of `T` from a given `S`
/// and its coordinate derivatives.
pub struct DirectTerms<'a> {
    geom: &'a GeometryAt,
    s: &'a ConnectionCorrection,
    ds: &'a [ConnectionCorrection],
}

impl<'a> DirectTerms<'a> {
    pub fn new(geom: &'a GeometryAt, s: &'a ConnectionCorrection, ds: &'a [ConnectionCorrection]) -> Self {
        Self { geom, s, ds }
    }

    /// `(D_A S)_B C` from the coordinate derivatives of `S`.
    fn d_s(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let mut out = Vector::zeros(self.geom.dim());
        for (i, part) in self.ds.iter().enumerate() {
            if a[i] != 0.0 {
                out += part.apply(b, c) * a[i];
            }
        }
        out
    }

    pub fn term_ds(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        self.d_s(a, b, c) - self.d_s(b, a, c)
    }

    pub fn term_comm(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let sb_c = self.s.apply(b, c);
        let sa_c = self.s.apply(a, c);
        self.s.apply(a, &sb_c) - self.s.apply(b, &sa_c)
    }

    pub fn term_dzsz(&self, c: &Vector) -> Vector {
        self.geom.dz.apply(c) + self.s.apply(&self.geom.z, c)
    }

    pub fn terms(&self, a: &Vector, b: &Vector, c: &Vector) -> LemmaTerms {
        LemmaTerms {
            ds: self.term_ds(a, b, c),
            comm: self.term_comm(a, b, c),
            dzsz: self.term_dzsz(c),
        }
    }

    /// `T(A,B)C`.
    pub fn t(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let t = self.terms(a, b, c);
        let wh_ab = self.geom.omega_h.eval(a, b);
        t.ds + t.comm - t.dzsz * (wh_ab / self.geom.f_h)
    }
}

/// Lowers a `(1,3)` tensor given on basis triples: `(A,B,C,X) ↦ h(T(A,B)C, X)`.
fn lower(d: usize, metric: &BilinearForm, mut t: impl FnMut(usize, usize, usize) -> Vector) -> QuadCov {
    let mut out = QuadCov::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let low = metric.flat(&t(a, b, c));
                for x in 0..d {
                    out.set(a, b, c, x, low[x]);
                }
            }
        }
    }
    out
}

/// `T(A,B)C` on all basis triples from the direct path, lowered with `g_H`.
pub fn t_tensor(geom: &GeometryAt, path: SPath, step: f64) -> Result<QuadCov> {
    let d = geom.dim();
    let s = s_for_path(geom, path, step)?;
    let ds = s_derivatives(geom, path, step)?;
    let direct = DirectTerms::new(geom, &s, &ds);
    // S_{e_a} as matrices, so the commutator is a matrix product
    let s_mats: Vec<Matrix> = (0..d).map(|a| s.s_a(&basis(d, a))).collect();
    let dzsz = geom.dz.matrix() + s.s_a(&geom.z);
    let wh = geom.omega_h.matrix();
    let mut cols: Vec<Matrix> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut m = &s_mats[a] * &s_mats[b] - &s_mats[b] * &s_mats[a];
            m -= &dzsz * (wh[(a, b)] / geom.f_h);
            for c in 0..d {
                let ds_ab = direct.term_ds(&basis(d, a), &basis(d, b), &basis(d, c));
                let mut col = m.column_mut(c);
                col += ds_ab;
            }
            cols.push(m);
        }
    }
    Ok(lower(d, &geom.g_h, |a, b, c| cols[a * d + b].column(c).into_owned()))
}

/// `T` assembled from the closed lemma displays, lowered with `g_H`.
pub fn t_tensor_from_lemmas(geom: &GeometryAt) -> QuadCov {
    let d = geom.dim();
    let ctx = LemmaContext::new(geom);
    let e: Vec<Vector> = (0..d).map(|i| basis(d, i)).collect();
    lower(d, &geom.g_h, |a, b, c| ctx.t_assembled(&e[a], &e[b], &e[c]))
}

/// The two grouped terms of the closed curvature formula.
#[derive(Debug, Clone)]
pub struct RtildeGroups {
    /// `⅛(g_H ⊙ g_H + Σ_k g_H(I_k·,·) ⊘ g_H(I_k·,·))`.
    pub metric_group: QuadCov,
    /// `ω_H ⊘ ω_H + Σ_k ω_H(I_k·,·) ⊙ ω_H(I_k·,·)`, without its prefactor.
    pub twist_group: QuadCov,
    /// `−(8 f_Z f_H)⁻¹`.
    pub twist_coefficient: f64,
}

impl RtildeGroups {
    pub fn total(&self) -> QuadCov {
        let mut out = self.metric_group.clone();
        out.add_scaled(&self.twist_group, self.twist_coefficient);
        out
    }
}

pub fn rtilde_groups(geom: &GeometryAt) -> RtildeGroups {
    let twisted_g = std::array::from_fn(|k| geom.twisted(&geom.g_h, k + 1));
    let twisted_omega = std::array::from_fn(|k| geom.twisted(&geom.omega_h, k + 1));
    groups_from_forms(geom, &geom.g_h, &geom.omega_h, &twisted_g, &twisted_omega)
}

/// The grouped terms with every two-form first written in `frame`.
///
/// The coordinate expression loses about `cond(g_H)²` in relative accuracy
/// once moved to an orthonormal frame; assembling in the frame loses about
/// `cond(g_H)`.
pub fn rtilde_groups_in_frame(geom: &GeometryAt, frame: &Frame) -> RtildeGroups {
    let f = frame.vectors();
    let to_frame = |m: &Matrix| f.transpose() * m * f;
    let g_h = BilinearForm::symmetrized(&to_frame(geom.g_h.matrix()));
    let omega_h = BilinearForm::antisymmetrized(&to_frame(geom.omega_h.matrix()));
    let twisted_g = std::array::from_fn(|k| BilinearForm::new(to_frame(geom.twisted(&geom.g_h, k + 1).matrix())));
    let twisted_omega =
        std::array::from_fn(|k| BilinearForm::new(to_frame(geom.twisted(&geom.omega_h, k + 1).matrix())));
    groups_from_forms(geom, &g_h, &omega_h, &twisted_g, &twisted_omega)
}

fn groups_from_forms(
    geom: &GeometryAt,
    g_h: &BilinearForm,
    omega_h: &BilinearForm,
    twisted_g: &[BilinearForm; 3],
    twisted_omega: &[BilinearForm; 3],
) -> RtildeGroups {
    let mut metric_group = owedge(g_h, g_h);
    let mut twist_group = obar(omega_h, omega_h).expect("ω_H is a two-form");
    for k in 0..3 {
        let beta = BilinearForm::antisymmetrized(twisted_g[k].matrix());
        metric_group.add_scaled(&obar(&beta, &beta).expect("antisymmetrized"), 1.0);
        let gamma = BilinearForm::symmetrized(twisted_omega[k].matrix());
        twist_group.add_scaled(&owedge(&gamma, &gamma), 1.0);
    }
    RtildeGroups {
        metric_group: metric_group.scale(0.125),
        twist_group,
        twist_coefficient: -1.0 / (8.0 * geom.f_z * geom.f_h),
    }
}

/// Components of the closed `R̃` in `frame`, assembled there.
pub fn rtilde_closed_in_frame(geom: &GeometryAt, frame: &Frame) -> QuadCov {
    let r = flat_curvature(geom).in_frame(frame).scale(1.0 / geom.f_z);
    &rtilde_groups_in_frame(geom, frame).total() + &r
}

/// `g_H(R̃(A,B)C, X)` from the closed formula, with the flat `R`.
pub fn rtilde_closed(geom: &GeometryAt) -> QuadCov {
    let r = flat_curvature(geom).scale(1.0 / geom.f_z);
    &rtilde_groups(geom).total() + &r
}

/// `g(R(A,B)C, X)` of the flat model.
pub fn flat_curvature(geom: &GeometryAt) -> QuadCov {
    QuadCov::zeros(geom.dim())
}

/// `g_H(R̃(A,B)C, X) = f_Z⁻¹ g(R(A,B)C, X) + g_H(T(A,B)C, X)` from the direct path.
pub fn rtilde_direct(geom: &GeometryAt, path: SPath, step: f64) -> Result<QuadCov> {
    let t = t_tensor(geom, path, step)?;
    let r = flat_curvature(geom).scale(1.0 / geom.f_z);
    Ok(&t + &r)
}

/// Every curvature tensor of the construction at one point.
#[derive(Debug, Clone)]
pub struct CurvatureTensors {
    pub r_flat: QuadCov,
    /// `T` lowered with `g_H`.
    pub t: QuadCov,
    pub rtilde_direct: QuadCov,
    pub rtilde_closed: QuadCov,
}

pub fn curvature_tensors(geom: &GeometryAt, path: SPath, step: f64) -> Result<CurvatureTensors> {
    let r_flat = flat_curvature(geom);
    let t = t_tensor(geom, path, step)?;
    let rtilde_direct = &t + &r_flat.scale(1.0 / geom.f_z);
    Ok(CurvatureTensors {
        r_flat,
        t,
        rtilde_direct,
        rtilde_closed: rtilde_closed(geom),
    })
}

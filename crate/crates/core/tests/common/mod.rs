//! Shared helpers: random metrics and endomorphisms, and an index-sum oracle
//! for traces of compositions on `Λ²`.

#![allow(dead_code)]

use hkqk::pseudo_linear::{metric_inverse, BilinearForm, Endomorphism, Matrix, QuadCov, Vector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_matrix(rng: &mut impl Rng, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |_, _| StandardNormal.sample(rng))
}

/// `PᵀDP` with `D = diag(+1 × positive, −1 × rest)` and `P = Q·diag(s)`,
/// `Q` orthogonal and `s ∈ [0.5, 2]`, so `cond(h) ≤ 16`.
pub fn random_metric(rng: &mut impl Rng, d: usize, positive: usize) -> BilinearForm {
    let signs: Vec<f64> = (0..d).map(|i| if i < positive { 1.0 } else { -1.0 }).collect();
    let q = normal_matrix(rng, d).qr().q();
    let scales = Vector::from_fn(d, |_, _| rng.random_range(0.5..2.0));
    let p = q * Matrix::from_diagonal(&scales);
    BilinearForm::symmetrized(&(p.transpose() * Matrix::from_diagonal(&Vector::from_vec(signs)) * &p))
}

/// `h⁻¹S` for random symmetric `S`: self-adjoint with respect to `h`.
pub fn random_self_adjoint(rng: &mut impl Rng, h: &BilinearForm) -> Endomorphism {
    let s = normal_matrix(rng, h.dim());
    Endomorphism::new(metric_inverse(h).unwrap() * (&s + s.transpose()))
}

/// `h⁻¹A` for random antisymmetric `A`: skew with respect to `h`.
pub fn random_skew(rng: &mut impl Rng, h: &BilinearForm) -> Endomorphism {
    let a = normal_matrix(rng, h.dim());
    Endomorphism::new(metric_inverse(h).unwrap() * (&a - a.transpose()))
}

/// `T` with its first two slots raised by `h⁻¹`.
fn raise_first_pair(t: &QuadCov, h_inv: &Matrix) -> QuadCov {
    let d = t.dim();
    let mut half = QuadCov::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for x in 0..d {
                    let v: f64 = (0..d).map(|i| h_inv[(a, i)] * t.get(i, b, c, x)).sum();
                    half.set(a, b, c, x, v);
                }
            }
        }
    }
    let mut out = QuadCov::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for x in 0..d {
                    let v: f64 = (0..d).map(|j| h_inv[(b, j)] * half.get(a, j, c, x)).sum();
                    out.set(a, b, c, x, v);
                }
            }
        }
    }
    out
}

/// `tr(T_1 ∘ T_2) = ¼ Σ T_1(a,b,c,x) T_2(c',x',a',b') h^{aa'} h^{bb'} h^{cc'} h^{xx'}`.
pub fn brute_force_trace(t1: &QuadCov, t2: &QuadCov, h: &BilinearForm) -> f64 {
    let h_inv = metric_inverse(h).unwrap();
    let r1 = raise_first_pair(t1, &h_inv);
    let r2 = raise_first_pair(t2, &h_inv);
    let d = t1.dim();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for x in 0..d {
                    acc += r1.get(a, b, c, x) * r2.get(c, x, a, b);
                }
            }
        }
    }
    0.25 * acc
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

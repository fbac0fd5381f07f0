//! The two four-index products `⊙` and `⊘` and their trace identities.
//!
//! For a four-tensor `Φ`:
//!
//! ```text
//! Φ^⊙(A,B,C,X) = Φ(A,C,B,X) − Φ(A,X,B,C) + Φ(B,X,A,C) − Φ(B,C,A,X)
//! Φ^⊘(A,B,C,X) = Φ^⊙(A,B,C,X) + 2Φ(A,B,C,X) + 2Φ(C,X,A,B)
//! ```
//!
//! and for two-tensors `α ⊙ β := (α⊗β)^⊙`, `α ⊘ β := (α⊗β)^⊘`. On symmetric
//! forms `⊙` is the usual Kulkarni–Nomizu product; `⊘` turns a pair of
//! two-forms into an algebraic curvature tensor.

use crate::error::{Error, Result};
use crate::pseudo_linear::{
    adjointness_residual, quadcov_to_lambda2_op, BilinearForm, Endomorphism, Lambda2Operator, QuadCov,
};

/// Tolerance for the adjointness hypotheses, relative to `max(1, |E|)`.
pub const ADJOINTNESS_TOL: f64 = 1e-10;

pub fn kn_owedge(phi: &QuadCov) -> QuadCov {
    QuadCov::from_fn(phi.dim(), |a, b, c, x| {
        phi.get(a, c, b, x) - phi.get(a, x, b, c) + phi.get(b, x, a, c) - phi.get(b, c, a, x)
    })
}

pub fn kn_obar(phi: &QuadCov) -> Result<QuadCov> {
    let residual = phi.pair_antisymmetry_residual();
    if residual > 1e-10 * phi.max_abs().max(1.0) {
        return Err(Error::PairAntisymmetryViolated { residual });
    }
    Ok(QuadCov::from_fn(phi.dim(), |a, b, c, x| {
        phi.get(a, c, b, x) - phi.get(a, x, b, c) + phi.get(b, x, a, c) - phi.get(b, c, a, x)
            + 2.0 * phi.get(a, b, c, x)
            + 2.0 * phi.get(c, x, a, b)
    }))
}

/// `α ⊙ β`.
pub fn owedge(alpha: &BilinearForm, beta: &BilinearForm) -> QuadCov {
    kn_owedge(&QuadCov::outer(alpha, beta))
}

/// `α ⊘ β` for two-forms `α`, `β`.
pub fn obar(alpha: &BilinearForm, beta: &BilinearForm) -> Result<QuadCov> {
    kn_obar(&QuadCov::outer(alpha, beta))
}

/// `E ⊙_h F` on `Λ²`: lower `E`, `F` with `h` and take `⊙`.
pub fn endo_owedge(e: &Endomorphism, f: &Endomorphism, metric: &BilinearForm) -> Result<Lambda2Operator> {
    let t = owedge(&metric.precompose(e), &metric.precompose(f));
    quadcov_to_lambda2_op(&t, metric)
}

/// `K ⊘_h L` on `Λ²` for `h`-skew `K`, `L`.
pub fn endo_obar(k: &Endomorphism, l: &Endomorphism, metric: &BilinearForm) -> Result<Lambda2Operator> {
    for e in [k, l] {
        let residual = adjointness_residual(e, metric, -1.0);
        if residual > ADJOINTNESS_TOL * e.max_abs().max(1.0) {
            return Err(Error::NotSkewAdjoint { residual });
        }
    }
    let t = obar(&metric.precompose(k), &metric.precompose(l))?;
    quadcov_to_lambda2_op(&t, metric)
}

/// Right-hand sides of the three trace identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceIdentities {
    /// `tr((E⊙E)∘(F⊙F)) = 2(tr EF)² − 2 tr((EF)²)`
    pub owedge_owedge: f64,
    /// `tr((K⊘K)∘(L⊘L)) = 6(tr KL)² + 6 tr((KL)²)`
    pub obar_obar: f64,
    /// `tr((E⊙E)∘(K⊘K)) = 2(tr EK)² − 6 tr((EK)²)`
    pub owedge_obar: f64,
}

/// `2(tr EF)² − 2 tr((EF)²)`. Holds for arbitrary `E`, `F`.
pub fn owedge_owedge_trace(e: &Endomorphism, f: &Endomorphism) -> f64 {
    let ef = e * f;
    2.0 * ef.trace().powi(2) - 2.0 * (&ef * &ef).trace()
}

/// `6(tr KL)² + 6 tr((KL)²)`, valid for skew `K`, `L`.
pub fn obar_obar_trace(k: &Endomorphism, l: &Endomorphism) -> f64 {
    let kl = k * l;
    6.0 * kl.trace().powi(2) + 6.0 * (&kl * &kl).trace()
}

/// `2(tr EK)² − 6 tr((EK)²)`, valid for self-adjoint `E` and skew `K`.
pub fn owedge_obar_trace(e: &Endomorphism, k: &Endomorphism) -> f64 {
    let ek = e * k;
    2.0 * ek.trace().powi(2) - 6.0 * (&ek * &ek).trace()
}

/// Evaluates the closed forms after checking that `E`, `F` are self-adjoint
/// and `K`, `L` skew-adjoint with respect to `metric`.
pub fn trace_identities(
    e: &Endomorphism,
    f: &Endomorphism,
    k: &Endomorphism,
    l: &Endomorphism,
    metric: &BilinearForm,
) -> Result<TraceIdentities> {
    let checks: [(&'static str, &Endomorphism, f64); 4] =
        [("E", e, 1.0), ("F", f, 1.0), ("K", k, -1.0), ("L", l, -1.0)];
    for (argument, m, sign) in checks {
        let residual = adjointness_residual(m, metric, sign);
        if residual > ADJOINTNESS_TOL * m.max_abs().max(1.0) {
            return Err(Error::AdjointnessViolated { argument, residual });
        }
    }
    Ok(TraceIdentities {
        owedge_owedge: owedge_owedge_trace(e, f),
        obar_obar: obar_obar_trace(k, l),
        owedge_obar: owedge_obar_trace(e, k),
    })
}

/// The same three traces, evaluated by building the `Λ²` operators.
pub fn trace_identities_via_lambda2(
    e: &Endomorphism,
    f: &Endomorphism,
    k: &Endomorphism,
    l: &Endomorphism,
    metric: &BilinearForm,
) -> Result<TraceIdentities> {
    let ee = endo_owedge(e, e, metric)?;
    let ff = endo_owedge(f, f, metric)?;
    let kk = endo_obar(k, k, metric)?;
    let ll = endo_obar(l, l, metric)?;
    Ok(TraceIdentities {
        owedge_owedge: ee.trace_of_product(&ff),
        obar_obar: kk.trace_of_product(&ll),
        owedge_obar: ee.trace_of_product(&kk),
    })
}

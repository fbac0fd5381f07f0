//! The per-point verification suite behind `verify`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correspondence::s_derivatives;
use crate::correspondence::{
    curvature_tensors, rtilde_direct, rtilde_groups, s_closed_tensor, s_from_parts_tensor, t_tensor_from_lemmas,
    DirectTerms, LemmaContext, SPath, NESTED_FD_STEP,
};
use crate::curvature::{
    alekseevsky_split, closed_norm_frame, hk_type_residual, invariance_residual, norm_report, trace_k_powers,
    FrameCurvature,
};
use crate::error::Result;
use crate::flat_model::{
    constant_tensors, geometry_at, sample_point, sample_point_with_f_z, verify_differential_identities_with_step,
    GeometryAt, ModelParams, Point,
};
use crate::kulkarni::{trace_identities, trace_identities_via_lambda2, TraceIdentities};
use crate::pseudo_linear::{adjointness_residual, Endomorphism, Matrix, Vector};

/// One identity checked by the suite.
#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    /// Short LaTeX phrase identifying the formula.
    pub anchor: &'static str,
    pub tolerance: f64,
}

const fn check(name: &'static str, anchor: &'static str, tolerance: f64) -> CheckSpec {
    CheckSpec {
        name,
        anchor,
        tolerance,
    }
}

/// Every check, in report order. Residuals are absolute unless noted in the
/// README; `g_h_positive_definite` reports `−λ_min/λ_max` and so passes below 0.
pub const CHECKS: &[CheckSpec] = &[
    check(
        "quaternion_relations",
        r#"so that $\omega_\mu(\cdot,\cdot)=g(I_\mu\cdot,\cdot)$"#,
        1e-10,
    ),
    check("i_h_square", r#"The fact that $I_\mathrm{H}^2=-\id$"#, 1e-10),
    check("commutation", r#"$I_\mathrm{H}$ and $I_k$ all commute"#, 1e-10),
    check("adjointness", "is self-adjoint with respect to", 1e-10),
    check("k_lowering", r#"by $g_\mathrm{H}(\mc K X,Y)=g(X,Y)$"#, 1e-10),
    check("k_closed_form", "restricts to the appropriate multiples", 1e-10),
    check("g_h_positive_definite", r#"is a new metric of the form"#, 0.0),
    check("f_h_identity", r#"f_\mathrm{H}\coloneqq k(f_Z+g(Z,Z))"#, 1e-12),
    check(
        "omega_h_display",
        r#"\omega_\mathrm{H}\coloneqq k(\omega_1+\d\iota_Z g)"#,
        1e-12,
    ),
    check(
        "d_alpha",
        r#"the one-forms $\alpha_\mu\coloneqq \iota_Z \omega_\mu$ satisfy"#,
        1e-6,
    ),
    check("moment_maps", r#"$\iota_Z\omega_1=-\d f_Z$"#, 1e-6),
    check(
        "rotating_symmetry",
        r#"$L_Z\omega_2=\omega_3$ and $L_Z\omega_3=-\omega_2$"#,
        1e-6,
    ),
    check("omega_h_exterior", r#"k(\omega_1+\d\iota_Z g)"#, 1e-6),
    check(
        "sum_identity",
        r#"Now we may sum over $\mu$ to obtain the following identity"#,
        1e-8,
    ),
    check("omega_identities", r#"$L_Z g=L_Z \omega_1=0$"#, 1e-8),
    check("s_torsion", "formula for twists of commutators", 1e-8),
    check(
        "s_metric_compatibility",
        r#"We use the Koszul formula for $D^\mathrm{Q}$"#,
        1e-5,
    ),
    check("s_parts_vs_closed", r#"$S=S^\mathrm{H}+S^\mathrm{Q}$"#, 1e-5),
    check("s_q_skew", r#"$S=S^\mathrm{H}+S^\mathrm{Q}$"#, 1e-10),
    check("s_h_symmetric", "cyclically permuting the vector fields", 1e-5),
    check(
        "lemma_ds",
        r#"With $S$ as in \Cref{thm:connection} and $D$ the Levi-Civita connection of $g$"#,
        1e-4,
    ),
    check(
        "lemma_comm",
        r#"In the same notation as the previous lemma we have"#,
        1e-10,
    ),
    check(
        "lemma_dzsz",
        r#"The $(1,1)$-tensor field $DZ+S_Z$ is given by the following expression"#,
        1e-10,
    ),
    check(
        "t_antisymmetry",
        r#"where $T$ is the $\End(TM)$-valued two-form given by"#,
        1e-10,
    ),
    check(
        "lemma_assembly",
        r#"is $\mc H$-related to $\tilde R$, which is given by the expression"#,
        1e-10,
    ),
    check(
        "rtilde_direct_vs_closed",
        r#"R^S-\frac{1}{f_\mathrm{H}}\omega_\mathrm{H}\otimes (DZ+S_Z)"#,
        1e-4,
    ),
    check(
        "rtilde_nested_fd",
        r#"will denote the curvature tensor of $\nabla^S$ by $R^S$"#,
        5e-3,
    ),
    check(
        "rtilde_bianchi",
        r#"possesses the algebraic symmetries of a (lowered) Riemann curvature tensor"#,
        1e-10,
    ),
    check(
        "rtilde_pair_symmetry",
        r#"possesses the algebraic symmetries of a (lowered) Riemann curvature tensor"#,
        1e-10,
    ),
    check(
        "rtilde_grouped_terms",
        r#"$\omega_\mathrm{H}(I_k\cdot,\cdot)$ is a symmetric bilinear form"#,
        1e-10,
    ),
    check(
        "trace_identities",
        r#"Let $h$ be a (pseudo-)Riemannian metric on a manifold $N$"#,
        1e-8,
    ),
    check(
        "operator_self_adjoint",
        r#"regarded as a self-adjoint endormorphism"#,
        1e-10,
    ),
    check("norm_frame_vs_closed", "n(5n+1)", 1e-8),
    check("equal_f_z_norm", "acts transitively on the level sets", 1e-9),
    check("scalar_curvature", r#"is the reduced scalar curvature"#, 1e-8),
    check("nu", r#"(note that $\nu=-1$)"#, 1e-8),
    check("hk_type", r#"is of hyper-K\"ahler type"#, 1e-8),
    check(
        "invariance",
        r#"we replaced each instance of $I_\mu$ by $I_j^{-1}I_\mu$"#,
        1e-10,
    ),
    check("trace_k_powers", "the following trace identities hold", 1e-9),
    check("trace_k_vanishing", r#"is skew, and has vanishing trace"#, 1e-9),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.name)
}

/// Residual per check name at one point.
pub type PointResiduals = BTreeMap<&'static str, f64>;

fn rel(diff: f64, reference: f64) -> f64 {
    diff / reference.abs().max(1.0)
}

fn basis(d: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[i] = 1.0;
    v
}

fn trace_identity_residual(exact: &TraceIdentities, via: &TraceIdentities) -> f64 {
    [
        (exact.owedge_owedge, via.owedge_owedge),
        (exact.obar_obar, via.obar_obar),
        (exact.owedge_obar, via.owedge_obar),
    ]
    .into_iter()
    .map(|(a, b)| rel(a - b, a))
    .fold(0.0, f64::max)
}

fn algebraic_checks(geom: &GeometryAt, out: &mut PointResiduals) {
    let d = geom.dim();
    let id = Matrix::identity(d, d);
    let i = |k: usize| geom.complex[k].matrix();

    let mut quat: f64 = 0.0;
    for (a, b, c) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        quat = quat.max((i(a) * i(b) - i(c)).amax());
        quat = quat.max((i(a) * i(a) + &id).amax());
    }
    for k in 1..4 {
        // ω_k = g(I_k ·, ·)
        quat = quat.max((geom.twisted(&geom.g, k).matrix() - geom.omega[k].matrix()).amax());
    }
    out.insert("quaternion_relations", quat);

    out.insert("i_h_square", (geom.i_h.matrix() * geom.i_h.matrix() + &id).amax());

    let k_scale = geom.k.max_abs().max(1.0);
    let mut comm: f64 = geom.k.commutator(&geom.i_h).max_abs() / k_scale;
    for mu in 1..4 {
        comm = comm.max(geom.k.commutator(&geom.complex[mu]).max_abs() / k_scale);
        comm = comm.max(geom.i_h.commutator(&geom.complex[mu]).max_abs());
    }
    out.insert("commutation", comm);

    let adj =
        (adjointness_residual(&geom.k, &geom.g, 1.0) / k_scale).max(adjointness_residual(&geom.i_h, &geom.g, -1.0));
    out.insert("adjointness", adj);

    out.insert(
        "k_lowering",
        (geom.g_h.precompose(&geom.k).matrix() - geom.g.matrix()).amax(),
    );
    out.insert(
        "k_closed_form",
        (geom.k.matrix() - geom.k_closed().matrix()).amax() / k_scale,
    );

    let eig = geom.g_h.matrix().clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    out.insert("g_h_positive_definite", -lo / hi.abs());

    out.insert("f_h_identity", rel(geom.f_h - geom.f_z - geom.g_zz, geom.f_h));
    let consts = constant_tensors(&geom.params);
    out.insert(
        "omega_h_display",
        (geom.omega_h.matrix() - consts.omega_h.matrix()).amax(),
    );

    // K and K² are g_H-self-adjoint; I_1, I_H are g_H-skew. K, id are g-self-adjoint; I_2, I_H g-skew.
    let k2 = &geom.k * &geom.k;
    let mut ti: f64 = 0.0;
    let cases = [
        (&geom.k, &k2, &geom.complex[1], &geom.i_h, &geom.g_h),
        (
            &geom.k,
            &Endomorphism::identity(d),
            &geom.complex[2],
            &geom.i_h,
            &geom.g,
        ),
    ];
    for (e, f, k, l, h) in cases {
        match (
            trace_identities(e, f, k, l, h),
            trace_identities_via_lambda2(e, f, k, l, h),
        ) {
            (Ok(a), Ok(b)) => ti = ti.max(trace_identity_residual(&a, &b)),
            _ => ti = f64::NAN,
        }
    }
    out.insert("trace_identities", ti);

    let mut tk: f64 = 0.0;
    let mut tv: f64 = 0.0;
    for n in 0..=6 {
        let t = trace_k_powers(geom, n);
        tk = tk.max(t.relative_error());
        tv = tv.max(t.max_vanishing());
    }
    out.insert("trace_k_powers", tk);
    out.insert("trace_k_vanishing", tv);
}

fn differential_checks(params: &ModelParams, point: &Point, step: f64, out: &mut PointResiduals) -> Result<()> {
    let r = verify_differential_identities_with_step(params, point, step)?;
    out.insert("d_alpha", r.d_alpha0.max(r.d_alpha_k));
    out.insert("moment_maps", r.moment_map_omega1.max(r.moment_map_omega_h));
    out.insert("rotating_symmetry", r.rotating_symmetry);
    out.insert("omega_h_exterior", r.omega_h_exterior);
    out.insert("sum_identity", r.sum_identity);
    out.insert("omega_identities", r.omega_identities);
    Ok(())
}

fn connection_checks(geom: &GeometryAt, step: f64, out: &mut PointResiduals) -> Result<()> {
    let d = geom.dim();
    let s = s_closed_tensor(geom);
    let s_scale = s.max_abs().max(1.0);
    out.insert("s_torsion", s.torsion_residual(geom) / s_scale);

    let dg = crate::correspondence::g_h_derivatives(geom, step)?;
    let dg_scale = dg.iter().fold(1.0_f64, |m, x| m.max(x.amax()));
    out.insert(
        "s_metric_compatibility",
        s.metric_compatibility_residual(geom, step)? / dg_scale,
    );

    let split = s_from_parts_tensor(geom, step)?;
    out.insert("s_parts_vs_closed", split.total().max_abs_diff(&s) / s.max_abs());
    let sq_scale = (geom.g_h.max_abs() * split.s_q.max_abs()).max(1.0);
    out.insert("s_q_skew", split.s_q.skew_residual(&geom.g_h) / sq_scale);
    out.insert(
        "s_h_symmetric",
        split.s_h.symmetry_residual() / split.s_h.max_abs().max(1.0),
    );

    let ds = s_derivatives(geom, SPath::Closed, step)?;
    let direct = DirectTerms::new(geom, &s, &ds);
    let ctx = LemmaContext::new(geom);
    let e: Vec<Vector> = (0..d).map(|i| basis(d, i)).collect();
    let (mut ds_diff, mut ds_ref): (f64, f64) = (0.0, 0.0);
    let (mut cm_diff, mut cm_ref): (f64, f64) = (0.0, 0.0);
    let (mut dz_diff, mut dz_ref): (f64, f64) = (0.0, 0.0);
    for c in 0..d {
        let closed = ctx.term_dzsz(&e[c]);
        dz_diff = dz_diff.max((&closed - direct.term_dzsz(&e[c])).amax());
        dz_ref = dz_ref.max(closed.amax());
        for a in 0..d {
            for b in 0..d {
                let closed = ctx.term_ds(&e[a], &e[b], &e[c]);
                ds_diff = ds_diff.max((&closed - direct.term_ds(&e[a], &e[b], &e[c])).amax());
                ds_ref = ds_ref.max(closed.amax());
                let closed = ctx.term_comm(&e[a], &e[b], &e[c]);
                cm_diff = cm_diff.max((&closed - direct.term_comm(&e[a], &e[b], &e[c])).amax());
                cm_ref = cm_ref.max(closed.amax());
            }
        }
    }
    out.insert("lemma_ds", rel(ds_diff, ds_ref));
    out.insert("lemma_comm", rel(cm_diff, cm_ref));
    out.insert("lemma_dzsz", rel(dz_diff, dz_ref));
    Ok(())
}

fn curvature_checks(
    geom: &GeometryAt,
    step: f64,
    rng: &mut ChaCha8Rng,
    twin: Option<&GeometryAt>,
    out: &mut PointResiduals,
) -> Result<()> {
    let tensors = curvature_tensors(geom, SPath::Closed, step)?;
    let closed = &tensors.rtilde_closed;
    let scale = closed.max_abs().max(1.0);
    let t = &tensors.t;
    let t_swapped = t.permuted(|[a, b, c, x]| [b, a, c, x]);
    out.insert("t_antisymmetry", (t + &t_swapped).max_abs() / t.max_abs().max(1.0));
    out.insert(
        "lemma_assembly",
        t_tensor_from_lemmas(geom).max_abs_diff(closed) / scale,
    );

    let closed_frame = FrameCurvature::closed(geom)?;
    let frame = &closed_frame.frame;
    let closed_f = &closed_frame.components;
    out.insert(
        "rtilde_direct_vs_closed",
        tensors.rtilde_direct.in_frame(frame).max_abs_diff(closed_f),
    );
    let nested = rtilde_direct(geom, SPath::FromParts, NESTED_FD_STEP)?;
    out.insert("rtilde_nested_fd", nested.in_frame(frame).max_abs_diff(closed_f));

    out.insert("rtilde_bianchi", closed.bianchi_residual() / scale);
    out.insert("rtilde_pair_symmetry", closed.pair_symmetry_residual() / scale);
    let groups = rtilde_groups(geom);
    let grouped = (groups.metric_group.curvature_symmetry_residual() / groups.metric_group.max_abs().max(1.0))
        .max(groups.twist_group.curvature_symmetry_residual() / groups.twist_group.max_abs().max(1.0));
    out.insert("rtilde_grouped_terms", grouped);

    let report = norm_report(geom, &closed_frame)?;
    out.insert("operator_self_adjoint", report.operator_residual);
    out.insert("norm_frame_vs_closed", report.norm_residual);
    out.insert("scalar_curvature", report.scal_residual);
    out.insert("nu", (report.nu + 1.0).abs());
    if let Some(twin) = twin {
        let other = closed_norm_frame(twin)?;
        out.insert("equal_f_z_norm", (other - report.norm_frame).abs() / report.norm_frame);
    }

    let split = alekseevsky_split(geom, closed);
    out.insert("hk_type", hk_type_residual(geom, &split.r1_part, 50, rng));
    out.insert("invariance", invariance_residual(geom, 10, rng));
    Ok(())
}

/// Per-point generator: derived from the run seed and the point index only.
pub fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index as u64)
}

/// Runs every check at the `index`-th sampled point.
pub fn evaluate_point(params: &ModelParams, seed: u64, index: usize, step: f64) -> Result<PointResiduals> {
    let mut rng = point_rng(seed, index);
    let point = sample_point(params, &mut rng);
    let geom = geometry_at(params, &point)?;
    let twin_point = sample_point_with_f_z(params, geom.f_z, &mut rng);
    let twin = geometry_at(params, &twin_point)?;

    let mut out = PointResiduals::new();
    algebraic_checks(&geom, &mut out);
    differential_checks(params, &point, step, &mut out)?;
    connection_checks(&geom, step, &mut out)?;
    curvature_checks(&geom, step, &mut rng, Some(&twin), &mut out)?;
    Ok(out)
}

//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (written
//! straight to stdout so it shows without `--nocapture`) and then asserts.

mod common;

use std::io::Write;

use common::{brute_force_trace, random_metric, random_self_adjoint, random_skew, rel_err};
use hkqk::correspondence::{rtilde_closed, rtilde_direct, s_closed_tensor, s_from_parts_tensor, SPath, NESTED_FD_STEP};
use hkqk::curvature::{
    alekseevsky_split, closed_norm_frame, curvature_norm_closed, hk_type_residual, is_strictly_monotone, norm_at_rho,
    trace_k_powers, FrameCurvature,
};
use hkqk::flat_model::{
    geometry_at, sample_point, sample_point_with_f_z, verify_differential_identities, GeometryAt, ModelParams,
};
use hkqk::kulkarni::{obar, owedge, trace_identities};
use hkqk::pseudo_linear::{adjointness_residual, Matrix, DEFAULT_FD_STEP};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CS: [f64; 3] = [0.0, 0.5, 1.0];

fn report(id: &str, what: &str, worst: f64, tol: f64, passed: bool) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let line = format!("{verdict} criterion {id}: {what}: worst {worst:.3e} (tolerance {tol:.0e})\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

/// `points` seeded geometries for every `(m, c)`, evaluated in parallel; returns the worst value of `f`.
fn worst_over<F>(ms: &[usize], points: usize, seed: u64, f: F) -> f64
where
    F: Fn(&GeometryAt, &mut ChaCha8Rng) -> f64 + Sync,
{
    let configs: Vec<(usize, f64, usize)> = ms
        .iter()
        .flat_map(|&m| CS.iter().flat_map(move |&c| (0..points).map(move |i| (m, c, i))))
        .collect();
    configs
        .par_iter()
        .map(|&(m, c, i)| {
            let params = ModelParams::new(m, c).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((m as u64) << 40) ^ ((c * 8.0) as u64) << 32 ^ i as u64);
            let geom = geometry_at(&params, &sample_point(&params, &mut rng)).unwrap();
            f(&geom, &mut rng)
        })
        .reduce(
            || 0.0,
            |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) },
        )
}

fn check(id: &str, what: &str, worst: f64, tol: f64) {
    let passed = worst < tol;
    report(id, what, worst, tol, passed);
    assert!(passed, "criterion {id}: {worst:e} ≥ {tol:e}");
}

#[test]
fn criterion_1_norm_formula() {
    let worst = worst_over(&[0, 1, 2, 3], 20, 1, |geom, _| {
        let q = geom.params.quaternionic_dim();
        let frame = closed_norm_frame(geom).unwrap();
        let closed = curvature_norm_closed(q, geom.f_z, geom.f_h).unwrap();
        (frame - closed).abs() / closed
    });
    check(
        "1",
        "frame norm of R̃ vs closed norm, m 0..3, c 0/0.5/1, 20 points",
        worst,
        1e-8,
    );
}

#[test]
fn criterion_2_path_equivalence() {
    let worst = worst_over(&[0, 1, 2], 20, 2, |geom, _| {
        let closed = FrameCurvature::closed(geom).unwrap();
        let (frame, closed) = (closed.frame, closed.components);
        let direct = rtilde_direct(geom, SPath::Closed, DEFAULT_FD_STEP).unwrap();
        direct.in_frame(&frame).max_abs_diff(&closed)
    });
    check(
        "2",
        "R̃ from differentiated S plus T vs closed form (g_H-orthonormal frame), m 0..2",
        worst,
        1e-4,
    );
}

#[test]
fn criterion_2_koszul_path() {
    // S^H + S^Q differentiated again: two nested difference quotients
    let worst = worst_over(&[0, 1, 2], 20, 2, |geom, _| {
        let closed = FrameCurvature::closed(geom).unwrap();
        let (frame, closed) = (closed.frame, closed.components);
        let nested = rtilde_direct(geom, SPath::FromParts, NESTED_FD_STEP).unwrap();
        nested.in_frame(&frame).max_abs_diff(&closed)
    });
    check(
        "2 (Koszul S)",
        "R̃ from differentiated S^H + S^Q vs closed form, m 0..2",
        worst,
        5e-3,
    );
}

#[test]
fn criterion_3_connection_oracle() {
    let worst = worst_over(&[0, 1, 2, 3], 20, 3, |geom, _| {
        let closed = s_closed_tensor(geom);
        let parts = s_from_parts_tensor(geom, DEFAULT_FD_STEP).unwrap().total();
        parts.max_abs_diff(&closed) / closed.max_abs()
    });
    check(
        "3",
        "S^H + S^Q (finite-difference Koszul) vs closed S, relative",
        worst,
        1e-5,
    );
}

#[test]
fn criterion_4_trace_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for d in [4, 8, 12] {
        for positive in [d, 4] {
            for _ in 0..50 {
                let h = random_metric(&mut rng, d, positive);
                let e = random_self_adjoint(&mut rng, &h);
                let f = random_self_adjoint(&mut rng, &h);
                let k = random_skew(&mut rng, &h);
                let l = random_skew(&mut rng, &h);
                let closed = trace_identities(&e, &f, &k, &l, &h).unwrap();
                let ee = owedge(&h.precompose(&e), &h.precompose(&e));
                let ff = owedge(&h.precompose(&f), &h.precompose(&f));
                let kk = obar(&h.precompose(&k), &h.precompose(&k)).unwrap();
                let ll = obar(&h.precompose(&l), &h.precompose(&l)).unwrap();
                worst = worst
                    .max(rel_err(closed.owedge_owedge, brute_force_trace(&ee, &ff, &h)))
                    .max(rel_err(closed.obar_obar, brute_force_trace(&kk, &ll, &h)))
                    .max(rel_err(closed.owedge_obar, brute_force_trace(&ee, &kk, &h)));
            }
        }
    }
    check(
        "4",
        "three trace identities vs index sums, d 4/8/12, definite and split metrics",
        worst,
        1e-8,
    );
}

#[test]
fn criterion_5_model_traces() {
    let powers = worst_over(&[0, 1, 2, 3], 20, 5, |geom, _| {
        (0..=6)
            .map(|n| trace_k_powers(geom, n).relative_error())
            .fold(0.0, f64::max)
    });
    let vanishing = worst_over(&[0, 1, 2, 3], 20, 5, |geom, _| {
        (0..=6)
            .map(|n| trace_k_powers(geom, n).max_vanishing())
            .fold(0.0, f64::max)
    });
    let ok = powers < 1e-9 && vanishing < 1e-9;
    report(
        "5",
        "tr K^n vs closed form (relative), n 0..6",
        powers,
        1e-9,
        powers < 1e-9,
    );
    report(
        "5",
        "tr(K^n I_k), tr(K^n I_H), tr(K^n I_H I_k) (absolute)",
        vanishing,
        1e-9,
        vanishing < 1e-9,
    );
    assert!(ok, "criterion 5: {powers:e} / {vanishing:e}");
}

#[test]
fn criterion_6_scalar_curvature() {
    let worst = worst_over(&[0, 1, 2, 3], 20, 6, |geom, _| {
        let q = geom.params.quaternionic_dim() as f64;
        let expected = -4.0 * q * (q + 2.0);
        (FrameCurvature::closed(geom).unwrap().scalar_curvature() - expected).abs() / expected.abs()
    });
    check("6", "scal = −4q(q+2), i.e. ν = −1", worst, 1e-8);
}

#[test]
fn criterion_7_hyper_kahler_type() {
    let worst = worst_over(&[0, 1, 2, 3], 20, 7, |geom, rng| {
        let split = alekseevsky_split(geom, &rtilde_closed(geom));
        hk_type_residual(geom, &split.r1_part, 50, rng)
    });
    check(
        "7",
        "max ‖[R_1(A,B), I_k]‖ over 50 g_H-unit pairs per point",
        worst,
        1e-8,
    );
}

#[test]
fn criterion_8_structural_suite() {
    // (name, tolerance) in the order of the residual vector below
    const ITEMS: [(&str, f64); 9] = [
        ("quaternion relations", 1e-10),
        ("I_H² = −id", 1e-10),
        ("commutation of K, I_μ, I_H", 1e-10),
        ("g_H positive definite (−λ_min/λ_max)", 0.0),
        ("f_H = f_Z + g(Z,Z)", 1e-12),
        ("moment maps (finite differences)", 1e-6),
        ("rotating symmetry (finite differences)", 1e-6),
        ("first Bianchi identity of R̃", 1e-10),
        ("pair symmetry of R̃", 1e-10),
    ];
    let configs: Vec<(usize, f64, usize)> = (0..=3)
        .flat_map(|m| CS.iter().flat_map(move |&c| (0..100).map(move |i| (m, c, i))))
        .collect();
    let per_point: Vec<[f64; 9]> = configs
        .par_iter()
        .map(|&(m, c, i)| {
            let params = ModelParams::new(m, c).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(8_000_000 + (m * 1000) as u64 + (c * 100.0) as u64 * 10 + i as u64);
            let point = sample_point(&params, &mut rng);
            let geom = geometry_at(&params, &point).unwrap();
            let d = geom.dim();
            let id = Matrix::identity(d, d);
            let i = |k: usize| geom.complex[k].matrix();
            let mut quat: f64 = 0.0;
            for (a, b, c) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
                quat = quat.max((i(a) * i(b) - i(c)).amax()).max((i(a) * i(a) + &id).amax());
            }
            let mut comm: f64 = geom.k.commutator(&geom.i_h).max_abs();
            for mu in 1..4 {
                comm = comm
                    .max(geom.k.commutator(&geom.complex[mu]).max_abs())
                    .max(geom.i_h.commutator(&geom.complex[mu]).max_abs());
            }
            comm /= geom.k.max_abs().max(1.0);
            let eig = geom.g_h.matrix().clone().symmetric_eigen().eigenvalues;
            let pd = -eig.min() / eig.max();
            let f_h = (geom.f_h - geom.f_z - geom.g_zz).abs() / geom.f_h.abs().max(1.0);
            let diff = verify_differential_identities(&params, &point).unwrap();
            let rt = rtilde_closed(&geom);
            let scale = rt.max_abs().max(1.0);
            // the g_H-skewness of I_H is part of the structure too
            let skew = adjointness_residual(&geom.i_h, &geom.g_h, -1.0);
            [
                quat,
                (geom.i_h.matrix() * geom.i_h.matrix() + &id).amax().max(skew),
                comm,
                pd,
                f_h,
                diff.moment_map_omega1.max(diff.moment_map_omega_h),
                diff.rotating_symmetry,
                rt.bianchi_residual() / scale,
                rt.pair_symmetry_residual() / scale,
            ]
        })
        .collect();
    let mut all_ok = true;
    for (k, (name, tol)) in ITEMS.iter().enumerate() {
        let worst = per_point.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max);
        let ok = worst < *tol;
        all_ok &= ok;
        report("8", &format!("{name}, m 0..3, c 0/0.5/1, 100 points"), worst, *tol, ok);
    }
    assert!(all_ok);
}

#[test]
fn criterion_9_rho_profile() {
    let mut constant: f64 = 0.0;
    let mut monotone = true;
    let grid: Vec<f64> = (0..1000).map(|i| 0.01 + (100.0 - 0.01) * i as f64 / 999.0).collect();
    for q in 1..=4 {
        let expected = (4 * q * (2 * q + 1)) as f64;
        for &rho in &grid {
            constant = constant.max((norm_at_rho(q, 0.0, rho).unwrap() - expected).abs() / expected);
        }
        for c in [0.5, 1.0] {
            let values: Vec<f64> = grid.iter().map(|&rho| norm_at_rho(q, c, rho).unwrap()).collect();
            monotone &= is_strictly_monotone(&values);
        }
    }
    let mut equal: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in 0..=3 {
        for c in CS {
            let params = ModelParams::new(m, c).unwrap();
            for f_z in [0.1, 0.7, 3.0] {
                let norms: Vec<f64> = (0..2)
                    .map(|_| {
                        let geom = geometry_at(&params, &sample_point_with_f_z(&params, f_z, &mut rng)).unwrap();
                        closed_norm_frame(&geom).unwrap()
                    })
                    .collect();
                equal = equal.max((norms[0] - norms[1]).abs() / norms[0]);
            }
        }
    }
    report(
        "9",
        "c = 0 norm equals 4q(2q+1) on the ρ grid, q 1..4",
        constant,
        1e-9,
        constant < 1e-9,
    );
    let mono_flag = if monotone { 0.0 } else { 1.0 };
    report(
        "9",
        "closed norm strictly monotone on 1000 ρ values in [0.01, 100], c 0.5/1 (1 = violated)",
        mono_flag,
        0.5,
        monotone,
    );
    report(
        "9",
        "two points on one level set of f_Z give equal norms",
        equal,
        1e-9,
        equal < 1e-9,
    );
    assert!(constant < 1e-9 && monotone && equal < 1e-9);
}

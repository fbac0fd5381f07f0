mod common;

use common::{brute_force_trace, random_metric, random_self_adjoint, random_skew, rel_err};
use hkqk::kulkarni::{obar, owedge, trace_identities, trace_identities_via_lambda2};
use hkqk::pseudo_linear::{BilinearForm, Endomorphism};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lowered_products(
    e: &Endomorphism,
    f: &Endomorphism,
    k: &Endomorphism,
    l: &Endomorphism,
    h: &BilinearForm,
) -> [f64; 3] {
    let ee = owedge(&h.precompose(e), &h.precompose(e));
    let ff = owedge(&h.precompose(f), &h.precompose(f));
    let kk = obar(&h.precompose(k), &h.precompose(k)).unwrap();
    let ll = obar(&h.precompose(l), &h.precompose(l)).unwrap();
    [
        brute_force_trace(&ee, &ff, h),
        brute_force_trace(&kk, &ll, h),
        brute_force_trace(&ee, &kk, h),
    ]
}

#[test]
fn closed_forms_match_index_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for d in [4, 8] {
        for positive in [d, 4.min(d - 1)] {
            for _ in 0..5 {
                let h = random_metric(&mut rng, d, positive);
                let e = random_self_adjoint(&mut rng, &h);
                let f = random_self_adjoint(&mut rng, &h);
                let k = random_skew(&mut rng, &h);
                let l = random_skew(&mut rng, &h);
                let closed = trace_identities(&e, &f, &k, &l, &h).unwrap();
                let oracle = lowered_products(&e, &f, &k, &l, &h);
                assert!(rel_err(closed.owedge_owedge, oracle[0]) < 1e-9, "d={d}");
                assert!(rel_err(closed.obar_obar, oracle[1]) < 1e-9, "d={d}");
                assert!(rel_err(closed.owedge_obar, oracle[2]) < 1e-9, "d={d}");
            }
        }
    }
}

#[test]
fn lambda2_operators_match_index_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let h = random_metric(&mut rng, 6, 2);
    let e = random_self_adjoint(&mut rng, &h);
    let f = random_self_adjoint(&mut rng, &h);
    let k = random_skew(&mut rng, &h);
    let l = random_skew(&mut rng, &h);
    let via = trace_identities_via_lambda2(&e, &f, &k, &l, &h).unwrap();
    let oracle = lowered_products(&e, &f, &k, &l, &h);
    assert!(rel_err(via.owedge_owedge, oracle[0]) < 1e-9);
    assert!(rel_err(via.obar_obar, oracle[1]) < 1e-9);
    assert!(rel_err(via.owedge_obar, oracle[2]) < 1e-9);
}

#[test]
fn identity_and_symplectic_reference_values() {
    let h = BilinearForm::identity(4);
    let id = Endomorphism::identity(4);
    let ii = owedge(&h, &h);
    // 2·id on the six-dimensional Λ²
    assert!((brute_force_trace(&ii, &ii, &h) - 24.0).abs() < 1e-12);
    let mut w = hkqk::pseudo_linear::Matrix::zeros(4, 4);
    for i in [0, 2] {
        w[(i, i + 1)] = 1.0;
        w[(i + 1, i)] = -1.0;
    }
    let w = BilinearForm::new(w);
    let ww = obar(&w, &w).unwrap();
    assert!((brute_force_trace(&ww, &ww, &h) - 120.0).abs() < 1e-10);
    let j = w.raise_with(&h).unwrap();
    let t = trace_identities(&id, &id, &j, &j, &h).unwrap();
    assert_eq!(t.obar_obar, 120.0);
}

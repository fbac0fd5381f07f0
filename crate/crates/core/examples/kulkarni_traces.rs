//! The three trace identities for `⊙` and `⊘`, closed form against the
//! explicit operators on `Λ²`.

use hkqk::kulkarni::{trace_identities, trace_identities_via_lambda2};
use hkqk::pseudo_linear::{BilinearForm, Endomorphism, Matrix};

fn main() -> hkqk::Result<()> {
    let d = 8;
    let h = BilinearForm::diagonal(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    let eta = h.matrix();
    // h-self-adjoint: η S; h-skew: η A
    let s = Matrix::from_fn(d, d, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
    let a = Matrix::from_fn(d, d, |i, j| ((i * 2 + j) % 5) as f64);
    let e = Endomorphism::new(eta * (&s + s.transpose()));
    let f = Endomorphism::new(eta * Matrix::identity(d, d));
    let k = Endomorphism::new(eta * (&a - a.transpose()));
    let l = Endomorphism::new(eta * (a.transpose() * Matrix::from_diagonal_element(d, d, 2.0) - &a * 2.0));

    let closed = trace_identities(&e, &f, &k, &l, &h)?;
    let brute = trace_identities_via_lambda2(&e, &f, &k, &l, &h)?;
    println!(
        "tr((E⊙E)(F⊙F)): closed {:>14.6} operator {:>14.6}",
        closed.owedge_owedge, brute.owedge_owedge
    );
    println!(
        "tr((K⊘K)(L⊘L)): closed {:>14.6} operator {:>14.6}",
        closed.obar_obar, brute.obar_obar
    );
    println!(
        "tr((E⊙E)(K⊘K)): closed {:>14.6} operator {:>14.6}",
        closed.owedge_obar, brute.owedge_obar
    );
    Ok(())
}

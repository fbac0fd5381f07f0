//! Orthonormal frames and adjoints for an indefinite metric.

use hkqk::pseudo_linear::{adjoint, pseudo_gram_schmidt, BilinearForm, Endomorphism, Matrix, Vector};

fn main() -> hkqk::Result<()> {
    // signature (2, 2), written in a non-diagonal basis
    let p = Matrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0, 0.0, 1.0, -0.2, 0.1, 0.0, 0.0, 1.0,
        ],
    );
    let h =
        BilinearForm::new(p.transpose() * Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 1.0, -1.0, -1.0])) * &p);

    let frame = pseudo_gram_schmidt(&h, &Matrix::identity(4, 4))?;
    println!("signs: {:?}", frame.signs());
    let off = frame.gramian(&h) - Matrix::from_diagonal(&Vector::from_vec(frame.signs().to_vec()));
    println!("|gramian − diag(signs)| = {:.1e}", off.amax());

    let e = Endomorphism::new(Matrix::from_fn(4, 4, |i, j| (i as f64 + 1.0) * 0.1 - j as f64 * 0.05));
    let e_star = adjoint(&e, &h)?;
    let x = frame.vector(0);
    let y = frame.vector(3);
    println!("h(Ex, y) = {:.12}", h.eval(&e.apply(&x), &y));
    println!("h(x, E*y) = {:.12}", h.eval(&x, &e_star.apply(&y)));
    Ok(())
}

//! The flat model: its structures, `g_H`, `K`, and the differential identities.

use hkqk::flat_model::{geometry_at, verify_differential_identities, ModelParams};
use hkqk::pseudo_linear::Matrix;

fn main() -> hkqk::Result<()> {
    let params = ModelParams::new(1, 1.0)?;
    let point = params.point(&[2.0, 0.5, 0.3, -0.4, 0.1, 0.2, -0.7, 0.4])?;
    let geom = geometry_at(&params, &point)?;
    println!(
        "d = {}, f_Z = {:.6}, f_H = {:.6}, g(Z,Z) = {:.6}",
        geom.dim(),
        geom.f_z,
        geom.f_h,
        geom.g_zz
    );

    let id = Matrix::identity(geom.dim(), geom.dim());
    println!(
        "|I_H² + id| = {:.2e}",
        (geom.i_h.matrix() * geom.i_h.matrix() + &id).amax()
    );
    println!(
        "|K − closed form| = {:.2e}",
        (geom.k.matrix() - geom.k_closed().matrix()).amax()
    );
    let spectrum = geom.k.matrix().clone().symmetric_eigen().eigenvalues;
    let mut spectrum: Vec<f64> = spectrum.iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    println!("spectrum of K: {spectrum:.6?}");

    for (name, residual) in verify_differential_identities(&params, &point)?.entries() {
        println!("{name:>22}: {residual:.2e}");
    }
    Ok(())
}

//! `S = D^H − D` three ways: closed form, Koszul parts by finite differences,
//! and the defining properties.

use hkqk::correspondence::{s_closed_tensor, s_from_parts_tensor};
use hkqk::flat_model::{geometry_at, sample_point, ModelParams};
use hkqk::pseudo_linear::DEFAULT_FD_STEP;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hkqk::Result<()> {
    let params = ModelParams::new(1, 0.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let geom = geometry_at(&params, &sample_point(&params, &mut rng))?;
        let closed = s_closed_tensor(&geom);
        let parts = s_from_parts_tensor(&geom, DEFAULT_FD_STEP)?;
        println!(
            "f_Z = {:6.3}  |S| = {:8.3}  parts vs closed {:.1e}  torsion {:.1e}  D^H g_H {:.1e}",
            geom.f_z,
            closed.max_abs(),
            parts.total().max_abs_diff(&closed) / closed.max_abs(),
            closed.torsion_residual(&geom),
            closed.metric_compatibility_residual(&geom, DEFAULT_FD_STEP)?,
        );
    }
    Ok(())
}

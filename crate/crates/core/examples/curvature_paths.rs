//! R̃ from differentiating S against the closed Kulkarni–Nomizu expression,
//! compared in a g_H-orthonormal frame.

use hkqk::correspondence::{curvature_tensors, rtilde_direct, SPath, NESTED_FD_STEP};
use hkqk::curvature::g_h_frame;
use hkqk::flat_model::{geometry_at, sample_point, ModelParams};
use hkqk::pseudo_linear::DEFAULT_FD_STEP;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hkqk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 0..=2 {
        let params = ModelParams::new(m, 1.0)?;
        let geom = geometry_at(&params, &sample_point(&params, &mut rng))?;
        let frame = g_h_frame(&geom)?;
        let t = curvature_tensors(&geom, SPath::Closed, DEFAULT_FD_STEP)?;
        let closed = t.rtilde_closed.in_frame(&frame);
        let direct = t.rtilde_direct.in_frame(&frame);
        let nested = rtilde_direct(&geom, SPath::FromParts, NESTED_FD_STEP)?.in_frame(&frame);
        println!(
            "m = {m}  f_Z = {:.3}  max|R̃| = {:.3}  closed-S path {:.1e}  Koszul path {:.1e}  Bianchi {:.1e}",
            geom.f_z,
            closed.max_abs(),
            direct.max_abs_diff(&closed),
            nested.max_abs_diff(&closed),
            t.rtilde_closed.bianchi_residual(),
        );
    }
    Ok(())
}

//! R̃ = νR_0 + R_1 with ν = −1 and R_1 commuting with every I_k.

use hkqk::correspondence::rtilde_closed;
use hkqk::curvature::{alekseevsky_split, g_h_frame, hk_type_residual};
use hkqk::flat_model::{geometry_at, sample_point, ModelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hkqk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for c in [0.0, 1.0] {
        let params = ModelParams::new(1, c)?;
        let geom = geometry_at(&params, &sample_point(&params, &mut rng))?;
        let split = alekseevsky_split(&geom, &rtilde_closed(&geom));
        let frame = g_h_frame(&geom)?;
        println!(
            "c = {c}: ν = {}, |R_0 part| = {:.6}, |R_1| = {:.6}, max |[R_1(A,B), I_k]| = {:.1e}",
            split.nu,
            split.r0_part.in_frame(&frame).frobenius(),
            split.r1_part.in_frame(&frame).frobenius(),
            hk_type_residual(&geom, &split.r1_part, 50, &mut rng),
        );
    }
    Ok(())
}

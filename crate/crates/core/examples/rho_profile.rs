//! The norm depends on the point only through ρ = 2f_Z: constant for c = 0,
//! strictly monotone otherwise.

use hkqk::curvature::{closed_norm_frame, is_strictly_monotone, norm_at_rho};
use hkqk::flat_model::{geometry_at, sample_point_with_f_z, ModelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hkqk::Result<()> {
    let q = 2;
    for c in [0.0, 0.5, 1.0] {
        let grid: Vec<f64> = (0..=8).map(|i| 0.01 * 10f64.powf(i as f64 / 2.0)).collect();
        let values = grid
            .iter()
            .map(|&rho| norm_at_rho(q, c, rho))
            .collect::<hkqk::Result<Vec<_>>>()?;
        let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
        println!(
            "c = {c}: {}  monotone: {}",
            shown.join(" "),
            is_strictly_monotone(&values)
        );
    }

    // two unrelated points on one level set of f_Z
    let params = ModelParams::new(q - 1, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let norms = (0..2)
        .map(|_| {
            let geom = geometry_at(&params, &sample_point_with_f_z(&params, 0.8, &mut rng))?;
            closed_norm_frame(&geom)
        })
        .collect::<hkqk::Result<Vec<_>>>()?;
    println!("f_Z = 0.8 at two points: {:.12} {:.12}", norms[0], norms[1]);
    Ok(())
}

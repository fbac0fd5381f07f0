//! The squared curvature norm and scalar curvature, numerically and in closed form.

use hkqk::curvature::{norm_report, FrameCurvature};
use hkqk::flat_model::{geometry_at, ModelParams};

fn main() -> hkqk::Result<()> {
    let params = ModelParams::new(0, 1.0)?;
    let point = params.point(&[2.0, 0.0, 0.0, 0.0])?;
    let geom = geometry_at(&params, &point)?;
    let r = norm_report(&geom, &FrameCurvature::closed(&geom)?)?;
    println!("q = {}, ρ = {}, f_Z = {}, f_H = {}", r.q, r.rho, r.f_z, r.f_h);
    println!("‖R̃‖² frame  = {:.12}", r.norm_frame);
    println!("‖R̃‖² closed = {:.12}", r.norm_closed);
    println!("scal = {:.12}, ν = {:.12}", r.scal, r.nu);
    Ok(())
}

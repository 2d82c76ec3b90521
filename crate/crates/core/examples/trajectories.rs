//! Wall trajectories of the four solvable families over two periods.

use std::f64::consts::PI;

use vibcav::catalog::{make_homographic, make_inversion, make_linear_finite, make_linear_odd};
use vibcav::moore::MooreEvaluator;

fn main() -> vibcav::Result<()> {
    let models = [
        make_linear_finite(2, PI / 4.0, PI)?,
        make_linear_odd(2, 0.3, PI)?,
        make_inversion(1, PI / 6.0, PI)?,
        make_homographic(1, 1.0, 2.0, PI)?,
    ];
    for model in models {
        let ev = MooreEvaluator::new(model.clone());
        println!(
            "{:<14} L = {:.6}  vmax = {:.6}  ΔL/L = {:.6}",
            model.family.as_str(),
            model.length,
            model.vmax,
            model.amplitude() / model.length
        );
        for i in 0..=8 {
            let t = model.period * i as f64 / 4.0;
            println!("    t = {t:8.4}  L(t) = {:.10}  L'(t) = {:+.6}", ev.trajectory(t), ev.wall_velocity(t)?);
        }
    }
    Ok(())
}

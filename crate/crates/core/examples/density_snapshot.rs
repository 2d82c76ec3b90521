//! Energy density inside the cavity: travelling packets over a sub-Casimir plateau.

use std::f64::consts::PI;

use vibcav::catalog::make_linear_finite;
use vibcav::moore::MooreEvaluator;
use vibcav::observables::{density_snapshot, find_packets, plateau_values};

fn main() -> vibcav::Result<()> {
    let model = make_linear_finite(2, PI / 4.0, PI)?;
    let t = 40.0 * model.period;
    let ev = MooreEvaluator::new(model.clone());

    let snap = density_snapshot(&ev, t, 4001);
    let values: Vec<f64> = snap.iter().map(|p| p.1).collect();
    let packets = find_packets(&values, 0.0);
    println!("t = 40T, L(t) = {:.6}", ev.trajectory(t));
    println!("packets at x = {:?}", packets.iter().map(|&i| format!("{:.4}", snap[i].0)).collect::<Vec<_>>());

    let plateau = plateau_values(&ev, t, 4001, PI / 4.0);
    let mean = plateau.iter().sum::<f64>() / plateau.len() as f64;
    let expected = -(2.0 * model.m as f64 + 2.0 * model.theta / PI).powi(2);
    println!("plateau {mean:.6} rho0 (expected {expected}) from {} points", plateau.len());

    for (x, v) in snap.iter().step_by(250) {
        println!("    x = {x:8.4}  T00/rho0 = {v:12.4}");
    }
    Ok(())
}

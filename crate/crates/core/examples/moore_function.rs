//! Moore's function, its map index and the staircase it approaches.

use std::f64::consts::PI;

use vibcav::catalog::make_linear_finite;
use vibcav::moore::MooreEvaluator;

fn main() -> vibcav::Result<()> {
    let ev = MooreEvaluator::new(make_linear_finite(2, PI / 4.0, PI)?);
    let l = ev.model().length;

    println!("milestones:");
    for k in 0..6 {
        println!("    L_{k} = {:.12}", ev.milestone(k));
    }

    println!("{:>10} {:>16} {:>4} {:>12}", "tau", "R(tau)", "n", "R'(tau)");
    for i in 0..=24 {
        let tau = -l + 5.0 * i as f64;
        println!(
            "{tau:10.4} {:16.10} {:4} {:12.4e}",
            ev.moore_eval(tau),
            ev.map_index(tau),
            ev.moore_derivative(tau)
        );
    }

    // R(t + L(t)) − R(t − L(t)) = 2L along the wall.
    let worst = (0..2000).map(|i| ev.moore_residual(0.05 * i as f64).abs()).fold(0.0, f64::max);
    println!("max Moore residual on [0, 100]: {worst:.2e}");
    Ok(())
}

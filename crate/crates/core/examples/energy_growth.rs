//! Radiated energy of the odd-resonance family: closed form against quadrature,
//! the once-per-period jumps, and the quantum/classical growth coefficients.

use vibcav::catalog::make_linear_odd;
use vibcav::moore::MooreEvaluator;
use vibcav::observables::{
    asymptotic_energy, classical_energy, coefficient_table, total_energy_closed, total_energy_quadrature,
};

fn main() -> vibcav::Result<()> {
    let model = make_linear_odd(2, 0.3, std::f64::consts::PI)?;
    let ev = MooreEvaluator::new(model.clone());

    println!("{:>8} {:>16} {:>16} {:>10} {:>16} {:>14}", "t/T", "quadrature", "closed", "rel diff", "asymptotic", "classical");
    for k in [0.0, 0.5, 1.02, 5.5, 10.02, 20.5, 40.02] {
        let t = k * model.period;
        let q = total_energy_quadrature(&ev, t, 1e-10)?;
        let c = total_energy_closed(&ev, t)?;
        let a = asymptotic_energy(&ev, t).value;
        let cl = classical_energy(&ev, t, 1e-9)?;
        println!("{k:8.2} {q:16.10} {c:16.10} {:10.1e} {a:16.10} {cl:14.8}", ((q - c) / q).abs());
    }

    println!("\ngrowth coefficients in units of pi tan^2(theta)/(12L):");
    for row in coefficient_table(8) {
        println!("    M = {}  quantum {:.6}  classical {:.6}  sum {:.15}", row.m, row.quantum, row.classical, row.sum);
    }
    Ok(())
}

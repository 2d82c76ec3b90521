//! A hyperbolic fundamental map: exponential energy growth and its rate.

use std::f64::consts::PI;

use vibcav::catalog::make_homographic;
use vibcav::moore::MooreEvaluator;
use vibcav::observables::{period_energy_integral, total_energy_piecewise, trace_ratio, trace_ratio_closed};
use vibcav::stability::{classify_model, fitted_growth_rate};

fn main() -> vibcav::Result<()> {
    let model = make_homographic(1, 1.0, 2.0, PI)?;
    let ev = MooreEvaluator::new(model.clone());
    let report = classify_model(&model);
    let class = model.delta1.classify();
    println!("map class {:?}, eigenvalues {} and {}", class.kind, class.lambda1, class.lambda2);
    println!("verdict {}, recurrence time {:?}", report.verdict.as_str(), report.recurrence_time);

    let fitted = fitted_growth_rate(&ev, 30.0 * PI, 80.0 * PI, 400);
    println!("growth rate: predicted {:.6}, fitted {fitted:.6}", report.growth_rate.unwrap_or(f64::NAN));

    for n in [1, 2, 5, 10] {
        println!(
            "n = {n:2}: Tr(HᵀH)/det = {:.6e} (closed {:.6e}), energy per period {:.6e}",
            trace_ratio(&ev, n),
            trace_ratio_closed(&ev, n),
            period_energy_integral(&ev, n)?
        );
    }
    for k in [10.0, 20.0, 40.0, 80.0] {
        println!("E({k}T) = {:.6e}", total_energy_piecewise(&ev, k * PI));
    }
    Ok(())
}

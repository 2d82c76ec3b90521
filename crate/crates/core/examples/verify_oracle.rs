//! Cross-checks a model against Moore's function rebuilt from its trajectory
//! alone, then shows the same checks catching a corrupted fundamental map.

use std::f64::consts::PI;

use vibcav::catalog::make_inversion;
use vibcav::moore::MooreEvaluator;
use vibcav::oracle::{moore_from_trajectory, verify_model, TrajectoryHandle};

fn main() -> vibcav::Result<()> {
    let model = make_inversion(1, PI / 6.0, PI)?;

    // Sampled trajectory, as if measured.
    let ev = MooreEvaluator::new(model.clone());
    let ts: Vec<f64> = (0..=2000).map(|i| PI * i as f64 / 2000.0).collect();
    let ls: Vec<f64> = ts.iter().map(|&t| ev.trajectory(t)).collect();
    let sampled = TrajectoryHandle::from_samples(ts, ls, PI)?;
    for tau in [5.0, 20.0, 60.0] {
        let r = moore_from_trajectory(&sampled, tau, 1e-12)?;
        println!("R({tau}) closed {:.12}  from samples {r:.12}", ev.moore_eval(tau));
    }

    for (label, m) in [("healthy", model.clone()), ("corrupted", model.with_map_offset(1e-4)?)] {
        let report = verify_model(&m, 40.0 * PI, 500);
        println!("\n{label}: {}", if report.passed { "all checks pass" } else { "FAILED" });
        for c in &report.checks {
            println!("    {:<26} {:10.3e} (limit {:.1e}) {}", c.name, c.value, c.threshold, if c.passed { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}

//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Finds a root of `g` in `[lo, hi]` to absolute tolerance `tol`.
///
/// False-position steps (with the Illinois weight reduction) are used while they
/// keep shrinking the bracket quickly; otherwise the step falls back to bisection,
/// so convergence is never slower than bisection.
pub fn solve_bracketed<G: FnMut(f64) -> f64>(mut g: G, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo: a, hi: b });
    }
    let mut side = 0i8;
    let mut prev_width = b - a;
    let mut first = true;
    for _ in 0..max_iter {
        let width = b - a;
        if width <= tol {
            return Ok(0.5 * (a + b));
        }
        let secant = (a * fb - b * fa) / (fb - fa);
        let x = if (first || width <= 0.5 * prev_width) && secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        first = false;
        prev_width = width;
        let fx = g(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if (b - a) <= tol {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
    }
    Err(Error::IterationCap(max_iter))
}

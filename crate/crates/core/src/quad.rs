//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    // Sharpened estimate commonly used with this rule pair.
    let err = if err > 0.0 { err * (200.0 * err / value.abs().max(1e-300)).powf(1.5).min(1.0) } else { 0.0 };
    (value, err.max(50.0 * f64::EPSILON * value.abs()))
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, starting from the subdivision given by
/// `breakpoints` (points outside `(a, b)` are ignored).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: QuadOptions) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut nodes: Vec<f64> = std::iter::once(lo)
        .chain(breakpoints.iter().copied().filter(|&x| x > lo && x < hi))
        .chain(std::iter::once(hi))
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in nodes.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureBudget { estimate: sign * total, error: total_err });
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated update roundoff.
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Quadrature { value: sign * value, error, intervals: heap.len() })
}

//! Stability classification, growth rates and the (frequency, amplitude) phase diagram.

use std::f64::consts::PI;

use serde::Serialize;

use crate::catalog::{make_homographic, CavityModel, Family};
use crate::mobius::{MapClass, MapKind};
use crate::moore::MooreEvaluator;
use crate::observables::total_energy_piecewise;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    PowerLike,
    Exponential,
    Forbidden,
    Undefined,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::PowerLike => "power_like",
            Verdict::Exponential => "exponential",
            Verdict::Forbidden => "forbidden",
            Verdict::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub family: Family,
    pub map_class: MapClass,
    pub verdict: Verdict,
    /// Exponential rate of the energy, per unit time.
    pub growth_rate: Option<f64>,
    /// Exponent of the power law `E ∝ tᵖ`.
    pub energy_exponent: Option<f64>,
    /// Asymptotic spacing of milestones, i.e. the time over which the map index
    /// advances by one (hyperbolic maps only).
    pub recurrence_time: Option<f64>,
}

/// Asymptotic milestone spacing of a hyperbolic model.
///
/// Along an eigen-direction `e(φ*)` of `Δ₁` the lift satisfies `f(τ*) = τ* − pT`
/// exactly, so the milestones approach a spacing of `pT`.
pub fn recurrence_time(model: &CavityModel) -> Option<f64> {
    let class = model.delta1.classify();
    if class.kind != MapKind::Hyperbolic {
        return None;
    }
    let h = model.delta1;
    let lambda = class.lambda1.re;
    let (x, y) = if h.b.abs() + (lambda - h.a).abs() > h.c.abs() + (lambda - h.d).abs() {
        (h.b, lambda - h.a)
    } else {
        (lambda - h.d, h.c)
    };
    let phi = x.atan2(y);
    let period = model.period;
    let mut tau = 2.0 * phi / model.omega;
    tau += ((model.length - tau) / period).ceil().max(0.0) * period;
    let ev = MooreEvaluator::new(model.clone());
    let p = ((tau - ev.f_eval(tau)) / period).round();
    Some(p * period)
}

pub fn classify_model(model: &CavityModel) -> StabilityReport {
    let map_class = model.delta1.classify();
    let (verdict, exponent) = match model.family {
        Family::Static | Family::Inversion => (Verdict::Stable, None),
        Family::LinearFinite => (Verdict::PowerLike, Some(2.0)),
        Family::LinearOdd if model.m == 1 => (Verdict::Stable, None),
        Family::LinearOdd => (Verdict::PowerLike, Some(2.0)),
        Family::Homographic => match map_class.kind {
            MapKind::Elliptic => (Verdict::Stable, None),
            MapKind::Parabolic => (Verdict::PowerLike, Some(2.0)),
            MapKind::Hyperbolic => (Verdict::Exponential, None),
        },
    };
    let (growth_rate, recurrence) = if verdict == Verdict::Exponential {
        let rec = recurrence_time(model);
        (rec.map(|r| map_class.eigen_ratio().ln() / r), rec)
    } else {
        (None, None)
    };
    StabilityReport {
        family: model.family,
        map_class,
        verdict,
        growth_rate,
        energy_exponent: exponent,
        recurrence_time: recurrence,
    }
}

/// `ΔL/L` of the finite linear family at frequency ratio `ω/ω₁`.
pub fn amplitude_frequency_curve(omega_ratio: f64) -> f64 {
    (1.0 - 2.0 / omega_ratio * (omega_ratio / 2.0 + 0.5).floor()).abs()
}

/// Smallest `ΔL/L` at which a homographic wall becomes exponentially unstable.
pub fn instability_threshold(omega_ratio: f64) -> f64 {
    (omega_ratio - (omega_ratio + 0.5).floor()).abs() / omega_ratio
}

/// Largest `ΔL/L` compatible with a subluminal wall.
pub fn max_amplitude(omega_ratio: f64) -> f64 {
    1.0 / omega_ratio
}

/// Verdict at one point of the diagram, with tolerance bands `(d_ratio, d_amp)`
/// around the marginal curves.
pub fn phase_verdict(omega_ratio: f64, amplitude_ratio: f64, d_ratio: f64, d_amp: f64) -> Verdict {
    if !(omega_ratio > 1.0) || amplitude_ratio < 0.0 {
        return Verdict::Undefined;
    }
    if amplitude_ratio > max_amplitude(omega_ratio) {
        return Verdict::Forbidden;
    }
    let thr = instability_threshold(omega_ratio);
    if (amplitude_ratio - thr).abs() <= d_amp || (omega_ratio - omega_ratio.round()).abs() <= d_ratio {
        return Verdict::PowerLike;
    }
    if amplitude_ratio > thr {
        Verdict::Exponential
    } else {
        Verdict::Stable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub omega_ratio: f64,
    pub amplitude_ratio: f64,
    pub verdict: Verdict,
}

/// Scans a `grid.0 × grid.1` lattice (frequency-major order). Marginal curves are
/// marked power-like within half a grid cell.
pub fn phase_diagram_scan(omega_range: (f64, f64), amplitude_range: (f64, f64), grid: (usize, usize)) -> Vec<PhasePoint> {
    let (nx, ny) = (grid.0.max(2), grid.1.max(2));
    let dx = (omega_range.1 - omega_range.0) / (nx - 1) as f64;
    let dy = (amplitude_range.1 - amplitude_range.0) / (ny - 1) as f64;
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let r = omega_range.0 + dx * i as f64;
        for j in 0..ny {
            let a = amplitude_range.0 + dy * j as f64;
            out.push(PhasePoint {
                omega_ratio: r,
                amplitude_ratio: a,
                verdict: phase_verdict(r, a, 0.5 * dx.abs(), 0.5 * dy.abs()),
            });
        }
    }
    out
}

/// Homographic models oscillating at `ω/ω₁ = omega_ratio` with `ΔL/L = amplitude_ratio`.
///
/// The resonance order and start phase follow from the frequency
/// (`v₀ = tan(π(r/2 − M))`), the speed bound from the amplitude
/// (`vmax = sin(πra/2)`), and the two signs of `ωL + θ` give two maps.
pub fn homographic_realizations(omega_ratio: f64, amplitude_ratio: f64, period: f64) -> Vec<CavityModel> {
    let m = (omega_ratio / 2.0).round();
    if m < 1.0 {
        return Vec::new();
    }
    let v0 = (PI * (omega_ratio / 2.0 - m)).tan();
    let vmax = (PI * omega_ratio * amplitude_ratio / 2.0).sin();
    [vmax.asin(), -vmax.asin()]
        .iter()
        .filter_map(|&s| {
            let theta = s - 2.0 * v0.atan();
            let den = 2.0 * (theta.tan() + v0);
            if den == 0.0 || !den.is_finite() {
                return None;
            }
            make_homographic(m as u32, v0, (1.0 + v0 * v0) / den, period).ok()
        })
        .collect()
}

/// Least-squares slope of `ln E` against `t` over `samples` points of `[t0, t1]`.
pub fn fitted_growth_rate(ev: &MooreEvaluator, t0: f64, t1: f64, samples: usize) -> f64 {
    let n = samples.max(2);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
            (t, total_energy_piecewise(ev, t).abs().ln())
        })
        .collect();
    linear_fit(&pts).1
}

/// Ordinary least squares `y ≈ a + b·x`; returns `(a, b)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Least squares `y ≈ c₀ + c₁x + c₂x²`; returns `[c₀, c₁, c₂]`.
pub fn quadratic_fit(pts: &[(f64, f64)]) -> [f64; 3] {
    // Fit in a centred, scaled variable for conditioning, then expand.
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let sx = pts.iter().map(|p| (p.0 - mx).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for &(x, y) in pts {
        let u = (x - mx) / sx;
        let row = [1.0, u, u * u];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let c = solve3(ata, aty);
    let (c0, c1, c2) = (c[0], c[1] / sx, c[2] / (sx * sx));
    [c0 - c1 * mx + c2 * mx * mx, c1 - 2.0 * c2 * mx, c2]
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

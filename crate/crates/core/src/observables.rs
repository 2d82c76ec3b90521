//! Vacuum energy density and radiated energy.
//!
//! On the characteristic `τ` the density profile is
//! `ϱ(τ) = −ω²/(48π) + (ω² − ω₁²)/(48π)·β_n(ωτ/2)²`, where `β_n` is the phase slope
//! of the n-fold map active at `τ`. The Schwarzian contribution of a Möbius map
//! vanishes identically, and the phase-slope form has no poles, so no special
//! handling of `v = tan(ωτ/2) → ±∞` is needed.

use std::f64::consts::PI;

use serde::Serialize;

use crate::catalog::Family;
use crate::error::{Error, Result};
use crate::mobius::{Homography, MapKind};
use crate::moore::MooreEvaluator;
use crate::quad::{integrate, QuadOptions};

/// Conditioning above which piece integrals switch to the image-angle variable.
const IMAGE_VARIABLE_CONDITIONING: f64 = 1e4;

/// The explicit odd-resonance energy formula differs from its printed
/// transcription; [`total_energy_closed`] implements the re-derived form and
/// [`total_energy_closed_as_printed`] keeps the transcription for comparison.
pub const CLOSED_FORM_CORRECTED: bool = true;

fn c0(ev: &MooreEvaluator) -> f64 {
    let w = ev.model().omega;
    -w * w / (48.0 * PI)
}

/// Coefficient `(ω² − ω₁²)/(48π)` of the squared phase slope.
pub fn anomaly_weight(ev: &MooreEvaluator) -> f64 {
    let m = ev.model();
    let (w, w1) = (m.omega, m.omega1());
    (w * w - w1 * w1) / (48.0 * PI)
}

/// Map `Δₙ` active at characteristic time `tau`.
pub fn active_map(ev: &MooreEvaluator, tau: f64) -> Homography {
    ev.model().delta1.power(ev.map_index(tau) as u32)
}

/// Density profile `ϱ(τ)`.
pub fn density_profile(ev: &MooreEvaluator, tau: f64) -> f64 {
    let beta = active_map(ev, tau).phase_slope(0.5 * ev.model().omega * tau);
    c0(ev) + anomaly_weight(ev) * beta * beta
}

/// `⟨T₀₀(t, x)⟩ = ϱ(t + x) + ϱ(t − x)` for `0 ≤ x ≤ L(t)`.
pub fn energy_density_2d(ev: &MooreEvaluator, t: f64, x: f64) -> Result<f64> {
    let lt = ev.trajectory(t);
    let slack = 1e-12 * lt;
    if !(x >= -slack && x <= lt + slack) {
        return Err(Error::OutsideCavity { x, length: lt });
    }
    Ok(density_profile(ev, t + x) + density_profile(ev, t - x))
}

/// Snapshot of `⟨T₀₀(t, x)⟩/ρ₀` on `samples` evenly spaced points of `[0, L(t)]`.
pub fn density_snapshot(ev: &MooreEvaluator, t: f64, samples: usize) -> Vec<(f64, f64)> {
    let lt = ev.trajectory(t);
    let rho0 = ev.model().rho0();
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let x = lt * i as f64 / (n - 1) as f64;
            let v = density_profile(ev, t + x) + density_profile(ev, t - x);
            (x, v / rho0)
        })
        .collect()
}

/// Indices of strict interior local maxima exceeding `threshold`.
pub fn find_packets(values: &[f64], threshold: f64) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > threshold && values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Phase `φ*` (mod π) at which the phase slope of `h` peaks.
pub fn packet_phase(h: &Homography) -> f64 {
    let a2 = h.a * h.a + h.c * h.c;
    let b2 = h.b * h.b + h.d * h.d;
    let cross = h.a * h.b + h.c * h.d;
    0.5 * (cross.atan2(0.5 * (b2 - a2)) + PI)
}

fn phase_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    d.min(PI - d)
}

/// `⟨T₀₀⟩/ρ₀` at snapshot points whose two characteristics both lie at least
/// `min_phase` (in `ωτ/2`, modulo π) away from the packet centre of their map.
/// Points still in the static region do not carry packets and are skipped too.
pub fn plateau_values(ev: &MooreEvaluator, t: f64, samples: usize, min_phase: f64) -> Vec<f64> {
    let m = ev.model();
    let far = |tau: f64| {
        let n = ev.map_index(tau);
        n > 0 && phase_distance(0.5 * m.omega * tau, packet_phase(&m.delta1.power(n as u32))) >= min_phase
    };
    density_snapshot(ev, t, samples)
        .into_iter()
        .filter(|&(x, _)| far(t + x) && far(t - x))
        .map(|(_, v)| v)
        .collect()
}

/// Integration window `[t − L(t), t + L(t)]` and the milestones inside it.
fn window(ev: &MooreEvaluator, t: f64) -> (f64, f64, Vec<f64>) {
    let lt = ev.trajectory(t);
    let (lo, hi) = (t - lt, t + lt);
    (lo, hi, ev.milestones_between(lo, hi))
}

/// Pieces of `[lo, hi]` on which the map index is constant, with that index.
fn pieces(ev: &MooreEvaluator, lo: f64, hi: f64, cuts: &[f64]) -> Vec<(f64, f64, u32)> {
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend_from_slice(cuts);
    edges.push(hi);
    let n0 = ev.map_index(lo) as u32;
    edges.windows(2).enumerate().map(|(i, w)| (w[0], w[1], n0 + i as u32)).collect()
}

/// Total energy `E(t) = ∫ ϱ(τ) dτ` over `[t − L(t), t + L(t)]` by adaptive quadrature.
///
/// Every milestone and half-period point is a forced breakpoint. On pieces whose
/// map is badly conditioned the integral is taken in the image angle `ψ`
/// (`dψ = β dφ`), where the integrand is a smooth trigonometric polynomial.
pub fn total_energy_quadrature(ev: &MooreEvaluator, t: f64, rel_tol: f64) -> Result<f64> {
    if !(rel_tol >= 1e-12) {
        return Err(Error::InvalidInput(format!("rel_tol {rel_tol} below 1e-12")));
    }
    let m = ev.model();
    let w = m.omega;
    let (lo, hi, cuts) = window(ev, t);
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol, max_intervals: 20_000 };
    let mut anomaly = 0.0;
    for (a, b, n) in pieces(ev, lo, hi, &cuts) {
        let h = m.delta1.power(n);
        if h.conditioning() <= IMAGE_VARIABLE_CONDITIONING {
            let k0 = ((a / m.period) - 0.5).floor() as i64;
            let k1 = ((b / m.period) - 0.5).ceil() as i64;
            let half: Vec<f64> = (k0..=k1).map(|k| (k as f64 + 0.5) * m.period).collect();
            let q = integrate(
                |tau| {
                    let beta = h.phase_slope(0.5 * w * tau);
                    beta * beta
                },
                a,
                b,
                &half,
                opts,
            )?;
            anomaly += q.value;
        } else {
            let (pa, pb) = (0.5 * w * a, 0.5 * w * b);
            let psi_a = h.image_angle(pa);
            let psi_b = psi_a + h.sweep(pa, pb);
            let q = integrate(|psi| h.phase_slope_image(psi), psi_a, psi_b, &[], opts)?;
            anomaly += 2.0 / w * q.value;
        }
    }
    Ok(c0(ev) * (hi - lo) + anomaly_weight(ev) * anomaly)
}

/// Antiderivative of the image-angle phase slope `|adj(H)·e(ψ)|²` (before dividing by det).
fn image_antiderivative(h: &Homography, psi: f64) -> f64 {
    let alpha = h.d * h.d + h.c * h.c;
    let gamma = h.a * h.a + h.b * h.b;
    let kappa = h.b * h.d + h.a * h.c;
    let (s2, c2) = (2.0 * psi).sin_cos();
    0.5 * (alpha + gamma) * psi + 0.25 * (gamma - alpha) * s2 + 0.5 * kappa * c2
}

/// Total energy from the exact per-piece antiderivative; valid for every family.
pub fn total_energy_piecewise(ev: &MooreEvaluator, t: f64) -> f64 {
    let m = ev.model();
    let w = m.omega;
    let (lo, hi, cuts) = window(ev, t);
    let mut anomaly = 0.0;
    for (a, b, n) in pieces(ev, lo, hi, &cuts) {
        let h = m.delta1.power(n);
        let (pa, pb) = (0.5 * w * a, 0.5 * w * b);
        let psi_a = h.image_angle(pa);
        let psi_b = psi_a + h.sweep(pa, pb);
        anomaly += (image_antiderivative(&h, psi_b) - image_antiderivative(&h, psi_a)) / h.det();
    }
    c0(ev) * (hi - lo) + anomaly_weight(ev) * 2.0 / w * anomaly
}

fn require(ev: &MooreEvaluator, family: Family, what: &'static str) -> Result<()> {
    if ev.model().family != family {
        return Err(Error::ClosedFormUnavailable(what));
    }
    Ok(())
}

/// Explicit total energy of the odd-resonance family.
///
/// With `c = tan θ`, `p = ωτ/2` and the map `v ↦ v + 2nc`, the image angle is
/// `ψₙ = p + atan2(2nc cos²p, 1 + nc sin 2p)` and the per-piece antiderivative is
/// `Gₙ = (1 + 2n²c²)ψₙ + n²c² sin 2ψₙ + nc cos 2ψₙ`. The window contains at most
/// the single milestone `(2k+1)L`.
pub fn total_energy_closed(ev: &MooreEvaluator, t: f64) -> Result<f64> {
    require(ev, Family::LinearOdd, "non-odd-resonance")?;
    let m = ev.model();
    let (l, w, c) = (m.length, m.omega, m.theta.tan());
    let mm = m.m as f64;
    let k_w = mm * (mm - 1.0) * PI / (12.0 * l * l);
    let lt = ev.trajectory(t);
    let (tp, tm) = (t + lt, t - lt);
    let g = |n: f64, tau: f64| {
        let p = 0.5 * w * tau;
        let (sp, cp) = p.sin_cos();
        let psi = p + (2.0 * n * c * cp * cp).atan2(1.0 + n * c * (2.0 * p).sin());
        let (x, y) = (sp + 2.0 * n * c * cp, cp);
        let r = x * x + y * y;
        (1.0 + 2.0 * n * n * c * c) * psi + n * n * c * c * 2.0 * x * y / r + n * c * (y * y - x * x) / r
    };
    let k = (tp / (2.0 * l) + 0.5).floor() - 1.0;
    let base = c0(ev) * (tp - tm);
    if k < 0.0 {
        return Ok(base + k_w * 2.0 / w * (g(0.0, tp) - g(0.0, tm)));
    }
    let split = ((2.0 * k + 1.0) * l).max(tm);
    Ok(base + k_w * 2.0 / w * (g(k, split) - g(k, tm) + g(k + 1.0, tp) - g(k + 1.0, split)))
}

/// The odd-resonance energy formula exactly as transcribed (with the unbalanced
/// radical read as enclosing the square-root argument). Kept for comparison only:
/// it does not agree with the quadrature.
pub fn total_energy_closed_as_printed(ev: &MooreEvaluator, t: f64) -> Result<f64> {
    require(ev, Family::LinearOdd, "non-odd-resonance")?;
    let m = ev.model();
    let (l, w, th) = (m.length, m.omega, m.theta);
    let mm = m.m as f64;
    let tt = th.tan();
    let mc = mm * (mm - 1.0);
    let alpha = t / (2.0 * l) - (t / (2.0 * l)).floor();
    let lt = ev.trajectory(t);
    let q = t / l + 1.0 - 2.0 * alpha;
    let s = (w * t).sin();
    let root = (1.0 + s * s * tt * tt).sqrt();
    let num = 1.0 + root - q * s * tt;
    let den = 1.0 - (1.0 + s * s * tt * tt + q * s * tt).sqrt();
    let arg = num / den / (w * t / 2.0).tan();
    let mut e = mc * PI * tt * tt * t * t / (12.0 * l.powi(3));
    e += mc * tt * tt / (3.0 * (2.0 * mm - 1.0) * l * l)
        * (PI / 2.0 * th.signum() - arg.atan())
        * (t + (1.0 - 2.0 * alpha) * l);
    e += -(2.0 * mm - 1.0).powi(2) * PI / (24.0 * l * l) * lt + mc * PI / (6.0 * l)
        + mc * PI * tt * tt / (3.0 * l) * alpha * (1.0 - alpha);
    let x = (w * (t + lt) / 2.0).tan();
    let z = t / (2.0 * l) - alpha;
    e += mc * tt / (3.0 * (2.0 * mm - 1.0) * l) * (1.0 + 2.0 * z * z * tt * tt + q * x * tt)
        / (1.0 + (x + (t / l + 2.0 - 2.0 * alpha) * tt).powi(2));
    Ok(e)
}

fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticEnergy {
    pub value: f64,
    /// False when `t < 20T`, where the large-time forms are not meant to apply.
    pub in_range: bool,
}

/// Large-time energy for the model's family.
///
/// * finite linear: `ω(ω² − ω₁²) tan²θ t²/(24Mπ)`;
/// * odd resonance: `M(M−1)π tan²θ/(3(2M−1)²L)·(⌊t/T⌋ + Θ(θ))²`;
/// * hyperbolic homographic: `(4M²−1)/96·(v₁ + 1/v₁)²·cosh(γt)` with `γ` the
///   growth rate from [`crate::stability::classify_model`];
/// * bounded cases: mean of `E` over the recurrence period preceding `t`.
pub fn asymptotic_energy(ev: &MooreEvaluator, t: f64) -> AsymptoticEnergy {
    let m = ev.model();
    let in_range = t >= 20.0 * m.period;
    let (w, w1, l) = (m.omega, m.omega1(), m.length);
    let mm = m.m as f64;
    let tt = m.theta.tan();
    let value = match m.family {
        Family::Static => -PI / (24.0 * l),
        Family::LinearFinite => w * (w * w - w1 * w1) * tt * tt * t * t / (24.0 * mm * PI),
        Family::LinearOdd => {
            let k = (t / m.period).floor() + heaviside(m.theta);
            mm * (mm - 1.0) * PI * tt * tt / (3.0 * (2.0 * mm - 1.0).powi(2) * l) * k * k
        }
        Family::Homographic if m.delta1.classify().kind == MapKind::Hyperbolic => {
            let v1 = m.v1.unwrap_or(1.0);
            let rate = crate::stability::classify_model(m).growth_rate.unwrap_or(0.0);
            (4.0 * mm * mm - 1.0) / 96.0 * (v1 + 1.0 / v1).powi(2) * (rate * t).cosh()
        }
        Family::Inversion | Family::Homographic => {
            let span = match m.family {
                Family::Inversion => (4.0 * mm + m.theta.signum()) * m.period,
                _ => 5.0 * m.period,
            };
            let n = 400;
            (0..n).map(|i| total_energy_piecewise(ev, t - span * (i as f64 + 0.5) / n as f64)).sum::<f64>()
                / n as f64
        }
    };
    AsymptoticEnergy { value, in_range }
}

/// Large-time classical energy of the odd-resonance family,
/// `π tan²θ/(12(2M−1)²L)·(⌊t/T⌋ + Θ(θ))²`.
pub fn asymptotic_classical_energy(ev: &MooreEvaluator, t: f64) -> Result<f64> {
    require(ev, Family::LinearOdd, "non-odd-resonance")?;
    let m = ev.model();
    let k = (t / m.period).floor() + heaviside(m.theta);
    let tt = m.theta.tan();
    Ok(PI * tt * tt / (12.0 * (2.0 * m.m as f64 - 1.0).powi(2) * m.length) * k * k)
}

/// `Tr(HₙᵀHₙ)/det Hₙ` from matrix arithmetic.
pub fn trace_ratio(ev: &MooreEvaluator, n: u32) -> f64 {
    let h = ev.model().delta1.power(n);
    h.frobenius_sq() / h.det()
}

/// `Tr(HₙᵀHₙ)/det Hₙ` from the eigenvalues of `Δ₁`:
/// `2 + C₁·((λ₁/λ₂)ⁿ + (λ₂/λ₁)ⁿ − 2)` with `C₁ = (‖Δ₁‖²_F − 2 det)/(tr² − 4 det)`;
/// the parabolic limit is `2 + n²(‖Δ₁‖²_F − 2 det)/det`.
pub fn trace_ratio_closed(ev: &MooreEvaluator, n: u32) -> f64 {
    let h = ev.model().delta1;
    let class = h.classify();
    let (d, t) = (h.det(), h.trace());
    let excess = h.frobenius_sq() - 2.0 * d;
    let nf = n as f64;
    match class.kind {
        MapKind::Parabolic => 2.0 + nf * nf * excess / d,
        MapKind::Hyperbolic => {
            let r = (class.lambda1 / class.lambda2).re;
            let s = r.abs().ln() * nf;
            let sign = if r < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            2.0 + excess / (t * t - 4.0 * d) * (sign * 2.0 * s.cosh() - 2.0)
        }
        MapKind::Elliptic => {
            let ang = class.lambda1.arg() - class.lambda2.arg();
            2.0 + excess / (t * t - 4.0 * d) * (2.0 * (nf * ang).cos() - 2.0)
        }
    }
}

/// Integral of the second density term over one full period while the map
/// index stays at `n`: `(ω² − ω₁²)/(48π) · (π/ω) · Tr(HₙᵀHₙ)/det Hₙ`.
pub fn period_energy_integral(ev: &MooreEvaluator, n: u32) -> Result<f64> {
    require(ev, Family::Homographic, "non-homographic")?;
    Ok(anomaly_weight(ev) * PI / ev.model().omega * trace_ratio(ev, n))
}

/// Energy of the classical field with initial density `ρ₀`, evolved with the
/// same wall: `E_cl(t) = (π/(48L²)) ∫ R′(τ)² dτ` over `[t − L(t), t + L(t)]`.
pub fn classical_energy(ev: &MooreEvaluator, t: f64, rel_tol: f64) -> Result<f64> {
    if !(rel_tol >= 1e-12) {
        return Err(Error::InvalidInput(format!("rel_tol {rel_tol} below 1e-12")));
    }
    let m = ev.model();
    let (lo, hi, mut cuts) = window(ev, t);
    let k0 = (lo / m.period - 0.5).floor() as i64;
    let k1 = (hi / m.period - 0.5).ceil() as i64;
    cuts.extend((k0..=k1).map(|k| (k as f64 + 0.5) * m.period));
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol, max_intervals: 20_000 };
    let q = integrate(
        |tau| {
            let d = ev.moore_derivative(tau);
            d * d
        },
        lo,
        hi,
        &cuts,
        opts,
    )?;
    Ok(PI / (48.0 * m.length * m.length) * q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRow {
    #[serde(rename = "M")]
    pub m: u32,
    pub quantum: f64,
    pub classical: f64,
    pub sum: f64,
}

/// Quantum and classical growth coefficients of the odd-resonance family in
/// units of `π tan²θ/(12L)`.
pub fn coefficient_table(m_max: u32) -> Vec<CoefficientRow> {
    (1..=m_max)
        .map(|m| {
            let mf = m as f64;
            let q2 = (2.0 * mf - 1.0).powi(2);
            let quantum = 4.0 * mf * (mf - 1.0) / q2;
            let classical = 1.0 / q2;
            CoefficientRow { m, quantum, classical, sum: quantum + classical }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::*;

    fn ev(m: crate::catalog::CavityModel) -> MooreEvaluator {
        MooreEvaluator::new(m)
    }

    #[test]
    fn casimir_baseline() {
        let e = ev(make_linear_finite(2, PI / 4.0, PI).unwrap());
        let l = e.model().length;
        let d = density_profile(&e, 0.5 * l) + density_profile(&e, -0.5 * l);
        assert!((d / (-PI / (24.0 * l * l)) - 1.0).abs() < 1e-12);
        let s = ev(make_static(2.0, PI).unwrap());
        for t in [0.0, 3.0, 40.0] {
            let q = total_energy_quadrature(&s, t, 1e-12).unwrap();
            assert!((q / (-PI / 48.0) - 1.0).abs() < 1e-12, "{q}");
            assert!((energy_density_2d(&s, t, 0.7).unwrap() / (-PI / 96.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outside_cavity_rejected() {
        let e = ev(make_linear_finite(2, PI / 4.0, PI).unwrap());
        assert!(matches!(energy_density_2d(&e, 1.0, -0.1), Err(Error::OutsideCavity { .. })));
        assert!(matches!(energy_density_2d(&e, 1.0, 100.0), Err(Error::OutsideCavity { .. })));
    }

    #[test]
    fn inversion_static_intervals() {
        let e = ev(make_inversion(1, PI / 6.0, PI).unwrap());
        let base = -e.model().omega1().powi(2) / (48.0 * PI);
        for k in 1..4 {
            let (a, b) = (e.milestone(2 * k - 1), e.milestone(2 * k));
            for i in 0..20 {
                let tau = a + (b - a) * (i as f64 + 0.5) / 20.0;
                assert!((density_profile(&e, tau) - base).abs() < 1e-12 * base.abs());
            }
        }
    }

    #[test]
    fn piecewise_matches_quadrature() {
        for m in [
            make_linear_finite(2, PI / 4.0, PI).unwrap(),
            make_linear_odd(2, -0.3, PI).unwrap(),
            make_inversion(1, PI / 6.0, PI).unwrap(),
            make_homographic(1, 1.0, 2.0, PI).unwrap(),
        ] {
            let e = ev(m);
            for t in [0.0, 1.3, 7.7, 30.0, 61.0] {
                let q = total_energy_quadrature(&e, t, 1e-12).unwrap();
                let p = total_energy_piecewise(&e, t);
                assert!((q - p).abs() <= 1e-10 * p.abs().max(1.0), "{:?} t={t}: {q} vs {p}", e.model().family);
            }
        }
    }

    #[test]
    fn closed_form_matches_piecewise_for_both_signs() {
        for (mm, th) in [(2, 0.3), (2, -0.3), (3, 0.5), (1, 0.2)] {
            let e = ev(make_linear_odd(mm, th, PI).unwrap());
            for i in 0..300 {
                let t = i as f64 * 0.52;
                let c = total_energy_closed(&e, t).unwrap();
                let p = total_energy_piecewise(&e, t);
                assert!((c - p).abs() <= 1e-11 * p.abs().max(1.0), "M={mm} θ={th} t={t}: {c} vs {p}");
            }
        }
        let e = ev(make_inversion(1, 0.4, PI).unwrap());
        assert!(matches!(total_energy_closed(&e, 1.0), Err(Error::ClosedFormUnavailable(_))));
    }

    #[test]
    fn trace_ratio_dual_path() {
        let e = ev(make_homographic(1, 1.0, 2.0, PI).unwrap());
        assert_eq!(trace_ratio(&e, 0), 2.0);
        assert!((trace_ratio(&e, 1) - 18.0).abs() < 1e-12);
        for n in 0..12 {
            let (a, b) = (trace_ratio(&e, n), trace_ratio_closed(&e, n));
            assert!((a / b - 1.0).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
        let k = anomaly_weight(&e);
        assert!((period_energy_integral(&e, 0).unwrap() - k * 2.0 * PI / e.model().omega).abs() < 1e-15);
        let ell = ev(make_homographic(2, -0.5, 1.0, PI).unwrap());
        for n in 0..40 {
            let (a, b) = (trace_ratio(&ell, n), trace_ratio_closed(&ell, n));
            assert!((a / b - 1.0).abs() < 1e-9 && a < 50.0);
        }
    }

    #[test]
    fn period_integral_matches_quadrature() {
        let e = ev(make_homographic(1, 1.0, 2.0, PI).unwrap());
        let m = e.model();
        for n in [1u32, 3] {
            let h = m.delta1.power(n);
            let q = integrate(|tau| h.phase_slope(0.5 * m.omega * tau).powi(2), 0.0, m.period, &[], QuadOptions {
                rel_tol: 1e-12,
                ..Default::default()
            })
            .unwrap();
            let expect = period_energy_integral(&e, n).unwrap();
            assert!((anomaly_weight(&e) * q.value / expect - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_static_and_table() {
        let s = ev(make_static(1.5, PI).unwrap());
        let c = classical_energy(&s, 10.0, 1e-12).unwrap();
        assert!((c - PI / (24.0 * 1.5)).abs() < 1e-13);
        let t = coefficient_table(8);
        assert_eq!((t[0].quantum, t[0].classical, t[0].sum), (0.0, 1.0, 1.0));
        assert!((t[1].quantum - 8.0 / 9.0).abs() < 1e-15 && (t[1].classical - 1.0 / 9.0).abs() < 1e-15);
        assert!(t.iter().all(|r| (r.sum - 1.0).abs() < 1e-14));
    }

    #[test]
    fn packet_phase_is_peak() {
        let h = make_homographic(1, 1.0, 2.0, PI).unwrap().delta1.power(3);
        let p = packet_phase(&h);
        let peak = h.phase_slope(p);
        for i in 0..1000 {
            assert!(h.phase_slope(i as f64 * PI / 1000.0) <= peak * (1.0 + 1e-12));
        }
    }
}

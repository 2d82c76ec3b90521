//! Moore's function `R(τ)` and the auxiliary map `f` for a catalog model.
//!
//! `f` is the angular lift of the fundamental map: with `φ = ωτ/2`,
//! `f(τ) = −L + (2/ω)·(δ₀ + Σ(φ))` for `τ ≥ L`, where `Σ` is the continuous change of
//! the image angle of `Δ₁` measured from `φ_L = ωL/2` and `δ₀` is the offset
//! between the image of the start phase and `−φ_L` (zero for admissible maps).
//! Below `L` the cavity is at rest and `f(τ) = τ − 2L`.

use std::f64::consts::PI;
use std::sync::RwLock;

use crate::catalog::{CavityModel, Family};
use crate::error::{Error, Result};
use crate::mobius::Homography;
use crate::roots::solve_bracketed;

/// Guard band for snapping `τ/T` to an integer at period boundaries.
const SNAP: f64 = 1e-12;

/// Hard limit on the number of cached milestones.
pub const MAX_MILESTONES: usize = 1 << 22;

#[derive(Debug)]
pub struct MooreEvaluator {
    model: CavityModel,
    delta1_inv: Homography,
    phi_l: f64,
    /// Angle of `Δ₁·e(φ_L)`.
    psi_l: f64,
    /// Offset of that image from `−φ_L`, wrapped to `(−π/2, π/2]`.
    delta0: f64,
    milestones: RwLock<Vec<f64>>,
}

impl Clone for MooreEvaluator {
    fn clone(&self) -> Self {
        let cache = self.milestones.read().expect("milestone cache poisoned").clone();
        Self {
            model: self.model.clone(),
            delta1_inv: self.delta1_inv,
            phi_l: self.phi_l,
            psi_l: self.psi_l,
            delta0: self.delta0,
            milestones: RwLock::new(cache),
        }
    }
}

fn wrap_half_turn(mut x: f64) -> f64 {
    while x > PI / 2.0 {
        x -= PI;
    }
    while x <= -PI / 2.0 {
        x += PI;
    }
    x
}

/// Splits `x ≥ 0` (in units of the period) into whole periods and a remainder,
/// snapping values within the guard band of an integer.
fn split_periods(x: f64, period: f64) -> (f64, f64) {
    let q = x / period;
    let mut k = q.floor();
    if q - k > 1.0 - SNAP {
        k += 1.0;
    }
    let r = (x - k * period).max(0.0);
    (k, r)
}

impl MooreEvaluator {
    pub fn new(model: CavityModel) -> Self {
        let phi_l = model.start_phase();
        let h = model.delta1;
        let psi_l = h.image_angle(phi_l);
        let delta0 = wrap_half_turn(psi_l + phi_l);
        let length = model.length;
        Self {
            delta1_inv: h.inverse(),
            phi_l,
            psi_l,
            delta0,
            milestones: RwLock::new(vec![length]),
            model,
        }
    }

    pub fn model(&self) -> &CavityModel {
        &self.model
    }

    /// Auxiliary map solving `f(t + L(t)) = t − L(t)`.
    pub fn f_eval(&self, tau: f64) -> f64 {
        let m = &self.model;
        let l = m.length;
        if tau < l {
            return tau - 2.0 * l;
        }
        let (k, r) = split_periods(tau - l, m.period);
        let rphi = 0.5 * m.omega * r;
        let sweep = m.delta1.sweep(self.phi_l, self.phi_l + rphi);
        -l + k * m.period + 2.0 / m.omega * (self.delta0 + sweep)
    }

    /// Slope `f′(τ)`.
    pub fn f_derivative(&self, tau: f64) -> f64 {
        if tau < self.model.length {
            1.0
        } else {
            self.model.delta1.phase_slope(0.5 * self.model.omega * tau)
        }
    }

    /// Inverse of [`MooreEvaluator::f_eval`]. Values that `f` skips over (possible
    /// only for corrupted maps) are sent to `L`.
    pub fn f_inverse_eval(&self, tau: f64) -> f64 {
        let m = &self.model;
        let l = m.length;
        if tau < -l {
            return tau + 2.0 * l;
        }
        let sigma = 0.5 * m.omega * (tau + l) - self.delta0;
        if sigma < 0.0 {
            return l;
        }
        // Whole half turns of ψ map to whole half turns of φ.
        let (k, r) = split_periods(sigma, PI);
        let sweep = self.delta1_inv.sweep(self.psi_l, self.psi_l + r);
        l + k * m.period + 2.0 / m.omega * sweep
    }

    /// Extends the cache until its last milestone exceeds `tau`; returns whether it does.
    fn ensure_covers(&self, tau: f64) -> bool {
        {
            let ms = self.milestones.read().expect("milestone cache poisoned");
            if *ms.last().expect("nonempty") > tau {
                return true;
            }
        }
        let mut ms = self.milestones.write().expect("milestone cache poisoned");
        let target = tau + self.model.period;
        loop {
            let last = *ms.last().expect("nonempty");
            if last > target {
                return true;
            }
            if ms.len() >= MAX_MILESTONES {
                return last > tau;
            }
            let next = self.f_inverse_eval(last);
            if !(next > last) || !next.is_finite() {
                return false;
            }
            ms.push(next);
        }
    }

    /// `L_k = (f⁻¹)ᵏ(L)`.
    pub fn milestone(&self, k: usize) -> f64 {
        {
            let ms = self.milestones.read().expect("milestone cache poisoned");
            if let Some(&x) = ms.get(k) {
                return x;
            }
        }
        let mut ms = self.milestones.write().expect("milestone cache poisoned");
        while ms.len() <= k {
            let last = *ms.last().expect("nonempty");
            ms.push(self.f_inverse_eval(last));
        }
        ms[k]
    }

    /// Milestones inside the open interval `(lo, hi)`, in increasing order.
    pub fn milestones_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.ensure_covers(hi);
        let ms = self.milestones.read().expect("milestone cache poisoned");
        let start = ms.partition_point(|&x| x <= lo);
        ms[start..].iter().copied().take_while(|&x| x < hi).collect()
    }

    /// Map index `n(τ)`: the number of milestones not exceeding `τ`.
    pub fn map_index(&self, tau: f64) -> usize {
        if tau < self.model.length {
            return 0;
        }
        if !self.ensure_covers(tau) {
            return self.iterate_count(tau);
        }
        let ms = self.milestones.read().expect("milestone cache poisoned");
        ms.partition_point(|&x| x <= tau)
    }

    fn iterate_count(&self, mut tau: f64) -> usize {
        let mut n = 0;
        while tau >= self.model.length {
            tau = self.f_eval(tau);
            n += 1;
        }
        n
    }

    /// Moore's function, by iterating `f` down to the static region.
    pub fn moore_eval(&self, tau: f64) -> f64 {
        let l = self.model.length;
        let mut x = tau;
        let mut n = 0.0;
        while x >= l {
            x = self.f_eval(x);
            n += 1.0;
        }
        x - 2.0 * l + 2.0 * l * n
    }

    /// `R′(τ)` as the product of `f′` along the iteration chain.
    pub fn moore_derivative(&self, tau: f64) -> f64 {
        let l = self.model.length;
        let mut x = tau;
        let mut p = 1.0;
        while x >= l {
            p *= self.f_derivative(x);
            x = self.f_eval(x);
        }
        p
    }

    /// Wall position from the family's closed form.
    pub fn trajectory(&self, t: f64) -> f64 {
        let m = &self.model;
        if t < 0.0 {
            return m.length;
        }
        let (l, w, th) = (m.length, m.omega, m.theta);
        let c = (w * t).cos();
        match m.family {
            Family::Static => l,
            Family::LinearFinite | Family::LinearOdd => l + ((th.sin() * c).asin() - th) / w,
            Family::Inversion => {
                l - 2.0 * th / w + th.signum() / w * (PI / 2.0 - ((2.0 * th).cos() * c).asin())
            }
            Family::Homographic => {
                let s = (w * l + th).sin();
                l + ((s * c).asin() - s.asin()) / w
            }
        }
    }

    /// `dL/dt` of the closed form.
    pub fn wall_velocity(&self, t: f64) -> Result<f64> {
        let m = &self.model;
        if t < 0.0 {
            return Ok(0.0);
        }
        let (w, th) = (m.omega, m.theta);
        let (s, c) = (w * t).sin_cos();
        let amp = match m.family {
            Family::Static => return Ok(0.0),
            Family::LinearFinite | Family::LinearOdd => -th.sin(),
            Family::Inversion => th.signum() * (2.0 * th).cos(),
            Family::Homographic => -(w * m.length + th).sin(),
        };
        let den = 1.0 - amp * amp * c * c;
        if den <= 0.0 {
            return Err(Error::NonSmooth(t));
        }
        Ok(amp * s / den.sqrt())
    }

    /// Wall position reconstructed from `f` alone: solve `(τ + f(τ))/2 = t`,
    /// then `L(t) = (τ − f(τ))/2`.
    pub fn trajectory_parametric(&self, t: f64) -> Result<f64> {
        let l = self.model.length;
        if t <= 0.0 {
            return Ok(l);
        }
        let vmax = self.model.vmax.min(1.0 - 1e-12);
        let span = l * (1.0 + vmax) / (1.0 - vmax) + 2.0 * self.model.period;
        let tau = solve_bracketed(
            |tau| 0.5 * (tau + self.f_eval(tau)) - t,
            t,
            t + span,
            1e-14 * (t + span),
            400,
        )?;
        Ok(0.5 * (tau - self.f_eval(tau)))
    }

    /// Residual of the functional equation `R(t+L(t)) − R(t−L(t)) − 2L`.
    pub fn moore_residual(&self, t: f64) -> f64 {
        let lt = self.trajectory(t);
        self.moore_eval(t + lt) - self.moore_eval(t - lt) - 2.0 * self.model.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::*;

    fn lf() -> MooreEvaluator {
        MooreEvaluator::new(make_linear_finite(2, PI / 4.0, PI).unwrap())
    }

    #[test]
    fn static_region() {
        let ev = lf();
        let l = ev.model().length;
        assert_eq!(ev.f_eval(l / 2.0), l / 2.0 - 2.0 * l);
        assert_eq!(ev.map_index(l / 2.0), 0);
        assert_eq!(ev.moore_eval(0.3), 0.3 - 2.0 * l);
    }

    #[test]
    fn half_open_index() {
        let ev = lf();
        assert_eq!(ev.map_index(ev.model().length), 1);
        let odd = MooreEvaluator::new(make_linear_odd(2, 0.3, PI).unwrap());
        assert_eq!(odd.map_index(2.4 * odd.model().length), 1);
    }

    #[test]
    fn periodicity_of_f() {
        let ev = lf();
        let (l, t) = (ev.model().length, ev.model().period);
        for i in 0..100 {
            let tau = l + 0.37 * i as f64;
            assert!((ev.f_eval(tau + t) - ev.f_eval(tau) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn milestone_examples() {
        let odd = MooreEvaluator::new(make_linear_odd(2, 0.3, PI).unwrap());
        let l = odd.model().length;
        assert!((odd.milestone(1) - 3.0 * l).abs() < 1e-12);
        let ev = lf();
        let m = ev.model();
        let expect = 2.0 / m.omega * 3f64.atan() + 3.0 * 2.0 * m.period;
        assert!((ev.milestone(1) - expect).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trip() {
        let ev = MooreEvaluator::new(make_inversion(1, PI / 6.0, PI).unwrap());
        for i in 0..200 {
            let tau = -3.0 + 0.41 * i as f64;
            assert!((ev.f_eval(ev.f_inverse_eval(tau)) - tau).abs() < 1e-10);
        }
    }

    #[test]
    fn trajectory_examples() {
        let ev = lf();
        let m = ev.model();
        assert_eq!(ev.trajectory(0.0), m.length);
        let t = PI / 2.0 / m.omega;
        assert!((ev.trajectory(t) - (9.0 * PI / 4.0 - PI / 8.0)).abs() < 1e-14);
        assert_eq!(ev.wall_velocity(0.0).unwrap(), 0.0);
    }

    #[test]
    fn parametric_matches_closed_form() {
        for m in [
            make_linear_finite(2, PI / 4.0, PI).unwrap(),
            make_linear_odd(2, 0.3, PI).unwrap(),
            make_inversion(1, -PI / 6.0, PI).unwrap(),
            make_homographic(1, 1.0, 2.0, PI).unwrap(),
        ] {
            let ev = MooreEvaluator::new(m);
            for i in 0..200 {
                let t = 0.113 * i as f64;
                let err = (ev.trajectory_parametric(t).unwrap() - ev.trajectory(t)).abs();
                assert!(err < 1e-10, "{:?} t={t} err={err}", ev.model().family);
            }
        }
    }

    #[test]
    fn homographic_trajectory_identity() {
        let ev = MooreEvaluator::new(make_homographic(1, 1.0, 2.0, PI).unwrap());
        let m = ev.model();
        let s = (m.omega * m.length + m.theta).sin();
        for i in 0..100 {
            let t = m.period * i as f64 / 100.0;
            let lhs = (m.omega * ev.trajectory(t) + m.theta).sin();
            assert!((lhs - s * (m.omega * t).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn corrupted_map_breaks_continuity() {
        let m = make_linear_finite(2, PI / 4.0, PI).unwrap().with_map_offset(1e-3).unwrap();
        let ev = MooreEvaluator::new(m);
        let worst = (0..2000).map(|i| ev.moore_residual(0.05 * i as f64).abs()).fold(0.0, f64::max);
        assert!(worst > 1e-6);
    }
}

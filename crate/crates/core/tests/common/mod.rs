//! Reference implementations for the integration tests. Everything here is built
//! from the wall trajectory formulas alone: no fundamental maps, no library solvers.
#![allow(dead_code)]

pub mod props;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub enum Motion {
    LinearFinite { m: u32, theta: f64 },
    LinearOdd { m: u32, theta: f64 },
    Inversion { m: u32, theta: f64 },
    Homographic { m: u32, v0: f64, v1: f64 },
}

/// A moving wall given only by its trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Wall {
    pub motion: Motion,
    pub period: f64,
    pub omega: f64,
    pub length: f64,
}

impl Wall {
    pub fn new(motion: Motion, period: f64) -> Self {
        let length = match motion {
            Motion::LinearFinite { m, theta } | Motion::Inversion { m, theta } => (m as f64 + theta / PI) * period,
            Motion::LinearOdd { m, .. } => (m as f64 - 0.5) * period,
            Motion::Homographic { m, v0, .. } => (m as f64 + v0.atan() / PI) * period,
        };
        Self { motion, period, omega: 2.0 * PI / period, length }
    }

    pub fn position(&self, t: f64) -> f64 {
        if t <= 0.0 {
            self.length
        } else {
            self.formula(t)
        }
    }

    /// The closed-form trajectory, continued to `t < 0` as an even function.
    fn formula(&self, t: f64) -> f64 {
        let (w, l) = (self.omega, self.length);
        let c = (w * t).cos();
        match self.motion {
            Motion::LinearFinite { theta, .. } | Motion::LinearOdd { theta, .. } => {
                l + (theta.sin() * c).asin() / w - theta / w
            }
            Motion::Inversion { theta, .. } => {
                l - 2.0 * theta / w + theta.signum() / w * (PI / 2.0 - ((2.0 * theta).cos() * c).asin())
            }
            Motion::Homographic { v0, v1, .. } => {
                let theta = ((1.0 + v0 * v0) / (2.0 * v1) - v0).atan();
                let s = (w * l + theta).sin();
                l + ((s * c).asin() - s.asin()) / w
            }
        }
    }

    /// Fourth-order central difference of the closed form (right derivative at `t = 0`).
    pub fn velocity(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let h = 1e-4 * self.period;
        let x = |k: f64| self.formula(t + k * h);
        (x(-2.0) - 8.0 * x(-1.0) + 8.0 * x(1.0) - x(2.0)) / (12.0 * h)
    }

    /// Speed bound predicted by the family's amplitude formula.
    pub fn speed_bound(&self) -> f64 {
        match self.motion {
            Motion::LinearFinite { theta, .. } | Motion::LinearOdd { theta, .. } => theta.sin().abs(),
            Motion::Inversion { theta, .. } => (2.0 * theta).cos().abs(),
            Motion::Homographic { v0, v1, .. } => {
                let theta = ((1.0 + v0 * v0) / (2.0 * v1) - v0).atan();
                (self.omega * self.length + theta).sin().abs()
            }
        }
    }

    /// Solves `t + L(t) = τ` by bisection refined with secant steps.
    fn foot(&self, tau: f64) -> f64 {
        // |L(t) − L| never exceeds one period for these families.
        let (mut lo, mut hi) = (tau - self.length - self.period, tau - self.length + self.period);
        let g = |t: f64| t + self.position(t) - tau;
        let (mut glo, mut ghi) = (g(lo), g(hi));
        assert!(glo <= 0.0 && ghi >= 0.0, "bracket lost at tau = {tau}");
        for _ in 0..200 {
            if hi - lo <= 1e-15 * tau.abs().max(1.0) {
                break;
            }
            let secant = lo - glo * (hi - lo) / (ghi - glo);
            let mid = 0.5 * (lo + hi);
            let x = if secant > lo && secant < hi && (secant - mid).abs() < 0.25 * (hi - lo) { secant } else { mid };
            let gx = g(x);
            if gx == 0.0 {
                return x;
            }
            if gx < 0.0 {
                lo = x;
                glo = gx;
            } else {
                hi = x;
                ghi = gx;
            }
            // Keep both ends shrinking.
            let m = 0.5 * (lo + hi);
            let gm = g(m);
            if gm < 0.0 {
                lo = m;
                glo = gm;
            } else {
                hi = m;
                ghi = gm;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn f(&self, tau: f64) -> f64 {
        if tau < self.length {
            return tau - 2.0 * self.length;
        }
        let t = self.foot(tau);
        t - self.position(t)
    }

    pub fn f_prime(&self, tau: f64) -> f64 {
        if tau < self.length {
            return 1.0;
        }
        let v = self.velocity(self.foot(tau));
        (1.0 - v) / (1.0 + v)
    }

    pub fn moore(&self, tau: f64) -> f64 {
        let mut x = tau;
        let mut n = 0;
        while x >= self.length {
            x = self.f(x);
            n += 1;
        }
        x - 2.0 * self.length + 2.0 * self.length * n as f64
    }

    pub fn moore_prime(&self, tau: f64) -> f64 {
        let mut x = tau;
        let mut d = 1.0;
        while x >= self.length {
            d *= self.f_prime(x);
            x = self.f(x);
        }
        d
    }

    /// Density profile: −ω²/48π + (ω² − ω₁²)/48π · R′², valid for
    /// solutions whose Moore function is a Möbius image of tan(ωτ/2).
    pub fn profile(&self, tau: f64) -> f64 {
        let w1 = PI / self.length;
        let w = self.omega;
        let r = self.moore_prime(tau);
        -w * w / (48.0 * PI) + (w * w - w1 * w1) / (48.0 * PI) * r * r
    }

    /// Total energy at time `t` by composite 8-point Gauss–Legendre on `panels` panels.
    pub fn energy(&self, t: f64, panels: usize) -> f64 {
        const X: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
        const W: [f64; 4] = [0.3626837833783620, 0.3137066278683688, 0.2223810344533745, 0.1012285362903763];
        let lt = self.position(t);
        let (a, b) = (t - lt, t + lt);
        let h = (b - a) / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for k in 0..4 {
                let dx = 0.5 * h * X[k];
                sum += W[k] * (self.profile(c - dx) + self.profile(c + dx));
            }
        }
        0.5 * h * sum
    }
}

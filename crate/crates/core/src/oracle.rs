//! Trajectory-only Moore solver and the verification harness.
//!
//! Nothing here looks at the fundamental map: `f` is recovered from the wall
//! trajectory alone by solving `t + L(t) = τ`, which makes this an independent
//! check on the closed forms.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{validate, CavityModel, Family, ModelSpec};
use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::moore::MooreEvaluator;
use crate::observables::{plateau_values, total_energy_closed, total_energy_piecewise, total_energy_quadrature};
use crate::roots::solve_bracketed;
use crate::stability::{classify_model, fitted_growth_rate, Verdict};

/// Upper bound on downward iterations in [`moore_from_trajectory`].
pub const ITERATION_CAP: usize = 1_000_000;

#[derive(Clone)]
enum Source {
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Sampled(Arc<Pchip>),
}

/// Wall trajectory `L(t)`, periodic for `t ≥ 0` and equal to `L` before the motion starts.
#[derive(Clone)]
pub struct TrajectoryHandle {
    source: Source,
    pub period: f64,
    /// Static length `L = L(0)`.
    pub length: f64,
    pub vmax: f64,
    lmin: f64,
    lmax: f64,
}

impl fmt::Debug for TrajectoryHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrajectoryHandle")
            .field("period", &self.period)
            .field("length", &self.length)
            .field("vmax", &self.vmax)
            .field("range", &(self.lmin, self.lmax))
            .finish()
    }
}

/// Number of samples per period used to scan a trajectory.
const SCAN: usize = 10_000;

impl TrajectoryHandle {
    fn finish(source: Source, period: f64) -> Result<Self> {
        let mut h = Self { source, period, length: 0.0, vmax: 0.0, lmin: 0.0, lmax: 0.0 };
        h.length = h.raw(0.0);
        let dt = period / SCAN as f64;
        let (mut lo, mut hi, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for i in 0..=SCAN {
            let t = i as f64 * dt;
            let l = h.raw(t);
            lo = lo.min(l);
            hi = hi.max(l);
            let v = (h.raw(t + dt) - h.raw((t - dt).max(0.0))) / if t >= dt { 2.0 * dt } else { dt };
            vmax = vmax.max(v.abs());
        }
        if !(lo > 0.0) {
            return Err(Error::InvalidInput(format!("trajectory collapses: min L = {lo}")));
        }
        if vmax >= 1.0 {
            return Err(Error::LuminalWall);
        }
        h.vmax = vmax;
        // Pad by the largest possible excursion between scan points.
        h.lmin = lo - vmax * dt;
        h.lmax = hi + vmax * dt;
        Ok(h)
    }

    /// Wraps a callable; `l(t)` is only queried for `t ≥ 0`.
    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(l: F, period: f64) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::ParameterOutOfRange { name: "T", value: period });
        }
        Self::finish(Source::Function(Arc::new(l)), period)
    }

    /// The model's closed-form trajectory.
    pub fn from_model(model: &CavityModel) -> Result<Self> {
        let ev = MooreEvaluator::new(model.clone());
        Self::from_fn(move |t| ev.trajectory(t), model.period)
    }

    /// Samples `(t, L)` interpolated by a monotone cubic and extended periodically
    /// past the last sample. The samples must start at `t = 0` and span at least one period.
    pub fn from_samples(t: Vec<f64>, l: Vec<f64>, period: f64) -> Result<Self> {
        if t.first().copied() != Some(0.0) {
            return Err(Error::InvalidInput("trajectory samples must start at t = 0".into()));
        }
        let p = Pchip::new(t, l)?;
        if p.x_max() < period * (1.0 - 1e-9) {
            return Err(Error::InvalidInput("trajectory samples must cover one period".into()));
        }
        Self::finish(Source::Sampled(Arc::new(p)), period)
    }

    /// Reads comma-separated `t, L` rows; `#` lines and a non-numeric header are skipped.
    pub fn from_csv<R: Read>(reader: R, period: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let (mut ts, mut ls) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidInput(format!("trajectory CSV: {e}")))?;
            let parse = |k: usize| rec.get(k).and_then(|s| s.parse::<f64>().ok());
            match (parse(0), parse(1)) {
                (Some(t), Some(l)) => {
                    ts.push(t);
                    ls.push(l);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::InvalidInput(format!("trajectory CSV: bad row {}", i + 1))),
            }
        }
        Self::from_samples(ts, ls, period)
    }

    fn raw(&self, t: f64) -> f64 {
        match &self.source {
            Source::Function(f) => f(t),
            Source::Sampled(p) => {
                let span = p.x_max();
                let t = if t > span {
                    let k = ((t - span) / self.period).ceil();
                    t - k * self.period
                } else {
                    t
                };
                p.eval(t)
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            self.length
        } else {
            self.raw(t)
        }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lmin, self.lmax)
    }
}

/// `f(τ)` from the trajectory alone: solve `t + L(t) = τ`, return `t − L(t)`.
pub fn f_from_trajectory(traj: &TrajectoryHandle, tau: f64, tol: f64) -> Result<f64> {
    let l = traj.length;
    if tau < l {
        return Ok(tau - 2.0 * l);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let (lmin, lmax) = traj.range();
    let t = solve_bracketed(|t| t + traj.eval(t) - tau, tau - lmax - tol, tau - lmin + tol, 0.25 * tol, 10_000)?;
    Ok(t - traj.eval(t))
}

/// Moore's function from the trajectory alone, by iterating [`f_from_trajectory`].
pub fn moore_from_trajectory(traj: &TrajectoryHandle, tau: f64, tol: f64) -> Result<f64> {
    let l = traj.length;
    let mut x = tau;
    let mut n = 0usize;
    while x >= l {
        if n >= ITERATION_CAP {
            return Err(Error::IterationCap(ITERATION_CAP));
        }
        x = f_from_trajectory(traj, x, tol)?;
        n += 1;
    }
    Ok(x - 2.0 * l + 2.0 * l * n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub model: ModelSpec,
    pub seed: u64,
    pub t_max: f64,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn entry(name: &'static str, value: f64, threshold: f64, samples: usize) -> CheckEntry {
    CheckEntry { name, value, threshold, samples, passed: value <= threshold }
}

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Runs every cross-check applicable to `model` on `samples` random times in `[0, t_max]`.
pub fn verify_model(model: &CavityModel, t_max: f64, samples: usize) -> VerificationReport {
    verify_model_seeded(model, t_max, samples, DEFAULT_SEED)
}

pub fn verify_model_seeded(model: &CavityModel, t_max: f64, samples: usize, seed: u64) -> VerificationReport {
    let samples = samples.max(2);
    let ev = MooreEvaluator::new(model.clone());
    let (l, period) = (model.length, model.period);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts: Vec<f64> = (0..samples).map(|_| rng.gen_range(0.0..=t_max)).collect();
    let mut checks = Vec::new();

    let residual = ts.iter().map(|&t| ev.moore_residual(t).abs()).fold(0.0, f64::max);
    checks.push(entry("moore_residual", residual, 1e-9 * l, samples));

    match TrajectoryHandle::from_model(model) {
        Ok(traj) => {
            let tol = 1e-10 * period;
            let mut worst = 0.0f64;
            let mut f_worst = 0.0f64;
            for &t in &ts {
                let lt = ev.trajectory(t);
                for tau in [t + lt, t - lt] {
                    match moore_from_trajectory(&traj, tau, tol) {
                        Ok(r) => worst = worst.max((r - ev.moore_eval(tau)).abs()),
                        Err(_) => worst = f64::INFINITY,
                    }
                }
                if let Ok(f) = f_from_trajectory(&traj, t + lt, tol) {
                    f_worst = f_worst.max((f - ev.f_eval(t + lt)).abs());
                } else {
                    f_worst = f64::INFINITY;
                }
            }
            checks.push(entry("f_equation", f_worst, 1e-8 * l, samples));
            checks.push(entry("oracle_equivalence", worst, 1e-7 * l, 2 * samples));
        }
        Err(_) => checks.push(entry("oracle_equivalence", f64::INFINITY, 1e-7 * l, 0)),
    }

    let k = samples.min(500);
    let recon = ts[..k]
        .iter()
        .map(|&t| ev.trajectory_parametric(t).map(|x| (x - ev.trajectory(t)).abs()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    checks.push(entry("trajectory_reconstruction", recon, 1e-9 * l, k));

    let validation = validate(model, 2000);
    let sewing_map = validation.check("initial_conditions").map(|c| if c.passed { 0.0 } else { c.worst }).unwrap_or(0.0);
    let sewing_wall = (ev.trajectory(0.0) - l).abs().max(ev.wall_velocity(0.0).map(f64::abs).unwrap_or(f64::INFINITY));
    checks.push(entry("sewing", sewing_map.max(sewing_wall / l.max(1.0)), 1e-9, 1));
    checks.push(entry(
        "admissibility",
        validation.violations().count() as f64,
        0.0,
        validation.checks.len(),
    ));

    let grid = 20_000usize;
    let vpeak = (0..=grid)
        .map(|i| ev.wall_velocity(period * i as f64 / grid as f64).map(f64::abs).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    checks.push(entry("velocity_bound", (vpeak - model.vmax).abs(), 1e-6, grid + 1));

    let energy_pts = samples.min(50);
    let mut dev = 0.0f64;
    for &t in &ts[..energy_pts] {
        let reference = if model.family == Family::LinearOdd {
            total_energy_closed(&ev, t).unwrap_or(f64::NAN)
        } else {
            total_energy_piecewise(&ev, t)
        };
        let d = match total_energy_quadrature(&ev, t, 1e-10) {
            Ok(q) => ((q - reference) / q.abs().max(f64::MIN_POSITIVE)).abs(),
            Err(_) => f64::INFINITY,
        };
        dev = dev.max(if d.is_nan() { f64::INFINITY } else { d });
    }
    checks.push(entry("energy_cross_method", dev, 1e-6, energy_pts));

    if model.family == Family::LinearFinite {
        let t = 40.0 * period;
        let target = -(model.omega * l / PI).powi(2);
        let vals = plateau_values(&ev, t, 4000, PI / 4.0);
        let worst = vals.iter().map(|v| (v / target - 1.0).abs()).fold(if vals.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
        checks.push(entry("sub_casimir_plateau", worst, 0.01, vals.len()));
    }

    let report = classify_model(model);
    if report.verdict == Verdict::Exponential {
        let rate = report.growth_rate.unwrap_or(f64::NAN);
        let fitted = fitted_growth_rate(&ev, 30.0 * period, 80.0 * period, 400);
        let dev = ((fitted - rate) / rate).abs();
        checks.push(entry("growth_rate", if dev.is_nan() { f64::INFINITY } else { dev }, 0.05, 400));
    }

    VerificationReport {
        model: model.spec(),
        seed,
        t_max,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

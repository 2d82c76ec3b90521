//! The four exact solution families and their admissibility checks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{Homography, SCHWARZIAN_STEP};
use crate::moore::MooreEvaluator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `Δ₁(v) = v − 2v₀`, frequency tied to the amplitude.
    LinearFinite,
    /// Linear map at odd resonances (`v₀ = ∞`), free amplitude.
    LinearOdd,
    /// `Δ₁(v) = −v₀²/v`, bounded energy.
    Inversion,
    /// General single-pole map; stable, power-like or exponentially unstable.
    Homographic,
    /// A cavity at rest.
    Static,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::LinearFinite => "linear-finite",
            Family::LinearOdd => "linear-odd",
            Family::Inversion => "inversion",
            Family::Homographic => "homographic",
            Family::Static => "static",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear-finite" => Ok(Family::LinearFinite),
            "linear-odd" => Ok(Family::LinearOdd),
            "inversion" => Ok(Family::Inversion),
            "homographic" => Ok(Family::Homographic),
            "static" => Ok(Family::Static),
            other => Err(Error::InvalidInput(format!("unknown family '{other}'"))),
        }
    }
}

/// A validated exact solution: one wall trajectory together with its fundamental map.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityModel {
    pub family: Family,
    /// Static cavity length `L`.
    pub length: f64,
    /// Period `T` of the wall motion.
    pub period: f64,
    /// `ω = 2π/T`.
    pub omega: f64,
    /// Resonance order.
    pub m: u32,
    /// Family-specific angle parameter, stored as given.
    pub theta: f64,
    /// `tan(ωL/2)`; `None` for the odd-resonance family, where it is infinite.
    pub v0: Option<f64>,
    pub v1: Option<f64>,
    /// Bound on the wall speed.
    pub vmax: f64,
    pub delta1: Homography,
    /// Set when the parameters collapse the motion to a cavity at rest.
    pub degenerate_static: bool,
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::ParameterOutOfRange { name: "M", value: 0.0 });
    }
    Ok(())
}

fn check_period(period: f64) -> Result<()> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::ParameterOutOfRange { name: "T", value: period });
    }
    Ok(())
}

fn check_angle(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() >= PI / 2.0 {
        return Err(Error::ParameterOutOfRange { name: "theta", value: theta });
    }
    Ok(())
}

impl CavityModel {
    fn base(family: Family, length: f64, period: f64, m: u32, theta: f64, delta1: Homography) -> Self {
        Self {
            family,
            length,
            period,
            omega: 2.0 * PI / period,
            m,
            theta,
            v0: None,
            v1: None,
            vmax: 0.0,
            delta1,
            degenerate_static: false,
        }
    }

    /// Fundamental frequency `ω₁ = π/L` of the cavity at rest.
    pub fn omega1(&self) -> f64 {
        PI / self.length
    }

    /// Magnitude `π/(24L²)` of the static Casimir energy density.
    pub fn rho0(&self) -> f64 {
        PI / (24.0 * self.length * self.length)
    }

    /// Peak-to-peak excursion `ΔL = (2/ω)·arcsin(vmax)` of the wall.
    pub fn amplitude(&self) -> f64 {
        2.0 * self.vmax.asin() / self.omega
    }

    pub fn omega_ratio(&self) -> f64 {
        self.omega / self.omega1()
    }

    /// Half-angle `ωL/2` at which the motion starts.
    pub fn start_phase(&self) -> f64 {
        self.omega * self.length / 2.0
    }

    /// Copy of this model whose fundamental map is shifted by `offset`
    /// (`Δ₁ ↦ Δ₁ + offset`) while the claimed trajectory is kept. Used to check
    /// that the verification harness catches corrupted maps.
    pub fn with_map_offset(&self, offset: f64) -> Result<Self> {
        let h = self.delta1;
        let delta1 = Homography::new(h.a + offset * h.c, h.b + offset * h.d, h.c, h.d)?;
        Ok(Self { delta1, ..self.clone() })
    }

    /// Copy of this model that advertises a different speed bound.
    pub fn with_vmax(&self, vmax: f64) -> Self {
        Self { vmax, ..self.clone() }
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            family: self.family,
            m: self.m,
            theta: match self.family {
                Family::Homographic | Family::Static => None,
                _ => Some(self.theta),
            },
            v0: if self.family == Family::Homographic { self.v0 } else { None },
            v1: self.v1,
            period: self.period,
            length: if self.family == Family::Static { Some(self.length) } else { None },
        }
    }
}

/// A cavity at rest of length `length`.
pub fn make_static(length: f64, period: f64) -> Result<CavityModel> {
    check_period(period)?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::ParameterOutOfRange { name: "L", value: length });
    }
    // Rotation of the phase by −ωL: v ↦ tan(arctan v − ωL), so that f(τ) = τ − 2L.
    let (s, c) = (2.0 * PI * length / period).sin_cos();
    let delta1 = Homography::new(c, -s, s, c)?;
    let mut m = CavityModel::base(Family::Static, length, period, 0, 0.0, delta1);
    m.v0 = Some(m.start_phase().tan());
    m.degenerate_static = true;
    Ok(m)
}

pub fn make_linear_finite(m: u32, theta: f64, period: f64) -> Result<CavityModel> {
    check_m(m)?;
    check_period(period)?;
    check_angle(theta)?;
    if theta == 0.0 {
        return Err(Error::StaticCavity);
    }
    let v0 = theta.tan();
    let length = (m as f64 + theta / PI) * period;
    let mut model = CavityModel::base(
        Family::LinearFinite,
        length,
        period,
        m,
        theta,
        Homography::translation(-2.0 * v0),
    );
    model.v0 = Some(v0);
    model.vmax = theta.sin().abs();
    Ok(model)
}

/// Odd-resonance linear family. The map is `v ↦ v + 2 tan θ`, the orientation for
/// which the wall follows `L + (arcsin(sin θ cos ωt) − θ)/ω` like the finite family.
pub fn make_linear_odd(m: u32, theta: f64, period: f64) -> Result<CavityModel> {
    check_m(m)?;
    check_period(period)?;
    check_angle(theta)?;
    if theta == 0.0 {
        return Err(Error::StaticCavity);
    }
    let length = (m as f64 - 0.5) * period;
    let mut model = CavityModel::base(
        Family::LinearOdd,
        length,
        period,
        m,
        theta,
        Homography::translation(2.0 * theta.tan()),
    );
    model.vmax = theta.sin().abs();
    Ok(model)
}

pub fn make_inversion(m: u32, theta: f64, period: f64) -> Result<CavityModel> {
    check_period(period)?;
    check_angle(theta)?;
    if theta == 0.0 {
        return Err(Error::DegenerateInversion);
    }
    if m == 0 && theta < 0.0 {
        return Err(Error::ParameterOutOfRange { name: "theta", value: theta });
    }
    let v0 = theta.tan();
    let length = (m as f64 + theta / PI) * period;
    let delta1 = Homography::new(0.0, -v0 * v0, 1.0, 0.0)?;
    let mut model = CavityModel::base(Family::Inversion, length, period, m, theta, delta1);
    model.v0 = Some(v0);
    model.v1 = Some(0.0);
    model.vmax = (2.0 * theta).cos().abs();
    model.degenerate_static = model.vmax < 1e-12;
    Ok(model)
}

/// Single-pole family `Δ₁(v) = −(v₁v + v₀(v₀ − 2v₁))/(v₁ − v)` in matrix form
/// `[[−v₁, −v₀(v₀−2v₁)], [1, −v₁]]`. `v₁ = 0` yields the inversion family.
pub fn make_homographic(m: u32, v0: f64, v1: f64, period: f64) -> Result<CavityModel> {
    check_m(m)?;
    check_period(period)?;
    if !v0.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "v0", value: v0 });
    }
    if !v1.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "v1", value: v1 });
    }
    if v0 == v1 {
        return Err(Error::NoPhysicalSolution);
    }
    if v1 == 0.0 {
        return make_inversion(m, v0.atan(), period);
    }
    let delta1 = Homography::new(-v1, -v0 * (v0 - 2.0 * v1), 1.0, -v1)?;
    let theta = ((1.0 + v0 * v0) / (2.0 * v1) - v0).atan();
    let length = (m as f64 + v0.atan() / PI) * period;
    let mut model = CavityModel::base(Family::Homographic, length, period, m, theta, delta1);
    let vmax = (model.omega * length + theta).sin().abs();
    if vmax >= 1.0 - 1e-15 {
        return Err(Error::LuminalWall);
    }
    model.v0 = Some(v0);
    model.v1 = Some(v1);
    model.vmax = vmax;
    model.degenerate_static = vmax < 1e-12;
    Ok(model)
}

/// Serializable model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    #[serde(rename = "M", default)]
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<f64>,
    #[serde(rename = "T", default = "default_period")]
    pub period: f64,
    /// Only used by the static cavity.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

fn default_period() -> f64 {
    PI
}

impl ModelSpec {
    pub fn build(&self) -> Result<CavityModel> {
        let need = |x: Option<f64>, name: &str| {
            x.ok_or_else(|| Error::InvalidInput(format!("{} requires '{name}'", self.family)))
        };
        match self.family {
            Family::LinearFinite => make_linear_finite(self.m, need(self.theta, "theta")?, self.period),
            Family::LinearOdd => make_linear_odd(self.m, need(self.theta, "theta")?, self.period),
            Family::Inversion => make_inversion(self.m, need(self.theta, "theta")?, self.period),
            Family::Homographic => {
                make_homographic(self.m, need(self.v0, "v0")?, need(self.v1, "v1")?, self.period)
            }
            Family::Static => make_static(need(self.length, "L")?, self.period),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("model JSON: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation (or, for the derivative bound, the smallest slack).
    pub worst: f64,
    /// Where the worst case occurred, if meaningful.
    pub location: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub admissible: bool,
    pub fdot_min: f64,
    pub fdot_max: f64,
    pub fdot_lower_bound: f64,
    pub fdot_upper_bound: f64,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn violations(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn worst_of<I: Iterator<Item = (f64, f64)>>(it: I) -> (f64, Option<f64>) {
    it.fold((0.0, None), |(w, at), (err, x)| if err > w { (err, Some(x)) } else { (w, at) })
}

/// Checks the fundamental map in the chart around `v₀` (or around `∞` for the
/// odd-resonance family, via conjugation with `v ↦ −1/v`).
fn initial_condition_errors(model: &CavityModel) -> Option<(f64, f64, f64)> {
    let (h, v0) = match (model.family, model.v0) {
        (Family::Static, _) => return None,
        (Family::LinearOdd, _) => {
            let j = Homography::new(0.0, -1.0, 1.0, 0.0).expect("rotation is invertible");
            (j.inverse().compose(&model.delta1).compose(&j), 0.0)
        }
        (_, Some(v0)) => (model.delta1, v0),
        (_, None) => return None,
    };
    let value = (h.apply(v0) + v0).abs();
    let slope = h.derivative_at(v0).map(|d| (d - 1.0).abs()).unwrap_or(f64::INFINITY);
    let schw = h.schwarzian_numeric(v0, SCHWARZIAN_STEP).map(f64::abs).unwrap_or(f64::INFINITY);
    Some((value, slope, schw))
}

/// Samples the admissibility conditions on `samples` points per period.
pub fn validate(model: &CavityModel, samples: usize) -> ValidationReport {
    let samples = samples.max(2);
    let ev = MooreEvaluator::new(model.clone());
    let (l, t) = (model.length, model.period);
    let scale = l.max(t);
    let mut checks = Vec::new();

    let grid = |lo: f64, hi: f64| (0..samples).map(move |i| lo + (hi - lo) * i as f64 / samples as f64);

    let (w, at) = worst_of(grid(-3.0 * l, l).map(|tau| ((ev.f_eval(tau) - (tau - 2.0 * l)).abs(), tau)));
    checks.push(CheckResult {
        name: "static_branch",
        passed: w <= 1e-12 * scale,
        worst: w,
        location: at,
        detail: "f(τ) = τ − 2L below L".into(),
    });

    let lower = (1.0 - model.vmax) / (1.0 + model.vmax);
    let upper = (1.0 + model.vmax) / (1.0 - model.vmax);
    let mut fmin = f64::INFINITY;
    let mut fmax = f64::NEG_INFINITY;
    let (mut at_min, mut at_max) = (l, l);
    for tau in grid(l, l + t) {
        let d = ev.f_derivative(tau);
        if d < fmin {
            fmin = d;
            at_min = tau;
        }
        if d > fmax {
            fmax = d;
            at_max = tau;
        }
    }
    let slack = (fmin - lower).min(upper - fmax);
    let tol = 1e-9 * upper;
    checks.push(CheckResult {
        name: "derivative_bounds",
        passed: slack >= -tol,
        worst: slack,
        location: Some(if fmin - lower < upper - fmax { at_min } else { at_max }),
        detail: format!("{lower} ≤ f′ ≤ {upper}; observed [{fmin}, {fmax}]"),
    });

    let (w, at) = worst_of(grid(-l, l + 3.0 * t).map(|tau| ((ev.f_eval(tau) - tau).max(0.0), tau)));
    checks.push(CheckResult {
        name: "retarded",
        passed: grid(-l, l + 3.0 * t).all(|tau| ev.f_eval(tau) < tau),
        worst: w,
        location: at,
        detail: "f(τ) < τ".into(),
    });

    let (w, at) = worst_of(
        grid(l, l + 3.0 * t).map(|tau| ((ev.f_eval(tau + t) - ev.f_eval(tau) - t).abs(), tau)),
    );
    checks.push(CheckResult {
        name: "periodicity",
        passed: w <= 1e-10 * scale,
        worst: w,
        location: at,
        detail: "f(τ + T) = f(τ) + T".into(),
    });

    let jump = (ev.f_eval(l) + l).abs();
    checks.push(CheckResult {
        name: "continuity",
        passed: jump <= 1e-9 * l,
        worst: jump,
        location: Some(l),
        detail: "f continuous where the motion starts".into(),
    });

    if let Some((value, slope, schw)) = initial_condition_errors(model) {
        let w = value.max(slope);
        checks.push(CheckResult {
            name: "initial_conditions",
            passed: w <= 1e-12 * (1.0 + model.v0.unwrap_or(0.0).abs()) && schw < 1e-6,
            worst: w.max(schw),
            location: Some(0.0),
            detail: format!("|Δ₁(v₀)+v₀| = {value:e}, |Δ₁′(v₀)−1| = {slope:e}, |S| = {schw:e}"),
        });
    }

    ValidationReport {
        admissible: checks.iter().all(|c| c.passed),
        fdot_min: fmin,
        fdot_max: fmax,
        fdot_lower_bound: lower,
        fdot_upper_bound: upper,
        checks,
    }
}

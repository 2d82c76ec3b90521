//! Real Möbius maps `v ↦ (av+b)/(cv+d)` and the angular lift used by the cavity solver.
//!
//! A homography acts on the projective line. Writing `v = tan φ` as the unit
//! vector `e(φ) = (sin φ, cos φ)`, the action becomes a linear map on `e(φ)` and
//! the image angle `ψ` is recovered as `atan2(x, y)` of `H·e(φ)`. Working with
//! angles instead of `tan` removes every pole from the arithmetic.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance separating parabolic maps from the other two classes.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Default node spacing for [`schwarzian_at`].
pub const SCHWARZIAN_STEP: f64 = 1e-3;

/// A real, invertible Möbius map stored as the matrix `[[a, b], [c, d]]`.
///
/// The determinant is carried alongside the coefficients so that it stays exact
/// through long chains of compositions, where recomputing `ad − bc` from
/// normalized coefficients would lose every significant digit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    det: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Eigenvalue classification of a homography.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapClass {
    pub kind: MapKind,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub discriminant: f64,
}

impl MapClass {
    /// `|λ₁/λ₂|` ordered so the result is ≥ 1.
    pub fn eigen_ratio(&self) -> f64 {
        let (p, q) = (self.lambda1.norm(), self.lambda2.norm());
        if p >= q {
            p / q
        } else {
            q / p
        }
    }
}

impl Homography {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("non-finite homography coefficient".into()));
        }
        let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if det == 0.0 || det.abs() <= 1e-300 * scale * scale {
            return Err(Error::SingularMap);
        }
        Ok(Self { a, b, c, d, det })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0, det: 1.0 }
    }

    /// `v ↦ v + shift`.
    pub fn translation(shift: f64) -> Self {
        Self { a: 1.0, b: shift, c: 0.0, d: 1.0, det: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Squared Frobenius norm `Tr(HᵀH)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// Scale-free conditioning `Tr(HᵀH)/|det|`; equals 2 for rotations and grows
    /// like `σ_max/σ_min` for strongly hyperbolic maps.
    pub fn conditioning(&self) -> f64 {
        self.frobenius_sq() / self.det.abs()
    }

    fn normalized(a: f64, b: f64, c: f64, d: f64, det: f64) -> Self {
        let k = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        Self { a: a / k, b: b / k, c: c / k, d: d / k, det: det / (k * k) }
    }

    /// Extended-real action. At the pole the result is the limit from the right;
    /// at `±∞` it is `a/c` (or a signed infinity when `c = 0`).
    pub fn apply(&self, v: f64) -> f64 {
        if v.is_infinite() {
            if self.c == 0.0 {
                return v.signum() * (self.a / self.d).signum() * f64::INFINITY;
            }
            return self.a / self.c;
        }
        let num = self.a * v + self.b;
        let den = self.c * v + self.d;
        if den == 0.0 {
            let s = if num == 0.0 { 1.0 } else { (num * self.c).signum() };
            return s * f64::INFINITY;
        }
        num / den
    }

    pub fn derivative_at(&self, v: f64) -> Result<f64> {
        if v.is_infinite() {
            return Ok(if self.c == 0.0 { self.det / (self.d * self.d) } else { 0.0 });
        }
        let den = self.c * v + self.d;
        if den == 0.0 {
            return Err(Error::DerivativeAtPole);
        }
        Ok(self.det / (den * den))
    }

    /// `self ∘ other`, renormalized so the largest coefficient has magnitude one.
    pub fn compose(&self, other: &Homography) -> Homography {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (e, f, g, h) = (other.a, other.b, other.c, other.d);
        Self::normalized(
            a * e + b * g,
            a * f + b * h,
            c * e + d * g,
            c * f + d * h,
            self.det * other.det,
        )
    }

    pub fn inverse(&self) -> Homography {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a, det: self.det }
    }

    /// n-fold composition through the Cayley–Hamilton recurrence.
    ///
    /// With `A = H/√|det|` and `D = sign det`, `Aⁿ = pₙA − D·pₙ₋₁I` where the
    /// scalar sequence `pₙ` has a closed form in each eigenvalue regime.
    pub fn power(&self, n: u32) -> Homography {
        match n {
            0 => return Self::identity(),
            1 => return Self::normalized(self.a, self.b, self.c, self.d, self.det),
            _ => {}
        }
        let s = self.det.abs().sqrt();
        let dsign = self.det.signum();
        let (a, b, c, d) = (self.a / s, self.b / s, self.c / s, self.d / s);
        let t = a + d;
        let disc = t * t - 4.0 * dsign;
        let eps = DEGENERACY_TOL * (t * t + 1.0);
        let nf = n as f64;
        let det_n = if n % 2 == 0 { 1.0 } else { dsign };
        if disc > eps {
            // Real eigenvalues: factor out μ₁ⁿ⁻² so nothing overflows.
            let sq = disc.sqrt();
            let mu1 = if t >= 0.0 { (t + sq) / 2.0 } else { (t - sq) / 2.0 };
            let mu2 = dsign / mu1;
            let r = mu2 / mu1;
            let q = |k: u32| -> f64 {
                if r == 1.0 {
                    k as f64
                } else {
                    (1.0 - r.powi(k as i32)) / (1.0 - r)
                }
            };
            let x = mu1 * q(n);
            let y = -dsign * q(n - 1);
            let log_scale = -2.0 * (nf - 2.0) * mu1.abs().ln();
            Self::scaled_combo(a, b, c, d, x, y, det_n, log_scale)
        } else if disc < -eps {
            let theta = (t / 2.0).clamp(-1.0, 1.0).acos();
            let st = theta.sin();
            let x = (nf * theta).sin() / st;
            let y = -((nf - 1.0) * theta).sin() / st;
            Self::scaled_combo(a, b, c, d, x, y, det_n, 0.0)
        } else {
            let mu = t / 2.0;
            let x = nf;
            let y = -(nf - 1.0) * mu;
            // For an exactly parabolic map the factored det is μ^{−2(n−1)} = 1.
            let log_scale = -2.0 * (nf - 1.0) * mu.abs().ln();
            Self::scaled_combo(a, b, c, d, x, y, det_n, log_scale)
        }
    }

    /// Builds `(x·A + y·I)/k` with determinant `det_sign·exp(log_scale)/k²`.
    #[allow(clippy::too_many_arguments)]
    fn scaled_combo(a: f64, b: f64, c: f64, d: f64, x: f64, y: f64, det_sign: f64, log_scale: f64) -> Self {
        let (na, nb, nc, nd) = (x * a + y, x * b, x * c, x * d + y);
        let k = na.abs().max(nb.abs()).max(nc.abs()).max(nd.abs());
        let det = det_sign * (log_scale - 2.0 * k.ln()).exp();
        Self { a: na / k, b: nb / k, c: nc / k, d: nd / k, det }
    }

    /// n-fold composition by repeated squaring; used as an independent cross-check
    /// of [`Homography::power`].
    pub fn power_by_squaring(&self, mut n: u32) -> Homography {
        let mut acc = Self::identity();
        let mut base = Self::normalized(self.a, self.b, self.c, self.d, self.det);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        acc
    }

    pub fn classify(&self) -> MapClass {
        let t = self.trace();
        let disc = t * t - 4.0 * self.det;
        let eps = DEGENERACY_TOL * (t * t + self.det.abs());
        let (kind, l1, l2) = if disc.abs() <= eps {
            let l = Complex64::new(t / 2.0, 0.0);
            (MapKind::Parabolic, l, l)
        } else if disc > 0.0 {
            let sq = disc.sqrt();
            (
                MapKind::Hyperbolic,
                Complex64::new((t + sq) / 2.0, 0.0),
                Complex64::new((t - sq) / 2.0, 0.0),
            )
        } else {
            let sq = (-disc).sqrt();
            (
                MapKind::Elliptic,
                Complex64::new(t / 2.0, sq / 2.0),
                Complex64::new(t / 2.0, -sq / 2.0),
            )
        };
        MapClass { kind, lambda1: l1, lambda2: l2, discriminant: disc }
    }

    /// Equality of the induced maps: proportional matrices compare equal.
    pub fn projectively_eq(&self, other: &Homography, tol: f64) -> bool {
        let p = self.coefficients();
        let q = other.coefficients();
        let i = (0..4)
            .max_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs()))
            .unwrap_or(0);
        if q[i] == 0.0 {
            return false;
        }
        let s = p[i] / q[i];
        let pk = p[i].abs();
        (0..4).all(|j| (p[j] - s * q[j]).abs() <= tol * pk)
    }

    /// `H·e(φ)` with `e(φ) = (sin φ, cos φ)`.
    pub fn image(&self, phi: f64) -> (f64, f64) {
        let (s, c) = phi.sin_cos();
        (self.a * s + self.b * c, self.c * s + self.d * c)
    }

    /// Angle `ψ` of `H·e(φ)` in `(−π, π]`, so that `tan ψ = apply(tan φ)`.
    pub fn image_angle(&self, phi: f64) -> f64 {
        let (x, y) = self.image(phi);
        x.atan2(y)
    }

    /// Derivative `dψ/dφ = det/|H·e(φ)|²`; equals `(1+v²)H′(v)/(1+H(v)²)` at
    /// `v = tan φ` and stays finite at the pole of `tan`.
    pub fn phase_slope(&self, phi: f64) -> f64 {
        let (x, y) = self.image(phi);
        self.det / (x * x + y * y)
    }

    /// Phase slope expressed in the image angle: `|adj(H)·e(ψ)|²/det`.
    /// Unlike [`Homography::phase_slope`] this stays smooth for badly conditioned maps.
    pub fn phase_slope_image(&self, psi: f64) -> f64 {
        let (s, c) = psi.sin_cos();
        let x = self.d * s - self.b * c;
        let y = -self.c * s + self.a * c;
        (x * x + y * y) / self.det
    }

    /// Continuous change of the image angle as `φ` runs from `from` to `to`.
    ///
    /// Orientation-preserving maps send every half turn of `φ` to a half turn of `ψ`,
    /// so only the remainder needs an explicit angle computation.
    pub fn sweep(&self, from: f64, to: f64) -> f64 {
        let span = to - from;
        let k = (span / PI).floor();
        let r = span - k * PI;
        let (x1, y1) = self.image(from);
        let (x2, y2) = self.image(from + r);
        let dot = x1 * x2 + y1 * y2;
        let mut ang = (self.det * r.sin()).atan2(dot);
        if self.det > 0.0 && ang < -PI / 2.0 {
            ang += 2.0 * PI;
        } else if self.det < 0.0 && ang > PI / 2.0 {
            ang -= 2.0 * PI;
        }
        k * PI * self.det.signum() + ang
    }

    /// Numerical Schwarzian derivative of the induced map; zero up to roundoff.
    pub fn schwarzian_numeric(&self, v: f64, step: f64) -> Result<f64> {
        schwarzian_at(|x| self.apply(x), v, step)
    }
}

fn cross_ratio(p: [f64; 4]) -> f64 {
    (p[0] - p[2]) * (p[1] - p[3]) / ((p[0] - p[3]) * (p[1] - p[2]))
}

/// Relative distortion of the cross ratio of `v ± h, v ± 3h` under `g`;
/// behaves like `(2/3)·S[g](v)·h²` for small `h`.
fn cross_ratio_distortion<G: Fn(f64) -> f64>(g: &G, v: f64, h: f64) -> f64 {
    let p = [v - 3.0 * h, v - h, v + h, v + 3.0 * h];
    let q = p.map(g);
    cross_ratio(q) / cross_ratio(p) - 1.0
}

/// Schwarzian derivative `g‴/g′ − (3/2)(g″/g′)²` by finite differences.
///
/// The estimator measures how `g` distorts a cross ratio, which Möbius maps
/// preserve exactly, so for them only roundoff remains. The node spacing is
/// `10·step` in units of the local scale `|2g′/g″|` (capped at `max(1, |v|)`),
/// and one Richardson step removes the leading `O(h²)` error.
pub fn schwarzian_at<G: Fn(f64) -> f64>(g: G, v: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) || !v.is_finite() {
        return Err(Error::InvalidInput(format!("schwarzian step {step} at v = {v}")));
    }
    let h0 = step * v.abs().max(1.0);
    let (gm, g0, gp) = (g(v - h0), g(v), g(v + h0));
    let d1 = (gp - gm) / (2.0 * h0);
    let d2 = (gp - 2.0 * g0 + gm) / (h0 * h0);
    let mag = g0.abs().max(gp.abs()).max(gm.abs()).max(f64::MIN_POSITIVE);
    if !d1.is_finite() || d1.abs() * h0 <= 1e-12 * mag {
        return Err(Error::SchwarzianUndefined);
    }
    let cap = v.abs().max(1.0);
    let ell = if d2 != 0.0 { (2.0 * d1 / d2).abs().min(cap) } else { cap };
    let h = 10.0 * step * ell;
    let s1 = 1.5 * cross_ratio_distortion(&g, v, h) / (h * h);
    let s2 = 1.5 * cross_ratio_distortion(&g, v, 2.0 * h) / (4.0 * h * h);
    Ok((4.0 * s1 - s2) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homographic_map(v0: f64, v1: f64) -> Homography {
        Homography::new(-v1, -v0 * (v0 - 2.0 * v1), 1.0, -v1).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Homography::identity().apply(3.7), 3.7);
        let h = homographic_map(1.0, 2.0);
        assert_eq!(h.coefficients(), [-2.0, 3.0, 1.0, -2.0]);
        assert!((h.apply(1.0) + 1.0).abs() < 1e-15);
        let inv = Homography::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert!((inv.apply(2.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn extended_real_action() {
        let h = Homography::new(2.0, 1.0, 1.0, -1.0).unwrap();
        assert_eq!(h.apply(f64::INFINITY), 2.0);
        assert_eq!(h.apply(1.0), f64::INFINITY);
        assert_eq!(Homography::translation(1.0).apply(f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert_eq!(h.derivative_at(1.0), Err(Error::DerivativeAtPole));
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(Homography::new(1.0, 2.0, 2.0, 4.0), Err(Error::SingularMap));
    }

    #[test]
    fn derivative_examples() {
        assert!((homographic_map(1.0, 2.0).derivative_at(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(Homography::identity().derivative_at(-4.2).unwrap(), 1.0);
        assert_eq!(Homography::translation(-2.0).derivative_at(9.0).unwrap(), 1.0);
    }

    #[test]
    fn composition_examples() {
        let inv = Homography::new(0.0, -2.25, 1.0, 0.0).unwrap();
        assert!(inv.compose(&inv).projectively_eq(&Homography::identity(), 1e-14));
        let lin = Homography::translation(-2.0 * 0.7);
        assert!(lin.compose(&lin).projectively_eq(&Homography::translation(-4.0 * 0.7), 1e-14));
        let h = homographic_map(0.3, -1.1);
        assert!(h.compose(&h.inverse()).projectively_eq(&Homography::identity(), 1e-14));
    }

    #[test]
    fn power_matches_brute_force() {
        let h = homographic_map(1.0, 2.0);
        let brute = h.compose(&h).compose(&h);
        assert!(h.power(3).projectively_eq(&brute, 1e-13));
        assert_eq!(h.power(0), Homography::identity());
    }

    #[test]
    fn power_matches_eigenvalue_display() {
        // Δₙ has diagonal (λ₁ⁿ+λ₂ⁿ)/2 and lower-left (λ₁ⁿ−λ₂ⁿ)/(λ₁−λ₂).
        let (v0, v1) = (1.0_f64, 2.0_f64);
        let r = (v0 * (2.0 * v1 - v0)).sqrt();
        let (l1, l2) = (-v1 + r, -v1 - r);
        for n in 1..8 {
            let p = homographic_map(v0, v1).power(n);
            let diag = (l1.powi(n as i32) + l2.powi(n as i32)) / 2.0;
            let low = (l1.powi(n as i32) - l2.powi(n as i32)) / (l1 - l2);
            assert!((p.a / p.c - diag / low).abs() < 1e-10 * (diag / low).abs().max(1.0));
            assert!((p.d / p.c - diag / low).abs() < 1e-10 * (diag / low).abs().max(1.0));
        }
    }

    #[test]
    fn power_tracks_determinant() {
        let h = homographic_map(1.0, 2.0);
        for n in [2, 5, 17, 40] {
            let p = h.power(n);
            let q = h.power_by_squaring(n);
            let direct = p.a * p.d - p.b * p.c;
            assert!((p.det() - direct).abs() <= 1e-6 * p.det().abs().max(1e-300) + 1e-15);
            assert!((p.det() / q.det() - 1.0).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn parabolic_and_elliptic_powers() {
        let par = homographic_map(2.0, 1.0);
        assert_eq!(par.classify().kind, MapKind::Parabolic);
        let ell = homographic_map(-0.5, 1.0);
        assert_eq!(ell.classify().kind, MapKind::Elliptic);
        for n in [2, 3, 10, 33] {
            assert!(par.power(n).projectively_eq(&par.power_by_squaring(n), 1e-10));
            assert!(ell.power(n).projectively_eq(&ell.power_by_squaring(n), 1e-10));
        }
    }

    #[test]
    fn classify_examples() {
        let c = homographic_map(1.0, 2.0).classify();
        assert_eq!(c.kind, MapKind::Hyperbolic);
        let s3 = 3.0_f64.sqrt();
        assert!((c.lambda1.re - (-2.0 + s3)).abs() < 1e-14);
        assert!((c.lambda2.re - (-2.0 - s3)).abs() < 1e-14);
        assert!(((c.lambda1 * c.lambda2).re - 1.0).abs() < 1e-14);

        let c = homographic_map(1.5, 0.0).classify();
        assert_eq!(c.kind, MapKind::Elliptic);
        assert!(c.lambda1.re.abs() < 1e-15 && (c.lambda1.im.abs() - 1.5).abs() < 1e-14);

        let c = homographic_map(1.4, 0.7).classify();
        assert_eq!(c.kind, MapKind::Parabolic);
        assert!((c.lambda1.re + 0.7).abs() < 1e-12 && c.lambda1 == c.lambda2);
    }

    #[test]
    fn phase_slope_equals_bracket() {
        let h = homographic_map(0.4, -0.9);
        for &phi in &[0.1, 0.7, 1.2, -0.4] {
            let v: f64 = f64::tan(phi);
            let w = h.apply(v);
            let bracket = (1.0 + v * v) * h.derivative_at(v).unwrap() / (1.0 + w * w);
            assert!((h.phase_slope(phi) - bracket).abs() < 1e-12);
            let psi = h.image_angle(phi);
            assert!((h.phase_slope_image(psi) - bracket).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_is_lifted_angle() {
        let h = homographic_map(1.0, 2.0);
        assert!((h.sweep(0.3, 0.3 + PI) - PI).abs() < 1e-13);
        assert!((h.sweep(0.3, 0.3 + 5.0 * PI) - 5.0 * PI).abs() < 1e-12);
        // Sweep over a small step approximates slope × step.
        let dphi = 1e-6;
        let approx = h.sweep(0.8, 0.8 + dphi) / dphi;
        assert!((approx - h.phase_slope(0.8)).abs() < 1e-5);
    }

    #[test]
    fn schwarzian_examples() {
        let s = schwarzian_at(f64::tan, 0.0, SCHWARZIAN_STEP).unwrap();
        assert!((s - 2.0).abs() < 1e-5, "{s}");
        let s = schwarzian_at(f64::exp, 0.3, SCHWARZIAN_STEP).unwrap();
        assert!((s + 0.5).abs() < 1e-5, "{s}");
        let h = homographic_map(1.0, 2.0);
        assert!(h.schwarzian_numeric(1.0, SCHWARZIAN_STEP).unwrap().abs() < 1e-6);
        assert_eq!(schwarzian_at(|_| 4.0, 0.5, SCHWARZIAN_STEP), Err(Error::SchwarzianUndefined));
    }
}

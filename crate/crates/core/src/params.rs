//! Parameterizations of stable and tempered stable laws and their closed-form
//! algebra.
//!
//! Stable laws use the `S_α(σ, β, δ)` convention whose characteristic
//! function is
//!
//! ```text
//! α ≠ 1: exp(−σ^α |u|^α (1 − iβ sign(u) tan(πα/2)) + iδu)
//! α = 1: exp(−σ|u| (1 + iβ (2/π) sign(u) log|u|) + iδu)
//! ```

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breakpoints, Tolerance};
use crate::special::gamma;

/// Indices closer than this to 1 use the α = 1 formulas.
pub const ALPHA_ONE_BAND: f64 = 1e-9;

pub fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ALPHA_ONE_BAND
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    /// Stability index in (0, 2].
    pub alpha: f64,
    /// Scale, σ ≥ 0.
    pub sigma: f64,
    /// Skewness in [−1, 1].
    pub beta: f64,
    /// Location.
    pub delta: f64,
}

impl StableParams {
    pub fn new(alpha: f64, sigma: f64, beta: f64, delta: f64) -> Result<Self> {
        validate(StableParams { alpha, sigma, beta, delta })
    }

    /// `S_α(1, β, 0)`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, 1.0, beta, 0.0)
    }
}

/// Checks every domain constraint and returns the canonical form
/// (β forced to 0 for the Gaussian case).
pub fn validate(p: StableParams) -> Result<StableParams> {
    if !(p.alpha > 0.0 && p.alpha <= 2.0) {
        return Err(Error::domain("alpha", format!("{} not in (0, 2]", p.alpha)));
    }
    if !(p.sigma >= 0.0) || !p.sigma.is_finite() {
        return Err(Error::domain("sigma", format!("{} must be finite and non-negative", p.sigma)));
    }
    if !(-1.0..=1.0).contains(&p.beta) {
        return Err(Error::domain("beta", format!("{} not in [-1, 1]", p.beta)));
    }
    if !p.delta.is_finite() {
        return Err(Error::domain("delta", "must be finite"));
    }
    let beta = if p.alpha == 2.0 { 0.0 } else { p.beta };
    Ok(StableParams { beta, ..p })
}

/// Lévy triplet `(b, 0, ν)` of an α-stable process with
/// `ν(dx) = P x^{−1−α} dx` on x > 0 and `Q |x|^{−1−α} dx` on x < 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLevyTriplet {
    pub alpha: f64,
    /// Mass coefficient of positive jumps (P).
    pub pos_mass: f64,
    /// Mass coefficient of negative jumps (Q).
    pub neg_mass: f64,
    /// Drift (b).
    pub drift: f64,
}

impl StableLevyTriplet {
    pub fn new(alpha: f64, pos_mass: f64, neg_mass: f64, drift: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain("alpha", format!("{alpha} not in (0, 2)")));
        }
        check_mass("pos_mass", pos_mass)?;
        check_mass("neg_mass", neg_mass)?;
        if pos_mass + neg_mass <= 0.0 {
            return Err(Error::domain("pos_mass", "P + Q must be positive"));
        }
        if !drift.is_finite() {
            return Err(Error::domain("drift", "must be finite"));
        }
        Ok(StableLevyTriplet { alpha, pos_mass, neg_mass, drift })
    }
}

/// Lévy measure parameters of a classical tempered stable law:
/// `P e^{−A x} x^{−1−α}` on x > 0 and `Q e^{−B|x|} |x|^{−1−α}` on x < 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtsTriplet {
    pub alpha: f64,
    /// P
    pub pos_mass: f64,
    /// A
    pub pos_tempering: f64,
    /// Q
    pub neg_mass: f64,
    /// B
    pub neg_tempering: f64,
}

impl CtsTriplet {
    pub fn new(
        alpha: f64,
        pos_mass: f64,
        pos_tempering: f64,
        neg_mass: f64,
        neg_tempering: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || is_alpha_one(alpha) {
            return Err(Error::domain("alpha", format!("{alpha} not in (0, 1) ∪ (1, 2)")));
        }
        check_mass("pos_mass", pos_mass)?;
        check_mass("neg_mass", neg_mass)?;
        check_mass("pos_tempering", pos_tempering)?;
        check_mass("neg_tempering", neg_tempering)?;
        if pos_mass + neg_mass <= 0.0 {
            return Err(Error::domain("pos_mass", "P + Q must be positive"));
        }
        if pos_tempering + neg_tempering <= 0.0 {
            return Err(Error::domain("pos_tempering", "A + B must be positive"));
        }
        if pos_mass > 0.0 && pos_tempering <= 0.0 {
            return Err(Error::domain("pos_tempering", "A must be positive when P > 0"));
        }
        if neg_mass > 0.0 && neg_tempering <= 0.0 {
            return Err(Error::domain("neg_tempering", "B must be positive when Q > 0"));
        }
        Ok(CtsTriplet { alpha, pos_mass, pos_tempering, neg_mass, neg_tempering })
    }

    /// The same measure with the jump directions swapped.
    pub fn reflected(&self) -> CtsTriplet {
        CtsTriplet {
            alpha: self.alpha,
            pos_mass: self.neg_mass,
            pos_tempering: self.neg_tempering,
            neg_mass: self.pos_mass,
            neg_tempering: self.pos_tempering,
        }
    }
}

fn check_mass(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(field, format!("{v} must be finite and non-negative")))
    }
}

/// `x ↦ scale·x + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub fn new(scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::domain("scale", format!("{scale} must be positive")));
        }
        Ok(AffineMap { scale, shift })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    pub fn invert(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }
}

/// `c = ∫₁^∞ sin(r)/r² dr + ∫₀¹ (sin(r) − r)/r² dr`, the location constant of
/// the α = 1 Lévy-to-stable conversion. Computed once and cached.
pub fn alpha_one_location_constant() -> f64 {
    static CONSTANT: OnceLock<f64> = OnceLock::new();
    *CONSTANT.get_or_init(compute_alpha_one_constant)
}

fn compute_alpha_one_constant() -> f64 {
    let tol = Tolerance { abs: 1e-12, rel: 0.0, max_subdivisions: 2000 };
    let near = integrate(
        |r: f64| {
            if r < 1e-4 {
                // (sin r − r)/r² = −r/6 + r³/120 − …
                -r / 6.0 + r * r * r / 120.0
            } else {
                (r.sin() - r) / (r * r)
            }
        },
        0.0,
        1.0,
        tol,
    )
    .expect("smooth integrand");
    // [1, R] with a breakpoint at every multiple of π, R = 200π
    const PERIODS: usize = 200;
    let mut points = vec![1.0];
    points.extend((1..=PERIODS).map(|k| k as f64 * PI));
    let far = integrate_with_breakpoints(|r: f64| r.sin() / (r * r), &points, tol)
        .expect("smooth integrand");
    // ∫_R^∞ sin r / r² dr = cos R/R² + 2 sin R/R³ − 6 cos R/R⁴ + O(R⁻⁵)
    let r = PERIODS as f64 * PI;
    let tail = r.cos() / (r * r) + 2.0 * r.sin() / r.powi(3) - 6.0 * r.cos() / r.powi(4);
    near.value + far.value + tail
}

/// Stable parameters of `X₁` for a stable Lévy process with the given triplet.
pub fn levy_to_stable(t: &StableLevyTriplet) -> Result<StableParams> {
    let t = StableLevyTriplet::new(t.alpha, t.pos_mass, t.neg_mass, t.drift)?;
    let total = t.pos_mass + t.neg_mass;
    let beta = (t.pos_mass - t.neg_mass) / total;
    let (sigma, delta) = if is_alpha_one(t.alpha) {
        (FRAC_PI_2 * total, alpha_one_location_constant() * (t.pos_mass - t.neg_mass))
    } else {
        let a = t.alpha;
        let radicand = total / a * gamma(1.0 - a) * (FRAC_PI_2 * a).cos();
        (radicand.powf(1.0 / a), (t.neg_mass - t.pos_mass) / (1.0 - a))
    };
    let alpha = if is_alpha_one(t.alpha) { 1.0 } else { t.alpha };
    StableParams::new(alpha, sigma, beta, delta + t.drift)
}

/// Inverse of [`levy_to_stable`] for α < 2 and σ > 0.
pub fn stable_to_levy(p: &StableParams) -> Result<StableLevyTriplet> {
    let p = validate(*p)?;
    if p.alpha >= 2.0 || p.sigma <= 0.0 {
        return Err(Error::domain("alpha", "needs α < 2 and σ > 0"));
    }
    let (total, base_delta_per_diff) = if is_alpha_one(p.alpha) {
        (p.sigma / FRAC_PI_2, alpha_one_location_constant())
    } else {
        let a = p.alpha;
        (p.sigma.powf(a) * a / (gamma(1.0 - a) * (FRAC_PI_2 * a).cos()), -1.0 / (1.0 - a))
    };
    let pos = 0.5 * total * (1.0 + p.beta);
    let neg = 0.5 * total * (1.0 - p.beta);
    let drift = p.delta - base_delta_per_diff * (pos - neg);
    StableLevyTriplet::new(p.alpha, pos, neg, drift)
}

/// Splits `p` into the standard law `S_α(1, β, 0)` and the affine map taking
/// a standard draw to a draw of `p`.
pub fn standardize(p: &StableParams) -> Result<(StableParams, AffineMap)> {
    let p = validate(*p)?;
    if p.sigma <= 0.0 {
        return Err(Error::domain("sigma", "standardization needs σ > 0"));
    }
    let shift = if is_alpha_one(p.alpha) {
        p.delta + FRAC_2_PI * p.beta * p.sigma * p.sigma.ln()
    } else {
        p.delta
    };
    let z = StableParams::standard(p.alpha, p.beta)?;
    Ok((z, AffineMap::new(p.sigma, shift)?))
}

/// Law of `aX + b` for `X ~ p`.
pub fn scale_shift_law(p: &StableParams, a: f64, b: f64) -> Result<StableParams> {
    let p = validate(*p)?;
    if a == 0.0 || !a.is_finite() {
        return Err(Error::domain("a", "scale factor must be finite and nonzero"));
    }
    if !b.is_finite() {
        return Err(Error::domain("b", "shift must be finite"));
    }
    let mut delta = a * p.delta + b;
    if is_alpha_one(p.alpha) {
        delta -= FRAC_2_PI * p.beta * p.sigma * a * a.abs().ln();
    }
    StableParams::new(p.alpha, a.abs() * p.sigma, a.signum() * p.beta, delta)
}

/// Law of `X₀ + X₁` for independent `X₀ ~ p0`, `X₁ ~ p1` sharing α.
pub fn sum_law(p0: &StableParams, p1: &StableParams) -> Result<StableParams> {
    let p0 = validate(*p0)?;
    let p1 = validate(*p1)?;
    if (p0.alpha - p1.alpha).abs() > 1e-12 {
        return Err(Error::AlphaMismatch(p0.alpha, p1.alpha));
    }
    let a = p0.alpha;
    let w0 = p0.sigma.powf(a);
    let w1 = p1.sigma.powf(a);
    let total = w0 + w1;
    let beta = if total > 0.0 { (p0.beta * w0 + p1.beta * w1) / total } else { 0.0 };
    StableParams::new(a, total.powf(1.0 / a), beta.clamp(-1.0, 1.0), p0.delta + p1.delta)
}

/// Law of `X_t` when `X₁ ~ p`: `S_α(t^{1/α}σ, β, tδ)`.
pub fn marginal_at_time(p: &StableParams, t: f64) -> Result<StableParams> {
    let p = validate(*p)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("t", format!("{t} must be positive")));
    }
    let scale = if is_alpha_one(p.alpha) { t } else { t.powf(1.0 / p.alpha) };
    StableParams::new(p.alpha, scale * p.sigma, p.beta, t * p.delta)
}

/// Closed interval supporting the density; infinite ends are ±∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Support of the density of `p`. Only totally skewed laws with α < 1 live on
/// a half line, `[δ, ∞)` for β = 1 and `(−∞, δ]` for β = −1.
pub fn support(p: &StableParams) -> Support {
    let full = Support { lower: f64::NEG_INFINITY, upper: f64::INFINITY };
    if p.alpha < 1.0 && !is_alpha_one(p.alpha) {
        if p.beta == 1.0 {
            return Support { lower: p.delta, upper: f64::INFINITY };
        }
        if p.beta == -1.0 {
            return Support { lower: f64::NEG_INFINITY, upper: p.delta };
        }
    }
    full
}

/// Whether `E|X|^r < ∞` for `r > 0`.
pub fn moment_finite(p: &StableParams, r: f64) -> bool {
    p.alpha == 2.0 || r < p.alpha
}

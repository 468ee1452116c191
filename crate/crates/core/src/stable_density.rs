//! Stable densities, distribution functions and characteristic functions.
//!
//! For α ≠ 1 and x > 0 the standard density is
//!
//! ```text
//! f(x) = α / (π|α−1| x) ∫_{−θ₀}^{π/2} w(θ) e^{−w(θ)} dθ,   w = x^{α/(α−1)} V(θ)
//! ```
//!
//! and the upper tail is `(1/π)∫ e^{−w} dθ` (α > 1) or `(1/π)∫ (1 − e^{−w}) dθ`
//! (α < 1). `w` is monotone in θ, so the integrand is unimodal with its peak
//! where `w = 1`; the integration range is pre-split at the points where
//! `ln w` crosses a ladder of levels so the adaptive rule starts around the
//! peak even when it is extremely narrow. Everything runs in log space.

use std::f64::consts::{FRAC_1_PI, FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{is_alpha_one, standardize, support, validate, StableParams};
use crate::quadrature::{integrate_with_breakpoints, Tolerance};
use crate::special::{erfc, gamma};

/// Values of `ln w` at which the θ range is split before integration.
const LEVELS: [f64; 12] = [-40.0, -20.0, -10.0, -5.0, -2.5, -1.0, 0.0, 1.0, 2.0, 3.0, 4.5, 6.5];

/// Beyond `w = 750`, `e^{−w}` underflows and the integrand is taken as 0.
const LN_W_CUTOFF: f64 = 6.620_073_206_530_356; // ln 750

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Below this |x| (after standardization) the density is interpolated
    /// quadratically through `f(−x_switch)`, `f(0)` and `f(x_switch)`.
    pub x_switch: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 200, x_switch: 1e-6 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol), ("x_switch", self.x_switch)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, format!("{v} must be positive")));
            }
        }
        if self.max_subdivisions < 10 {
            return Err(Error::domain("max_subdivisions", "must be at least 10"));
        }
        Ok(())
    }

    /// Tolerance for an integral that is multiplied by `factor` afterwards.
    fn scaled(&self, factor: f64) -> Tolerance {
        Tolerance {
            abs: self.abs_tol / factor,
            rel: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

pub type ComplexValue = Complex64;

/// `α⁻¹ arctan(β tan(πα/2))`, or π/2 at α = 1.
pub fn theta0(alpha: f64, beta: f64) -> f64 {
    if is_alpha_one(alpha) {
        FRAC_PI_2
    } else {
        alpha_theta0(alpha, beta) / alpha
    }
}

/// `αθ₀`, exact for the totally skewed cases.
fn alpha_theta0(alpha: f64, beta: f64) -> f64 {
    if beta.abs() == 1.0 {
        let folded = if alpha < 1.0 { FRAC_PI_2 * alpha } else { FRAC_PI_2 * alpha - PI };
        beta * folded
    } else {
        (beta * (FRAC_PI_2 * alpha).tan()).atan()
    }
}

fn check_standard(alpha: f64, beta: f64) -> Result<StableParams> {
    StableParams::standard(alpha, beta)
}

/// Log-space kernel for the positive half line of `S_α(1, β, 0)`.
///
/// The range `(lo, hi)` is split at its midpoint. The left half is
/// parameterized by `φ = θ − lo` and the right half by `ψ = hi − θ`, with the
/// trigonometric factors rewritten so that the ones vanishing at an endpoint
/// are computed without cancellation. This keeps the peak resolvable when it
/// sits within a few ulps of an endpoint in θ.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    alpha: f64,
    beta: f64,
    lo: f64,
    hi: f64,
    /// `π/2 − θ₀`
    e0: f64,
    /// `π − α(θ₀ + π/2)`
    d1: f64,
    /// `ln(cos αθ₀)/(α−1)`
    offset: f64,
    /// Whether `V` increases in θ.
    increasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Half {
    Left,
    Right,
}

impl Kernel {
    /// α ≠ 1; `V` on `(−θ₀, π/2)`.
    fn general(alpha: f64, beta: f64) -> Self {
        let at0 = alpha_theta0(alpha, beta);
        let t0 = at0 / alpha;
        let e0 = if alpha < 1.0 && beta == 1.0 { 0.0 } else { FRAC_PI_2 - t0 };
        let d1 = if alpha > 1.0 && beta == -1.0 { 0.0 } else { PI - at0 - FRAC_PI_2 * alpha };
        Kernel {
            alpha,
            beta,
            lo: -t0,
            hi: FRAC_PI_2,
            e0,
            d1,
            offset: at0.cos().ln() / (alpha - 1.0),
            increasing: alpha < 1.0,
        }
    }

    /// α = 1, β ≠ 0; `V` on `(−π/2, π/2)`, increasing for β > 0.
    fn alpha_one(beta: f64) -> Self {
        Kernel {
            alpha: 1.0,
            beta,
            lo: -FRAC_PI_2,
            hi: FRAC_PI_2,
            e0: 0.0,
            d1: 0.0,
            offset: 0.0,
            increasing: beta > 0.0,
        }
    }

    fn is_empty(&self) -> bool {
        self.hi - self.lo <= 0.0
    }

    fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// `ln V` at distance `d` from the endpoint of `half`.
    fn ln_v(&self, half: Half, d: f64) -> f64 {
        if self.alpha == 1.0 {
            let b = self.beta;
            // cos θ = sin d; tan θ = ∓cot d
            let (tilt, sign) = match half {
                Half::Left => (FRAC_PI_2 * (1.0 - b) + b * d, -1.0),
                Half::Right => (FRAC_PI_2 * (1.0 + b) - b * d, 1.0),
            };
            let (s, c) = d.sin_cos();
            (FRAC_2_PI * tilt / s).ln() + sign * tilt * c / (s * b)
        } else {
            let a = self.alpha;
            // cos θ, sin(α(θ₀+θ)), cos(αθ₀ + (α−1)θ)
            let (cos_t, sin_t, third) = match half {
                Half::Left => ((self.e0 + d).sin(), (a * d).sin(), (self.e0 + (1.0 - a) * d).sin()),
                Half::Right => (d.sin(), (self.d1 + a * d).sin(), (self.d1 + (a - 1.0) * d).sin()),
            };
            self.offset + a / (a - 1.0) * (cos_t.ln() - sin_t.ln()) + third.ln() - cos_t.ln()
        }
    }

    /// Whether `ln w` increases with the distance variable of `half`.
    fn rises(&self, half: Half) -> bool {
        (half == Half::Left) == self.increasing
    }

    /// Points in `(0, half_width)` where `ln h + ln V` crosses each level.
    fn breakpoints(&self, half: Half, ln_h: f64) -> Vec<f64> {
        let width = self.half_width();
        let rises = self.rises(half);
        let at_mid = ln_h + self.ln_v(half, width);
        let mut points = vec![0.0];
        let mut levels: Vec<f64> = LEVELS
            .iter()
            .copied()
            .filter(|&l| if rises { l < at_mid } else { l > at_mid })
            .collect();
        if !rises {
            levels.reverse();
        }
        let mut left = 0.0;
        for level in levels {
            let (mut a, mut b) = (left, width);
            for _ in 0..400 {
                if b - a <= 1e-12 * b {
                    break;
                }
                // geometric steps while the bracket touches the endpoint
                let mid = if a == 0.0 { b / 16.0 } else { 0.5 * (a + b) };
                let lw = ln_h + self.ln_v(half, mid);
                let short = if rises { lw < level } else { lw > level };
                if short || lw.is_nan() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let t = 0.5 * (a + b);
            if t > *points.last().unwrap() && t < width {
                points.push(t);
                left = t;
            }
        }
        points.push(width);
        points
    }

    /// `∫ g(ln w(θ)) dθ` over the kernel's range.
    fn integrate<G: Fn(f64) -> f64>(&self, ln_h: f64, g: G, tol: Tolerance) -> Result<f64> {
        if self.is_empty() {
            return Ok(0.0);
        }
        let half_tol = Tolerance { abs: 0.5 * tol.abs, ..tol };
        let mut total = 0.0;
        for half in [Half::Left, Half::Right] {
            let points = self.breakpoints(half, ln_h);
            let f = |d: f64| {
                let y = g(ln_h + self.ln_v(half, d));
                if y.is_finite() {
                    y
                } else {
                    0.0
                }
            };
            total += integrate_with_breakpoints(f, &points, half_tol)?.value;
        }
        Ok(total)
    }

    /// `ln V(θ)` for θ inside the range.
    fn ln_v_at(&self, theta: f64) -> f64 {
        let mid = self.lo + self.half_width();
        if theta <= mid {
            self.ln_v(Half::Left, theta - self.lo)
        } else {
            self.ln_v(Half::Right, self.hi - theta)
        }
    }
}

/// `w e^{−w}` given `ln w`.
fn peak(lw: f64) -> f64 {
    if lw > LN_W_CUTOFF || lw.is_nan() {
        0.0
    } else {
        (lw - lw.exp()).exp()
    }
}

/// `e^{−w}` given `ln w`.
fn survival(lw: f64) -> f64 {
    if lw > LN_W_CUTOFF {
        0.0
    } else {
        (-lw.exp()).exp()
    }
}

/// `1 − e^{−w}` given `ln w`.
fn complement(lw: f64) -> f64 {
    if lw > LN_W_CUTOFF {
        1.0
    } else {
        -(-lw.exp()).exp_m1()
    }
}

/// `V_{α,β}(θ)` from the integral representation.
pub fn nolan_v(alpha: f64, beta: f64, theta: f64) -> Result<f64> {
    check_standard(alpha, beta)?;
    if alpha >= 2.0 {
        return Err(Error::domain("alpha", "V is defined for α < 2"));
    }
    let kernel = if is_alpha_one(alpha) {
        if beta == 0.0 {
            return Err(Error::Unsupported("V is undefined for α = 1, β = 0".into()));
        }
        Kernel::alpha_one(beta)
    } else {
        Kernel::general(alpha, beta)
    };
    if !(theta > kernel.lo && theta < kernel.hi) {
        return Err(Error::domain(
            "theta",
            format!("{theta} not in ({}, {})", kernel.lo, kernel.hi),
        ));
    }
    Ok(kernel.ln_v_at(theta).exp())
}

fn gaussian_pdf(x: f64) -> f64 {
    // N(0, 2)
    (-0.25 * x * x).exp() / (2.0 * PI.sqrt())
}

/// `f(0)` for α ≠ 1.
fn pdf_at_zero(alpha: f64, beta: f64) -> f64 {
    let t0 = theta0(alpha, beta);
    FRAC_1_PI * gamma(1.0 + 1.0 / alpha) * t0.cos() * (alpha * t0).cos().powf(1.0 / alpha)
}

/// Density for α ≠ 1, x > 0.
fn pdf_positive(alpha: f64, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let kernel = Kernel::general(alpha, beta);
    let factor = alpha / (PI * (alpha - 1.0).abs() * x);
    let ln_h = alpha / (alpha - 1.0) * x.ln();
    Ok(factor * kernel.integrate(ln_h, peak, cfg.scaled(factor))?)
}

fn pdf_general(alpha: f64, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if x > 0.0 {
        pdf_positive(alpha, beta, x, cfg)
    } else if x < 0.0 {
        pdf_positive(alpha, -beta, -x, cfg)
    } else {
        Ok(pdf_at_zero(alpha, beta))
    }
}

/// Density for α = 1, β > 0.
fn pdf_alpha_one(beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let kernel = Kernel::alpha_one(beta);
    let factor = 0.5 / beta;
    let ln_h = -PI * x / (2.0 * beta);
    Ok(factor * kernel.integrate(ln_h, peak, cfg.scaled(factor))?)
}

/// Density of `S_α(1, β, 0)` at `x`.
pub fn pdf_standard(alpha: f64, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let z = check_standard(alpha, beta)?;
    cfg.validate()?;
    if x.is_nan() {
        return Err(Error::domain("x", "NaN"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let (alpha, beta) = (z.alpha, z.beta);
    if alpha == 2.0 {
        return Ok(gaussian_pdf(x));
    }
    if is_alpha_one(alpha) {
        return if beta == 0.0 {
            Ok(FRAC_1_PI / (1.0 + x * x))
        } else if beta > 0.0 {
            pdf_alpha_one(beta, x, cfg)
        } else {
            pdf_alpha_one(-beta, -x, cfg)
        };
    }
    let xs = cfg.x_switch;
    if x != 0.0 && x.abs() < xs {
        let f0 = pdf_at_zero(alpha, beta);
        let fp = pdf_general(alpha, beta, xs, cfg)?;
        let fm = pdf_general(alpha, beta, -xs, cfg)?;
        let slope = (fp - fm) / (2.0 * xs);
        let curve = (fp + fm - 2.0 * f0) / (2.0 * xs * xs);
        return Ok((f0 + x * (slope + x * curve)).max(0.0));
    }
    pdf_general(alpha, beta, x, cfg)
}

/// Density of `p` at `x`.
pub fn pdf(p: &StableParams, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (z, map) = standardize(p)?;
    Ok(pdf_standard(z.alpha, z.beta, map.invert(x), cfg)? / map.scale)
}

/// `P(Z > x)` for `Z ~ S_α(1, β, 0)`, α < 2, x > 0 (any x when α = 1).
fn upper_tail_standard(alpha: f64, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let tol = cfg.scaled(FRAC_1_PI);
    if is_alpha_one(alpha) {
        if beta == 0.0 {
            return Ok(if x > 0.0 { (1.0 / x).atan() * FRAC_1_PI } else { 0.5 - x.atan() * FRAC_1_PI });
        }
        if beta > 0.0 {
            let kernel = Kernel::alpha_one(beta);
            let ln_h = -PI * x / (2.0 * beta);
            return Ok(FRAC_1_PI * kernel.integrate(ln_h, complement, tol)?);
        }
        // P(Z > x; β) = P(Z′ < −x; −β)
        let kernel = Kernel::alpha_one(-beta);
        let ln_h = PI * x / (2.0 * beta.abs());
        return Ok(FRAC_1_PI * kernel.integrate(ln_h, survival, tol)?);
    }
    let kernel = Kernel::general(alpha, beta);
    let ln_h = alpha / (alpha - 1.0) * x.ln();
    let integrand: fn(f64) -> f64 = if alpha > 1.0 { survival } else { complement };
    Ok((FRAC_1_PI * kernel.integrate(ln_h, integrand, tol)?).clamp(0.0, 1.0))
}

/// Distribution function of `S_α(1, β, 0)`.
pub fn cdf_standard(alpha: f64, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let z = check_standard(alpha, beta)?;
    cfg.validate()?;
    let (alpha, beta) = (z.alpha, z.beta);
    if x.is_nan() {
        return Err(Error::domain("x", "NaN"));
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if alpha == 2.0 {
        return Ok(0.5 * erfc(-0.5 * x));
    }
    if x == 0.0 && !is_alpha_one(alpha) {
        return Ok((FRAC_PI_2 - theta0(alpha, beta)) * FRAC_1_PI);
    }
    if x > 0.0 || is_alpha_one(alpha) && x == 0.0 {
        Ok(1.0 - upper_tail_standard(alpha, beta, x, cfg)?)
    } else {
        upper_tail_standard(alpha, -beta, -x, cfg)
    }
}

/// `P(X ≤ x)` for `X ~ p`.
pub fn cdf(p: &StableParams, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (z, map) = standardize(p)?;
    cdf_standard(z.alpha, z.beta, map.invert(x), cfg)
}

/// `P(X > x)` for `X ~ p`, accurate in relative terms far in the upper tail.
pub fn sf(p: &StableParams, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (z, map) = standardize(p)?;
    cfg.validate()?;
    let y = map.invert(x);
    if z.alpha == 2.0 {
        return Ok(0.5 * erfc(0.5 * y));
    }
    if y > 0.0 || is_alpha_one(z.alpha) {
        upper_tail_standard(z.alpha, z.beta, y, cfg)
    } else {
        Ok(1.0 - cdf_standard(z.alpha, z.beta, y, cfg)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Upper,
    Lower,
}

/// Leading-order tail probability: `P(X > x)` (upper) or `P(X < −x)` (lower)
/// is `c_α σ^α (1 ± β) x^{−α}` as x → ∞.
pub fn tail_asymptote(p: &StableParams, x: f64, side: TailSide) -> Result<f64> {
    let p = validate(*p)?;
    if p.alpha >= 2.0 {
        return Err(Error::domain("alpha", "the Gaussian has no power tail"));
    }
    if !(x > 0.0) {
        return Err(Error::domain("x", format!("{x} must be positive")));
    }
    let weight = match side {
        TailSide::Upper => 1.0 + p.beta,
        TailSide::Lower => 1.0 - p.beta,
    };
    if weight == 0.0 {
        return Err(Error::Unsupported(format!(
            "{side:?} tail of a totally skewed law (β = {}) is lighter than a power law",
            p.beta
        )));
    }
    Ok(tail_constant(p.alpha) * p.sigma.powf(p.alpha) * weight * x.powf(-p.alpha))
}

/// `c_α = Γ(α) sin(πα/2)/π`, equal to `(1−α)/(2Γ(2−α)cos(πα/2))` off α = 1.
fn tail_constant(alpha: f64) -> f64 {
    if is_alpha_one(alpha) {
        FRAC_1_PI
    } else {
        (1.0 - alpha) / (2.0 * gamma(2.0 - alpha) * (FRAC_PI_2 * alpha).cos())
    }
}

/// `P(X ≤ x)` by adaptive integration of the density, truncating each tail
/// where the asymptotic mass left out is below 1e−9. Slower than [`cdf`];
/// kept as an independent route.
pub fn cdf_by_pdf_integration(p: &StableParams, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (z, map) = standardize(p)?;
    cfg.validate()?;
    let y = map.invert(x);
    let (alpha, beta) = (z.alpha, z.beta);
    let sup = support(&z);
    let f = |s: f64| pdf_standard(alpha, beta, s, cfg);
    // the side with less mass is integrated; F(0) splits the mass
    let median_side = if alpha == 2.0 || is_alpha_one(alpha) {
        0.0
    } else {
        0.0_f64.max(sup.lower).min(sup.upper)
    };
    let upper = y >= median_side;
    let (start, bound, weight) = if upper {
        (y, sup.upper, 1.0 + beta)
    } else {
        (-y, -sup.lower, 1.0 - beta)
    };
    if bound <= start {
        return Ok(if upper { 1.0 } else { 0.0 });
    }
    let reach = if alpha == 2.0 || weight == 0.0 {
        start.max(0.0) + 60.0
    } else {
        let c = tail_constant(alpha) * weight;
        start.max(0.0) + (c / 1e-9).powf(1.0 / alpha)
    };
    let end = reach.min(bound);
    // s = start + e^u − 1, u ∈ [0, ln(1 + end − start)], one panel per unit of u
    if end <= start {
        return Ok(if upper { 1.0 } else { 0.0 });
    }
    let u_end = (end - start).ln_1p();
    let mut points: Vec<f64> = (0..u_end.ceil() as usize).map(|k| k as f64).collect();
    points.push(u_end);
    let mut failure = None;
    let integrand = |u: f64| {
        let s = start + u.exp_m1();
        let arg = if upper { s } else { -s };
        match f(arg) {
            Ok(v) => v * u.exp(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let tol = Tolerance { abs: cfg.abs_tol, rel: cfg.rel_tol, max_subdivisions: cfg.max_subdivisions };
    let mass = integrate_with_breakpoints(integrand, &points, tol)?.value;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(if upper { 1.0 - mass } else { mass }.clamp(0.0, 1.0))
}

/// Characteristic function `E[e^{iuX}]`.
pub fn char_fn(p: &StableParams, u: f64) -> ComplexValue {
    if u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (a, s, b, d) = (p.alpha, p.sigma, p.beta, p.delta);
    let au = u.abs();
    let sign = u.signum();
    let exponent = if is_alpha_one(a) {
        let modulus = s * au;
        Complex64::new(-modulus, -modulus * b * FRAC_2_PI * sign * au.ln() + d * u)
    } else {
        let modulus = (s * au).powf(a);
        let skew = if b == 0.0 { 0.0 } else { b * sign * (FRAC_PI_2 * a).tan() };
        Complex64::new(-modulus, modulus * skew + d * u)
    };
    exponent.exp()
}

/// Density of `p` at each of `xs` by trapezoidal inversion of the
/// characteristic function, `f(x) = π⁻¹ ∫₀^∞ Re(φ(u) e^{−iux}) du`.
///
/// The step is chosen so the aliased copies of the density, spaced `2π/du`
/// apart, contribute less than `eps`; the range ends where `|φ| < eps·1e−4`.
pub fn pdf_by_inversion(p: &StableParams, xs: &[f64], eps: f64) -> Result<Vec<f64>> {
    let p = validate(*p)?;
    if p.sigma <= 0.0 {
        return Err(Error::domain("sigma", "inversion needs σ > 0"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("eps", "must be positive"));
    }
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let (z, map) = standardize(&p)?;
    let ys: Vec<f64> = xs.iter().map(|&x| map.invert(x)).collect();
    let span = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    let a = z.alpha;
    let half_period = if a == 2.0 {
        span + 40.0
    } else {
        // Σ_{k≠0} f(y + kL) ≤ 2ζ(1+α)·αc_α·2·(L − |y|)^{−1−α}, with ζ(1+α) ≤ 1 + 1/α
        let bound = 4.0 * (1.0 + 1.0 / a) * a * tail_constant(a);
        span + (bound / eps).powf(1.0 / (1.0 + a))
    };
    let du = PI / half_period;
    let u_max = (-(eps * 1e-4).ln()).powf(1.0 / a);
    let n = (u_max / du).ceil() as usize;
    let phis: Vec<Complex64> = (1..=n).map(|k| char_fn(&z, k as f64 * du)).collect();
    let out = ys
        .par_iter()
        .map(|&y| {
            let mut acc = 0.5;
            let (ws, wc) = (-du * y).sin_cos();
            let step = Complex64::new(wc, ws);
            let mut rot = step;
            for (k, phi) in phis.iter().enumerate() {
                // rotation by recurrence, resynchronised every 64 steps
                if k % 64 == 63 {
                    let (s, c) = (-((k + 1) as f64) * du * y).sin_cos();
                    rot = Complex64::new(c, s);
                }
                acc += (phi * rot).re;
                rot *= step;
            }
            acc * du * FRAC_1_PI / map.scale
        })
        .collect();
    Ok(out)
}

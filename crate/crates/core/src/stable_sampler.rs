//! Exact sampling of stable laws with the Chambers–Mallows–Stuck construction.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::params::{
    is_alpha_one, levy_to_stable, standardize, validate, AffineMap, StableLevyTriplet,
    StableParams,
};
use crate::rng::RngStream;

/// Sampler for `S_α(1, β, 0)` with the trigonometric constants precomputed.
#[derive(Debug, Clone, Copy)]
pub struct StandardStable {
    alpha: f64,
    beta: f64,
    kind: Branch,
}

#[derive(Debug, Clone, Copy)]
enum Branch {
    General { theta: f64, alpha_theta: f64, scale: f64, exponent: f64 },
    AlphaOne,
    Gaussian,
}

impl StandardStable {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = StableParams::standard(alpha, beta)?;
        let kind = if p.alpha == 2.0 {
            Branch::Gaussian
        } else if is_alpha_one(alpha) {
            Branch::AlphaOne
        } else {
            let theta = (beta * (FRAC_PI_2 * alpha).tan()).atan() / alpha;
            let alpha_theta = alpha * theta;
            Branch::General {
                theta,
                alpha_theta,
                scale: alpha_theta.cos().powf(-1.0 / alpha),
                exponent: (1.0 - alpha) / alpha,
            }
        };
        Ok(StandardStable { alpha: p.alpha, beta: p.beta, kind })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The deterministic map from `U ∈ (−π/2, π/2)` and `V > 0` to a draw.
    /// Not meaningful for α = 2, which samples through Box–Muller.
    pub fn transform(&self, u: f64, v: f64) -> f64 {
        match self.kind {
            Branch::General { theta, alpha_theta, scale, exponent } => {
                let a = self.alpha;
                let numerator = (a * (theta + u)).sin();
                let base = scale * u.cos().powf(-1.0 / a);
                numerator * base * ((alpha_theta + (a - 1.0) * u).cos() / v).powf(exponent)
            }
            Branch::AlphaOne => {
                let b = self.beta;
                let tilt = FRAC_PI_2 + b * u;
                FRAC_2_PI * (tilt * u.tan() - b * ((FRAC_PI_2 * v * u.cos()) / tilt).ln())
            }
            Branch::Gaussian => f64::NAN,
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        match self.kind {
            Branch::Gaussian => {
                // S_2(1, 0, 0) = N(0, 2)
                let r = (-2.0 * rng.uniform().ln()).sqrt();
                std::f64::consts::SQRT_2 * r * (2.0 * PI * rng.uniform()).cos()
            }
            _ => {
                let u = rng.uniform_angle();
                let v = rng.exponential();
                self.transform(u, v)
            }
        }
    }
}

/// Sampler for a general `S_α(σ, β, δ)`: a standard draw followed by the
/// standardizing affine map.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    standard: StandardStable,
    map: AffineMap,
}

impl StableSampler {
    pub fn new(p: &StableParams) -> Result<Self> {
        let p = validate(*p)?;
        if p.sigma == 0.0 {
            return Err(Error::domain("sigma", "sampling needs σ > 0"));
        }
        let (z, map) = standardize(&p)?;
        Ok(StableSampler { standard: StandardStable::new(z.alpha, z.beta)?, map })
    }

    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        self.map.apply(self.standard.draw(rng))
    }
}

/// One draw from `S_α(1, β, 0)`.
pub fn sample_standard(alpha: f64, beta: f64, rng: &mut RngStream) -> Result<f64> {
    Ok(StandardStable::new(alpha, beta)?.draw(rng))
}

/// One draw from `p`.
pub fn sample(p: &StableParams, rng: &mut RngStream) -> Result<f64> {
    Ok(StableSampler::new(p)?.draw(rng))
}

/// One draw from `S_α(1, β, 0)` built from two independent totally skewed
/// `S_α(1, 1, 0)` variables.
pub fn sample_from_skewed_pair(alpha: f64, beta: f64, rng: &mut RngStream) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain("alpha", format!("{alpha} not in (0, 2)")));
    }
    let skewed = StandardStable::new(alpha, 1.0)?;
    StableParams::standard(alpha, beta)?;
    let y1 = skewed.draw(rng);
    let y2 = skewed.draw(rng);
    let up = 0.5 * (1.0 + beta);
    let down = 0.5 * (1.0 - beta);
    if is_alpha_one(alpha) {
        let xlogx = |w: f64| if w > 0.0 { w * w.ln() } else { 0.0 };
        Ok(up * y1 - down * y2 + FRAC_2_PI * (xlogx(up) - xlogx(down)))
    } else {
        Ok(up.powf(1.0 / alpha) * y1 - down.powf(1.0 / alpha) * y2)
    }
}

/// Draws increments `X_Δ` of a stable Lévy process from unit-time draws and
/// the self-similarity transform.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    unit: StableSampler,
    factor: f64,
    offset: f64,
}

impl IncrementSampler {
    pub fn new(t: &StableLevyTriplet, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain("delta", format!("time step {dt} must be positive")));
        }
        let p = levy_to_stable(t)?;
        let (factor, offset) = if is_alpha_one(p.alpha) {
            (dt, FRAC_2_PI * p.beta * p.sigma * dt * dt.ln())
        } else {
            let f = dt.powf(1.0 / p.alpha);
            (f, (dt - f) * p.delta)
        };
        Ok(IncrementSampler { unit: StableSampler::new(&p)?, factor, offset })
    }

    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        self.factor * self.unit.draw(rng) + self.offset
    }
}

/// One increment over a step of length `dt`.
pub fn sample_increment(t: &StableLevyTriplet, dt: f64, rng: &mut RngStream) -> Result<f64> {
    Ok(IncrementSampler::new(t, dt)?.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_maps_to_zero_for_symmetric() {
        let cauchy = StandardStable::new(1.0, 0.0).unwrap();
        assert_eq!(cauchy.transform(0.0, 0.7), 0.0);
        for &a in &[0.3, 0.8, 1.5, 1.9] {
            let s = StandardStable::new(a, 0.0).unwrap();
            assert_eq!(s.transform(0.0, 1.3), 0.0);
        }
    }

    #[test]
    fn cauchy_is_tan_of_angle() {
        let p = StableParams::new(1.0, 1.0, 0.0, 2.5).unwrap();
        let mut a = RngStream::new(9, 0);
        let mut b = RngStream::new(9, 0);
        for _ in 0..100 {
            let x = sample(&p, &mut a).unwrap();
            let u = b.uniform_angle();
            b.exponential();
            assert!((x - (2.5 + u.tan())).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn unit_params_match_standard_sampler() {
        let p = StableParams::new(1.3, 1.0, 0.4, 0.0).unwrap();
        let mut a = RngStream::new(10, 0);
        let mut b = RngStream::new(10, 0);
        for _ in 0..100 {
            assert_eq!(sample(&p, &mut a).unwrap(), sample_standard(1.3, 0.4, &mut b).unwrap());
        }
    }

    #[test]
    fn gaussian_variance_is_two_sigma_squared() {
        let p = StableParams::new(2.0, 1.0, 0.0, 0.0).unwrap();
        let s = StableSampler::new(&p).unwrap();
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| s.draw(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // SE of the sample variance for a Gaussian: σ²√(2/(n−1))
        let se = 2.0 * (2.0 / (n - 1) as f64).sqrt();
        assert!((var - 2.0).abs() < 3.0 * se, "var = {var}");
    }

    #[test]
    fn fully_skewed_pair_equals_first_draw() {
        let mut a = RngStream::new(12, 0);
        let mut b = RngStream::new(12, 0);
        let skewed = StandardStable::new(1.4, 1.0).unwrap();
        for _ in 0..50 {
            let x = sample_from_skewed_pair(1.4, 1.0, &mut a).unwrap();
            let y1 = skewed.draw(&mut b);
            skewed.draw(&mut b);
            assert!((x - y1).abs() <= 1e-12 * y1.abs().max(1.0));
        }
    }

    #[test]
    fn symmetric_pair_weights() {
        let mut a = RngStream::new(13, 0);
        let mut b = RngStream::new(13, 0);
        let skewed = StandardStable::new(1.5, 1.0).unwrap();
        let w = 2f64.powf(-1.0 / 1.5);
        for _ in 0..50 {
            let x = sample_from_skewed_pair(1.5, 0.0, &mut a).unwrap();
            let y1 = skewed.draw(&mut b);
            let y2 = skewed.draw(&mut b);
            assert!((x - w * (y1 - y2)).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn unit_step_increment_is_unit_draw() {
        let t = StableLevyTriplet::new(1.0, 0.7, 0.2, 0.1).unwrap();
        let p = levy_to_stable(&t).unwrap();
        let mut a = RngStream::new(14, 0);
        let mut b = RngStream::new(14, 0);
        for _ in 0..50 {
            let x = sample_increment(&t, 1.0, &mut a).unwrap();
            let y = sample(&p, &mut b).unwrap();
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn strictly_stable_increment_scales() {
        // P = Q gives δ = 0, so the increment is Δ^{1/α}·Y
        let t = StableLevyTriplet::new(1.5, 0.5, 0.5, 0.0).unwrap();
        let p = levy_to_stable(&t).unwrap();
        let mut a = RngStream::new(15, 0);
        let mut b = RngStream::new(15, 0);
        let dt: f64 = 0.3;
        for _ in 0..50 {
            let x = sample_increment(&t, dt, &mut a).unwrap();
            let y = sample(&p, &mut b).unwrap();
            assert!((x - dt.powf(1.0 / 1.5) * y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn positive_support_for_subordinator_draws() {
        let mut rng = RngStream::new(16, 0);
        for &a in &[0.2, 0.5, 0.9] {
            let bound = -(FRAC_PI_2 * a).tan() - 1e-12;
            for _ in 0..20_000 {
                let x = sample_standard(a, 1.0, &mut rng).unwrap();
                assert!(x >= bound);
                assert!(x >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RngStream::new(0, 0);
        assert!(sample_standard(0.0, 0.0, &mut rng).is_err());
        assert!(sample_standard(1.2, 1.1, &mut rng).is_err());
        assert!(sample_from_skewed_pair(2.0, 0.0, &mut rng).is_err());
        let t = StableLevyTriplet::new(1.2, 1.0, 1.0, 0.0).unwrap();
        assert!(sample_increment(&t, 0.0, &mut rng).is_err());
    }
}

//! Gamma-function helpers on top of `statrs`.

use statrs::function::gamma;

pub use statrs::function::erf::erfc;

/// Euler–Gamma function, valid for negative non-integer arguments as well.
pub fn gamma(x: f64) -> f64 {
    gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

/// Upper incomplete gamma function Γ(s, x) = ∫ₓ^∞ t^{s−1} e^{−t} dt for x > 0.
///
/// Negative non-integer `s` is reached through Γ(s+1, x) = sΓ(s, x) + x^s e^{−x}.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> f64 {
    assert!(x > 0.0, "upper incomplete gamma needs x > 0");
    if s > 0.0 {
        gamma::gamma_ur(s, x) * gamma::gamma(s)
    } else if s == 0.0 {
        exp_integral_e1(x)
    } else {
        (upper_incomplete_gamma(s + 1.0, x) - x.powf(s) * (-x).exp()) / s
    }
}

/// Exponential integral E₁(x) = Γ(0, x).
fn exp_integral_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum -= term / k as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
        -EULER - x.ln() + sum
    } else {
        // modified Lentz continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..300 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

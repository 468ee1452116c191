//! Goodness-of-fit machinery: histograms, Kolmogorov–Smirnov distances,
//! empirical characteristic functions and tail-slope estimates.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod_21, integrate, Tolerance};

/// One-sample KS multiplier, close to the asymptotic 99.9% point 1.949.
pub const KS_MULTIPLIER: f64 = 1.95;

/// Standard deviation of the Kolmogorov limit law, `√(π²/12 − (π/2) ln² 2)`.
const KOLMOGOROV_SD: f64 = 0.260_318_440_905_051;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Number of samples that fell inside the edges.
    pub total: u64,
}

impl Histogram {
    /// Counts samples into `[e₀, e₁), …, [e_{k−1}, e_k]`; samples outside are dropped.
    pub fn new(samples: &[f64], bin_edges: Vec<f64>) -> Result<Self> {
        if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("bin_edges", "need at least two strictly increasing edges"));
        }
        let bins = bin_edges.len() - 1;
        let mut counts = vec![0u64; bins];
        let last = *bin_edges.last().unwrap();
        for &x in samples {
            if !(x >= bin_edges[0] && x <= last) {
                continue;
            }
            // index of the first edge strictly greater than x, minus one
            let k = bin_edges.partition_point(|&e| e <= x).saturating_sub(1);
            counts[k.min(bins - 1)] += 1;
        }
        let total = counts.iter().sum();
        Ok(Histogram { bin_edges, counts, total })
    }

    /// `bins` equal-width bins over `[lo, hi]`.
    pub fn uniform(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) {
            return Err(Error::domain("bins", "need bins ≥ 1 and lo < hi"));
        }
        let edges = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
        Self::new(samples, edges)
    }
}

/// Outcome of one goodness-of-fit check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl GofReport {
    pub fn new(statistic: f64, n: usize, threshold: f64) -> Self {
        GofReport { statistic, n, threshold, pass: statistic <= threshold }
    }

    pub fn one_sample_ks(statistic: f64, n: usize) -> Self {
        Self::new(statistic, n, ks_threshold(n))
    }

    pub fn two_sample_ks(statistic: f64, n: usize, m: usize) -> Self {
        Self::new(statistic, n + m, ks_threshold_two_sample(n, m))
    }
}

/// `1.95/√n`.
pub fn ks_threshold(n: usize) -> f64 {
    KS_MULTIPLIER / (n as f64).sqrt()
}

/// `1.95·√((n+m)/(nm))`.
pub fn ks_threshold_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_MULTIPLIER * ((n + m) / (n * m)).sqrt()
}

/// Approximate standard deviation of a one-sample KS statistic under the null.
pub fn ks_standard_error(n: usize) -> f64 {
    KOLMOGOROV_SD / (n as f64).sqrt()
}

fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup |F_N − F|` evaluated on both sides of every sample.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if samples.windows(2).all(|w| w[0] <= w[1]) {
        ks_from_cdf_values(&samples.iter().map(|&x| cdf(x)).collect::<Vec<_>>())
    } else {
        let s = sorted_copy(samples);
        ks_from_cdf_values(&s.iter().map(|&x| cdf(x)).collect::<Vec<_>>())
    }
}

/// KS statistic from the reference CDF evaluated at the sorted samples.
pub fn ks_from_cdf_values(cdf_values: &[f64]) -> Result<f64> {
    if cdf_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = cdf_values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &f) in cdf_values.iter().enumerate() {
        let below = i as f64 / n;
        let above = (i + 1) as f64 / n;
        d = d.max((f - below).abs()).max((above - f).abs());
    }
    Ok(d)
}

/// Two-sample KS statistic `sup |F_a − F_b|`.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let a = sorted_copy(a);
    let b = sorted_copy(b);
    let (n, m) = (a.len() as u128, b.len() as u128);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: u128 = 0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        // |i/n − j/m| on a common integer scale keeps the statistic symmetric
        let gap = (i as u128 * m).abs_diff(j as u128 * n);
        best = best.max(gap);
    }
    Ok(best as f64 / (n * m) as f64)
}

/// Empirical characteristic function at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCf {
    pub u: f64,
    pub value: Complex64,
    pub se_re: f64,
    pub se_im: f64,
}

/// Mean of `e^{iuX}` for each `u`, with Monte-Carlo standard errors of the
/// real and imaginary parts.
pub fn empirical_cf(samples: &[f64], u_grid: &[f64]) -> Result<Vec<EmpiricalCf>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len() as f64;
    Ok(u_grid
        .iter()
        .map(|&u| {
            let (mut sc, mut ss, mut sc2, mut ss2) = (0.0, 0.0, 0.0, 0.0);
            for &x in samples {
                let (s, c) = (u * x).sin_cos();
                sc += c;
                ss += s;
                sc2 += c * c;
                ss2 += s * s;
            }
            let (mc, ms) = (sc / n, ss / n);
            let se = |m2: f64, m: f64| {
                if samples.len() < 2 {
                    0.0
                } else {
                    ((m2 / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt()
                }
            };
            EmpiricalCf { u, value: Complex64::new(mc, ms), se_re: se(sc2, mc), se_im: se(ss2, ms) }
        })
        .collect())
}

/// Least-squares slope of `log(1 − F_N(x))` against `log x` over the order
/// statistics between the `q_lo` and `q_hi` empirical quantiles.
pub fn tail_slope(samples: &[f64], q_lo: f64, q_hi: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.5 < q_lo && q_lo < q_hi && q_hi < 1.0) {
        return Err(Error::domain("q_lo", "need 0.5 < q_lo < q_hi < 1"));
    }
    let s = sorted_copy(samples);
    let n = s.len();
    let first = (q_lo * n as f64).ceil() as usize;
    let last = ((q_hi * n as f64).floor() as usize).min(n - 1);
    let points: Vec<(f64, f64)> = (first.max(1)..=last)
        .filter(|&k| s[k - 1] > 0.0)
        .map(|k| (s[k - 1].ln(), (1.0 - k as f64 / n as f64).ln()))
        .collect();
    if points.len() < 100 {
        return Err(Error::InsufficientTail(points.len()));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Histogram-versus-reference comparison over the central region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistComparison {
    /// `sup |bin density − reference bin average|`.
    pub sup_error: f64,
    /// Largest reference bin average in the region.
    pub max_density: f64,
    pub lo: f64,
    pub hi: f64,
}

impl HistComparison {
    pub fn relative_error(&self) -> f64 {
        self.sup_error / self.max_density
    }
}

/// `bins + 1` equal-width edges spanning the central region between the
/// empirical 2.5% and 97.5% quantiles.
pub fn central_edges(samples: &[f64], bins: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins < 10 {
        return Err(Error::domain("bins", "need at least 10 bins"));
    }
    let s = sorted_copy(samples);
    let n = s.len();
    let at = |q: f64| s[((q * (n - 1) as f64).round() as usize).min(n - 1)];
    let (lo, hi) = (at(0.025), at(0.975));
    if !(lo < hi) {
        return Err(Error::domain("samples", "central region is degenerate"));
    }
    Ok((0..=bins).map(|k| (lo * (bins - k) as f64 + hi * k as f64) / bins as f64).collect())
}

/// Compares bin densities on `edges` with reference bin averages given as a
/// function of each bin's end points.
fn compare_bins<R: FnMut(usize, f64, f64) -> Result<f64>>(samples: &[f64], edges: Vec<f64>, mut reference: R) -> Result<HistComparison> {
    let (lo, hi) = (edges[0], *edges.last().unwrap());
    let hist = Histogram::new(samples, edges)?;
    let n = samples.len() as f64;
    let mut sup_error: f64 = 0.0;
    let mut max_density: f64 = 0.0;
    for (k, &count) in hist.counts.iter().enumerate() {
        let (a, b) = (hist.bin_edges[k], hist.bin_edges[k + 1]);
        let expected = reference(k, a, b)?;
        max_density = max_density.max(expected);
        sup_error = sup_error.max((count as f64 / (n * (b - a)) - expected).abs());
    }
    Ok(HistComparison { sup_error, max_density, lo, hi })
}

/// `sup` over central bins of `|bin density − bin-averaged pdf|`. Bin
/// averages are adaptive integrals, since heavy-tailed samples give bins much
/// wider than the density's peak.
pub fn hist_vs_density<F: Fn(f64) -> f64>(samples: &[f64], pdf: F, bins: usize) -> Result<f64> {
    Ok(hist_vs_density_report(samples, pdf, bins)?.sup_error)
}

pub fn hist_vs_density_report<F: Fn(f64) -> f64>(
    samples: &[f64],
    pdf: F,
    bins: usize,
) -> Result<HistComparison> {
    let edges = central_edges(samples, bins)?;
    let tol = Tolerance { abs: 1e-12, rel: 1e-7, max_subdivisions: 400 };
    compare_bins(samples, edges, |_, a, b| Ok(integrate(&pdf, a, b, tol)?.value / (b - a)))
}

/// As [`hist_vs_density_report`] with exact bin averages `(F(b) − F(a))/(b − a)`.
pub fn hist_vs_bin_mass<F: Fn(f64) -> f64>(
    samples: &[f64],
    cdf: F,
    bins: usize,
) -> Result<HistComparison> {
    let edges = central_edges(samples, bins)?;
    let cdf_values: Vec<f64> = edges.iter().map(|&x| cdf(x)).collect();
    hist_vs_edge_cdf(samples, edges, &cdf_values)
}

/// Bin comparison on given `edges` with the reference CDF already evaluated
/// there, for references that are cheaper to evaluate in one batch.
pub fn hist_vs_edge_cdf(samples: &[f64], edges: Vec<f64>, cdf_values: &[f64]) -> Result<HistComparison> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if cdf_values.len() != edges.len() {
        return Err(Error::domain("cdf_values", "need one value per edge"));
    }
    compare_bins(samples, edges, |k, a, b| Ok((cdf_values[k + 1] - cdf_values[k]) / (b - a)))
}

/// Nodes `center + scale·sinh(t)` for `t` uniform, covering `[lo, hi]`;
/// dense near `center` and geometric in the tails.
pub fn sinh_grid(center: f64, scale: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo < hi && scale > 0.0);
    let t0 = ((lo - center) / scale).asinh();
    let t1 = ((hi - center) / scale).asinh();
    let mut v: Vec<f64> = (0..n)
        .map(|k| center + scale * (t0 + (t1 - t0) * k as f64 / (n - 1) as f64).sinh())
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// Tabulated distribution function with cubic Hermite interpolation between
/// nodes, using the density as the derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl CdfTable {
    pub fn from_values(xs: Vec<f64>, cdf: Vec<f64>, pdf: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != cdf.len() || xs.len() != pdf.len() {
            return Err(Error::domain("xs", "need matching node, cdf and pdf vectors"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("xs", "nodes must be strictly increasing"));
        }
        Ok(CdfTable { xs, cdf, pdf })
    }

    /// Integrates `pdf` cell by cell over `nodes`, starting from
    /// `mass_below = F(nodes[0])`.
    pub fn from_pdf<F: FnMut(f64) -> Result<f64>>(nodes: Vec<f64>, mut pdf: F, mass_below: f64) -> Result<Self> {
        let mut failure = None;
        let mut f = |x: f64| match pdf(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let mut cdf = Vec::with_capacity(nodes.len());
        let mut dens = Vec::with_capacity(nodes.len());
        let mut acc = mass_below;
        cdf.push(acc);
        dens.push(f(nodes[0]));
        for w in nodes.windows(2) {
            acc += gauss_kronrod_21(&mut f, w[0], w[1]).0;
            cdf.push(acc);
            dens.push(f(w[1]));
        }
        if let Some(e) = failure {
            return Err(e);
        }
        Self::from_values(nodes, cdf, dens)
    }

    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    /// Interpolated `F(x)`, clamped to the end values outside the nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.cdf[0];
        }
        if x >= self.xs[n - 1] {
            return self.cdf[n - 1];
        }
        let k = self.xs.partition_point(|&e| e <= x) - 1;
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (h00 * self.cdf[k] + h10 * h * self.pdf[k] + h01 * self.cdf[k + 1] + h11 * h * self.pdf[k + 1])
            .clamp(0.0, 1.0)
    }
}

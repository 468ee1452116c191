//! Discrete skeletons of stable and CTS Lévy processes on uniform grids.
//!
//! Increment `i` is drawn from `rng.substream(i)`, so a path depends only on
//! the seed and never on how the work was split across threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::cts::{BilateralSampler, CtsIncrementConfig};
use crate::error::{Error, Result};
use crate::params::{CtsTriplet, StableLevyTriplet};
use crate::rng::RngStream;
use crate::stable_sampler::IncrementSampler;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingGrid {
    pub delta: f64,
    pub n: usize,
    pub origin: f64,
}

impl SamplingGrid {
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        Self::with_origin(delta, n, 0.0)
    }

    pub fn with_origin(delta: f64, n: usize, origin: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::domain("delta", format!("{delta} must be positive")));
        }
        if !origin.is_finite() {
            return Err(Error::domain("origin", "must be finite"));
        }
        Ok(SamplingGrid { delta, n, origin })
    }

    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta
    }

    /// Time of grid point `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub grid: SamplingGrid,
    /// `n + 1` values starting at 0.
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
}

impl Path {
    /// Cumulative sums of `increments` from 0, with Neumaier compensation.
    pub fn from_increments(grid: SamplingGrid, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != grid.n {
            return Err(Error::domain("increments", format!("expected {} increments", grid.n)));
        }
        let mut values = Vec::with_capacity(grid.n + 1);
        values.push(0.0);
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        for &x in &increments {
            let next = sum + x;
            comp += if sum.abs() >= x.abs() { (sum - next) + x } else { (x - next) + sum };
            sum = next;
            values.push(sum + comp);
        }
        Ok(Path { grid, values, increments })
    }
}

fn draw_increments<F>(n: usize, rng: &RngStream, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    (0..n as u64).into_par_iter().map(|i| draw(&mut rng.substream(i))).collect()
}

/// Stable Lévy path: one conversion of the triplet, unit-time draws and the
/// step-size transform.
pub fn simulate_stable_path(t: &StableLevyTriplet, grid: &SamplingGrid, rng: &RngStream) -> Result<Path> {
    let grid = SamplingGrid::with_origin(grid.delta, grid.n, grid.origin)?;
    let sampler = IncrementSampler::new(t, grid.delta)?;
    let increments = draw_increments(grid.n, rng, |r| Ok(sampler.draw(r)))?;
    Path::from_increments(grid, increments)
}

/// CTS path from independent bilateral increments, truncation level `c`
/// (ignored for α < 1).
pub fn simulate_cts_path(t: &CtsTriplet, grid: &SamplingGrid, c: f64, rng: &RngStream) -> Result<Path> {
    let grid = SamplingGrid::with_origin(grid.delta, grid.n, grid.origin)?;
    let sampler = BilateralSampler::new(t, &CtsIncrementConfig::new(grid.delta, c)?)?;
    let increments = draw_increments(grid.n, rng, |r| sampler.draw(r))?;
    Path::from_increments(grid, increments)
}

/// Linear interpolation of the skeleton at absolute time `t`.
pub fn interpolate(path: &Path, t: f64) -> Result<f64> {
    let g = &path.grid;
    let horizon = g.horizon();
    let s = t - g.origin;
    if !(s >= 0.0 && s <= horizon) {
        return Err(Error::OutOfRange { t, horizon });
    }
    if g.n == 0 {
        return Ok(path.values[0]);
    }
    let pos = s / g.delta;
    let k = (pos.floor() as usize).min(g.n - 1);
    let w = pos - k as f64;
    if w == 0.0 {
        return Ok(path.values[k]);
    }
    if w >= 1.0 {
        return Ok(path.values[k + 1]);
    }
    Ok(path.values[k] + w * (path.values[k + 1] - path.values[k]))
}

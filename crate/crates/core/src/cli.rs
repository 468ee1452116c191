//! Command-line front end. Data goes to `--out` (or stdout when absent),
//! summaries to stdout, and errors to stderr as one JSON object per line.
//!
//! Exit codes: 0 success, 1 a `validate` check failed, 2 bad arguments or
//! parameters, 3 a computation failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::cts::{self, BilateralSampler, CtsIncrementConfig, FourierDensityConfig, YPlusSampler};
use crate::error::Error;
use crate::params::{levy_to_stable, marginal_at_time, stable_to_levy, CtsTriplet, StableLevyTriplet, StableParams};
use crate::rng::RngStream;
use crate::stable_density::{self, QuadratureConfig};
use crate::stable_sampler::{sample_from_skewed_pair, IncrementSampler, StableSampler, StandardStable};
use crate::trajectory::{simulate_cts_path, simulate_stable_path, SamplingGrid};
use crate::validation::{ks_distance, ks_from_cdf_values, sinh_grid, two_sample_ks, CdfTable, GofReport};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "LEVY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "levy-lab", version, about = "Stable and tempered stable sampling, paths and densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw from S_α(σ, β, δ).
    SampleStable(SampleStableArgs),
    /// Draw bilateral CTS increments X_Δ.
    SampleCts(SampleCtsArgs),
    /// Simulate a path skeleton on a uniform grid.
    Trajectory(TrajectoryArgs),
    /// Tabulate a density or distribution function.
    Density(DensityArgs),
    /// Convert between Lévy triplet and stable parameters.
    Convert(ConvertArgs),
    /// Tabulate acceptance rate and accuracy of the CTS sampler over truncation levels.
    ExploreC(ExploreCArgs),
    /// Run the goodness-of-fit checks and report them as JSON lines.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct StableFlags {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    /// Location δ.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    location: f64,
}

impl StableFlags {
    fn params(&self) -> Result<StableParams, Error> {
        StableParams::new(self.alpha, self.sigma, self.beta, self.location)
    }
}

#[derive(Debug, Args)]
struct CtsFlags {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Positive-jump mass P.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p: f64,
    /// Positive-jump tempering A.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    /// Negative-jump mass Q.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    q: f64,
    /// Negative-jump tempering B.
    #[arg(long = "b-temper", default_value_t = 0.0, allow_hyphen_values = true)]
    b_temper: f64,
}

impl CtsFlags {
    fn triplet(&self) -> Result<CtsTriplet, Error> {
        CtsTriplet::new(self.alpha, self.p, self.a, self.q, self.b_temper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StableMethod {
    /// Chambers–Mallows–Stuck.
    Cms,
    /// Combination of two totally skewed draws.
    SkewedPair,
}

#[derive(Debug, Args)]
struct SampleStableArgs {
    #[command(flatten)]
    law: StableFlags,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = StableMethod::Cms)]
    method: StableMethod,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SampleCtsArgs {
    #[command(flatten)]
    law: CtsFlags,
    /// Time step Δ.
    #[arg(long)]
    delta: f64,
    /// Truncation level (α > 1 only).
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Process {
    Stable,
    Cts,
}

#[derive(Debug, Args)]
struct TrajectoryArgs {
    #[arg(long, value_enum)]
    process: Process,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    q: f64,
    /// Drift b of the stable triplet.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Positive tempering A (CTS).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    /// Negative tempering B (CTS).
    #[arg(long = "b-temper", default_value_t = 0.0, allow_hyphen_values = true)]
    b_temper: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    n: usize,
    /// Truncation level (CTS with α > 1).
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dist {
    Stable,
    Cts,
    /// Centred one-sided CTS through the stable density (uses --p, --a).
    CtsSkewed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    Pdf,
    Cdf,
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[arg(long, value_enum)]
    dist: Dist,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    location: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    q: f64,
    #[arg(long = "b-temper", default_value_t = 0.0, allow_hyphen_values = true)]
    b_temper: f64,
    /// Time t of the CTS marginal.
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    #[arg(long = "x-min", allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long = "x-max", allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Function::Pdf)]
    function: Function,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    LevyToStable,
    StableToLevy,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long, value_enum, default_value_t = Direction::LevyToStable)]
    direction: Direction,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    q: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    location: f64,
}

#[derive(Debug, Args)]
struct ExploreCArgs {
    #[command(flatten)]
    law: CtsFlags,
    #[arg(long)]
    delta: f64,
    /// Comma-separated truncation levels.
    #[arg(long = "c-grid", value_delimiter = ',', default_value = "1,2,5,10")]
    c_grid: Vec<f64>,
    /// Proposals per side for the acceptance estimate.
    #[arg(long = "n-mc", default_value_t = 100_000)]
    n_mc: usize,
    /// Increments drawn for the KS distance.
    #[arg(long = "n-ks", default_value_t = 20_000)]
    n_ks: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Draws per check.
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Rejected flags or parameters.
    Usage(Error),
    /// Valid input on which a computation failed.
    Compute(Error),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

trait Stage<T> {
    fn usage(self) -> Result<T, Failure>;
    fn compute(self) -> Result<T, Failure>;
}

impl<T> Stage<T> for Result<T, Error> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(Failure::Usage)
    }
    fn compute(self) -> Result<T, Failure> {
        self.map_err(Failure::Compute)
    }
}

/// Rows of floats under named columns.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

/// Shortest representation that parses back to the same value.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_table(table: &Table, output: &Output) -> Result<(), Failure> {
    let mut w = sink(&output.out)?;
    match output.format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&table.headers)?;
            for row in &table.rows {
                csv.write_record(row.iter().map(|&v| fmt(v)))?;
            }
            csv.flush()?;
        }
        Format::Json => {
            for row in &table.rows {
                let mut obj = Map::new();
                for (h, &v) in table.headers.iter().zip(row) {
                    obj.insert((*h).to_string(), json_number(v));
                }
                writeln!(w, "{}", Value::Object(obj))?;
            }
        }
    }
    w.flush()?;
    if let Some(path) = &output.out {
        println!("wrote {} rows to {}", table.rows.len(), path.display());
    }
    Ok(())
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn column(values: Vec<f64>) -> Vec<Vec<f64>> {
    values.into_iter().map(|v| vec![v]).collect()
}

fn check_count(field: &'static str, n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage(Error::OutOfDomain { field, reason: "must be at least 1".into() }));
    }
    Ok(())
}

fn sample_stable(args: &SampleStableArgs) -> Result<(), Failure> {
    let p = args.law.params().usage()?;
    check_count("n", args.n)?;
    let rng = RngStream::new(args.output.seed, 0);
    let draws: Vec<f64> = match args.method {
        StableMethod::Cms => {
            let sampler = StableSampler::new(&p).usage()?;
            (0..args.n as u64).into_par_iter().map(|i| sampler.draw(&mut rng.substream(i))).collect()
        }
        StableMethod::SkewedPair => {
            let (z, map) = crate::params::standardize(&p).usage()?;
            sample_from_skewed_pair(z.alpha, z.beta, &mut rng.substream(0)).usage()?;
            (0..args.n as u64)
                .into_par_iter()
                .map(|i| sample_from_skewed_pair(z.alpha, z.beta, &mut rng.substream(i)).map(|x| map.apply(x)))
                .collect::<Result<_, _>>()
                .compute()?
        }
    };
    write_table(&Table { headers: vec!["x"], rows: column(draws) }, &args.output)
}

fn sample_cts(args: &SampleCtsArgs) -> Result<(), Failure> {
    let t = args.law.triplet().usage()?;
    check_count("n", args.n)?;
    let cfg = CtsIncrementConfig::new(args.delta, args.c).usage()?;
    let sampler = BilateralSampler::new(&t, &cfg).usage()?;
    let rng = RngStream::new(args.output.seed, 0);
    let draws = (0..args.n as u64)
        .into_par_iter()
        .map(|i| sampler.draw(&mut rng.substream(i)))
        .collect::<Result<Vec<f64>, _>>()
        .compute()?;
    write_table(&Table { headers: vec!["x"], rows: column(draws) }, &args.output)
}

fn trajectory(args: &TrajectoryArgs) -> Result<(), Failure> {
    let grid = SamplingGrid::new(args.delta, args.n).usage()?;
    let rng = RngStream::new(args.output.seed, 0);
    let path = match args.process {
        Process::Stable => {
            let t = StableLevyTriplet::new(args.alpha, args.p, args.q, args.b).usage()?;
            IncrementSampler::new(&t, args.delta).usage()?;
            simulate_stable_path(&t, &grid, &rng).compute()?
        }
        Process::Cts => {
            let t = CtsTriplet::new(args.alpha, args.p, args.a, args.q, args.b_temper).usage()?;
            BilateralSampler::new(&t, &CtsIncrementConfig::new(args.delta, args.c).usage()?).usage()?;
            simulate_cts_path(&t, &grid, args.c, &rng).compute()?
        }
    };
    let rows = path.values.iter().enumerate().map(|(k, &x)| vec![grid.time(k), x]).collect();
    write_table(&Table { headers: vec!["t", "x"], rows }, &args.output)
}

fn density(args: &DensityArgs) -> Result<(), Failure> {
    if !(args.x_min <= args.x_max) || !args.x_min.is_finite() || !args.x_max.is_finite() {
        return Err(Failure::Usage(Error::OutOfDomain { field: "x_min", reason: "need finite x_min ≤ x_max".into() }));
    }
    check_count("points", args.points)?;
    let xs: Vec<f64> = if args.points == 1 {
        vec![args.x_min]
    } else {
        let m = (args.points - 1) as f64;
        (0..args.points).map(|k| (args.x_min * (m - k as f64) + args.x_max * k as f64) / m).collect()
    };
    let q = QuadratureConfig::default();
    let values: Vec<f64> = match args.dist {
        Dist::Stable => {
            let p = StableParams::new(args.alpha, args.sigma, args.beta, args.location).usage()?;
            xs.par_iter()
                .map(|&x| match args.function {
                    Function::Pdf => stable_density::pdf(&p, x, &q),
                    Function::Cdf => stable_density::cdf(&p, x, &q),
                })
                .collect::<Result<_, _>>()
                .compute()?
        }
        Dist::Cts => {
            let t = CtsTriplet::new(args.alpha, args.p, args.a, args.q, args.b_temper).usage()?;
            if !(args.time > 0.0) {
                return Err(Failure::Usage(Error::OutOfDomain { field: "time", reason: "must be positive".into() }));
            }
            let cfg = FourierDensityConfig::default();
            match args.function {
                Function::Pdf => cts::pdf_fourier_grid(&t, args.time, &xs, &cfg),
                Function::Cdf => cts::cdf_fourier_grid(&t, args.time, &xs, &cfg),
            }
            .compute()?
        }
        Dist::CtsSkewed => {
            cts::pdf_skewed_via_stable(args.alpha, args.p, args.a, args.time, 0.0, &q).usage()?;
            if args.function == Function::Cdf {
                return Err(Failure::Usage(Error::Unsupported("cdf for cts-skewed; use --dist cts with --q 0".into())));
            }
            xs.par_iter()
                .map(|&x| cts::pdf_skewed_via_stable(args.alpha, args.p, args.a, args.time, x, &q))
                .collect::<Result<_, _>>()
                .compute()?
        }
    };
    let header = match args.function {
        Function::Pdf => "f",
        Function::Cdf => "F",
    };
    let rows = xs.into_iter().zip(values).map(|(x, f)| vec![x, f]).collect();
    write_table(&Table { headers: vec!["x", header], rows }, &args.output)
}

fn convert(args: &ConvertArgs) -> Result<(), Failure> {
    let mut obj = Map::new();
    match args.direction {
        Direction::LevyToStable => {
            let t = StableLevyTriplet::new(args.alpha, args.p, args.q, args.b).usage()?;
            let s = levy_to_stable(&t).usage()?;
            for (k, v) in [("alpha", s.alpha), ("sigma", s.sigma), ("beta", s.beta), ("location", s.delta)] {
                obj.insert(k.into(), json_number(v));
            }
        }
        Direction::StableToLevy => {
            let s = StableParams::new(args.alpha, args.sigma, args.beta, args.location).usage()?;
            let t = stable_to_levy(&s).usage()?;
            for (k, v) in [("alpha", t.alpha), ("p", t.pos_mass), ("q", t.neg_mass), ("b", t.drift)] {
                obj.insert(k.into(), json_number(v));
            }
        }
    }
    println!("{}", Value::Object(obj));
    Ok(())
}

fn explore_c(args: &ExploreCArgs) -> Result<(), Failure> {
    let t = args.law.triplet().usage()?;
    CtsIncrementConfig::new(args.delta, 0.0).usage()?;
    if args.c_grid.is_empty() || args.c_grid.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
        return Err(Failure::Usage(Error::OutOfDomain { field: "c", reason: "need finite non-negative levels".into() }));
    }
    if t.alpha > 1.0 && args.n_mc < 1000 {
        return Err(Failure::Usage(Error::OutOfDomain { field: "n_mc", reason: "need at least 1000".into() }));
    }
    check_count("n_ks", args.n_ks)?;
    let rng = RngStream::new(args.output.seed, 0);
    let rows = cts::explore_c(&t, args.delta, &args.c_grid, args.n_mc, args.n_ks, &FourierDensityConfig::default(), &rng)
        .compute()?;
    let rows = rows.iter().map(|r| vec![r.c, r.mc_acceptance_rate, r.ks_vs_fourier]).collect();
    write_table(&Table { headers: vec!["c", "mc_acceptance_rate", "ks_vs_fourier"], rows }, &args.output)
}

fn par_draws<F>(n: usize, rng: &RngStream, draw: F) -> Result<Vec<f64>, Error>
where
    F: Fn(&mut RngStream) -> Result<f64, Error> + Sync,
{
    (0..n as u64).into_par_iter().map(|i| draw(&mut rng.substream(i))).collect()
}

/// The goodness-of-fit battery behind `validate`, one report per check.
pub fn validation_suite(n: usize, seed: u64) -> Result<Vec<(String, GofReport)>, Error> {
    let q = QuadratureConfig::default();
    let mut reports = Vec::new();
    let mut stream = 0u64;
    let mut next = || {
        stream += 1;
        RngStream::new(seed, stream)
    };

    for (alpha, beta) in [(0.5, 0.0), (1.0, 0.0), (1.5, 0.0), (0.7, 1.0), (1.5, -0.5)] {
        let s = StandardStable::new(alpha, beta)?;
        let xs = par_draws(n, &next(), |r| Ok(s.draw(r)))?;
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let cdf = xs
            .par_iter()
            .map(|&x| stable_density::cdf_standard(alpha, beta, x, &q))
            .collect::<Result<Vec<f64>, _>>()?;
        let d = ks_from_cdf_values(&cdf)?;
        reports.push((format!("cms_ks alpha={alpha} beta={beta}"), GofReport::one_sample_ks(d, n)));
    }

    for (alpha, beta) in [(0.7, 0.5), (1.5, 0.0), (1.5, -1.0)] {
        let s = StandardStable::new(alpha, beta)?;
        let a = par_draws(n, &next(), |r| sample_from_skewed_pair(alpha, beta, r))?;
        let b = par_draws(n, &next(), |r| Ok(s.draw(r)))?;
        reports.push((format!("skewed_pair alpha={alpha} beta={beta}"), GofReport::two_sample_ks(two_sample_ks(&a, &b)?, n, n)));
    }

    for (alpha, dt) in [(0.5, 0.01), (1.5, 1.0)] {
        let t = StableLevyTriplet::new(alpha, 1.0, 0.5, 0.0)?;
        let inc = IncrementSampler::new(&t, dt)?;
        let direct = StableSampler::new(&marginal_at_time(&levy_to_stable(&t)?, dt)?)?;
        let a = par_draws(n, &next(), |r| Ok(inc.draw(r)))?;
        let b = par_draws(n, &next(), |r| Ok(direct.draw(r)))?;
        reports.push((format!("self_similarity alpha={alpha} delta={dt}"), GofReport::two_sample_ks(two_sample_ks(&a, &b)?, n, n)));
    }

    {
        let cfg = CtsIncrementConfig::new(0.1, 0.0)?;
        let y = YPlusSampler::new(0.5, 1.0, 1.0, &cfg)?;
        let lower = -y.centering();
        let nodes = sinh_grid(lower + 1e-3, 1e-3, lower, 40.0, 3000);
        let table = CdfTable::from_pdf(nodes, |x| cts::pdf_skewed_via_stable(0.5, 1.0, 1.0, 0.1, x, &q), 0.0)?;
        let xs = par_draws(n, &next(), |r| y.draw(r))?;
        reports.push(("y_plus_exact alpha=0.5".into(), GofReport::one_sample_ks(ks_distance(&xs, |x| table.eval(x))?, n)));
    }

    {
        let t = CtsTriplet::new(0.5, 1.7, 1.0, 0.3, 1.0)?;
        let table = cts::cdf_table_fourier(&t, 0.1, 4000, &FourierDensityConfig::default())?;
        let sampler = BilateralSampler::new(&t, &CtsIncrementConfig::new(0.1, 0.0)?)?;
        let xs = par_draws(n, &next(), |r| sampler.draw(r))?;
        reports.push(("cts_bilateral alpha=0.5".into(), GofReport::one_sample_ks(ks_distance(&xs, |x| table.eval(x))?, n)));
    }
    Ok(reports)
}

fn validate(args: &ValidateArgs) -> Result<bool, Failure> {
    if args.n < 100 {
        return Err(Failure::Usage(Error::OutOfDomain { field: "n", reason: "need at least 100 draws".into() }));
    }
    let reports = validation_suite(args.n, args.seed).compute()?;
    let mut w = sink(&args.out)?;
    let mut all = true;
    for (name, r) in &reports {
        all &= r.pass;
        let mut obj = Map::new();
        obj.insert("check".into(), Value::String(name.clone()));
        if let Value::Object(fields) = serde_json::to_value(r).map_err(io::Error::other)? {
            obj.extend(fields);
        }
        writeln!(w, "{}", Value::Object(obj))?;
    }
    w.flush()?;
    let failed = reports.iter().filter(|(_, r)| !r.pass).count();
    eprintln!("{} checks, {} failed", reports.len(), failed);
    Ok(all)
}

fn report(kind: &str, message: String) {
    let mut obj = Map::new();
    obj.insert("error".into(), Value::String(kind.into()));
    obj.insert("message".into(), Value::String(message));
    eprintln!("{}", Value::Object(obj));
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            Failure::Usage(Error::OutOfDomain { field: "LEVY_LAB_THREADS", reason: format!("`{v}` is not a positive integer") })
        })?;
        // fails only if a global pool already exists, which then keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::SampleStable(a) => sample_stable(a).map(|()| true),
        Command::SampleCts(a) => sample_cts(a).map(|()| true),
        Command::Trajectory(a) => trajectory(a).map(|()| true),
        Command::Density(a) => density(a).map(|()| true),
        Command::Convert(a) => convert(a).map(|()| true),
        Command::ExploreC(a) => explore_c(a).map(|()| true),
        Command::Validate(a) => validate(a),
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(e)) => {
            report(e.kind(), e.to_string());
            2
        }
        Err(Failure::Compute(e)) => {
            report(e.kind(), e.to_string());
            3
        }
        Err(Failure::Io(e)) => {
            report("Io", e.to_string());
            3
        }
    }
}

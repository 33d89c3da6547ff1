//! Monte Carlo density sweeps and success-rate estimation.
//!
//! Every `(density, repetition)` point gets its own formula seed derived from
//! the base seed, so a point can be rerun alone and results never depend on
//! how jobs were scheduled. Rows are emitted point by point in
//! `(density, repetition, algorithm)` order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{run_baseline, Baseline, BaselineConfig};
use crate::formula::{Assignment, Formula};
use crate::generator::{mix64, sample_formula, GeneratorConfig, GeneratorError};
use crate::instrumentation::PhaseStats;
use crate::occurrences::{OccurrenceIndex, TooManyClauses};
use crate::parallel::map_tasks;
use crate::solver::{fix_solve_with, FixError, FixOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Fix,
    Uc,
    Sc,
    Walksat,
    Pl,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Fix,
        Algorithm::Uc,
        Algorithm::Sc,
        Algorithm::Walksat,
        Algorithm::Pl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fix => "FIX",
            Algorithm::Uc => "UC",
            Algorithm::Sc => "SC",
            Algorithm::Walksat => "WALKSAT",
            Algorithm::Pl => "PL",
        }
    }

    pub fn baseline(self) -> Option<Baseline> {
        match self {
            Algorithm::Fix => None,
            Algorithm::Uc => Some(Baseline::UnitClause),
            Algorithm::Sc => Some(Baseline::ShortestClause),
            Algorithm::Walksat => Some(Baseline::Walksat),
            Algorithm::Pl => Some(Baseline::PureLiteral),
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown algorithm {0:?} (expected fix, uc, sc, walksat or pl)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("density grid is empty")]
    NoDensities,
    #[error("densities must be finite and positive, got {0}")]
    BadDensity(f64),
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("max_flips must be at least 1")]
    BadFlipBudget,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Occurrences(#[from] TooManyClauses),
    #[error(transparent)]
    Solver(#[from] FixError),
    #[error("no rows at density {density} for {algorithm}")]
    EmptySelection { density: f64, algorithm: Algorithm },
    #[error("writing results: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing results: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing results: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k: usize,
    pub n: usize,
    pub densities: Vec<f64>,
    pub repetitions: usize,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
    /// Worker threads; `0` picks the machine's parallelism.
    pub threads: usize,
    /// Walksat budget; `None` means `50·n·k`.
    pub max_flips: Option<u64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.repetitions == 0 {
            return Err(SweepError::NoRepetitions);
        }
        if self.densities.is_empty() {
            return Err(SweepError::NoDensities);
        }
        if let Some(&d) = self.densities.iter().find(|d| !d.is_finite() || **d <= 0.0) {
            return Err(SweepError::BadDensity(d));
        }
        if self.algorithms.is_empty() {
            return Err(SweepError::NoAlgorithms);
        }
        if self.max_flips == Some(0) {
            return Err(SweepError::BadFlipBudget);
        }
        GeneratorConfig::with_density(self.n, self.k, self.densities[0], 0)?;
        Ok(())
    }
}

/// `base ⊕ hash(k, n, density, rep)`.
pub fn instance_seed(base: u64, k: usize, n: usize, density: f64, rep: usize) -> u64 {
    let h = mix64(mix64(mix64(k as u64) ^ n as u64) ^ density.to_bits());
    base ^ mix64(h ^ mix64(rep as u64))
}

/// Seed handed to a randomized solver on the formula drawn from `instance`.
pub fn solver_seed(instance: u64, algorithm: Algorithm) -> u64 {
    mix64(instance ^ mix64(algorithm.tag()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub algorithm: Algorithm,
    /// Formula seed of the point.
    pub seed: u64,
    pub success: bool,
    pub runtime_ms: f64,
    pub phase_stats: Option<PhaseStats>,
    pub failure_reason: Option<String>,
    pub assignment_hash: Option<String>,
}

/// Solve one formula with one algorithm and record the outcome.
pub fn solve_row(
    formula: &Formula,
    occ: &OccurrenceIndex,
    algorithm: Algorithm,
    seed: u64,
    density: f64,
    max_flips: Option<u64>,
) -> Result<ResultRow, SweepError> {
    let start = Instant::now();
    let (result, phase_stats): (Result<Assignment, String>, _) = match algorithm.baseline() {
        None => {
            let out = fix_solve_with(formula, Some(occ), FixOptions::default())?;
            (
                out.result.map_err(|f| f.reason().to_string()),
                Some(out.stats),
            )
        }
        Some(b) => {
            let config = BaselineConfig {
                algorithm: b,
                seed: solver_seed(seed, algorithm),
                max_flips,
            };
            let out = run_baseline(formula, occ, &config);
            (out.result.map_err(|f| f.reason().to_string()), None)
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ResultRow {
        k: formula.k(),
        n: formula.n(),
        m: formula.m(),
        density,
        algorithm,
        seed,
        success: result.is_ok(),
        runtime_ms,
        phase_stats,
        assignment_hash: result.as_ref().ok().map(Assignment::digest),
        failure_reason: result.err(),
    })
}

/// All rows of one `(density, rep)` point, in algorithm order.
pub fn run_point(
    config: &SweepConfig,
    density: f64,
    rep: usize,
) -> Result<Vec<ResultRow>, SweepError> {
    let seed = instance_seed(config.base_seed, config.k, config.n, density, rep);
    let formula = sample_formula(&GeneratorConfig::with_density(
        config.n, config.k, density, seed,
    )?)?;
    let occ = OccurrenceIndex::build(&formula)?;
    config
        .algorithms
        .iter()
        .map(|&a| solve_row(&formula, &occ, a, seed, density, config.max_flips))
        .collect()
}

/// Run the sweep, handing each row to `sink` as soon as its density point is
/// complete. Returns all rows.
pub fn run_sweep<S>(config: &SweepConfig, mut sink: S) -> Result<Vec<ResultRow>, SweepError>
where
    S: FnMut(&[ResultRow]) -> Result<(), SweepError>,
{
    config.validate()?;
    let mut all = Vec::new();
    let reps: Vec<usize> = (0..config.repetitions).collect();
    for &density in &config.densities {
        let point = map_tasks(&reps, config.threads, |&rep| {
            run_point(config, density, rep)
        });
        let mut rows = Vec::with_capacity(reps.len() * config.algorithms.len());
        for r in point {
            rows.extend(r?);
        }
        sink(&rows)?;
        all.extend(rows);
    }
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" | "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "k",
    "n",
    "m",
    "density",
    "algorithm",
    "seed",
    "success",
    "runtime_ms",
    "phase_stats",
    "failure_reason",
    "assignment_hash",
];

/// Streams rows as CSV (fixed header, phase stats as embedded JSON) or as
/// JSON lines, flushing after every batch.
pub struct RowWriter<W: Write> {
    inner: Sink<W>,
}

enum Sink<W: Write> {
    Csv(Box<csv::Writer<W>>),
    Jsonl(W),
}

impl<W: Write> RowWriter<W> {
    pub fn new(out: W, format: OutputFormat) -> Result<Self, SweepError> {
        let inner = match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(CSV_HEADER)?;
                w.flush()?;
                Sink::Csv(Box::new(w))
            }
            OutputFormat::Jsonl => Sink::Jsonl(out),
        };
        Ok(RowWriter { inner })
    }

    pub fn write_rows(&mut self, rows: &[ResultRow]) -> Result<(), SweepError> {
        match &mut self.inner {
            Sink::Csv(w) => {
                for r in rows {
                    let stats = r
                        .phase_stats
                        .as_ref()
                        .map(serde_json::to_string)
                        .transpose()?;
                    w.write_record([
                        r.k.to_string(),
                        r.n.to_string(),
                        r.m.to_string(),
                        r.density.to_string(),
                        r.algorithm.to_string(),
                        r.seed.to_string(),
                        r.success.to_string(),
                        format!("{:.3}", r.runtime_ms),
                        stats.unwrap_or_default(),
                        r.failure_reason.clone().unwrap_or_default(),
                        r.assignment_hash.clone().unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
            }
            Sink::Jsonl(w) => {
                for r in rows {
                    serde_json::to_writer(&mut *w, r)?;
                    w.write_all(b"\n")?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, SweepError> {
        match self.inner {
            Sink::Csv(w) => (*w)
                .into_inner()
                .map_err(|e| SweepError::Io(e.into_error())),
            Sink::Jsonl(w) => Ok(w),
        }
    }
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub density: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub successes: usize,
    pub fraction: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn estimate_success_rate(
    rows: &[ResultRow],
    density: f64,
    algorithm: Algorithm,
) -> Result<SuccessEstimate, SweepError> {
    let selected = rows
        .iter()
        .filter(|r| r.density == density && r.algorithm == algorithm);
    let (trials, successes) = selected.fold((0, 0), |(t, s), r| (t + 1, s + r.success as usize));
    if trials == 0 {
        return Err(SweepError::EmptySelection { density, algorithm });
    }
    let (lower, upper) = wilson_interval(successes, trials, Z95);
    Ok(SuccessEstimate {
        density,
        algorithm,
        trials,
        successes,
        fraction: successes as f64 / trials as f64,
        lower,
        upper,
    })
}

/// One estimate per `(density, algorithm)` present in `rows`, ordered by
/// first appearance of the density and then by algorithm.
pub fn summarize(rows: &[ResultRow]) -> Vec<SuccessEstimate> {
    let mut densities: Vec<f64> = Vec::new();
    let mut points: Vec<(usize, Algorithm)> = Vec::new();
    for r in rows {
        let d = match densities.iter().position(|&x| x == r.density) {
            Some(d) => d,
            None => {
                densities.push(r.density);
                densities.len() - 1
            }
        };
        if !points.contains(&(d, r.algorithm)) {
            points.push((d, r.algorithm));
        }
    }
    points.sort_unstable();
    points
        .iter()
        .map(|&(d, a)| estimate_success_rate(rows, densities[d], a).expect("point has rows"))
        .collect()
}

/// Where an algorithm's success fraction crosses 1/2 on a density grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    /// Already below 1/2 at the smallest density.
    BelowGrid(f64),
    /// Linear interpolation between the last point at or above 1/2 and the next.
    At(f64),
    /// Never below 1/2 on the grid.
    AboveGrid(f64),
}

impl Crossover {
    pub fn density(self) -> f64 {
        match self {
            Crossover::BelowGrid(d) | Crossover::At(d) | Crossover::AboveGrid(d) => d,
        }
    }
}

/// Empirical 50%-success density of `algorithm`; `None` without rows.
pub fn crossover_density(estimates: &[SuccessEstimate], algorithm: Algorithm) -> Option<Crossover> {
    let mut curve: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|e| e.algorithm == algorithm)
        .map(|e| (e.density, e.fraction))
        .collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    let &(first_d, first_f) = curve.first()?;
    if first_f < 0.5 {
        return Some(Crossover::BelowGrid(first_d));
    }
    for w in curve.windows(2) {
        let ((d0, f0), (d1, f1)) = (w[0], w[1]);
        if f1 < 0.5 {
            return Some(Crossover::At(d0 + (d1 - d0) * (f0 - 0.5) / (f0 - f1)));
        }
    }
    Some(Crossover::AboveGrid(curve.last().unwrap().0))
}

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use fixsat::baselines::{run_baseline, BaselineConfig};
use fixsat::dimacs::{format_assignment, parse_assignment, write_dimacs_to};
use fixsat::sweep::{
    crossover_density, run_sweep, summarize, Algorithm, Crossover, OutputFormat, RowWriter,
    SweepConfig,
};
use fixsat::{
    fix_solve_with, parse_dimacs, sample_formula, unsatisfied_indices, Assignment, FixOptions,
    Formula, GeneratorConfig, OccurrenceIndex,
};

const EXIT_SOLVED: u8 = 10;
const EXIT_FAILED: u8 = 20;

#[derive(Parser)]
#[command(
    name = "fixsat",
    version,
    about = "Random k-SAT generation, solving and density sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a uniform random k-SAT formula as DIMACS.
    Gen(GenArgs),
    /// Solve a DIMACS formula (exit 10 solved, 20 failed).
    Solve(SolveArgs),
    /// Success rates over a density grid.
    Sweep(SweepArgs),
    /// Check an assignment against a formula (exit 10 satisfied, 20 not).
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Number of clauses.
    #[arg(long, conflicts_with = "density", required_unless_present = "density")]
    m: Option<usize>,
    /// Clauses per variable; m = floor(density * n).
    #[arg(long)]
    density: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// fix, uc, sc, walksat or pl.
    #[arg(long, default_value = "fix")]
    algo: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Walksat flip budget (default 50*n*k).
    #[arg(long)]
    max_flips: Option<u64>,
    /// Write the Phase-1 selections of a fix run as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Explicit density grid, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "step"])]
    densities: Vec<f64>,
    /// Grid start (with --to and --step).
    #[arg(long, requires_all = ["to", "step"])]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "fix,uc,sc")]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "FIXSAT_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    max_flips: Option<u64>,
    /// Stream rows to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// File with `v` lines or bare signed literals.
    #[arg(long)]
    assignment: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a).map(|()| ExitCode::SUCCESS),
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a).map(|()| ExitCode::SUCCESS),
        Command::Validate(a) => validate(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}

fn create(path: &Path, force: bool) -> Result<File> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    opts.open(path).with_context(|| {
        if !force && path.exists() {
            format!("{} exists (pass --force to overwrite)", path.display())
        } else {
            format!("creating {}", path.display())
        }
    })
}

fn gen(args: GenArgs) -> Result<()> {
    let config = match (args.m, args.density) {
        (Some(m), _) => GeneratorConfig::new(args.n, args.k, m, args.seed)?,
        (None, Some(d)) => GeneratorConfig::with_density(args.n, args.k, d, args.seed)?,
        (None, None) => bail!("one of --m or --density is required"),
    };
    let formula = sample_formula(&config)?;
    let comments = vec![format!("fixsat-gen {}", serde_json::to_string(&config)?)];
    match &args.out {
        Some(path) => {
            let mut out = BufWriter::new(create(path, args.force)?);
            write_dimacs_to(&formula, &comments, &mut out)?;
            out.flush()?;
        }
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            write_dimacs_to(&formula, &comments, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn read_formula(path: &Path) -> Result<Formula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let formula = read_formula(&args.input)?;
    ensure!(args.max_flips != Some(0), "--max-flips must be at least 1");
    ensure!(
        args.trace.is_none() || args.algo == Algorithm::Fix,
        "--trace is only available for --algo fix"
    );
    let occ = OccurrenceIndex::build(&formula)?;
    let result: Result<Assignment, String> = match args.algo.baseline() {
        None => {
            let options = FixOptions {
                trace: args.trace.is_some(),
            };
            let outcome = fix_solve_with(&formula, Some(&occ), options)?;
            if let (Some(path), Some(trace)) = (&args.trace, &outcome.trace) {
                let mut out = BufWriter::new(create(path, true)?);
                for record in trace {
                    serde_json::to_writer(&mut out, record)?;
                    out.write_all(b"\n")?;
                }
                out.flush()?;
            }
            println!("c stats {}", serde_json::to_string(&outcome.stats)?);
            outcome.result.map_err(|f| format!("{} ({f})", f.reason()))
        }
        Some(baseline) => {
            let config = BaselineConfig {
                algorithm: baseline,
                seed: args.seed,
                max_flips: args.max_flips,
            };
            let outcome = run_baseline(&formula, &occ, &config);
            println!("c steps {}", outcome.steps);
            outcome.result.map_err(|f| format!("{} ({f})", f.reason()))
        }
    };
    match result {
        Ok(assignment) => {
            ensure!(
                unsatisfied_indices(&formula, &assignment).is_empty(),
                "internal error: {} returned a non-satisfying assignment",
                args.algo
            );
            println!("s SATISFIABLE");
            print!("{}", format_assignment(&assignment));
            Ok(ExitCode::from(EXIT_SOLVED))
        }
        Err(reason) => {
            println!("c FAIL {reason}");
            println!("s UNKNOWN");
            Ok(ExitCode::from(EXIT_FAILED))
        }
    }
}

fn density_grid(args: &SweepArgs) -> Result<Vec<f64>> {
    if !args.densities.is_empty() {
        return Ok(args.densities.clone());
    }
    let (Some(from), Some(to), Some(step)) = (args.from, args.to, args.step) else {
        bail!("give --densities or all of --from, --to and --step");
    };
    ensure!(
        step > 0.0 && to >= from,
        "need --step > 0 and --to >= --from"
    );
    // Grid points are computed from their index to avoid accumulating rounding error.
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let config = SweepConfig {
        k: args.k,
        n: args.n,
        densities: density_grid(&args)?,
        repetitions: args.reps,
        algorithms: args.algos.clone(),
        base_seed: args.seed,
        threads: args.threads,
        max_flips: args.max_flips,
    };
    config.validate()?;
    let mut writer = match &args.out {
        Some(path) => Some(RowWriter::new(
            BufWriter::new(create(path, args.force)?),
            args.format,
        )?),
        None => None,
    };
    let rows = run_sweep(&config, |batch| {
        if let Some(w) = writer.as_mut() {
            w.write_rows(batch)?;
        }
        let d = batch[0].density;
        eprintln!("density {d}: {} runs done", batch.len());
        Ok(())
    })?;
    if let Some(w) = writer {
        w.into_inner()?.flush()?;
    }

    let summary = summarize(&rows);
    println!(
        "{:>10}  {:<8} {:>9}  {:>8}  {:>17}",
        "density", "algo", "success", "rate", "95% interval"
    );
    for e in &summary {
        println!(
            "{:>10}  {:<8} {:>4}/{:<4}  {:>8.3}  [{:.3}, {:.3}]",
            e.density, e.algorithm, e.successes, e.trials, e.fraction, e.lower, e.upper
        );
    }
    for &a in &config.algorithms {
        match crossover_density(&summary, a) {
            Some(Crossover::At(d)) => println!("{a}: 50% success at density {d:.2}"),
            Some(Crossover::BelowGrid(d)) => println!("{a}: below 50% from density {d}"),
            Some(Crossover::AboveGrid(d)) => println!("{a}: at least 50% up to density {d}"),
            None => {}
        }
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<ExitCode> {
    let formula = read_formula(&args.cnf)?;
    let text = fs::read_to_string(&args.assignment)
        .with_context(|| format!("reading {}", args.assignment.display()))?;
    let assignment = parse_assignment(&text, formula.n())
        .with_context(|| format!("parsing {}", args.assignment.display()))?;
    let unsatisfied = unsatisfied_indices(&formula, &assignment);
    if unsatisfied.is_empty() {
        println!("s SATISFIED");
        return Ok(ExitCode::from(EXIT_SOLVED));
    }
    let shown: Vec<String> = unsatisfied
        .iter()
        .take(20)
        .map(|i| (i + 1).to_string())
        .collect();
    println!(
        "s UNSATISFIED {} clauses falsified (1-based: {}{})",
        unsatisfied.len(),
        shown.join(" "),
        if unsatisfied.len() > shown.len() {
            " ..."
        } else {
            ""
        }
    );
    Ok(ExitCode::from(EXIT_FAILED))
}

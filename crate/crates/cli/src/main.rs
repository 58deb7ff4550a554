//! Command-line front end: single runs, seeded batches and basin sweeps.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use swarm_descent::harness::{basin_sweep, histogram, linspace, precondition_and_correct, run_experiment, run_one};
use swarm_descent::output::{to_json, write_histogram_csv, write_runs_csv, write_sweep_csv, BenchDocument, RunDocument};
use swarm_descent::{presets, ConfigFile, MethodName, ObjectiveKind};

const SEED_ENV: &str = "SWARM_DESCENT_SEED";

#[derive(Parser)]
#[command(name = "swarm-descent", version, about = "Swarm-based gradient descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one seeded run and print it as JSON.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Execute `m` seeded runs and print the aggregate report as JSON.
    Bench {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write one CSV row per run to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a two-column histogram of the solutions to this file.
        #[arg(long)]
        hist: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-4)]
        bin_width: f64,
        /// Coordinate to histogram for multi-dimensional objectives.
        #[arg(long)]
        coordinate: Option<usize>,
        /// Worker threads for the runs (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Map each start of a 1D grid to the end point of a single-agent run (CSV).
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named configuration shipped with the library.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    objective: Option<ObjectiveKind>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    method: Option<MethodName>,
    /// Agents per run.
    #[arg(long)]
    n: Option<usize>,
    /// Number of runs.
    #[arg(long)]
    m: Option<usize>,
    /// Base seed; overrides the config file and the SWARM_DESCENT_SEED variable.
    #[arg(long)]
    seed: Option<u64>,
    /// Initialization interval as `lo,hi`, applied to every coordinate.
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    init_box: Option<[f64; 2]>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    /// Step size of `gd`, initial step of `adam`.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    tolm: Option<f64>,
    #[arg(long)]
    tolmerge: Option<f64>,
    #[arg(long)]
    tolres: Option<f64>,
    #[arg(long)]
    eps_eta: Option<f64>,
    #[arg(long)]
    h_floor: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    success_half_width: Option<f64>,
    /// Refine the mean solution with gradient descent (bench only).
    #[arg(long)]
    correct: bool,
    #[arg(long)]
    grad_tol: Option<f64>,
}

fn parse_box(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok([parse(lo)?, parse(hi)?])
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<swarm_descent::Error> for Failure {
    fn from(e: swarm_descent::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl ConfigArgs {
    /// Base document from `--config`, `--preset` or `--objective`, then
    /// the seed variable, then every flag given on the command line.
    fn build(&self) -> Result<ConfigFile, Failure> {
        let usage = |e: swarm_descent::Error| Failure::Usage(e.to_string());
        let mut cfg = if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            ConfigFile::from_toml(&text).map_err(usage)?
        } else if let Some(name) = &self.preset {
            presets::load(name).map_err(usage)?
        } else if let Some(kind) = self.objective {
            ConfigFile::new(kind)
        } else {
            Cli::command()
                .error(
                    ErrorKind::MissingRequiredArgument,
                    "one of --objective, --config or --preset is required",
                )
                .exit();
        };
        if let Ok(value) = std::env::var(SEED_ENV) {
            cfg.seed = value
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{value}`")))?;
        }
        macro_rules! apply {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        apply!(
            objective, b, c, mu, method, n, m, seed, init_box, p, q, lambda, gamma, h0, tolm, tolmerge, tolres,
            eps_eta, h_floor, max_iters, success_half_width, grad_tol
        );
        if self.d.is_some() {
            cfg.d = self.d;
        }
        if self.h.is_some() {
            cfg.h = self.h;
        }
        if self.correct {
            cfg.correct = true;
        }
        cfg.resolve().map_err(usage)
    }
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Run { config } => {
            let cfg = config.build()?;
            let record = run_one(&cfg.experiment()?, 0)?;
            writeln!(stdout, "{}", to_json(&RunDocument { config: &cfg, record: &record }))?;
        }
        Command::Bench { config, csv, hist, bin_width, coordinate, jobs } => {
            let cfg = config.build()?;
            if hist.is_some() && !(bin_width.is_finite() && bin_width > 0.0) {
                return Err(Failure::Usage(format!("--bin-width must be positive, got {bin_width}")));
            }
            let experiment = cfg.experiment()?;
            let d = experiment.objective.dimension();
            if hist.is_some() && coordinate.map_or(d > 1, |k| k >= d) {
                return Err(Failure::Usage(format!("--hist needs --coordinate below {d} for this objective")));
            }
            let pool = thread_pool(jobs)?;
            let report = pool.install(|| run_experiment(&experiment))?;
            let correction = if cfg.correct {
                Some(precondition_and_correct(&report, &experiment.objective, &cfg.correction())?)
            } else {
                None
            };
            if let Some(path) = &csv {
                write_runs_csv(create(path)?, &report.per_run)?;
            }
            if let Some(path) = &hist {
                let bins = histogram(report.solutions(), bin_width, coordinate)?;
                write_histogram_csv(create(path)?, &bins)?;
            }
            let doc = BenchDocument { config: &cfg, correction: correction.as_ref(), report: &report };
            writeln!(stdout, "{}", to_json(&doc))?;
        }
        Command::Sweep { config, from, to, steps, jobs } => {
            let cfg = config.build()?;
            let objective = cfg.build_objective()?;
            if objective.dimension() != 1 {
                return Err(Failure::Usage(format!(
                    "sweeps need a one-dimensional objective, `{}` has d = {}",
                    cfg.objective,
                    objective.dimension()
                )));
            }
            let grid = linspace(from, to, steps as usize);
            let rows = thread_pool(jobs)?.install(|| basin_sweep(&objective, &cfg.method(), &grid))?;
            write_sweep_csv(&mut stdout, &rows)?;
        }
    }
    stdout.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

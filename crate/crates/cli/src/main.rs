//! `tactical`: solve single instances, generate and run experiment suites,
//! and summarise their results.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when a solver fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tactical_core::experiments::{aggregate_report, collect_instances, run_suite, write_instances, InstanceFile, SuiteConfig};
use tactical_core::master::MasterStrategy;
use tactical_core::nonparametric::{solve_np, NonparametricAmbiguity, NonparametricOptions};
use tactical_core::parametric::{
    solve_benders, solve_brute_force, solve_cs, solve_cs_full, solve_exact, solve_reduced_intake, solve_robust,
    Algorithm, BendersOptions, CuttingSurfaceOptions, SolveReport,
};
use tactical_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Master {
    /// Enumerate plans with convexity pruning.
    Search,
    /// Branch and bound on the epigraph program.
    Mip,
}

#[derive(Debug, Parser)]
#[command(name = "tactical", version, about = "Distributionally robust pull-forward planning")]
struct Cli {
    /// Output format for `solve` and `report`.
    #[arg(long, value_enum, global = true, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance document with one algorithm.
    Solve(SolveArgs),
    /// Write generated instances as JSON documents.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "TACTICAL_OUT_DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Generate (or load) instances, run every configured algorithm and
    /// write result tables.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "TACTICAL_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, env = "TACTICAL_JOBS")]
        jobs: Option<usize>,
    },
    /// Summarise a suite output directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// P, CS, CS_opt, AO, NP, RO, benders or oracle.
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    #[arg(long, default_value_t = tactical_core::intake::DEFAULT_BETA)]
    beta: f64,
    /// Overrides the confidence level of the instance document.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "search")]
    master: Master,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algorithm(text: &str) -> std::result::Result<Algorithm, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|source| Error::Io { context: format!("writing {}", path.display()), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { context: "writing to standard output".into(), source }),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|source| Error::Json { context: "serialising output".into(), source })
}

fn solve_report(args: &SolveArgs) -> Result<SolveReport> {
    let mut file = InstanceFile::load(&args.instance)?;
    if let Some(alpha) = args.alpha {
        file.ambiguity.alpha = alpha;
    }
    let instance = file.instance()?;
    let strategy = match args.master {
        Master::Search => MasterStrategy::ExactSearch,
        Master::Mip => MasterStrategy::Mip,
    };
    if args.algorithm == Algorithm::Robust {
        return solve_robust(&instance, strategy);
    }
    if args.algorithm == Algorithm::Nonparametric {
        let ambiguity = NonparametricAmbiguity::from_samples(
            instance.intake_max(),
            file.estimate()?,
            file.sample_count(),
            file.ambiguity.alpha,
            instance.horizon() as u32,
        )?;
        let options = NonparametricOptions { strategy, ..NonparametricOptions::default() };
        return Ok(solve_np(&instance, &ambiguity, &options)?.report);
    }
    let theta = file.confidence_set()?;
    let cs = CuttingSurfaceOptions { epsilon: args.epsilon, max_iterations: args.kmax, strategy };
    match args.algorithm {
        Algorithm::Exact => solve_exact(&instance, &theta, strategy),
        Algorithm::CuttingSurface => solve_cs(&instance, &theta, &cs),
        Algorithm::CuttingSurfaceFull => solve_cs_full(&instance, &theta, &cs),
        Algorithm::ReducedIntake => solve_reduced_intake(&instance, &theta, args.beta, strategy),
        Algorithm::Benders => solve_benders(&instance, &theta, &BendersOptions::default()).map(|(r, _)| r),
        Algorithm::BruteForce => solve_brute_force(&instance, &theta),
        Algorithm::Robust | Algorithm::Nonparametric => unreachable!("handled above"),
    }
}

const SOLVE_COLUMNS: [&str; 10] = [
    "algorithm",
    "plan",
    "worst_case",
    "objective",
    "iterations",
    "pmf_tables",
    "evaluator_calls",
    "converged",
    "stop_reason",
    "wall_time_ms",
];

fn solve_csv(report: &SolveReport) -> Result<String> {
    use tactical_core::experiments::format_float;
    let csv_error = |source| Error::Csv { context: "formatting the solve report".into(), source };
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(SOLVE_COLUMNS).map_err(csv_error)?;
    writer
        .write_record([
            report.algorithm.to_string(),
            report.plan.to_string(),
            report.worst_case.to_string(),
            format_float(report.objective),
            report.iterations.to_string(),
            report.pmf_tables.to_string(),
            report.evaluator_calls.to_string(),
            report.converged.to_string(),
            format!("{:?}", report.stop_reason),
            format_float(report.wall_time_ms),
        ])
        .map_err(csv_error)?;
    let bytes = writer.into_inner().map_err(|e| Error::Solver(format!("flushing output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn out_dir(flag: Option<PathBuf>, config: &SuiteConfig) -> Result<PathBuf> {
    flag.or_else(|| config.out_dir.clone())
        .ok_or_else(|| Error::InvalidInstance("no output directory: pass --out-dir or set out_dir in the config".into()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let report = solve_report(&args)?;
            let text = match cli.format {
                Format::Json => to_json(&report)?,
                Format::Csv => solve_csv(&report)?,
            };
            write_output(args.out.as_deref(), &text)
        }
        Command::Gen { config, out_dir: dir } => {
            let config = SuiteConfig::load(&config)?;
            let dir = out_dir(dir, &config)?;
            let (instances, skipped) = collect_instances(&config)?;
            for cell in &skipped {
                log::info!("skipped {}: {}", cell.cell, cell.reason);
            }
            write_instances(&instances, &dir)?;
            eprintln!("wrote {} instances to {} ({} cells skipped)", instances.len(), dir.display(), skipped.len());
            Ok(())
        }
        Command::Suite { config, out_dir: dir, jobs } => {
            let mut config = SuiteConfig::load(&config)?;
            if let Some(jobs) = jobs {
                config.jobs = jobs;
            }
            let dir = out_dir(dir, &config)?;
            let outcome = run_suite(&config, &dir)?;
            let failed = outcome.rows.iter().filter(|r| !r.is_ok()).count();
            eprintln!(
                "{} instances, {} rows ({failed} failed) written to {}",
                outcome.instances.len(),
                outcome.rows.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Report { input, out } => {
            let report = aggregate_report(&input)?;
            let text = match cli.format {
                Format::Json => to_json(&report)?,
                Format::Csv => report.to_csv()?,
            };
            write_output(out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(if error.is_validation() { 2 } else { 3 })
        }
    }
}

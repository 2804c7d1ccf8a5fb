use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hybrid_ee::harness::{self, ExperimentConfig, Status};
use hybrid_ee::{oracles, Error};

#[derive(Parser)]
#[command(name = "hybrid-ee", version, about = "Energy-efficient hybrid precoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write the CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of proposed, heuristic, upper_bound.
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse and validate a config, then print the sweep size.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a reference check by name, or `all`.
    Oracle { name: String },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, Error> {
    harness::load_config(path)
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::FAILURE,
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, methods: Option<String>, seed: Option<u64>, jobs: Option<usize>) -> ExitCode {
    let mut cfg = match load(&config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(m) = methods {
        match harness::parse_methods(&m) {
            Ok(m) => cfg.methods = m,
            Err(e) => return fail(e),
        }
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    let records = match jobs {
        Some(j) => harness::run_experiment_with_jobs(&cfg, j),
        None => harness::run_experiment(&cfg),
    };
    let records = match records {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let written = match out.or(cfg.output.clone()) {
        Some(p) => harness::write_csv_file(&p, &records),
        None => harness::write_csv(std::io::stdout().lock(), &records),
    };
    if let Err(e) = written {
        return fail(e);
    }
    let failed = records.iter().filter(|r| matches!(r.status, Status::Failed(_))).count();
    if failed > 0 {
        eprintln!("{failed} of {} records failed", records.len());
        if cfg.strict {
            return ExitCode::from(3);
        }
    }
    ExitCode::SUCCESS
}

fn check(config: PathBuf) -> ExitCode {
    match load(&config) {
        Ok(cfg) => {
            let points = cfg.sweep_points().len();
            let names: Vec<&str> = cfg.methods.iter().map(|m| m.name()).collect();
            println!(
                "ok: {points} sweep points x {} realizations, methods {}",
                cfg.n_realizations,
                names.join(",")
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn oracle(name: &str) -> ExitCode {
    let names: Vec<&str> = if name == "all" { oracles::NAMES.to_vec() } else { vec![name] };
    let mut all_passed = true;
    for n in names {
        match oracles::run(n) {
            None => {
                eprintln!("unknown oracle `{n}`; available: all, {}", oracles::NAMES.join(", "));
                return ExitCode::from(2);
            }
            Some(Err(e)) => return fail(e),
            Some(Ok(report)) => {
                println!("[{}]", report.name);
                for l in &report.lines {
                    println!("  {l}");
                }
                let verdict = if report.passed() { "PASS" } else { "FAIL" };
                println!("  {verdict}: worst {:.3e} (tolerance {:.1e})", report.worst, report.tolerance);
                all_passed &= report.passed();
            }
        }
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, methods, seed, jobs } => run(config, out, methods, seed, jobs),
        Command::Check { config } => check(config),
        Command::Oracle { name } => oracle(&name),
    }
}

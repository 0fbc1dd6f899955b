use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gibbsids::config::RawConfig;
use gibbsids::experiments::{ExperimentConfig, CATALOG};
use gibbsids::output::{write_outputs, RunInfo};

#[derive(Parser)]
#[command(name = "gibbsids", version, about = "Reproducible IDS and tail-bound experiments for Gibbs-driven Schrödinger operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV tables and manifest.
    Run {
        config: PathBuf,
        /// Output directory (default: $GIBBSIDS_OUT, else ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the `seed` key of the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the experiment catalog.
    List,
    /// Check a configuration without running it.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig, String> {
    let mut raw = RawConfig::from_path(path).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        raw.set("seed", &s.to_string());
    }
    ExperimentConfig::parse(&raw).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(config: PathBuf, out: Option<PathBuf>, jobs: Option<usize>, seed: Option<u64>) -> Result<bool, String> {
    let cfg = load(&config, seed)?;
    let out = out
        .or_else(|| std::env::var_os("GIBBSIDS_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| e.to_string())?;
    let started = chrono::Utc::now();
    let report = pool.install(|| cfg.run()).map_err(|e| format!("{}: {e}", cfg.name))?;
    let info = RunInfo {
        experiment: cfg.name,
        hash: &cfg.hash,
        seed: cfg.seed,
        jobs,
        started,
    };
    let written = write_outputs(&out, &info, &report).map_err(|e| format!("{}: {e}", out.display()))?;
    println!("{} {} seed={} jobs={}", cfg.name, cfg.hash, cfg.seed, jobs);
    for check in &report.checks {
        println!("{check}");
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for e in CATALOG {
                println!("{:<16}{}", e.name, e.description);
                println!("{:<16}requires: {}", "", e.required.join(", "));
            }
            Ok(true)
        }
        Command::Validate { config } => load(&config, None).map(|cfg| {
            println!("{}: valid {} config, hash {}", config.display(), cfg.name, cfg.hash);
            true
        }),
        Command::Run { config, out, jobs, seed } => run(config, out, jobs, seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

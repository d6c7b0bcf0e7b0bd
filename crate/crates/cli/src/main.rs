use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;

use mixnorm_cli::table::{render, write_atomic};
use mixnorm_cli::{describe, run, CliError, CliResult, Config, ExperimentConfig, EXIT_VALIDATION};

/// Mixed-smoothness norm experiments.
#[derive(Parser, Debug)]
#[command(name = "mixnorm", disable_help_subcommand = true)]
struct Args {
    /// Experiment name; may also come from the configuration.
    experiment: Option<String>,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print experiments, columns and keys, then exit.
    #[arg(long)]
    describe: bool,
    /// Overrides as `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    overrides: Vec<String>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    experiment: &'a str,
    params: &'a str,
    output: String,
    format: &'a str,
    rows: usize,
    workers: usize,
    started_unix: f64,
    elapsed_seconds: f64,
    row_seconds: &'a [f64],
    notes: &'a [String],
}

fn workers() -> CliResult<Option<usize>> {
    match std::env::var("MIXNORM_WORKERS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::validation("MIXNORM_WORKERS", format!("`{v}` is not a positive integer"))),
        },
    }
}

fn execute(args: Args) -> CliResult<()> {
    let mut raw = match &args.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    raw.apply_overrides(&args.overrides)?;
    let cfg = ExperimentConfig::resolve(&raw, args.experiment.as_deref())?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::validation("MIXNORM_WORKERS", e.to_string()))?;

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let outcome = pool.install(|| run(&cfg))?;
    let bytes = render(&outcome.table, cfg.format)?;
    let elapsed = clock.elapsed().as_secs_f64();
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }

    let meta = Metadata {
        experiment: cfg.experiment.name(),
        params: &cfg.snapshot,
        output: cfg.output.display().to_string(),
        format: match cfg.format {
            mixnorm_cli::Format::Csv => "csv",
            mixnorm_cli::Format::Json => "json",
        },
        rows: outcome.table.rows.len(),
        workers: pool.current_num_threads(),
        started_unix: started,
        elapsed_seconds: elapsed,
        row_seconds: &outcome.row_seconds,
        notes: &outcome.notes,
    };
    let mut meta_bytes = serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Numerical(e.to_string()))?;
    meta_bytes.push(b'\n');

    write_atomic(&cfg.output, &bytes)?;
    let mut meta_path = cfg.output.clone().into_os_string();
    meta_path.push(".meta.json");
    write_atomic(&PathBuf::from(meta_path), &meta_bytes)?;
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if args.describe {
        print!("{}", describe());
        return ExitCode::SUCCESS;
    }
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

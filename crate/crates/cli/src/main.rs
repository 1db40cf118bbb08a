//! `topophase run <config> --out <dir> [--seed N]`
//! `topophase sweep <config> --param <name> --values v1,v2,... --out <dir> [--seed N]`
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical-contract
//! violation, 1 I/O failure.

mod config;
mod output;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{from_table, parse_table, set_param, ConfigError};
use output::{write_csv, write_summary, write_table};
use scenarios::RunError;

const THREADS_ENV: &str = "TOPOPHASE_THREADS";

#[derive(Parser)]
#[command(name = "topophase", version, about = "Topological spin-phase scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario once per value of a numeric parameter.
    Sweep {
        config: PathBuf,
        /// Dotted parameter name, e.g. `pointer.s` or `coupling.xi`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(m) => Failure::Config(m),
            RunError::Numerical(m) => Failure::Numerical(m),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<toml::Table, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_table(&text)?)
}

fn with_seed(mut table: toml::Table, seed: Option<u64>) -> Result<toml::Table, Failure> {
    if let Some(s) = seed {
        let v = i64::try_from(s).map_err(|_| Failure::Config(format!("seed {s} is too large")))?;
        table.insert("seed".into(), toml::Value::Integer(v));
    }
    Ok(table)
}

fn run_cmd(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), Failure> {
    let cfg = from_table(with_seed(load(config)?, seed)?)?;
    let result = scenarios::run(&cfg)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let csv_path = out.join(format!("{}.csv", cfg.kind.name()));
    write_table(&csv_path, &result.table).map_err(io_err(&csv_path))?;
    let summary_path = out.join("summary.txt");
    write_summary(&summary_path, &result.summary).map_err(io_err(&summary_path))
}

fn parse_values(raw: &str) -> Result<Vec<f64>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::Config(format!("--values: `{s}` is not a number")))
        })
        .collect()
}

fn sweep_cmd(
    config: &Path,
    param: &str,
    values: &str,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), Failure> {
    let base = with_seed(load(config)?, seed)?;
    let values = parse_values(values)?;
    // validates the name even when there is nothing to run
    let mut probe = base.clone();
    set_param(&mut probe, param, 0.0)?;
    let kind = from_table(base.clone())?.kind;

    let mut header = vec![param.to_string()];
    header.extend(scenarios::header(kind).iter().map(|h| h.to_string()));
    let mut rows = Vec::new();
    let mut summary = vec![
        ("kind".to_string(), kind.name().to_string()),
        ("param".to_string(), param.to_string()),
        ("points".to_string(), values.len().to_string()),
    ];
    for &v in &values {
        let mut table = base.clone();
        set_param(&mut table, param, v)?;
        let cfg = from_table(table)?;
        let result = scenarios::run(&cfg)?;
        let chosen = if result.series {
            result.table.rows.last().into_iter().collect::<Vec<_>>()
        } else {
            result.table.rows.iter().collect()
        };
        for r in chosen {
            let mut line = vec![output::fmt_float(v)];
            line.extend(r.iter().map(|c| c.render()));
            rows.push(line);
        }
    }
    summary.push(("seed".into(), from_table(base)?.seed.to_string()));
    fs::create_dir_all(out).map_err(io_err(out))?;
    let csv_path = out.join(format!("sweep_{param}.csv"));
    write_csv(&csv_path, &header, &rows).map_err(io_err(&csv_path))?;
    let summary_path = out.join("summary.txt");
    write_summary(&summary_path, &summary).map_err(io_err(&summary_path))
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let raw = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v,
        _ => return Ok(None),
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Failure::Io(format!("cannot start thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let pool = thread_pool()?;
    let work = move || match cli.command {
        Command::Run { config, out, seed } => run_cmd(&config, &out, seed),
        Command::Sweep {
            config,
            param,
            values,
            out,
            seed,
        } => sweep_cmd(&config, &param, &values, &out, seed),
    };
    match pool {
        Some(p) => p.install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical contract violated: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(1)
        }
    }
}

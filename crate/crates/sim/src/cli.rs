//! The `tot` command line: `simulate`, `oracle` and `validate`.
//!
//! Exit codes: 0 success, 1 runtime error, 2 invalid config or arguments.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use tot_core::lexicon::Component;
use tot_core::oracle::exact_success_prob;
use tot_core::scenario::RunContext;

use crate::config::{load_config, ConfigError, LoadedConfig};
use crate::output::{self, RunMetadata, RECORDS_SCHEMA};
use crate::runner::run_parallel;
use crate::summary::{summarize, INTERVAL_METHOD};

#[derive(Debug, Parser)]
#[command(name = "tot", version, about = "Tip-of-the-tongue retrieval simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write records, summary and run metadata.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; never changes the output bytes.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the exact one-attempt success probability of a component.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        component: String,
        /// Cue the first `k` units with the word's true pattern.
        #[arg(long)]
        cue_size: usize,
    },
    /// Check a config and print it with every default resolved.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) | CliError::Usage(_) => 2,
        }
    }
}

fn prepare(loaded: &LoadedConfig) -> Result<RunContext, CliError> {
    RunContext::prepare(&loaded.config).map_err(|e| match e {
        tot_core::Error::InvalidConfig(errs) => CliError::Config(ConfigError::Invalid(errs.0)),
        other => CliError::Runtime(other.to_string()),
    })
}

/// Files written by `simulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub files: Vec<PathBuf>,
    pub n_records: usize,
}

pub fn cmd_simulate(
    config_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    workers: Option<usize>,
    format: Format,
) -> Result<SimulateReport, CliError> {
    let mut loaded = load_config(config_path)?;
    if let Some(seed) = seed {
        loaded.config.seed = seed;
    }
    let ctx = prepare(&loaded)?;
    let workers =
        workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let records = run_parallel(&ctx, workers).map_err(|e| CliError::Runtime(e.to_string()))?;
    let cfg = &loaded.config;
    let rows = summarize(
        &records,
        ctx.points(),
        cfg.n_trials,
        cfg.recall.strength_threshold,
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let runtime = |e: output::FormatError| CliError::Runtime(e.to_string());
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    match format {
        Format::Csv => {
            let mut rec = Vec::new();
            output::write_records_csv(&mut rec, &records).map_err(runtime)?;
            let mut sum = Vec::new();
            output::write_summary_csv(&mut sum, &rows).map_err(runtime)?;
            files.push(("records.csv".into(), rec));
            files.push(("summary.csv".into(), sum));
        }
        Format::Json => {
            files.push(("records.json".into(), pretty_json(&records)));
            files.push(("summary.json".into(), pretty_json(&rows)));
        }
    }
    let meta = RunMetadata {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        records_schema: RECORDS_SCHEMA,
        seed: cfg.seed,
        interval_method: INTERVAL_METHOD,
        defaults_applied: &loaded.defaults_applied,
        n_records: records.len(),
        files: files.iter().map(|(n, _)| n.clone()).collect(),
        config: cfg,
    };
    files.push(("metadata.json".into(), pretty_json(&meta)));
    let written = output::write_atomically(out_dir, &files)
        .map_err(|e| CliError::Runtime(format!("cannot write to {}: {e}", out_dir.display())))?;
    Ok(SimulateReport {
        files: written,
        n_records: records.len(),
    })
}

fn pretty_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializes");
    v.push(b'\n');
    v
}

/// Returns the `"num/den = decimal"` line.
pub fn cmd_oracle(
    config_path: &Path,
    word: &str,
    component: &str,
    cue_size: usize,
) -> Result<String, CliError> {
    let loaded = load_config(config_path)?;
    let component: Component = component
        .parse()
        .map_err(|e: tot_core::Error| CliError::Usage(e.to_string()))?;
    let ctx = prepare(&loaded)?;
    let lex = ctx
        .reference_lexicon()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let node = lex
        .get(word)
        .ok_or_else(|| CliError::Usage(format!("unknown word {word:?}")))?;
    let net = node.network(component);
    if cue_size > net.len() {
        return Err(CliError::Usage(format!(
            "cue size {cue_size} exceeds {component} length {}",
            net.len()
        )));
    }
    let cue: Vec<usize> = (0..cue_size).collect();
    let p = exact_success_prob(
        net,
        node.metamemory_ref(component),
        node.truth(component),
        &cue,
    )
    .map_err(|e| match e {
        tot_core::Error::Capacity { .. } => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    let (num, den) = (*p.numer(), *p.denom());
    Ok(format!("{num}/{den} = {}", num as f64 / den as f64))
}

/// Returns the normalized config.
pub fn cmd_validate(config_path: &Path) -> Result<String, CliError> {
    let loaded = load_config(config_path)?;
    prepare(&loaded)?;
    Ok(loaded.normalized_json())
}

/// Runs a parsed command line, reporting to the given streams.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            workers,
            format,
        } => cmd_simulate(&config, &out, seed, workers, format)
            .map(|r| format!("wrote {} records to {}", r.n_records, out.display())),
        Command::Oracle {
            config,
            word,
            component,
            cue_size,
        } => cmd_oracle(&config, &word, &component, cue_size),
        Command::Validate { config } => cmd_validate(&config),
    };
    match result {
        Ok(text) => {
            let _ = writeln!(stdout, "{text}");
            0
        }
        Err(e) => {
            for line in e.to_string().lines() {
                let _ = writeln!(stderr, "error: {line}");
            }
            e.exit_code()
        }
    }
}

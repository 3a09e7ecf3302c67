use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use coasdim_cli::config::Kind;
use coasdim_cli::run::{classify_error, load_config, resolve, run_experiment, run_suite, suite_table};
use coasdim_cli::{ReportFile, Status};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "coasdim", version, about = "Cover, embedding and rank experiments with exact integer checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path; overrides the config's `output`. Without either the
    /// report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Node budget for searches.
    #[arg(long)]
    budget: Option<u64>,
    /// Seed for randomized runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the per-color (or per-case) table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a cover scheme on a window.
    Verify(Common),
    /// Find fiber witnesses and check the induced map.
    Witness(Common),
    /// Check a map's control functions on a window.
    Control(Common),
    /// Decide whether a 1-D window admits an assignment with no cover.
    Oracle1d(Common),
    /// Rank of a finite family.
    Ord {
        #[command(flatten)]
        common: Common,
        /// Inline family, e.g. '[[1,2],[3]]', instead of a config.
        #[arg(long)]
        input: Option<String>,
    },
    /// Saturated unions, random or explicit.
    Satunion(Common),
    /// Run the acceptance battery.
    Suite {
        #[command(flatten)]
        common: Common,
        /// Criteria to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(c) => experiment(Kind::VerifyCover, &c, None),
        Command::Witness(c) => experiment(Kind::FiberWitness, &c, None),
        Command::Control(c) => experiment(Kind::CoarseControl, &c, None),
        Command::Oracle1d(c) => experiment(Kind::Oracle1d, &c, None),
        Command::Ord { common, input } => experiment(Kind::OrdRank, &common, input),
        Command::Satunion(c) => experiment(Kind::SaturatedUnion, &c, None),
        Command::Suite { common, only } => suite(&common, &only),
    };
    ExitCode::from(code)
}

fn emit(file: &ReportFile, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            file.write(p)?;
            println!("{}: {}", p.display(), serde_json::to_string(&file.status)?.trim_matches('"'));
        }
        None => println!("{}", serde_json::to_string_pretty(file)?),
    }
    Ok(())
}

fn experiment(kind: Kind, common: &Common, inline: Option<String>) -> u8 {
    let mut out = common.out.clone();
    let mut config_value = json!({ "kind": kind.name() });
    let result = (|| -> Result<(Status, Value)> {
        let mut c = match (&common.config, inline) {
            (Some(path), None) => load_config(path, kind)?,
            (None, Some(text)) => {
                let mut c = coasdim_cli::ExperimentConfig {
                    kind: Some(kind),
                    ..Default::default()
                };
                c.input = Some(serde_json::from_str(&text).map_err(|e| {
                    coasdim_cli::run::ConfigError(format!("parsing --input: {e}"))
                })?);
                c
            }
            (Some(_), Some(_)) => {
                anyhow::bail!(coasdim_cli::run::ConfigError("give --config or --input, not both".into()))
            }
            (None, None) => anyhow::bail!(coasdim_cli::run::ConfigError("--config is required".into())),
        };
        if let Some(w) = common.workers {
            c.limits.worker_count = Some(w);
        }
        if let Some(b) = common.budget {
            c.limits.node_budget = b;
        }
        if common.seed.is_some() {
            c.seed = common.seed;
        }
        if out.is_none() {
            out = c.output.clone();
        }
        config_value = serde_json::to_value(&c)?;
        let c = resolve(c)?;
        config_value = serde_json::to_value(&c)?;
        let outcome = run_experiment(&c)?;
        if let Some(p) = &common.csv {
            match &outcome.table {
                Some(t) => t.write_csv(p)?,
                None => eprintln!("no table for `{}`; --csv ignored", kind.name()),
            }
        }
        Ok((outcome.status, outcome.report))
    })();
    let file = match result {
        Ok((status, report)) => ReportFile::new(status, config_value, report),
        Err(e) => {
            eprintln!("error: {e:#}");
            ReportFile::new(classify_error(&e), config_value, json!({ "error": format!("{e:#}") }))
        }
    };
    if let Err(e) = emit(&file, out.as_deref()) {
        eprintln!("error: {e:#}");
        return Status::Error.exit_code();
    }
    file.status.exit_code()
}

fn suite(common: &Common, only: &[u32]) -> u8 {
    let config = json!({ "suite": { "only": only, "seed": common.seed, "workers": common.workers } });
    let file = match run_suite(only, common.seed, common.workers) {
        Ok((results, status)) => {
            for r in &results {
                eprintln!("{r}");
            }
            if let Some(p) = &common.csv {
                if let Err(e) = suite_table(&results).write_csv(p) {
                    eprintln!("error: {e:#}");
                }
            }
            ReportFile::new(status, config, json!({ "criteria": results }))
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ReportFile::new(classify_error(&e), config, json!({ "error": format!("{e:#}") }))
        }
    };
    if let Err(e) = emit(&file, common.out.as_deref()) {
        eprintln!("error: {e:#}");
        return Status::Error.exit_code();
    }
    file.status.exit_code()
}

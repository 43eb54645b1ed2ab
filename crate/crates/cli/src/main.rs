use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pmelab_cli::output::fmt_f64;
use pmelab_cli::{run_acceptance_suite, run_to_dir, CliError, CliResult, ExperimentConfig, OutputFormat, SuiteConfig};

#[derive(Parser)]
#[command(name = "pmelab", version, about = "Forced porous medium experiments and acceptance suite")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the acceptance criteria.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "suite-out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance override, `ID=VALUE`; repeatable.
        #[arg(long = "tolerance", value_parser = parse_override)]
        tolerances: Vec<(u8, f64)>,
        /// Comma-separated criterion ids to run.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Validate and echo a config, or summarise a field snapshot.
    Inspect {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_override(s: &str) -> Result<(u8, f64), String> {
    let (id, v) = s.split_once('=').ok_or("expected ID=VALUE")?;
    Ok((id.trim().parse().map_err(|e| format!("{e}"))?, v.trim().parse().map_err(|e| format!("{e}"))?))
}

fn inspect(path: &Path) -> CliResult<()> {
    let bytes = std::fs::read(path)?;
    if let Ok(text) = std::str::from_utf8(&bytes) {
        let value: Result<serde_json::Value, _> = serde_json::from_str(text);
        if let Ok(v) = value {
            if v.get("experiment").is_some() {
                let c = ExperimentConfig::from_json(text)?;
                println!("{}", c.to_json());
                println!("# experiment: {}", c.experiment.kind());
            } else {
                let c = SuiteConfig::from_json(text)?;
                println!("{}", serde_json::to_string_pretty(&c).map_err(std::io::Error::other)?);
            }
            return Ok(());
        }
    }
    let field = pmelab_core::grid::read_snapshot(&bytes[..]).map_err(|e| CliError::Config(e.to_string()))?;
    let g = field.grid();
    println!("dim {} n {} length {} boundary {:?}", g.dim(), g.n(), g.length(), g.boundary());
    println!(
        "min {} max {} integral {} l2 {}",
        field.min(),
        field.max(),
        field.integral(),
        field.lp_norm(2.0)
    );
    Ok(())
}

fn main_inner(cli: Cli) -> CliResult<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Run { config, out, seed, format } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(f) = format {
                cfg.format = match f {
                    Format::Csv => OutputFormat::Csv,
                    Format::CsvSvg => OutputFormat::CsvSvg,
                };
            }
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            let report = run_to_dir(&cfg, &dir)?;
            for c in &report.checks {
                let tag = if !c.hard { "info" } else if c.passed { "pass" } else { "FAIL" };
                println!("{tag:4}  {}  measured {} bound {}", c.name, fmt_f64(c.measured), fmt_f64(c.bound));
            }
            println!("wrote {}", dir.display());
            Ok(report.passed())
        }
        Cmd::Suite { config, out, seed, tolerances, only } => {
            let mut cfg = match config {
                Some(p) => SuiteConfig::from_json(&std::fs::read_to_string(p)?)?,
                None => SuiteConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.tolerances.extend(tolerances);
            if !only.is_empty() {
                cfg.only = only;
            }
            cfg.validate()?;
            let summary = run_acceptance_suite(&cfg);
            for c in &summary.criteria {
                println!("{}", c.line());
            }
            summary.write(&out)?;
            Ok(summary.passed())
        }
        Cmd::Inspect { config } => {
            inspect(&config)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(CliError::ChecksFailed { failed: 1 }.exit_code() as u8),
        Err(e) => {
            eprintln!("pmelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dimech_cli::config::{self, ConfigError, ExperimentName, Format};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dimech",
    version,
    about = "Run amplitude, path-integral and field experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its tables and report
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Table format; overrides `format` in the config
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check a config against the schema without running anything
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available experiments
    List,
}

fn load(path: &Path) -> Result<config::Config, Vec<ConfigError>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![ConfigError {
            path: None,
            message: format!("cannot read {}: {e}", path.display()),
            line: None,
            column: None,
        }]
    })?;
    config::parse(&text)
}

fn report_config_errors(path: &Path, errors: &[ConfigError]) -> ExitCode {
    for e in errors {
        eprintln!("{}: {e}", path.display());
    }
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::List => {
            for name in ExperimentName::ALL {
                println!("{:<20} {}", name.as_str(), name.summary());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(_) => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(errors) => report_config_errors(&config, &errors),
        },
        Command::Run { config, out, format } => {
            let cfg = match load(&config) {
                Ok(cfg) => cfg,
                Err(errors) => return report_config_errors(&config, &errors),
            };
            let out_dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            let format = format.unwrap_or(cfg.format);
            let started = Instant::now();
            let report = match dimech_cli::run(&cfg, &out_dir, format) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{}: {e}", cfg.experiment);
                    return ExitCode::from(EXIT_FAIL);
                }
            };
            for c in &report.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                println!("{mark}  {:<40} {:>12.4e}  {}", c.name, c.value, c.condition);
            }
            for f in &report.files {
                println!("wrote {}", out_dir.join(f).display());
            }
            eprintln!(
                "{} finished in {:.2} s",
                report.experiment,
                started.elapsed().as_secs_f64()
            );
            if report.passed {
                ExitCode::SUCCESS
            } else {
                let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                eprintln!("{}: failing checks: {}", report.experiment, failed.join(", "));
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}

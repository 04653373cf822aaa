use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use nullgeo::error::HarnessError;
use nullgeo::harness::{catalog, emit_report, from_json, run_scenario, Format, Scenario};

#[derive(Parser)]
#[command(name = "nullgeo", version, about = "Check null hypersurface identities on sample grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report.
    Check {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Tolerance override, `name=value`. Repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Replaces the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Built-in example hypersurfaces.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Re-render a JSON report.
    Report {
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        report: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Describe { name: String },
}

fn write_out(bytes: &[u8], output: Option<&PathBuf>) -> Result<(), HarnessError> {
    match output {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Check { scenario, format, output, tol, seed } => {
            let mut s = Scenario::load(&scenario)?;
            s.override_tolerances(&tol)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let report = run_scenario(&s)?;
            write_out(&emit_report(&report, format)?, output.as_ref())?;
            Ok(report.verdict.exit_code())
        }
        Command::Catalog { action: CatalogAction::List } => {
            let mut out = String::new();
            for e in &catalog::ENTRIES {
                out.push_str(&format!("{:<26} {}\n", e.name, e.summary));
            }
            write_out(out.as_bytes(), None)?;
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::Describe { name } } => {
            let e = catalog::entry(&name).ok_or_else(|| HarnessError::Config(format!("unknown catalog entry `{name}`")))?;
            let out = format!(
                "{}\n  {}\n  parameters: {}\n  ambient: {}\n  excluded: {}\n",
                e.name, e.summary, e.parameters, e.ambient, e.singular_locus
            );
            write_out(out.as_bytes(), None)?;
            Ok(0)
        }
        Command::Report { format, report } => {
            let bytes = std::fs::read(&report)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", report.display())))?;
            let r = from_json(&bytes)?;
            write_out(&emit_report(&r, format)?, None)?;
            Ok(r.verdict.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let code = e.exit_code();
            let body = json!({ "error": e.to_string(), "exit_code": code });
            eprintln!("{body}");
            ExitCode::from(code as u8)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use zentner_core::runner::{self, OutputFormat, RunConfig};
use zentner_core::scenarios::{list_scenarios, scenario_defaults, scenario_names};
use zentner_core::GeomError;

/// Exit status for configuration errors such as an unknown scenario.
const EXIT_CONFIG: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "zentner", version, about = "Verify Zentner triples on coordinate grids")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the scenario registry as JSON.
    List,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Scenario name, see `zentner list`.
    #[arg(long)]
    scenario: Option<String>,

    /// Grid override, e.g. `5` or `5,5,5@-1:1,-1:1,0.5:2`.
    #[arg(long)]
    grid: Option<String>,

    /// Residual tolerance (`1e-6`) or per-check overrides (`eq2=1e-5,torsion=1e-4`).
    #[arg(long)]
    tol: Option<String>,

    /// Comma-separated checks, or `all`. Defaults to every applicable check.
    #[arg(long)]
    checks: Option<String>,

    /// Seed for random gauge transformations and total-space samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_parser = ["json", "text"], default_value = "text")]
    format: String,
}

fn config_from(args: &RunArgs) -> zentner_core::Result<RunConfig> {
    let scenario = args
        .scenario
        .clone()
        .ok_or_else(|| GeomError::InvalidConfig("--scenario is required".into()))?;
    let format: OutputFormat = args.format.parse()?;
    let mut config = RunConfig {
        scenario,
        seed: args.seed,
        out: args.out.clone(),
        format,
        ..RunConfig::default()
    };
    if let Some(g) = &args.grid {
        let defaults = scenario_defaults(&config.scenario)?;
        config.grid = Some(runner::parse_grid(g, &defaults.grid.bounds)?);
    }
    if let Some(t) = &args.tol {
        config.tolerances = runner::parse_tolerances(t)?;
    }
    if let Some(c) = &args.checks {
        config.checks = Some(runner::parse_checks(c)?);
    }
    Ok(config)
}

fn config_error(e: &GeomError, format: &str) -> ExitCode {
    let kind = match e {
        GeomError::UnknownScenario(_) => "unknown_scenario",
        _ => "invalid_config",
    };
    eprintln!("error: {e}");
    if matches!(e, GeomError::UnknownScenario(_)) {
        eprintln!("known scenarios: {}", scenario_names().join(", "));
    }
    if format == "json" {
        let body = json!({ "error": { "kind": kind, "message": e.to_string(), "known_scenarios": scenario_names() } });
        println!("{}", serde_json::to_string_pretty(&body).unwrap_or_default());
    }
    ExitCode::from(EXIT_CONFIG)
}

fn run(args: &RunArgs) -> Result<ExitCode> {
    let config = match config_from(args) {
        Ok(c) => c,
        Err(e) => return Ok(config_error(&e, &args.format)),
    };
    let report = match runner::run(&config) {
        Ok(r) => r,
        Err(e @ (GeomError::UnknownScenario(_) | GeomError::InvalidConfig(_))) => {
            return Ok(config_error(&e, &args.format))
        }
        Err(e) => return Err(e).context("verification run failed"),
    };
    let mut stdout = std::io::stdout().lock();
    match &config.out {
        Some(path) => {
            stdout.write_all(report.to_text().as_bytes())?;
            writeln!(stdout, "report written to {}", path.display())?;
        }
        None => stdout.write_all(report.render(config.format)?.as_bytes())?,
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::List) => {
            println!("{}", serde_json::to_string_pretty(&list_scenarios())?);
            Ok(ExitCode::SUCCESS)
        }
        None => run(&cli.run),
    }
}

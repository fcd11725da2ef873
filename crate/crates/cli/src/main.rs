use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use collar_glue_cli::catalogue::describe;
use collar_glue_cli::output::{write_outputs, DEFAULT_OUT, OUT_ENV};
use collar_glue_cli::shipped::SHIPPED;
use collar_glue_cli::{run_checks, CliError, Scenario, Selection};

/// Glue collar metrics, smooth them and certify intermediate curvature bounds.
#[derive(Parser)]
#[command(name = "collar-glue", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check a scenario declares.
    Run(RunArgs),
    /// Run only the certification checks of a scenario.
    Certify(RunArgs),
    /// Run only the rate suite of a scenario.
    Rates(RunArgs),
    /// List the shipped scenarios.
    List,
    /// Explain a check and the statement it exercises.
    Describe { check: String },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file, or the name of a shipped scenario.
    config: String,
    /// Output root; reports go to `<out>/<scenario name>/`.
    #[arg(long, env = OUT_ENV, default_value = DEFAULT_OUT)]
    out: PathBuf,
}

const INPUT_ERROR: u8 = 3;

fn run(args: &RunArgs, command: &str, selection: Selection) -> Result<u8, CliError> {
    let sc = Scenario::load(&args.config)?;
    let out = run_checks(&sc, selection)?;
    for c in &out.checks {
        let flag = match c.expected {
            Some(e) if e != c.outcome => format!(" (expected {e:?})"),
            _ => String::new(),
        };
        println!("{:<20} {:<13} {}{flag}", c.name.as_str(), format!("{:?}", c.outcome), c.summary);
    }
    let dir = write_outputs(&args.out, &sc, command, &out)?;
    println!("reports written to {}", dir.display());
    Ok(out.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a, "run", Selection::All),
        Command::Certify(a) => run(a, "certify", Selection::Certification),
        Command::Rates(a) => run(a, "rates", Selection::Rates),
        Command::List => {
            for s in SHIPPED {
                let description = Scenario::from_toml(s.text).map(|sc| sc.description).unwrap_or_default();
                println!("{:<24} {description}", s.name);
            }
            Ok(0)
        }
        Command::Describe { check } => describe(check).map(|text| {
            print!("{text}");
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let kind = if e.is_input() { "input error" } else { "error" };
            eprintln!("{kind}: {e}");
            ExitCode::from(if e.is_input() { INPUT_ERROR } else { 1 })
        }
    }
}

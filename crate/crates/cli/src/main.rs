use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cnalg_cli::{run, Scenario, CHECK_KINDS};

/// Exact checks for Courant algebroids and their 1-derivations.
#[derive(Parser)]
#[command(name = "cnalg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a scenario file.
    Check {
        /// Scenario JSON file.
        #[arg(required_unless_present = "list_checks")]
        scenario: Option<PathBuf>,
        /// Seed for the random probe sections; overrides the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Print the available check kinds and exit.
        #[arg(long)]
        list_checks: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Check {
        scenario,
        seed,
        format,
        list_checks,
    } = cli.command;
    if list_checks {
        for (kind, args) in CHECK_KINDS {
            println!("{kind:<24}{args}");
        }
        return ExitCode::SUCCESS;
    }
    let path = scenario.expect("clap enforces the scenario argument");
    let display = path.display().to_string();
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {display}: {e}");
            return ExitCode::from(2);
        }
    };
    let report = Scenario::parse(&display, &text).and_then(|s| run(&s, seed));
    match report {
        Ok(report) => {
            match format {
                Format::Text => print!("{}", report.render_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lightfol::{emit, load_scenario, run_checks, Format};

#[derive(Parser)]
#[command(name = "lightfol", version, about = "Verify lightlike foliation identities on sampled scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file.
    Check {
        /// Scenario file (`.scn`).
        file: PathBuf,
        /// Run only these checks; with no names, run none.
        #[arg(long, num_args = 0..)]
        only: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Override the sampling seed of a box.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the sample count; truncates a point list.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print a built-in scenario.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    New {
        #[arg(value_parser = ["fol45"])]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Check { file, only, format, seed, samples } => {
            let scn = match load_scenario(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(bad) = only.iter().flatten().find(|n| lightfol::checks::find(n).is_none()) {
                eprintln!("error: unknown check `{bad}`");
                return ExitCode::from(2);
            }
            let report = run_checks(&scn, only.as_deref(), seed, samples);
            if let Err(e) = emit(&report, format, &mut stdout).and_then(|_| stdout.flush()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Scenario { action: ScenarioAction::New { n, s, .. } } => match lightfol::fixtures::fol45(n, s) {
            Ok(text) => {
                let _ = stdout.write_all(text.as_bytes());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}

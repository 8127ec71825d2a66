//! Command-line front end for `maclip`: scoring, evaluation, λ sweeps,
//! ablations and plot tables. The binary is a thin wrapper around [`run`].

pub mod args;
pub mod commands;
pub mod manifest;

use std::fs;
use std::io::Write;
use std::time::Instant;

use anyhow::{Context, Result};
use maclip::ErrorCategory;

pub use args::{Cli, Command};
pub use commands::Outcome;
pub use manifest::{manifest_path, RunManifest};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;

/// Exit status for a failed run: 2 usage, 3 I/O or malformed input, 4 validation.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<maclip::Error>() {
            return match e.category() {
                ErrorCategory::Usage => EXIT_USAGE,
                ErrorCategory::Io | ErrorCategory::Format => EXIT_INPUT,
                ErrorCategory::Validation => EXIT_VALIDATION,
            };
        }
    }
    EXIT_INPUT
}

/// Runs one subcommand and returns its primary output without writing anything.
pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Score(a) => commands::score(a),
        Command::Eval(a) => commands::eval(a),
        Command::SweepLambda(a) => commands::sweep_lambda(a),
        Command::Ablate(a) => commands::ablate(a),
        Command::PlotData(a) => commands::plot_data(a),
    }
}

fn name_and_out(command: &Command) -> (&'static str, Option<&std::path::Path>) {
    match command {
        Command::Score(a) => ("score", a.out.as_deref()),
        Command::Eval(a) => ("eval", a.out.as_deref()),
        Command::SweepLambda(a) => ("sweep-lambda", a.out.as_deref()),
        Command::Ablate(a) => ("ablate", a.out.as_deref()),
        Command::PlotData(a) => ("plot-data", a.out.as_deref()),
    }
}

/// Runs a parsed command line, writing the output to `--out` (plus a
/// manifest sidecar) or to stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    let outcome = execute(&cli.command)?;
    let (name, out) = name_and_out(&cli.command);
    match out {
        Some(path) => {
            fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?;
            let manifest = RunManifest::new(name, outcome.config, &outcome.inputs, path, started.elapsed());
            let mpath = manifest_path(path);
            let mut json = serde_json::to_string_pretty(&manifest)?;
            json.push('\n');
            fs::write(&mpath, json).with_context(|| format!("writing {}", mpath.display()))?;
            log::info!("wrote {} and {}", path.display(), mpath.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(outcome.body.as_bytes()).context("writing to stdout")?;
            stdout.flush().context("writing to stdout")?;
        }
    }
    Ok(())
}

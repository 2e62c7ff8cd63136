mod cli;
mod commands;
mod error;
mod render;
mod repro;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use delchan::{Finding, Limits};

use crate::cli::{Cli, Command, Format, GlobalOpts};
use crate::commands::{EntropyArgs, MomentArgs, Outcome};
use crate::error::{io_at, CliError};
use crate::render::{Encoder, FloatStyle, Value};

const EXIT_FINDING: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("delchan: {err}");
            err.exit_code()
        }
    }
}

fn default_format(command: &Command) -> Format {
    match command {
        Command::Extremal { .. } | Command::Moments { .. } => Format::Json,
        _ => Format::Csv,
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let Cli { global, command } = cli;
    if let Some(k) = global.workers {
        if k == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {k} workers: {e}")))?;
    }
    let limits = Limits::new(global.max_n)?;
    let format = global.format.unwrap_or_else(|| default_format(&command));
    let style = FloatStyle {
        full_precision: global.full_precision,
    };

    let outcome = match command {
        Command::Kappa {
            target,
            all,
            decompose,
        } => commands::kappa(&target, all, decompose)?,
        Command::Posterior { pattern, n } => {
            let (rows, mu) = commands::posterior(&pattern, n, &limits)?;
            let header = ["y", "omega"];
            with_sink(global.output.as_deref(), |w| {
                let mut enc = Encoder::new(w, format, style, &header)?;
                for (y, omega) in rows {
                    enc.row(&[y.to_string().into(), omega.into()])?;
                }
                enc.finish(&[("mu", Value::from(mu))])
            })?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Entropy {
            target,
            n,
            all,
            mode,
            moments,
            variance_form,
        } => {
            let args = EntropyArgs {
                mode,
                moments,
                variance_form,
            };
            commands::entropy(&target, n, all, &args, &limits)?
        }
        Command::Hist {
            pattern,
            n,
            sample,
            seed,
        } => {
            let outcome = commands::hist(&pattern, n, sample, seed, &limits)?;
            if !n.is_single() {
                emit_per_file(&global, format, style, outcome)?;
                return Ok(ExitCode::SUCCESS);
            }
            outcome
        }
        Command::Table { n, m } => commands::table(n, m, &limits)?,
        Command::Extremal { criterion, m, n } => commands::extremal(criterion, m, n, &limits)?,
        Command::Moments {
            pattern,
            n,
            r,
            mode,
            central,
            variance_form,
        } => {
            let args = MomentArgs {
                orders: r,
                mode,
                central,
                variance_form,
            };
            commands::moments(&pattern, n, &args)?
        }
        Command::Gaussian {
            pattern,
            n,
            sample,
            seed,
        } => commands::gaussian(&pattern, n, sample, seed)?,
        Command::Repro { no_diff } => {
            let dir = global
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from("repro-out"));
            for line in repro::run(&dir, &limits, no_diff)? {
                println!("{line}");
            }
            return Ok(ExitCode::SUCCESS);
        }
    };

    let findings = emit(&global, format, style, outcome)?;
    Ok(finding_status(&findings))
}

fn finding_status(findings: &[Finding]) -> ExitCode {
    if findings.is_empty() {
        return ExitCode::SUCCESS;
    }
    for f in findings {
        eprintln!("finding [{}]: {}", f.kind, f.detail);
    }
    ExitCode::from(EXIT_FINDING)
}

/// Runs `write` against the output file, or stdout when none is given.
fn with_sink<F>(path: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_at(p))?;
            let mut w = BufWriter::new(file);
            write(&mut w).map_err(io_at(p))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w).map_err(CliError::from)
        }
    }
}

fn emit(
    global: &GlobalOpts,
    format: Format,
    style: FloatStyle,
    outcome: Outcome,
) -> Result<Vec<Finding>, CliError> {
    with_sink(global.output.as_deref(), |w| {
        for artifact in &outcome.artifacts {
            artifact.records.write_to(&mut *w, format, style)?;
        }
        Ok(())
    })?;
    Ok(outcome.findings)
}

/// One file per artifact inside the `--output` directory; concatenated on
/// stdout without one.
fn emit_per_file(
    global: &GlobalOpts,
    format: Format,
    style: FloatStyle,
    outcome: Outcome,
) -> Result<(), CliError> {
    let Some(dir) = global.output.as_deref() else {
        emit(global, format, style, outcome)?;
        return Ok(());
    };
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    for artifact in &outcome.artifacts {
        let path = dir.join(format!("{}.{}", artifact.stem, format.extension()));
        with_sink(Some(&path), |w| artifact.records.write_to(w, format, style))?;
    }
    Ok(())
}

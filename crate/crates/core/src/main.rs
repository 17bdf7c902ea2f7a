use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rcalg::report::{from_json, render, Format, Report};
use rcalg::spec::{read_spec, RunSpec};
use rcalg::{run, Result};

/// Builds and verifies finite-stage Boolean algebra constructions.
///
/// Exit status: 0 when no invariant is violated, 1 when some is, 2 on errors.
#[derive(Parser)]
#[command(name = "rcalg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a spec file.
    Run {
        spec: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Override the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the spec's budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run the brute-force oracle suite.
    Selftest {
        #[command(flatten)]
        out: Output,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-render a JSON report.
    Render {
        report: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Record wall-clock time per section.
    #[arg(long)]
    timings: bool,
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| rcalg::Error::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(spec: &RunSpec, out: &Output) -> Result<Report> {
    let report = run::run(spec, out.timings)?;
    let path = out
        .output
        .clone()
        .or_else(|| spec.output.as_ref().map(PathBuf::from));
    emit(&render(&report, out.format), path.as_ref())?;
    Ok(report)
}

fn main_inner(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run {
            spec,
            out,
            seed,
            budget,
        } => {
            let mut spec = read_spec(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            if budget.is_some() {
                spec.budget = budget;
            }
            spec.check()?;
            let r = execute(&spec, &out).map_err(|e| {
                rcalg::Error::Usage(format!("{} run failed: {e}", spec.kind.name()))
            })?;
            Ok(r.exit_code())
        }
        Command::Selftest { out, seed } => Ok(execute(&RunSpec::selftest(seed), &out)?.exit_code()),
        Command::Render {
            report,
            output,
            format,
        } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| rcalg::Error::Io(format!("{}: {e}", report.display())))?;
            let r = from_json(&text)?;
            emit(&render(&r, format), output.as_ref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("rcalg: {e}");
            ExitCode::from(2)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use levy_bounds::Theorem;
use levy_bounds_cli::plot::{render, PlotKind};
use levy_bounds_cli::{run, CliError, Report, Scenario};

#[derive(Parser)]
#[command(name = "levy-bounds", version, about = "Distance bounds between Lévy processes, checked by simulation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write CSV and JSON reports.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Draw an SVG chart from a JSON report.
    Plot {
        report: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["scaling", "sandwich", "decay"]))]
        kind: String,
        /// Output file; defaults to `<report stem>_<kind>.svg` next to the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every theorem tag with its constants and rigor status.
    ListTheorems,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Run { file, out, seed, samples } => {
            let sc = Scenario::load(&file)?;
            let start = Instant::now();
            let report = run(&sc, samples, seed)?;
            for p in report.write(&out)? {
                println!("wrote {}", p.display());
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let verdict = if report.passed { "PASS" } else { "FAIL" };
            println!(
                "{}: {verdict} ({} rows, {} failing) in {:.1} s",
                sc.id,
                report.rows.len(),
                report.failures(),
                start.elapsed().as_secs_f64()
            );
            Ok(report.passed)
        }
        Cmd::Plot { report, kind, out } => {
            let kind: PlotKind = kind.parse().map_err(|msg| CliError::Schema { file: "--kind".into(), msg })?;
            let r = Report::load(&report)?;
            let svg = render(&r, kind)?;
            let path = out.unwrap_or_else(|| {
                let stem =
                    report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
                report.with_file_name(format!("{stem}_{}.svg", kind.name()))
            });
            std::fs::write(&path, svg)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Cmd::ListTheorems => {
            // a closed pipe (`| head`) is not an error
            let mut out = std::io::stdout().lock();
            for th in Theorem::ALL {
                let info = th.info();
                let line = format!(
                    "{}\n  source:    {}\n  constants: {}\n  rigor:     {}",
                    th.name(),
                    info.source,
                    info.constants,
                    info.rigor
                );
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            Ok(true)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use attsync_cli::{plot, run, sweep, CliError, PlotKind};
use clap::{Parser, Subcommand};

/// Finite-time attitude synchronization: scenario runner and figures.
#[derive(Parser)]
#[command(name = "attsync", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario; writes a trajectory CSV and a JSON report.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Draw an SVG figure from a trajectory CSV.
    Plot {
        trajectory: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a seeded scenario over derived seeds; prints a JSON summary.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Write the summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, out_dir } => {
            let out = run(&scenario, &out_dir)?;
            let m = &out.report.monitors;
            match (m.consensus_time, m.singularity_time) {
                (_, Some(t)) => println!("singularity: max_i |x_i| reached pi at t = {t}"),
                (Some(t), None) => println!("consensus at t = {t}"),
                (None, None) => println!("no consensus by t = {}", m.final_time),
            }
            println!("wrote {}", out.trajectory_path.display());
            println!("wrote {}", out.report_path.display());
        }
        Command::Plot { trajectory, kind, out } => {
            let path = plot(&trajectory, kind, out.as_deref())?;
            println!("wrote {}", path.display());
        }
        Command::Sweep {
            scenario,
            count,
            seed,
            out,
        } => {
            let summary = sweep(&scenario, count, seed)?;
            let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
            json.push('\n');
            match out {
                Some(path) => std::fs::write(&path, json).map_err(|source| CliError::Write { path, source })?,
                None => print!("{json}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

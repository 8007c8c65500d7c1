use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fwm_vapor_cli::run::output_dir;
use fwm_vapor_cli::{load_config, run_scenario, Command, RunError};

#[derive(Parser)]
#[command(name = "fwm-vapor", version, about = "Four-wave-mixing image propagation in a thermal vapor")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Zeroth-order density matrix
    SteadyState(Io),
    /// k-resolved susceptibilities
    Susceptibility(Io),
    /// Propagate the configured beam and record metrics and snapshots
    Propagate(Io),
    /// Output power and width versus pump rate
    SweepPump(Io),
    /// Density that cancels diffraction of the dominant mode
    Calibrate(Io),
}

#[derive(Args)]
struct Io {
    /// Scenario config, or a run_meta.json from an earlier run
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(command: Command, io: Io) -> Result<(PathBuf, serde_json::Value), (RunError, Option<PathBuf>)> {
    let (config, _) = load_config(&io.config).map_err(|e| (e.into(), io.out.clone()))?;
    let base = io.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let out = output_dir(io.out, &config, &base);
    let summary = run_scenario(command, &config, &base, &out).map_err(|e| (e, Some(out.clone())))?;
    Ok((out, summary))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, io) = match cli.command {
        Cmd::SteadyState(io) => (Command::SteadyState, io),
        Cmd::Susceptibility(io) => (Command::Susceptibility, io),
        Cmd::Propagate(io) => (Command::Propagate, io),
        Cmd::SweepPump(io) => (Command::SweepPump, io),
        Cmd::Calibrate(io) => (Command::Calibrate, io),
    };
    let start = Instant::now();
    match run(command, io) {
        Ok((out, summary)) => {
            println!("{}", serde_json::json!({ "ok": true, "command": command.name(), "out": out, "summary": summary }));
            eprintln!("[{}] done in {:.2?}", command.name(), start.elapsed());
            ExitCode::SUCCESS
        }
        Err((err, out)) => {
            let report = err.to_json();
            if let Some(dir) = out {
                if std::fs::create_dir_all(&dir).is_ok() {
                    let _ = std::fs::write(dir.join("error.json"), report.to_string());
                }
            }
            eprintln!("{report}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

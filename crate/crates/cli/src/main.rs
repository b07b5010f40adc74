use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use pdlab_cli::{run, sweep, CliError, RunOptions, SweepOptions, SweepParam};

#[derive(Parser)]
#[command(name = "pdlab", version, about = "Projection-method asymptotics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses of one experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed (and PDLAB_SEED).
        #[arg(long, env = "PDLAB_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Sweep one parameter and tabulate headline scalars.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, env = "PDLAB_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Build a certified slow instance from a one-column rates CSV.
    Slow {
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
    },
}

fn dispatch(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Run { config, seed, out, jobs } => {
            let summary = run(&RunOptions { config, seed, out, jobs })?;
            println!("report: {}", summary.report.display());
            if !summary.failed.is_empty() {
                eprintln!("failed checks in: {}", summary.failed.join(", "));
            }
            Ok(summary.exit_code())
        }
        Command::Sweep {
            config,
            param,
            from,
            to,
            steps,
            seed,
            out,
            jobs,
        } => {
            let summary = sweep(&SweepOptions {
                config,
                param,
                from,
                to,
                steps,
                seed,
                out,
                jobs,
            })?;
            println!("sweep: {}", summary.csv.display());
            let failed = summary.failed_rows();
            if failed.is_empty() {
                Ok(0)
            } else {
                for r in summary.rows.iter().filter(|r| !r.failed.is_empty()) {
                    eprintln!("row {} failed checks in: {}", r.index, r.failed.join(", "));
                }
                Ok(2)
            }
        }
        Command::Slow { rates, out, svg } => {
            let s = pdlab_cli::slow::slow(&rates, &out, svg)?;
            println!("slow instance: dimension {}, kappa {:e}, bundle {}", s.dimension, s.kappa, s.dir.display());
            Ok(if s.passed { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

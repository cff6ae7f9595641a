use clap::{Parser, Subcommand};
use srg_cli::{cmd_analyze, cmd_nyquist, cmd_plot, cmd_validate, init_threads, PlotKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "srg",
    version,
    about = "Stability certificates and L2-gain bounds for Lur'e feedback loops"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify the loop and print a JSON report (exit 0 certified, 2 not)
    Analyze {
        config: PathBuf,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count encirclements of -1 (exit 0 when the closed loop is stable)
    Nyquist {
        config: PathBuf,
        /// Write the response curve as CSV (omega,re,im)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an SVG figure
    Plot {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = PlotKind::ExtendedSrg)]
        what: PlotKind,
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
    /// Replay graph containment and gain claims against simulations (exit 3 on falsification)
    Validate {
        config: PathBuf,
        /// Also write the check report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    init_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let result = match cli.cmd {
        Cmd::Analyze { config, out } => cmd_analyze(&config, out.as_deref()),
        Cmd::Nyquist { config, out } => cmd_nyquist(&config, out.as_deref()),
        Cmd::Plot { config, what, out } => cmd_plot(&config, what, &out),
        Cmd::Validate { config, out } => cmd_validate(&config, out.as_deref()),
    };
    match result {
        Ok(o) => {
            print!("{}", o.stdout);
            ExitCode::from(o.code.clamp(0, 255) as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

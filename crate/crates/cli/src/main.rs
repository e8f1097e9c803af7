//! `sixj`: compute, export and verify screens of orthonormal 6j symbols.

mod compute;
mod failure;
mod ninej_check;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "sixj", version, about = "Screens of orthonormal Wigner 6j symbols")]
struct Cli {
    /// Cap on worker threads for every parallel section.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a screen and export grids and curves.
    Compute(compute::ComputeArgs),
    /// Run the invariant suites and print a check report.
    Verify(verify::VerifyArgs),
    /// Check the 9j recurrence on random stencils and its h = 0 reduction.
    NinejCheck(ninej_check::NinejArgs),
}

/// Screen parameters in TwoJ units (twice the spin).
#[derive(Args, Debug, Clone, Copy)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 60)]
    two_a: u32,
    #[arg(long, default_value_t = 90)]
    two_b: u32,
    #[arg(long, default_value_t = 120)]
    two_c: u32,
    #[arg(long, default_value_t = 110)]
    two_d: u32,
}

impl ParamArgs {
    pub fn params(&self) -> Result<sixj_screen::ScreenParams, Failure> {
        sixj_screen::ScreenParams::new(self.two_a, self.two_b, self.two_c, self.two_d).map_err(|e| Failure::Usage(e.to_string()))
    }
}

/// Where output files go.
#[derive(Args, Debug, Clone)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = "SIXJ_OUTPUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn init_threads(threads: Option<u32>) -> Result<(), Failure> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot set thread count: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Compute(a) => compute::run(a),
        Command::Verify(a) => verify::run(a),
        Command::NinejCheck(a) => ninej_check::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

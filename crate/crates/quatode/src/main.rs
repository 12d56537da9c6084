use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quatode::commands;
use quatode::verify::{self, Options};
use quatode::{CliError, Result, Scenario};

#[derive(Parser)]
#[command(name = "quatode", version, about = "Solve and verify second-order quaternionic ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduction of order, particular solution and fitted constants for a
    /// constant-coefficient scenario.
    Solve {
        file: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integrate an IVP with RK4 and write the trajectory as CSV.
    Integrate {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Step size; overrides the scenario's `h`.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Wronskian variants, modulus and Dieudonné determinant at one point.
    Wronskian {
        file: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x: f64,
    },
    /// Run the golden checks for the worked examples.
    VerifyPaper {
        /// Print the check names without running them.
        #[arg(long)]
        list: bool,
        /// Add this amount to the real part of b in Example 1 (negative control).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb: f64,
    },
}

/// Like `println!`, but a closed stdout (e.g. piping into `head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { file, json } => {
            let report = commands::solve(&Scenario::from_path(&file)?)?;
            say!("{report}");
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report).expect("reports contain only plain data");
                write_file(&path, &(text + "\n"))?;
            }
        }
        Command::Integrate { file, out, h } => {
            let table = commands::integrate(&Scenario::from_path(&file)?, h)?;
            let handle = File::create(&out).map_err(|source| CliError::Write { path: out.clone(), source })?;
            table.write_csv(BufWriter::new(handle))?;
            let last = table.last();
            say!("wrote {} rows to {} ({}, h = {})", table.rows.len(), out.display(), table.method, table.h);
            say!("Psi({})  = {}", last.x, last.psi);
            say!("Psi'({}) = {}", last.x, last.dpsi);
            say!("max residual norm (finite differences): {:e}", table.max_residual());
        }
        Command::Wronskian { file, x } => {
            say!("{}", commands::wronskian(&Scenario::from_path(&file)?, x)?);
        }
        Command::VerifyPaper { list, perturb } => {
            if list {
                for name in verify::names() {
                    say!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            if !perturb.is_finite() {
                return Err(CliError::validation("perturb", "must be finite"));
            }
            let results = verify::run_all(&Options { perturb });
            for r in &results {
                say!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            say!("{} passed, {failed} failed", results.len() - failed);
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

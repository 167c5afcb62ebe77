//! Command-line front end: argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::scenario::{
    decompose_network, noise_table, render_decomposition, render_noise_table, run_scenario, write_scenario_outputs,
    CliError, Format, NetworkFile, NoiseTableRequest, Scenario,
};

#[derive(Debug, Parser)]
#[command(name = "cvcomb", version, about = "Gaussian simulation of spatial-comb cluster states")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write `<name>_witness.csv` and `<name>_graph.json`.
    Simulate { config: PathBuf },
    /// Bloch-Messiah decomposition of a network file.
    Decompose { network: PathBuf },
    /// Closed-form and simulated homodyne noise over parameter grids.
    NoiseTable {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        gains: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        etas: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        misalignments: Vec<f64>,
        /// Efficiencies of the stray modes (default: one mode at eta/2).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        stray_etas: Option<Vec<f64>>,
    },
}

/// Output of a successful command: files written, or text for stdout.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Files(Vec<PathBuf>),
    Stdout(String),
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Simulate { config } => {
            let scenario = Scenario::load(config)?;
            let out = run_scenario(&scenario)?;
            let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            write_scenario_outputs(&out, &dir, cli.format).map(Outcome::Files)
        }
        Command::Decompose { network } => {
            let net = NetworkFile::load(network)?;
            let body = render_decomposition(&decompose_network(&net)?, cli.format)?;
            let stem = network.file_stem().map_or("network".into(), |s| s.to_string_lossy().into_owned());
            emit(cli, &format!("{stem}_decomposition"), body)
        }
        Command::NoiseTable {
            gains,
            etas,
            misalignments,
            stray_etas,
        } => {
            let req = NoiseTableRequest {
                gains: gains.clone(),
                etas: etas.clone(),
                misalignments: misalignments.clone(),
                stray_etas: stray_etas.clone(),
            };
            let body = render_noise_table(&noise_table(&req)?, cli.format)?;
            emit(cli, "noise_table", body)
        }
    }
}

fn emit(cli: &Cli, stem: &str, body: String) -> Result<Outcome, CliError> {
    match &cli.out_dir {
        None => Ok(Outcome::Stdout(body)),
        Some(dir) => {
            let ext = match cli.format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            std::fs::create_dir_all(dir).map_err(|e| CliError::Contract(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(format!("{stem}.{ext}"));
            std::fs::write(&path, body).map_err(|e| CliError::Contract(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome::Files(vec![path]))
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(Outcome::Stdout(text)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return 4;
            }
            0
        }
        Ok(Outcome::Files(paths)) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

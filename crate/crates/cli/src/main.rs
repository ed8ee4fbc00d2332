use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coulomb_qed::trotter::Fault;
use coulomb_qed_cli::commands;
use coulomb_qed_cli::config::{parse_dims, Auto, Overrides, RunConfig};
use coulomb_qed_cli::{CliError, EXIT_OK, EXIT_VERIFY_FAILED};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "cqed", version, about = "Coulomb-gauge lattice QED: resource bounds, verification, evolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Qubit, step and gate-cost bounds.
    Resources,
    /// Structural and numerical checks; exit 1 on any failure.
    Verify,
    /// Exact and Trotterized evolution side by side.
    Evolve,
    /// Abstract circuit as JSON lines.
    EmitCircuit,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FaultArg {
    Hermiticity,
}

#[derive(Args, Debug)]
struct Flags {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_dims, value_name = "X,Y,Z")]
    dims: Option<[usize; 3]>,
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    #[arg(long, global = true)]
    wilson: Option<f64>,
    #[arg(long, global = true)]
    energy: Option<f64>,
    /// Treat --energy as the shifted energy E'.
    #[arg(long = "energy-shifted", global = true)]
    energy_shifted: bool,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    time: Option<f64>,
    /// Trotter steps, or "auto".
    #[arg(long, global = true)]
    steps: Option<Auto<usize>>,
    /// Qubits per gauge register, or "auto".
    #[arg(long = "n-a", global = true)]
    n_a: Option<Auto<usize>>,
    /// Field cutoff of the simulated registers, or "auto".
    #[arg(long = "a-max", global = true)]
    a_max: Option<Auto<f64>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Commutator constant from slot norms instead of the asymptotic form.
    #[arg(long = "numeric-norms", global = true)]
    numeric_norms: bool,
    /// Transverse current coupling on or off.
    #[arg(long = "transverse-hi", global = true, num_args = 0..=1, default_missing_value = "true")]
    transverse_hi: Option<bool>,
    /// Corrupt one piece so that verification must fail.
    #[arg(long = "inject-fault", global = true)]
    inject_fault: Option<FaultArg>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            dims: self.dims,
            g: self.g,
            mass: self.mass,
            wilson: self.wilson,
            energy: self.energy,
            energy_shifted: self.energy_shifted,
            epsilon: self.epsilon,
            time: self.time,
            steps: self.steps,
            n_a: self.n_a,
            a_max: self.a_max,
            seed: self.seed,
            out: self.out.clone(),
            numeric_norms: self.numeric_norms,
            transverse_hi: self.transverse_hi,
            fault: self.inject_fault.map(|f| match f {
                FaultArg::Hermiticity => Fault::Hermiticity,
            }),
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let config = RunConfig::load(cli.flags.config.as_deref(), &cli.flags.overrides())?;
    let out = config.out.as_deref();
    match cli.command {
        Command::Resources => write_output(out, &json(&commands::resources(&config)?)?)?,
        Command::Verify => {
            let report = commands::verify(&config)?;
            write_output(out, &json(&report)?)?;
            if !report.report.passed {
                for c in report.report.failures() {
                    eprintln!("failed: {} ({})", c.name, c.detail);
                }
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Evolve => write_output(out, &json(&commands::evolve(&config)?)?)?,
        Command::EmitCircuit => {
            let (header, ops) = commands::circuit(&config)?;
            write_output(out, &commands::circuit_lines(&header, &ops)?)?;
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(coulomb_qed_cli::EXIT_CONFIG),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cqed: {e}");
            e.exit_code()
        }
    }
}

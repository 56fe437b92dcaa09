//! `bulkqc`: run circuits, verify gadgets, sweep fault rates and run the
//! algorithm demos of the ensemble simulator.

mod demo;
mod gadget;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bulkqc::codes::{CodeName, CodeSpec};
use bulkqc::ensemble::{run_exact, run_monte_carlo_with, EnsembleReadout, MonteCarloOptions};
use bulkqc::gadgets::{failure_sweep, n_full_program, SweepRow, DEFAULT_N_REP};
use bulkqc::noise::NoiseModel;
use bulkqc::simcore::{parse_circuit, Backend};
use bulkqc::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 1;
const DEFAULT_MOLECULES: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "bulkqc",
    version,
    about = "Ensemble quantum computation simulator"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "BULKQC_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of molecules (ensemble members) to sample.
    #[arg(long, global = true, env = "BULKQC_MOLECULES")]
    pub molecules: Option<u64>,
    /// Fault rate for `simulate`, a comma-separated list for `sweep`, or the
    /// output probability for `demo rng`.
    #[arg(long, global = true, env = "BULKQC_P")]
    pub p: Option<String>,
    /// Code for gadgets and sweeps.
    #[arg(long, global = true, env = "BULKQC_CODE")]
    pub code: Option<String>,
    #[arg(long, global = true, env = "BULKQC_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, env = "BULKQC_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "BULKQC_WORKERS")]
    pub workers: Option<usize>,
    /// Collapse control-only qubits by sampling once they are final.
    #[arg(long, global = true, env = "BULKQC_DEFERRED_SAMPLING")]
    pub deferred_sampling: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a circuit file and print the per-qubit readout.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
        backend: BackendArg,
        /// Read single-computer bit samples instead of expectations.
        #[arg(long)]
        sample_bits: bool,
    },
    /// Verify a gadget noise-free, and optionally under every single fault.
    Gadget(gadget::GadgetArgs),
    /// Logical failure rate of a gadget against the fault rate.
    Sweep {
        #[arg(default_value = "n_full")]
        gadget: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_N_REP)]
        n_rep: usize,
    },
    /// Algorithm demonstrations.
    Demo(demo::DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Auto,
    Dense,
    Sparse,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Dense => Backend::Dense,
            BackendArg::Sparse => Backend::Sparse,
        }
    }
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Ok(String),
    /// Output is still written, but the exit status reports failure.
    VerificationFailed(String),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_cap_exceeded() => 3,
            CliError::Core(
                Error::Parse { .. } | Error::InvalidParameter(_) | Error::Unsupported(_),
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) if e.is_cap_exceeded() => {
                format!("{e}\nhint: rerun with --deferred-sampling to collapse control-only qubits early")
            }
            CliError::Core(e) => e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn parse_f64(name: &str, s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("invalid value for --{name}: '{s}'")))
}

pub fn code_of(global: &Global, default: CodeName) -> CliResult<CodeSpec> {
    match &global.code {
        None => Ok(CodeSpec::new(default)),
        Some(s) => Ok(CodeSpec::new(s.parse::<CodeName>()?)),
    }
}

pub fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

pub fn readout_output(r: &EnsembleReadout, format: Format) -> String {
    match format {
        Format::Json => r.to_json() + "\n",
        Format::Csv => r.to_csv(),
    }
}

fn simulate(
    global: &Global,
    file: &PathBuf,
    backend: Backend,
    sample_bits: bool,
) -> CliResult<Outcome> {
    let text =
        fs::read_to_string(file).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
    let circuit = parse_circuit(&text).map_err(|e| match e {
        Error::Parse { .. } => CliError::Usage(format!("{}: {e}", file.display())),
        e => CliError::Core(e),
    })?;
    let p = match &global.p {
        Some(s) => parse_f64("p", s)?,
        None => 0.0,
    };
    let readout = if p == 0.0 && global.molecules.is_none() && !sample_bits {
        run_exact(&circuit, backend)?
    } else {
        let mut opts =
            MonteCarloOptions::new(global.molecules.unwrap_or(DEFAULT_MOLECULES), global.seed);
        opts.backend = backend;
        opts.sample_bits = sample_bits;
        run_monte_carlo_with(&circuit, &NoiseModel::uniform(p)?, &opts)?
    };
    Ok(Outcome::Ok(readout_output(&readout, global.format)))
}

fn sweep(global: &Global, gadget: &str, trials: u64, n_rep: usize) -> CliResult<Outcome> {
    let code = code_of(global, CodeName::Bitflip3)?;
    let program = match gadget {
        "n_full" => n_full_program(&code, n_rep, false)?,
        "n1" => n_full_program(&code, 1, false)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep gadget '{other}' (expected n_full or n1)"
            )))
        }
    };
    let ps = match &global.p {
        None => vec![0.0, 1e-3, 3e-3, 1e-2],
        Some(list) => list
            .split(',')
            .map(|s| parse_f64("p", s))
            .collect::<CliResult<Vec<_>>>()?,
    };
    if let Some(bad) = ps.iter().find(|&&p| !(0.0..=0.1).contains(&p)) {
        return Err(CliError::Usage(format!(
            "sweep rates must lie in [0, 0.1], got {bad}"
        )));
    }
    let rows = failure_sweep(&program, &code, &ps, trials, global.seed)?;
    Ok(Outcome::Ok(match global.format {
        Format::Csv => {
            let mut s = String::from(SweepRow::CSV_HEADER);
            s.push('\n');
            for r in &rows {
                s.push_str(&r.to_csv());
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&serde_json::json!({
            "gadget": gadget,
            "code": code.name.to_string(),
            "n_rep": n_rep,
            "seed": global.seed,
            "rows": rows,
        })),
    }))
}

fn run(cli: Cli) -> CliResult<Outcome> {
    if let Some(w) = cli.global.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Simulate {
            file,
            backend,
            sample_bits,
        } => simulate(g, file, (*backend).into(), *sample_bits),
        Command::Gadget(args) => gadget::run(g, args),
        Command::Sweep {
            gadget,
            trials,
            n_rep,
        } => sweep(g, gadget, *trials, *n_rep),
        Command::Demo(args) => demo::run(g, args),
    }
}

fn emit(global: &Global, text: &str) -> CliResult<()> {
    match &global.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = cli.global.clone();
    let result = run(cli).and_then(|outcome| match outcome {
        Outcome::Ok(text) => emit(&global, &text).map(|_| 0),
        Outcome::VerificationFailed(text) => emit(&global, &text).map(|_| 4),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

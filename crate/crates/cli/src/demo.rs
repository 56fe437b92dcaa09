use bulkqc::algorithms::*;
use bulkqc::simcore::StateVector;
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::{parse_f64, readout_output, to_json, CliError, CliResult, Format, Global, Outcome};

const DEFAULT_MULTI_MOLECULES: u64 = 10_000;

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[command(subcommand)]
    demo: Demo,
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// One qubit reading 2p − 1 (set p with --p).
    Rng,
    /// Teleport cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
    Teleport {
        #[arg(long, value_enum, default_value_t = ModeArg::Quantum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },
    /// Order finding with verification and randomization of bad results.
    Shor {
        #[arg(long, default_value_t = 15)]
        n: u64,
        #[arg(long, default_value_t = 7)]
        x: u64,
        #[arg(long, value_enum, default_value_t = ShorModeArg::Distribution)]
        shor_mode: ShorModeArg,
    },
    /// Smallest and largest of several solutions via in-molecule sorting.
    GroverMulti {
        #[arg(long, default_value_t = 6)]
        bits: usize,
        #[arg(long, value_delimiter = ',', default_value = "5,40")]
        solutions: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        computers: usize,
        /// Keep the first and last registers even when they agree.
        #[arg(long)]
        no_randomize: bool,
    },
    /// Lexicographically first solution by binary search over prefixes.
    GroverBinary {
        #[arg(long, default_value_t = 8)]
        bits: usize,
        #[arg(long, value_delimiter = ',', default_value = "42")]
        solutions: Vec<u64>,
        #[arg(long, value_enum, default_value_t = ExistenceArg::Simulated)]
        existence: ExistenceArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Standard,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShorModeArg {
    Distribution,
    FullCircuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExistenceArg {
    Exact,
    Simulated,
}

/// Nontrivial factors of n from the order r of x, when r is even.
fn factors_from_order(n: u64, x: u64, r: u64) -> Option<(u64, u64)> {
    if !r.is_multiple_of(2) {
        return None;
    }
    let h = mod_pow(x, r / 2, n);
    if h == n - 1 {
        return None;
    }
    let f = gcd(h + 1, n);
    (f != 1 && f != n).then_some((f.min(n / f), f.max(n / f)))
}

pub fn run(global: &Global, args: &DemoArgs) -> CliResult<Outcome> {
    let seed = global.seed;
    let value = match &args.demo {
        Demo::Rng => {
            let p = match &global.p {
                Some(s) => parse_f64("p", s)?,
                None => 0.5,
            };
            let readout = rng_demo(p)?;
            if global.format == Format::Csv {
                return Ok(Outcome::Ok(readout_output(&readout, Format::Csv)));
            }
            json!({ "demo": "rng", "p": p, "readout": readout })
        }
        Demo::Teleport { mode, theta, phi } => {
            let input = StateVector::qubit(
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), *phi),
            )?;
            let mode = match mode {
                ModeArg::Standard => TeleportMode::Standard,
                ModeArg::Quantum => TeleportMode::Quantum,
            };
            let report = teleport(&input, mode)?;
            if global.format == Format::Csv {
                return Ok(Outcome::Ok(readout_output(&report.readout, Format::Csv)));
            }
            json!({ "demo": "teleport", "theta": theta, "phi": phi, "report": report })
        }
        Demo::Shor { n, x, shor_mode } => {
            let inst = ShorInstance::new(*n, *x)?;
            let mode = match shor_mode {
                ShorModeArg::Distribution => ShorMode::Distribution,
                ShorModeArg::FullCircuit => ShorMode::FullCircuit,
            };
            let report = shor_ensemble(&inst, global.molecules, seed, mode)?;
            if global.format == Format::Csv {
                return Ok(Outcome::Ok(readout_output(&report.readout, Format::Csv)));
            }
            let factors = report.decoded.and_then(|r| factors_from_order(*n, *x, r));
            let value = json!({
                "demo": "shor",
                "mode": mode,
                "report": report,
                "factors": factors,
            });
            if report.decoded.is_none_or(|r| !is_order(*x, *n, r)) {
                return Ok(Outcome::VerificationFailed(to_json(&value)));
            }
            value
        }
        Demo::GroverMulti {
            bits,
            solutions,
            computers,
            no_randomize,
        } => {
            let inst = GroverInstance::from_solutions(*bits, solutions)?.with_computers(*computers);
            let molecules = global.molecules.unwrap_or(DEFAULT_MULTI_MOLECULES);
            let mut opts = MultiSolutionOptions::new(molecules, seed);
            opts.randomize = !no_randomize;
            let report = grover_multi_solution(&inst, &opts)?;
            if global.format == Format::Csv {
                return Ok(Outcome::Ok(readout_output(&report.readout, Format::Csv)));
            }
            let naive = naive_readout(&inst, molecules, seed)?;
            json!({ "demo": "grover-multi", "report": report, "naive_readout": naive })
        }
        Demo::GroverBinary {
            bits,
            solutions,
            existence,
        } => {
            let inst = GroverInstance::from_solutions(*bits, solutions)?;
            let test = match existence {
                ExistenceArg::Exact => ExistenceTest::Exact,
                ExistenceArg::Simulated => ExistenceTest::Simulated { seed },
            };
            let outcome = grover_binary_search(&inst, test)?;
            if global.format == Format::Csv {
                return Err(CliError::Usage("grover-binary output is JSON only".into()));
            }
            json!({ "demo": "grover-binary", "bits": bits, "result": outcome })
        }
    };
    Ok(Outcome::Ok(to_json(&value)))
}

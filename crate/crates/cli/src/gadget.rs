use std::f64::consts::PI;

use bulkqc::codes::{encode_blocks, CodeName, CodeSpec};
use bulkqc::gadgets::*;
use bulkqc::noise::{all_single_faults, single_faults_with, FaultLocation, FaultPattern};
use bulkqc::simcore::backend::key_bit;
use bulkqc::simcore::{reduced_fidelity, run_circuit, Backend, Pauli, SimState, StateVector};
use bulkqc::Result;
use clap::{Args, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::{code_of, to_json, CliError, CliResult, Format, Global, Outcome};

const TOL: f64 = 1e-9;

#[derive(Args, Debug)]
pub struct GadgetArgs {
    #[arg(value_enum)]
    name: GadgetName,
    #[arg(long, value_enum, default_value_t = FaultSet::None)]
    faults: FaultSet,
    #[arg(long, default_value_t = DEFAULT_N_REP)]
    n_rep: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
enum GadgetName {
    N1,
    NFull,
    Psi0,
    T,
    AndState,
    Toffoli,
    Recover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultSet {
    None,
    Single,
}

#[derive(Debug, Serialize)]
struct Case {
    name: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Case {
    fn state(name: impl Into<String>, fidelity: f64, purity: Option<f64>) -> Case {
        Case {
            name: name.into(),
            passed: fidelity >= 1.0 - TOL && purity.is_none_or(|p| p >= 1.0 - TOL),
            fidelity: Some(fidelity),
            purity,
            detail: None,
        }
    }

    fn flag(name: impl Into<String>, passed: bool, detail: String) -> Case {
        Case {
            name: name.into(),
            passed,
            fidelity: None,
            purity: None,
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    gadget: GadgetName,
    code: String,
    mode: SimMode,
    n_rep: usize,
    passed: usize,
    failed: usize,
    cases: Vec<Case>,
}

fn amp(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn logical(code: &CodeSpec, amps: Vec<C64>) -> Result<SimState> {
    Ok(SimState::Sparse(encode_blocks(
        code,
        &StateVector::from_unnormalized(amps)?,
    )?))
}

fn single_qubit_inputs() -> Vec<(&'static str, [C64; 2])> {
    vec![
        ("|0>", [amp(1.0, 0.0), amp(0.0, 0.0)]),
        ("|1>", [amp(0.0, 0.0), amp(1.0, 0.0)]),
        ("|+>", [amp(1.0, 0.0), amp(1.0, 0.0)]),
        ("0.6|0> + 0.8i|1>", [amp(0.6, 0.0), amp(0.0, 0.8)]),
    ]
}

/// Majority-decoded register equals `want` on every branch of the state.
fn register_reads(r: &GadgetReport, want: bool) -> bool {
    let reg = &r.classical_registers[0];
    r.output_state
        .entries()
        .iter()
        .all(|(k, a)| a.norm_sqr() < 1e-14 || reg.decode_key(k) == want)
}

fn n_truth_table(code: &CodeSpec, n_rep: usize, opts: &RunOptions) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for logical_bit in [false, true] {
        for init in [false, true] {
            let input = encoded_bit(code, logical_bit);
            let r = n_full(code, &input, n_rep, init, opts, &FaultPattern::none())?;
            let (_, want) = n_gate_contract(logical_bit, init);
            let f = r.data_fidelity(&input)?;
            cases.push(Case {
                passed: register_reads(&r, want) && f >= 1.0 - TOL,
                ..Case::state(
                    format!("|{}>_L, register {}", logical_bit as u8, init as u8),
                    f,
                    None,
                )
            });
        }
    }
    Ok(cases)
}

fn n1_noise_free(code: &CodeSpec) -> Result<Vec<Case>> {
    let c = build_n1(code)?;
    let mut cases = Vec::new();
    for logical_bit in [false, true] {
        let input = encoded_bit(code, logical_bit);
        let mut s = SimState::product(
            &[
                input.clone(),
                SimState::zero(c.num_qubits() - code.n, Backend::Sparse)?,
            ],
            Backend::Sparse,
        )?;
        run_circuit(&mut s, &c, &FaultPattern::none())?;
        let reads = s
            .entries()
            .iter()
            .all(|(k, a)| a.norm_sqr() < 1e-14 || key_bit(k, code.n) == logical_bit);
        let f = reduced_fidelity(&s, &(0..code.n).collect::<Vec<_>>(), &input)?;
        cases.push(Case {
            passed: reads && f >= 1.0 - TOL,
            ..Case::state(format!("N1 on |{}>_L", logical_bit as u8), f, None)
        });
    }
    Ok(cases)
}

/// Every single fault in 𝒩 built from n_rep 𝒩₁ instances; X faults only
/// for the bit-flip code, which does not protect phases.
fn n_single_faults(code: &CodeSpec, n_rep: usize) -> Result<Case> {
    let program = n_full_program(code, n_rep, false)?;
    let patterns = if code.name == CodeName::Bitflip3 {
        single_faults_with(&program.circuit, &[Pauli::X])
    } else {
        all_single_faults(&program.circuit)
    };
    let mut good = 0;
    let mut total = 0;
    for logical_bit in [false, true] {
        let input = encoded_bit(code, logical_bit);
        for f in &patterns {
            let r = program.run(std::slice::from_ref(&input), &RunOptions::exact(), f)?;
            total += 1;
            good += register_reads(&r, logical_bit) as usize;
        }
    }
    Ok(Case::flag(
        "single faults",
        good == total,
        format!("{good} of {total} fault patterns decode correctly"),
    ))
}

fn t_cases(code: &CodeSpec, n_rep: usize, opts: &RunOptions) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for (name, [a, b]) in single_qubit_inputs() {
        let input = logical(code, vec![a, b])?;
        let r = t_gadget(code, &input, n_rep, opts, &FaultPattern::none())?;
        let want = logical(code, vec![a, b * C64::from_polar(1.0, PI / 4.0)])?;
        cases.push(Case::state(
            name,
            r.data_fidelity(&want)?,
            Some(r.data_purity()?),
        ));
    }
    Ok(cases)
}

fn toffoli_cases(code: &CodeSpec, n_rep: usize, opts: &RunOptions) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for idx in 0..8usize {
        let bits = [(idx >> 2) & 1 == 1, (idx >> 1) & 1 == 1, idx & 1 == 1];
        let inputs: Vec<SimState> = bits.iter().map(|&b| encoded_bit(code, b)).collect();
        let r = toffoli_gadget(code, &inputs, n_rep, opts, &FaultPattern::none())?;
        let out = [bits[0], bits[1], bits[2] ^ (bits[0] & bits[1])];
        let want: Vec<SimState> = out.iter().map(|&b| encoded_bit(code, b)).collect();
        let want = SimState::product(&want, Backend::Sparse)?;
        cases.push(Case::state(
            format!("|{idx:03b}>_L"),
            r.data_fidelity(&want)?,
            Some(r.data_purity()?),
        ));
    }
    let one = amp(1.0, 0.0);
    let plus = encoded(code, one, one)?;
    let inputs = [encoded_bit(code, true), encoded_bit(code, true), plus];
    let r = toffoli_gadget(code, &inputs, n_rep, opts, &FaultPattern::none())?;
    let mut want = vec![amp(0.0, 0.0); 8];
    want[0b110] = one;
    want[0b111] = one;
    cases.push(Case::state(
        "|1>_L|1>_L|+>_L",
        r.data_fidelity(&logical(code, want)?)?,
        Some(r.data_purity()?),
    ));
    Ok(cases)
}

fn recover_cases(
    code: &CodeSpec,
    n_rep: usize,
    opts: &RunOptions,
    single: bool,
) -> Result<Vec<Case>> {
    let program = recover_program(code, n_rep)?;
    let mut cases = vec![Case::flag(
        "no collapse",
        !program.uses_collapse(),
        "circuit contains no measurement or collapse step".into(),
    )];
    for (name, [a, b]) in single_qubit_inputs() {
        let target = logical(code, vec![a, b])?;
        let r = program.run(std::slice::from_ref(&target), opts, &FaultPattern::none())?;
        cases.push(Case::state(name, r.data_fidelity(&target)?, None));
        if single {
            let mut worst: f64 = 1.0;
            for q in 0..code.n {
                for p in Pauli::ALL {
                    let f = FaultPattern::single(FaultLocation::input(q), p);
                    let r = program.run(std::slice::from_ref(&target), opts, &f)?;
                    worst = worst.min(r.data_fidelity(&target)?);
                }
            }
            cases.push(Case::state(
                format!("{name}, every single-qubit Pauli"),
                worst,
                None,
            ));
        }
    }
    Ok(cases)
}

fn eigen_case(spec: &EigenSpec, code: &CodeSpec, phi0: &SimState, phi1: &SimState) -> Case {
    match check_eigen(spec, code, phi0, phi1) {
        Ok(()) => Case::flag(
            "eigen identities",
            true,
            "U|phi0> = |phi0>, U|phi1> = -|phi1>".into(),
        ),
        Err(e) => Case::flag("eigen identities", false, e.to_string()),
    }
}

pub fn run(global: &Global, args: &GadgetArgs) -> CliResult<Outcome> {
    let code = code_of(global, CodeName::Steane7)?;
    let opts = if global.deferred_sampling {
        RunOptions::deferred(global.seed)
    } else {
        RunOptions::exact()
    };
    let single = args.faults == FaultSet::Single;
    let n = args.n_rep;
    if single
        && !matches!(
            args.name,
            GadgetName::N1 | GadgetName::NFull | GadgetName::Recover
        )
    {
        return Err(CliError::Usage(
            "--faults single is available for n1, n_full and recover".into(),
        ));
    }
    let cases = match args.name {
        GadgetName::N1 => {
            let mut cases = n1_noise_free(&code)?;
            if single {
                cases.push(n_single_faults(&code, n)?);
            }
            cases
        }
        GadgetName::NFull => {
            let mut cases = n_truth_table(&code, n, &opts)?;
            if single {
                cases.push(n_single_faults(&code, n)?);
            }
            cases
        }
        GadgetName::Psi0 => {
            let r = prepare_psi0(&code, n, &opts)?;
            let (phi0, phi1) = (psi0_target(&code)?, psi1_target(&code)?);
            vec![
                Case::state(
                    "|psi0> from |+>_L",
                    r.data_fidelity(&phi0)?,
                    Some(r.data_purity()?),
                ),
                eigen_case(&psi0_u_spec(&code), &code, &phi0, &phi1),
            ]
        }
        GadgetName::AndState => {
            let r = prepare_and_state(&code, n, &opts)?;
            let (and0, and1) = (and_target(&code)?, and_bar_target(&code)?);
            vec![
                Case::state(
                    "|AND> from |+++>_L",
                    r.data_fidelity(&and0)?,
                    Some(r.data_purity()?),
                ),
                eigen_case(&and_u_spec(), &code, &and0, &and1),
            ]
        }
        GadgetName::T => t_cases(&code, n, &opts)?,
        GadgetName::Toffoli => toffoli_cases(&code, n, &opts)?,
        GadgetName::Recover => recover_cases(&code, n, &opts, single)?,
    };
    let passed = cases.iter().filter(|c| c.passed).count();
    let summary = Summary {
        gadget: args.name,
        code: code.name.to_string(),
        mode: opts.mode,
        n_rep: n,
        passed,
        failed: cases.len() - passed,
        cases,
    };
    let text = match global.format {
        Format::Json => to_json(&summary),
        Format::Csv => {
            let mut s = String::from("case,passed,fidelity,purity\n");
            for c in &summary.cases {
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                s.push_str(&format!(
                    "\"{}\",{},{},{}\n",
                    c.name,
                    c.passed,
                    opt(c.fidelity),
                    opt(c.purity)
                ));
            }
            s
        }
    };
    Ok(if summary.failed == 0 {
        Outcome::Ok(text)
    } else {
        Outcome::VerificationFailed(text)
    })
}

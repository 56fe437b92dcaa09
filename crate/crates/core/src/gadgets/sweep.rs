use serde::Serialize;

use super::{encoded_bit, GadgetProgram, RunOptions};
use crate::codes::CodeSpec;
use crate::ensemble::aggregate;
use crate::error::{Error, Result};
use crate::noise::{enumerate_locations, sample_from, trial_rng, NoiseModel};
use crate::simcore::run::sample_basis;
use crate::simcore::Backend;

/// One row of a logical-failure sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub failures: u64,
    pub trials: u64,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub stderr: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "p,failures,trials,rate,stderr";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.p, self.failures, self.trials, self.rate, self.stderr
        )
    }
}

/// Monte-Carlo logical failure rate of a gadget whose first input block
/// holds an encoded basis state and whose first register should read it.
/// Trials alternate between logical 0 and 1. A trial fails when a basis
/// outcome sampled from the final state decodes the register wrongly.
pub fn failure_sweep(
    program: &GadgetProgram,
    code: &CodeSpec,
    ps: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if program.input_blocks.len() != 1 || program.registers.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs one input block and a register".into(),
        ));
    }
    let locations = enumerate_locations(&program.circuit);
    let opts = RunOptions {
        backend: Backend::Sparse,
        ..RunOptions::exact()
    };
    let inputs = [encoded_bit(code, false), encoded_bit(code, true)];
    ps.iter()
        .enumerate()
        .map(|(i, &p)| {
            let model = NoiseModel::uniform(p)?;
            let stream = seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let (sum, _) = aggregate(trials, 1, |t| {
                let mut rng = trial_rng(stream, t);
                let faults = sample_from(&locations, &model, &mut rng);
                if faults.is_empty() {
                    return Ok(vec![0.0]);
                }
                let bit = t % 2 == 1;
                let report = program.run(&[inputs[bit as usize].clone()], &opts, &faults)?;
                let key = sample_basis(&report.output_state, &mut rng);
                Ok(vec![
                    (report.classical_registers[0].decode_key(&key) != bit) as u8 as f64,
                ])
            })?;
            let failures = sum[0].round() as u64;
            let rate = failures as f64 / trials.max(1) as f64;
            Ok(SweepRow {
                p,
                failures,
                trials,
                rate,
                stderr: (rate * (1.0 - rate) / trials.max(1) as f64).sqrt(),
            })
        })
        .collect()
}

/// Least-squares slope of log(rate) against log(p) over rows with p > 0
/// and at least one failure.
pub fn log_log_slope(rows: &[SweepRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.p > 0.0 && r.failures > 0)
        .map(|r| (r.p.ln(), r.rate.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::n_full_program;

    #[test]
    fn zero_rate_has_no_failures() {
        let code = CodeSpec::bitflip3();
        let prog = n_full_program(&code, 3, false).unwrap();
        let rows = failure_sweep(&prog, &code, &[0.0], 200, 1).unwrap();
        assert_eq!(rows[0].failures, 0);
        assert_eq!(rows[0].to_csv(), "0,0,200,0,0");
    }

    #[test]
    fn slope_of_exact_square_law() {
        let rows: Vec<SweepRow> = [1e-3, 1e-2]
            .iter()
            .map(|&p| SweepRow {
                p,
                failures: 1,
                trials: 1,
                rate: 5.0 * p * p,
                stderr: 0.0,
            })
            .collect();
        assert!((log_log_slope(&rows).unwrap() - 2.0).abs() < 1e-12);
    }
}

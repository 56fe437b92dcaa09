use bulkqc::ensemble::*;
use bulkqc::noise::{enumerate_locations, FaultPattern, NoiseModel};
use bulkqc::simcore::{run_circuit, Backend, Circuit, Gate, Pauli, QuantumState, StateVector};
use proptest::prelude::*;

fn small_circuit() -> Circuit {
    let mut c = Circuit::new(2);
    c.push(Gate::h(), &[0]).unwrap();
    c.push(Gate::cnot(), &[0, 1]).unwrap();
    c.push(Gate::rx(0.7), &[1]).unwrap();
    c
}

/// Average readout over every fault pattern, weighted by its probability.
fn enumerated_average(c: &Circuit, p: f64) -> Vec<f64> {
    let locs = enumerate_locations(c);
    let mut avg = vec![0.0; c.num_qubits()];
    let total = 4usize.pow(locs.len() as u32);
    for code in 0..total {
        let mut entries = Vec::new();
        let mut weight = 1.0;
        let mut k = code;
        for loc in &locs {
            match k % 4 {
                0 => weight *= 1.0 - p,
                d => {
                    weight *= p / 3.0;
                    entries.push((*loc, Pauli::ALL[d - 1]));
                }
            }
            k /= 4;
        }
        let mut s = StateVector::zero(c.num_qubits()).unwrap();
        run_circuit(&mut s, c, &FaultPattern::new(entries).unwrap()).unwrap();
        for (a, e) in avg.iter_mut().zip(s.expectations()) {
            *a += weight * e;
        }
    }
    avg
}

#[test]
fn monte_carlo_matches_enumerated_average() {
    let c = small_circuit();
    assert!(enumerate_locations(&c).len() <= 20);
    let p = 0.01;
    let want = enumerated_average(&c, p);
    let r = run_monte_carlo(&c, &NoiseModel::uniform(p).unwrap(), 10_000, 21).unwrap();
    for q in 0..2 {
        let z = (r.means[q] - want[q]).abs() / r.std_errors[q].max(1e-15);
        assert!(z < 5.0, "qubit {q}: {} vs {} ({z} se)", r.means[q], want[q]);
    }
}

#[test]
fn standard_error_shrinks_as_inverse_sqrt() {
    let mut c = Circuit::new(2);
    c.push(Gate::ry(0.5), &[0]).unwrap();
    c.push(Gate::cnot(), &[0, 1]).unwrap();
    let model = NoiseModel::uniform(0.1).unwrap();
    let scaled: Vec<f64> = [100u64, 1000, 10_000]
        .iter()
        .map(|&m| run_monte_carlo(&c, &model, m, 5).unwrap().std_errors[1] * (m as f64).sqrt())
        .collect();
    // se·√M estimates the per-molecule stdev, which must agree across M.
    for s in &scaled {
        assert!((s / scaled[2] - 1.0).abs() < 0.3, "{scaled:?}");
    }
}

#[test]
fn readout_is_linear_over_branches() {
    let (theta, phi) = (1.1f64, 0.4f64);
    let mut c = Circuit::new(2);
    c.push(Gate::ry(theta), &[0]).unwrap();
    c.push(Gate::cnot(), &[0, 1]).unwrap();
    c.push(Gate::ry(phi), &[1]).unwrap();
    let r = run_exact(&c, Backend::Dense).unwrap();
    let p0 = (theta / 2.0).cos().powi(2);
    let want = p0 * phi.cos() + (1.0 - p0) * (-phi.cos());
    assert!((r.means[1] - want).abs() < 1e-10);
}

#[test]
fn rng_circuit_signal() {
    // √p|0⟩ + √(1−p)|1⟩ with p = 1/4 reads p·(+1) + (1−p)·(−1).
    let theta = 2.0 * (0.75f64).sqrt().asin();
    let mut c = Circuit::new(1);
    c.push(Gate::ry(theta), &[0]).unwrap();
    let r = run_exact(&c, Backend::Dense).unwrap();
    assert!((r.means[0] + 0.5).abs() < 1e-12);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let c = small_circuit();
    let model = NoiseModel::uniform(0.05).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&c, &model, 5000, 8).unwrap())
    };
    assert_eq!(run(1).to_json(), run(4).to_json());
}

#[test]
fn bit_sampling_mode_is_unbiased() {
    let c = small_circuit();
    let model = NoiseModel::uniform(0.0).unwrap();
    let mut opts = MonteCarloOptions::new(20_000, 2);
    opts.sample_bits = true;
    let r = run_monte_carlo_with(&c, &model, &opts).unwrap();
    let exact = run_exact(&c, Backend::Dense).unwrap();
    for q in 0..2 {
        assert!((r.means[q] - exact.means[q]).abs() < 5.0 * r.std_errors[q] + 1e-12);
    }
}

fn gate_strategy() -> impl Strategy<Value = (u8, usize, usize, f64)> {
    (0u8..8, 0usize..4, 0usize..4, -3.0f64..3.0)
}

fn build(ops: &[(u8, usize, usize, f64)]) -> Circuit {
    let mut c = Circuit::new(4);
    for &(kind, a, b, t) in ops {
        let b = if a == b { (b + 1) % 4 } else { b };
        let (g, targets) = match kind {
            0 => (Gate::h(), vec![a]),
            1 => (Gate::t(), vec![a]),
            2 => (Gate::rx(t), vec![a]),
            3 => (Gate::ry(t), vec![a]),
            4 => (Gate::cnot(), vec![a, b]),
            5 => (Gate::cz(), vec![a, b]),
            6 => (Gate::s(), vec![a]),
            _ => (Gate::swap(), vec![a, b]),
        };
        c.push(g, &targets).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]
    #[test]
    fn noiseless_monte_carlo_equals_exact(ops in prop::collection::vec(gate_strategy(), 0..12), m in 1u64..20) {
        let c = build(&ops);
        let exact = run_exact(&c, Backend::Dense).unwrap();
        let mc = run_monte_carlo(&c, &NoiseModel::uniform(0.0).unwrap(), m, 1).unwrap();
        for (a, b) in exact.means.iter().zip(&mc.means) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

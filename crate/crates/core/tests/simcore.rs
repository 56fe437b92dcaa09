use bulkqc::error::Error;
use bulkqc::noise::{FaultLocation, FaultPattern};
use bulkqc::simcore::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ket(amps: &[f64]) -> SimState {
    SimState::Dense(
        StateVector::from_unnormalized(amps.iter().map(|&a| C64::new(a, 0.0)).collect()).unwrap(),
    )
}

fn evolve(start: &SimState, c: &Circuit) -> SimState {
    let mut s = start.clone();
    run_circuit(&mut s, c, &FaultPattern::none()).unwrap();
    s
}

#[test]
fn phase_flows_back_through_cnot() {
    // (|0⟩+|1⟩)(|0⟩−|1⟩) → (|0⟩−|1⟩)(|0⟩−|1⟩)
    let mut c = Circuit::new(2);
    c.push(Gate::cnot(), &[0, 1]).unwrap();
    let out = evolve(&ket(&[1.0, -1.0, 1.0, -1.0]), &c);
    assert!(fidelity(&out, &ket(&[1.0, -1.0, -1.0, 1.0])).unwrap() >= 1.0 - 1e-12);
}

#[test]
fn cnot_propagates_bit_forward_and_phase_backward() {
    let mut c = Circuit::new(2);
    c.push(Gate::cnot(), &[0, 1]).unwrap();
    let zero = SimState::zero(2, Backend::Dense).unwrap();
    // X on the control before the gate equals X on both after it.
    let mut faulty = zero.clone();
    faulty.apply_gate(&Gate::x(), &[0]).unwrap();
    let faulty = evolve(&faulty, &c);
    let mut want = evolve(&zero, &c);
    want.apply_gate(&Gate::x(), &[0]).unwrap();
    want.apply_gate(&Gate::x(), &[1]).unwrap();
    assert!(fidelity(&faulty, &want).unwrap() > 1.0 - 1e-12);
    // Z on the target before the gate equals Z on both after it.
    let plus = ket(&[1.0, 1.0, 1.0, 1.0]);
    let mut faulty = plus.clone();
    faulty.apply_gate(&Gate::z(), &[1]).unwrap();
    let faulty = evolve(&faulty, &c);
    let mut want = evolve(&plus, &c);
    want.apply_gate(&Gate::z(), &[0]).unwrap();
    want.apply_gate(&Gate::z(), &[1]).unwrap();
    assert!(fidelity(&faulty, &want).unwrap() > 1.0 - 1e-12);
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Gate {
    let (a, b, c) = (
        rng.random::<f64>() * 6.0,
        rng.random::<f64>() * 6.0,
        rng.random::<f64>() * 6.0,
    );
    Gate::rz(a)
        .compose(&Gate::ry(b), "u")
        .unwrap()
        .compose(&Gate::rz(c), "u")
        .unwrap()
}

#[test]
fn controlled_gate_is_identity_on_control_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let u = random_unitary(&mut rng);
        let cu = controlled(&u).unwrap();
        let target = StateVector::qubit(
            C64::new(rng.random::<f64>(), rng.random::<f64>()),
            C64::new(rng.random::<f64>(), rng.random::<f64>()),
        )
        .unwrap();
        let start = SimState::Dense(StateVector::zero(1).unwrap().tensor(&target).unwrap());
        let mut c = Circuit::new(2);
        c.push(cu, &[0, 1]).unwrap();
        assert!(fidelity(&evolve(&start, &c), &start).unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn fault_pattern_equals_inserted_pauli() {
    let mut c = Circuit::new(3);
    c.push(Gate::h(), &[0]).unwrap();
    c.push(Gate::cnot(), &[0, 1]).unwrap();
    c.push(Gate::cnot(), &[1, 2]).unwrap();
    let zero = SimState::zero(3, Backend::Dense).unwrap();
    for pauli in Pauli::ALL {
        let mut faulty = zero.clone();
        run_circuit(
            &mut faulty,
            &c,
            &FaultPattern::single(FaultLocation::gate_output(1, 1), pauli),
        )
        .unwrap();
        let mut explicit = Circuit::new(3);
        explicit.push(Gate::h(), &[0]).unwrap();
        explicit.push(Gate::cnot(), &[0, 1]).unwrap();
        explicit.push(pauli.gate(), &[1]).unwrap();
        explicit.push(Gate::cnot(), &[1, 2]).unwrap();
        assert!(fidelity(&faulty, &evolve(&zero, &explicit)).unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn qubit_zero_is_most_significant() {
    let mut s = StateVector::zero(3).unwrap();
    s.apply_gate(&Gate::x(), &[0]).unwrap();
    assert!((s.amplitude(0b100).norm() - 1.0).abs() < 1e-12);
    let mut c = Circuit::new(2);
    c.push(Gate::x(), &[1]).unwrap();
    let dense = evolve(&SimState::zero(2, Backend::Dense).unwrap(), &c);
    let sparse = evolve(&SimState::zero(2, Backend::Sparse).unwrap(), &c);
    assert_eq!(dense.expectations(), vec![1.0, -1.0]);
    assert_eq!(sparse.expectations(), vec![1.0, -1.0]);
}

#[test]
fn parser_reports_line_and_column() {
    let err = parse_circuit("qubits 2\n0 H 0\n1 BOGUS 1\n").unwrap_err();
    assert!(
        matches!(
            err,
            Error::Parse {
                line: 3,
                column: 3,
                ..
            }
        ),
        "{err:?}"
    );
    assert!(matches!(
        parse_circuit("0 H 0\n"),
        Err(Error::Parse { line: 1, .. })
    ));
    let c = parse_circuit("init 01\n0 CNOT 1 0\n").unwrap();
    assert_eq!(c.input_labels(), &[false, true]);
}

fn op_strategy() -> impl Strategy<Value = (u8, usize, usize, usize, f64)> {
    (0u8..7, 0usize..5, 0usize..5, 0usize..5, -4.0f64..4.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn gates_preserve_norm(ops in prop::collection::vec(op_strategy(), 1..30)) {
        let mut dense = SimState::zero(5, Backend::Dense).unwrap();
        let mut sparse = SimState::zero(5, Backend::Sparse).unwrap();
        for (kind, a, b, c, t) in ops {
            let (b, c) = ((a + 1 + b % 4) % 5, (a + 1 + (b % 4 + 1 + c % 3) % 4) % 5);
            let (g, targets) = match kind {
                0 => (Gate::h(), vec![a]),
                1 => (Gate::rx(t), vec![a]),
                2 => (Gate::ry(t), vec![a]),
                3 => (Gate::cnot(), vec![a, b]),
                4 => (Gate::toffoli(), vec![a, b, c]),
                5 => (Gate::fredkin(), vec![a, b, c]),
                _ => (Gate::t(), vec![a]),
            };
            dense.apply_gate(&g, &targets).unwrap();
            sparse.apply_gate(&g, &targets).unwrap();
        }
        prop_assert!((dense.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(fidelity(&dense, &sparse).unwrap() > 1.0 - 1e-10);
    }
}

mod common;

use common::TestRng;
use rotosense_core::circuit::{
    circuit_bell_analyzer, circuit_n6_prep, circuit_n6_prep_with, circuit_tetra_prep,
    circuit_unitary, fidelity, run_circuit, Circuit, Gate, GateOp, N6Reading,
};
use rotosense_core::QubitState;

#[test]
fn circuits_preserve_norm() {
    let mut rng = TestRng::new(41);
    let mut circuits = vec![circuit_tetra_prep(), circuit_bell_analyzer()];
    circuits.extend(N6Reading::ALL.map(circuit_n6_prep_with));
    for c in &circuits {
        for _ in 0..50 {
            let s = rng.qubit_state(c.n_qubits());
            let out = run_circuit(c, &s).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() <= 1e-12);
        }
        assert!(circuit_unitary(c).unitarity_error() < 1e-12);
    }
}

#[test]
fn x_twice_is_identity() {
    let mut rng = TestRng::new(42);
    let c = Circuit::new(
        3,
        vec![Gate::single(GateOp::X, 1), Gate::single(GateOp::X, 1)],
    )
    .unwrap();
    for _ in 0..10 {
        let s = rng.qubit_state(3);
        let out = run_circuit(&c, &s).unwrap();
        assert!(common::max_abs_diff(out.amps(), s.amps()) <= 1e-12);
    }
}

#[test]
fn fidelity_examples() {
    let zero = QubitState::zero(1).unwrap();
    let one = QubitState::basis(1, 1).unwrap();
    let plus = QubitState::new(
        1,
        vec![rotosense_core::C64::new(1.0, 0.0), rotosense_core::C64::new(1.0, 0.0)],
    )
    .unwrap();
    assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
    assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
    assert!(fidelity(&zero, &QubitState::zero(2).unwrap()).is_err());
}

#[test]
fn structural_gate_counts() {
    assert_eq!(circuit_tetra_prep().gate_count(), 11);
    assert_eq!(circuit_n6_prep().gate_count(), 26);
    assert_eq!(circuit_bell_analyzer().gate_count(), 12);
}

//! Property tests for the algebraic and numerical invariants.

use cdsim::circuit::{gate_stats, optimize, overlap_up_to_phase, Circuit, Gate};
use cdsim::noise::{build_response_matrix, mitigate, ReadoutModel};
use cdsim::pauli::{PauliOp, PauliString, PauliSum};
use cdsim::state::StateVector;
use num_complex::Complex64;
use proptest::prelude::*;

fn pauli_op() -> impl Strategy<Value = PauliOp> {
    prop_oneof![
        Just(PauliOp::I),
        Just(PauliOp::X),
        Just(PauliOp::Y),
        Just(PauliOp::Z),
    ]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(pauli_op(), n).prop_map(move |ops| {
        PauliString::with_ops(n, &ops.iter().copied().enumerate().collect::<Vec<_>>())
    })
}

fn hermitian_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((pauli_string(n), -2.0f64..2.0), 1..6).prop_map(move |terms| {
        let mut sum = PauliSum::zero(n);
        for (string, coeff) in terms {
            sum.add_term(string, Complex64::new(coeff, 0.0)).unwrap();
        }
        sum
    })
}

fn normalized_state(n: usize) -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
        "state must have nonzero norm",
        move |amps| {
            let v: Vec<Complex64> = amps
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect();
            let mut s = StateVector::from_amplitudes(n, v).ok()?;
            if s.norm() < 1e-3 {
                return None;
            }
            s.normalize();
            Some(s)
        },
    )
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let q = 0..n;
    let q2 = 0..n;
    prop_oneof![
        (0..n, -3.0f64..3.0).prop_map(|(qubit, angle)| Gate::Rx { qubit, angle }),
        (0..n, -3.0f64..3.0).prop_map(|(qubit, angle)| Gate::Ry { qubit, angle }),
        (0..n, -3.0f64..3.0).prop_map(|(qubit, angle)| Gate::Rz { qubit, angle }),
        (q, q2).prop_filter_map("control differs from target", |(c, t)| {
            (c != t).then_some(Gate::Cnot {
                control: c,
                target: t,
            })
        }),
        (0..n).prop_map(|qubit| Gate::H { qubit }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_is_antisymmetric(a in hermitian_sum(3), b in hermitian_sum(3)) {
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        let sum = ab.add(&ba).unwrap();
        prop_assert!(sum.is_zero(), "[a,b] + [b,a] = {}", sum.to_text());
    }

    #[test]
    fn i_times_commutator_of_hermitians_is_hermitian(a in hermitian_sum(3), b in hermitian_sum(3)) {
        let bracket = a.commutator(&b).unwrap().scaled(Complex64::new(0.0, 1.0));
        prop_assert!(bracket.is_hermitian(1e-12));
    }

    #[test]
    fn commutator_matches_dense(a in hermitian_sum(2), b in hermitian_sum(2)) {
        let symbolic = a.commutator(&b).unwrap().to_dense().unwrap();
        let (ad, bd) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        let dense = &ad * &bd - &bd * &ad;
        prop_assert!((symbolic - dense).norm() < 1e-12);
    }

    #[test]
    fn trace_self_product_is_nonnegative(a in hermitian_sum(3)) {
        let value = a.trace_inner_product(&a).unwrap();
        prop_assert!(value.im.abs() < 1e-12);
        prop_assert!(value.re >= 0.0);
        prop_assert_eq!(value.re == 0.0, a.is_zero());
    }

    #[test]
    fn rotations_preserve_norm_and_reverse(
        state in normalized_state(3),
        string in pauli_string(3),
        theta in -2.0f64..2.0,
    ) {
        let mut s = state.clone();
        s.apply_pauli_rotation(&string, theta).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        s.apply_pauli_rotation(&string, -theta).unwrap();
        prop_assert!(s.distance(&state) < 1e-12);
    }

    #[test]
    fn optimize_preserves_the_unitary(gates in proptest::collection::vec(gate(3), 0..24), state in normalized_state(3)) {
        let circuit = Circuit { n_qubits: 3, gates };
        let slim = optimize(&circuit);
        let again = optimize(&slim);
        prop_assert_eq!(&slim.gates, &again.gates);
        prop_assert!(slim.gates.len() <= circuit.gates.len());
        let a = circuit.simulate(&state).unwrap();
        let b = slim.simulate(&state).unwrap();
        prop_assert!(overlap_up_to_phase(&a, &b) > 1.0 - 1e-10);
    }

    #[test]
    fn compile_then_optimize_matches_direct_plan_execution(
        entries in proptest::collection::vec((pauli_string(3), -1.5f64..1.5), 1..10),
        state in normalized_state(3),
    ) {
        // restrict to compilable weights
        let entries: Vec<_> = entries
            .into_iter()
            .filter(|(s, _)| s.weight() <= 2 && s.weight() >= 1)
            .collect();
        prop_assume!(!entries.is_empty());
        let mut direct = state.clone();
        for (string, theta) in &entries {
            direct.apply_pauli_rotation(string, *theta).unwrap();
        }
        let plan = cdsim::evolve::TrotterPlan {
            n_qubits: 3,
            dt: 1.0,
            steps: vec![cdsim::evolve::PlanStep { t: 1.0, lambda: 0.5, entries }],
        };
        let circuit = cdsim::circuit::compile(&plan).unwrap();
        for version in [&circuit, &optimize(&circuit)] {
            let simulated = version.simulate(&state).unwrap();
            prop_assert!(overlap_up_to_phase(&direct, &simulated) > 1.0 - 1e-10);
        }
    }

    #[test]
    fn gate_error_estimate_is_a_probability(
        rotations in 0usize..200,
        cnots in 0usize..200,
        eps_rot in 0.0f64..0.05,
        eps_cnot in 0.0f64..0.05,
    ) {
        let mut circuit = Circuit::new(2);
        for _ in 0..rotations {
            circuit.gates.push(Gate::Rx { qubit: 0, angle: 0.1 });
        }
        for _ in 0..cnots {
            circuit.gates.push(Gate::Cnot { control: 0, target: 1 });
        }
        let stats = gate_stats(&circuit, eps_rot, eps_cnot);
        prop_assert!((0.0..=1.0).contains(&stats.expected_error));
        prop_assert_eq!(stats.rotations, rotations);
        prop_assert_eq!(stats.cnots, cnots);
    }

    #[test]
    fn mitigation_round_trips_exact_distributions(
        raw in proptest::collection::vec(0.01f64..1.0, 8),
        p_err in 0.0f64..0.2,
    ) {
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let model = ReadoutModel::uniform(3, p_err).unwrap();
        let response = build_response_matrix(&model).unwrap();
        let noisy = response.apply(&probs).unwrap();
        let outcome = mitigate(&noisy, &response).unwrap();
        for (a, b) in outcome.mitigated.iter().zip(&probs) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(outcome.mitigated.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn response_matrix_is_column_stochastic(
        p10 in proptest::collection::vec(0.0f64..0.49, 2),
        p01 in proptest::collection::vec(0.0f64..0.49, 2),
    ) {
        let model = ReadoutModel::new(p10, p01).unwrap();
        let m = build_response_matrix(&model).unwrap();
        for j in 0..4 {
            let col: f64 = (0..4).map(|i| m.entry(i, j)).sum();
            prop_assert!((col - 1.0).abs() < 1e-12);
            for i in 0..4 {
                prop_assert!(m.entry(i, j) >= 0.0);
            }
        }
    }
}

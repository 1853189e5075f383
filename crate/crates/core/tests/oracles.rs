//! Cross-module oracle checks: symbolic algebra against dense brute force,
//! digitized evolution against the exact propagator, and the bundled
//! experiments against their independently computed reference values.

use cdsim::cd::{cd_term_for, CdMethod};
use cdsim::circuit::{compile, optimize, overlap_up_to_phase};
use cdsim::evolve::{build_plan, exact_evolve, run_plan, trotter_evolve, EvolveOptions};
use cdsim::models::{
    build_ising_chain, build_single_spin, build_zz_chain, Boundary, SpinChainSpec,
};
use cdsim::noise::{apply_readout_noise, build_response_matrix, mitigate, ReadoutModel};
use cdsim::pauli::{PauliString, PauliSum};
use num_complex::Complex64;

fn all_strings(n: usize) -> Vec<PauliString> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|s| letters.iter().map(move |&c| format!("{s}{c}")))
            .collect();
    }
    out.iter().map(|s| PauliString::parse(s).unwrap()).collect()
}

#[test]
fn multiply_is_phase_consistent_exhaustively_n3() {
    let strings = all_strings(3);
    for p in &strings {
        for q in &strings {
            let (phase, r) = p.multiply(q).unwrap();
            let lhs = p.to_dense() * q.to_dense();
            let rhs = r.to_dense() * phase;
            assert!((lhs - rhs).norm() < 1e-12, "{p} · {q}");
        }
    }
}

#[test]
fn multiply_is_associative_on_sampled_triples() {
    let strings = all_strings(2);
    for (i, a) in strings.iter().enumerate() {
        for (j, b) in strings.iter().enumerate() {
            let c = &strings[(i * 7 + j * 3) % strings.len()];
            let (p1, ab) = a.multiply(b).unwrap();
            let (p2, ab_c) = ab.multiply(c).unwrap();
            let (q1, bc) = b.multiply(c).unwrap();
            let (q2, a_bc) = a.multiply(&bc).unwrap();
            assert_eq!(ab_c, a_bc);
            assert!((p1 * p2 - q1 * q2).norm() < 1e-15);
        }
    }
}

fn pseudo_random_sum(n: usize, terms: usize, seed: u64) -> PauliSum {
    let strings = all_strings(n);
    let mut state = seed;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as f64 / (1u64 << 31) as f64 - 1.0
    };
    let mut sum = PauliSum::zero(n);
    for k in 0..terms {
        let idx = ((next().abs() * strings.len() as f64) as usize).min(strings.len() - 1);
        let _ = k;
        sum.add_term(strings[idx].clone(), Complex64::new(next(), 0.0))
            .unwrap();
    }
    sum
}

#[test]
fn commutator_matches_dense_brute_force() {
    for seed in 0..8u64 {
        let n = 2 + (seed % 3) as usize; // 2..4
        let a = pseudo_random_sum(n, 5, seed * 11 + 1);
        let b = pseudo_random_sum(n, 5, seed * 13 + 2);
        let symbolic = a.commutator(&b).unwrap().to_dense().unwrap();
        let (ad, bd) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        let dense = &ad * &bd - &bd * &ad;
        assert!((symbolic - dense).norm() < 1e-12, "seed {seed}");
    }
}

#[test]
fn single_spin_adiabatic_limit_proxy() {
    // long-time evolution without CD recovers the adiabatic result
    let problem = build_single_spin(-1.0, 1.0, 20.0, 0.2).unwrap();
    let cd = cd_term_for(CdMethod::None, &problem).unwrap();
    let result = trotter_evolve(&problem, &cd, false).unwrap();
    assert!(result.final_p_gs(&problem) >= 0.95);
}

#[test]
fn trotter_converges_monotonically_to_exact() {
    // bundled problems at N ≤ 3: fidelity deficit to the exact propagator
    // shrinks under every Δt halving
    let problems = [
        build_single_spin(-1.0, 1.0, 1.0, 0.2).unwrap(),
        build_ising_chain(
            &SpinChainSpec::uniform(2, -1.0, 1.0, -0.1, Boundary::Open),
            1.0,
            0.2,
        )
        .unwrap(),
        build_zz_chain(3, -1.0, -1.0, 1.0, 0.2).unwrap(),
    ];
    for base in &problems {
        let exact = exact_evolve(base, None).unwrap();
        let mut previous = f64::INFINITY;
        for halvings in 0..4 {
            let dt = base.dt / f64::powi(2.0, halvings);
            let mut problem = base.clone();
            problem.dt = dt;
            let cd = cd_term_for(CdMethod::None, &problem).unwrap();
            let state = trotter_evolve(&problem, &cd, false).unwrap().final_state;
            let deficit = 1.0 - state.fidelity(&exact).unwrap();
            assert!(
                deficit < previous,
                "deficit {deficit} did not shrink at dt {dt}"
            );
            previous = deficit;
        }
    }
}

#[test]
fn zz_chain_evolution_preserves_spin_flip_symmetry() {
    // uniform entangler chain: the propagator commutes with the global
    // X flip, so amplitudes are invariant under bit complement
    let problem = build_zz_chain(4, -1.0, -1.0, 0.4, 0.1).unwrap();
    let cd = cd_term_for(CdMethod::NestedCommutator(1), &problem).unwrap();
    let state = trotter_evolve(&problem, &cd, false).unwrap().final_state;
    let dim = state.dim();
    for b in 0..dim {
        let flipped = !b & (dim - 1);
        assert!(
            (state.amplitude(b) - state.amplitude(flipped)).norm() < 1e-10,
            "amplitude {b} vs {flipped}"
        );
    }
}

#[test]
fn compiled_plan_matches_direct_execution() {
    // the spec pair: compiled single-spin CD circuit against the plan run
    let problem = build_single_spin(-1.0, 1.0, 1.0, 0.2).unwrap();
    let cd = cd_term_for(CdMethod::Berry, &problem).unwrap();
    let plan = build_plan(&problem, &cd).unwrap();
    let direct = run_plan(&problem, &plan, &EvolveOptions::default())
        .unwrap()
        .final_state;
    let circuit = compile(&plan).unwrap();
    let via_circuit = circuit.simulate(&problem.initial_state).unwrap();
    assert!(overlap_up_to_phase(&direct, &via_circuit) > 1.0 - 1e-10);

    let optimized = optimize(&circuit);
    let via_optimized = optimized.simulate(&problem.initial_state).unwrap();
    assert!(overlap_up_to_phase(&direct, &via_optimized) > 1.0 - 1e-10);
}

#[test]
fn optimizer_shrinks_the_bell_circuit() {
    let problem = build_zz_chain(2, -1.0, -1.0, 0.03, 0.01).unwrap();
    let cd = cd_term_for(CdMethod::NestedCommutator(1), &problem).unwrap();
    let plan = build_plan(&problem, &cd).unwrap();
    let raw = compile(&plan).unwrap();
    let slim = optimize(&raw);
    assert!(slim.cnot_count() < raw.cnot_count());
    assert!(slim.rotation_count() < raw.rotation_count());
    let direct = run_plan(&problem, &plan, &EvolveOptions::default())
        .unwrap()
        .final_state;
    let simulated = slim.simulate(&problem.initial_state).unwrap();
    assert!(overlap_up_to_phase(&direct, &simulated) > 1.0 - 1e-10);
}

#[test]
fn ten_spin_weak_coupling_local_variational() {
    let spec = SpinChainSpec::uniform(10, -1.0, 1.0, -0.1, Boundary::Open);
    let problem = build_ising_chain(&spec, 1.0, 0.1).unwrap();
    let cd = cd_term_for(CdMethod::LocalVariational, &problem).unwrap();
    let result = trotter_evolve(&problem, &cd, false).unwrap();
    assert!(result.final_p_gs(&problem) >= 0.97);
}

#[test]
fn cd_step_count_advantage_on_bell() {
    // three CD steps prepare the entangled pair; the plain digitized
    // evolution at the same step width stays far away below 20 steps
    let bell = build_zz_chain(2, -1.0, -1.0, 0.03, 0.01).unwrap();
    let cd = cd_term_for(CdMethod::NestedCommutator(1), &bell).unwrap();
    let fid = trotter_evolve(&bell, &cd, false)
        .unwrap()
        .final_fidelity(&bell);
    assert!(fid >= 0.999);

    let mut best = 0.0f64;
    for steps in 1..20usize {
        let problem = build_zz_chain(2, -1.0, -1.0, steps as f64 * 0.1, 0.1).unwrap();
        let none = cd_term_for(CdMethod::None, &problem).unwrap();
        let f = trotter_evolve(&problem, &none, false)
            .unwrap()
            .final_fidelity(&problem);
        best = best.max(f);
    }
    assert!(best < 0.99, "plain evolution reached {best} below 20 steps");
}

#[test]
fn cd_fidelity_is_t_independent_at_fixed_steps() {
    // fixing the step count and shrinking T leaves the fidelity unchanged
    let mut values = Vec::new();
    for total_time in [0.003, 0.01, 0.03, 0.1, 0.3] {
        let problem = build_zz_chain(2, -1.0, -1.0, total_time, total_time / 3.0).unwrap();
        let cd = cd_term_for(CdMethod::NestedCommutator(1), &problem).unwrap();
        values.push(
            trotter_evolve(&problem, &cd, false)
                .unwrap()
                .final_fidelity(&problem),
        );
    }
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-3, "fidelity spread {spread} across T grid");
}

#[test]
fn exact_cd_oracle_against_dense_propagation() {
    // continuous evolution with the exact single-spin CD lands on the
    // target for several total times
    for total_time in [0.1, 0.5, 2.0] {
        let problem = build_single_spin(-1.0, 1.0, total_time, total_time / 5.0).unwrap();
        let cd = cd_term_for(CdMethod::Berry, &problem).unwrap();
        let state = exact_evolve(&problem, Some(&cd)).unwrap();
        assert!(state.fidelity(&problem.target_state).unwrap() > 1.0 - 1e-7);
    }
}

#[test]
fn mitigation_clipping_stays_at_shot_noise_scale() {
    let problem = build_zz_chain(2, -1.0, -1.0, 0.03, 0.01).unwrap();
    let cd = cd_term_for(CdMethod::NestedCommutator(1), &problem).unwrap();
    let probs = trotter_evolve(&problem, &cd, false)
        .unwrap()
        .final_state
        .probabilities();
    let model = ReadoutModel::uniform(2, 0.04).unwrap();
    let response = build_response_matrix(&model).unwrap();
    let shots = 8192u64;
    for seed in 0..20u64 {
        let histogram = apply_readout_noise(&probs, &model, seed, shots).unwrap();
        let outcome = mitigate(&histogram.frequencies(), &response).unwrap();
        assert!(
            outcome.clipped_mass <= 10.0 / (shots as f64).sqrt(),
            "seed {seed}: clipped {}",
            outcome.clipped_mass
        );
    }
}

#[test]
fn nc_order_improves_fidelity_monotonically() {
    for n in [3usize, 4, 5] {
        let problem = build_zz_chain(n, -1.0, -1.0, 0.006, 0.001).unwrap();
        let mut previous = 0.0;
        for order in 1..=3usize {
            let cd = cd_term_for(CdMethod::NestedCommutator(order), &problem).unwrap();
            let fidelity = trotter_evolve(&problem, &cd, false)
                .unwrap()
                .final_fidelity(&problem);
            assert!(
                fidelity >= previous - 1e-9,
                "N = {n}: order {order} gave {fidelity} after {previous}"
            );
            previous = fidelity;
        }
    }
}

#[test]
fn pauli_sum_text_golden() {
    let spec = SpinChainSpec::uniform(3, -1.0, 1.0, -0.1, Boundary::Open);
    let problem = build_ising_chain(&spec, 1.0, 0.2).unwrap();
    let golden = "\
-1.00000000000000000e0 0.00000000000000000e0 IIX\n\
1.00000000000000000e0 0.00000000000000000e0 IIZ\n\
-1.00000000000000000e0 0.00000000000000000e0 IXI\n\
1.00000000000000000e0 0.00000000000000000e0 IZI\n\
-1.00000000000000006e-1 0.00000000000000000e0 IZZ\n\
-1.00000000000000000e0 0.00000000000000000e0 XII\n\
1.00000000000000000e0 0.00000000000000000e0 ZII\n\
-1.00000000000000006e-1 0.00000000000000000e0 ZZI\n";
    let mid = problem.h_i.add(&problem.h_f).unwrap();
    assert_eq!(mid.to_text(), golden);
    assert_eq!(PauliSum::from_text(3, golden).unwrap(), mid);
}

mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqls::ansatz::*;
use vqls::cost::{effective_hamiltonian, CostEngine, CostKind};
use vqls::optimizer::{minimize, Method, TerminatedBy, TerminationRule};
use vqls::problem::{dense_solve_oracle, ising_qlsp, random_qlsp, LcuMatrix, LcuTerm, QlspInstance};
use vqls::simulator::{Circuit, Gate, Statevector};

fn random_alpha(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-3.2..3.2)).collect()
}

#[test]
fn hea_counts_follow_closed_form() {
    for n in 2..=12 {
        for layers in 1..=5 {
            let a = build_hea(n, layers).unwrap();
            assert_eq!((a.num_params(), a.gate_count()), hea_counts(n, layers));
            assert_eq!(a.num_params(), n + layers * (2 * n - 2));
            assert_eq!(a.gate_count(), n + 3 * layers * (n - 1));
        }
    }
    // count check only at 50 qubits
    let big = build_hea(50, 4).unwrap();
    assert_eq!((big.num_params(), big.gate_count()), (442, 638));
    assert!(build_hea(10, 0).is_err());
    assert!(build_hea(1, 2).is_err());
}

#[test]
fn hea_layer_layout() {
    let a = build_hea(3, 1).unwrap();
    let alpha: Vec<f64> = (0..a.num_params()).map(|i| i as f64 * 0.1).collect();
    let gates = a.to_gates(&alpha).unwrap();
    let ry = |q, k: usize| Gate::RotY { qubit: q, angle: k as f64 * 0.1 };
    let expect = vec![
        ry(0, 0),
        ry(1, 1),
        ry(2, 2),
        Gate::ControlledZ { control: 0, target: 1 },
        ry(0, 3),
        ry(1, 4),
        Gate::ControlledZ { control: 1, target: 2 },
        ry(1, 5),
        ry(2, 6),
    ];
    assert_eq!(gates, expect);
}

#[test]
fn hea_all_zero_prepares_zero_state() {
    let a = build_hea(10, 4).unwrap();
    let s = a.prepare_state(&vec![0.0; a.num_params()]).unwrap();
    assert_eq!(s, Statevector::zero(10).unwrap());
    assert!(a.prepare_state(&[0.0]).is_err());
}

#[test]
fn prepare_matches_bound_circuit_and_is_deterministic() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let a = build_hea_extended(3, 2).unwrap();
    let alpha = random_alpha(a.num_params(), &mut r);
    let s1 = a.prepare_state(&alpha).unwrap();
    let s2 = a.prepare_state(&alpha).unwrap();
    assert_eq!(s1, s2);
    let dense = circuit_dense(3, a.bind(&alpha).unwrap().gates());
    let expect = column(dense.column(0).as_slice());
    assert!(max_abs_diff(&expect, &column(s1.amplitudes())) < 1e-12);
}

#[test]
fn gate_list_round_trip_is_exact() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for a in [build_hea(4, 3).unwrap(), build_hea_extended(2, 1).unwrap(), build_variable(3, 1).unwrap()] {
        let alpha = random_alpha(a.num_params(), &mut r);
        let gates = a.to_gates(&alpha).unwrap();
        let text = serde_json::to_string(&gates).unwrap();
        let parsed: Vec<Gate> = serde_json::from_str(&text).unwrap();
        let back = Ansatz::from_gates(a.num_qubits(), a.family(), &parsed).unwrap();
        assert_eq!(back.params(), &alpha[..]);
        assert_eq!(back.slots(), a.slots());
        assert_eq!(back.to_gates(back.params()).unwrap(), gates);
    }
}

#[test]
fn qaoa_zero_angles_give_uniform_superposition() {
    let inst = ising_qlsp(3, 0.1, 10.0).unwrap();
    for driver in [DriverKind::GlobalHat, DriverKind::LocalHat] {
        let a = build_qaoa(&inst, QaoaSpec { p: 2, driver, driver_scale: 1.0 }).unwrap();
        assert_eq!(a.num_params(), 4);
        let s = a.prepare_state(&[0.0; 4]).unwrap();
        for amp in s.amplitudes() {
            assert!((amp - c(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn solution_is_a_zero_mode_of_both_drivers() {
    let inst = random_qlsp(3, 10.0, 0.5, 4).unwrap();
    let x0 = dense_solve_oracle(&inst).unwrap();
    for kind in [CostKind::GlobalHat, CostKind::LocalHat] {
        let h = effective_hamiltonian(&inst, kind).unwrap();
        let hx = h * column(x0.amplitudes());
        assert!(hx.iter().all(|v| v.norm() < 1e-9), "{kind}");
    }
}

#[test]
fn qaoa_driver_gates_are_unitary_and_match_fast_path() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let inst = ising_qlsp(3, 0.4, 8.0).unwrap();
    let a = build_qaoa(&inst, QaoaSpec { p: 2, driver: DriverKind::LocalHat, driver_scale: 3.0 }).unwrap();
    let alpha = random_alpha(4, &mut r);
    let circ = a.bind(&alpha).unwrap();
    let u = circ.dense().unwrap();
    assert!(max_abs_diff(&(u.adjoint() * &u), &eye(8)) < 1e-10);
    let fast = a.prepare_state(&alpha).unwrap();
    let slow = circ.prepare().unwrap();
    assert!((fast.inner(&slow).unwrap() - 1.0).norm() < 1e-10);
    assert!(a.first_shift_incompatible() == Some(0));
    assert!(Ansatz::from_gates(3, Family::Qaoa, circ.gates()).is_err());
}

#[test]
fn qaoa_rejects_bad_specs() {
    let inst = ising_qlsp(3, 0.1, 10.0).unwrap();
    assert!(build_qaoa(&inst, QaoaSpec { p: 0, driver: DriverKind::GlobalHat, driver_scale: 1.0 }).is_err());
    assert!(build_qaoa(&inst, QaoaSpec { p: 1, driver: DriverKind::GlobalHat, driver_scale: 0.0 }).is_err());
}

#[test]
fn scaled_driver_landscape_has_lower_minimum() {
    let kappa = 20.0;
    let inst = ising_qlsp(3, 0.1, kappa).unwrap();
    let engine = CostEngine::new(&inst).unwrap();
    let grid_min = |scale: f64| {
        let a = build_qaoa(&inst, QaoaSpec { p: 1, driver: DriverKind::GlobalHat, driver_scale: scale }).unwrap();
        let steps = 40;
        let mut best = f64::INFINITY;
        for i in 0..steps {
            for j in 0..steps {
                let t = |k: usize| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
                let x = a.prepare_state(&[t(i), t(j)]).unwrap();
                best = best.min(engine.value(CostKind::Global, &x).unwrap().value);
            }
        }
        best
    };
    let (scaled, plain) = (grid_min(kappa), grid_min(1.0));
    assert!(scaled <= plain, "scaled {scaled} vs plain {plain}");
}

#[test]
fn growth_preserves_every_cost() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..10 {
        let n = 2 + trial % 3;
        let inst = random_mixed_instance(n, &mut r);
        let engine = CostEngine::new(&inst).unwrap();
        let a = build_variable(n, 1).unwrap();
        let a = a.with_params(&random_alpha(a.num_params(), &mut r)).unwrap();
        let (grown, growth) = a.grow_variable(trial as u64).unwrap();
        assert_eq!(grown.num_params(), a.num_params() + GROWTH_BLOCK_SIZE);
        assert!(growth.qubit + 1 < n);
        let before = a.prepare_state(a.params()).unwrap();
        let after = grown.prepare_state(grown.params()).unwrap();
        for kind in CostKind::ALL {
            let (cb, ca) = (engine.value(kind, &before).unwrap().value, engine.value(kind, &after).unwrap().value);
            assert!((cb - ca).abs() <= 1e-12, "{kind}: {cb} vs {ca}");
        }
        let (again, _) = a.grow_variable(trial as u64).unwrap();
        assert_eq!(again.slots(), grown.slots());
    }
    assert!(build_hea(3, 1).unwrap().grow_variable(0).is_err());
}

#[test]
fn hea_reaches_real_product_targets() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..3 {
        let b = Circuit::new(
            2,
            vec![Gate::RotY { qubit: 0, angle: r.gen_range(-3.0..3.0) }, Gate::RotY { qubit: 1, angle: r.gen_range(-3.0..3.0) }],
        )
        .unwrap();
        let id = LcuMatrix::new(2, vec![LcuTerm::pauli(1.0, "II").unwrap()]).unwrap();
        let inst = QlspInstance::new(id, b, Some(1.0), "id").unwrap();
        let a = build_hea(2, 2).unwrap();
        // ε = 1e-3 with κ just above one makes the threshold ≈ 1e-6
        let rule = TerminationRule::new(1e-3, CostKind::Global, 1.0 + 1e-9, 2, 20_000);
        let trace = minimize(&inst, &a, CostKind::Global, Method::Powell, &rule, seed).unwrap();
        assert_eq!(trace.terminated_by, TerminatedBy::Threshold);
        assert!(trace.final_cost < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_states_are_normalized(n in 2usize..6, layers in 1usize..4, seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = build_hea(n, layers).unwrap();
        let s = a.prepare_state(&random_alpha(a.num_params(), &mut r)).unwrap();
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
        let inst = ising_qlsp(n, 0.2, 5.0).unwrap();
        let q = build_qaoa(&inst, QaoaSpec { p: 1, driver: DriverKind::LocalHat, driver_scale: 2.0 }).unwrap();
        let s = q.prepare_state(&random_alpha(2, &mut r)).unwrap();
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }
}

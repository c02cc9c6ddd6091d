//! The qubit-erasure example against a harmonic-oscillator bath, plus a few
//! cross-module consistency checks on worked numbers.

use approx::assert_abs_diff_eq;
use thermo_recover::channel::{is_gibbs_preserving, rotated_recovery_average, QuadratureSpec, Superoperator};
use thermo_recover::divergence::fidelity;
use thermo_recover::oscillator::OscillatorInstance;
use thermo_recover::random::{random_density_matrix, random_gibbs_preserving, random_thermal_operation, trial_rng};
use thermo_recover::thermo::{augment_with_wit, free_energy, gibbs_state, HamiltonianSpec, WitBattery, WitLevel};
use thermo_recover::workbounds::{delta, nano_invest_bound, AlphaGrid, WorkMode, WorkReport};
use thermo_recover::DensityMatrix;

const BETAS: [f64; 3] = [0.5, 1.0, 2.0];

#[test]
fn pure_target_costs_nothing() {
    for x in BETAS {
        let inst = OscillatorInstance::new(x, 1.0, None).unwrap();
        assert!(inst.invest_bound().abs() <= 1e-12);
        assert!(inst.invest_bound_pipeline().unwrap().abs() <= 1e-12);
    }
}

#[test]
fn erasing_the_thermal_state_costs_log_partition_function() {
    for x in BETAS {
        let z_s = 1.0 + (-x).exp();
        let inst = OscillatorInstance::new(x, 1.0 / z_s, None).unwrap();
        assert_abs_diff_eq!(inst.invest_bound(), z_s.ln(), epsilon = 1e-9);
        let h = inst.system_hamiltonian();
        let tau = gibbs_state(&h, x).unwrap().into_state();
        let ground = DensityMatrix::basis_state(2, 0).unwrap();
        let nano = nano_invest_bound(&tau, &ground, &tau, &AlphaGrid::default()).unwrap();
        assert_abs_diff_eq!(nano.value, inst.invest_bound(), epsilon = 1e-9);
    }
    let at_one = OscillatorInstance::new(1.0, 1.0 / (1.0 + (-1.0f64).exp()), None).unwrap();
    assert_abs_diff_eq!(at_one.invest_bound(), 0.313262, epsilon = 5e-7);
}

#[test]
fn bath_marginal_target() {
    for x in BETAS {
        let p0 = 1.0 - (-x).exp();
        let inst = OscillatorInstance::new(x, p0, None).unwrap();
        let expected = -(1.0 + (-2.0 * x).exp() - (-x).exp()).ln();
        assert_abs_diff_eq!(inst.invest_bound(), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(inst.invest_bound_pipeline().unwrap(), expected, epsilon = 1e-9);
    }
    let at_one = OscillatorInstance::new(1.0, 1.0 - (-1.0f64).exp(), None).unwrap();
    assert_abs_diff_eq!(at_one.closed_form_p0r(), 0.767456, epsilon = 5e-7);
    assert_abs_diff_eq!(at_one.invest_bound(), 0.264674, epsilon = 5e-7);
}

#[test]
fn recovered_ground_population_matches_matrices() {
    for x in BETAS {
        let lower = 1.0 - (-x).exp();
        for k in 0..50 {
            let p0 = lower + (1.0 - lower) * k as f64 / 49.0;
            let inst = OscillatorInstance::new(x, p0, None).unwrap();
            let pops = inst.reversal_populations().unwrap();
            assert!(pops.residual <= 1e-9);
            assert!(pops.p0r >= p0 * p0 - 1e-15);
            let forward = inst.forward_state().unwrap();
            assert_abs_diff_eq!(forward.matrix()[(0, 0)].re, p0, epsilon = 1e-9);
        }
    }
}

#[test]
fn oscillator_unitary_is_its_own_reversal() {
    let inst = OscillatorInstance::new(1.0, 0.8, None).unwrap();
    let t = inst.thermal_operation().unwrap();
    let forward = t.superoperator().unwrap();
    let back = t.reversal().superoperator().unwrap();
    assert!(forward.max_abs_diff(&back) < 1e-14);
    let unital = t.adjoint().unwrap().apply(&thermo_recover::ComplexMatrix::identity(2, 2)).unwrap();
    // the truncated bath leaves a ~1e-11 deficit
    assert!((unital - thermo_recover::ComplexMatrix::identity(2, 2)).iter().all(|z| z.norm() < 1e-9));
}

#[test]
fn std_report_for_thermalization() {
    // two-level, beta E = 1, rho = diag(0.9, 0.1) thermalizing
    let h = HamiltonianSpec::diagonal(&[0.0, 1.0]).unwrap();
    let tau = gibbs_state(&h, 1.0).unwrap().into_state();
    let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
    let r = WorkReport::compute(&rho, &tau, &h, 1.0, WorkMode::Std, &AlphaGrid::default(), None).unwrap();
    let t0 = 1.0 / (1.0 + (-1.0f64).exp());
    let kl = 0.9 * (0.9 / t0).ln() + 0.1 * (0.1 / (1.0 - t0)).ln();
    assert_abs_diff_eq!(r.delta, kl, epsilon = 1e-12);
    assert_abs_diff_eq!(r.delta, 0.088179, epsilon = 5e-7);
}

#[test]
fn wit_stores_exactly_its_gap() {
    let h = HamiltonianSpec::diagonal(&[0.0, 0.7, 1.3]).unwrap();
    let w = WitBattery::new(0.45).unwrap();
    let joint = w.joint_hamiltonian(&h).unwrap();
    let beta = 1.1;
    let mut rng = trial_rng(3, "wit", 0);
    for _ in 0..10 {
        let rho = random_density_matrix(3, &mut rng).unwrap();
        let sigma = random_density_matrix(3, &mut rng).unwrap();
        let up = free_energy(&augment_with_wit(&rho, &w, WitLevel::Excited).unwrap(), &joint, beta).unwrap();
        let down = free_energy(&augment_with_wit(&rho, &w, WitLevel::Ground).unwrap(), &joint, beta).unwrap();
        assert_abs_diff_eq!(up - down, w.gap(), epsilon = 1e-12);
        // F(rho (x) |0>) >= F(sigma (x) |1>) exactly when W <= F(rho) - F(sigma)
        let lhs = down;
        let rhs = free_energy(&augment_with_wit(&sigma, &w, WitLevel::Excited).unwrap(), &joint, beta).unwrap();
        let allowed = w.gap() <= free_energy(&rho, &h, beta).unwrap() - free_energy(&sigma, &h, beta).unwrap();
        assert_eq!(lhs >= rhs, allowed);
    }
}

#[test]
fn thermal_state_minimizes_free_energy() {
    let mut rng = trial_rng(4, "minf", 0);
    let h = HamiltonianSpec::diagonal(&[0.0, 0.5, 2.0]).unwrap();
    let f_tau = free_energy(gibbs_state(&h, 0.9).unwrap().state(), &h, 0.9).unwrap();
    for _ in 0..200 {
        let rho = random_density_matrix(3, &mut rng).unwrap();
        assert!(free_energy(&rho, &h, 0.9).unwrap() >= f_tau - 1e-12);
    }
}

#[test]
fn mixtures_of_thermal_operations_are_gibbs_preserving() {
    let mut rng = trial_rng(5, "mix", 0);
    let h = HamiltonianSpec::diagonal(&[0.0, 1.0, 1.0]).unwrap();
    let tau = gibbs_state(&h, 0.7).unwrap().into_state();
    let a = thermo_recover::random::random_thermal_operation_for(&h, 2, 0.7, &mut rng).unwrap();
    let b = thermo_recover::random::random_thermal_operation_for(&h, 3, 0.7, &mut rng).unwrap();
    let (sa, sb) = (a.superoperator().unwrap(), b.superoperator().unwrap());
    let mix = Superoperator::combination(&[(0.3, &sa), (0.7, &sb)]).unwrap();
    assert!(is_gibbs_preserving(&mix, &tau).unwrap());
    assert!(mix.is_completely_positive());
}

#[test]
fn rotated_average_is_converged_in_node_count() {
    let mut rng = trial_rng(6, "nodes", 0);
    let q = QuadratureSpec::default();
    for _ in 0..20 {
        let gp = random_gibbs_preserving(3, &[2, 3], 2, &mut rng).unwrap();
        let rho = random_density_matrix(3, &mut rng).unwrap();
        let sigma = gp.map.apply_state(&rho).unwrap();
        let coarse = rotated_recovery_average(&gp.map, &gp.tau, &sigma, &q).unwrap();
        let fine = rotated_recovery_average(&gp.map, &gp.tau, &sigma, &q.doubled()).unwrap();
        assert!(coarse.max_abs_diff(&fine) <= 1e-9);
        let gap = delta(&rho, &sigma, &gp.tau).unwrap();
        assert!(gap >= -2.0 * fidelity(&rho, &coarse).unwrap().root.ln() - 1e-10);
    }
}

#[test]
fn sampled_unitaries_fix_the_joint_gibbs_state() {
    let mut rng = trial_rng(7, "fix", 0);
    for _ in 0..50 {
        let t = random_thermal_operation(3, 3, &mut rng).unwrap();
        let tau = t.system_gibbs().state();
        let joint = thermo_recover::operator::tensor(tau, t.env_state()).unwrap();
        let out = t.apply_global(tau).unwrap();
        assert!(out.max_abs_diff(&joint) <= 1e-12);
        assert!(t.unitary().commutator_residual() <= 1e-10);
    }
}

//! Seeded inputs shared by the benchmarks.

use thermo_recover::channel::ThermalOperation;
use thermo_recover::random::{random_density_matrix, random_gibbs_preserving, random_thermal_operation, trial_rng, GibbsPreservingInstance};
use thermo_recover::DensityMatrix;

/// Two random full-rank states of dimension `d`.
pub fn state_pair(d: usize) -> (DensityMatrix, DensityMatrix) {
    let mut rng = trial_rng(1, "bench-states", d as u64);
    let a = random_density_matrix(d, &mut rng).expect("valid dimension");
    let b = random_density_matrix(d, &mut rng).expect("valid dimension");
    (a, b)
}

/// A thermal operation on `ds x db` with an input state and its image.
pub fn thermal_instance(ds: usize, db: usize) -> (ThermalOperation, DensityMatrix, DensityMatrix) {
    let mut rng = trial_rng(2, "bench-thermal", (ds * 100 + db) as u64);
    let t = random_thermal_operation(ds, db, &mut rng).expect("valid dimensions");
    let rho = random_density_matrix(ds, &mut rng).expect("valid dimension");
    let sigma = t.apply(&rho).expect("channel output");
    (t, rho, sigma)
}

/// A mixture of two thermal operations with an output state to recover.
pub fn gibbs_preserving_instance(ds: usize) -> (GibbsPreservingInstance, DensityMatrix) {
    let mut rng = trial_rng(3, "bench-gp", ds as u64);
    let gp = random_gibbs_preserving(ds, &[2, 3], 2, &mut rng).expect("valid dimensions");
    let rho = random_density_matrix(ds, &mut rng).expect("valid dimension");
    let sigma = gp.map.apply_state(&rho).expect("channel output");
    (gp, sigma)
}

//! Seeded generators for test instances.
//!
//! Every trial draws from its own ChaCha stream derived from
//! `(seed, suite, trial)`, so results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{sample_energy_conserving_unitary_with, Superoperator, ThermalOperation};
use crate::error::Result;
use crate::operator::{ComplexMatrix, DensityMatrix, HermitianOperator, C64};
use crate::thermo::HamiltonianSpec;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Independent stream for one trial of one suite.
pub fn trial_rng(seed: u64, suite: &str, trial: u64) -> ChaCha8Rng {
    let s = splitmix64(splitmix64(seed) ^ fnv1a(suite));
    ChaCha8Rng::seed_from_u64(splitmix64(s ^ trial))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `G G^dag / Tr` for a square Ginibre `G`; full rank with probability one.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let g = ginibre(dim, dim, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(crate::operator::hermitian_part(&m.unscale(tr)))
}

pub fn random_diagonal_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let w: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    DensityMatrix::diagonal(&w.iter().map(|x| x / total).collect::<Vec<_>>())
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    let psi: Vec<C64> = ginibre(dim, 1, rng).iter().copied().collect();
    DensityMatrix::pure(&psi)
}

/// Hermitian part of a Ginibre matrix.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(dim, dim, rng);
    HermitianOperator::new(crate::operator::hermitian_part(&g)).expect("Hermitian part is Hermitian")
}

/// Diagonal Hamiltonian with integer levels in `{0, 1, 2}`, so that system
/// and bath energies coincide often and the energy blocks are nontrivial.
pub fn random_hamiltonian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<HamiltonianSpec> {
    let mut energies: Vec<f64> = (0..dim).map(|_| rng.random_range(0..3) as f64).collect();
    energies[0] = 0.0;
    HamiltonianSpec::diagonal(&energies)
}

pub fn random_beta<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.5..1.5)
}

/// Thermal operation with a random system Hamiltonian.
pub fn random_thermal_operation<R: Rng + ?Sized>(
    system_dim: usize,
    bath_dim: usize,
    rng: &mut R,
) -> Result<ThermalOperation> {
    let hs = random_hamiltonian(system_dim, rng)?;
    let beta = random_beta(rng);
    random_thermal_operation_for(&hs, bath_dim, beta, rng)
}

/// Thermal operation on a given system and temperature, with a random bath
/// and a block-Haar energy-conserving unitary.
pub fn random_thermal_operation_for<R: Rng + ?Sized>(
    hs: &HamiltonianSpec,
    bath_dim: usize,
    beta: f64,
    rng: &mut R,
) -> Result<ThermalOperation> {
    let hb = random_hamiltonian(bath_dim, rng)?;
    let total = HamiltonianSpec::composite(&[hs, &hb])?;
    let v = sample_energy_conserving_unitary_with(&total, rng)?;
    ThermalOperation::from_unitary(v, hs.clone(), hb, Vec::new(), beta)
}

/// Gibbs-preserving channel built as a random convex mixture of thermal
/// operations sharing the system Hamiltonian and temperature.
#[derive(Debug, Clone)]
pub struct GibbsPreservingInstance {
    pub map: Superoperator,
    pub system: HamiltonianSpec,
    pub beta: f64,
    pub tau: DensityMatrix,
}

pub fn random_gibbs_preserving<R: Rng + ?Sized>(
    system_dim: usize,
    bath_dims: &[usize],
    components: usize,
    rng: &mut R,
) -> Result<GibbsPreservingInstance> {
    let hs = random_hamiltonian(system_dim, rng)?;
    let beta = random_beta(rng);
    let mut maps = Vec::with_capacity(components);
    let mut weights = Vec::with_capacity(components);
    for k in 0..components.max(1) {
        let db = bath_dims[k % bath_dims.len()];
        maps.push(random_thermal_operation_for(&hs, db, beta, rng)?.superoperator()?);
        weights.push(rng.random::<f64>() + 0.05);
    }
    let total: f64 = weights.iter().sum();
    let terms: Vec<(f64, &Superoperator)> = weights.iter().map(|w| w / total).zip(maps.iter()).collect();
    let map = Superoperator::combination(&terms)?;
    let tau = crate::thermo::gibbs_state(&hs, beta)?.into_state();
    Ok(GibbsPreservingInstance { map, system: hs, beta, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::is_gibbs_preserving;

    #[test]
    fn trial_streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(42, "chain", 3).random();
        let b: u64 = trial_rng(42, "chain", 3).random();
        let c: u64 = trial_rng(42, "chain", 4).random();
        let d: u64 = trial_rng(42, "petz", 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn random_states_are_full_rank() {
        let mut rng = trial_rng(1, "states", 0);
        for d in 1..5 {
            assert!(random_density_matrix(d, &mut rng).unwrap().is_full_rank());
        }
    }

    #[test]
    fn mixtures_are_gibbs_preserving_channels() {
        let mut rng = trial_rng(7, "gp", 0);
        let inst = random_gibbs_preserving(3, &[2, 3], 3, &mut rng).unwrap();
        assert!(is_gibbs_preserving(&inst.map, &inst.tau).unwrap());
        assert!(inst.map.is_completely_positive());
        assert!(inst.map.trace_preservation_residual() < 1e-12);
    }
}

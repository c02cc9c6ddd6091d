//! Thermal operations as dilations with a thermal bath (and optional
//! catalysts), their reversal, Petz and rotated recoveries, and samplers for
//! energy-conserving unitaries.
//!
//! Composite ordering is always system, bath, then catalysts.

mod rotated;
mod superop;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rotated::{rotated_petz_map, rotated_recovery_average, QuadratureSpec};
pub use superop::{gibbs_preservation_residual, is_gibbs_preserving, Superoperator};

use crate::config::COMMUTATOR_TOL;
use crate::error::{Error, Result};
use crate::operator::{
    check_finite, check_unitary, hermitian_part, partial_trace_matrix, same_dim, tensor_all, ComplexMatrix,
    CompositeSpace, DensityMatrix, C64,
};
use crate::thermo::{check_beta, gibbs_state, GibbsState, HamiltonianSpec};

/// Unitary commuting with a total Hamiltonian.
#[derive(Debug, Clone)]
pub struct EnergyConservingUnitary {
    matrix: ComplexMatrix,
    hamiltonian: HamiltonianSpec,
}

impl EnergyConservingUnitary {
    /// Checks unitarity, `||[V, H / r]||_max <= 1e-10` with `r` the spectral
    /// radius, and that `V` does not couple different energy blocks.
    pub fn new(matrix: ComplexMatrix, hamiltonian: HamiltonianSpec) -> Result<Self> {
        let v = Self::without_conservation_check(matrix, hamiltonian)?;
        let comm = v.hamiltonian.commutator_residual(&v.matrix)?;
        if comm > COMMUTATOR_TOL {
            return Err(Error::NotEnergyConserving(comm));
        }
        let leak = v.hamiltonian.block_leakage(&v.matrix)?;
        if leak > COMMUTATOR_TOL {
            return Err(Error::NotEnergyConserving(leak));
        }
        Ok(v)
    }

    /// Checks shape and unitarity only. Meant for negative controls that must
    /// reach the bound checks with a unitary that violates energy conservation.
    pub fn without_conservation_check(matrix: ComplexMatrix, hamiltonian: HamiltonianSpec) -> Result<Self> {
        same_dim(hamiltonian.dim(), matrix.nrows())?;
        same_dim(hamiltonian.dim(), matrix.ncols())?;
        check_finite(&matrix)?;
        check_unitary(&matrix)?;
        Ok(Self { matrix, hamiltonian })
    }

    pub fn identity(hamiltonian: HamiltonianSpec) -> Self {
        let d = hamiltonian.dim();
        Self { matrix: ComplexMatrix::identity(d, d), hamiltonian }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn commutator_residual(&self) -> f64 {
        self.hamiltonian.commutator_residual(&self.matrix).expect("dimensions checked at construction")
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), hamiltonian: self.hamiltonian.clone() }
    }
}

/// Catalyst factor: its state and Hamiltonian.
#[derive(Debug, Clone)]
pub struct Catalyst {
    pub state: DensityMatrix,
    pub hamiltonian: HamiltonianSpec,
}

impl Catalyst {
    pub fn new(state: DensityMatrix, hamiltonian: HamiltonianSpec) -> Result<Self> {
        same_dim(hamiltonian.dim(), state.dim())?;
        Ok(Self { state, hamiltonian })
    }

    /// Thermal catalyst `exp(-beta H_C) / Z_C`.
    pub fn thermal(hamiltonian: HamiltonianSpec, beta: f64) -> Result<Self> {
        let state = gibbs_state(&hamiltonian, beta)?.into_state();
        Ok(Self { state, hamiltonian })
    }
}

/// `T(rho) = Tr_E[V (rho (x) rho_E) V^dag]` with `rho_E` the bath Gibbs state
/// tensored with the catalyst states.
#[derive(Debug, Clone)]
pub struct ThermalOperation {
    v: EnergyConservingUnitary,
    system: HamiltonianSpec,
    bath: HamiltonianSpec,
    catalysts: Vec<Catalyst>,
    beta: f64,
    system_gibbs: GibbsState,
    bath_gibbs: GibbsState,
    env_state: DensityMatrix,
    space: CompositeSpace,
}

impl ThermalOperation {
    pub fn new(unitary: ComplexMatrix, system: HamiltonianSpec, bath: HamiltonianSpec, beta: f64) -> Result<Self> {
        Self::with_catalysts(unitary, system, bath, Vec::new(), beta)
    }

    pub fn with_catalysts(
        unitary: ComplexMatrix,
        system: HamiltonianSpec,
        bath: HamiltonianSpec,
        catalysts: Vec<Catalyst>,
        beta: f64,
    ) -> Result<Self> {
        let total = total_hamiltonian(&system, &bath, &catalysts)?;
        let v = EnergyConservingUnitary::new(unitary, total)?;
        Self::from_unitary(v, system, bath, catalysts, beta)
    }

    /// Skips the energy-conservation check on the unitary (see
    /// [`EnergyConservingUnitary::without_conservation_check`]).
    pub fn unchecked(unitary: ComplexMatrix, system: HamiltonianSpec, bath: HamiltonianSpec, beta: f64) -> Result<Self> {
        let total = total_hamiltonian(&system, &bath, &[])?;
        let v = EnergyConservingUnitary::without_conservation_check(unitary, total)?;
        Self::from_unitary(v, system, bath, Vec::new(), beta)
    }

    pub fn identity(system: HamiltonianSpec, bath: HamiltonianSpec, beta: f64) -> Result<Self> {
        let total = total_hamiltonian(&system, &bath, &[])?;
        Self::from_unitary(EnergyConservingUnitary::identity(total), system, bath, Vec::new(), beta)
    }

    pub fn from_unitary(
        v: EnergyConservingUnitary,
        system: HamiltonianSpec,
        bath: HamiltonianSpec,
        catalysts: Vec<Catalyst>,
        beta: f64,
    ) -> Result<Self> {
        check_beta(beta)?;
        let mut dims = vec![system.dim(), bath.dim()];
        dims.extend(catalysts.iter().map(|c| c.hamiltonian.dim()));
        let space = CompositeSpace::new(dims)?;
        same_dim(space.total_dim(), v.hamiltonian().dim())?;
        let system_gibbs = gibbs_state(&system, beta)?;
        let bath_gibbs = gibbs_state(&bath, beta)?;
        let mut env_factors = vec![bath_gibbs.state()];
        env_factors.extend(catalysts.iter().map(|c| &c.state));
        let env_state = tensor_all(&env_factors)?;
        Ok(Self { v, system, bath, catalysts, beta, system_gibbs, bath_gibbs, env_state, space })
    }

    pub fn unitary(&self) -> &EnergyConservingUnitary {
        &self.v
    }

    pub fn system(&self) -> &HamiltonianSpec {
        &self.system
    }

    pub fn bath(&self) -> &HamiltonianSpec {
        &self.bath
    }

    pub fn catalysts(&self) -> &[Catalyst] {
        &self.catalysts
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn system_dim(&self) -> usize {
        self.system.dim()
    }

    /// `tau_S`.
    pub fn system_gibbs(&self) -> &GibbsState {
        &self.system_gibbs
    }

    /// Bath thermal state.
    pub fn bath_gibbs(&self) -> &GibbsState {
        &self.bath_gibbs
    }

    /// Bath Gibbs state tensored with the catalyst states.
    pub fn env_state(&self) -> &DensityMatrix {
        &self.env_state
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    /// `V (x (x) rho_E) V^dag` for any operator `x` on the system.
    pub(crate) fn global_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        same_dim(self.system.dim(), x.nrows())?;
        same_dim(self.system.dim(), x.ncols())?;
        let v = self.v.matrix();
        Ok(v * x.kronecker(self.env_state.matrix()) * v.adjoint())
    }

    pub(crate) fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        partial_trace_matrix(&self.global_matrix(x)?, &self.space, &[0])
    }

    /// Joint output state on system, bath and catalysts.
    pub fn apply_global(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix_checked(hermitian_part(&self.global_matrix(rho.matrix())?))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix_checked(hermitian_part(&self.apply_matrix(rho.matrix())?))
    }

    /// Same environment with `V` replaced by `V^dag`.
    pub fn reversal(&self) -> Self {
        Self { v: self.v.adjoint(), ..self.clone() }
    }

    pub fn superoperator(&self) -> Result<Superoperator> {
        Superoperator::from_linear_map(self.system.dim(), |x| self.apply_matrix(x))
    }

    /// `X -> Tr_E[rho_E^1/2 V^dag (X (x) I) V rho_E^1/2]`.
    pub fn adjoint(&self) -> Result<Superoperator> {
        let d_env = self.env_state.dim();
        let root = ComplexMatrix::identity(self.system.dim(), self.system.dim()).kronecker(&self.env_state.power(0.5));
        let v = self.v.matrix();
        Superoperator::from_linear_map(self.system.dim(), |x| {
            let lifted = x.kronecker(&ComplexMatrix::identity(d_env, d_env));
            partial_trace_matrix(&(&root * v.adjoint() * lifted * v * &root), &self.space, &[0])
        })
    }
}

fn total_hamiltonian(system: &HamiltonianSpec, bath: &HamiltonianSpec, catalysts: &[Catalyst]) -> Result<HamiltonianSpec> {
    let mut parts = vec![system, bath];
    parts.extend(catalysts.iter().map(|c| &c.hamiltonian));
    HamiltonianSpec::composite(&parts)
}

/// Petz map of a channel with its reference state.
#[derive(Debug, Clone)]
pub struct PetzRecovery {
    pub map: Superoperator,
    /// Set when the reference or its image is rank deficient, in which case
    /// inverses are taken on the support.
    pub support_restricted: bool,
}

/// `X -> theta^1/2 N^dag[N(theta)^-1/2 X N(theta)^-1/2] theta^1/2` given
/// the adjoint map directly.
fn petz_from_adjoint(adjoint: &Superoperator, theta: &DensityMatrix, image: &DensityMatrix) -> Result<PetzRecovery> {
    same_dim(theta.dim(), adjoint.dim())?;
    let inner = image.power(-0.5);
    let outer = theta.power(0.5);
    let map = Superoperator::sandwich(&outer, &outer)
        .compose(adjoint)?
        .compose(&Superoperator::sandwich(&inner, &inner))?;
    Ok(PetzRecovery { map, support_restricted: !(theta.is_full_rank() && image.is_full_rank()) })
}

/// Petz recovery of a thermal operation, using its dilation adjoint.
pub fn petz_recovery(t: &ThermalOperation, reference: &DensityMatrix) -> Result<PetzRecovery> {
    same_dim(t.system_dim(), reference.dim())?;
    let image = t.apply(reference)?;
    petz_from_adjoint(&t.adjoint()?, reference, &image)
}

/// Petz recovery of an arbitrary channel given as a superoperator.
pub fn petz_map(n: &Superoperator, theta: &DensityMatrix) -> Result<PetzRecovery> {
    let image = n.apply_state(theta)?;
    petz_from_adjoint(&n.adjoint(), theta, &image)
}

/// Haar unitary from a complex Ginibre matrix via QR with the phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Independent Haar unitaries on each degenerate block of `h`, assembled in
/// its eigenbasis.
pub fn sample_energy_conserving_unitary_with<R: Rng + ?Sized>(
    h: &HamiltonianSpec,
    rng: &mut R,
) -> Result<EnergyConservingUnitary> {
    let d = h.dim();
    let mut local = ComplexMatrix::zeros(d, d);
    for block in h.blocks() {
        let u = haar_unitary(block.len(), rng);
        for (a, &i) in block.iter().enumerate() {
            for (b, &j) in block.iter().enumerate() {
                local[(i, j)] = u[(a, b)];
            }
        }
    }
    let matrix = if h.is_computational_basis() { local } else { h.basis() * local * h.basis().adjoint() };
    EnergyConservingUnitary::new(matrix, h.clone())
}

pub fn sample_energy_conserving_unitary(h: &HamiltonianSpec, seed: u64) -> Result<EnergyConservingUnitary> {
    sample_energy_conserving_unitary_with(h, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{max_abs_diff, trace};

    fn two_level(gap: f64) -> HamiltonianSpec {
        HamiltonianSpec::diagonal(&[0.0, gap]).unwrap()
    }

    fn sampled_to(seed: u64) -> ThermalOperation {
        let hs = two_level(1.0);
        let hb = HamiltonianSpec::diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let total = HamiltonianSpec::composite(&[&hs, &hb]).unwrap();
        let v = sample_energy_conserving_unitary(&total, seed).unwrap();
        ThermalOperation::from_unitary(v, hs, hb, Vec::new(), 0.9).unwrap()
    }

    #[test]
    fn identity_unitary_gives_identity_channel() {
        let t = ThermalOperation::identity(two_level(1.0), two_level(2.0), 0.7).unwrap();
        assert!(t.superoperator().unwrap().max_abs_diff(&Superoperator::identity(2)) < 1e-14);
        assert!(t.reversal().superoperator().unwrap().max_abs_diff(&Superoperator::identity(2)) < 1e-14);
        assert!(t.adjoint().unwrap().max_abs_diff(&Superoperator::identity(2)) < 1e-14);
    }

    #[test]
    fn gibbs_state_is_fixed() {
        for seed in 0..20 {
            let t = sampled_to(seed);
            let tau = t.system_gibbs().state().clone();
            assert!(t.apply(&tau).unwrap().max_abs_diff(&tau) < 1e-12);
            assert!(is_gibbs_preserving(&t.superoperator().unwrap(), &tau).unwrap());
        }
    }

    #[test]
    fn rejects_non_conserving_unitary() {
        let hs = two_level(1.0);
        let hb = two_level(3.0);
        let swap_levels = ComplexMatrix::from_fn(4, 4, |i, j| {
            let p = [1, 0, 2, 3];
            if p[j] == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        assert!(matches!(
            ThermalOperation::new(swap_levels.clone(), hs.clone(), hb.clone(), 1.0),
            Err(Error::NotEnergyConserving(_))
        ));
        assert!(ThermalOperation::unchecked(swap_levels, hs, hb, 1.0).is_ok());
    }

    #[test]
    fn adjoint_is_unital_and_dual() {
        let t = sampled_to(3);
        let adj = t.adjoint().unwrap();
        let id = ComplexMatrix::identity(2, 2);
        assert!(max_abs_diff(&adj.apply(&id).unwrap(), &id) < 1e-12);
        assert!(adj.max_abs_diff(&t.superoperator().unwrap().adjoint()) < 1e-12);
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 0.3, j as f64 - 0.2));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i * j) as f64 + 0.5, 0.1 * i as f64));
        let lhs = trace(&(&a * t.apply_matrix(&b).unwrap()));
        let rhs = trace(&(adj.apply(&a).unwrap() * &b));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn petz_with_gibbs_reference_is_reversal() {
        for seed in 0..10 {
            let t = sampled_to(seed);
            let petz = petz_recovery(&t, t.system_gibbs().state()).unwrap();
            assert!(!petz.support_restricted);
            let rev = t.reversal().superoperator().unwrap();
            assert!(petz.map.max_abs_diff(&rev) < 1e-10);
            let generic = petz_map(&t.superoperator().unwrap(), t.system_gibbs().state()).unwrap();
            assert!(generic.map.max_abs_diff(&rev) < 1e-10);
        }
    }

    #[test]
    fn petz_recovers_reference() {
        let t = sampled_to(11);
        let theta = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        let petz = petz_recovery(&t, &theta).unwrap();
        let back = petz.map.apply_state(&t.apply(&theta).unwrap()).unwrap();
        assert!(back.max_abs_diff(&theta) < 1e-10);
    }

    #[test]
    fn petz_of_identity_channel_is_identity() {
        let theta = DensityMatrix::diagonal(&[0.1, 0.6, 0.3]).unwrap();
        let petz = petz_map(&Superoperator::identity(3), &theta).unwrap();
        assert!(petz.map.max_abs_diff(&Superoperator::identity(3)) < 1e-12);
    }

    #[test]
    fn nondegenerate_sample_is_diagonal() {
        let h = HamiltonianSpec::diagonal(&[0.0, 1.0, 2.5]).unwrap();
        let v = sample_energy_conserving_unitary(&h, 5).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(v.matrix()[(i, j)].norm(), 0.0);
                }
            }
            assert!((v.matrix()[(i, i)].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_conserving() {
        let h = HamiltonianSpec::diagonal(&[0.0, 1.0, 1.0, 2.0, 1.0]).unwrap();
        let a = sample_energy_conserving_unitary(&h, 42).unwrap();
        let b = sample_energy_conserving_unitary(&h, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(a.commutator_residual() <= 1e-10);
    }

    #[test]
    fn reversal_is_an_involution() {
        let t = sampled_to(8);
        assert_eq!(t.reversal().reversal().unitary().matrix(), t.unitary().matrix());
    }
}

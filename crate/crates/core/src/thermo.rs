//! Hamiltonians, Gibbs states, free energies and the two-level wit battery.
//!
//! Energies are in a caller-chosen unit `E0`, `beta` is in `1/E0`, and
//! `kT = 1/beta`. Work quantities elsewhere in the crate are dimensionless
//! multiples of `kT`.

use crate::config::DEGENERACY_REL_TOL;
use crate::divergence::{relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::operator::{
    max_abs_diff, same_dim, tensor, ComplexMatrix, DensityMatrix, HermitianOperator, C64, ZERO,
};

/// A Hamiltonian together with its spectral data and the partition of its
/// eigen-indices into degenerate-energy blocks.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    operator: HermitianOperator,
    energies: Vec<f64>,
    basis: ComplexMatrix,
    blocks: Vec<Vec<usize>>,
    computational: bool,
}

impl HamiltonianSpec {
    /// Hamiltonian diagonal in the computational basis. Energies keep the
    /// given order so that eigen-index `k` is basis state `|k>`.
    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidParameter("Hamiltonian needs at least one level".into()));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite);
        }
        let operator = HermitianOperator::from_real_diagonal(energies)?;
        let dim = energies.len();
        Ok(Self {
            operator,
            energies: energies.to_vec(),
            basis: ComplexMatrix::identity(dim, dim),
            blocks: degenerate_blocks(energies),
            computational: true,
        })
    }

    /// General Hermitian Hamiltonian. Operators with vanishing off-diagonal
    /// entries take the [`diagonal`](Self::diagonal) path.
    pub fn from_operator(operator: HermitianOperator) -> Self {
        let m = operator.matrix();
        let dim = operator.dim();
        let is_diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || m[(i, j)] == ZERO));
        if is_diagonal {
            let energies: Vec<f64> = (0..dim).map(|i| m[(i, i)].re).collect();
            return Self::diagonal(&energies).expect("validated operator has finite diagonal");
        }
        let eigen = operator.eigen();
        // ascending energies
        let energies: Vec<f64> = eigen.values.iter().rev().copied().collect();
        let basis = ComplexMatrix::from_fn(dim, dim, |i, j| eigen.vectors[(i, dim - 1 - j)]);
        Self { blocks: degenerate_blocks(&energies), operator, energies, basis, computational: false }
    }

    /// `H_1 (x) I (x) ... + I (x) H_2 (x) ... + ...` on the ordered composite
    /// space of the parts.
    pub fn composite(parts: &[&HamiltonianSpec]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("composite Hamiltonian needs at least one part".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, h| acc.plus_tensor(h))
    }

    /// `self (x) I + I (x) other`.
    fn plus_tensor(&self, other: &Self) -> Result<Self> {
        let (da, db) = (self.dim(), other.dim());
        let operator = tensor(&self.operator, &HermitianOperator::identity(db))?
            .add(&tensor(&HermitianOperator::identity(da), &other.operator)?)?;
        let energies: Vec<f64> =
            self.energies.iter().flat_map(|ea| other.energies.iter().map(move |eb| ea + eb)).collect();
        let basis = self.basis.kronecker(&other.basis);
        Ok(Self {
            blocks: degenerate_blocks(&energies),
            operator,
            energies,
            basis,
            computational: self.computational && other.computational,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    /// Energy of eigen-index `k`; paired with column `k` of [`basis`](Self::basis).
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Whether the eigenbasis is the computational basis.
    pub fn is_computational_basis(&self) -> bool {
        self.computational
    }

    pub fn spectral_radius(&self) -> f64 {
        self.energies.iter().fold(0.0_f64, |m, e| m.max(e.abs()))
    }

    pub fn degeneracy_tolerance(&self) -> f64 {
        DEGENERACY_REL_TOL * self.spectral_radius()
    }

    /// `max |[V, H / r]|` with `r` the spectral radius of `H`.
    pub fn commutator_residual(&self, v: &ComplexMatrix) -> Result<f64> {
        same_dim(self.dim(), v.nrows())?;
        let r = self.spectral_radius();
        if r == 0.0 {
            return Ok(0.0);
        }
        let h = self.operator.matrix().unscale(r);
        Ok(max_abs_diff(&(v * &h), &(&h * v)))
    }

    /// Largest entry of `V` (in the eigenbasis of `H`) that couples different
    /// energy blocks.
    pub fn block_leakage(&self, v: &ComplexMatrix) -> Result<f64> {
        same_dim(self.dim(), v.nrows())?;
        let local = self.basis.adjoint() * v * &self.basis;
        let mut block_of = vec![0usize; self.dim()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                block_of[i] = b;
            }
        }
        let mut leak = 0.0_f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if block_of[i] != block_of[j] {
                    leak = leak.max(local[(i, j)].norm());
                }
            }
        }
        Ok(leak)
    }

    /// Builds `B diag(values) B^dag` in this Hamiltonian's eigenbasis.
    pub(crate) fn in_eigenbasis(&self, values: &[f64]) -> ComplexMatrix {
        let dim = self.dim();
        if self.computational {
            return ComplexMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO });
        }
        let mut scaled = self.basis.clone();
        for (k, &v) in values.iter().enumerate() {
            for i in 0..dim {
                scaled[(i, k)] *= v;
            }
        }
        scaled * self.basis.adjoint()
    }
}

/// Groups eigen-indices whose energies lie within `1e-9 * max|E|` of the
/// lowest energy in their group.
fn degenerate_blocks(energies: &[f64]) -> Vec<Vec<usize>> {
    let tol = DEGENERACY_REL_TOL * energies.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for k in order {
        match blocks.last_mut() {
            Some(block) if energies[k] - anchor <= tol => block.push(k),
            _ => {
                anchor = energies[k];
                blocks.push(vec![k]);
            }
        }
    }
    for block in &mut blocks {
        block.sort_unstable();
    }
    blocks
}

/// `exp(-beta H) / Z`.
#[derive(Debug, Clone)]
pub struct GibbsState {
    state: DensityMatrix,
    beta: f64,
    log_partition: f64,
}

impl GibbsState {
    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `log Z`.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!("inverse temperature must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

/// Thermal state of `h` at inverse temperature `beta`; `beta = 0` gives the
/// maximally mixed state. The partition function is accumulated with
/// log-sum-exp.
pub fn gibbs_state(h: &HamiltonianSpec, beta: f64) -> Result<GibbsState> {
    check_beta(beta)?;
    let exponents: Vec<f64> = h.energies().iter().map(|e| -beta * e).collect();
    let shift = exponents.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let log_partition = shift + exponents.iter().map(|x| (x - shift).exp()).sum::<f64>().ln();
    let weights: Vec<f64> = exponents.iter().map(|x| (x - log_partition).exp()).collect();
    let state = DensityMatrix::from_matrix_checked(h.in_eigenbasis(&weights))?;
    Ok(GibbsState { state, beta, log_partition })
}

/// `Tr[H rho] - S(rho) / beta`, in energy units.
///
/// The relative-entropy form `(D(rho || tau) - log Z) / beta` is evaluated as
/// well and the two must agree to `1e-9` relative to `max(1, |F|)`, loosened
/// by `beta * (E_max - E_min)` because `log tau` loses digits on tiny thermal
/// weights. Past `beta * (E_max - E_min) = 25` the cross-check is skipped.
pub fn free_energy(rho: &DensityMatrix, h: &HamiltonianSpec, beta: f64) -> Result<f64> {
    let entropic = free_energy_entropic(rho, h, beta)?;
    let e = h.energies();
    let spread = beta * (e.iter().copied().fold(f64::NEG_INFINITY, f64::max) - e.iter().copied().fold(f64::INFINITY, f64::min));
    if spread > 25.0 {
        return Ok(entropic);
    }
    let relative = free_energy_relative(rho, h, beta)?;
    if (entropic - relative).abs() > 1e-9 * entropic.abs().max(1.0) * spread.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "free energy forms disagree: entropic {entropic}, relative-entropic {relative}"
        )));
    }
    Ok(entropic)
}

fn require_finite_temperature(beta: f64) -> Result<()> {
    check_beta(beta)?;
    if beta == 0.0 {
        return Err(Error::InvalidParameter("free energy needs a finite temperature (beta > 0)".into()));
    }
    Ok(())
}

pub fn free_energy_entropic(rho: &DensityMatrix, h: &HamiltonianSpec, beta: f64) -> Result<f64> {
    require_finite_temperature(beta)?;
    same_dim(h.dim(), rho.dim())?;
    let energy = h.operator().expectation(rho.as_operator())?;
    Ok(energy - von_neumann_entropy(rho) / beta)
}

pub fn free_energy_relative(rho: &DensityMatrix, h: &HamiltonianSpec, beta: f64) -> Result<f64> {
    require_finite_temperature(beta)?;
    same_dim(h.dim(), rho.dim())?;
    let tau = gibbs_state(h, beta)?;
    let d = relative_entropy(rho, tau.state())?;
    Ok((d.value - tau.log_partition()) / beta)
}

/// Two-level battery with `H_W = W |1><1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitBattery {
    gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitLevel {
    Ground,
    Excited,
}

impl WitBattery {
    pub fn new(gap: f64) -> Result<Self> {
        if !gap.is_finite() {
            return Err(Error::InvalidParameter(format!("wit gap must be finite, got {gap}")));
        }
        Ok(Self { gap })
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn hamiltonian(&self) -> HamiltonianSpec {
        HamiltonianSpec::diagonal(&[0.0, self.gap]).expect("finite gap")
    }

    pub fn level_state(&self, level: WitLevel) -> DensityMatrix {
        let k = match level {
            WitLevel::Ground => 0,
            WitLevel::Excited => 1,
        };
        DensityMatrix::basis_state(2, k).expect("two-level basis state")
    }

    /// `H_S (x) I + I (x) H_W`.
    pub fn joint_hamiltonian(&self, system: &HamiltonianSpec) -> Result<HamiltonianSpec> {
        HamiltonianSpec::composite(&[system, &self.hamiltonian()])
    }
}

/// `rho (x) |level><level|`.
pub fn augment_with_wit(rho: &DensityMatrix, w: &WitBattery, level: WitLevel) -> Result<DensityMatrix> {
    tensor(rho, &w.level_state(level))
}

//! Thermal operations assisted by catalysts whose marginals must return.
//!
//! Factor ordering is system, bath, then catalysts `C_1 .. C_n`.

use rand::Rng;
use serde::Serialize;

use crate::channel::{haar_unitary, sample_energy_conserving_unitary_with, Catalyst, ThermalOperation};
use crate::config::CATALYST_TOL;
use crate::divergence::von_neumann_entropy;
use crate::error::Result;
use crate::operator::{reduce_state, tensor, tensor_all, ComplexMatrix, DensityMatrix, C64};
use crate::random::{random_beta, random_diagonal_state, random_hamiltonian};
use crate::thermo::HamiltonianSpec;

/// Catalyst states and Hamiltonians, in composite order.
#[derive(Debug, Clone, Default)]
pub struct CatalystSet {
    catalysts: Vec<Catalyst>,
}

impl CatalystSet {
    pub fn new(catalysts: Vec<Catalyst>) -> Result<Self> {
        let total: usize = catalysts.iter().map(|c| c.state.dim()).product();
        crate::config::check_dim(total)?;
        Ok(Self { catalysts })
    }

    pub fn len(&self) -> usize {
        self.catalysts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.catalysts.is_empty()
    }

    pub fn as_slice(&self) -> &[Catalyst] {
        &self.catalysts
    }

    pub fn into_vec(self) -> Vec<Catalyst> {
        self.catalysts
    }
}

/// Thermal operation with catalysts, built on [`ThermalOperation`].
#[derive(Debug, Clone)]
pub struct NctoInstance {
    op: ThermalOperation,
}

impl NctoInstance {
    pub fn new(
        unitary: ComplexMatrix,
        system: HamiltonianSpec,
        bath: HamiltonianSpec,
        catalysts: CatalystSet,
        beta: f64,
    ) -> Result<Self> {
        Ok(Self { op: ThermalOperation::with_catalysts(unitary, system, bath, catalysts.into_vec(), beta)? })
    }

    /// Wraps an existing operation; an operation without catalysts is the
    /// `n = 0` case.
    pub fn from_operation(op: ThermalOperation) -> Self {
        Self { op }
    }

    pub fn operation(&self) -> &ThermalOperation {
        &self.op
    }

    pub fn num_catalysts(&self) -> usize {
        self.op.catalysts().len()
    }

    /// Factors kept when tracing out the bath: system and catalysts.
    fn system_catalyst_factors(&self) -> Vec<usize> {
        std::iter::once(0).chain(2..2 + self.num_catalysts()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NctoOutput {
    #[serde(skip)]
    pub sigma_sc: DensityMatrix,
    #[serde(skip)]
    pub sigma_s: DensityMatrix,
    /// `||sigma_{C_i} - eta_{C_i}||_1` per catalyst.
    pub catalyst_residuals: Vec<f64>,
    /// Trace distance from `sigma_S (x) sigma_C` to `sigma_SC`.
    pub system_catalyst_correlation: f64,
    /// Trace distance from the product of catalyst marginals to `sigma_C`.
    pub catalyst_catalyst_correlation: f64,
    pub marginals_return: bool,
    pub is_cto: bool,
    pub is_ccto: bool,
    pub is_ncto: bool,
}

/// Applies the operation to `rho` and classifies the transition by the
/// correlations it leaves behind.
pub fn apply_ncto(inst: &NctoInstance, rho: &DensityMatrix) -> Result<NctoOutput> {
    let op = &inst.op;
    let global = op.apply_global(rho)?;
    let keep = inst.system_catalyst_factors();
    let sigma_sc = reduce_state(&global, op.space(), &keep)?;
    let sigma_s = reduce_state(&global, op.space(), &[0])?;
    let n = inst.num_catalysts();
    let mut catalyst_residuals = Vec::with_capacity(n);
    let mut marginals = Vec::with_capacity(n);
    for (i, c) in op.catalysts().iter().enumerate() {
        let m = reduce_state(&global, op.space(), &[2 + i])?;
        catalyst_residuals.push(m.trace_distance(&c.state)?);
        marginals.push(m);
    }
    let marginals_return = catalyst_residuals.iter().all(|&r| r <= CATALYST_TOL);
    let (system_catalyst_correlation, catalyst_catalyst_correlation) = if n == 0 {
        (0.0, 0.0)
    } else {
        let catalysts_joint: Vec<usize> = (2..2 + n).collect();
        let sigma_c = reduce_state(&global, op.space(), &catalysts_joint)?;
        let sc = tensor(&sigma_s, &sigma_c)?.trace_distance(&sigma_sc)?;
        let refs: Vec<&DensityMatrix> = marginals.iter().collect();
        let cc = tensor_all(&refs)?.trace_distance(&sigma_c)?;
        (sc, cc)
    };
    let uncorrelated_system = system_catalyst_correlation <= CATALYST_TOL;
    let is_ncto = marginals_return;
    let is_ccto = is_ncto && uncorrelated_system;
    let is_cto = is_ccto && n <= 1;
    Ok(NctoOutput {
        sigma_sc,
        sigma_s,
        catalyst_residuals,
        system_catalyst_correlation,
        catalyst_catalyst_correlation,
        marginals_return,
        is_cto,
        is_ccto,
        is_ncto,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaStatus {
    /// Marginals returned and the global state is the input product.
    Confirmed,
    /// Marginals returned but the global state moved.
    Violated,
    /// Some marginal did not return, so nothing is asserted.
    NotApplicable,
}

/// Fixed-point behaviour on `tau_S (x) tau_B (x) eta_C1 (x) ...`.
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    pub system_residual: f64,
    pub catalyst_residuals: Vec<f64>,
    pub premise_holds: bool,
    /// `||V P V^dag - P||_1` for the input product `P`.
    pub global_residual: f64,
    /// `Tr[H_B rho_B] - Tr[H_B tau_B]` on the output bath marginal.
    pub bath_energy_shift: f64,
    /// `S(rho_B) - S(tau_B)`.
    pub entropy_gap: f64,
    pub status: LemmaStatus,
}

pub fn check_fixed_point_product(inst: &NctoInstance, product_tol: f64) -> Result<FixedPointReport> {
    let op = &inst.op;
    let tau_s = op.system_gibbs().state();
    let input = tensor(tau_s, op.env_state())?;
    let global = op.apply_global(tau_s)?;
    let global_residual = global.trace_distance(&input)?;
    let out_s = reduce_state(&global, op.space(), &[0])?;
    let system_residual = out_s.trace_distance(tau_s)?;
    let mut catalyst_residuals = Vec::with_capacity(inst.num_catalysts());
    for (i, c) in op.catalysts().iter().enumerate() {
        catalyst_residuals.push(reduce_state(&global, op.space(), &[2 + i])?.trace_distance(&c.state)?);
    }
    let premise_holds =
        system_residual <= CATALYST_TOL && catalyst_residuals.iter().all(|&r| r <= CATALYST_TOL);
    let out_b = reduce_state(&global, op.space(), &[1])?;
    let tau_b = op.bath_gibbs().state();
    let hb = op.bath().operator();
    let bath_energy_shift = hb.expectation(out_b.as_operator())? - hb.expectation(tau_b.as_operator())?;
    let entropy_gap = von_neumann_entropy(&out_b) - von_neumann_entropy(tau_b);
    let status = if !premise_holds {
        LemmaStatus::NotApplicable
    } else if global_residual <= product_tol {
        LemmaStatus::Confirmed
    } else {
        LemmaStatus::Violated
    };
    Ok(FixedPointReport {
        system_residual,
        catalyst_residuals,
        premise_holds,
        global_residual,
        bath_energy_shift,
        entropy_gap,
        status,
    })
}

/// Same bath and catalysts with `V` replaced by `V^dag`.
pub fn reversal_ncto(inst: &NctoInstance) -> NctoInstance {
    NctoInstance { op: inst.op.reversal() }
}

/// Total energy change `Tr[H V X V^dag] - Tr[H X]` for `X = rho (x) rho_E`.
pub fn energy_change(inst: &NctoInstance, rho: &DensityMatrix) -> Result<f64> {
    let op = &inst.op;
    let h = op.unitary().hamiltonian().operator();
    let input = tensor(rho, op.env_state())?;
    let output = op.apply_global(rho)?;
    Ok(h.expectation(output.as_operator())? - h.expectation(input.as_operator())?)
}

/// Families of catalytic instances used by the property sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    /// Thermal catalysts with a block-Haar unitary on everything.
    ThermalCatalysts,
    /// `V_SB (x) W_C` with diagonal catalysts and diagonal `W_C`.
    Factorized,
    /// Swap of the system with an identical thermal catalyst.
    Swap,
    /// Block-Haar unitary with non-thermal catalysts; the premise usually fails.
    Generic,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 4] =
        [FixtureKind::ThermalCatalysts, FixtureKind::Factorized, FixtureKind::Swap, FixtureKind::Generic];
}

/// Draws an instance of the given family. `catalyst_dims` sets the number and
/// sizes of catalysts (the swap family uses a single catalyst of the system's
/// dimension).
pub fn sample_instance<R: Rng + ?Sized>(
    kind: FixtureKind,
    system_dim: usize,
    bath_dim: usize,
    catalyst_dims: &[usize],
    rng: &mut R,
) -> Result<NctoInstance> {
    let beta = random_beta(rng);
    let hs = random_hamiltonian(system_dim, rng)?;
    let hb = random_hamiltonian(bath_dim, rng)?;
    match kind {
        FixtureKind::ThermalCatalysts | FixtureKind::Generic => {
            let mut catalysts = Vec::with_capacity(catalyst_dims.len());
            for &dc in catalyst_dims {
                let hc = random_hamiltonian(dc, rng)?;
                catalysts.push(if kind == FixtureKind::ThermalCatalysts {
                    Catalyst::thermal(hc, beta)?
                } else {
                    Catalyst::new(random_diagonal_state(dc, rng)?, hc)?
                });
            }
            let mut parts = vec![&hs, &hb];
            parts.extend(catalysts.iter().map(|c| &c.hamiltonian));
            let total = HamiltonianSpec::composite(&parts)?;
            let v = sample_energy_conserving_unitary_with(&total, rng)?;
            Ok(NctoInstance { op: ThermalOperation::from_unitary(v, hs, hb, catalysts, beta)? })
        }
        FixtureKind::Factorized => {
            let sb = HamiltonianSpec::composite(&[&hs, &hb])?;
            let v_sb = sample_energy_conserving_unitary_with(&sb, rng)?;
            let mut w = ComplexMatrix::identity(1, 1);
            let mut catalysts = Vec::with_capacity(catalyst_dims.len());
            for &dc in catalyst_dims {
                let hc = random_hamiltonian(dc, rng)?;
                catalysts.push(Catalyst::new(random_diagonal_state(dc, rng)?, hc)?);
                let phases = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(dc, |_, _| {
                    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
                }));
                w = w.kronecker(&phases);
            }
            let unitary = v_sb.matrix().kronecker(&w);
            Ok(NctoInstance::new(unitary, hs, hb, CatalystSet::new(catalysts)?, beta)?)
        }
        FixtureKind::Swap => {
            let catalyst = Catalyst::thermal(hs.clone(), beta)?;
            let (ds, db) = (system_dim, bath_dim);
            // swap S and C, identity on B, with local Haar rotations inside
            // degenerate system levels applied to the catalyst afterwards
            let d = ds * db * ds;
            let mut unitary = ComplexMatrix::zeros(d, d);
            for s in 0..ds {
                for b in 0..db {
                    for c in 0..ds {
                        unitary[((c * db + b) * ds + s, (s * db + b) * ds + c)] = C64::new(1.0, 0.0);
                    }
                }
            }
            let mut local = ComplexMatrix::zeros(ds, ds);
            for block in hs.blocks() {
                let u = haar_unitary(block.len(), rng);
                for (a, &i) in block.iter().enumerate() {
                    for (bb, &j) in block.iter().enumerate() {
                        local[(i, j)] = u[(a, bb)];
                    }
                }
            }
            let unitary = ComplexMatrix::identity(ds * db, ds * db).kronecker(&local) * unitary;
            Ok(NctoInstance::new(unitary, hs, hb, CatalystSet::new(vec![catalyst])?, beta)?)
        }
    }
}

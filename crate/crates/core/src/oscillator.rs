//! Landauer erasure of a qubit against a harmonic-oscillator bath.
//!
//! The system has `H_S = E_S |1><1|`, the bath `H_B = sum_n n E_S |n><n|`
//! truncated at `n_max`. Energies are measured in units of `E_S`, so the
//! inverse temperature passed around is the dimensionless `beta E_S`.
//!
//! On each energy shell `{|0,n>, |1,n-1>}` the unitary acts as
//! `[[sqrt b, sqrt(1-b)], [sqrt(1-b), -sqrt b]]`, which maps `|0><0|` to
//! `diag(p0, 1-p0)` with `b = 1 - (1 - p0) e^(beta E_S)`. The shell
//! `{|0,0>}` is fixed. The state `|1, n_max>` has no partner inside the
//! truncation and is left alone, which keeps the matrix exactly unitary and
//! energy conserving; its thermal weight is below the truncation tolerance.

use serde::Serialize;

use crate::channel::ThermalOperation;
use crate::divergence::fidelity;
use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, DensityMatrix, C64};
use crate::thermo::HamiltonianSpec;
use crate::workbounds::recovery_invest_bound;

/// Default bound on the neglected thermal tail of the bath.
pub const TRUNCATION_TOL: f64 = 1e-12;

/// Agreement required between matrix and closed-form populations.
const CLOSED_FORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorInstance {
    beta_e: f64,
    p0: f64,
    n_max: usize,
    b: f64,
}

/// Smallest `n` with `e^(-(n+1) x) / (1 - e^-x) <= tol`.
pub fn auto_n_max(beta_e: f64, tol: f64) -> usize {
    let x = beta_e;
    let n = ((-(tol * -(-x).exp_m1()).ln()) / x - 1.0).ceil().max(0.0) as usize;
    // guard against rounding at the boundary
    (n.saturating_sub(1)..n + 2).find(|&k| truncation_tail(x, k) <= tol).unwrap_or(n + 1)
}

/// `e^(-(n+1) x) / (1 - e^-x)`, the bath weight beyond level `n`.
pub fn truncation_tail(beta_e: f64, n_max: usize) -> f64 {
    (-(n_max as f64 + 1.0) * beta_e).exp() / -(-beta_e).exp_m1()
}

impl OscillatorInstance {
    /// `p0` must lie in `[1 - e^(-beta E_S), 1]`. Without `n_max` the bath is
    /// truncated where the neglected tail drops below `1e-12`.
    pub fn new(beta_e: f64, p0: f64, n_max: Option<usize>) -> Result<Self> {
        if !(beta_e.is_finite() && beta_e > 0.0) {
            return Err(Error::InvalidParameter(format!("beta*E_S must be finite and > 0, got {beta_e}")));
        }
        let lower = -(-beta_e).exp_m1();
        if !(p0.is_finite() && p0 >= lower - 1e-12 && p0 <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!("p0 = {p0} outside the reachable interval [{lower}, 1]")));
        }
        let p0 = p0.clamp(lower, 1.0);
        let n_max = match n_max {
            Some(0) => return Err(Error::InvalidParameter("bath truncation needs n_max >= 1".into())),
            Some(n) => n,
            None => auto_n_max(beta_e, TRUNCATION_TOL).max(1),
        };
        crate::config::check_dim(2 * (n_max + 1))?;
        let b = (1.0 - (1.0 - p0) * beta_e.exp()).clamp(0.0, 1.0);
        Ok(Self { beta_e, p0, n_max, b })
    }

    pub fn beta_e(&self) -> f64 {
        self.beta_e
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn partition_bath(&self) -> f64 {
        1.0 / -(-self.beta_e).exp_m1()
    }

    pub fn partition_system(&self) -> f64 {
        1.0 + (-self.beta_e).exp()
    }

    pub fn system_hamiltonian(&self) -> HamiltonianSpec {
        HamiltonianSpec::diagonal(&[0.0, 1.0]).expect("finite levels")
    }

    pub fn bath_hamiltonian(&self) -> HamiltonianSpec {
        let levels: Vec<f64> = (0..=self.n_max).map(|n| n as f64).collect();
        HamiltonianSpec::diagonal(&levels).expect("finite levels")
    }

    /// The shell-wise unitary on the `2 (n_max + 1)` dimensional space,
    /// indexed as `s (n_max + 1) + n`.
    pub fn unitary_matrix(&self) -> ComplexMatrix {
        let nb = self.n_max + 1;
        let d = 2 * nb;
        let mut u = ComplexMatrix::identity(d, d);
        let (sb, sc) = (self.b.sqrt(), (1.0 - self.b).sqrt());
        for n in 1..nb {
            let zero_n = n;
            let one_prev = nb + n - 1;
            u[(zero_n, zero_n)] = C64::new(sb, 0.0);
            u[(one_prev, zero_n)] = C64::new(sc, 0.0);
            u[(zero_n, one_prev)] = C64::new(sc, 0.0);
            u[(one_prev, one_prev)] = C64::new(-sb, 0.0);
        }
        u
    }

    /// Thermal operation mapping `|0><0|` to `diag(p0, 1 - p0)`.
    pub fn thermal_operation(&self) -> Result<ThermalOperation> {
        ThermalOperation::new(self.unitary_matrix(), self.system_hamiltonian(), self.bath_hamiltonian(), self.beta_e)
    }

    /// `diag(p0, 1 - p0)`.
    pub fn mixed_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&[self.p0, 1.0 - self.p0]).expect("valid populations")
    }

    pub fn ground_state(&self) -> DensityMatrix {
        DensityMatrix::basis_state(2, 0).expect("two levels")
    }

    /// Channel output for the input `|0><0|`.
    pub fn forward_state(&self) -> Result<DensityMatrix> {
        self.thermal_operation()?.apply(&self.ground_state())
    }

    /// `p0^2 + (1 - p0)^2 e^(beta E_S)`.
    pub fn closed_form_p0r(&self) -> f64 {
        self.p0 * self.p0 + (1.0 - self.p0).powi(2) * self.beta_e.exp()
    }

    /// Ground population after reversing the erasure on `diag(p0, 1 - p0)`,
    /// from the matrices and from the closed form.
    pub fn reversal_populations(&self) -> Result<ReversalPopulations> {
        let recovered = self.thermal_operation()?.reversal().apply(&self.mixed_state())?;
        let matrix_p0 = recovered.matrix()[(0, 0)].re;
        let closed = self.closed_form_p0r();
        let residual = (matrix_p0 - closed).abs();
        if residual > CLOSED_FORM_TOL {
            return Err(Error::Inconsistent(format!(
                "reversal population {matrix_p0} differs from closed form {closed}"
            )));
        }
        Ok(ReversalPopulations {
            p0r: closed,
            p1r: 1.0 - closed,
            matrix_p0r: matrix_p0,
            matrix_p1r: recovered.matrix()[(1, 1)].re,
            residual,
        })
    }

    /// `-log[p0^2 + (1 - p0)^2 e^(beta E_S)]`, lower bound on the work (in `kT`)
    /// to erase `diag(p0, 1 - p0)` to `|0><0|`.
    pub fn invest_bound(&self) -> f64 {
        -self.closed_form_p0r().ln()
    }

    /// The same bound evaluated through the generic recovery machinery.
    pub fn invest_bound_pipeline(&self) -> Result<f64> {
        recovery_invest_bound(&self.mixed_state(), &self.ground_state(), &self.thermal_operation()?)
    }

    /// `-log F(|0><0|, R(rho))` from the recovered matrix directly.
    pub fn invest_bound_from_fidelity(&self) -> Result<f64> {
        let recovered = self.thermal_operation()?.reversal().apply(&self.mixed_state())?;
        Ok(-fidelity(&self.ground_state(), &recovered)?.squared.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversalPopulations {
    pub p0r: f64,
    pub p1r: f64,
    pub matrix_p0r: f64,
    pub matrix_p1r: f64,
    pub residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn truncation_meets_tolerance_minimally() {
        for x in [0.3, 0.5, 1.0, 2.0, 5.0] {
            let n = auto_n_max(x, TRUNCATION_TOL);
            assert!(truncation_tail(x, n) <= TRUNCATION_TOL);
            assert!(n == 0 || truncation_tail(x, n - 1) > TRUNCATION_TOL);
        }
    }

    #[test]
    fn unitary_is_hermitian_involution() {
        let inst = OscillatorInstance::new(1.0, 0.8, Some(6)).unwrap();
        let u = inst.unitary_matrix();
        assert!(crate::operator::max_abs_diff(&u, &u.adjoint()) == 0.0);
        let d = u.nrows();
        assert!(crate::operator::max_abs_diff(&(&u * &u), &ComplexMatrix::identity(d, d)) < 1e-15);
        assert!(inst.thermal_operation().is_ok());
    }

    #[test]
    fn b_limits() {
        assert_eq!(OscillatorInstance::new(1.0, 1.0, None).unwrap().b(), 1.0);
        let lower = 1.0 - (-1.0f64).exp();
        assert_abs_diff_eq!(OscillatorInstance::new(1.0, lower, None).unwrap().b(), 0.0, epsilon = 1e-15);
        assert!(OscillatorInstance::new(1.0, 0.5, None).is_err());
        assert!(OscillatorInstance::new(0.0, 1.0, None).is_err());
    }

    #[test]
    fn b_matches_partition_function_form() {
        let inst = OscillatorInstance::new(0.7, 0.9, None).unwrap();
        let zb = inst.partition_bath();
        assert_abs_diff_eq!(inst.b(), (0.9 * zb - 1.0) / (zb - 1.0), epsilon = 1e-13);
    }

    #[test]
    fn forward_state_hits_target() {
        let inst = OscillatorInstance::new(1.0, 0.8, None).unwrap();
        let out = inst.forward_state().unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::diagonal(&[0.8, 0.2]).unwrap()) < 1e-10);
        let pure = OscillatorInstance::new(1.0, 1.0, None).unwrap().forward_state().unwrap();
        assert!(pure.max_abs_diff(&DensityMatrix::basis_state(2, 0).unwrap()) < 1e-12);
    }

    #[test]
    fn truncation_converged() {
        let a = OscillatorInstance::new(1.0, 0.7, None).unwrap();
        let b = OscillatorInstance::new(1.0, 0.7, Some(a.n_max() + 10)).unwrap();
        assert!(a.forward_state().unwrap().max_abs_diff(&b.forward_state().unwrap()) < 1e-10);
    }

    #[test]
    fn special_cases() {
        let x = 1.0f64;
        assert_eq!(OscillatorInstance::new(x, 1.0, None).unwrap().invest_bound(), 0.0);
        let zs = 1.0 + (-x).exp();
        let case2 = OscillatorInstance::new(x, 1.0 / zs, None).unwrap();
        assert_abs_diff_eq!(case2.invest_bound(), zs.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(case2.invest_bound(), 0.313262, epsilon = 1e-6);
        let case3 = OscillatorInstance::new(x, 1.0 - (-x).exp(), None).unwrap();
        let expected = -(1.0 + (-2.0 * x).exp() - (-x).exp()).ln();
        assert_abs_diff_eq!(case3.invest_bound(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(case3.invest_bound(), 0.264675, epsilon = 1e-6);
        assert_abs_diff_eq!(case3.closed_form_p0r(), 0.767456, epsilon = 1e-6);
    }

    #[test]
    fn pipeline_agrees_with_closed_form() {
        let inst = OscillatorInstance::new(1.0, 0.75, None).unwrap();
        let pops = inst.reversal_populations().unwrap();
        assert!(pops.residual < 1e-9);
        assert!(pops.p0r >= inst.p0() * inst.p0());
        assert_abs_diff_eq!(inst.invest_bound_pipeline().unwrap(), inst.invest_bound(), epsilon = 1e-9);
        assert_abs_diff_eq!(inst.invest_bound_from_fidelity().unwrap(), inst.invest_bound(), epsilon = 1e-9);
    }

    #[test]
    fn reversal_equals_forward_channel() {
        let inst = OscillatorInstance::new(0.8, 0.85, None).unwrap();
        let t = inst.thermal_operation().unwrap();
        assert!(t.superoperator().unwrap().max_abs_diff(&t.reversal().superoperator().unwrap()) < 1e-14);
    }
}

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::superop::{gibbs_preservation_residual, Superoperator};
use super::petz_map;
use crate::config::GIBBS_PRESERVING_TOL;
use crate::error::{Error, Result};
use crate::operator::{hermitian_part, same_dim, trace, ComplexMatrix, DensityMatrix};

/// Gauss-Legendre rule for integrals against `p(t) = pi/2 (cosh(pi t) + 1)^-1`
/// over the real line.
///
/// The line is mapped onto `(-1, 1)` by `u = tanh(pi t / (2 m))`, which turns
/// the integral into `int w(u) f(t(u)) du` with
/// `w(u) = 2m (1 - u^2)^(m-1) / ((1+u)^m + (1-u)^m)^2`. For `m = 1` the
/// weight is the constant one half. Larger `m` spreads the nodes over a wider
/// range of `t`, which is what makes the rule converge quickly for the
/// oscillating integrands `exp(i w t)` that appear here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub order: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 64, order: 5 }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize, order: u32) -> Result<Self> {
        if nodes == 0 || order == 0 {
            return Err(Error::InvalidParameter("quadrature needs at least one node and order >= 1".into()));
        }
        Ok(Self { nodes, order })
    }

    pub fn doubled(&self) -> Self {
        Self { nodes: 2 * self.nodes, ..*self }
    }

    /// `(t_k, w_k)` with `sum_k w_k f(t_k) ~ int p(t) f(t) dt`.
    pub fn nodes_and_weights(&self) -> Result<Vec<(f64, f64)>> {
        let n = NonZeroUsize::new(self.nodes)
            .ok_or_else(|| Error::InvalidParameter("quadrature needs at least one node".into()))?;
        if self.order == 0 {
            return Err(Error::InvalidParameter("substitution order must be >= 1".into()));
        }
        let rule = GaussLegendre::new(n);
        let m = self.order as i32;
        let mf = self.order as f64;
        Ok(rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(u, w): &(f64, f64)| {
                let t = 2.0 * mf / PI * u.atanh();
                let denom = (1.0 + u).powi(m) + (1.0 - u).powi(m);
                let weight = 2.0 * mf * (1.0 - u * u).powi(m - 1) / (denom * denom);
                (t, w * weight)
            })
            .collect())
    }
}

/// `X -> theta^(it/2) R(N(theta)^(-it/2) X N(theta)^(it/2)) theta^(-it/2)`
/// with `R` the Petz map of `n` for `theta`.
pub fn rotated_petz_map(n: &Superoperator, theta: &DensityMatrix, t: f64) -> Result<Superoperator> {
    let image = n.apply_state(theta)?;
    let petz = petz_map(n, theta)?.map;
    let outer = Superoperator::sandwich(&theta.imaginary_power(t / 2.0), &theta.imaginary_power(-t / 2.0));
    let inner = Superoperator::sandwich(&image.imaginary_power(-t / 2.0), &image.imaginary_power(t / 2.0));
    outer.compose(&petz)?.compose(&inner)
}

/// `int p(t) R_t(sigma) dt` for a Gibbs-preserving `n` with reference `tau`.
///
/// The output is symmetrized and rescaled to unit trace; a trace drift above
/// `1e-8` before rescaling is reported as an error.
pub fn rotated_recovery_average(
    n: &Superoperator,
    tau: &DensityMatrix,
    sigma: &DensityMatrix,
    quadrature: &QuadratureSpec,
) -> Result<DensityMatrix> {
    same_dim(n.dim(), tau.dim())?;
    same_dim(n.dim(), sigma.dim())?;
    let residual = gibbs_preservation_residual(n, tau)?;
    if residual > GIBBS_PRESERVING_TOL {
        return Err(Error::NotGibbsPreserving(residual));
    }
    let petz = petz_map(n, tau)?.map;
    let image = n.apply_state(tau)?;
    let d = n.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (t, w) in quadrature.nodes_and_weights()? {
        let inner = image.imaginary_power(-t / 2.0);
        let rotated_in = &inner * sigma.matrix() * inner.adjoint();
        let outer = tau.imaginary_power(t / 2.0);
        acc += (&outer * petz.apply(&rotated_in)? * outer.adjoint()).scale(w);
    }
    let acc = hermitian_part(&acc);
    let tr = trace(&acc).re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::Inconsistent(format!("rotated recovery lost trace: {tr}")));
    }
    DensityMatrix::from_matrix_checked(acc.unscale(tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_energy_conserving_unitary, ThermalOperation};
    use crate::thermo::HamiltonianSpec;

    #[test]
    fn weights_integrate_density_to_one() {
        for order in 1..=6 {
            let total: f64 = QuadratureSpec::new(64, order).unwrap().nodes_and_weights().unwrap().iter().map(|p| p.1).sum();
            assert!((total - 1.0).abs() < 1e-12, "order {order}: {total}");
        }
    }

    #[test]
    fn order_one_weight_is_one_half() {
        let q = QuadratureSpec::new(8, 1).unwrap();
        let rule = GaussLegendre::new(NonZeroUsize::new(8).unwrap());
        for ((t, w), &(u, g)) in q.nodes_and_weights().unwrap().into_iter().zip(rule.as_node_weight_pairs()) {
            assert!((w - g / 2.0).abs() < 1e-15);
            assert!((t - 2.0 / PI * u.atanh()).abs() < 1e-14);
        }
    }

    #[test]
    fn gibbs_input_is_fixed() {
        let hs = HamiltonianSpec::diagonal(&[0.0, 1.0]).unwrap();
        let hb = HamiltonianSpec::diagonal(&[0.0, 1.0, 1.0]).unwrap();
        let total = HamiltonianSpec::composite(&[&hs, &hb]).unwrap();
        let v = sample_energy_conserving_unitary(&total, 1).unwrap();
        let t = ThermalOperation::from_unitary(v, hs, hb, Vec::new(), 1.2).unwrap();
        let n = t.superoperator().unwrap();
        let tau = t.system_gibbs().state();
        let out = rotated_recovery_average(&n, tau, tau, &QuadratureSpec::default()).unwrap();
        assert!(out.max_abs_diff(tau) < 1e-12);
    }

    #[test]
    fn rejects_non_gibbs_preserving_map() {
        let reset = Superoperator::from_linear_map(2, |x| {
            let mut out = ComplexMatrix::zeros(2, 2);
            out[(0, 0)] = trace(x);
            Ok(out)
        })
        .unwrap();
        let tau = DensityMatrix::diagonal(&[0.6, 0.4]).unwrap();
        assert!(matches!(
            rotated_recovery_average(&reset, &tau, &tau, &QuadratureSpec::default()),
            Err(Error::NotGibbsPreserving(_))
        ));
    }
}

//! Entropy, relative entropy, the Renyi families and fidelity.
//!
//! Logarithms are natural. Matrix powers act on the support only, with the
//! rank tolerance of the cached eigendecomposition.

use nalgebra::linalg::SVD;

use crate::config::SUPPORT_TOL;
use crate::error::{Error, Result};
use crate::operator::{same_dim, trace_of_product, ComplexMatrix, DensityMatrix};

/// `alpha` values closer than this to one use the relative entropy.
pub const ALPHA_ONE_BAND: f64 = 1e-6;

/// Value of a divergence, possibly `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    pub value: f64,
    pub finite: bool,
    /// Whether the support condition relevant to the evaluated order holds.
    pub support_ok: bool,
}

impl DivergenceResult {
    fn finite(value: f64) -> Self {
        Self { value: value.max(0.0), finite: true, support_ok: true }
    }

    fn infinite() -> Self {
        Self { value: f64::INFINITY, finite: false, support_ok: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenyiVariant {
    /// `Tr[rho^a sigma^(1-a)]`, used below one half.
    Petz,
    /// `Tr[(sigma^g rho sigma^g)^a]` with `g = (1-a)/(2a)`.
    Sandwiched,
}

/// Order of a Renyi divergence; `+inf` selects the max-divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaFamilySpec {
    alpha: f64,
}

impl AlphaFamilySpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 || alpha == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("Renyi order must be >= 0 or +inf, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn infinity() -> Self {
        Self { alpha: f64::INFINITY }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn variant(&self) -> RenyiVariant {
        if self.alpha < 0.5 {
            RenyiVariant::Petz
        } else {
            RenyiVariant::Sandwiched
        }
    }

    /// True when evaluation is routed to the relative entropy.
    pub fn is_relative_entropy(&self) -> bool {
        (self.alpha - 1.0).abs() < ALPHA_ONE_BAND
    }
}

/// `-Tr[rho log rho]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eigen = rho.eigen();
    let tol = eigen.rank_tolerance();
    let s: f64 = eigen.values.iter().filter(|&&l| l > tol).map(|&l| -l * l.ln()).sum();
    s.clamp(0.0, (rho.dim() as f64).ln())
}

/// Diagonal of `rho` in the eigenbasis of `sigma`, split into support and
/// kernel parts: returns `(sum_k <k|rho|k> log s_k over the support, weight on the kernel)`.
fn cross_terms(rho: &DensityMatrix, sigma: &DensityMatrix) -> (f64, f64) {
    let es = sigma.eigen();
    let tol = es.rank_tolerance();
    let local = es.vectors.adjoint() * rho.matrix() * &es.vectors;
    let mut cross = 0.0;
    let mut outside = 0.0;
    for (k, &s) in es.values.iter().enumerate() {
        let p = local[(k, k)].re;
        if s > tol {
            cross += p * s.ln();
        } else {
            outside += p;
        }
    }
    (cross, outside.max(0.0))
}

/// Weight of `rho` outside the support of `sigma`.
pub fn support_violation(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim())?;
    Ok(cross_terms(rho, sigma).1)
}

/// `Tr[P_rho P_sigma]`; zero exactly when the supports are orthogonal.
pub fn support_overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim())?;
    Ok(trace_of_product(&rho.support_projector(), &sigma.support_projector()).re)
}

/// `D(rho || sigma) = Tr[rho log rho] - Tr[rho log sigma]`, `+inf` when the
/// support of `rho` is not contained in that of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceResult> {
    same_dim(rho.dim(), sigma.dim())?;
    let (cross, outside) = cross_terms(rho, sigma);
    if outside > SUPPORT_TOL {
        return Ok(DivergenceResult::infinite());
    }
    Ok(DivergenceResult::finite(-von_neumann_entropy(rho) - cross))
}

fn singular_values(m: ComplexMatrix) -> Vec<f64> {
    SVD::new(m, false, false).singular_values.iter().copied().collect()
}

/// `log min { lambda : rho <= lambda sigma }`.
pub fn max_divergence(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceResult> {
    same_dim(rho.dim(), sigma.dim())?;
    if support_violation(rho, sigma)? > SUPPORT_TOL {
        return Ok(DivergenceResult::infinite());
    }
    // lambda_max(sigma^-1/2 rho sigma^-1/2) = ||rho^1/2 sigma^-1/2||^2
    let s = singular_values(rho.power(0.5) * sigma.power(-0.5));
    let top = s.iter().fold(0.0_f64, |m, &x| m.max(x));
    Ok(DivergenceResult::finite(2.0 * top.ln()))
}

/// `log Tr[rho^a sigma^(1-a)]`.
fn petz_log_quasi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> f64 {
    trace_of_product(&rho.power(alpha), &sigma.power(1.0 - alpha)).re.ln()
}

/// `log Tr[(sigma^g rho sigma^g)^a]`, from the singular values `s` of
/// `rho^1/2 sigma^g` as a log-sum-exp of `2a log s`, which stays finite for
/// large orders where `s^(2a)` would underflow or overflow.
fn sandwiched_log_quasi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> f64 {
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let logs: Vec<f64> = singular_values(rho.power(0.5) * sigma.power(gamma))
        .into_iter()
        .filter(|&s| s > 0.0)
        .map(|s| 2.0 * alpha * s.ln())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

fn from_log_quasi(log_q: f64, alpha: f64) -> DivergenceResult {
    if !log_q.is_finite() {
        return DivergenceResult::infinite();
    }
    DivergenceResult::finite(log_q / (alpha - 1.0))
}

fn renyi_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    log_quasi: fn(&DensityMatrix, &DensityMatrix, f64) -> f64,
) -> Result<DivergenceResult> {
    same_dim(rho.dim(), sigma.dim())?;
    if alpha < 1.0 {
        if support_overlap(rho, sigma)? <= SUPPORT_TOL {
            return Ok(DivergenceResult::infinite());
        }
    } else if support_violation(rho, sigma)? > SUPPORT_TOL {
        return Ok(DivergenceResult::infinite());
    }
    Ok(from_log_quasi(log_quasi(rho, sigma, alpha), alpha))
}

/// Petz Renyi divergence at any finite `alpha != 1`, regardless of the family
/// split used by [`renyi_divergence`].
pub fn petz_renyi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<DivergenceResult> {
    if !(alpha >= 0.0 && alpha.is_finite()) || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!("Petz order must be finite, >= 0 and != 1, got {alpha}")));
    }
    renyi_with(rho, sigma, alpha, petz_log_quasi)
}

/// Sandwiched Renyi divergence at any finite `alpha > 0`, `alpha != 1`.
pub fn sandwiched_renyi(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<DivergenceResult> {
    if !(alpha > 0.0 && alpha.is_finite()) || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!("sandwiched order must be finite, > 0 and != 1, got {alpha}")));
    }
    renyi_with(rho, sigma, alpha, sandwiched_log_quasi)
}

/// `D_alpha(rho || sigma)`: Petz below one half, sandwiched from one half up,
/// the relative entropy near one and the max-divergence at `+inf`.
pub fn renyi_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, spec: AlphaFamilySpec) -> Result<DivergenceResult> {
    let alpha = spec.alpha();
    if alpha == f64::INFINITY {
        return max_divergence(rho, sigma);
    }
    if spec.is_relative_entropy() {
        return relative_entropy(rho, sigma);
    }
    match spec.variant() {
        RenyiVariant::Petz => renyi_with(rho, sigma, alpha, petz_log_quasi),
        RenyiVariant::Sandwiched => renyi_with(rho, sigma, alpha, sandwiched_log_quasi),
    }
}

/// Both fidelity conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    /// `Tr |sqrt(rho) sqrt(sigma)|`.
    pub root: f64,
    /// `root^2`.
    pub squared: f64,
}

pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Fidelity> {
    same_dim(rho.dim(), sigma.dim())?;
    let root: f64 = singular_values(rho.power(0.5) * sigma.power(0.5)).iter().sum();
    let root = root.clamp(0.0, 1.0);
    Ok(Fidelity { root, squared: root * root })
}

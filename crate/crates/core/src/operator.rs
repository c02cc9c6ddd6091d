//! Dense complex-matrix foundation: validated Hermitian operators and
//! density matrices, composite-space indexing, tensor products, partial
//! traces and spectral matrix functions.
//!
//! Composite spaces use a single index convention throughout the crate: for
//! factor dimensions `(d_1, ..., d_k)` and local indices `(s_1, ..., s_k)` the
//! global index is `sum_i s_i * prod_{j>i} d_j`, i.e. the leftmost factor
//! varies slowest. This is the ordering produced by the Kronecker product.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::config::{self, HERMITIAN_TOL, PSD_TOL, RANK_REL_TOL, TRACE_TOL, UNITARY_TOL};
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Spectral decomposition of a Hermitian matrix, eigenvalues sorted in
/// descending order with eigenvectors in the matching columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    fn of(matrix: &ComplexMatrix) -> Self {
        let dim = matrix.nrows();
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = ComplexMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
        Self { values, vectors }
    }

    /// Eigenvalues at or below this value are treated as zero.
    pub fn rank_tolerance(&self) -> f64 {
        let lambda_max = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.values.len() as f64 * lambda_max * RANK_REL_TOL
    }

    pub fn rank(&self) -> usize {
        let tol = self.rank_tolerance();
        self.values.iter().filter(|v| v.abs() > tol).count()
    }

    /// `sum_i f(lambda_i) |v_i><v_i|`, optionally restricted to the support.
    pub fn reconstruct(&self, f: impl Fn(f64) -> C64, support_only: bool) -> Result<ComplexMatrix> {
        let dim = self.values.len();
        let tol = self.rank_tolerance();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let weight = if support_only && lambda.abs() <= tol {
                ZERO
            } else {
                let w = f(lambda);
                if !(w.re.is_finite() && w.im.is_finite()) {
                    return Err(Error::Domain(lambda));
                }
                w
            };
            for i in 0..dim {
                scaled[(i, k)] *= weight;
            }
        }
        Ok(&scaled * self.vectors.adjoint())
    }
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter("matrix has zero dimension".into()));
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub(crate) fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Re Tr[a b]` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub(crate) fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Deviation of `u` from unitarity in the max norm.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &ComplexMatrix::identity(n, n))
}

pub fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    check_square(u)?;
    check_finite(u)?;
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary(residual));
    }
    Ok(())
}

/// A Hermitian matrix. The stored form is always the symmetrized `(M + M^dag)/2`.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianOperator").field("dim", &self.dim()).field("matrix", &self.matrix).finish()
    }
}

impl HermitianOperator {
    /// Validates squareness, finiteness, the dimension cap and Hermiticity.
    ///
    /// The Hermiticity test is `max |M - M^dag| <= 1e-12 * max(1, max |M|)`, so
    /// that operators measured in large energy units are not rejected for
    /// rounding noise.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = check_square(&matrix)?;
        config::check_dim(dim)?;
        check_finite(&matrix)?;
        let deviation = max_abs_diff(&matrix, &matrix.adjoint());
        if deviation > HERMITIAN_TOL * max_abs(&matrix).max(1.0) {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self { matrix: hermitian_part(&matrix) })
    }

    /// Symmetrizes without validation. Used for results of operations that are
    /// Hermitian by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix: hermitian_part(&matrix) }
    }

    pub fn from_real_diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO });
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> Eigen {
        Eigen::of(&self.matrix)
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { matrix: self.matrix.scale(factor) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix - &other.matrix })
    }

    /// `Tr[self * other]` (real for Hermitian pairs).
    pub fn expectation(&self, other: &Self) -> Result<f64> {
        same_dim(self.dim(), other.dim())?;
        Ok(trace_of_product(&self.matrix, &other.matrix).re)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Schatten-1 norm, the sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigen().values.iter().map(|v| v.abs()).sum()
    }
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A validated density matrix: Hermitian, positive semidefinite up to
/// `-1e-10`, unit trace up to `1e-10`. The eigendecomposition is computed on
/// first use and cached; cached eigenvalues are clamped at zero.
pub struct DensityMatrix {
    op: HermitianOperator,
    eigen: OnceLock<Arc<Eigen>>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(cached) = self.eigen.get() {
            let _ = eigen.set(Arc::clone(cached));
        }
        Self { op: self.op.clone(), eigen }
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix").field("dim", &self.dim()).field("matrix", self.matrix()).finish()
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.op == other.op
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(matrix)?)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr));
        }
        let eigen = op.eigen();
        let min = eigen.values.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        let dm = Self { op, eigen: OnceLock::new() };
        let _ = dm.eigen.set(Arc::new(clamp(eigen)));
        Ok(dm)
    }

    /// Validates after symmetrizing; for outputs of channels, which are states
    /// up to rounding.
    pub(crate) fn from_matrix_checked(matrix: ComplexMatrix) -> Result<Self> {
        Self::from_operator(HermitianOperator::from_matrix_unchecked(matrix))
    }

    /// Like [`from_matrix_checked`](Self::from_matrix_checked) but rescales to
    /// unit trace first.
    pub(crate) fn from_matrix_normalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = trace(&matrix).re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::BadTrace(tr));
        }
        Self::from_matrix_checked(matrix.unscale(tr))
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::from_operator(HermitianOperator::from_real_diagonal(probabilities)?)
    }

    /// `|k><k|` in a `dim`-dimensional space.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidParameter(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        Self::diagonal(&p)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0 / dim as f64; dim])
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm2 = v.norm_squared();
        if !(norm2.is_finite() && norm2 > 0.0) {
            return Err(Error::InvalidParameter("pure state vector has zero or non-finite norm".into()));
        }
        Self::from_matrix_checked((&v * v.adjoint()).unscale(norm2))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn eigen(&self) -> &Eigen {
        self.eigen.get_or_init(|| Arc::new(clamp(self.op.eigen())))
    }

    pub fn rank(&self) -> usize {
        self.eigen().rank()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> ComplexMatrix {
        self.eigen().reconstruct(|_| ONE, true).expect("constant function is total")
    }

    /// `rho^p` on the support (negative powers included).
    pub fn power(&self, p: f64) -> ComplexMatrix {
        self.eigen()
            .reconstruct(|l| C64::new(l.powf(p), 0.0), true)
            .expect("support eigenvalues are positive")
    }

    /// `rho^{i s}` on the support, zero on the kernel.
    pub fn imaginary_power(&self, s: f64) -> ComplexMatrix {
        self.eigen()
            .reconstruct(|l| C64::from_polar(1.0, s * l.ln()), true)
            .expect("support eigenvalues are positive")
    }

    /// `log rho` on the support.
    pub fn log(&self) -> ComplexMatrix {
        self.eigen()
            .reconstruct(|l| C64::new(l.ln(), 0.0), true)
            .expect("support eigenvalues are positive")
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.op.max_abs_diff(&other.op)
    }

    /// `||self - other||_1`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.op.sub(&other.op)?.trace_norm())
    }
}

fn clamp(mut eigen: Eigen) -> Eigen {
    for v in &mut eigen.values {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    eigen
}

/// Ordered list of tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    factor_dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(Error::InvalidParameter(format!("invalid factor dimensions {factor_dims:?}")));
        }
        let total = factor_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidParameter("composite dimension overflows".into()))?;
        config::check_dim(total)?;
        Ok(Self { factor_dims })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Local indices of a global index.
    pub fn digits(&self, mut global: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factor_dims.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.factor_dims).rev() {
            *slot = global % d;
            global /= d;
        }
        digits
    }

    /// Global index of local indices.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.factor_dims).fold(0, |acc, (&s, &d)| acc * d + s)
    }

    /// Sub-space made of the given factors, in their original relative order.
    pub fn subspace(&self, factors: &[usize]) -> Result<Self> {
        let keep = normalize_keep(factors, self.num_factors())?;
        Self::new(keep.iter().map(|&i| self.factor_dims[i]).collect())
    }
}

fn normalize_keep(keep: &[usize], num_factors: usize) -> Result<Vec<usize>> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial trace must keep at least one factor".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= num_factors) {
        return Err(Error::InvalidParameter(format!("factor index {bad} out of range ({num_factors} factors)")));
    }
    Ok(keep)
}

/// Partial trace of an arbitrary (not necessarily Hermitian) operator.
pub(crate) fn partial_trace_matrix(m: &ComplexMatrix, space: &CompositeSpace, keep: &[usize]) -> Result<ComplexMatrix> {
    same_dim(space.total_dim(), m.nrows())?;
    check_square(m)?;
    let keep = normalize_keep(keep, space.num_factors())?;
    let traced: Vec<usize> = (0..space.num_factors()).filter(|i| !keep.contains(i)).collect();
    let kept_space = CompositeSpace::new(keep.iter().map(|&i| space.factor_dims[i]).collect())?;
    let kept_dim = kept_space.total_dim();
    let traced_dim: usize = traced.iter().map(|&i| space.factor_dims[i]).product();

    // table[k * traced_dim + t] = global index with kept digits k and traced digits t
    let mut table = vec![0usize; kept_dim * traced_dim];
    for global in 0..space.total_dim() {
        let digits = space.digits(global);
        let k = keep.iter().fold(0, |acc, &i| acc * space.factor_dims[i] + digits[i]);
        let t = traced.iter().fold(0, |acc, &i| acc * space.factor_dims[i] + digits[i]);
        table[k * traced_dim + t] = global;
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        for b in 0..kept_dim {
            let mut acc = ZERO;
            for t in 0..traced_dim {
                acc += m[(table[a * traced_dim + t], table[b * traced_dim + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Reduced operator on the factors in `keep` (kept in their original order).
pub fn partial_trace(m: &HermitianOperator, space: &CompositeSpace, keep: &[usize]) -> Result<HermitianOperator> {
    Ok(HermitianOperator::from_matrix_unchecked(partial_trace_matrix(m.matrix(), space, keep)?))
}

/// Partial trace of a state; the result is again a state.
pub fn reduce_state(rho: &DensityMatrix, space: &CompositeSpace, keep: &[usize]) -> Result<DensityMatrix> {
    DensityMatrix::from_matrix_checked(partial_trace_matrix(rho.matrix(), space, keep)?)
}

/// Operands of [`tensor`].
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl Tensor for HermitianOperator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        config::check_dim(self.dim() * other.dim())?;
        Ok(Self { matrix: self.matrix.kronecker(&other.matrix) })
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let op = self.op.tensor(&other.op)?;
        Ok(Self { op, eigen: OnceLock::new() })
    }
}

/// Kronecker product under the crate-wide index convention.
pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Tensor product of several states, left to right.
pub fn tensor_all(states: &[&DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("empty tensor product".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, s| acc.tensor(s))
}

/// `sum_i f(lambda_i) |v_i><v_i|` for real `f`.
///
/// With `support_only`, eigenvalues with `|lambda| <= dim * lambda_max * 1e-12`
/// are dropped from the sum. A non-finite `f(lambda)` on a retained eigenvalue
/// is a domain error.
pub fn matrix_function(m: &HermitianOperator, f: impl Fn(f64) -> f64, support_only: bool) -> Result<HermitianOperator> {
    let out = m.eigen().reconstruct(|l| C64::new(f(l), 0.0), support_only)?;
    Ok(HermitianOperator::from_matrix_unchecked(out))
}

/// `U m U^dag` for a unitary `U`.
pub fn conjugate(m: &HermitianOperator, u: &ComplexMatrix) -> Result<HermitianOperator> {
    check_unitary(u)?;
    same_dim(m.dim(), u.nrows())?;
    Ok(HermitianOperator::from_matrix_unchecked(u * m.matrix() * u.adjoint()))
}

pub(crate) fn conjugate_state(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    same_dim(rho.dim(), u.nrows())?;
    DensityMatrix::from_matrix_checked(u * rho.matrix() * u.adjoint())
}

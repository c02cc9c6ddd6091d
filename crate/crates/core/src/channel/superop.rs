use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operator::{
    check_finite, hermitian_part, max_abs_diff, same_dim, ComplexMatrix, DensityMatrix, C64, ONE, ZERO,
};

/// Linear map on `d x d` operators as a `d^2 x d^2` matrix acting on
/// column-stacked vectors, `vec(X)[i + j d] = X[i, j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

fn unit(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(dim, dim);
    e[(i, j)] = ONE;
    e
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        check_finite(&matrix)?;
        Ok(Self { dim, matrix })
    }

    /// Tabulates `f` on the matrix units `|i><j|`.
    pub fn from_linear_map(dim: usize, f: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<Self> {
        let n = dim * dim;
        let mut matrix = ComplexMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let out = f(&unit(dim, i, j))?;
                same_dim(dim, out.nrows())?;
                matrix.column_mut(i + j * dim).copy_from_slice(out.as_slice());
            }
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim * dim, dim * dim) }
    }

    /// `X -> A X B`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        Self { dim: a.nrows(), matrix: b.transpose().kronecker(a) }
    }

    /// Convex or general linear combination `sum_k w_k S_k`.
    pub fn combination(terms: &[(f64, &Superoperator)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty superoperator combination".into()))?;
        let mut matrix = ComplexMatrix::zeros(first.matrix.nrows(), first.matrix.ncols());
        for (w, s) in terms {
            same_dim(first.dim, s.dim)?;
            matrix += s.matrix.scale(*w);
        }
        Ok(Self { dim: first.dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        same_dim(self.dim, x.nrows())?;
        same_dim(self.dim, x.ncols())?;
        let v = &self.matrix * DVector::from_column_slice(x.as_slice());
        Ok(ComplexMatrix::from_column_slice(self.dim, self.dim, v.as_slice()))
    }

    /// Applies the map to a state; the output is symmetrized and validated.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix_checked(hermitian_part(&self.apply(rho.matrix())?))
    }

    /// Hilbert-Schmidt adjoint, `Tr[A^dag S(B)] = Tr[S^dag(A)^dag B]`.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Superoperator) -> Result<Self> {
        same_dim(self.dim, first.dim)?;
        Ok(Self { dim: self.dim, matrix: &self.matrix * &first.matrix })
    }

    /// `sum_ij |i><j| (x) S(|i><j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut c = ComplexMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let col = self.matrix.column(i + j * d);
                for b in 0..d {
                    for a in 0..d {
                        c[(i * d + a, j * d + b)] = col[a + b * d];
                    }
                }
            }
        }
        c
    }

    /// `max_ij |Tr S(|i><j|) - delta_ij|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for j in 0..d {
            for i in 0..d {
                let col = self.matrix.column(i + j * d);
                let tr: C64 = (0..d).map(|k| col[k + k * d]).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((tr - target).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        let c = hermitian_part(&self.choi());
        nalgebra::SymmetricEigen::new(c).eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_completely_positive(&self) -> bool {
        self.min_choi_eigenvalue() >= -1e-9
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

/// `||S(tau) - tau||_1`.
pub fn gibbs_preservation_residual(s: &Superoperator, tau: &DensityMatrix) -> Result<f64> {
    let out = hermitian_part(&s.apply(tau.matrix())?);
    let diff = crate::operator::HermitianOperator::from_matrix_unchecked(out - tau.matrix());
    Ok(diff.trace_norm())
}

/// True when `||S(tau) - tau||_1 <= 1e-9`.
pub fn is_gibbs_preserving(s: &Superoperator, tau: &DensityMatrix) -> Result<bool> {
    Ok(gibbs_preservation_residual(s, tau)? <= crate::config::GIBBS_PRESERVING_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::trace;

    fn random_like(d: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(d, d, |i, j| C64::new((seed + i as f64 * 1.3 + j as f64).sin(), (seed * j as f64 - i as f64).cos()))
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let (a, b, x) = (random_like(3, 0.1), random_like(3, 0.7), random_like(3, 2.0));
        let s = Superoperator::sandwich(&a, &b);
        assert!(max_abs_diff(&s.apply(&x).unwrap(), &(&a * &x * &b)) < 1e-13);
    }

    #[test]
    fn linear_map_round_trip_and_vectorization() {
        let a = random_like(2, 0.4);
        let s = Superoperator::from_linear_map(2, |x| Ok(&a * x * a.adjoint())).unwrap();
        let x = random_like(2, 1.1);
        assert!(max_abs_diff(&s.apply(&x).unwrap(), &(&a * &x * a.adjoint())) < 1e-13);
        // column stacking: |1><0| is vec index 1
        let e10 = unit(2, 1, 0);
        let col = s.matrix().column(1).clone_owned();
        assert!(max_abs_diff(&ComplexMatrix::from_column_slice(2, 2, col.as_slice()), &(&a * e10 * a.adjoint())) < 1e-13);
    }

    #[test]
    fn identity_channel_properties() {
        let s = Superoperator::identity(3);
        assert!(s.trace_preservation_residual() < 1e-15);
        assert!(s.is_completely_positive());
        let tau = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        assert!(is_gibbs_preserving(&s, &tau).unwrap());
    }

    #[test]
    fn transpose_is_not_completely_positive() {
        let t = Superoperator::from_linear_map(2, |x| Ok(x.transpose())).unwrap();
        assert!(t.trace_preservation_residual() < 1e-15);
        assert!(!t.is_completely_positive());
    }

    #[test]
    fn reset_map_is_not_gibbs_preserving() {
        let reset = Superoperator::from_linear_map(2, |x| {
            let mut out = ComplexMatrix::zeros(2, 2);
            out[(0, 0)] = trace(x);
            Ok(out)
        })
        .unwrap();
        let tau = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        assert!(!is_gibbs_preserving(&reset, &tau).unwrap());
        assert!(reset.is_completely_positive());
    }

    #[test]
    fn adjoint_duality() {
        let a = random_like(2, 0.9);
        let s = Superoperator::from_linear_map(2, |x| Ok(&a * x * a.adjoint())).unwrap();
        let (x, y) = (random_like(2, 3.0), random_like(2, 5.0));
        let lhs = trace(&(x.adjoint() * s.apply(&y).unwrap()));
        let rhs = trace(&(s.adjoint().apply(&x).unwrap().adjoint() * &y));
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

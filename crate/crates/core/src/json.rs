//! JSON interchange formats.
//!
//! Matrices are `{"dim": n, "entries": [[re, im], ...]}` with `n * n` entries
//! in row-major order. Hamiltonians are either `{"diagonal": [E_0, ...]}` or a
//! full Hermitian matrix in the matrix format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, DensityMatrix, HermitianOperator, C64};
use crate::thermo::HamiltonianSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let dim = m.nrows();
        let entries = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self { dim, entries }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.dim == 0 || self.entries.len() != self.dim * self.dim {
            return Err(Error::InvalidParameter(format!(
                "matrix JSON with dim {} needs {} entries, found {}",
                self.dim,
                self.dim * self.dim,
                self.entries.len()
            )));
        }
        let values: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Ok(ComplexMatrix::from_row_slice(self.dim, self.dim, &values))
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix()?)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix()?)
    }
}

impl From<&DensityMatrix> for MatrixJson {
    fn from(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.matrix())
    }
}

impl From<&HermitianOperator> for MatrixJson {
    fn from(op: &HermitianOperator) -> Self {
        Self::from_matrix(op.matrix())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianJson {
    Diagonal { diagonal: Vec<f64> },
    Full(MatrixJson),
}

impl HamiltonianJson {
    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        match self {
            HamiltonianJson::Diagonal { diagonal } => HamiltonianSpec::diagonal(diagonal),
            HamiltonianJson::Full(m) => Ok(HamiltonianSpec::from_operator(m.to_operator()?)),
        }
    }

    /// Diagonal form when the Hamiltonian is diagonal in the computational basis.
    pub fn from_spec(h: &HamiltonianSpec) -> Self {
        if h.is_computational_basis() {
            HamiltonianJson::Diagonal { diagonal: h.energies().to_vec() }
        } else {
            HamiltonianJson::Full(MatrixJson::from(h.operator()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_row_major_entries() {
        let json = r#"{"dim": 2, "entries": [[0.5, 0.0], [0.0, -0.25], [0.0, 0.25], [0.5, 0.0]]}"#;
        let m: MatrixJson = serde_json::from_str(json).unwrap();
        let rho = m.to_state().unwrap();
        assert_eq!(rho.matrix()[(0, 1)], C64::new(0.0, -0.25));
        assert_eq!(MatrixJson::from(&rho), m);
    }

    #[test]
    fn rejects_wrong_entry_count() {
        let m = MatrixJson { dim: 2, entries: vec![[1.0, 0.0]; 3] };
        assert!(m.to_matrix().is_err());
    }

    #[test]
    fn hamiltonian_forms() {
        let diag: HamiltonianJson = serde_json::from_str(r#"{"diagonal": [0.0, 1.0, 1.0]}"#).unwrap();
        let h = diag.to_spec().unwrap();
        assert_eq!(h.blocks().len(), 2);
        let full: HamiltonianJson =
            serde_json::from_str(r#"{"dim": 2, "entries": [[0,0],[1,0],[1,0],[0,0]]}"#).unwrap();
        let h = full.to_spec().unwrap();
        let mut e = h.energies().to_vec();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }
}

//! Shared JSON matrix format:
//! `{"dims": [...], "re": [[...]], "im": [[...]]}`, row-major with the real
//! and imaginary parts split.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::battery::{DensityMatrix, Hamiltonian, TripartiteState};
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DimList};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix, dims: &DimList) -> Self {
        let n = m.rows();
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                re[i][j] = m[(i, j)].re;
                im[i][j] = m[(i, j)].im;
            }
        }
        Self {
            dims: dims.as_slice().to_vec(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<(ComplexMatrix, DimList)> {
        let dims = DimList::new(&self.dims)?;
        let n = dims.product();
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: self.re.len(),
            });
        }
        if self.re.iter().any(|r| r.len() != n) || self.im.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDims("ragged matrix rows".into()));
        }
        let m = ComplexMatrix::from_fn(n, n, |i, j| Complex::new(self.re[i][j], self.im[i][j]));
        if !m.all_finite() {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok((m, dims))
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(rho.matrix(), rho.dims()))
        .expect("serialization cannot fail")
}

pub fn hamiltonian_to_json(ham: &Hamiltonian) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(ham.matrix(), ham.dims()))
        .expect("serialization cannot fail")
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    let parsed: MatrixJson = serde_json::from_str(text)?;
    let (m, dims) = parsed.to_matrix()?;
    DensityMatrix::new(m, dims)
}

pub fn hamiltonian_from_json(text: &str) -> Result<Hamiltonian> {
    let parsed: MatrixJson = serde_json::from_str(text)?;
    let (m, dims) = parsed.to_matrix()?;
    Hamiltonian::new(m, dims)
}

pub fn tripartite_from_json(text: &str) -> Result<TripartiteState> {
    let parsed: MatrixJson = serde_json::from_str(text)?;
    let (m, dims) = parsed.to_matrix()?;
    TripartiteState::new(m, dims)
}

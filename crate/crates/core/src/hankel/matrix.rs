use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::HankelSymbol;
use crate::error::{Error, Result};
use crate::multiplicative_index::MonomialId;
use crate::poly_torus::Polynomial;

/// Above this many rows or columns the matrix is stored in CSR form.
pub const DENSE_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixStorage {
    Dense(DMatrix<Complex64>),
    Sparse(CsrMatrix),
}

/// Finite section `M_{jk} = rho_{jk}` of a multiplicative Hankel form.
///
/// Rows and columns are indexed by ascending monomial ids; the square case
/// `rows == cols` is the usual index set `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    rows: Vec<MonomialId>,
    cols: Vec<MonomialId>,
    storage: MatrixStorage,
}

fn sorted_unique(ids: &[MonomialId]) -> Vec<MonomialId> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Square section on the index set `J`.
pub fn build_matrix(psi: &HankelSymbol, index_set: &[MonomialId]) -> Result<HankelMatrix> {
    build_matrix_rect(psi, index_set, index_set)
}

/// Rectangular section with rows indexed by `rows` and columns by `cols`.
pub fn build_matrix_rect(psi: &HankelSymbol, rows: &[MonomialId], cols: &[MonomialId]) -> Result<HankelMatrix> {
    let rows = sorted_unique(rows);
    let cols = sorted_unique(cols);
    if let (Some(r), Some(c)) = (rows.last(), cols.last()) {
        r.checked_mul(*c)?;
    }
    // each (n, j) pair with j | n determines k = n / j, so entries never collide
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    for (n, rho) in psi.polynomial().terms() {
        for (i, &j) in rows.iter().enumerate() {
            if j > n {
                break;
            }
            if let Some(k) = n.checked_div(j) {
                if let Ok(col) = cols.binary_search(&k) {
                    triplets.push((i, col, rho));
                }
            }
        }
    }
    let storage = if rows.len().max(cols.len()) <= DENSE_LIMIT {
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (i, k, v) in triplets {
            m[(i, k)] = v;
        }
        MatrixStorage::Dense(m)
    } else {
        triplets.sort_by_key(|&(i, k, _)| (i, k));
        let mut row_ptr = vec![0; rows.len() + 1];
        for &(i, _, _) in &triplets {
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows.len() {
            row_ptr[i + 1] += row_ptr[i];
        }
        MatrixStorage::Sparse(CsrMatrix {
            nrows: rows.len(),
            ncols: cols.len(),
            row_ptr,
            col_idx: triplets.iter().map(|t| t.1).collect(),
            values: triplets.iter().map(|t| t.2).collect(),
        })
    };
    Ok(HankelMatrix { rows, cols, storage })
}

impl HankelMatrix {
    /// Builds directly from a dense matrix; used for tests and general inputs.
    pub fn from_dense(rows: Vec<MonomialId>, cols: Vec<MonomialId>, m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != rows.len() || m.ncols() != cols.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{} but index sets have sizes {} and {}",
                m.nrows(),
                m.ncols(),
                rows.len(),
                cols.len()
            )));
        }
        Ok(HankelMatrix { rows, cols, storage: MatrixStorage::Dense(m) })
    }

    pub fn rows(&self) -> &[MonomialId] {
        &self.rows
    }

    pub fn cols(&self) -> &[MonomialId] {
        &self.cols
    }

    /// The index set `J` of a square section.
    pub fn index_set(&self) -> &[MonomialId] {
        &self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn storage(&self) -> &MatrixStorage {
        &self.storage
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, MatrixStorage::Dense(_))
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        match &self.storage {
            MatrixStorage::Dense(m) => {
                let mut out = Vec::new();
                for i in 0..m.nrows() {
                    for k in 0..m.ncols() {
                        let v = m[(i, k)];
                        if v != Complex64::new(0.0, 0.0) {
                            out.push((i, k, v));
                        }
                    }
                }
                out
            }
            MatrixStorage::Sparse(s) => (0..s.nrows)
                .flat_map(|i| (s.row_ptr[i]..s.row_ptr[i + 1]).map(move |e| (i, s.col_idx[e], s.values[e])))
                .collect(),
        }
    }

    pub fn entry(&self, i: usize, k: usize) -> Complex64 {
        match &self.storage {
            MatrixStorage::Dense(m) => m[(i, k)],
            MatrixStorage::Sparse(s) => {
                (s.row_ptr[i]..s.row_ptr[i + 1]).find(|&e| s.col_idx[e] == k).map(|e| s.values[e]).unwrap_or_default()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.triplets().is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.storage {
            MatrixStorage::Dense(m) => m.clone(),
            MatrixStorage::Sparse(_) => {
                let mut m = DMatrix::zeros(self.rows.len(), self.cols.len());
                for (i, k, v) in self.triplets() {
                    m[(i, k)] = v;
                }
                m
            }
        }
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.storage {
            MatrixStorage::Dense(m) => m * x,
            MatrixStorage::Sparse(s) => {
                let out: Vec<Complex64> = (0..s.nrows)
                    .into_par_iter()
                    .map(|i| (s.row_ptr[i]..s.row_ptr[i + 1]).map(|e| s.values[e] * x[s.col_idx[e]]).sum())
                    .collect();
                DVector::from_vec(out)
            }
        }
    }

    /// `M^H y`.
    pub fn adjoint_mul_vec(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.storage {
            MatrixStorage::Dense(m) => m.ad_mul(y),
            MatrixStorage::Sparse(s) => {
                let mut out = DVector::zeros(s.ncols);
                for i in 0..s.nrows {
                    for e in s.row_ptr[i]..s.row_ptr[i + 1] {
                        out[s.col_idx[e]] += s.values[e].conj() * y[i];
                    }
                }
                out
            }
        }
    }

    /// CSV dump: header `index,<col ids>`, then one line per row starting with
    /// the row id. Complex entries are written as `re+imi`.
    pub fn to_csv(&self) -> String {
        let dense = self.to_dense();
        let mut out = String::from("index");
        for c in &self.cols {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&r.to_string());
            for k in 0..self.cols.len() {
                let v = dense[(i, k)];
                if v.im == 0.0 {
                    out.push_str(&format!(",{}", v.re));
                } else {
                    out.push_str(&format!(",{}{:+}i", v.re, v.im));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn export(&self) -> MatrixExport {
        let dense = self.to_dense();
        let grid = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..dense.nrows()).map(|i| (0..dense.ncols()).map(|k| f(&dense[(i, k)])).collect()).collect()
        };
        MatrixExport {
            rows: self.rows.iter().map(|r| r.get()).collect(),
            cols: self.cols.iter().map(|c| c.get()).collect(),
            re: grid(|z| z.re),
            im: grid(|z| z.im),
        }
    }
}

/// Row-major JSON dump: index sets first, then real and imaginary parts.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixExport {
    pub rows: Vec<u64>,
    pub cols: Vec<u64>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// `sum_{j,k} a_j conj(M_{jk}) b_k`, the matrix route to `H_psi(f g)`.
pub fn bilinear_matrix(m: &HankelMatrix, f: &Polynomial, g: &Polynomial) -> Result<Complex64> {
    let position = |ids: &[MonomialId], n: MonomialId| {
        ids.binary_search(&n)
            .map_err(|_| Error::InvalidArgument(format!("monomial {n} is outside the matrix index set")))
    };
    let a: Vec<(usize, Complex64)> = f.terms().map(|(n, c)| Ok((position(m.rows(), n)?, c))).collect::<Result<_>>()?;
    let b: Vec<(usize, Complex64)> = g.terms().map(|(n, c)| Ok((position(m.cols(), n)?, c))).collect::<Result<_>>()?;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(i, x) in &a {
        for &(k, y) in &b {
            sum += x * m.entry(i, k).conj() * y;
        }
    }
    Ok(sum)
}

//! Multiplicative Hankel forms `H_psi(f g) = <f g, psi>` and their norms.

mod matrix;
mod norm;
mod schur;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly_torus::Polynomial;

pub use matrix::{
    bilinear_matrix, build_matrix, build_matrix_rect, CsrMatrix, HankelMatrix, MatrixExport, MatrixStorage, DENSE_LIMIT,
};
pub use norm::{
    largest_singular_value, operator_norm, pair_block, power_iteration_norm, tensor_norm_closed_form,
    tensor_norm_exact, NormMethod, NormResult, POWER_ITERATION_CAP,
};
pub use schur::{
    helson_weights, omega_weights, row_sum_identity_check, schur_bound, schur_bound_exact, RowSumReport, RowSumRow,
    SchurWeights, Weight,
};

/// The analytic symbol `psi` of a Hankel form; its coefficients are `rho_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HankelSymbol(Polynomial);

impl HankelSymbol {
    pub fn new(psi: Polynomial) -> Self {
        HankelSymbol(psi)
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// `H_psi(f) = <f, psi> = sum_n a_n conj(rho_n)`.
pub fn apply_functional(psi: &HankelSymbol, f: &Polynomial) -> Result<Complex64> {
    if psi.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: f.dim() });
    }
    Ok(f.terms().map(|(n, a)| a * psi.polynomial().coeff(n).conj()).sum())
}

/// `H_psi(f)` in integer arithmetic, when every coefficient that enters the
/// sum is a real integer.
pub fn apply_functional_integer(psi: &HankelSymbol, f: &Polynomial) -> Option<i128> {
    if psi.dim() != f.dim() {
        return None;
    }
    let as_int = |c: Complex64| (c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < 1e18).then_some(c.re as i128);
    let mut sum: i128 = 0;
    for (n, a) in f.terms() {
        let rho = psi.polynomial().coeff(n);
        if rho == Complex64::new(0.0, 0.0) {
            continue;
        }
        sum = sum.checked_add(as_int(a)?.checked_mul(as_int(rho)?)?)?;
    }
    Some(sum)
}

/// `H_psi(f, g) = <f g, psi>`.
pub fn bilinear(psi: &HankelSymbol, f: &Polynomial, g: &Polynomial) -> Result<Complex64> {
    apply_functional(psi, &f.multiply(g)?)
}

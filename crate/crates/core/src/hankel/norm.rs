use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use serde::Serialize;

use super::{HankelMatrix, MatrixStorage};
use crate::error::{Error, Result};
use crate::exact::Sqrt2Power;
use crate::multiplicative_index::check_even_dimension;

pub const POWER_ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ExactSvd,
    PowerIteration,
    TensorClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub method: NormMethod,
    pub iterations: usize,
    pub residual: f64,
}

/// Largest singular value: dense SVD for dense storage, power iteration on
/// the Gram operator `M^H M` otherwise.
pub fn operator_norm(m: &HankelMatrix, tol: f64) -> Result<NormResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if m.is_zero() {
        return Ok(NormResult { value: 0.0, method: NormMethod::ExactSvd, iterations: 0, residual: 0.0 });
    }
    match m.storage() {
        MatrixStorage::Dense(dense) => Ok(NormResult {
            value: largest_singular_value(dense),
            method: NormMethod::ExactSvd,
            iterations: 0,
            residual: 0.0,
        }),
        MatrixStorage::Sparse(_) => power_iteration_norm(m, tol, POWER_ITERATION_CAP),
    }
}

pub fn largest_singular_value(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Power iteration on `M^H M` from the all-ones vector.
///
/// Stops when the Rayleigh quotient changes by less than `tol * max(1, lambda)`;
/// `residual` is `||G v - lambda v||` for the final unit vector `v`.
pub fn power_iteration_norm(m: &HankelMatrix, tol: f64, max_iter: usize) -> Result<NormResult> {
    let (_, n) = m.shape();
    if n == 0 || m.is_zero() {
        return Ok(NormResult { value: 0.0, method: NormMethod::PowerIteration, iterations: 0, residual: 0.0 });
    }
    let mut v = DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut lambda_prev = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut lambda = 0.0;
    for iter in 1..=max_iter {
        let gv = m.adjoint_mul_vec(&m.mul_vec(&v));
        lambda = v.dotc(&gv).re;
        residual = (&gv - &v * Complex64::new(lambda, 0.0)).norm();
        let norm = gv.norm();
        if norm == 0.0 {
            // v lies in the kernel; the Gram operator is nonzero, so this only
            // happens for adversarial starts
            return Err(Error::NotConverged { iterations: iter, estimate: 0.0, residual });
        }
        let converged = (lambda - lambda_prev).abs() <= tol * lambda.max(1.0);
        if converged {
            return Ok(NormResult {
                value: lambda.max(0.0).sqrt(),
                method: NormMethod::PowerIteration,
                iterations: iter,
                residual,
            });
        }
        lambda_prev = lambda;
        v = gv / Complex64::new(norm, 0.0);
    }
    Err(Error::NotConverged { iterations: max_iter, estimate: lambda.max(0.0).sqrt(), residual })
}

/// The matrix of one variable pair on the index set `{1, p, q}`: only the
/// products `p = p * 1` and `q = q * 1` land in the pair's index set.
pub fn pair_block() -> Matrix3<i64> {
    Matrix3::new(0, 1, 1, 1, 0, 0, 1, 0, 0)
}

/// `sigma_max(B)^{d/2}`, with `sigma_max(B)` from a floating-point SVD of the
/// pair block. The construction matrix is a tensor power of `B` up to a
/// permutation, and singular values multiply under tensor products.
pub fn tensor_norm_closed_form(d: usize) -> Result<f64> {
    check_even_dimension(d)?;
    let b = pair_block().map(|x| x as f64);
    let sigma = b.singular_values().max();
    Ok(sigma.powi((d / 2) as i32))
}

/// The same quantity in exact arithmetic: the largest eigenvalue of the
/// integer Gram matrix `B^T B` is found as an integer root of its
/// characteristic polynomial.
pub fn tensor_norm_exact(d: usize) -> Result<Sqrt2Power> {
    check_even_dimension(d)?;
    let b = pair_block();
    let gram = b.transpose() * b;
    let lambda = largest_integer_eigenvalue(&gram)
        .ok_or_else(|| Error::InvalidArgument("pair block Gram matrix has no integer top eigenvalue".into()))?;
    if lambda <= 0 || lambda & (lambda - 1) != 0 {
        return Err(Error::InvalidArgument(format!("top Gram eigenvalue {lambda} is not a power of two")));
    }
    // sigma^2 = 2^a, so sigma^{d/2} = 2^{a d / 4}
    let a = lambda.trailing_zeros() as i64;
    Ok(Sqrt2Power::pow_sqrt2(a * (d / 2) as i64))
}

/// Largest root of `det(x I - G)` for a symmetric positive semidefinite
/// integer 3x3 matrix, if that root is an integer.
fn largest_integer_eigenvalue(g: &Matrix3<i64>) -> Option<i64> {
    let trace = g.trace();
    let minors = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)] + g[(0, 0)] * g[(2, 2)] - g[(0, 2)] * g[(2, 0)]
        + g[(1, 1)] * g[(2, 2)]
        - g[(1, 2)] * g[(2, 1)];
    let det = g[(0, 0)] * (g[(1, 1)] * g[(2, 2)] - g[(1, 2)] * g[(2, 1)])
        - g[(0, 1)] * (g[(1, 0)] * g[(2, 2)] - g[(1, 2)] * g[(2, 0)])
        + g[(0, 2)] * (g[(1, 0)] * g[(2, 1)] - g[(1, 1)] * g[(2, 0)]);
    let charpoly = |x: i64| x * x * x - trace * x * x + minors * x - det;
    // eigenvalues of a PSD matrix lie in [0, trace]
    let top = (0..=trace).rev().find(|&x| charpoly(x) == 0)?;
    // deflate to x^2 + b x + c and make sure its roots do not exceed `top`
    let b = top - trace;
    let c = minors + top * b;
    let disc = b * b - 4 * c;
    let margin = 2 * top + b;
    (disc < 0 || (margin >= 0 && disc <= margin * margin)).then_some(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_block_norm() {
        assert!((tensor_norm_closed_form(2).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((tensor_norm_closed_form(4).unwrap() - 2.0).abs() < 1e-14);
        assert!((tensor_norm_closed_form(10).unwrap() - 2f64.powf(2.5)).abs() < 1e-13);
        assert!(tensor_norm_closed_form(3).is_err());
    }

    #[test]
    fn exact_tensor_norm() {
        assert_eq!(tensor_norm_exact(2).unwrap(), Sqrt2Power::pow_sqrt2(1));
        assert_eq!(tensor_norm_exact(8).unwrap(), Sqrt2Power::new(4, 0));
        assert_eq!(tensor_norm_exact(12).unwrap(), Sqrt2Power::new(8, 0));
    }

    #[test]
    fn charpoly_root() {
        // diag(5, 3, 0)
        let g = Matrix3::new(5, 0, 0, 0, 3, 0, 0, 0, 0);
        assert_eq!(largest_integer_eigenvalue(&g), Some(5));
        // [[2,1],[1,2]] (+) [0]: eigenvalues 3, 1, 0
        let g = Matrix3::new(2, 1, 0, 1, 2, 0, 0, 0, 0);
        assert_eq!(largest_integer_eigenvalue(&g), Some(3));
        // [[1,1],[1,2]]: eigenvalues (3 +- sqrt 5)/2, not integers
        let g = Matrix3::new(1, 1, 0, 1, 2, 0, 0, 0, 0);
        assert_eq!(largest_integer_eigenvalue(&g), None);
    }
}

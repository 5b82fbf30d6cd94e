//! Polynomials on the polydisc and norms on its distinguished boundary, the torus.

mod json;
mod monte_carlo;
mod polynomial;
mod quadrature;
mod trig;

use num_complex::Complex64;
use serde::Serialize;

pub use json::{
    polynomial_from_json, polynomial_to_json, trig_polynomial_from_json, PolynomialRepr, TermRepr, TrigPolynomialRepr,
    TrigTermRepr,
};
pub use monte_carlo::lp_norm_monte_carlo;
pub use polynomial::Polynomial;
pub use quadrature::{
    lp_norm_quadrature, lp_norm_separable, separable_factors, DEFAULT_NODES_PER_DIM, DEFAULT_QUADRATURE_BUDGET,
};
pub use trig::{riesz_project, TrigPolynomial};

/// Anything expressible as a finite sum `sum_k c_k e^{i <k, theta>}` on `T^d`.
pub trait TorusFunction {
    fn dim(&self) -> usize;

    /// Signed frequency vectors (length `dim`) with their coefficients.
    fn frequency_terms(&self) -> Vec<(Vec<i64>, Complex64)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpMethod {
    TensorQuadrature,
    MonteCarlo,
    SeparableExact,
}

/// A computed `L^p(T^d)` norm.
///
/// `error_bound` is the standard error for Monte Carlo and `0` for the
/// deterministic rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpEstimate {
    pub value: f64,
    pub method: LpMethod,
    pub error_bound: f64,
}

use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped loosely by the module that raises them; the CLI maps
/// them onto exit codes (validation vs. budget vs. numerical failure).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("prime index must be at least 1")]
    ZeroPrimeIndex,

    #[error("prime index {index} exceeds the sieve limit of {limit}")]
    PrimeIndexTooLarge { index: usize, limit: usize },

    #[error("monomial id must be positive")]
    ZeroMonomialId,

    #[error("monomial id {n} has a prime factor beyond the first {d} primes")]
    DimensionViolation { n: u64, d: usize },

    #[error("multi-index has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("dimension d = {0} is not supported: the construction needs an even d >= 2")]
    UnsupportedDimension(usize),

    #[error("dimension d = {d} exceeds the configured maximum {max}")]
    DimensionTooLarge { d: usize, max: usize },

    #[error("index {0} is not in the divisor closure of the construction index set")]
    OutsideDivisorClosure(u64),

    #[error("quadrature needs {required} evaluations, budget is {budget}; use the separable or monte-carlo path")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("factors share variable z_{0}")]
    StructureViolation(usize),

    #[error("Schur test needs nonnegative real entries, found {re}{im:+}i at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, re: f64, im: f64 },

    #[error("Schur weights missing or non-positive for index {0}")]
    InvalidWeight(u64),

    #[error(
        "power iteration did not converge after {iterations} iterations (estimate {estimate}, residual {residual})"
    )]
    NotConverged { iterations: usize, estimate: f64, residual: f64 },

    #[error("symbol has zero operator norm on this grid")]
    ZeroNormSymbol,

    #[error("monomial {0} of the target is not a product of grid indices")]
    Infeasible(u64),

    /// `upper` and `lower` are the certified bounds of the last iterate.
    #[error(
        "ADMM stopped after {iterations} iterations (primal residual {primal}, dual residual {dual}, bounds [{lower}, {upper}])"
    )]
    SolverNotConverged { iterations: usize, primal: f64, dual: f64, upper: f64, lower: f64 },

    #[error("malformed polynomial: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! The lower-bound construction for even `d`, cross-checked end to end.
//!
//! For `d = 2m` the index set `I` consists of the `2^m` products picking one
//! of `p_{2j-1}, p_{2j}` for each pair `j`. The symbol `psi` is the indicator
//! of `I` and the extremal polynomial is `f = prod_j (z_{2j-1} + z_{2j})`,
//! whose expansion has support `I` with unit coefficients. Then
//!
//! - `||H_psi|| = 2^{d/4}` (Schur test with `c_j = 2^{-Omega(j)/2}`, attained),
//! - `H_psi(f) = 2^{d/2}`, `||f||_2 = 2^{d/4}`, `||f||_1 = (4/pi)^{d/2}`,
//! - `C_d >= H_psi(f) / (||f||_1 ||H_psi||) = (pi^2/8)^{d/4}`.
//!
//! [`certify`] computes each quantity by at least two routes and compares it
//! with its closed form.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Sqrt2Power;
use crate::hankel::{
    apply_functional, apply_functional_integer, build_matrix, helson_weights, operator_norm, row_sum_identity_check,
    schur_bound, schur_bound_exact, tensor_norm_closed_form, tensor_norm_exact, HankelSymbol, NormMethod, SchurWeights,
};
use crate::multiplicative_index::{check_even_dimension, divisor_closure, generate_index_set, IndexSetI, MonomialId};
use crate::poly_torus::{
    lp_norm_monte_carlo, lp_norm_quadrature, lp_norm_separable, separable_factors, Polynomial, DEFAULT_NODES_PER_DIM,
    DEFAULT_QUADRATURE_BUDGET,
};
use crate::report::format_f64;
use crate::weak_factorization::{
    default_grid, section_is_complete, wf_cost, wf_norm_dual, wf_norm_primal_with, AdmmSettings, ExplicitFactorization,
};

pub const DEFAULT_MAX_D: usize = 12;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// Dimensions used to fit the growth exponent of the weak-norm ratio.
pub const A_D_FIT_DIMS: [usize; 3] = [2, 4, 6];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Construction {
    pub d: usize,
    pub psi: HankelSymbol,
    pub f: Polynomial,
    #[serde(rename = "J")]
    pub j: Vec<MonomialId>,
    pub weights: SchurWeights,
    #[serde(skip)]
    pub index_set: IndexSetI,
}

/// `prod_{j=1}^{d/2} (z_{2j-1} + z_{2j})`.
pub fn pair_sum_product(d: usize) -> Result<Polynomial> {
    check_even_dimension(d)?;
    let mut f = Polynomial::one(d);
    for j in 1..=d / 2 {
        let pair = Polynomial::variable(d, 2 * j - 1)?.add(&Polynomial::variable(d, 2 * j)?)?;
        f = f.multiply(&pair)?;
    }
    Ok(f)
}

pub fn build_construction(d: usize) -> Result<Construction> {
    build_construction_with_max(d, DEFAULT_MAX_D)
}

pub fn build_construction_with_max(d: usize, max_d: usize) -> Result<Construction> {
    check_even_dimension(d)?;
    if d > max_d {
        return Err(Error::DimensionTooLarge { d, max: max_d });
    }
    let index_set = generate_index_set(d)?;
    let psi = HankelSymbol::new(Polynomial::indicator(d, index_set.members().iter().copied())?);
    let f = pair_sum_product(d)?;
    let one = Complex64::new(1.0, 0.0);
    let expansion_ok = f.len() == index_set.len() && f.terms().all(|(n, a)| a == one && index_set.contains(n));
    if !expansion_ok {
        return Err(Error::InvalidArgument(format!("expansion of the pair product disagrees with I at d = {d}")));
    }
    let j = divisor_closure(&index_set);
    let weights = helson_weights(d, &j)?;
    Ok(Construction { d, psi, f, j, weights, index_set })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForms {
    pub hankel_norm: f64,
    pub functional_value: f64,
    pub l1_norm: f64,
    pub l2_norm: f64,
    pub c_d_lower: f64,
    pub a_d_claim: f64,
}

pub fn closed_forms(d: usize) -> ClosedForms {
    let d = d as f64;
    ClosedForms {
        hankel_norm: 2f64.powf(d / 4.0),
        functional_value: 2f64.powf(d / 2.0),
        l1_norm: (4.0 / PI).powf(d / 2.0),
        l2_norm: 2f64.powf(d / 4.0),
        c_d_lower: (PI * PI / 8.0).powf(d / 4.0),
        a_d_claim: (PI * PI / 8.0).powf(d / 2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TolProfile {
    pub name: &'static str,
    pub linear_algebra: f64,
    pub separable_quadrature: f64,
    pub monte_carlo_sigmas: f64,
    pub weak_factorization: f64,
    pub c_d_relative: f64,
}

impl Default for TolProfile {
    fn default() -> Self {
        TolProfile {
            name: "default",
            linear_algebra: 1e-9,
            separable_quadrature: 1e-5,
            monte_carlo_sigmas: 3.0,
            weak_factorization: 1e-3,
            c_d_relative: 1e-8,
        }
    }
}

impl TolProfile {
    pub fn strict() -> Self {
        TolProfile {
            name: "strict",
            linear_algebra: 1e-11,
            separable_quadrature: 1e-10,
            monte_carlo_sigmas: 3.0,
            weak_factorization: 1e-6,
            c_d_relative: 1e-10,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "strict" => Ok(Self::strict()),
            other => Err(Error::InvalidArgument(format!("unknown tolerance profile {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub profile: TolProfile,
    pub max_d: usize,
    pub seed: u64,
    pub mc_samples: usize,
    pub quadrature_budget: u64,
    /// Largest `d` for the full tensor-quadrature cross-check of `||f||_1`.
    pub quadrature_max_d: usize,
    pub monte_carlo_max_d: usize,
    /// Largest `d` solved by ADMM; above it the weak norm is bracketed by the
    /// trivial factorization and the dual certificate.
    pub admm_max_d: usize,
    pub admm: AdmmSettings,
    pub timings: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            profile: TolProfile::default(),
            max_d: DEFAULT_MAX_D,
            seed: 0,
            mc_samples: DEFAULT_MC_SAMPLES,
            quadrature_budget: DEFAULT_QUADRATURE_BUDGET,
            quadrature_max_d: 6,
            monte_carlo_max_d: 12,
            admm_max_d: 6,
            admm: AdmmSettings::default(),
            timings: false,
        }
    }
}

/// A computed value against its closed form; `error` is absolute unless
/// `relative` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub computed: f64,
    pub closed_form: f64,
    pub error: f64,
    pub tolerance: f64,
    pub relative: bool,
    pub holds: bool,
}

impl Comparison {
    pub fn absolute(computed: f64, closed_form: f64, tolerance: f64) -> Self {
        let error = (computed - closed_form).abs();
        Comparison { computed, closed_form, error, tolerance, relative: false, holds: error <= tolerance }
    }

    pub fn relative(computed: f64, closed_form: f64, tolerance: f64) -> Self {
        let error = (computed - closed_form).abs() / closed_form.abs();
        Comparison { computed, closed_form, error, tolerance, relative: true, holds: error <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HankelNormReport {
    pub computed: f64,
    pub closed_form: f64,
    pub method: NormMethod,
    pub iterations: usize,
    pub matrix_size: usize,
    pub tensor_closed_form: f64,
    pub tensor_exact: Sqrt2Power,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurReport {
    pub computed: f64,
    pub exact: Option<Sqrt2Power>,
    pub closed_form: Sqrt2Power,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub computed: f64,
    pub exact_integer: Option<i64>,
    pub closed_form: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureCheck {
    pub value: f64,
    pub nodes_per_dim: usize,
    pub tolerance: f64,
    pub relative_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloCheck {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub sigmas: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Report {
    pub computed: f64,
    pub closed_form: f64,
    pub factors: usize,
    pub error: f64,
    pub tolerance: f64,
    pub holds: bool,
    pub tensor_quadrature: Option<QuadratureCheck>,
    pub monte_carlo: Option<MonteCarloCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeakNormMethod {
    Admm,
    TrivialAndDual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakNormReport {
    pub upper: f64,
    pub lower: f64,
    pub closed_form: f64,
    pub method: WeakNormMethod,
    pub grid_size: [usize; 2],
    pub iterations: usize,
    /// The dual bound holds off the grid as well.
    pub section_complete: bool,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ADReport {
    pub computed_ratio: f64,
    pub paper_claim: f64,
    pub fitted_exponent: Option<f64>,
    pub discrepancy_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    /// `|H_psi(f)|`.
    pub lhs: f64,
    /// `||H_psi|| ||f||_2 ||1||_2`.
    pub rhs: f64,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub d: usize,
    pub certified: bool,
    pub failure: Option<String>,
    pub hankel_norm: Option<HankelNormReport>,
    pub schur_bound: Option<SchurReport>,
    pub row_sum_identity: Option<bool>,
    pub functional_value: Option<FunctionalReport>,
    pub l1_norm: Option<L1Report>,
    pub l2_norm: Option<Comparison>,
    #[serde(rename = "C_d_lower")]
    pub c_d_lower: Option<Comparison>,
    #[serde(rename = "A_d_lower")]
    pub a_d_lower: Option<ADReport>,
    pub wf_norm: Option<WeakNormReport>,
    pub equality_case: Option<EqualityReport>,
    pub checks: Vec<Check>,
    pub tolerances: TolProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    /// The error that aborted the run, if any.
    #[serde(skip)]
    pub error: Option<Error>,
}

impl Certificate {
    fn empty(d: usize, options: &CertifyOptions) -> Self {
        Certificate {
            d,
            certified: false,
            failure: None,
            hankel_norm: None,
            schur_bound: None,
            row_sum_identity: None,
            functional_value: None,
            l1_norm: None,
            l2_norm: None,
            c_d_lower: None,
            a_d_lower: None,
            wf_norm: None,
            equality_case: None,
            checks: Vec::new(),
            tolerances: options.profile,
            timings: options.timings.then(BTreeMap::new),
            error: None,
        }
    }

    fn check(&mut self, name: &str, holds: bool) {
        self.checks.push(Check { name: name.to_string(), holds });
    }

    pub fn csv_header() -> &'static str {
        "d,certified,hankel_norm,schur_bound,functional_value,l1_norm,l2_norm,C_d_lower,C_d_closed_form,\
         A_d_ratio,A_d_claim,wf_upper,wf_lower"
    }

    pub fn csv_row(&self) -> String {
        let cell = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
        let cells = [
            self.d.to_string(),
            self.certified.to_string(),
            cell(self.hankel_norm.as_ref().map(|r| r.computed)),
            cell(self.schur_bound.as_ref().map(|r| r.computed)),
            cell(self.functional_value.as_ref().map(|r| r.computed)),
            cell(self.l1_norm.as_ref().map(|r| r.computed)),
            cell(self.l2_norm.map(|r| r.computed)),
            cell(self.c_d_lower.map(|r| r.computed)),
            cell(Some(closed_forms(self.d).c_d_lower)),
            cell(self.a_d_lower.as_ref().map(|r| r.computed_ratio)),
            cell(self.a_d_lower.as_ref().map(|r| r.paper_claim)),
            cell(self.wf_norm.as_ref().map(|r| r.upper)),
            cell(self.wf_norm.as_ref().map(|r| r.lower)),
        ];
        cells.join(",")
    }
}

/// Nodes per angle for the tensor-quadrature cross-check.
pub fn cross_check_nodes(d: usize) -> usize {
    match d {
        0..=2 => DEFAULT_NODES_PER_DIM,
        3..=4 => 64,
        _ => 20,
    }
}

/// Relative tolerance of the `p = 1` trapezoid rule with `n` nodes per angle.
pub fn cross_check_tolerance(d: usize, n: usize) -> f64 {
    d as f64 / (n * n) as f64
}

/// Runs every check for dimension `d`.
///
/// Invalid `d` is an error; failures inside the run are recorded in the
/// returned certificate, which is then not certified.
pub fn certify(d: usize, options: &CertifyOptions) -> Result<Certificate> {
    let construction = build_construction_with_max(d, options.max_d)?;
    let mut cert = Certificate::empty(d, options);
    if let Err(e) = run_checks(&construction, options, &mut cert) {
        cert.failure = Some(e.to_string());
        cert.error = Some(e);
    }
    cert.certified = cert.failure.is_none() && !cert.checks.is_empty() && cert.checks.iter().all(|c| c.holds);
    Ok(cert)
}

fn timed<T>(cert: &mut Certificate, stage: &str, run: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = run();
    if let Some(timings) = cert.timings.as_mut() {
        timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
    }
    out
}

fn run_checks(c: &Construction, options: &CertifyOptions, cert: &mut Certificate) -> Result<()> {
    let d = c.d;
    let tol = options.profile;
    let closed = closed_forms(d);

    let matrix = timed(cert, "build_matrix", || build_matrix(&c.psi, &c.j))?;

    let (schur, schur_exact, tensor_exact) = timed(cert, "schur_bound", || {
        Ok((schur_bound(&matrix, &c.weights)?, schur_bound_exact(&matrix, &c.weights)?, tensor_norm_exact(d)?))
    })?;
    let target = Sqrt2Power::pow_sqrt2((d / 2) as i64);
    let schur_holds = schur_exact == Some(target) && tensor_exact == target;
    cert.schur_bound =
        Some(SchurReport { computed: schur, exact: schur_exact, closed_form: target, holds: schur_holds });
    cert.check("schur_bound_exact", schur_holds);

    let rows = timed(cert, "row_sum_identity", || row_sum_identity_check(d))?;
    cert.row_sum_identity = Some(rows.holds);
    cert.check("row_sum_identity", rows.holds);

    let norm = timed(cert, "operator_norm", || operator_norm(&matrix, tol.linear_algebra * 1e-3))?;
    let tensor_closed = tensor_norm_closed_form(d)?;
    let norm_holds = (norm.value - closed.hankel_norm).abs() <= tol.linear_algebra
        && (tensor_closed - closed.hankel_norm).abs() <= tol.linear_algebra;
    cert.hankel_norm = Some(HankelNormReport {
        computed: norm.value,
        closed_form: closed.hankel_norm,
        method: norm.method,
        iterations: norm.iterations,
        matrix_size: matrix.rows().len(),
        tensor_closed_form: tensor_closed,
        tensor_exact,
        tolerance: tol.linear_algebra,
        holds: norm_holds,
    });
    cert.check("hankel_norm", norm_holds);

    let functional = apply_functional(&c.psi, &c.f)?;
    let exact_integer = apply_functional_integer(&c.psi, &c.f).and_then(|v| i64::try_from(v).ok());
    let functional_holds = functional.im == 0.0 && exact_integer.is_some_and(|v| v.unsigned_abs() == 1u64 << (d / 2));
    cert.functional_value = Some(FunctionalReport {
        computed: functional.re,
        exact_integer,
        closed_form: closed.functional_value,
        holds: functional_holds,
    });
    cert.check("functional_value", functional_holds);

    let l1 = timed(cert, "l1_separable", || {
        let factors = separable_factors(&c.f)?;
        Ok((lp_norm_separable(&factors, 1.0, DEFAULT_NODES_PER_DIM)?.value, factors.len()))
    })?;
    let l1_error = (l1.0 - closed.l1_norm).abs();
    let mut l1_report = L1Report {
        computed: l1.0,
        closed_form: closed.l1_norm,
        factors: l1.1,
        error: l1_error,
        tolerance: tol.separable_quadrature,
        holds: l1_error <= tol.separable_quadrature,
        tensor_quadrature: None,
        monte_carlo: None,
    };
    cert.check("l1_separable", l1_report.holds);

    if d <= options.quadrature_max_d {
        let nodes = cross_check_nodes(d);
        let value = timed(cert, "l1_tensor_quadrature", || {
            Ok(lp_norm_quadrature(&c.f, 1.0, nodes, options.quadrature_budget)?.value)
        })?;
        let relative_error = (value - closed.l1_norm).abs() / closed.l1_norm;
        let tolerance = cross_check_tolerance(d, nodes);
        let check = QuadratureCheck {
            value,
            nodes_per_dim: nodes,
            tolerance,
            relative_error,
            holds: relative_error <= tolerance,
        };
        cert.check("l1_tensor_quadrature", check.holds);
        l1_report.tensor_quadrature = Some(check);
    }
    if d <= options.monte_carlo_max_d {
        let estimate =
            timed(cert, "l1_monte_carlo", || lp_norm_monte_carlo(&c.f, 1.0, options.mc_samples, options.seed))?;
        let holds = (estimate.value - closed.l1_norm).abs() <= tol.monte_carlo_sigmas * estimate.error_bound;
        let check = MonteCarloCheck {
            value: estimate.value,
            standard_error: estimate.error_bound,
            samples: options.mc_samples,
            seed: options.seed,
            sigmas: tol.monte_carlo_sigmas,
            holds,
        };
        cert.check("l1_monte_carlo", holds);
        l1_report.monte_carlo = Some(check);
    }
    let l1_value = l1_report.computed;
    cert.l1_norm = Some(l1_report);

    let l2 = Comparison::absolute(c.f.h2_norm(), closed.l2_norm, tol.linear_algebra);
    cert.check("l2_norm", l2.holds);
    cert.l2_norm = Some(l2);

    let lhs = functional.norm();
    let rhs = norm.value * l2.computed * Polynomial::one(d).h2_norm();
    let equality =
        EqualityReport { lhs, rhs, tolerance: tol.linear_algebra, holds: (lhs - rhs).abs() <= tol.linear_algebra };
    cert.check("equality_case", equality.holds);
    cert.equality_case = Some(equality);

    let c_d = Comparison::relative(lhs / (l1_value * norm.value), closed.c_d_lower, tol.c_d_relative);
    cert.check("C_d_lower", c_d.holds);
    cert.c_d_lower = Some(c_d);

    let wf = timed(cert, "weak_norm", || weak_norm_report(c, options))?;
    cert.check("wf_norm", wf.holds);
    let ratio = wf.upper / l1_value;
    cert.wf_norm = Some(wf);

    let fitted = timed(cert, "a_d_fit", || fit_ratio_exponent(&options.admm))?;
    cert.a_d_lower = Some(ADReport {
        computed_ratio: ratio,
        paper_claim: closed.a_d_claim,
        fitted_exponent: Some(fitted),
        discrepancy_note: discrepancy_note(fitted),
    });
    Ok(())
}

fn weak_norm_report(c: &Construction, options: &CertifyOptions) -> Result<WeakNormReport> {
    let tol = options.profile.weak_factorization;
    let closed = closed_forms(c.d).l2_norm;
    let grid = default_grid(&c.f)?;
    let lower = wf_norm_dual(&c.f, &c.psi, &grid)?;
    let section_complete = section_is_complete(&c.psi, &grid)?;
    let (upper, method, iterations) = if c.d <= options.admm_max_d {
        let (result, _) = wf_norm_primal_with(&c.f, &grid, &options.admm)?;
        (result.upper, WeakNormMethod::Admm, result.iterations)
    } else {
        (wf_cost(&ExplicitFactorization::trivial(&c.f)), WeakNormMethod::TrivialAndDual, 0)
    };
    let (rows, cols) = grid.shape();
    let holds =
        section_complete && (upper - closed).abs() <= tol && (lower - closed).abs() <= tol && lower <= upper + tol;
    Ok(WeakNormReport {
        upper,
        lower,
        closed_form: closed,
        method,
        grid_size: [rows, cols],
        iterations,
        section_complete,
        tolerance: tol,
        holds,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Exponent `s` with `||f||_{1,w} / ||f||_1 ~ (pi^2/8)^{s d}`, fitted over
/// [`A_D_FIT_DIMS`] with the weak norm solved by ADMM.
pub fn fit_ratio_exponent(admm: &AdmmSettings) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for d in A_D_FIT_DIMS {
        let f = pair_sum_product(d)?;
        let (wf, _) = wf_norm_primal_with(&f, &default_grid(&f)?, admm)?;
        let l1 = lp_norm_separable(&separable_factors(&f)?, 1.0, DEFAULT_NODES_PER_DIM)?.value;
        xs.push(d as f64);
        ys.push((wf.upper / l1).ln());
    }
    let slope = fit_slope(&xs, &ys).expect("three distinct dimensions");
    Ok(slope / (PI * PI / 8.0).ln())
}

fn discrepancy_note(fitted: f64) -> String {
    format!(
        "computed ratio wf_upper/l1_norm over d in {{2,4,6}} grows like (pi^2/8)^({fitted:.6} d); \
         the claimed bound (pi^2/8)^(d/2) corresponds to exponent 0.5, not asserted"
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub d_min: usize,
    pub d_max: usize,
    pub rows: Vec<Certificate>,
    pub fitted_slope: Option<f64>,
    pub expected_slope: f64,
    pub slope_holds: bool,
    pub c_d_nondecreasing: bool,
    pub certified: bool,
}

/// `ln(pi^2/8) / 4`, the slope of `ln C_d_lower` against `d`.
pub fn expected_slope() -> f64 {
    (PI * PI / 8.0).ln() / 4.0
}

pub const SLOPE_TOLERANCE: f64 = 1e-6;

/// Certifies every even `d` in `[d_min, d_max]`, concurrently, rows ordered by `d`.
pub fn sweep(d_min: usize, d_max: usize, options: &CertifyOptions) -> Result<SweepReport> {
    let dims: Vec<usize> = (d_min.max(2)..=d_max).filter(|d| d % 2 == 0).collect();
    if dims.is_empty() {
        return Err(Error::InvalidArgument(format!("no even d in [{d_min}, {d_max}]")));
    }
    if let Some(&d) = dims.last().filter(|&&d| d > options.max_d) {
        return Err(Error::DimensionTooLarge { d, max: options.max_d });
    }
    let rows = dims.par_iter().map(|&d| certify(d, options)).collect::<Result<Vec<_>>>()?;

    let points: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.c_d_lower.map(|c| (r.d as f64, c.computed.ln()))).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fitted_slope = fit_slope(&xs, &ys);
    let expected = expected_slope();
    let slope_holds = fitted_slope.is_some_and(|s| (s - expected).abs() <= SLOPE_TOLERANCE);
    let c_d_nondecreasing = points.len() == rows.len() && ys.windows(2).all(|w| w[1] >= w[0]);
    let certified = rows.iter().all(|r| r.certified) && c_d_nondecreasing && (rows.len() < 2 || slope_holds);
    Ok(SweepReport {
        d_min,
        d_max,
        rows,
        fitted_slope,
        expected_slope: expected,
        slope_holds,
        c_d_nondecreasing,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> CertifyOptions {
        CertifyOptions { mc_samples: 20_000, quadrature_max_d: 2, ..CertifyOptions::default() }
    }

    #[test]
    fn construction_examples() {
        let c = build_construction(2).unwrap();
        let support: Vec<u64> = c.psi.polynomial().support().map(MonomialId::get).collect();
        assert_eq!(support, vec![2, 3]);
        assert_eq!(c.f, c.psi.polynomial().clone());
        let c = build_construction(4).unwrap();
        let support: Vec<u64> = c.psi.polynomial().support().map(MonomialId::get).collect();
        assert_eq!(support, vec![10, 14, 15, 21]);
        assert_eq!(c.j.len(), 9);
        assert!(matches!(build_construction(3), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(build_construction(14), Err(Error::DimensionTooLarge { d: 14, max: 12 })));
        assert!(build_construction_with_max(14, 14).is_ok());
    }

    #[test]
    fn closed_form_examples() {
        let c = closed_forms(2);
        assert!((c.hankel_norm - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.functional_value, 2.0);
        assert!((c.l1_norm - 4.0 / PI).abs() < 1e-15);
        assert!((c.c_d_lower - 1.110_720_734_539_591_5).abs() < 1e-12);
        assert!((closed_forms(4).c_d_lower - PI * PI / 8.0).abs() < 1e-15);
        assert!((closed_forms(8).l1_norm - (4.0 / PI).powi(4)).abs() < 1e-14);
    }

    #[test]
    fn certify_d2() {
        let cert = certify(2, &fast()).unwrap();
        assert!(cert.certified, "{cert:#?}");
        assert!((cert.c_d_lower.unwrap().computed - 1.110_721).abs() < 1e-6);
        assert!(cert.timings.is_none());
    }

    #[test]
    fn failure_is_recorded() {
        let options = CertifyOptions { quadrature_budget: 10, quadrature_max_d: 4, ..fast() };
        let cert = certify(4, &options).unwrap();
        assert!(!cert.certified);
        assert!(matches!(cert.error, Some(Error::BudgetExceeded { .. })));
        assert!(cert.hankel_norm.is_some() && cert.c_d_lower.is_none());
    }

    #[test]
    fn nodes_fit_default_budget() {
        for d in [2, 4, 6] {
            assert!((cross_check_nodes(d) as u64).pow(d as u32) <= DEFAULT_QUADRATURE_BUDGET);
        }
        assert!(cross_check_tolerance(6, cross_check_nodes(6)) < 0.02);
    }

    #[test]
    fn slope_fit() {
        let xs = [2.0, 4.0, 6.0];
        let ys = [1.0, 2.0, 3.0];
        assert!((fit_slope(&xs, &ys).unwrap() - 0.5).abs() < 1e-15);
        assert!(fit_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn empty_sweep_is_an_error() {
        assert!(sweep(8, 6, &fast()).is_err());
        assert!(sweep(3, 3, &fast()).is_err());
    }
}

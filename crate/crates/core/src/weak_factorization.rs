//! Weak factorizations `f = sum_j g_j h_j` and the projective tensor norm
//! `||f||_{1,w} = inf sum_j ||g_j||_2 ||h_j||_2`, computed on finite grids.
//!
//! On a grid `J_g x J_h` a weak factorization is a coefficient matrix `T`
//! with `sum_{j k = n} T_jk = a_n` for every reachable `n`, and the cheapest
//! one has cost equal to the nuclear norm of `T`. The minimum is found by
//! ADMM with singular-value soft-thresholding. Dual certificates come from
//! Hankel forms: `|H_psi(f)| <= ||H_psi|| ||f||_{1,w}`.
//!
//! Grid values are upper-bound surrogates of the grid-free infimum, while dual
//! bounds built on a grid that contains the whole nonzero section of the
//! symbol hold globally.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel::{apply_functional, build_matrix_rect, largest_singular_value, operator_norm, HankelSymbol};
use crate::multiplicative_index::{divisors, MonomialId};
use crate::poly_torus::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationGrid {
    rows: Vec<MonomialId>,
    cols: Vec<MonomialId>,
}

impl FactorizationGrid {
    pub fn new(rows: Vec<MonomialId>, cols: Vec<MonomialId>) -> Result<Self> {
        let tidy = |mut v: Vec<MonomialId>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        let (rows, cols) = (tidy(rows), tidy(cols));
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::InvalidArgument("factorization grid must be nonempty".into()));
        }
        rows.last().unwrap().checked_mul(*cols.last().unwrap())?;
        Ok(FactorizationGrid { rows, cols })
    }

    pub fn square(index_set: Vec<MonomialId>) -> Result<Self> {
        Self::new(index_set.clone(), index_set)
    }

    pub fn rows(&self) -> &[MonomialId] {
        &self.rows
    }

    pub fn cols(&self) -> &[MonomialId] {
        &self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

/// Both sides equal to the union of the divisors of the support of `f`.
pub fn default_grid(f: &Polynomial) -> Result<FactorizationGrid> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("default grid of the zero polynomial".into()));
    }
    let mut all = Vec::new();
    for n in f.support() {
        all.extend(divisors(n, f.dim())?);
    }
    FactorizationGrid::square(all)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorPair {
    pub g: Polynomial,
    pub h: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct ExplicitFactorization {
    pub pairs: Vec<FactorPair>,
}

impl ExplicitFactorization {
    /// `f = f * 1`.
    pub fn trivial(f: &Polynomial) -> Self {
        ExplicitFactorization { pairs: vec![FactorPair { g: f.clone(), h: Polynomial::one(f.dim()) }] }
    }

    /// `sum_j g_j h_j`.
    pub fn product(&self, d: usize) -> Result<Polynomial> {
        self.pairs.iter().try_fold(Polynomial::zero(d), |acc, p| acc.add(&p.g.multiply(&p.h)?))
    }
}

/// `sum_j ||g_j||_2 ||h_j||_2`.
pub fn wf_cost(factorization: &ExplicitFactorization) -> f64 {
    factorization.pairs.iter().map(|p| p.g.h2_norm() * p.h.h2_norm()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmmSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub penalty: f64,
    /// Rebalance the penalty when one residual exceeds the other by this ratio.
    pub balance_ratio: f64,
    pub balance_factor: f64,
    /// Rebalancing is attempted every `balance_every` iterations up to `balance_until`.
    pub balance_every: usize,
    pub balance_until: usize,
    /// Duality gap `upper - lower` is checked every `gap_every` iterations.
    pub gap_every: usize,
    /// Over-relaxation parameter in `(0, 2)`.
    pub relaxation: f64,
    /// Singular values below this are dropped from the explicit factorization.
    pub drop_below: f64,
}

impl AdmmSettings {
    pub fn with_tol(tol: f64) -> Self {
        AdmmSettings { tol, ..Self::default() }
    }
}

impl Default for AdmmSettings {
    fn default() -> Self {
        AdmmSettings {
            tol: 1e-8,
            max_iter: 50_000,
            penalty: 1.0,
            balance_ratio: 10.0,
            balance_factor: 2.0,
            balance_every: 10,
            balance_until: 5_000,
            gap_every: 25,
            relaxation: 1.6,
            drop_below: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakNormResult {
    /// Cost of a feasible factorization on the grid.
    pub upper: f64,
    /// Dual certificate value.
    pub lower: f64,
    pub grid_size: [usize; 2],
    pub iterations: usize,
    pub residuals: Residuals,
}

/// Constraint structure: every grid cell belongs to exactly one product `n`.
struct Groups {
    members: Vec<Vec<(usize, usize)>>,
    target: Vec<Complex64>,
}

impl Groups {
    fn new(f: &Polynomial, grid: &FactorizationGrid) -> Result<Groups> {
        let mut index: BTreeMap<MonomialId, usize> = BTreeMap::new();
        let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
        for (i, &j) in grid.rows().iter().enumerate() {
            for (k, &l) in grid.cols().iter().enumerate() {
                let n = j.checked_mul(l)?;
                let g = *index.entry(n).or_insert_with(|| {
                    members.push(Vec::new());
                    members.len() - 1
                });
                members[g].push((i, k));
            }
        }
        if let Some(n) = f.support().find(|n| !index.contains_key(n)) {
            return Err(Error::Infeasible(n.get()));
        }
        let mut target = vec![Complex64::new(0.0, 0.0); members.len()];
        for (n, &g) in &index {
            target[g] = f.coeff(*n);
        }
        Ok(Groups { members, target })
    }

    /// Euclidean projection onto `{T : sum over each group = target}`.
    fn project(&self, v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = v.clone();
        for (cells, &a) in self.members.iter().zip(&self.target) {
            let sum: Complex64 = cells.iter().map(|&c| v[c]).sum();
            let shift = (a - sum) / cells.len() as f64;
            for &c in cells {
                out[c] += shift;
            }
        }
        out
    }

    /// Orthogonal projection onto matrices constant on each group, returned as
    /// the per-group values.
    fn group_means(&self, v: &DMatrix<Complex64>) -> Vec<Complex64> {
        self.members.iter().map(|cells| cells.iter().map(|&c| v[c]).sum::<Complex64>() / cells.len() as f64).collect()
    }

    fn expand(&self, values: &[Complex64], shape: (usize, usize)) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(shape.0, shape.1);
        for (cells, &y) in self.members.iter().zip(values) {
            for &c in cells {
                m[c] = y;
            }
        }
        m
    }
}

/// Proximal operator of `t ||.||_*`.
fn singular_value_threshold(m: DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let mut svd = m.svd(true, true);
    svd.singular_values.apply(|s| *s = (*s - t).max(0.0));
    svd.recompose().expect("SVD computed with both factors")
}

/// Lower bound `|<a, y>| / ||H_y||` for a Hankel-structured dual matrix.
fn dual_value(groups: &Groups, y: &[Complex64], shape: (usize, usize)) -> f64 {
    let pairing: Complex64 = groups.target.iter().zip(y).map(|(a, y)| a * y.conj()).sum();
    let norm = largest_singular_value(&groups.expand(y, shape));
    if norm > 0.0 {
        pairing.norm() / norm
    } else {
        0.0
    }
}

/// Minimum nuclear norm of a grid factorization of `f`, with the explicit
/// factorization read off the SVD of the final feasible iterate.
pub fn wf_norm_primal(
    f: &Polynomial,
    grid: &FactorizationGrid,
    tol: f64,
) -> Result<(WeakNormResult, ExplicitFactorization)> {
    wf_norm_primal_with(f, grid, &AdmmSettings::with_tol(tol))
}

pub fn wf_norm_primal_with(
    f: &Polynomial,
    grid: &FactorizationGrid,
    settings: &AdmmSettings,
) -> Result<(WeakNormResult, ExplicitFactorization)> {
    if !(settings.tol.is_finite() && settings.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", settings.tol)));
    }
    let shape = grid.shape();
    if f.is_zero() {
        let result = WeakNormResult {
            upper: 0.0,
            lower: 0.0,
            grid_size: [shape.0, shape.1],
            iterations: 0,
            residuals: Residuals { primal: 0.0, dual: 0.0 },
        };
        return Ok((result, ExplicitFactorization::default()));
    }
    let groups = Groups::new(f, grid)?;

    let mut rho = settings.penalty;
    let mut z = groups.project(&DMatrix::zeros(shape.0, shape.1));
    let mut u: DMatrix<Complex64> = DMatrix::zeros(shape.0, shape.1);
    let mut residuals = Residuals { primal: f64::INFINITY, dual: f64::INFINITY };
    let mut iterations = 0;
    let mut converged = false;

    while iterations < settings.max_iter {
        iterations += 1;
        let x = singular_value_threshold(&z - &u, 1.0 / rho);
        let x_hat = &x * Complex64::new(settings.relaxation, 0.0) + &z * Complex64::new(1.0 - settings.relaxation, 0.0);
        let z_next = groups.project(&(&x_hat + &u));
        u += &x_hat - &z_next;
        residuals = Residuals { primal: (&x - &z_next).norm(), dual: rho * (&z_next - &z).norm() };
        z = z_next;
        if residuals.primal.max(residuals.dual) < settings.tol {
            converged = true;
            break;
        }
        if iterations % settings.gap_every == 0 {
            let upper = z.singular_values().sum();
            let lower = dual_value(&groups, &groups.group_means(&u), shape);
            if upper - lower <= settings.tol * (1.0 + upper) {
                converged = true;
                break;
            }
        }
        // residual balancing; the scaled dual u = y / rho is rescaled with rho
        if iterations % settings.balance_every != 0 || iterations > settings.balance_until {
            continue;
        }
        if residuals.primal > settings.balance_ratio * residuals.dual {
            rho *= settings.balance_factor;
            u /= Complex64::new(settings.balance_factor, 0.0);
        } else if residuals.dual > settings.balance_ratio * residuals.primal {
            rho /= settings.balance_factor;
            u *= Complex64::new(settings.balance_factor, 0.0);
        }
    }
    if !converged {
        return Err(Error::SolverNotConverged {
            iterations,
            primal: residuals.primal,
            dual: residuals.dual,
            upper: z.singular_values().sum(),
            lower: dual_value(&groups, &groups.group_means(&u), shape),
        });
    }

    let factorization = factorization_from_matrix(f.dim(), grid, &z, settings.drop_below)?;
    let lower = dual_value(&groups, &groups.group_means(&u), shape);
    let result =
        WeakNormResult { upper: wf_cost(&factorization), lower, grid_size: [shape.0, shape.1], iterations, residuals };
    Ok((result, factorization))
}

/// Pairs `(sqrt(s_i) u_i, sqrt(s_i) conj(v_i))` from the SVD `T = U S V^H`.
fn factorization_from_matrix(
    d: usize,
    grid: &FactorizationGrid,
    t: &DMatrix<Complex64>,
    drop_below: f64,
) -> Result<ExplicitFactorization> {
    let svd = t.clone().svd(true, true);
    let (u, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let mut pairs = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < drop_below {
            continue;
        }
        let scale = Complex64::new(s.sqrt(), 0.0);
        // v_t holds V^H, so its rows are conj(v_i)
        let g = Polynomial::from_terms(d, grid.rows().iter().enumerate().map(|(r, &j)| (j, u[(r, i)] * scale)))?;
        let h = Polynomial::from_terms(d, grid.cols().iter().enumerate().map(|(c, &k)| (k, v_t[(i, c)] * scale)))?;
        pairs.push(FactorPair { g, h });
    }
    Ok(ExplicitFactorization { pairs })
}

/// `|H_psi(f)| / ||H_psi||` with the norm of the section of `psi` on the grid.
pub fn wf_norm_dual(f: &Polynomial, psi: &HankelSymbol, grid: &FactorizationGrid) -> Result<f64> {
    let m = build_matrix_rect(psi, grid.rows(), grid.cols())?;
    let norm = operator_norm(&m, 1e-13)?.value;
    if norm == 0.0 {
        return Err(Error::ZeroNormSymbol);
    }
    Ok(apply_functional(psi, f)?.norm() / norm)
}

/// Whether the grid section of `psi` is its whole nonzero part, in which case
/// [`wf_norm_dual`] bounds the grid-free norm as well.
pub fn section_is_complete(psi: &HankelSymbol, grid: &FactorizationGrid) -> Result<bool> {
    for n in psi.polynomial().support() {
        for j in divisors(n, psi.dim())? {
            let k = n.checked_div(j).expect("divisor");
            if grid.rows().binary_search(&j).is_err() || grid.cols().binary_search(&k).is_err() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: u64) -> MonomialId {
        MonomialId::new(n).unwrap()
    }

    fn ids(v: &[u64]) -> Vec<MonomialId> {
        v.iter().map(|&n| id(n)).collect()
    }

    fn z(d: usize, i: usize) -> Polynomial {
        Polynomial::variable(d, i).unwrap()
    }

    #[test]
    fn cost_examples() {
        assert_eq!(wf_cost(&ExplicitFactorization::trivial(&z(1, 1))), 1.0);
        let f = z(2, 1).add(&z(2, 2)).unwrap();
        assert!((wf_cost(&ExplicitFactorization::trivial(&f)) - 2f64.sqrt()).abs() < 1e-15);
        let swapped = ExplicitFactorization {
            pairs: vec![FactorPair { g: z(2, 1), h: z(2, 2) }, FactorPair { g: z(2, 2), h: z(2, 1) }],
        };
        assert_eq!(wf_cost(&swapped), 2.0);
    }

    #[test]
    fn default_grid_examples() {
        let f = z(2, 1).add(&z(2, 2)).unwrap();
        assert_eq!(default_grid(&f).unwrap().rows(), ids(&[1, 2, 3]).as_slice());
        let g = z(2, 1).multiply(&z(2, 2)).unwrap();
        let grid = default_grid(&g).unwrap();
        assert_eq!(grid.rows(), ids(&[1, 2, 3, 6]).as_slice());
        assert_eq!(grid.cols(), grid.rows());
        assert!(default_grid(&Polynomial::zero(2)).is_err());
    }

    #[test]
    fn single_monomial() {
        let grid = FactorizationGrid::square(ids(&[1, 2])).unwrap();
        let (res, fac) = wf_norm_primal(&z(1, 1), &grid, 1e-9).unwrap();
        assert!((res.upper - 1.0).abs() < 1e-6, "{res:?}");
        assert!(res.lower <= res.upper + 1e-8);
        let back = fac.product(1).unwrap();
        assert!((back.coeff(id(2)) - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn infeasible_support() {
        let grid = FactorizationGrid::square(ids(&[1, 2])).unwrap();
        assert_eq!(wf_norm_primal(&z(2, 2), &grid, 1e-6).unwrap_err(), Error::Infeasible(3));
    }

    #[test]
    fn zero_target() {
        let grid = FactorizationGrid::square(ids(&[1])).unwrap();
        let (res, fac) = wf_norm_primal(&Polynomial::zero(2), &grid, 1e-6).unwrap();
        assert_eq!(res.upper, 0.0);
        assert!(fac.pairs.is_empty());
    }

    #[test]
    fn dual_orthogonal_symbol() {
        let grid = FactorizationGrid::square(ids(&[1, 2])).unwrap();
        let psi = HankelSymbol::new(Polynomial::monomial(1, id(4), Complex64::new(1.0, 0.0)).unwrap());
        assert_eq!(wf_norm_dual(&z(1, 1), &psi, &grid).unwrap(), 0.0);
        let empty = HankelSymbol::new(Polynomial::monomial(2, id(3), Complex64::new(1.0, 0.0)).unwrap());
        assert_eq!(wf_norm_dual(&z(2, 1), &empty, &grid), Err(Error::ZeroNormSymbol));
    }

    #[test]
    fn complex_coefficients() {
        // (1 + i) z1 z2: a single monomial, norm sqrt 2
        let f = Polynomial::monomial(2, id(6), Complex64::new(1.0, 1.0)).unwrap();
        let grid = default_grid(&f).unwrap();
        let (res, fac) = wf_norm_primal(&f, &grid, 1e-9).unwrap();
        assert!((res.upper - 2f64.sqrt()).abs() < 1e-6, "{res:?}");
        let back = fac.product(2).unwrap();
        assert!((back.coeff(id(6)) - Complex64::new(1.0, 1.0)).norm() < 1e-8);
    }
}

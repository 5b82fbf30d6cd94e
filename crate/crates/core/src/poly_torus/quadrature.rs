//! Deterministic `L^p` norms on the torus with respect to normalized Lebesgue measure.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{LpEstimate, LpMethod, Polynomial, TorusFunction};
use crate::error::{Error, Result};
use crate::multiplicative_index::{factorize, MonomialId};

/// Hard cap on the number of integrand evaluations of the tensor rule.
pub const DEFAULT_QUADRATURE_BUDGET: u64 = 100_000_000;

/// Default nodes per angle for the tensor rule on low-dimensional exact paths.
pub const DEFAULT_NODES_PER_DIM: usize = 512;

/// Outer-loop rows per parallel work item; fixed so the reduction order does not
/// depend on the thread count.
const ROWS_PER_CHUNK: usize = 64;

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p exponent must be a finite p >= 1, got {p}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn abs_pow(z: Complex64, p: f64) -> f64 {
    if p == 1.0 {
        z.norm()
    } else if p == 2.0 {
        z.norm_sqr()
    } else {
        z.norm().powf(p)
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Tensor-product trapezoidal rule on `nodes_per_dim^d` equispaced angles.
///
/// For even integer `p` the rule is exact once `nodes_per_dim` exceeds the
/// bandwidth of `|f|^p`; for `p = 1` it converges like `O(N^-2)` near zeros of `f`.
pub fn lp_norm_quadrature<F: TorusFunction + ?Sized>(
    f: &F,
    p: f64,
    nodes_per_dim: usize,
    budget: u64,
) -> Result<LpEstimate> {
    check_exponent(p)?;
    if nodes_per_dim < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 nodes per dimension, got {nodes_per_dim}")));
    }
    let d = f.dim();
    let required = (nodes_per_dim as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let terms = f.frequency_terms();
    let mean = if terms.is_empty() {
        0.0
    } else if d == 0 {
        abs_pow(terms.iter().map(|(_, c)| c).sum(), p)
    } else {
        trapezoid_mean(&terms, d, nodes_per_dim, p)
    };
    Ok(LpEstimate { value: mean.powf(1.0 / p), method: LpMethod::TensorQuadrature, error_bound: 0.0 })
}

fn trapezoid_mean(terms: &[(Vec<i64>, Complex64)], d: usize, n: usize, p: f64) -> f64 {
    let roots: Vec<Complex64> = (0..n).map(|k| Complex64::cis(2.0 * PI * k as f64 / n as f64)).collect();
    let coeffs: Vec<Complex64> = terms.iter().map(|(_, c)| *c).collect();
    // frequencies reduced mod n; phase of term t at node m is sum_i k_{t,i} m_i mod n
    let freq: Vec<Vec<usize>> =
        terms.iter().map(|(k, _)| k.iter().map(|&e| e.rem_euclid(n as i64) as usize).collect()).collect();
    let rows = n.pow(d as u32 - 1);
    let last = d - 1;

    let chunk_sums: Vec<f64> = (0..rows.div_ceil(ROWS_PER_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut phase = vec![0usize; coeffs.len()];
            let mut digits = vec![0usize; last];
            let start = chunk * ROWS_PER_CHUNK;
            let end = (start + ROWS_PER_CHUNK).min(rows);
            let mut partial = Vec::with_capacity(end - start);
            for row in start..end {
                let mut r = row;
                for digit in digits.iter_mut() {
                    *digit = r % n;
                    r /= n;
                }
                for (ph, fr) in phase.iter_mut().zip(&freq) {
                    *ph = fr[..last].iter().zip(&digits).map(|(&k, &m)| k * m % n).sum::<usize>() % n;
                }
                let mut acc = 0.0;
                for _ in 0..n {
                    let mut v = Complex64::new(0.0, 0.0);
                    for ((c, ph), fr) in coeffs.iter().zip(phase.iter_mut()).zip(&freq) {
                        v += c * roots[*ph];
                        *ph += fr[last];
                        if *ph >= n {
                            *ph -= n;
                        }
                    }
                    acc += abs_pow(v, p);
                }
                partial.push(acc);
            }
            compensated_sum(partial)
        })
        .collect();
    compensated_sum(chunk_sums) / (rows * n) as f64
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gauss_kronrod<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = g(center - dx) + g(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod integral of `g` over `[a, b]` starting from `panels`
/// equal panels; panels are bisected until their error estimate is below their
/// share of `tol`.
pub(crate) fn adaptive_integral<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    const MAX_DEPTH: u32 = 40;
    let width = b - a;
    let mut stack: Vec<(f64, f64, u32)> = (0..panels.max(1))
        .rev()
        .map(|i| {
            let lo = a + width * i as f64 / panels.max(1) as f64;
            let hi = a + width * (i + 1) as f64 / panels.max(1) as f64;
            (lo, hi, 0)
        })
        .collect();
    let mut pieces = Vec::new();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod(g, lo, hi);
        let floor = 50.0 * f64::EPSILON * value.abs();
        if err <= (tol * (hi - lo) / width).max(floor) || depth >= MAX_DEPTH {
            pieces.push(value);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    compensated_sum(pieces)
}

/// `L^p` norm of a single-frequency-direction function `sum_k c_k e^{i k t}`.
fn univariate_lp(terms: &[(i64, Complex64)], p: f64, panels: usize) -> f64 {
    let g = |t: f64| {
        let v: Complex64 = terms.iter().map(|&(k, c)| c * Complex64::cis(k as f64 * t)).sum();
        abs_pow(v, p)
    };
    let integral = adaptive_integral(&g, 0.0, 2.0 * PI, panels, 1e-15);
    (integral / (2.0 * PI)).powf(1.0 / p)
}

/// `L^p` norm of one factor, reduced to as few angles as its structure allows.
///
/// A factor that is homogeneous in its active variables satisfies
/// `|g(z_1, ..., z_m)| = |g(1, z_2/z_1, ..., z_m/z_1)|`, which removes one angle.
fn factor_lp(factor: &Polynomial, p: f64, nodes: usize) -> Result<f64> {
    if factor.is_zero() {
        return Ok(0.0);
    }
    let active = factor.active_variables();
    let mut terms: Vec<(Vec<i64>, Complex64)> =
        factor.frequency_terms().into_iter().map(|(k, c)| (active.iter().map(|&i| k[i]).collect(), c)).collect();
    let homogeneous = terms.windows(2).all(|w| w[0].0.iter().sum::<i64>() == w[1].0.iter().sum::<i64>());
    if active.len() >= 2 && homogeneous {
        terms = terms.into_iter().map(|(k, c)| (k[1..].to_vec(), c)).collect();
    }
    let dim = terms[0].0.len();
    match dim {
        0 => Ok(terms.iter().map(|(_, c)| c).sum::<Complex64>().norm()),
        1 => {
            let univariate: Vec<(i64, Complex64)> = terms.iter().map(|(k, c)| (k[0], *c)).collect();
            Ok(univariate_lp(&univariate, p, nodes))
        }
        _ => {
            let reduced = ReducedFunction { d: dim, terms };
            Ok(lp_norm_quadrature(&reduced, p, nodes, DEFAULT_QUADRATURE_BUDGET)?.value)
        }
    }
}

struct ReducedFunction {
    d: usize,
    terms: Vec<(Vec<i64>, Complex64)>,
}

impl TorusFunction for ReducedFunction {
    fn dim(&self) -> usize {
        self.d
    }

    fn frequency_terms(&self) -> Vec<(Vec<i64>, Complex64)> {
        self.terms.clone()
    }
}

/// `L^p` norm of a product of factors in pairwise disjoint variables: the
/// product of the factors' norms (Fubini).
///
/// Each factor is integrated in its own variables; univariate and homogeneous
/// bivariate factors reduce to an adaptive one-dimensional rule started from
/// `nodes` panels, larger ones fall back to the tensor rule with `nodes` per angle.
pub fn lp_norm_separable(factors: &[Polynomial], p: f64, nodes: usize) -> Result<LpEstimate> {
    check_exponent(p)?;
    if nodes < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 nodes, got {nodes}")));
    }
    let Some(first) = factors.first() else {
        return Err(Error::InvalidArgument("no factors given".into()));
    };
    let d = first.dim();
    let mut owner = vec![false; d];
    for factor in factors {
        if factor.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: factor.dim() });
        }
        for i in factor.active_variables() {
            if owner[i] {
                return Err(Error::StructureViolation(i + 1));
            }
            owner[i] = true;
        }
    }
    let mut value = 1.0;
    for factor in factors {
        value *= factor_lp(factor, p, nodes)?;
    }
    Ok(LpEstimate { value, method: LpMethod::SeparableExact, error_bound: 0.0 })
}

/// Splits `f` into the finest product of factors in disjoint variable groups.
///
/// A variable set `S` separates `f` exactly when the coefficient matrix indexed
/// by (exponents on `S`, exponents off `S`) has rank one. Groups are found by
/// searching, for the smallest remaining variable, the smallest separating set
/// containing it; this enumerates subsets and is meant for small `d`.
pub fn separable_factors(f: &Polynomial) -> Result<Vec<Polynomial>> {
    const MAX_SPLIT_VARIABLES: usize = 20;
    let d = f.dim();
    if f.is_zero() {
        return Ok(vec![f.clone()]);
    }
    let mut remaining = f.active_variables();
    if remaining.len() > MAX_SPLIT_VARIABLES {
        return Ok(vec![f.clone()]);
    }
    let terms: Vec<(Vec<u32>, Complex64)> =
        f.terms().map(|(n, c)| Ok((factorize(n, d)?.exponents().to_vec(), c))).collect::<Result<_>>()?;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    while !remaining.is_empty() {
        let pivot = remaining[0];
        let others: Vec<usize> = remaining[1..].to_vec();
        let mut best: Option<Vec<usize>> = None;
        // subsets of `others` ordered by size, so the first hit is minimal
        'sizes: for size in 0..others.len() {
            for mask in 0u64..(1u64 << others.len()) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let mut set = vec![pivot];
                set.extend(others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v));
                if rank_one_split(&terms, &set).is_some() {
                    best = Some(set);
                    break 'sizes;
                }
            }
        }
        let group = best.unwrap_or_else(|| remaining.clone());
        remaining.retain(|v| !group.contains(v));
        groups.push(group);
    }

    // peel factors off one group at a time
    let mut factors = Vec::with_capacity(groups.len());
    let mut rest = terms;
    for (i, group) in groups.iter().enumerate() {
        if i + 1 == groups.len() {
            factors.push(polynomial_from_exponents(d, &rest)?);
            break;
        }
        let (g, h) = rank_one_split(&rest, group).expect("group was found separable");
        factors.push(polynomial_from_exponents(d, &g)?);
        rest = h;
    }
    Ok(factors)
}

fn polynomial_from_exponents(d: usize, terms: &[(Vec<u32>, Complex64)]) -> Result<Polynomial> {
    let ids = terms
        .iter()
        .map(|(k, c)| Ok((crate::multiplicative_index::compose(&k.clone().into())?, *c)))
        .collect::<Result<Vec<(MonomialId, Complex64)>>>()?;
    Polynomial::from_terms(d, ids)
}

type ExponentTerms = Vec<(Vec<u32>, Complex64)>;

/// If the terms factor as `g(vars in set) * h(other vars)`, returns `(g, h)`.
fn rank_one_split(terms: &[(Vec<u32>, Complex64)], set: &[usize]) -> Option<(ExponentTerms, ExponentTerms)> {
    let d = terms.first()?.0.len();
    let split = |k: &[u32]| -> (Vec<u32>, Vec<u32>) {
        let mut inside = vec![0; d];
        let mut outside = k.to_vec();
        for &v in set {
            inside[v] = k[v];
            outside[v] = 0;
        }
        (inside, outside)
    };
    let mut matrix: BTreeMap<(Vec<u32>, Vec<u32>), Complex64> = BTreeMap::new();
    let mut rows: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    let mut cols: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    for (k, c) in terms {
        let (a, b) = split(k);
        rows.insert(a.clone(), ());
        cols.insert(b.clone(), ());
        matrix.insert((a, b), *c);
    }
    let ((a0, b0), &pivot) = matrix.iter().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    let entry = |a: &Vec<u32>, b: &Vec<u32>| matrix.get(&(a.clone(), b.clone())).copied().unwrap_or_default();
    let scale = pivot.norm_sqr();
    for a in rows.keys() {
        for b in cols.keys() {
            let lhs = entry(a, b) * pivot;
            let rhs = entry(a, b0) * entry(a0, b);
            if (lhs - rhs).norm() > 1e-12 * scale {
                return None;
            }
        }
    }
    let g = rows.keys().map(|a| (a.clone(), entry(a, b0))).filter(|(_, c)| c.norm() > 0.0).collect();
    let h = cols.keys().map(|b| (b.clone(), entry(a0, b) / pivot)).filter(|(_, c)| c.norm() > 0.0).collect();
    Some((g, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_torus::TrigPolynomial;

    fn z(d: usize, i: usize) -> Polynomial {
        Polynomial::variable(d, i).unwrap()
    }

    fn pair_sum(d: usize, j: usize) -> Polynomial {
        z(d, 2 * j - 1).add(&z(d, 2 * j)).unwrap()
    }

    fn pair_product(d: usize) -> Polynomial {
        (1..=d / 2).fold(Polynomial::one(d), |acc, j| acc.multiply(&pair_sum(d, j)).unwrap())
    }

    #[test]
    fn tensor_l1_of_pair_sum() {
        let est = lp_norm_quadrature(&pair_sum(2, 1), 1.0, 512, DEFAULT_QUADRATURE_BUDGET).unwrap();
        assert!((est.value - 4.0 / PI).abs() < 1e-5, "{}", est.value);
        assert_eq!(est.method, LpMethod::TensorQuadrature);
    }

    #[test]
    fn tensor_constant() {
        let c = Polynomial::constant(3, Complex64::new(3.0, -4.0));
        for p in [1.0, 2.0, 3.5] {
            let est = lp_norm_quadrature(&c, p, 4, DEFAULT_QUADRATURE_BUDGET).unwrap();
            assert!((est.value - 5.0).abs() < 1e-13);
        }
    }

    #[test]
    fn tensor_l2_exact() {
        let est = lp_norm_quadrature(&pair_sum(2, 1), 2.0, 3, DEFAULT_QUADRATURE_BUDGET).unwrap();
        assert!((est.value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tensor_on_trig_polynomial() {
        // |e^{-i t1} + e^{i t2}| has the same distribution as |1 + e^{it}|
        let phi = TrigPolynomial::from_terms(
            2,
            [(vec![-1, 0], Complex64::new(1.0, 0.0)), (vec![0, 1], Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        let est = lp_norm_quadrature(&phi, 2.0, 4, DEFAULT_QUADRATURE_BUDGET).unwrap();
        assert!((est.value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tensor_budget_and_arguments() {
        let f = pair_product(8);
        assert!(matches!(
            lp_norm_quadrature(&f, 1.0, 512, DEFAULT_QUADRATURE_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(lp_norm_quadrature(&f, 0.5, 4, DEFAULT_QUADRATURE_BUDGET).is_err());
        assert!(lp_norm_quadrature(&f, 1.0, 1, DEFAULT_QUADRATURE_BUDGET).is_err());
    }

    #[test]
    fn separable_pair_sum() {
        let est = lp_norm_separable(&[pair_sum(2, 1)], 1.0, 16).unwrap();
        assert!((est.value - 4.0 / PI).abs() < 1e-13, "{}", est.value);
    }

    #[test]
    fn separable_four_pairs() {
        let factors: Vec<_> = (1..=4).map(|j| pair_sum(8, j)).collect();
        let est = lp_norm_separable(&factors, 1.0, 16).unwrap();
        assert!((est.value - (4.0 / PI).powi(4)).abs() < 1e-12);
        assert!((est.value - 2.628_091_457_199_19).abs() < 1e-12);
    }

    #[test]
    fn separable_single_variable() {
        for p in [1.0, 2.0, 4.0] {
            let est = lp_norm_separable(&[z(3, 2)], p, 8).unwrap();
            assert!((est.value - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn separable_rejects_shared_variable() {
        assert_eq!(lp_norm_separable(&[pair_sum(4, 1), z(4, 2)], 1.0, 8), Err(Error::StructureViolation(2)));
    }

    #[test]
    fn separable_l2_matches_h2() {
        // 1 + 2 z1 + z1^3 is univariate, not homogeneous
        let f = Polynomial::one(1)
            .add(&z(1, 1).scale(Complex64::new(2.0, 0.0)))
            .unwrap()
            .add(&z(1, 1).multiply(&z(1, 1)).unwrap().multiply(&z(1, 1)).unwrap())
            .unwrap();
        let est = lp_norm_separable(std::slice::from_ref(&f), 2.0, 8).unwrap();
        assert!((est.value - f.h2_norm()).abs() < 1e-13);
    }

    #[test]
    fn split_recovers_pairs() {
        let f = pair_product(6);
        let factors = separable_factors(&f).unwrap();
        assert_eq!(factors.len(), 3);
        let product = factors.iter().fold(Polynomial::one(6), |acc, g| acc.multiply(g).unwrap());
        for (n, c) in f.terms() {
            assert!((product.coeff(n) - c).norm() < 1e-14);
        }
        assert_eq!(product.len(), f.len());
    }

    #[test]
    fn split_keeps_inseparable_together() {
        // z1 z2 + z3 does not factor
        let f = z(3, 1).multiply(&z(3, 2)).unwrap().add(&z(3, 3)).unwrap();
        assert_eq!(separable_factors(&f).unwrap().len(), 1);
        // z1 (z2 + 2 z3): {z1} and {z2, z3}
        let g = z(3, 1).multiply(&z(3, 2).add(&z(3, 3).scale(Complex64::new(2.0, 0.0))).unwrap()).unwrap();
        assert_eq!(separable_factors(&g).unwrap().len(), 2);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}

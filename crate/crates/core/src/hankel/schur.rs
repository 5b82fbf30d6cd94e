use std::collections::BTreeMap;

use serde::Serialize;

use super::HankelMatrix;
use crate::error::{Error, Result};
use crate::exact::Sqrt2Power;
use crate::multiplicative_index::{big_omega, check_even_dimension, divisor_closure, generate_index_set, MonomialId};

/// A positive Schur weight, with its exact form when it is a power of `sqrt 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weight {
    pub value: f64,
    pub exact: Option<Sqrt2Power>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct SchurWeights {
    weights: BTreeMap<MonomialId, Weight>,
}

impl SchurWeights {
    pub fn from_values<I: IntoIterator<Item = (MonomialId, f64)>>(values: I) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (j, value) in values {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight(j.get()));
            }
            weights.insert(j, Weight { value, exact: None });
        }
        Ok(SchurWeights { weights })
    }

    pub fn get(&self, j: MonomialId) -> Option<Weight> {
        self.weights.get(&j).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonomialId, Weight)> + '_ {
        self.weights.iter().map(|(&j, &w)| (j, w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `c_j = 2^{-Omega(j)/2}` on an arbitrary index set.
pub fn omega_weights(index_set: &[MonomialId]) -> SchurWeights {
    let weights = index_set
        .iter()
        .map(|&j| {
            let exact = Sqrt2Power::pow_sqrt2(-(big_omega(j) as i64));
            (j, Weight { value: exact.to_f64(), exact: Some(exact) })
        })
        .collect();
    SchurWeights { weights }
}

/// The weights `c_j = 2^{-Omega(j)/2}` of the construction; every `j` must lie
/// in the divisor closure of the index set `I` for dimension `d`.
pub fn helson_weights(d: usize, index_set: &[MonomialId]) -> Result<SchurWeights> {
    let closure = divisor_closure(&generate_index_set(d)?);
    if let Some(&j) = index_set.iter().find(|j| closure.binary_search(j).is_err()) {
        return Err(Error::OutsideDivisorClosure(j.get()));
    }
    Ok(omega_weights(index_set))
}

fn nonnegative_entries(m: &HankelMatrix) -> Result<Vec<(usize, usize, f64)>> {
    m.triplets()
        .into_iter()
        .map(|(i, k, v)| {
            if v.im != 0.0 || v.re < 0.0 || !v.re.is_finite() {
                Err(Error::NegativeEntry { row: i, col: k, re: v.re, im: v.im })
            } else {
                Ok((i, k, v.re))
            }
        })
        .collect()
}

fn weights_on(ids: &[MonomialId], c: &SchurWeights) -> Result<Vec<Weight>> {
    ids.iter().map(|&j| c.get(j).filter(|w| w.value > 0.0).ok_or(Error::InvalidWeight(j.get()))).collect()
}

/// Schur test: `lambda = max_j (sum_k M_jk c_k) / c_j`, taken over rows and
/// columns, bounds the operator norm of an entrywise nonnegative `M`.
pub fn schur_bound(m: &HankelMatrix, c: &SchurWeights) -> Result<f64> {
    let entries = nonnegative_entries(m)?;
    let row_w = weights_on(m.rows(), c)?;
    let col_w = weights_on(m.cols(), c)?;
    let (nr, nc) = m.shape();
    let mut row_sums = vec![0.0; nr];
    let mut col_sums = vec![0.0; nc];
    for &(i, k, v) in &entries {
        row_sums[i] += v * col_w[k].value;
        col_sums[k] += v * row_w[i].value;
    }
    let row_max = row_sums.iter().zip(&row_w).map(|(s, w)| s / w.value).fold(0.0, f64::max);
    let col_max = col_sums.iter().zip(&col_w).map(|(s, w)| s / w.value).fold(0.0, f64::max);
    Ok(row_max.max(col_max))
}

/// The Schur bound in exact arithmetic, for integer matrices with weights that
/// are powers of `sqrt 2`. `Ok(None)` when a row sum or ratio leaves that set.
pub fn schur_bound_exact(m: &HankelMatrix, c: &SchurWeights) -> Result<Option<Sqrt2Power>> {
    let entries = nonnegative_entries(m)?;
    let row_w = weights_on(m.rows(), c)?;
    let col_w = weights_on(m.cols(), c)?;
    let exact = |ws: &[Weight]| ws.iter().map(|w| w.exact).collect::<Option<Vec<_>>>();
    let (Some(row_w), Some(col_w)) = (exact(&row_w), exact(&col_w)) else {
        return Ok(None);
    };
    let (nr, nc) = m.shape();
    let mut row_sums = vec![Sqrt2Power::ZERO; nr];
    let mut col_sums = vec![Sqrt2Power::ZERO; nc];
    for &(i, k, v) in &entries {
        if v.fract() != 0.0 || v > u64::MAX as f64 {
            return Ok(None);
        }
        let v = Sqrt2Power::new(v as u64, 0);
        let terms = [(&mut row_sums[i], col_w[k]), (&mut col_sums[k], row_w[i])];
        for (sum, w) in terms {
            let Some(next) = v.checked_mul(w).and_then(|t| sum.checked_add(t)) else {
                return Ok(None);
            };
            *sum = next;
        }
    }
    let mut best = Sqrt2Power::ZERO;
    for (sums, ws) in [(&row_sums, &row_w), (&col_sums, &col_w)] {
        for (s, w) in sums.iter().zip(ws.iter()) {
            let Some(ratio) = s.checked_div(*w) else {
                return Ok(None);
            };
            best = best.max(ratio);
        }
    }
    Ok(Some(best))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumRow {
    pub j: u64,
    pub omega: u32,
    /// `#{k in J : j k in I}`, by enumeration.
    pub count: u64,
    /// `2^{d/2 - Omega(j)}`.
    pub expected_count: u64,
    /// `sum_k rho_{jk} c_k` in exact arithmetic.
    pub row_sum: Sqrt2Power,
    /// `2^{d/4} c_j`.
    pub target: Sqrt2Power,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumReport {
    pub d: usize,
    pub holds: bool,
    pub rows: Vec<RowSumRow>,
}

/// Checks `sum_k rho_{jk} c_k = 2^{d/4} c_j` for every `j` in the divisor
/// closure, using integer counts and exponent arithmetic only.
pub fn row_sum_identity_check(d: usize) -> Result<RowSumReport> {
    check_even_dimension(d)?;
    let set = generate_index_set(d)?;
    let closure = divisor_closure(&set);
    let half = (d / 2) as u32;
    let mut rows = Vec::with_capacity(closure.len());
    for &j in &closure {
        let omega = big_omega(j);
        let mut count = 0u64;
        let mut row_sum = Sqrt2Power::ZERO;
        for &k in &closure {
            if j.checked_mul(k).is_ok_and(|n| set.contains(n)) {
                count += 1;
                let c_k = Sqrt2Power::pow_sqrt2(-(big_omega(k) as i64));
                row_sum = row_sum.checked_add(c_k).ok_or(Error::Overflow("summing a Schur row"))?;
            }
        }
        let expected_count = 1u64 << (half - omega);
        let target = Sqrt2Power::pow_sqrt2(half as i64 - omega as i64);
        rows.push(RowSumRow {
            j: j.get(),
            omega,
            count,
            expected_count,
            row_sum,
            target,
            holds: count == expected_count && row_sum == target,
        });
    }
    Ok(RowSumReport { d, holds: rows.iter().all(|r| r.holds), rows })
}

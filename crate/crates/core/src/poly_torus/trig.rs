use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::json::TrigPolynomialRepr;
use super::{Polynomial, TorusFunction};
use crate::error::{Error, Result};
use crate::multiplicative_index::{compose, MultiIndex};

/// Trigonometric polynomial on the torus: signed frequency vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolynomialRepr", into = "TrigPolynomialRepr")]
pub struct TrigPolynomial {
    d: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPolynomial {
    pub fn zero(d: usize) -> Self {
        TrigPolynomial { d, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(d: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if k.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: k.len() });
            }
            *map.entry(k).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(TrigPolynomial { d, terms: map })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<Complex64> {
        if theta.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: theta.len() });
        }
        Ok(self
            .terms()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(theta).map(|(&e, &t)| e as f64 * t).sum();
                c * Complex64::cis(phase)
            })
            .sum())
    }
}

impl From<&Polynomial> for TrigPolynomial {
    fn from(p: &Polynomial) -> Self {
        TrigPolynomial { d: p.dim(), terms: p.frequency_terms().into_iter().collect() }
    }
}

impl TorusFunction for TrigPolynomial {
    fn dim(&self) -> usize {
        self.d
    }

    fn frequency_terms(&self) -> Vec<(Vec<i64>, Complex64)> {
        self.terms.iter().map(|(k, &c)| (k.clone(), c)).collect()
    }
}

/// Riesz projection: keeps the terms whose frequencies are all nonnegative.
pub fn riesz_project(phi: &TrigPolynomial) -> Result<Polynomial> {
    let mut kept = Vec::new();
    for (k, c) in phi.terms() {
        if k.iter().all(|&e| e >= 0) {
            let nu = MultiIndex::new(
                k.iter()
                    .map(|&e| u32::try_from(e).map_err(|_| Error::Overflow("projecting a frequency")))
                    .collect::<Result<_>>()?,
            );
            kept.push((compose(&nu)?, c));
        }
    }
    Polynomial::from_terms(phi.dim(), kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn analytic_input_unchanged() {
        let z1 = Polynomial::variable(2, 1).unwrap();
        let f = z1.add(&Polynomial::variable(2, 2).unwrap()).unwrap().multiply(&z1).unwrap();
        assert_eq!(riesz_project(&TrigPolynomial::from(&f)).unwrap(), f);
    }

    #[test]
    fn negative_frequency_dropped() {
        let phi = TrigPolynomial::from_terms(2, [(vec![-1, 0], c(1.0))]).unwrap();
        assert!(riesz_project(&phi).unwrap().is_zero());
    }

    #[test]
    fn mixed_projection() {
        let phi = TrigPolynomial::from_terms(2, [(vec![-1, 0], c(1.0)), (vec![0, 1], c(1.0))]).unwrap();
        assert_eq!(riesz_project(&phi).unwrap(), Polynomial::variable(2, 2).unwrap());
    }

    #[test]
    fn partially_negative_term_dropped() {
        let phi = TrigPolynomial::from_terms(2, [(vec![2, -1], c(3.0))]).unwrap();
        assert!(riesz_project(&phi).unwrap().is_zero());
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(TrigPolynomial::from_terms(2, [(vec![1], c(1.0))]).is_err());
    }
}

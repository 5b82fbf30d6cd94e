use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::json::PolynomialRepr;
use super::TorusFunction;
use crate::error::{Error, Result};
use crate::multiplicative_index::{factorize, first_primes, MonomialId};

/// Analytic polynomial on the polydisc, keyed by multiplicative monomial ids.
///
/// Always stored in canonical form: every key is valid for dimension `d`
/// and no zero coefficient is kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialRepr", into = "PolynomialRepr")]
pub struct Polynomial {
    d: usize,
    terms: BTreeMap<MonomialId, Complex64>,
}

impl Polynomial {
    pub fn zero(d: usize) -> Self {
        Polynomial { d, terms: BTreeMap::new() }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Complex64::new(1.0, 0.0))
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        let mut p = Self::zero(d);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(MonomialId::ONE, c);
        }
        p
    }

    /// The coordinate function `z_i` (1-based).
    pub fn variable(d: usize, i: usize) -> Result<Self> {
        if i == 0 || i > d {
            return Err(Error::InvalidArgument(format!("variable z_{i} outside dimension {d}")));
        }
        let primes = first_primes(d)?;
        Self::monomial(d, MonomialId::new(primes[i - 1])?, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(d: usize, n: MonomialId, c: Complex64) -> Result<Self> {
        Self::from_terms(d, [(n, c)])
    }

    /// Builds a polynomial, summing repeated keys and dropping zeros.
    pub fn from_terms<I>(d: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MonomialId, Complex64)>,
    {
        let mut map: BTreeMap<MonomialId, Complex64> = BTreeMap::new();
        for (n, c) in terms {
            factorize(n, d)?;
            *map.entry(n).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Polynomial { d, terms: map })
    }

    /// Real 0/1-style helper: every key gets coefficient `1`.
    pub fn indicator<I: IntoIterator<Item = MonomialId>>(d: usize, support: I) -> Result<Self> {
        Self::from_terms(d, support.into_iter().map(|n| (n, Complex64::new(1.0, 0.0))))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, n: MonomialId) -> Complex64 {
        self.terms.get(&n).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (MonomialId, Complex64)> + '_ {
        self.terms.iter().map(|(&n, &c)| (n, c))
    }

    pub fn support(&self) -> impl Iterator<Item = MonomialId> + '_ {
        self.terms.keys().copied()
    }

    fn check_same_dim(&self, other: &Polynomial) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_dim(other)?;
        Self::from_terms(self.d, self.terms().chain(other.terms()))
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|v| *v *= c);
        out.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        out
    }

    /// Product; the coefficient at `n` is the multiplicative convolution
    /// `sum_{j k = n} a_j b_k`.
    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_dim(other)?;
        let mut map: BTreeMap<MonomialId, Complex64> = BTreeMap::new();
        for (j, a) in self.terms() {
            for (k, b) in other.terms() {
                *map.entry(j.checked_mul(k)?).or_default() += a * b;
            }
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Polynomial { d: self.d, terms: map })
    }

    /// Norm in `H^2`, i.e. the l2 norm of the coefficient sequence.
    pub fn h2_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Value at the boundary point `(e^{i theta_1}, ..., e^{i theta_d})`.
    pub fn evaluate(&self, theta: &[f64]) -> Result<Complex64> {
        if theta.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: theta.len() });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.terms() {
            let nu = factorize(n, self.d)?;
            let phase: f64 = nu.exponents().iter().zip(theta).map(|(&e, &t)| e as f64 * t).sum();
            sum += c * Complex64::cis(phase);
        }
        Ok(sum)
    }

    /// Indices (0-based) of variables that occur in some term.
    pub fn active_variables(&self) -> Vec<usize> {
        let mut active = vec![false; self.d];
        for (n, _) in self.terms() {
            let nu = factorize(n, self.d).expect("canonical polynomial key");
            for (flag, &e) in active.iter_mut().zip(nu.exponents()) {
                *flag |= e > 0;
            }
        }
        active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i).collect()
    }
}

impl TorusFunction for Polynomial {
    fn dim(&self) -> usize {
        self.d
    }

    fn frequency_terms(&self) -> Vec<(Vec<i64>, Complex64)> {
        self.terms()
            .map(|(n, c)| {
                let nu = factorize(n, self.d).expect("canonical polynomial key");
                (nu.exponents().iter().map(|&e| e as i64).collect(), c)
            })
            .collect()
    }
}

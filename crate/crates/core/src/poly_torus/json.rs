//! Polynomial file format.
//!
//! ```json
//! {"d": 2, "terms": [{"n": 2, "re": 1.0, "im": 0.0}, {"exponents": [0, 1], "re": 1.0, "im": 0.0}]}
//! ```
//!
//! Terms may be keyed by monomial id (`n`) or by exponent vector; exponent
//! keys are normalized to ids on load and the id form is always written.
//! Trigonometric polynomials only use the exponent form, with signed entries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Polynomial, TrigPolynomial};
use crate::error::{Error, Result};
use crate::multiplicative_index::{compose, MonomialId, MultiIndex};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermRepr {
    Id {
        n: u64,
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Exponents {
        exponents: Vec<i64>,
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialRepr {
    pub d: usize,
    pub terms: Vec<TermRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigTermRepr {
    pub exponents: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPolynomialRepr {
    pub d: usize,
    pub terms: Vec<TrigTermRepr>,
}

fn check_finite(re: f64, im: f64) -> Result<Complex64> {
    if !re.is_finite() || !im.is_finite() {
        return Err(Error::Format("non-finite coefficient".into()));
    }
    Ok(Complex64::new(re, im))
}

impl TryFrom<PolynomialRepr> for Polynomial {
    type Error = Error;

    fn try_from(repr: PolynomialRepr) -> Result<Self> {
        let d = repr.d;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            match t {
                TermRepr::Id { n, re, im } => {
                    let n = MonomialId::new(n).map_err(|e| Error::Format(e.to_string()))?;
                    terms.push((n, check_finite(re, im)?));
                }
                TermRepr::Exponents { exponents, re, im } => {
                    if exponents.len() != d {
                        return Err(Error::Format(format!(
                            "exponent vector of length {} in dimension {d}",
                            exponents.len()
                        )));
                    }
                    let nu = exponents
                        .iter()
                        .map(|&e| {
                            u32::try_from(e)
                                .map_err(|_| Error::Format(format!("negative exponent {e} in an analytic polynomial")))
                        })
                        .collect::<Result<Vec<u32>>>()?;
                    terms.push((compose(&MultiIndex::new(nu))?, check_finite(re, im)?));
                }
            }
        }
        Polynomial::from_terms(d, terms)
    }
}

impl From<Polynomial> for PolynomialRepr {
    fn from(p: Polynomial) -> Self {
        PolynomialRepr {
            d: p.dim(),
            terms: p.terms().map(|(n, c)| TermRepr::Id { n: n.get(), re: c.re, im: c.im }).collect(),
        }
    }
}

impl TryFrom<TrigPolynomialRepr> for TrigPolynomial {
    type Error = Error;

    fn try_from(repr: TrigPolynomialRepr) -> Result<Self> {
        let terms =
            repr.terms.into_iter().map(|t| Ok((t.exponents, check_finite(t.re, t.im)?))).collect::<Result<Vec<_>>>()?;
        TrigPolynomial::from_terms(repr.d, terms).map_err(|e| Error::Format(e.to_string()))
    }
}

impl From<TrigPolynomial> for TrigPolynomialRepr {
    fn from(p: TrigPolynomial) -> Self {
        TrigPolynomialRepr {
            d: p.dim(),
            terms: p.terms().map(|(k, c)| TrigTermRepr { exponents: k.to_vec(), re: c.re, im: c.im }).collect(),
        }
    }
}

pub fn polynomial_from_json(s: &str) -> Result<Polynomial> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}

pub fn polynomial_to_json(p: &Polynomial) -> String {
    serde_json::to_string(p).expect("polynomial serialization is infallible")
}

pub fn trig_polynomial_from_json(s: &str) -> Result<TrigPolynomial> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}

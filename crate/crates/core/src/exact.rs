//! Exact arithmetic on numbers of the form `m * 2^(k/2)`.
//!
//! Schur weights `2^(-Omega(j)/2)`, their row sums and the resulting bound
//! all live in this set, so the row-sum identity can be checked without any
//! rounding.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// `coeff * 2^(half_exp / 2)` with `coeff` odd (or the canonical zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Sqrt2Power {
    coeff: u64,
    half_exp: i64,
}

impl Sqrt2Power {
    pub const ZERO: Sqrt2Power = Sqrt2Power { coeff: 0, half_exp: 0 };
    pub const ONE: Sqrt2Power = Sqrt2Power { coeff: 1, half_exp: 0 };

    pub fn new(coeff: u64, half_exp: i64) -> Self {
        if coeff == 0 {
            return Self::ZERO;
        }
        let tz = coeff.trailing_zeros();
        Sqrt2Power { coeff: coeff >> tz, half_exp: half_exp + 2 * tz as i64 }
    }

    /// `2^(half_exp / 2)`.
    pub fn pow_sqrt2(half_exp: i64) -> Self {
        Sqrt2Power { coeff: 1, half_exp }
    }

    pub fn coeff(&self) -> u64 {
        self.coeff
    }

    pub fn half_exp(&self) -> i64 {
        self.half_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff as f64 * 2f64.powf(self.half_exp as f64 / 2.0)
    }

    pub fn checked_mul(self, other: Self) -> Option<Self> {
        let coeff = self.coeff.checked_mul(other.coeff)?;
        Some(Self::new(coeff, self.half_exp + other.half_exp))
    }

    /// Sum, when it stays in the set: both terms need exponents of equal parity.
    pub fn checked_add(self, other: Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other);
        }
        if other.is_zero() {
            return Some(self);
        }
        if (self.half_exp - other.half_exp).rem_euclid(2) != 0 {
            return None;
        }
        let (lo, hi) = if self.half_exp <= other.half_exp { (self, other) } else { (other, self) };
        let shift = u32::try_from((hi.half_exp - lo.half_exp) / 2).ok()?;
        let scaled = hi.coeff.checked_mul(1u64.checked_shl(shift)?)?;
        Some(Self::new(lo.coeff.checked_add(scaled)?, lo.half_exp))
    }

    /// Quotient, when it stays in the set.
    pub fn checked_div(self, other: Self) -> Option<Self> {
        if other.is_zero() || !self.coeff.is_multiple_of(other.coeff) {
            return None;
        }
        Some(Self::new(self.coeff / other.coeff, self.half_exp - other.half_exp))
    }
}

impl Ord for Sqrt2Power {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        // compare squares: a^2 2^x against b^2 2^y
        let a = self.coeff as u128 * self.coeff as u128;
        let b = other.coeff as u128 * other.coeff as u128;
        let shifted_cmp = |big: u128, shift: i64, small: u128| -> Ordering {
            if shift >= 128 || big.leading_zeros() < shift as u32 {
                Ordering::Greater
            } else {
                (big << shift).cmp(&small)
            }
        };
        match self.half_exp.cmp(&other.half_exp) {
            Ordering::Equal => a.cmp(&b),
            Ordering::Greater => shifted_cmp(a, self.half_exp - other.half_exp, b),
            Ordering::Less => shifted_cmp(b, other.half_exp - self.half_exp, a).reverse(),
        }
    }
}

impl PartialOrd for Sqrt2Power {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sqrt2Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coeff, self.half_exp) {
            (0, _) => write!(f, "0"),
            (c, 0) => write!(f, "{c}"),
            (1, e) => write!(f, "2^({e}/2)"),
            (c, e) => write!(f, "{c}*2^({e}/2)"),
        }
    }
}

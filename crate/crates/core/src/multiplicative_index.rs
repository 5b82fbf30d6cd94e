//! Multiplicative bookkeeping for monomials.
//!
//! The monomial `z_1^{v_1} ... z_d^{v_d}` is encoded as the integer
//! `p_1^{v_1} ... p_d^{v_d}`, where `p_i` is the `i`-th prime. Products of
//! monomials become products of integers and divisibility becomes the
//! componentwise order on exponents. Nothing number-theoretic is used beyond
//! unique factorization.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime index served by the sieve (`p_1_000_000 = 15_485_863`).
pub const MAX_PRIME_INDEX: usize = 1_000_000;

static PRIMES: OnceLock<RwLock<Vec<u64>>> = OnceLock::new();

fn prime_cache() -> &'static RwLock<Vec<u64>> {
    PRIMES.get_or_init(|| RwLock::new(Vec::new()))
}

/// Upper bound for the `k`-th prime (Rosser: `p_k < k (ln k + ln ln k)` for `k >= 6`).
fn nth_prime_upper_bound(k: usize) -> usize {
    if k < 6 {
        return 15;
    }
    let k = k as f64;
    (k * (k.ln() + k.ln().ln())).ceil() as usize + 1
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut m = i * i;
        while m <= limit {
            composite[m] = true;
            m += i;
        }
    }
    primes
}

/// Returns at least the first `k` primes, growing the shared cache if needed.
fn ensure_primes(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroPrimeIndex);
    }
    if k > MAX_PRIME_INDEX {
        return Err(Error::PrimeIndexTooLarge { index: k, limit: MAX_PRIME_INDEX });
    }
    let cache = prime_cache();
    if cache.read().expect("prime cache poisoned").len() >= k {
        return Ok(());
    }
    // Sieve generously so a sequence of increasing requests does not re-sieve every time.
    let target = k.max(64).next_power_of_two().min(MAX_PRIME_INDEX).max(k);
    let primes = sieve(nth_prime_upper_bound(target));
    let mut guard = cache.write().expect("prime cache poisoned");
    if guard.len() < primes.len() {
        *guard = primes;
    }
    Ok(())
}

/// The `k`-th prime, 1-based: `nth_prime(1) == 2`.
pub fn nth_prime(k: usize) -> Result<u64> {
    ensure_primes(k)?;
    Ok(prime_cache().read().expect("prime cache poisoned")[k - 1])
}

/// The first `d` primes.
pub fn first_primes(d: usize) -> Result<Vec<u64>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    ensure_primes(d)?;
    Ok(prime_cache().read().expect("prime cache poisoned")[..d].to_vec())
}

/// A monomial encoded as a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct MonomialId(u64);

impl MonomialId {
    pub const ONE: MonomialId = MonomialId(1);

    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroMonomialId);
        }
        Ok(MonomialId(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Product of two monomials, i.e. the monomial of `z^a z^b`.
    pub fn checked_mul(self, other: MonomialId) -> Result<MonomialId> {
        self.0.checked_mul(other.0).map(MonomialId).ok_or(Error::Overflow("multiplying monomial ids"))
    }

    /// `Some(self / other)` when `other` divides `self`.
    pub fn checked_div(self, other: MonomialId) -> Option<MonomialId> {
        self.0.is_multiple_of(other.0).then(|| MonomialId(self.0 / other.0))
    }

    pub fn divides(self, other: MonomialId) -> bool {
        other.0.is_multiple_of(self.0)
    }
}

impl TryFrom<u64> for MonomialId {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        MonomialId::new(n)
    }
}

impl From<MonomialId> for u64 {
    fn from(n: MonomialId) -> u64 {
        n.0
    }
}

impl fmt::Display for MonomialId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Exponent vector `(v_1, ..., v_d)` of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Exponent vector of `n` with respect to the first `d` primes.
pub fn factorize(n: MonomialId, d: usize) -> Result<MultiIndex> {
    let primes = first_primes(d)?;
    let mut rest = n.get();
    let mut exponents = vec![0u32; d];
    for (e, &p) in exponents.iter_mut().zip(&primes) {
        while rest.is_multiple_of(p) {
            rest /= p;
            *e += 1;
        }
    }
    if rest != 1 {
        return Err(Error::DimensionViolation { n: n.get(), d });
    }
    Ok(MultiIndex(exponents))
}

/// Inverse of [`factorize`].
pub fn compose(nu: &MultiIndex) -> Result<MonomialId> {
    let primes = first_primes(nu.dim())?;
    let mut n: u64 = 1;
    for (&e, &p) in nu.exponents().iter().zip(&primes) {
        let power = p.checked_pow(e).ok_or(Error::Overflow("composing a monomial id"))?;
        n = n.checked_mul(power).ok_or(Error::Overflow("composing a monomial id"))?;
    }
    Ok(MonomialId(n))
}

/// Whether `n` only involves the first `d` variables.
pub fn is_valid_for_dim(n: MonomialId, d: usize) -> bool {
    factorize(n, d).is_ok()
}

/// Number of prime factors of `n` counted with multiplicity.
///
/// Small factors by trial division, the cofactor by Pollard rho with a
/// deterministic Miller-Rabin test.
pub fn big_omega(n: MonomialId) -> u32 {
    let mut rest = n.get();
    let mut count = 0;
    let mut p = 2u64;
    while p < 1000 && p * p <= rest {
        while rest.is_multiple_of(p) {
            rest /= p;
            count += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    count + omega_large(rest)
}

fn omega_large(n: u64) -> u32 {
    if n == 1 {
        0
    } else if is_prime(n) {
        1
    } else {
        let f = pollard_rho(n);
        omega_large(f) + omega_large(n / f)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin with the first twelve primes as bases, exact below 3.3e24.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of the odd composite `n`.
fn pollard_rho(n: u64) -> u64 {
    for c in 1.. {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("some increment yields a factor")
}

/// All divisors of `n` within dimension `d`, sorted ascending.
pub fn divisors(n: MonomialId, d: usize) -> Result<Vec<MonomialId>> {
    let nu = factorize(n, d)?;
    let primes = first_primes(d)?;
    let mut out = vec![1u64];
    for (&e, &p) in nu.exponents().iter().zip(&primes) {
        let current = out.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= p;
            for i in 0..current {
                out.push(out[i] * power);
            }
        }
    }
    out.sort_unstable();
    Ok(out.into_iter().map(MonomialId).collect())
}

/// The set `I` of the construction: products `q_1 ... q_{d/2}` with
/// `q_j` either `p_{2j-1}` or `p_{2j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSetI {
    d: usize,
    members: Vec<MonomialId>,
}

impl IndexSetI {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &[MonomialId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: MonomialId) -> bool {
        self.members.binary_search(&n).is_ok()
    }
}

pub fn check_even_dimension(d: usize) -> Result<()> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension(d));
    }
    Ok(())
}

pub fn generate_index_set(d: usize) -> Result<IndexSetI> {
    check_even_dimension(d)?;
    let primes = first_primes(d)?;
    let mut members = vec![1u64];
    for pair in primes.chunks_exact(2) {
        let mut next = Vec::with_capacity(members.len() * 2);
        for &m in &members {
            for &q in pair {
                next.push(m.checked_mul(q).ok_or(Error::Overflow("generating the index set"))?);
            }
        }
        members = next;
    }
    members.sort_unstable();
    Ok(IndexSetI { d, members: members.into_iter().map(MonomialId).collect() })
}

/// Every positive integer dividing some member of `set`, sorted ascending.
pub fn divisor_closure(set: &IndexSetI) -> Vec<MonomialId> {
    let mut out = BTreeSet::new();
    for &m in set.members() {
        // members are products of the first d primes by construction
        out.extend(divisors(m, set.d()).expect("index set member outside its dimension"));
    }
    out.into_iter().collect()
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

    /// Trial-division primality, independent of the sieve.
    fn is_prime_naive(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
    }

    #[test]
    fn nth_prime_small() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(2).unwrap(), 3);
        assert_eq!(nth_prime(6).unwrap(), 13);
        assert_eq!(nth_prime(30).unwrap(), 113);
    }

    #[test]
    fn nth_prime_matches_trial_division() {
        let naive: Vec<u64> = (2..2000).filter(|&n| is_prime_naive(n)).collect();
        for (i, &p) in naive.iter().enumerate() {
            assert_eq!(nth_prime(i + 1).unwrap(), p);
        }
    }

    #[test]
    fn nth_prime_errors() {
        assert_eq!(nth_prime(0), Err(Error::ZeroPrimeIndex));
        assert!(matches!(nth_prime(MAX_PRIME_INDEX + 1), Err(Error::PrimeIndexTooLarge { .. })));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(id(1), 2).unwrap().exponents(), &[0, 0]);
        assert_eq!(factorize(id(12), 2).unwrap().exponents(), &[2, 1]);
        assert_eq!(factorize(id(45), 3).unwrap().exponents(), &[0, 2, 1]);
    }

    #[test]
    fn factorize_rejects_foreign_prime() {
        assert_eq!(factorize(id(5), 2), Err(Error::DimensionViolation { n: 5, d: 2 }));
        assert_eq!(factorize(id(14), 3), Err(Error::DimensionViolation { n: 14, d: 3 }));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&MultiIndex::new(vec![0, 0])).unwrap(), id(1));
        assert_eq!(compose(&MultiIndex::new(vec![2, 1])).unwrap(), id(12));
        assert_eq!(compose(&MultiIndex::new(vec![1, 0, 1])).unwrap(), id(10));
    }

    #[test]
    fn compose_overflow() {
        assert_eq!(compose(&MultiIndex::new(vec![64])), Err(Error::Overflow("composing a monomial id")));
    }

    #[test]
    fn zero_id_rejected() {
        assert_eq!(MonomialId::new(0), Err(Error::ZeroMonomialId));
    }

    #[test]
    fn big_omega_examples() {
        assert_eq!(big_omega(id(1)), 0);
        assert_eq!(big_omega(id(12)), 3);
        assert_eq!(big_omega(id(30)), 3);
        assert_eq!(big_omega(id(113 * 113)), 2);
        assert_eq!(big_omega(id(2_147_483_647 * 2_147_483_647)), 2);
        assert_eq!(big_omega(id((1 << 61) - 1)), 1);
        assert_eq!(big_omega(id(u64::MAX)), 7);
        assert_eq!(big_omega(id(1 << 63)), 63);
    }

    #[test]
    fn big_omega_matches_trial_division() {
        let trial = |mut n: u64| {
            let mut count = 0;
            let mut p = 2;
            while p * p <= n {
                while n.is_multiple_of(p) {
                    n /= p;
                    count += 1;
                }
                p += 1;
            }
            count + u32::from(n > 1)
        };
        for n in (1..20_000u64).chain((0..2_000).map(|k| 1_000_003 * 999_983 + 7919 * k)) {
            assert_eq!(big_omega(id(n)), trial(n), "n = {n}");
        }
    }

    #[test]
    fn index_set_examples() {
        assert_eq!(generate_index_set(2).unwrap().members(), ids(&[2, 3]).as_slice());
        assert_eq!(generate_index_set(4).unwrap().members(), ids(&[10, 14, 15, 21]).as_slice());
        assert_eq!(generate_index_set(6).unwrap().len(), 8);
    }

    #[test]
    fn index_set_brute_force_d4() {
        // {2,3} x {5,7}
        let mut expanded: Vec<u64> = [2u64, 3].iter().flat_map(|a| [5u64, 7].map(|b| a * b)).collect();
        expanded.sort();
        assert_eq!(generate_index_set(4).unwrap().members(), ids(&expanded).as_slice());
    }

    #[test]
    fn index_set_rejects_odd_and_zero() {
        assert_eq!(generate_index_set(3), Err(Error::UnsupportedDimension(3)));
        assert_eq!(generate_index_set(0), Err(Error::UnsupportedDimension(0)));
    }

    #[test]
    fn index_set_largest_supported_dimension() {
        // 3 * 7 * 13 * ... * 89 (the larger prime of each of 12 pairs) fits in 64 bits
        let set = generate_index_set(24).unwrap();
        assert_eq!(set.len(), 1 << 12);
        assert_eq!(set.members().last().unwrap().get(), 3 * 7 * 13 * 19 * 29 * 37 * 43 * 53 * 61 * 71 * 79 * 89);
        assert!(matches!(generate_index_set(26), Err(Error::Overflow(_))));
    }

    #[test]
    fn divisor_closure_examples() {
        assert_eq!(divisor_closure(&generate_index_set(2).unwrap()), ids(&[1, 2, 3]));
        // brute force: every n up to max(I) dividing some member
        let set = generate_index_set(4).unwrap();
        let brute: Vec<u64> = (1..=21u64).filter(|n| set.members().iter().any(|m| m.get() % n == 0)).collect();
        assert_eq!(brute, vec![1, 2, 3, 5, 7, 10, 14, 15, 21]);
        assert_eq!(divisor_closure(&set), ids(&brute));
        assert_eq!(divisor_closure(&generate_index_set(6).unwrap()).len(), 27);
    }

    #[test]
    fn divisors_of_twelve() {
        assert_eq!(divisors(id(12), 2).unwrap(), ids(&[1, 2, 3, 4, 6, 12]));
    }
}

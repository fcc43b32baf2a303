//! Integer factorisation, smoothness and k-freeness.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SIEVE_LIMIT: u64 = 1_000_000;
/// Trial division stops here; larger cofactors go to Pollard–Brent.
const TRIAL_LIMIT: u64 = 1_000;

static SMALL_PRIMES: OnceLock<Vec<u64>> = OnceLock::new();

/// Primes below 10⁶, built once.
pub fn small_primes() -> &'static [u64] {
    SMALL_PRIMES.get_or_init(|| primes_up_to(SIEVE_LIMIT))
}

/// All primes `≤ n` (Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// A finite set of distinct primes `P₁ < ⋯ < P_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        primes.sort_unstable();
        for w in primes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInput(format!("prime {} listed twice", w[0])));
            }
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(Self(primes))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// Product `P₁⋯P_t` (1 for the empty set).
    pub fn product(&self) -> BigUint {
        self.0.iter().fold(BigUint::one(), |acc, &p| acc * p)
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(s: PrimeSet) -> Self {
        s.0
    }
}

/// Signed prime factorisation; primes strictly increasing, exponents ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub sign: i8,
    #[serde(with = "crate::json::prime_powers")]
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn value(&self) -> BigInt {
        let mag = self.factors.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        let v = BigInt::from(mag);
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Greatest prime factor, with the convention gpf(±1) = 1.
    pub fn gpf(&self) -> BigUint {
        self.factors.last().map(|(p, _)| p.clone()).unwrap_or_else(BigUint::one)
    }
}

// ---------------------------------------------------------------- u64 layer

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin; the twelve prime bases are a proof for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Pollard–Brent; returns a non-trivial factor of the odd composite `n`.
fn rho_u64(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factors_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = rho_u64(n);
    push_factors_u64(d, out);
    push_factors_u64(n / d, out);
}

/// Factorisation of a positive `u64` as `(prime, exponent)` pairs.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize_u64(0)");
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p > TRIAL_LIMIT || p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        let mut rest = Vec::new();
        push_factors_u64(n, &mut rest);
        rest.sort_unstable();
        for p in rest {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    out
}

/// Greatest prime factor of `n ≥ 1` (1 for n = 1).
pub fn gpf_u64(n: u64) -> u64 {
    factorize_u64(n).last().map(|&(p, _)| p).unwrap_or(1)
}

// ------------------------------------------------------------- BigUint layer

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    // Strong probable-prime test to 24 fixed prime bases.
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in small_primes().iter().take(24) {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = BigUint::one();
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn push_factors_big(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(v) = n.to_u64() {
        for (p, e) in factorize_u64(v) {
            for _ in 0..e {
                out.push(BigUint::from(p));
            }
        }
        return;
    }
    if is_probable_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let q = &n / &d;
    push_factors_big(d, out);
    push_factors_big(q, out);
}

/// Exact prime factorisation of a non-zero integer.
pub fn factorize(m: &BigInt) -> Result<Factorization> {
    if m.is_zero() {
        return Err(Error::InvalidInput("cannot factorise 0".into()));
    }
    let sign = if m.sign() == Sign::Minus { -1 } else { 1 };
    let mut n = m.magnitude().clone();
    if let Some(v) = n.to_u64() {
        let factors = factorize_u64(v)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        return Ok(Factorization { sign, factors });
    }
    let mut flat = Vec::new();
    for &p in small_primes() {
        let bp = BigUint::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            flat.push(bp.clone());
        }
        if n.bits() <= 64 {
            break;
        }
    }
    push_factors_big(n, &mut flat);
    flat.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in flat {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { sign, factors })
}

pub fn factorize_i128(m: i128) -> Result<Factorization> {
    factorize(&BigInt::from(m))
}

/// Number of distinct prime divisors.
pub fn omega(m: &BigInt) -> Result<usize> {
    Ok(factorize(m)?.omega())
}

/// Greatest prime factor, gpf(±1) = 1.
pub fn gpf(m: &BigInt) -> Result<BigUint> {
    Ok(factorize(m)?.gpf())
}

/// Divides every prime of `s` out of `|m|`, returning the exponents and the
/// remaining cofactor.
pub fn split_smooth_u128(m: u128, s: &PrimeSet) -> (Vec<u32>, u128) {
    let mut rest = m;
    let mut exps = Vec::with_capacity(s.len());
    for &p in s.primes() {
        let p = p as u128;
        let mut e = 0;
        while rest != 0 && rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        exps.push(e);
    }
    (exps, rest)
}

/// Whether `|m|` is composed only of primes in `s` (|m| = 1 always is).
pub fn is_smooth(m: &BigInt, s: &PrimeSet) -> Result<bool> {
    if m.is_zero() {
        return Err(Error::InvalidInput("smoothness of 0".into()));
    }
    let mut n = m.magnitude().clone();
    for &p in s.primes() {
        let bp = BigUint::from(p);
        loop {
            let (q, r) = n.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            n = q;
        }
    }
    Ok(n.is_one())
}

pub fn is_smooth_i128(m: i128, s: &PrimeSet) -> Result<bool> {
    if m == 0 {
        return Err(Error::InvalidInput("smoothness of 0".into()));
    }
    Ok(split_smooth_u128(m.unsigned_abs(), s).1 == 1)
}

/// Whether no `P^k` divides `m`.
pub fn is_kfree(m: &BigInt, k: u32) -> Result<bool> {
    if m.is_zero() {
        return Err(Error::InvalidInput("k-freeness of 0".into()));
    }
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    Ok(factorize(m)?.factors.iter().all(|(_, e)| *e < k))
}

/// Fast k-freeness test for `1 ≤ |m| < 2⁶⁴`.
pub fn is_kfree_u64(m: u64, k: u32) -> bool {
    factorize_u64(m).iter().all(|&(_, e)| e < k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn fac(m: i64) -> Vec<(u64, u32)> {
        factorize(&bi(m))
            .unwrap()
            .factors
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(fac(108), vec![(2, 2), (3, 3)]);
        let unit = factorize(&bi(-1)).unwrap();
        assert_eq!(unit.sign, -1);
        assert!(unit.factors.is_empty());
        assert_eq!(fac(148875), trial_division(148875));
        assert_eq!(fac(148875), vec![(3, 1), (5, 3), (397, 1)]);
        assert!(factorize(&bi(0)).is_err());
    }

    #[test]
    fn large_semiprimes_split() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factorize_u64(p * q), vec![(q, 1), (p, 1)]);
        let big = BigInt::from(p) * BigInt::from(q) * BigInt::from(1_000_000_009u64);
        let f = factorize(&big).unwrap();
        assert_eq!(f.value(), big);
        assert_eq!(f.omega(), 3);
    }

    #[test]
    fn omega_and_gpf() {
        assert_eq!(omega(&bi(12)).unwrap(), 2);
        assert_eq!(gpf(&bi(12)).unwrap(), BigUint::from(3u32));
        assert_eq!(omega(&bi(1)).unwrap(), 0);
        assert_eq!(gpf(&bi(1)).unwrap(), BigUint::one());
        assert_eq!(gpf(&bi(-1)).unwrap(), BigUint::one());
        assert_eq!(omega(&bi(30030)).unwrap(), 6);
        assert!(omega(&bi(0)).is_err());
    }

    #[test]
    fn smoothness() {
        let s23 = PrimeSet::new(vec![3, 2]).unwrap();
        assert_eq!(s23.primes(), &[2, 3]);
        assert!(is_smooth(&bi(108), &s23).unwrap());
        assert!(!is_smooth(&bi(10), &s23).unwrap());
        assert!(is_smooth(&bi(1), &PrimeSet::empty()).unwrap());
        assert!(is_smooth(&bi(-6), &s23).unwrap());
        assert!(is_smooth(&bi(0), &s23).is_err());
        assert!(PrimeSet::new(vec![2, 4]).is_err());
        assert!(PrimeSet::new(vec![2, 2]).is_err());
    }

    #[test]
    fn kfree() {
        assert!(!is_kfree(&bi(8), 2).unwrap());
        assert!(is_kfree(&bi(12), 3).unwrap());
        assert!(is_kfree(&bi(-6), 2).unwrap());
        assert!(is_kfree(&bi(6), 1).is_err());
        assert!(is_kfree(&bi(0), 2).is_err());
    }

    #[test]
    fn prime_tests_agree_with_sieve() {
        let sieve = primes_up_to(10_000);
        let by_mr: Vec<u64> = (0..=10_000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(sieve, by_mr);
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(m in prop::num::i64::ANY.prop_filter("nonzero", |m| *m != 0)) {
            let f = factorize(&bi(m)).unwrap();
            prop_assert_eq!(f.value(), bi(m));
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for (p, e) in &f.factors {
                prop_assert!(*e >= 1);
                prop_assert!(is_prime_u64(p.to_u64().unwrap()));
            }
        }

        #[test]
        fn smooth_iff_gpf_in_set(m in 1i64..200_000) {
            let s = PrimeSet::new(vec![2, 3, 7]).unwrap();
            let f = factorize(&bi(m)).unwrap();
            let all_in = f.factors.iter().all(|(p, _)| s.contains(p.to_u64().unwrap()));
            prop_assert_eq!(is_smooth(&bi(m), &s).unwrap(), all_in);
            if all_in {
                prop_assert!(f.gpf() <= BigUint::from(7u32));
            }
        }

        #[test]
        fn kfree_is_monotone_in_k(m in 1i64..1_000_000, k in 2u32..6) {
            if is_kfree(&bi(m), k).unwrap() {
                prop_assert!(is_kfree(&bi(m), k + 1).unwrap());
            }
        }
    }
}

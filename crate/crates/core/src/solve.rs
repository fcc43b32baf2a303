//! Box-complete solvers for Thue, Thue–Mahler and S-unit equations.
//!
//! Every solver returns the complete solution set inside its search box. A
//! result is only marked certified when the caller supplies an a priori height
//! bound that the box covers.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, split_smooth_u128, PrimeSet};
use crate::error::{Error, Result};
use crate::exec;
use crate::forms::BinaryForm;
use crate::scan::RowScanner;

/// An integer pair; `gcd(p, q) = 1` wherever the equation requires it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoprimePair {
    #[serde(with = "crate::json::int")]
    pub p: BigInt,
    #[serde(with = "crate::json::int")]
    pub q: BigInt,
}

impl CoprimePair {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        Self {
            p: p.into(),
            q: q.into(),
        }
    }

    /// `|p, q| = max(|p|, |q|)`.
    pub fn height(&self) -> BigInt {
        self.p.abs().max(self.q.abs())
    }

    fn sort_key(&self) -> (BigInt, BigInt, BigInt) {
        (self.height(), self.p.clone(), self.q.clone())
    }
}

/// Whether a solution set is known to be complete or only complete in its box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    Certified,
    BoxLimited,
}

impl Completeness {
    /// `Certified` iff a bound is given and the box `B` reaches it.
    pub fn from_bound(certified_bound: Option<&BigInt>, b: u64) -> Self {
        match certified_bound {
            Some(c) if *c <= BigInt::from(b) => Completeness::Certified,
            _ => Completeness::BoxLimited,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThueSolutions {
    pub solutions: Vec<CoprimePair>,
    pub completeness: Completeness,
}

fn check_box(form: &BinaryForm, b: u64) -> Result<i64> {
    if form.degree() < 3 {
        return Err(Error::InvalidDegree(format!(
            "degree must be at least 3, got {}",
            form.degree()
        )));
    }
    if b == 0 {
        return Err(Error::Domain("box bound B must be at least 1".into()));
    }
    i64::try_from(b)
        .ok()
        .filter(|&b| b < 1 << 52)
        .ok_or_else(|| Error::Unsupported(format!("box bound {b} exceeds 2^52")))
}

fn sort_pairs(v: &mut [CoprimePair]) {
    v.sort_by_cached_key(CoprimePair::sort_key);
}

/// All integer `(p, q)` with `|p, q| ≤ B` and `F(p, q) = m`, sorted by height,
/// then `p`, then `q`.
///
/// Each row `q` is solved exactly for `p` (no two-dimensional scan). `m = 0`
/// is delegated to [`thue_zero_locus`].
pub fn solve_thue(form: &BinaryForm, m: &BigInt, b: u64, certified_bound: Option<&BigInt>) -> Result<ThueSolutions> {
    let bb = check_box(form, b)?;
    let completeness = Completeness::from_bound(certified_bound, b);
    if m.is_zero() {
        return Ok(ThueSolutions {
            solutions: thue_zero_locus(form, b)?,
            completeness,
        });
    }
    let target = m
        .to_i128()
        .ok_or_else(|| Error::Unsupported("right-hand side exceeds 128 bits".into()))?;
    let scanner = RowScanner::new(form);
    let chunks = exec::map_chunks(-bb..bb + 1, 1024, |range| {
        let mut found = Vec::new();
        for q in range {
            scanner.scan_row(q, target, target, -bb, bb, &mut |p, _| found.push((p, q)));
        }
        found
    });
    let mut solutions = Vec::new();
    for (p, q) in chunks.into_iter().flatten() {
        let pair = CoprimePair::new(p, q);
        if form.eval(&pair.p, &pair.q) != *m {
            return Err(Error::Internal(format!("row scan returned non-solution ({p}, {q})")));
        }
        solutions.push(pair);
    }
    sort_pairs(&mut solutions);
    Ok(ThueSolutions {
        solutions,
        completeness,
    })
}

/// Integer zeros of `F` in the box: `(0, 0)` and the multiples of the
/// primitive zeros coming from linear factors over ℚ.
pub fn thue_zero_locus(form: &BinaryForm, b: u64) -> Result<Vec<CoprimePair>> {
    let bb = BigInt::from(b);
    let mut out = BTreeSet::new();
    out.insert(CoprimePair::new(0, 0));
    for (g, _) in form.factor_over_q().factors {
        if g.degree() != 1 {
            continue;
        }
        let (alpha, beta) = (&g.coeffs()[0], &g.coeffs()[1]);
        let (p0, q0) = (beta.clone(), -alpha.clone());
        let h = p0.abs().max(q0.abs());
        let kmax = (&bb / &h)
            .to_i64()
            .ok_or_else(|| Error::Unsupported("zero locus too large".into()))?;
        for k in 1..=kmax {
            out.insert(CoprimePair::new(&p0 * k, &q0 * k));
            out.insert(CoprimePair::new(-&p0 * k, -&q0 * k));
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    sort_pairs(&mut v);
    Ok(v)
}

/// A coprime pair with `|F(p, q)| = ∏ Pᵢ^{zᵢ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThueMahlerSolution {
    pub pair: CoprimePair,
    /// `|F(p, q)|`.
    #[serde(with = "crate::json::int")]
    pub value: BigInt,
    /// Exponents in the order of the prime set.
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThueMahlerSolutions {
    pub solutions: Vec<ThueMahlerSolution>,
    pub completeness: Completeness,
}

/// Splits `|v|` over `s`; `None` unless it is `s`-smooth.
fn smooth_exponents(v: &BigInt, s: &PrimeSet) -> Option<Vec<u32>> {
    if let Some(u) = v.magnitude().to_u128() {
        let (e, rest) = split_smooth_u128(u, s);
        return (rest == 1).then_some(e);
    }
    let mut rest = v.magnitude().clone();
    let mut exps = Vec::with_capacity(s.len());
    for &p in s.primes() {
        let bp = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        exps.push(e);
    }
    rest.is_one().then_some(exps)
}

/// All coprime `(p, q)` with `|p, q| ≤ B`, `F(p, q) ≠ 0` and `|F(p, q)|`
/// composed of primes from `S`.
///
/// `(p, q)` and `(−p, −q)` give the same value; one representative is kept,
/// normalised to `p > 0`, or `(0, 1)`.
pub fn solve_thue_mahler(
    form: &BinaryForm,
    s: &PrimeSet,
    b: u64,
    certified_bound: Option<&BigInt>,
) -> Result<ThueMahlerSolutions> {
    let bb = check_box(form, b)?;
    let test = |p: i64, q: i64| -> Option<ThueMahlerSolution> {
        let v = match form.eval_i128(p as i128, q as i128) {
            Some(v) => BigInt::from(v),
            None => form.eval_i64(p, q),
        };
        if v.is_zero() {
            return None;
        }
        let exponents = smooth_exponents(&v, s)?;
        let pair = if p < 0 {
            CoprimePair::new(-p, -q)
        } else {
            CoprimePair::new(p, q)
        };
        Some(ThueMahlerSolution {
            pair,
            value: v.abs(),
            exponents,
        })
    };
    let chunks = exec::map_chunks(1..bb + 1, 16, |range| {
        let mut found = Vec::new();
        for q in range {
            for p in -bb..=bb {
                if p.gcd(&q) == 1 {
                    found.extend(test(p, q));
                }
            }
        }
        found
    });
    let mut solutions: Vec<_> = test(1, 0).into_iter().chain(chunks.into_iter().flatten()).collect();
    solutions.sort_by_cached_key(|s| s.pair.sort_key());
    Ok(ThueMahlerSolutions {
        solutions,
        completeness: Completeness::from_bound(certified_bound, b),
    })
}

/// A solution of `ax + by = 1` in S-units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUnitSolution {
    #[serde(with = "crate::json::rat")]
    pub x: BigRational,
    #[serde(with = "crate::json::rat")]
    pub y: BigRational,
    pub x_sign: i8,
    pub y_sign: i8,
    /// `x = x_sign · ∏ Pᵢ^{x_exponents[i]}`.
    pub x_exponents: Vec<i64>,
    pub y_exponents: Vec<i64>,
}

impl SUnitSolution {
    fn from_xy(x: BigRational, y: BigRational, s: &PrimeSet) -> Option<Self> {
        let (x_sign, x_exponents) = sunit_exponents(&x, s)?;
        let (y_sign, y_exponents) = sunit_exponents(&y, s)?;
        Some(Self {
            x,
            y,
            x_sign,
            y_sign,
            x_exponents,
            y_exponents,
        })
    }

    /// Largest `|zᵢ|` over both exponent vectors.
    pub fn max_exponent(&self) -> u64 {
        self.x_exponents
            .iter()
            .chain(&self.y_exponents)
            .map(|z| z.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

/// Sign and exponent vector of an S-unit; `None` if `r` is not one.
pub fn sunit_exponents(r: &BigRational, s: &PrimeSet) -> Option<(i8, Vec<i64>)> {
    if r.is_zero() {
        return None;
    }
    let num = smooth_exponents(r.numer(), s)?;
    let den = smooth_exponents(r.denom(), s)?;
    let sign = if r.is_negative() { -1 } else { 1 };
    Some((sign, num.iter().zip(&den).map(|(&a, &b)| a as i64 - b as i64).collect()))
}

/// Positive integers whose prime support is exactly `support` (indices into
/// `primes`), with every exponent in `1..=e` and value at most `cap`.
fn exact_support_numbers(primes: &[u64], support: &[usize], e: u32, cap: u128) -> Vec<u128> {
    fn rec(primes: &[u64], support: &[usize], e: u32, cap: u128, acc: u128, out: &mut Vec<u128>) {
        let Some((&i, rest)) = support.split_first() else {
            out.push(acc);
            return;
        };
        let p = primes[i] as u128;
        let mut v = acc;
        for _ in 0..e {
            match v.checked_mul(p) {
                Some(w) if w <= cap => v = w,
                _ => return,
            }
            rec(primes, rest, e, cap, v, out);
        }
    }
    let mut out = Vec::new();
    rec(primes, support, e, cap, 1, &mut out);
    out.sort_unstable();
    out
}

/// `∏_{i ∈ support} Pᵢ^e`, `None` on overflow.
fn support_power(primes: &[u64], support: &[usize], e: u32) -> Option<u128> {
    support
        .iter()
        .try_fold(1u128, |acc, &i| acc.checked_mul((primes[i] as u128).checked_pow(e)?))
}

/// Whether `v` has prime support exactly `mask` with exponents at most `e`.
fn has_exact_support(v: u128, primes: &[u64], mask: u32, e: u32) -> bool {
    let mut rest = v;
    for (i, &p) in primes.iter().enumerate() {
        let p = p as u128;
        let mut k = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        let inside = mask >> i & 1 == 1;
        if (inside && (k == 0 || k > e)) || (!inside && k > 0) {
            return false;
        }
    }
    rest == 1
}

/// Coprime triples `a ≤ b`, `a + b = c` of positive S-smooth integers with all
/// exponents at most `e`, in increasing order.
pub fn abc_triples(s: &PrimeSet, e: u32) -> Result<Vec<(u128, u128, u128)>> {
    let primes = s.primes();
    let t = primes.len();
    if t > 12 {
        return Err(Error::Unsupported(format!("{t} primes is beyond desk scale")));
    }
    // Each prime goes to the support of a, b, c, or none of them.
    let assignments: Vec<[u32; 3]> = (0..4u64.pow(t as u32))
        .filter_map(|code| {
            let mut masks = [0u32; 3];
            let mut c = code;
            for i in 0..t {
                let slot = (c % 4) as usize;
                c /= 4;
                if slot < 3 {
                    masks[slot] |= 1 << i;
                }
            }
            (masks[2] != 0).then_some(masks)
        })
        .collect();
    let per = exec::map_ordered(assignments, |masks| -> Result<Vec<(u128, u128, u128)>> {
        let idx = |m: u32| (0..t).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>();
        let sup = [idx(masks[0]), idx(masks[1]), idx(masks[2])];
        let pw = |k: usize| support_power(primes, &sup[k], e);
        let ab = match (pw(0), pw(1)) {
            (Some(x), Some(y)) => x.max(y).checked_mul(2),
            _ => None,
        };
        let cap = match (pw(2), ab) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => return Err(Error::Overflow("S-unit search exceeds 128-bit values".into())),
        };
        let lists: Vec<Vec<u128>> = (0..3).map(|k| exact_support_numbers(primes, &sup[k], e, cap)).collect();
        let mut found = Vec::new();
        let (la, lb, lc) = (lists[0].len(), lists[1].len(), lists[2].len());
        let cost = [la * lb, la * lc, lb * lc];
        let best = (0..3).min_by_key(|&i| cost[i]).unwrap();
        match best {
            0 => {
                for &a in &lists[0] {
                    for &b in lists[1].iter().filter(|&&b| b >= a) {
                        let c = a + b;
                        if c > cap {
                            break;
                        }
                        if has_exact_support(c, primes, masks[2], e) {
                            found.push((a, b, c));
                        }
                    }
                }
            }
            1 => {
                for &c in &lists[2] {
                    for &a in lists[0].iter().take_while(|&&a| 2 * a <= c) {
                        let b = c - a;
                        if has_exact_support(b, primes, masks[1], e) {
                            found.push((a, b, c));
                        }
                    }
                }
            }
            _ => {
                for &c in &lists[2] {
                    for &b in lists[1].iter().filter(|&&b| 2 * b >= c && b < c) {
                        let a = c - b;
                        if has_exact_support(a, primes, masks[0], e) {
                            found.push((a, b, c));
                        }
                    }
                }
            }
        }
        Ok(found)
    });
    let mut all = Vec::new();
    for r in per {
        all.extend(r?);
    }
    all.sort_unstable_by_key(|&(a, b, c)| (c, a, b));
    all.dedup();
    Ok(all)
}

fn rat(n: u128, d: u128, negative: bool) -> BigRational {
    let r = BigRational::new(BigInt::from(n), BigInt::from(d));
    if negative {
        -r
    } else {
        r
    }
}

/// All solutions of `x + y = 1` in S-units with every exponent `|zᵢ| ≤ E`,
/// sorted by `(x, y)`.
///
/// Writing `x = A/C`, `y = B/C` in lowest terms turns each solution into a
/// coprime triple of S-smooth integers; each triple yields up to six solutions.
pub fn solve_sunit(s: &PrimeSet, e: u32) -> Result<Vec<SUnitSolution>> {
    let mut set = BTreeSet::new();
    for (a, b, c) in abc_triples(s, e)? {
        set.insert((rat(a, c, false), rat(b, c, false)));
        set.insert((rat(b, c, false), rat(a, c, false)));
        set.insert((rat(c, a, false), rat(b, a, true)));
        set.insert((rat(b, a, true), rat(c, a, false)));
        set.insert((rat(c, b, false), rat(a, b, true)));
        set.insert((rat(a, b, true), rat(c, b, false)));
    }
    set.into_iter()
        .map(|(x, y)| {
            SUnitSolution::from_xy(x, y, s).ok_or_else(|| Error::Internal("S-unit triple produced a non-unit".into()))
        })
        .collect()
}

/// All S-units `±∏ Pᵢ^{zᵢ}` with `|zᵢ| ≤ E`, as exponent vectors.
fn exponent_box(t: usize, e: u32) -> Vec<Vec<i64>> {
    let e = e as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-e..=e).map(move |z| {
                    let mut w = v.clone();
                    w.push(z);
                    w
                })
            })
            .collect();
    }
    out
}

fn unit_value(primes: &[u64], z: &[i64]) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&p, &k) in primes.iter().zip(z) {
        let pk = BigInt::from(p).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            num *= pk;
        } else {
            den *= pk;
        }
    }
    BigRational::new(num, den)
}

/// All solutions of `ax + by = 1` in S-units with `|zᵢ| ≤ E` for both `x`
/// and `y`, sorted by `(x, y)`.
///
/// Runs over every `x` in the exponent box and tests `y = (1 − ax)/b`.
pub fn solve_weighted_sunit(a: &BigRational, b: &BigRational, s: &PrimeSet, e: u32) -> Result<Vec<SUnitSolution>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Domain("weights a and b must be non-zero".into()));
    }
    let t = s.len();
    let size = (2 * e as u64 + 1).checked_pow(t as u32).filter(|&n| n <= 50_000_000);
    if size.is_none() {
        return Err(Error::Unsupported("weighted S-unit box is too large".into()));
    }
    let primes = s.primes();
    let boxes = exponent_box(t, e);
    let per = exec::map_ordered(boxes, |z| {
        let mut found = Vec::new();
        let u = unit_value(primes, &z);
        for x in [u.clone(), -u] {
            let y = (BigRational::one() - a * &x) / b;
            if let Some(sol) = SUnitSolution::from_xy(x, y, s) {
                if sol.y_exponents.iter().all(|k| k.unsigned_abs() <= e as u64) {
                    found.push(sol);
                }
            }
        }
        found
    });
    let mut out: Vec<_> = per.into_iter().flatten().collect();
    out.sort_by(|u, v| (&u.x, &u.y).cmp(&(&v.x, &v.y)));
    Ok(out)
}

/// `A = a·p⁵` with `p ≥ 1` and `a` fifth-power-free.
pub fn fifth_power_decompose(a: &BigInt) -> Result<(BigInt, BigInt)> {
    if a.is_zero() {
        return Err(Error::Domain("cannot decompose 0".into()));
    }
    let f = factorize(a)?;
    let mut free = BigInt::from(f.sign);
    let mut p = BigInt::one();
    for (q, e) in &f.factors {
        let q = BigInt::from(q.clone());
        free *= q.pow(e % 5);
        p *= q.pow(e / 5);
    }
    Ok((free, p))
}

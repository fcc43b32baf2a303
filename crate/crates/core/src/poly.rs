//! Univariate polynomials over ℤ (dense, lowest degree first) and the real
//! root machinery built on them: exact Sturm isolation over ℚ and fast f64
//! root finding for scan breakpoints.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense integer polynomial, `coeffs[i]` multiplies `x^i`; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    /// `f(x) mod m` in `[0, m)`, for `0 < m < 2⁶²`.
    pub fn eval_mod(&self, x: i128, m: i128) -> i128 {
        let mut acc: i128 = 0;
        let x = x.rem_euclid(m);
        for c in self.coeffs.iter().rev() {
            let c = (c % BigInt::from(m)).to_i128().unwrap_or(0).rem_euclid(m);
            acc = (acc * x + c).rem_euclid(m);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Coefficients reversed: `x^n f(1/x)`.
    pub fn reversed(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        Poly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::from_i64(&[1]), |acc, _| acc.mul(self))
    }

    /// Pseudo-remainder `prem(self, d)`.
    pub fn pseudo_rem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let lr = r.last().unwrap().clone();
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &lr * dc;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Poly::new(r)
    }

    /// Exact division by `d` over ℤ; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let n = self.degree()?;
        if n < dd {
            return None;
        }
        let lc = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let (quo, rem) = r[k + dd].div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &quo * dc;
            }
            q[k] = quo;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::new(q))
    }

    /// Primitive gcd over ℤ[x] (positive leading coefficient).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive();
        }
        let c = self.content().gcd(&other.content());
        if a.degree() == Some(0) {
            return Poly::new(vec![c.max(BigInt::one())]);
        }
        a
    }

    /// Squarefree part (primitive).
    pub fn squarefree_part(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.primitive();
        }
        self.primitive().div_exact(&g.primitive()).unwrap().primitive()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Cauchy bound: every complex root has modulus < bound.
    pub fn root_bound(&self) -> BigRational {
        let lc = self.leading().expect("zero polynomial").abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        BigRational::one() + BigRational::new(max, lc)
    }
}

// ----------------------------------------------------------- Sturm isolation

fn rat_poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let f = r.last().unwrap() / &lb;
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &f * bc;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

fn rat_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Sturm chain of a squarefree polynomial.
pub struct SturmChain {
    chain: Vec<Vec<BigRational>>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let to_rat =
            |q: &Poly| -> Vec<BigRational> { q.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
        let mut chain = vec![to_rat(p), to_rat(&p.derivative())];
        while chain.last().is_some_and(|c| !c.is_empty()) {
            let n = chain.len();
            let r = rat_poly_rem(&chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        chain.retain(|c| !c.is_empty());
        Self { chain }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for q in &self.chain {
            let v = rat_eval(q, x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// A real root of an integer polynomial, isolated in `[lo, hi]`.
///
/// Either `lo == hi` (an exact rational root) or `f(lo)` and `f(hi)` are
/// non-zero with opposite signs and no other root lies in between.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoot {
    pub poly: Poly,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Halves the isolating interval.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        let fm = self.poly.eval_rational(&mid);
        if fm.is_zero() {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let flo = self.poly.eval_rational(&self.lo);
        if flo.is_positive() == fm.is_positive() {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Refines until the width is at most `w`.
    pub fn refine_to(&mut self, w: &BigRational) {
        while !self.is_exact() && &self.width() > w {
            self.bisect();
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        let m = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        m.to_f64().unwrap_or(f64::NAN)
    }

    /// Orders the root against a rational, refining as needed.
    pub fn cmp_rational(&mut self, x: &BigRational) -> Ordering {
        loop {
            if self.is_exact() {
                return self.lo.cmp(x);
            }
            if &self.hi < x {
                return Ordering::Less;
            }
            if &self.lo > x {
                return Ordering::Greater;
            }
            if self.poly.eval_rational(x).is_zero() {
                return Ordering::Equal;
            }
            self.bisect();
        }
    }
}

/// Isolates every real root of `p` (computed on its squarefree part),
/// in increasing order.
pub fn isolate_real_roots(p: &Poly) -> Vec<RealRoot> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sq = p.squarefree_part();
    let sturm = SturmChain::new(&sq);
    let bound = sq.root_bound();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut stack = vec![(-bound.clone(), bound)];
    let mut out = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let n = sturm.count(&a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            let fb = sq.eval_rational(&b);
            if fb.is_zero() {
                out.push(RealRoot {
                    poly: sq.clone(),
                    lo: b.clone(),
                    hi: b,
                });
                continue;
            }
            let fa = sq.eval_rational(&a);
            if !fa.is_zero() {
                out.push(RealRoot {
                    poly: sq.clone(),
                    lo: a,
                    hi: b,
                });
                continue;
            }
        }
        let m = (&a + &b) / &two;
        stack.push((a, m.clone()));
        stack.push((m, b));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

// ------------------------------------------------------------ f64 roots

fn eval_f64(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Approximate real roots (with sign change or touching) of a polynomial with
/// f64 coefficients, lowest degree first. Sorted, possibly with near-duplicates.
pub fn real_roots_f64(c: &[f64]) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|&x| x == 0.0) {
        c.pop();
    }
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                // A near-double root still marks a breakpoint.
                let x = -b / (2.0 * a);
                let tol = 4.0 * f64::EPSILON * (b * b + 4.0 * (a * cc).abs());
                return if -disc <= tol { vec![x] } else { Vec::new() };
            }
            let sq = disc.sqrt();
            let q = -0.5 * (b + b.signum() * sq);
            if q == 0.0 {
                return vec![0.0];
            }
            let (mut r1, mut r2) = (q / a, cc / q);
            if r1 > r2 {
                std::mem::swap(&mut r1, &mut r2);
            }
            vec![r1, r2]
        }
        n => {
            let deriv: Vec<f64> = (1..n).map(|i| c[i] * i as f64).collect();
            let crit = real_roots_f64(&deriv);
            let lc = c[n - 1].abs();
            let bound = 1.0 + c[..n - 1].iter().map(|x| x.abs()).fold(0.0, f64::max) / lc;
            let mut pts = vec![-bound];
            pts.extend(crit.iter().copied().filter(|x| x.abs() < bound));
            pts.push(bound);
            let mut out = Vec::new();
            for w in pts.windows(2) {
                let (mut lo, mut hi) = (w[0], w[1]);
                let (flo, fhi) = (eval_f64(&c, lo), eval_f64(&c, hi));
                if flo == 0.0 {
                    out.push(lo);
                    continue;
                }
                if flo.signum() == fhi.signum() {
                    continue;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = eval_f64(&c, mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            if eval_f64(&c, bound) == 0.0 {
                out.push(bound);
            }
            out.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out
        }
    }
}

//! Reduction of a product of approximation inequalities to single-place
//! systems, the gap principle, and effective count bounds.
//!
//! All comparisons between a distance `min(1, |ζ − p/q|_P)` and a bound
//! `(k·|p,q|^{−β₁})^{Γ}` are made exactly: with `β₁ = a/b` and `Γ = f/v`
//! both sides are raised to the power `b·v`, which turns the comparison into
//! one between integers. Real distances are bracketed by an isolating
//! interval of `ζ`, refined until the comparison is decided.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::padic::{padic_distance, padic_roots, PAdicRootApprox};
use crate::poly::{isolate_real_roots, Poly, RealRoot};

/// Bisection budget for deciding a real comparison.
const REFINE_LIMIT: usize = 20_000;

/// Parses `"3"`, `"5/2"` or `"2.5"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = if ip.is_empty() || ip == "-" || ip == "+" {
            "0"
        } else {
            ip
        };
        let ipv: BigInt = ip.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let fpv: BigInt = fp.parse().map_err(|_| bad())?;
        let mag = ipv.abs() * &den + fpv;
        return Ok(BigRational::new(if neg { -mag } else { mag }, den));
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn height(p: &BigInt, q: &BigInt) -> BigInt {
    p.abs().max(q.abs())
}

fn pow(x: &BigInt, e: &BigInt) -> BigInt {
    num_traits::pow(x.clone(), e.to_usize().expect("exponent fits in usize"))
}

// --------------------------------------------------------------- Γ-tuples

/// The tuples `(f_P)` of non-negative integers with `Σ f_P = v` over `t + 1`
/// places, with `v = 1 + ⌊β₁(t+1)/(β − β₁)⌋`. Here `t = |S| − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTupleSet {
    #[serde(with = "crate::json::rat")]
    pub beta: BigRational,
    #[serde(with = "crate::json::rat")]
    pub beta1: BigRational,
    pub t: u32,
    pub v: u64,
}

pub fn gamma_tuples(beta: &BigRational, beta1: &BigRational, t: u32) -> Result<GammaTupleSet> {
    if !beta1.is_positive() || beta <= beta1 {
        return Err(Error::Domain(format!("need β > β₁ > 0, got β = {beta}, β₁ = {beta1}")));
    }
    let q = beta1 * BigRational::from_integer(BigInt::from(t + 1)) / (beta - beta1);
    let v = q
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Domain("v = 1 + ⌊β₁(t+1)/(β−β₁)⌋ does not fit in 64 bits".into()))?
        + 1;
    Ok(GammaTupleSet {
        beta: beta.clone(),
        beta1: beta1.clone(),
        t,
        v,
    })
}

impl GammaTupleSet {
    /// `λ = β/β₁ − 1`.
    pub fn lambda(&self) -> BigRational {
        &self.beta / &self.beta1 - BigRational::one()
    }

    /// `binom(v + t, t)`.
    pub fn cardinality(&self) -> BigInt {
        let mut c = BigInt::one();
        for i in 0..self.t as u64 {
            c = c * BigInt::from(self.v + i + 1) / BigInt::from(i + 1);
        }
        c
    }

    /// Whether `|𝒮| ≤ 2^{(β/(β−β₁))(t+1)}`, decided exactly.
    pub fn within_power_bound(&self) -> bool {
        let e = &self.beta * BigRational::from_integer(BigInt::from(self.t + 1)) / (&self.beta - &self.beta1);
        // |𝒮|^den ≤ 2^num
        let num = e.numer().to_u64().expect("small exponent");
        let den = e.denom().to_u64().expect("small exponent");
        let lhs = num_traits::pow(self.cardinality(), den as usize);
        lhs <= num_traits::pow(BigInt::from(2), num as usize)
    }

    /// Tuples in colexicographic order.
    pub fn iter(&self) -> ColexCompositions {
        ColexCompositions::new(self.v, self.t as usize + 1)
    }

    /// `Γ_P = f_P / v`.
    pub fn gammas(&self, tuple: &[u64]) -> Vec<BigRational> {
        let v = BigInt::from(self.v);
        tuple
            .iter()
            .map(|&f| BigRational::new(BigInt::from(f), v.clone()))
            .collect()
    }

    /// One CSV row per tuple, at most `limit` rows.
    pub fn to_csv(&self, limit: usize) -> String {
        let mut s: String = (0..=self.t).map(|i| format!("f{i}")).collect::<Vec<_>>().join(",");
        s.push('\n');
        for tup in self.iter().take(limit) {
            let row: Vec<String> = tup.iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Compositions of `v` into `m` non-negative parts, in colex order
/// (ordered by the last part first).
pub struct ColexCompositions {
    cur: Option<Vec<u64>>,
}

impl ColexCompositions {
    fn new(v: u64, m: usize) -> Self {
        let mut first = vec![0; m];
        first[0] = v;
        Self { cur: Some(first) }
    }
}

impl Iterator for ColexCompositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.cur.take()?;
        // Reversed, this is the successor in lexicographic order.
        let mut g = out.clone();
        let m = g.len();
        if let Some(l) = (1..m).rev().find(|&i| g[m - 1 - i] > 0).filter(|&l| l > 0) {
            let (li, ii) = (m - 1 - l, m - l);
            let s = g[li];
            g[li] = 0;
            g[ii] += 1;
            g[0] = s - 1;
            self.cur = Some(g);
        }
        Some(out)
    }
}

// -------------------------------------------------------------- systems

/// A place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Place::Infinity),
            other => other
                .parse()
                .ok()
                .filter(|&p| crate::arith::is_prime_u64(p))
                .map(Place::Prime)
                .ok_or_else(|| Error::InvalidInput(format!("bad place {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum PlaceRoot {
    Real(RealRoot),
    PAdic(PAdicRootApprox),
}

#[derive(Debug, Clone)]
pub struct PlaceCondition {
    pub place: Place,
    pub root: PlaceRoot,
    pub gamma: BigRational,
}

/// `min(1, |ζ_P − p/q|_P) ≤ (k·|p,q|^{−β₁})^{Γ_P}` for every place `P ∈ S`.
#[derive(Debug, Clone)]
pub struct ApproxSystem {
    pub f: Poly,
    pub k: BigRational,
    pub beta1: BigRational,
    pub conditions: Vec<PlaceCondition>,
}

impl ApproxSystem {
    /// Builds the system from `(place, root index, Γ)`. Real roots are indexed
    /// in increasing order, P-adic roots as returned by [`padic_roots`].
    pub fn new(
        f: &Poly,
        k: BigRational,
        beta1: BigRational,
        conds: &[(Place, usize, BigRational)],
        precision: u32,
    ) -> Result<Self> {
        if k < BigRational::one() {
            return Err(Error::Domain(format!("k must be at least 1, got {k}")));
        }
        if !beta1.is_positive() {
            return Err(Error::Domain("β₁ must be positive".into()));
        }
        let total: BigRational = conds.iter().map(|(_, _, g)| g.clone()).sum();
        if !total.is_one() || conds.iter().any(|(_, _, g)| g.is_negative()) {
            return Err(Error::Domain("the Γ_P must be non-negative with sum 1".into()));
        }
        let mut places: Vec<Place> = conds.iter().map(|s| s.0).collect();
        places.sort();
        places.dedup();
        if places.len() != conds.len() {
            return Err(Error::InvalidInput("places must be distinct".into()));
        }
        let mut conditions = Vec::new();
        for (place, idx, gamma) in conds {
            let root = match place {
                Place::Infinity => {
                    let roots = isolate_real_roots(f);
                    let mut root = roots.get(*idx).cloned().ok_or_else(|| {
                        Error::InvalidInput(format!("f has {} real roots, asked for #{idx}", roots.len()))
                    })?;
                    // f64 views of the root (margins, prefilter) need it narrow.
                    root.refine_to(&BigRational::new(BigInt::one(), BigInt::one() << 80));
                    PlaceRoot::Real(root)
                }
                Place::Prime(p) => {
                    let roots = padic_roots(f, *p, precision)?;
                    PlaceRoot::PAdic(roots.roots.get(*idx).cloned().ok_or_else(|| {
                        Error::InvalidInput(format!("f has {} roots in Q_{p}, asked for #{idx}", roots.roots.len()))
                    })?)
                }
            };
            conditions.push(PlaceCondition {
                place: *place,
                root,
                gamma: gamma.clone(),
            });
        }
        Ok(Self {
            f: f.clone(),
            k,
            beta1,
            conditions,
        })
    }

    /// Raises every P-adic root to precision at least `n`, keeping the same root.
    pub fn relift(&mut self, n: u32) -> Result<()> {
        for c in &mut self.conditions {
            if let (Place::Prime(p), PlaceRoot::PAdic(z)) = (c.place, &mut c.root) {
                if z.precision >= n {
                    continue;
                }
                let m = num_traits::pow(BigInt::from(p), z.precision as usize);
                let lifted = padic_roots(&self.f, p, n)?
                    .roots
                    .into_iter()
                    .find(|w| w.pole == z.pole && w.residue.mod_floor(&m) == z.residue)
                    .ok_or_else(|| Error::Internal("root lost while re-lifting".into()))?;
                *z = lifted;
            }
        }
        Ok(())
    }

    /// `|p,q| ≥ k^{1/β₁}`.
    pub fn above_threshold(&self, h: &BigInt) -> bool {
        let (a, b) = (self.beta1.numer(), self.beta1.denom());
        // h^a ≥ k^b
        pow(h, a) * pow(self.k.denom(), b) >= pow(self.k.numer(), b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceReport {
    pub place: String,
    pub gamma: String,
    pub holds: bool,
    /// `ln(bound) − ln(distance)`, approximate; absent when either side is 0.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub holds: bool,
    pub above_threshold: bool,
    pub places: Vec<PlaceReport>,
}

/// Decides `|ζ − x| ≤ B` where `ok(d)` is the monotone test `d ≤ B` on
/// rationals; refines the isolating interval until certified.
fn decide_real(root: &RealRoot, x: &BigRational, ok: impl Fn(&BigRational) -> bool) -> Result<bool> {
    let mut r = root.clone();
    let side = r.cmp_rational(x);
    if side.is_eq() {
        return Ok(true);
    }
    for _ in 0..REFINE_LIMIT {
        let (near, far) = if side.is_gt() {
            (&r.lo - x, &r.hi - x)
        } else {
            (x - &r.hi, x - &r.lo)
        };
        if ok(&far) {
            return Ok(true);
        }
        if !ok(&near) {
            return Ok(false);
        }
        r.bisect();
    }
    Err(Error::Undecided(format!(
        "real distance to {x} after {REFINE_LIMIT} bisections"
    )))
}

/// Integer form of one condition: `dist^{bv} · kd^{bf} · h^{af} ≤ kn^{bf}`.
struct Powers {
    a: BigInt,
    b: BigInt,
    f: BigInt,
    v: BigInt,
}

impl Powers {
    fn new(beta1: &BigRational, gamma: &BigRational) -> Self {
        Self {
            a: beta1.numer().clone(),
            b: beta1.denom().clone(),
            f: gamma.numer().clone(),
            v: gamma.denom().clone(),
        }
    }

    /// `d ≤ (k·h^{−β₁})^{Γ}` for a rational `d ≥ 0`.
    fn holds(&self, d: &BigRational, k: &BigRational, h: &BigInt) -> bool {
        if d.is_zero() {
            return true;
        }
        let bv = &self.b * &self.v;
        let bf = &self.b * &self.f;
        let af = &self.a * &self.f;
        let lhs = pow(d.numer(), &bv) * pow(k.denom(), &bf) * pow(h, &af);
        let rhs = pow(k.numer(), &bf) * pow(d.denom(), &bv);
        lhs <= rhs
    }
}

/// Checks the system at `p/q` (`gcd(p,q) = 1`, `q > 0`).
pub fn check_system(sys: &ApproxSystem, p: &BigInt, q: &BigInt) -> Result<SystemReport> {
    if !q.is_positive() || !p.gcd(q).is_one() {
        return Err(Error::InvalidInput(format!(
            "need gcd(p,q) = 1 and q > 0, got ({p}, {q})"
        )));
    }
    let h = height(p, q);
    let x = BigRational::new(p.clone(), q.clone());
    let lnb = ratio_f64(&sys.k).ln() - ratio_f64(&sys.beta1) * h.to_f64().unwrap_or(f64::MAX).ln();
    let mut places = Vec::new();
    for c in &sys.conditions {
        let g = ratio_f64(&c.gamma);
        let (holds, margin) = if c.gamma.is_zero() {
            (true, None)
        } else {
            let pw = Powers::new(&sys.beta1, &c.gamma);
            match &c.root {
                PlaceRoot::PAdic(z) => {
                    let d = padic_distance(z, p, q)?;
                    let dv = d.value();
                    let holds = pw.holds(&dv, &sys.k, &h);
                    if !d.exact && !holds {
                        return Err(Error::NeedsRelift {
                            needed: z.precision * 2,
                        });
                    }
                    let margin = if d.exact {
                        Some(g * lnb + d.exponent as f64 * (z.prime as f64).ln())
                    } else {
                        None
                    };
                    (holds, margin)
                }
                PlaceRoot::Real(r) => {
                    let one = BigRational::one();
                    let holds = decide_real(r, &x, |d| {
                        // min(1, d) ≤ bound
                        let d = if d > &one { &one } else { d };
                        pw.holds(d, &sys.k, &h)
                    })?;
                    let dist = (r.midpoint_f64() - ratio_f64(&x)).abs().min(1.0);
                    (holds, (dist > 0.0).then(|| g * lnb - dist.ln()))
                }
            }
        };
        places.push(PlaceReport {
            place: c.place.to_string(),
            gamma: c.gamma.to_string(),
            holds,
            margin,
        });
    }
    Ok(SystemReport {
        holds: places.iter().all(|r| r.holds),
        above_threshold: sys.above_threshold(&h),
        places,
    })
}

/// All coprime `p/q` with `q > 0`, `|p,q| ≤ bound` satisfying the system.
///
/// A floating-point prefilter with generous slack discards pairs far from
/// every bound; survivors are decided by [`check_system`], re-lifting P-adic
/// roots whenever it asks for more precision.
pub fn enumerate_solutions(sys: &mut ApproxSystem, bound: i64) -> Result<Vec<(i64, i64)>> {
    if bound < 1 {
        return Err(Error::Domain("bound must be at least 1".into()));
    }
    let filter = Prefilter::new(sys);
    let candidates: Vec<(i64, i64)> = exec::map_chunks(1..bound + 1, 64, |qs| {
        let mut out = Vec::new();
        for q in qs {
            let (lo, hi) = filter.p_range(q, bound);
            for p in lo..=hi {
                if p.gcd(&q) == 1 && filter.may_hold(p, q) {
                    out.push((p, q));
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();
    let mut sols = Vec::new();
    for (p, q) in candidates {
        let (bp, bq) = (BigInt::from(p), BigInt::from(q));
        loop {
            match check_system(sys, &bp, &bq) {
                Ok(r) => {
                    if r.holds {
                        sols.push((p, q));
                    }
                    break;
                }
                Err(Error::NeedsRelift { needed }) => sys.relift(needed)?,
                Err(e) => return Err(e),
            }
        }
    }
    sols.sort_by_key(|&(p, q)| (p.abs().max(q), p, q));
    Ok(sols)
}

struct Prefilter {
    k: f64,
    beta1: f64,
    real: Option<(f64, f64)>,
    padic: Vec<PadicFilter>,
    exact_only: bool,
}

/// A non-pole P-adic root known modulo `m = P^n < 2⁶²`.
struct PadicFilter {
    prime: i128,
    residue: i128,
    modulus: i128,
    precision: u32,
    gamma: f64,
}

impl Prefilter {
    fn new(sys: &ApproxSystem) -> Self {
        let mut real = None;
        let mut padic = Vec::new();
        let mut exact_only = false;
        for c in &sys.conditions {
            let gamma = ratio_f64(&c.gamma);
            if gamma == 0.0 {
                continue;
            }
            match &c.root {
                PlaceRoot::Real(r) => real = Some((r.midpoint_f64(), gamma)),
                PlaceRoot::PAdic(z) => {
                    let m = num_traits::pow(BigInt::from(z.prime), z.precision as usize);
                    match m.to_i128().filter(|&m| m < 1 << 62 && !z.pole) {
                        Some(modulus) => padic.push(PadicFilter {
                            prime: z.prime as i128,
                            residue: z.residue.to_i128().unwrap(),
                            modulus,
                            precision: z.precision,
                            gamma,
                        }),
                        None => exact_only = true,
                    }
                }
            }
        }
        Self {
            k: ratio_f64(&sys.k),
            beta1: ratio_f64(&sys.beta1),
            real,
            padic,
            exact_only,
        }
    }

    fn p_range(&self, q: i64, bound: i64) -> (i64, i64) {
        match self.real {
            Some((z, g)) => {
                let qf = q as f64;
                let r = qf * (self.k * qf.powf(-self.beta1)).powf(g).min(1.0);
                let c = qf * z;
                let lo = (c - r - 2.0).floor().max(-(bound as f64)) as i64;
                let hi = (c + r + 2.0).ceil().min(bound as f64) as i64;
                (lo, hi)
            }
            None => (-bound, bound),
        }
    }

    fn may_hold(&self, p: i64, q: i64) -> bool {
        if self.exact_only {
            return true;
        }
        let h = p.abs().max(q) as f64;
        let lnb = self.k.ln() - self.beta1 * h.ln();
        const SLACK: f64 = 1e-6;
        if let Some((z, g)) = self.real {
            let d = (z - p as f64 / q as f64).abs().min(1.0);
            let tol = 1e-12 * (1.0 + z.abs());
            if d > tol && (d - tol).ln() > g * lnb + SLACK {
                return false;
            }
        }
        for pf in &self.padic {
            let x = ((q as i128) * pf.residue - p as i128).rem_euclid(pf.modulus);
            let val = |mut y: i128, cap: u32| {
                let mut v = 0;
                while y != 0 && y % pf.prime == 0 && v < cap {
                    y /= pf.prime;
                    v += 1;
                }
                if y == 0 {
                    cap
                } else {
                    v
                }
            };
            // v(ζ − p/q) ≥ v(qζ − p) − v(q)
            let e = val(x, pf.precision).saturating_sub(val(q as i128, u32::MAX)) as f64;
            if -e * (pf.prime as f64).ln() > pf.gamma * lnb + SLACK {
                return false;
            }
        }
        true
    }
}

/// `∏_{P∈S} min(1, |ζ_P − p/q|_P) ≤ k·|p,q|^{−β}`.
pub fn check_product(sys: &ApproxSystem, beta: &BigRational, p: &BigInt, q: &BigInt) -> Result<bool> {
    if !q.is_positive() || !p.gcd(q).is_one() {
        return Err(Error::InvalidInput(format!(
            "need gcd(p,q) = 1 and q > 0, got ({p}, {q})"
        )));
    }
    let h = height(p, q);
    let x = BigRational::new(p.clone(), q.clone());
    // product of the P-adic factors (exact or an upper bound)
    let mut padic = BigRational::one();
    let mut inexact = None;
    let mut real = None;
    for c in &sys.conditions {
        match &c.root {
            PlaceRoot::PAdic(z) => {
                let d = padic_distance(z, p, q)?;
                if !d.exact {
                    inexact = Some(z.precision);
                }
                padic *= d.value();
            }
            PlaceRoot::Real(r) => real = Some(r),
        }
    }
    let (a, b) = (beta.numer(), beta.denom());
    let one = BigRational::one();
    // (d·padic)^b · h^a ≤ k^b
    let test = |d: &BigRational| {
        let d = if d > &one { &one } else { d };
        let lhs = d * &padic;
        pow(lhs.numer(), b) * pow(&h, a) * pow(sys.k.denom(), b) <= pow(sys.k.numer(), b) * pow(lhs.denom(), b)
    };
    let holds = match real {
        Some(r) => decide_real(r, &x, test)?,
        None => test(&one),
    };
    match inexact {
        Some(n) if !holds => Err(Error::NeedsRelift { needed: 2 * n }),
        _ => Ok(holds),
    }
}

// ---------------------------------------------------------- gap principle

/// `(1/2k)·h₁^{β₁−1}`: exact when `β₁` is an integer, else an enclosure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapThreshold {
    #[serde(with = "crate::json::opt_rat")]
    pub exact: Option<BigRational>,
    pub lo: f64,
    pub hi: f64,
}

pub fn gap_threshold(k: &BigRational, beta1: &BigRational, h1: &BigInt) -> Result<GapThreshold> {
    let (a, b) = (beta1.numer(), beta1.denom());
    if !beta1.is_positive() || !k.is_positive() {
        return Err(Error::Domain("k and β₁ must be positive".into()));
    }
    // h₁ > k^{1/β₁}  ⇔  h₁^a > k^b
    if !h1.is_positive() || pow(h1, a) * pow(k.denom(), b) <= pow(k.numer(), b) {
        return Err(Error::Domain(format!("gap principle needs h₁ > k^(1/β₁); h₁ = {h1}")));
    }
    let two_k = k * BigRational::from_integer(BigInt::from(2));
    if b.is_one() {
        let e = (a - 1i32).to_i64().unwrap();
        let hp = if e >= 0 {
            BigRational::from_integer(pow(h1, &BigInt::from(e)))
        } else {
            BigRational::new(BigInt::one(), pow(h1, &BigInt::from(-e)))
        };
        let v = hp / two_k;
        let f = ratio_f64(&v);
        return Ok(GapThreshold {
            exact: Some(v),
            lo: f,
            hi: f,
        });
    }
    let ln = (ratio_f64(beta1) - 1.0) * h1.to_f64().unwrap().ln() - ratio_f64(&two_k).ln();
    let v = ln.exp();
    Ok(GapThreshold {
        exact: None,
        lo: v * (1.0 - 1e-12),
        hi: v * (1.0 + 1e-12),
    })
}

/// `h₂ ≥ (1/2k)·h₁^{β₁−1}`, decided exactly.
pub fn gap_holds(k: &BigRational, beta1: &BigRational, h1: &BigInt, h2: &BigInt) -> bool {
    let (a, b) = (beta1.numer(), beta1.denom());
    // (2k·h₂)^b ≥ h₁^{a−b}, cleared of k's denominator
    let lhs = pow(&(BigInt::from(2) * k.numer() * h2), b);
    let d = a - b;
    if d.is_negative() {
        return lhs * pow(h1, &(-d)) >= pow(k.denom(), b);
    }
    lhs >= pow(h1, &d) * pow(k.denom(), b)
}

// ----------------------------------------------------------- count bounds

fn delta(beta1: f64) -> Result<f64> {
    if beta1.is_nan() || beta1 <= 2.0 {
        return Err(Error::Domain(format!("β₁ must exceed 2, got {beta1}")));
    }
    Ok(1.0 - 2.0 / beta1)
}

/// `2³⁰·δ⁻³·ln(3n)·ln(δ⁻¹·ln 3n)` with `δ = 1 − 2/β₁`.
pub fn approximation_count_bound(n: u32, beta1: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDegree(format!("need n ≥ 3, got {n}")));
    }
    let d = delta(beta1)?;
    let l = (3.0 * n as f64).ln();
    Ok(2f64.powi(30) * d.powi(-3) * l * (l / d).ln())
}

/// `(4k)^{2/(β₁−2)}·H`.
pub fn approximation_height_floor(k: f64, beta1: f64, h: f64) -> Result<f64> {
    delta(beta1)?;
    if k.is_nan() || k < 1.0 {
        return Err(Error::Domain(format!("k must be at least 1, got {k}")));
    }
    Ok((4.0 * k).powf(2.0 / (beta1 - 2.0)) * h)
}

// --------------------------------------------------------- classification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionClass {
    Large,
    Medium,
    Small,
}

/// Large if `|p,q| ≥ (4Z)^{1/(n−2)}`, medium if `|p,q| ≥ Z^{1/(n−1)}`, else
/// small.
pub fn classify_solution(n: usize, z: &BigInt, p: &BigInt, q: &BigInt) -> Result<SolutionClass> {
    if n <= 2 {
        return Err(Error::InvalidDegree(format!("classification needs n ≥ 3, got {n}")));
    }
    if p.is_zero() && q.is_zero() {
        return Err(Error::InvalidInput("(0,0) has no height class".into()));
    }
    let h = height(p, q);
    if num_traits::pow(h.clone(), n - 2) >= z * 4 {
        Ok(SolutionClass::Large)
    } else if num_traits::pow(h, n - 1) >= *z {
        Ok(SolutionClass::Medium)
    } else {
        Ok(SolutionClass::Small)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn parse_examples() {
        assert_eq!(r("2.5"), BigRational::new(5.into(), 2.into()));
        assert_eq!(r("5/2"), r("2.50"));
        assert_eq!(r("-0.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(r("3"), BigRational::from_integer(3.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn tuple_examples() {
        let s = gamma_tuples(&r("4"), &r("3"), 1).unwrap();
        assert_eq!(s.v, 7);
        assert_eq!(s.cardinality(), BigInt::from(8));
        assert_eq!(s.iter().count(), 8);
        for t in 0..5u32 {
            let s = gamma_tuples(&r("6"), &r("3"), t).unwrap();
            assert_eq!(s.v, t as u64 + 2);
            assert_eq!(s.iter().count() as u64, binom(2 * t as u64 + 2, t as u64));
        }
        let s = gamma_tuples(&r("4"), &r("3"), 0).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![vec![s.v]]);
        assert!(gamma_tuples(&r("3"), &r("3"), 1).is_err());
    }

    #[test]
    fn tuples_are_colex_and_distinct() {
        let s = gamma_tuples(&r("4"), &r("3"), 2).unwrap();
        let all: Vec<Vec<u64>> = s.iter().collect();
        for w in all.windows(2) {
            let a: Vec<u64> = w[0].iter().rev().copied().collect();
            let b: Vec<u64> = w[1].iter().rev().copied().collect();
            assert!(a < b);
        }
        assert!(all.iter().all(|t| t.iter().sum::<u64>() == s.v));
        assert_eq!(all.len() as u64, binom(s.v + 2, 2));
    }

    #[test]
    fn check_examples() {
        let f = Poly::from_i64(&[-2, 0, 0, 1]);
        let inf = vec![(Place::Infinity, 0, r("1"))];
        let (p, q) = (BigInt::from(5), BigInt::from(4));
        let s3 = ApproxSystem::new(&f, r("1"), r("3"), &inf, 4).unwrap();
        assert!(!check_system(&s3, &p, &q).unwrap().holds);
        let s25 = ApproxSystem::new(&f, r("1"), r("2.5"), &inf, 4).unwrap();
        let rep = check_system(&s25, &p, &q).unwrap();
        assert!(rep.holds);
        assert!(rep.places[0].margin.unwrap() > 0.0);
        // Γ = 0 at a place is always satisfied there
        let mixed = vec![(Place::Infinity, 0, r("0")), (Place::Prime(5), 0, r("1"))];
        let s = ApproxSystem::new(&f, r("1"), r("3"), &mixed, 4).unwrap();
        let rep = check_system(&s, &p, &q).unwrap();
        assert!(rep.places[0].holds);
        assert!(check_system(&s3, &BigInt::from(2), &BigInt::from(4)).is_err());
    }

    #[test]
    fn relift_on_demand() {
        let f = Poly::from_i64(&[-2, 0, 0, 1]);
        let conds = vec![(Place::Prime(5), 0, r("1"))];
        let mut s = ApproxSystem::new(&f, r("1"), r("2"), &conds, 2).unwrap();
        // 53 ≡ ζ mod 125: the distance saturates precision 2
        let res = check_system(&s, &BigInt::from(53), &BigInt::one());
        assert!(matches!(res, Err(Error::NeedsRelift { .. })));
        s.relift(8).unwrap();
        let rep = check_system(&s, &BigInt::from(53), &BigInt::one()).unwrap();
        // |ζ − 53|₅ = 5⁻³ vs 53⁻² : 125 < 2809, fails
        assert!(!rep.holds);
    }

    #[test]
    fn gap_examples() {
        let g = gap_threshold(&r("1"), &r("3"), &BigInt::from(10)).unwrap();
        assert_eq!(g.exact, Some(r("50")));
        let g = gap_threshold(&r("1"), &r("2"), &BigInt::from(100)).unwrap();
        assert_eq!(g.exact, Some(r("50")));
        let g = gap_threshold(&r("2"), &r("3"), &BigInt::from(4)).unwrap();
        assert_eq!(g.exact, Some(r("4")));
        assert!(gap_threshold(&r("8"), &r("3"), &BigInt::from(2)).is_err());
        let g = gap_threshold(&r("1"), &r("2.5"), &BigInt::from(16)).unwrap();
        assert!(g.lo <= 32.0 && 32.0 <= g.hi);
        assert!(gap_holds(&r("1"), &r("3"), &BigInt::from(10), &BigInt::from(50)));
        assert!(!gap_holds(&r("1"), &r("3"), &BigInt::from(10), &BigInt::from(49)));
        assert!(gap_holds(&r("1"), &r("2.5"), &BigInt::from(16), &BigInt::from(32)));
        assert!(!gap_holds(&r("1"), &r("2.5"), &BigInt::from(16), &BigInt::from(31)));
    }

    #[test]
    fn approximation_bound_examples() {
        let b = approximation_count_bound(3, 4.0).unwrap();
        let expect = 2f64.powi(30) * 8.0 * 9f64.ln() * (2.0 * 9f64.ln()).ln();
        assert!((b - expect).abs() < 1e-6 * expect);
        assert!((b / 2.79e10 - 1.0).abs() < 0.01);
        assert_eq!(approximation_height_floor(1.0, 4.0, 2.0).unwrap(), 8.0);
        assert!(approximation_count_bound(3, 5.0).unwrap() < b);
        assert!(approximation_count_bound(3, 2.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let z = BigInt::from(1000);
        let c = |h: i64| classify_solution(3, &z, &BigInt::from(h), &BigInt::one()).unwrap();
        assert_eq!(c(4001), SolutionClass::Large);
        assert_eq!(c(4000), SolutionClass::Large);
        assert_eq!(c(3999), SolutionClass::Medium);
        assert_eq!(c(50), SolutionClass::Medium);
        assert_eq!(c(32), SolutionClass::Medium);
        assert_eq!(c(31), SolutionClass::Small);
        assert_eq!(c(10), SolutionClass::Small);
        assert!(classify_solution(2, &z, &BigInt::one(), &BigInt::one()).is_err());
    }

    #[test]
    fn enumeration_agrees_with_direct_checks() {
        let f = Poly::from_i64(&[-2, 0, 0, 1]);
        let conds = vec![(Place::Infinity, 0, r("1/2")), (Place::Prime(5), 0, r("1/2"))];
        let mut s = ApproxSystem::new(&f, r("1"), r("2.5"), &conds, 6).unwrap();
        let sols = enumerate_solutions(&mut s, 60).unwrap();
        let mut direct = Vec::new();
        for q in 1..=60i64 {
            for p in -60..=60i64 {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let (bp, bq) = (BigInt::from(p), BigInt::from(q));
                loop {
                    match check_system(&s, &bp, &bq) {
                        Ok(rep) => {
                            if rep.holds {
                                direct.push((p, q));
                            }
                            break;
                        }
                        Err(Error::NeedsRelift { needed }) => s.relift(needed).unwrap(),
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
        direct.sort_by_key(|&(p, q)| (p.abs().max(q), p, q));
        assert_eq!(sols, direct);
        assert!(!sols.is_empty());
    }

    proptest! {
        #[test]
        fn tuple_count_matches_binomial(bi in 0usize..3, b1i in 0usize..2, t in 0u32..5) {
            let beta = r(["3", "4", "6"][bi]);
            let beta1 = r(["2.5", "3"][b1i]);
            prop_assume!(beta > beta1);
            let s = gamma_tuples(&beta, &beta1, t).unwrap();
            prop_assert_eq!(BigInt::from(s.iter().count()), s.cardinality());
            prop_assert!(s.within_power_bound());
        }

        #[test]
        fn classes_partition(h in 1i64..5000, z in 0i64..5000) {
            let c = classify_solution(3, &BigInt::from(z), &BigInt::from(h), &BigInt::one()).unwrap();
            let large = h >= 4 * z;
            let medium = !large && h * h >= z;
            prop_assert_eq!(c == SolutionClass::Large, large);
            prop_assert_eq!(c == SolutionClass::Medium, medium);
        }
    }
}

//! P-adic valuations, roots, local densities and local measures.
//!
//! Root counting modulo `P^c` walks the tree of residues `r mod P^k` with
//! `f(r) ≡ 0 mod P^k`. A node is *resolved* once `k > 2·v(f′(r))`: writing
//! `d = v(f′(r))`, the number of roots mod `P^c` above it is
//! `P^{L−k}·[v(f(r)) ≥ L]` with `L = min(c, k + d)`, by Hensel's lemma. A tree
//! whose leaves are all resolved with `k + d ≤ c` has the same count at every
//! higher level; that is what makes the local measures exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize_u64, is_prime_u64};
use crate::error::{Error, Result};
use crate::forms::{resultant, BinaryForm};
use crate::poly::Poly;

/// Largest modulus handled in i128 residue arithmetic.
const MOD_LIMIT: i128 = 1 << 62;

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{p} is not prime")))
    }
}

/// `v_P(x)` for `x ≠ 0`, `None` for `x = 0` (infinite valuation).
pub fn val_int(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    let mut v = 0;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(&bp);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// `v_P(r)`; `None` encodes `v_P(0) = ∞`.
pub fn valuation(r: &BigRational, p: u64) -> Result<Option<i64>> {
    check_prime(p)?;
    if r.is_zero() {
        return Ok(None);
    }
    let a = val_int(r.numer(), p).unwrap() as i64;
    let b = val_int(r.denom(), p).unwrap() as i64;
    Ok(Some(a - b))
}

fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

// ------------------------------------------------------------------- roots

/// A root of `f` in `ℤ_P` (or `1/ζ` for a root `ζ ∉ ℤ_P`, when `pole`) known
/// modulo `P^N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicRootApprox {
    pub prime: u64,
    pub precision: u32,
    /// In `[0, P^N)`.
    #[serde(with = "crate::json::int")]
    pub residue: BigInt,
    /// `f′(r) ≢ 0 mod P` (for pole roots: the reversed polynomial's derivative).
    pub simple: bool,
    /// The root is `1/residue`, with `residue ≡ 0 mod P`.
    pub pole: bool,
}

impl PAdicRootApprox {
    /// `f(r) ≡ 0 mod P^N` (reversed `f` for pole roots).
    pub fn verify(&self, f: &Poly) -> bool {
        let g = if self.pole { f.reversed() } else { f.clone() };
        let m = pow_big(self.prime, self.precision);
        g.eval(&self.residue).mod_floor(&m).is_zero()
    }
}

/// A residue class the branch-and-lift search could not settle within its
/// depth cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndecidedBranch {
    #[serde(with = "crate::json::int")]
    pub residue: BigInt,
    pub level: u32,
    pub pole: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRoots {
    pub roots: Vec<PAdicRootApprox>,
    pub undecided: Vec<UndecidedBranch>,
    pub depth_cap: u32,
}

/// Discriminant of a univariate integer polynomial of degree ≥ 1.
fn poly_discriminant(g: &Poly) -> BigInt {
    let n = g.degree().unwrap();
    if n == 1 {
        return BigInt::one();
    }
    let r = resultant(g, &g.derivative()) / g.leading().unwrap();
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Every root of `f` in `ℚ_P`, to precision `N`.
///
/// Roots in `ℤ_P` come first, then roots outside `ℤ_P` as poles. Branches
/// deeper than `4·(v_P(D)+1)` (D the discriminant of the squarefree part) are
/// reported in `undecided`, never dropped.
pub fn padic_roots(f: &Poly, p: u64, n: u32) -> Result<PadicRoots> {
    check_prime(p)?;
    if f.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("precision must be at least 1".into()));
    }
    let g = f.squarefree_part().primitive();
    let mut out = PadicRoots {
        roots: Vec::new(),
        undecided: Vec::new(),
        depth_cap: 0,
    };
    if g.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let vd = val_int(&poly_discriminant(&g), p).unwrap_or(0);
    let cap = 4 * (vd + 1);
    out.depth_cap = cap;
    let df = f.derivative();
    let finder = RootFinder { p, n, cap };
    finder.search(&g, false, &mut out);
    let h = g.reversed();
    if h.degree().unwrap_or(0) > 0 {
        finder.search(&h, true, &mut out);
    }
    let pb = BigInt::from(p);
    let dfr = f.reversed().derivative();
    for r in &mut out.roots {
        let d = if r.pole { &dfr } else { &df };
        r.simple = !d.eval(&r.residue).mod_floor(&pb).is_zero();
    }
    out.roots
        .sort_by(|a, b| (a.pole, &a.residue).cmp(&(b.pole, &b.residue)));
    Ok(out)
}

struct RootFinder {
    p: u64,
    n: u32,
    cap: u32,
}

impl RootFinder {
    /// Roots of the squarefree primitive `g` (only those `≡ 0 mod P` if `pole`).
    fn search(&self, g: &Poly, pole: bool, out: &mut PadicRoots) {
        let pb = BigInt::from(self.p);
        let dg = g.derivative();
        let mut stack: Vec<(BigInt, u32)> = Vec::new();
        let starts: Vec<BigInt> = if pole {
            vec![BigInt::zero()]
        } else {
            (0..self.p).map(BigInt::from).collect()
        };
        for r in starts {
            if g.eval(&r).mod_floor(&pb).is_zero() {
                stack.push((r, 1));
            }
        }
        while let Some((r, c)) = stack.pop() {
            let d = val_int(&dg.eval(&r), self.p);
            let e = val_int(&g.eval(&r), self.p);
            if let Some(d) = d.filter(|&d| d < c) {
                match e {
                    None => {
                        self.emit(g, &dg, r, d, pole, out);
                        continue;
                    }
                    Some(e) if e > 2 * d => {
                        // A unique root lies in v(x − r) > d, at distance e − d.
                        if e - d >= c {
                            self.emit(g, &dg, r, d, pole, out);
                        }
                        continue;
                    }
                    _ => {}
                }
            }
            if c >= self.cap {
                out.undecided.push(UndecidedBranch {
                    residue: r,
                    level: c,
                    pole,
                });
                continue;
            }
            let step = pow_big(self.p, c);
            let next = &step * &pb;
            for t in 0..self.p {
                let r2 = &r + &step * t;
                if g.eval(&r2).mod_floor(&next).is_zero() {
                    stack.push((r2, c + 1));
                }
            }
        }
    }

    /// Newton-lifts the root near `r` (where `v(g(r)) > 2d`, `d = v(g′)`).
    fn emit(&self, g: &Poly, dg: &Poly, r: BigInt, d: u32, pole: bool, out: &mut PadicRoots) {
        let k = self.n + 2 * d + 2;
        let modk = pow_big(self.p, k);
        let pd = pow_big(self.p, d);
        let mut x = r;
        loop {
            let fx = g.eval(&x);
            match val_int(&fx, self.p) {
                None => break,
                Some(e) if e >= self.n + d => break,
                Some(_) => {}
            }
            let u = dg.eval(&x) / &pd;
            let uinv = mod_inverse(&u, &modk);
            x = (x - (fx / &pd) * uinv).mod_floor(&modk);
        }
        let modn = pow_big(self.p, self.n);
        out.roots.push(PAdicRootApprox {
            prime: self.p,
            precision: self.n,
            residue: x.mod_floor(&modn),
            simple: false,
            pole,
        });
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// `min(1, |ζ − p/q|_P) = P^{−exponent}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicDistance {
    pub prime: u64,
    /// `exponent ≥ 0`; an upper bound on the distance when not `exact`.
    pub exponent: u32,
    pub exact: bool,
}

impl PadicDistance {
    pub fn value(&self) -> BigRational {
        BigRational::new(BigInt::one(), pow_big(self.prime, self.exponent))
    }
}

/// `min(1, |ζ − p/q|_P)` from the residue of `ζ`.
///
/// The result is exact when the valuation of the difference is below the
/// available precision; otherwise it is the upper bound `P^{−N'}` for the
/// precision `N'` that the residue determines, with `exact = false`.
pub fn padic_distance(z: &PAdicRootApprox, p: &BigInt, q: &BigInt) -> Result<PadicDistance> {
    if q.is_zero() {
        return Err(Error::InvalidInput("p/q with q = 0".into()));
    }
    let pr = z.prime;
    let n = z.precision;
    let modn = pow_big(pr, n);
    let vq = val_int(q, pr).unwrap();
    let vp = val_int(p, pr);
    let one = |exact| {
        Ok(PadicDistance {
            prime: pr,
            exponent: 0,
            exact,
        })
    };
    if !z.pole {
        if vq > vp.unwrap_or(u32::MAX) {
            // |p/q|_P > 1 ≥ |ζ|_P
            return one(true);
        }
        // v(ζ − p/q) = v(qζ − p) − v(q)
        let diff = (q * &z.residue - p).mod_floor(&modn);
        return Ok(match val_int(&diff, pr) {
            Some(v) if v < n => PadicDistance {
                prime: pr,
                exponent: v.saturating_sub(vq),
                exact: true,
            },
            _ => PadicDistance {
                prime: pr,
                exponent: n.saturating_sub(vq),
                exact: false,
            },
        });
    }
    // ζ = 1/w with v(w) ≥ 1.
    let vw = match val_int(&z.residue, pr) {
        Some(v) if v < n => v,
        _ => return Err(Error::NeedsRelift { needed: n + 1 }),
    };
    if vq == 0 {
        // |ζ|_P > 1 ≥ |p/q|_P
        return one(true);
    }
    // ζ − p/q = (q − p·w)/(w·q)
    let diff = (q - p * &z.residue).mod_floor(&modn);
    let shift = vw + vq;
    Ok(match val_int(&diff, pr) {
        Some(v) if v < n => PadicDistance {
            prime: pr,
            exponent: v.saturating_sub(shift),
            exact: true,
        },
        _ => PadicDistance {
            prime: pr,
            exponent: n.saturating_sub(shift),
            exact: false,
        },
    })
}

// --------------------------------------------------------- root counting

/// Counts roots of an integer polynomial modulo `P^c` by lift refinement.
struct LiftCounter {
    p: i128,
    c: u32,
    m: i128,
    coeffs: Vec<i128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LiftCount {
    count: u128,
    /// The count is the same modulo `P^{c'}` for every `c' ≥ c`.
    stable: bool,
}

impl LiftCounter {
    fn new(f: &Poly, p: u64, c: u32) -> Option<Self> {
        let p = p as i128;
        let mut m: i128 = 1;
        for _ in 0..c {
            m = m.checked_mul(p).filter(|&m| m < MOD_LIMIT)?;
        }
        let bm = BigInt::from(m);
        let coeffs = f.coeffs().iter().map(|a| a.mod_floor(&bm).to_i128().unwrap()).collect();
        Some(Self { p, c, m, coeffs })
    }

    fn val(&self, x: i128) -> u32 {
        let mut x = x.rem_euclid(self.m);
        if x == 0 {
            return self.c;
        }
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    fn taylor(&self, r: i128) -> Vec<i128> {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i..n - 1).rev() {
                a[j] = (a[j] + r * a[j + 1]).rem_euclid(self.m);
            }
        }
        a
    }

    fn pow(&self, e: u32) -> i128 {
        self.p.pow(e)
    }

    /// Roots mod `P^c`; with `zero_only`, only those `≡ 0 mod P`.
    fn count(&self, zero_only: bool) -> LiftCount {
        if self.c == 0 {
            return LiftCount {
                count: 1,
                stable: false,
            };
        }
        let mut acc = LiftCount { count: 0, stable: true };
        if zero_only {
            if self.coeffs.first().is_none_or(|&a| a % self.p == 0) {
                self.visit(0, 1, &mut acc);
            }
        } else {
            self.visit(0, 0, &mut acc);
        }
        acc
    }

    fn visit(&self, r: i128, k: u32, acc: &mut LiftCount) {
        if k == self.c {
            acc.count += 1;
            acc.stable = false;
            return;
        }
        let b = self.taylor(r);
        let vals: Vec<u32> = b.iter().map(|&x| self.val(x)).collect();
        let all = vals
            .iter()
            .enumerate()
            .all(|(i, &v)| v as u64 + k as u64 * i as u64 >= self.c as u64);
        if all {
            acc.count += self.pow(self.c - k) as u128;
            acc.stable = false;
            return;
        }
        if k >= 1 && vals.len() > 1 {
            let d = vals[1];
            if d < self.c && 2 * d < k {
                let l = self.c.min(k + d);
                if k + d > self.c {
                    acc.stable = false;
                }
                if vals[0] >= l {
                    acc.count += self.pow(l - k) as u128;
                }
                return;
            }
        }
        let step = self.pow(k);
        let next = step * self.p;
        for t in 0..self.p {
            // f(r + t·P^k) from the Taylor expansion at r.
            let y = (t * step) % self.m;
            let v = b.iter().rev().fold(0i128, |acc, &a| (acc * y + a).rem_euclid(self.m));
            if v % next == 0 {
                self.visit(r + t * step, k + 1, acc);
            }
        }
    }
}

/// `#{s mod P^c : f(s) ≡ 0}` (restricted to `s ≡ 0 mod P` if `zero_only`).
fn root_count(f: &Poly, p: u64, c: u32, zero_only: bool) -> Result<LiftCount> {
    let lc = LiftCounter::new(f, p, c).ok_or_else(|| Error::Overflow(format!("modulus {p}^{c} exceeds 2^62")))?;
    Ok(lc.count(zero_only))
}

/// `U(c)`: pairs mod `P^c`, not both divisible by `P`, with `F ≡ 0 mod P^c`.
fn primitive_zero_pairs(f: &BinaryForm, p: u64, c: u32) -> Result<(u128, bool)> {
    let r1 = root_count(&f.dehomogenize(), p, c, false)?;
    let r2 = root_count(&f.dehomogenize_y(), p, c, true)?;
    let phi = (p as u128 - 1) * (p as u128).pow(c - 1);
    Ok((phi * (r1.count + r2.count), r1.stable && r2.stable))
}

/// `ρ_F(P^e)`.
fn rho_prime_power(f: &BinaryForm, p: u64, e: u32) -> Result<u128> {
    let n = f.degree() as u32;
    let w0 = e.div_ceil(n);
    let pu = p as u128;
    let mut total = pu.pow(2 * (e - w0));
    for w in 0..w0 {
        let (u, _) = primitive_zero_pairs(f, p, e - n * w)?;
        total += pu.pow(2 * (n - 1) * w) * u;
    }
    Ok(total)
}

/// `ρ_F(m) = #{(i,j) ∈ {0,…,m−1}² : F(i,j) ≡ 0 mod m}`, by CRT over prime
/// powers and lift refinement inside each.
pub fn rho(f: &BinaryForm, m: u64) -> Result<u128> {
    if m == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if m as i128 >= MOD_LIMIT {
        return Err(Error::Overflow(format!("modulus {m} exceeds 2^62")));
    }
    let mut total: u128 = 1;
    for (p, e) in factorize_u64(m) {
        total *= rho_prime_power(f, p, e)?;
    }
    Ok(total)
}

/// `ρ_F(m)` by enumerating all `m²` pairs.
pub fn rho_brute(f: &BinaryForm, m: u64) -> u128 {
    let bm = BigInt::from(m);
    let mut count = 0;
    for i in 0..m {
        for j in 0..m {
            if f.eval_i64(i as i64, j as i64).mod_floor(&bm).is_zero() {
                count += 1;
            }
        }
    }
    count
}

/// ρ values over a list of moduli, for export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDensityTable {
    pub form: BinaryForm,
    pub rows: Vec<(u64, u128)>,
}

impl LocalDensityTable {
    pub fn build(form: &BinaryForm, moduli: &[u64]) -> Result<Self> {
        let rows = moduli.iter().map(|&m| Ok((m, rho(form, m)?))).collect::<Result<_>>()?;
        Ok(Self {
            form: form.clone(),
            rows,
        })
    }

    /// `m,count,denominator` lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,count,denominator\n");
        for (m, c) in &self.rows {
            s.push_str(&format!("{m},{c},{}\n", *m as u128 * *m as u128));
        }
        s
    }
}

// -------------------------------------------------------- local measures

/// Tail masses `T_c = μ{(x,y) primitive at P : v_P(F(x,y)) ≥ c}` for
/// `c ≤ stable`, after which `T_{c+1} = T_c / P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalProfile {
    pub prime: u64,
    pub degree: usize,
    pub stable: u32,
    #[serde(with = "crate::json::vec_rat")]
    pub tails: Vec<BigRational>,
}

impl LocalProfile {
    pub fn new(f: &BinaryForm, p: u64) -> Result<Self> {
        check_prime(p)?;
        if f.discriminant()?.is_zero() {
            return Err(Error::Unsupported(
                "local measures need a form without repeated factors".into(),
            ));
        }
        let pb = BigInt::from(p);
        let p2 = BigInt::from(p * p);
        let mut tails = vec![BigRational::new(&p2 - 1, p2.clone())];
        let mut c = 1;
        loop {
            let (u, stable) = primitive_zero_pairs(f, p, c)
                .map_err(|_| Error::Unsupported(format!("root counts at {p} do not settle below 2^62")))?;
            tails.push(BigRational::new(BigInt::from(u), pb.pow(2 * c)));
            if stable {
                return Ok(Self {
                    prime: p,
                    degree: f.degree(),
                    stable: c,
                    tails,
                });
            }
            c += 1;
        }
    }

    /// `T_j`.
    pub fn tail(&self, j: u32) -> BigRational {
        if j <= self.stable {
            return self.tails[j as usize].clone();
        }
        let drop = num_traits::pow(BigInt::from(self.prime), (j - self.stable) as usize);
        &self.tails[self.stable as usize] / BigRational::from_integer(drop)
    }

    /// `m_{P,j} = T_j − T_{j+1}`.
    pub fn measure(&self, j: u32) -> BigRational {
        self.tail(j) - self.tail(j + 1)
    }

    /// `P^{2j/n} m_{P,j}`.
    fn weighted(&self, j: u32) -> f64 {
        let w = (self.prime as f64).powf(2.0 * j as f64 / self.degree as f64);
        w * self.measure(j).to_f64().unwrap_or(0.0)
    }

    /// `Σ_{j>J} P^{2j/n} m_{P,j}`, summed exactly in closed form past the
    /// stable level and padded for rounding.
    pub fn remainder(&self, jmax: u32) -> f64 {
        let p = self.prime as f64;
        let start = (jmax + 1).max(self.stable);
        let mut s: f64 = (jmax + 1..start).map(|j| self.weighted(j)).sum();
        let ratio = p.powf(2.0 / self.degree as f64 - 1.0);
        s += self.weighted(start) / (1.0 - ratio);
        s * (1.0 + 1e-9)
    }
}

/// `m_{P,j}`: measure of primitive `(x,y) ∈ ℤ_P²` with `v_P(F(x,y)) = j`.
pub fn local_measure(f: &BinaryForm, p: u64, j: u32) -> Result<BigRational> {
    Ok(LocalProfile::new(f, p)?.measure(j))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub prime: u64,
    pub truncation: u32,
    /// `Σ_{j≤J} P^{2j/n} m_{P,j}`.
    pub value: f64,
    /// Upper bound for the omitted terms.
    pub tail_bound: f64,
    #[serde(with = "crate::json::vec_rat")]
    pub measures: Vec<BigRational>,
}

/// Local factor `s_P = Σ_j P^{2j/n} m_{P,j}`, truncated at `J`.
pub fn local_factor(f: &BinaryForm, p: u64, jmax: u32) -> Result<LocalFactor> {
    if f.degree() < 3 {
        return Err(Error::InvalidDegree("local factors need degree ≥ 3".into()));
    }
    let prof = LocalProfile::new(f, p)?;
    let measures: Vec<BigRational> = (0..=jmax).map(|j| prof.measure(j)).collect();
    let value = (0..=jmax).map(|j| prof.weighted(j)).sum();
    Ok(LocalFactor {
        prime: p,
        truncation: jmax,
        value,
        tail_bound: prof.remainder(jmax),
        measures,
    })
}

/// Whether `F` has a non-trivial zero over `ℚ_P`.
pub fn has_padic_zero(f: &BinaryForm, p: u64) -> Result<bool> {
    if f.coeffs()[0].is_zero() {
        return Ok(true);
    }
    let roots = padic_roots(&f.dehomogenize(), p, 1)?;
    if !roots.roots.is_empty() {
        return Ok(true);
    }
    if roots.undecided.is_empty() {
        Ok(false)
    } else {
        Err(Error::Undecided(format!("zeros of the form over Q_{p}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(12, 1), 2).unwrap(), Some(2));
        assert_eq!(valuation(&rat(3, 4), 2).unwrap(), Some(-2));
        assert_eq!(valuation(&rat(5, 7), 3).unwrap(), Some(0));
        assert_eq!(valuation(&rat(0, 1), 3).unwrap(), None);
        assert!(valuation(&rat(1, 1), 4).is_err());
    }

    #[test]
    fn roots_examples() {
        let f = Poly::from_i64(&[-2, 0, 0, 1]);
        let r = padic_roots(&f, 5, 3).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert_eq!(r.roots[0].residue, BigInt::from(53));
        assert!(r.roots[0].simple);
        assert!(padic_roots(&f, 7, 1).unwrap().roots.is_empty());
        let g = Poly::from_i64(&[0, 1, 1]);
        let r = padic_roots(&g, 3, 2).unwrap();
        let res: Vec<_> = r.roots.iter().map(|x| x.residue.clone()).collect();
        assert_eq!(res, vec![BigInt::from(0), BigInt::from(8)]);
    }

    #[test]
    fn roots_singular_and_poles() {
        // x² − 17 over ℤ₂: 17 ≡ 1 mod 8, two roots, f′ ≡ 0 mod 2
        let f = Poly::from_i64(&[-17, 0, 1]);
        let r = padic_roots(&f, 2, 10).unwrap();
        assert_eq!(r.roots.len(), 2);
        for z in &r.roots {
            assert!(z.verify(&f));
            assert!(!z.simple);
        }
        // 5x − 1: root 1/5 is a pole at 5
        let g = Poly::from_i64(&[-1, 5]);
        let r = padic_roots(&g, 5, 4).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!(r.roots[0].pole);
        assert_eq!(r.roots[0].residue, BigInt::from(5));
        // repeated factor: (x − 3)²(x + 1) at 2
        let h = Poly::from_i64(&[-3, 1]).pow(2).mul(&Poly::from_i64(&[1, 1]));
        let r = padic_roots(&h, 2, 5).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!(r.roots.iter().all(|z| z.verify(&h)));
    }

    #[test]
    fn distance_examples() {
        let z = PAdicRootApprox {
            prime: 5,
            precision: 3,
            residue: 53.into(),
            simple: true,
            pole: false,
        };
        let one = BigInt::one();
        let d = padic_distance(&z, &53.into(), &one).unwrap();
        assert_eq!((d.exponent, d.exact), (3, false));
        let d = padic_distance(&z, &3.into(), &one).unwrap();
        assert_eq!((d.exponent, d.exact), (2, true));
        assert_eq!(d.value(), rat(1, 25));
        let d = padic_distance(&z, &1.into(), &one).unwrap();
        assert_eq!((d.exponent, d.exact), (0, true));
        let d = padic_distance(&z, &1.into(), &5.into()).unwrap();
        assert_eq!((d.exponent, d.exact), (0, true));
        assert!(padic_distance(&z, &1.into(), &0.into()).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&form(&[0, 1, 1, 0]), 2).unwrap(), 4);
        assert_eq!(rho(&form(&[1, 0, 0, -2]), 3).unwrap(), 3);
        assert_eq!(rho(&form(&[1, 0, 0, -2]), 4).unwrap(), 4);
        assert_eq!(rho(&form(&[1, 0, 0, -2]), 1).unwrap(), 1);
    }

    #[test]
    fn rho_matches_brute_force() {
        let forms = [
            form(&[1, 0, 0, -2]),
            form(&[0, 1, 1, 0]),
            form(&[1, 0, 0, 0]),
            form(&[2, 0, 4, 0, 6]),
            form(&[3, -1, 7, 5]),
        ];
        for f in &forms {
            for m in 1..=40 {
                assert_eq!(rho(f, m).unwrap(), rho_brute(f, m), "{f} mod {m}");
            }
        }
    }

    #[test]
    fn local_measure_examples() {
        let f = form(&[1, 0, 0, -2]);
        assert_eq!(local_measure(&f, 7, 0).unwrap(), rat(48, 49));
        assert_eq!(local_measure(&f, 7, 1).unwrap(), rat(0, 1));
        assert_eq!(local_measure(&f, 7, 5).unwrap(), rat(0, 1));
        // one simple root of x³ − 2 at 5: T_c = (4/5)·5^{−c}
        assert_eq!(local_measure(&f, 5, 0).unwrap(), rat(24, 25) - rat(4, 25));
        assert_eq!(local_measure(&f, 5, 2).unwrap(), rat(16, 625));
        assert!(local_measure(&form(&[1, 0, 0, 0]), 5, 0).is_err());
    }

    #[test]
    fn local_measure_matches_enumeration() {
        // count primitive residues mod P^{j+1} with exact valuation j
        for (f, p) in [
            (form(&[1, 0, 0, -2]), 3u64),
            (form(&[0, 1, 1, 0]), 2),
            (form(&[1, 1, 0, 4]), 2),
        ] {
            for j in 0..3u32 {
                let m = p.pow(j + 1) as i64;
                let pj = BigInt::from(p.pow(j));
                let pj1 = BigInt::from(p.pow(j + 1));
                let mut count = 0i64;
                for a in 0..m {
                    for b in 0..m {
                        if a % p as i64 == 0 && b % p as i64 == 0 {
                            continue;
                        }
                        let v = f.eval_i64(a, b);
                        if v.mod_floor(&pj).is_zero() && !v.mod_floor(&pj1).is_zero() {
                            count += 1;
                        }
                    }
                }
                assert_eq!(local_measure(&f, p, j).unwrap(), rat(count, m * m), "{f} at {p}, j={j}");
            }
        }
    }

    #[test]
    fn local_factor_examples() {
        let f = form(&[1, 0, 0, -2]);
        let s7 = local_factor(&f, 7, 3).unwrap();
        assert!((s7.value - 48.0 / 49.0).abs() < 1e-15);
        assert_eq!(s7.tail_bound, 0.0);
        let s5 = local_factor(&f, 5, 6).unwrap();
        // m_j = (16/25)·5^{−j} for j ≥ 1: remainder is (16/25)·Σ_{j≥7} 5^{−j/3}
        let r = 16.0 / 25.0 * 5f64.powf(-7.0 / 3.0) / (1.0 - 5f64.powf(-1.0 / 3.0));
        assert!((s5.tail_bound - r).abs() < 1e-8 * r);
        assert!(s5.tail_bound >= r);
        let s0 = local_factor(&f, 5, 0).unwrap();
        assert!((s0.value - 20.0 / 25.0).abs() < 1e-15);
        let deep = local_factor(&f, 5, 40).unwrap();
        assert!(deep.value >= s5.value);
        let (a, b) = (deep.value + deep.tail_bound, s5.value + s5.tail_bound);
        assert!((a - b).abs() < 1e-8 * b);
    }

    #[test]
    fn padic_zero_detection() {
        let f = form(&[1, 0, 0, -2]);
        assert!(has_padic_zero(&f, 5).unwrap());
        assert!(!has_padic_zero(&f, 7).unwrap());
        // v(x³) = 1 is impossible, and cubes mod 9 avoid 2
        assert!(!has_padic_zero(&f, 2).unwrap());
        assert!(!has_padic_zero(&f, 3).unwrap());
        assert!(has_padic_zero(&f, 11).unwrap());
        assert!(has_padic_zero(&form(&[0, 1, 1, 0]), 7).unwrap());
    }

    fn small_form() -> impl Strategy<Value = BinaryForm> {
        prop::collection::vec(-9i64..=9, 4..=5).prop_filter_map("non-zero", |c| BinaryForm::from_i64(&c).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rho_is_multiplicative(f in small_form(), a in 1u64..60, b in 1u64..60) {
            prop_assume!(a.gcd(&b) == 1);
            prop_assert_eq!(rho(&f, a * b).unwrap(), rho(&f, a).unwrap() * rho(&f, b).unwrap());
        }

        #[test]
        fn simple_roots_relift(c in prop::collection::vec(-30i64..=30, 2..=5), pi in 0usize..5, n in 1u32..6) {
            let f = Poly::from_i64(&c);
            prop_assume!(!f.is_zero());
            let p = [2u64, 3, 5, 7, 11][pi];
            let lo = padic_roots(&f, p, n).unwrap();
            let hi = padic_roots(&f, p, n + 1).unwrap();
            let m = pow_big(p, n);
            for z in &lo.roots {
                prop_assert!(z.verify(&f));
                if z.simple {
                    prop_assert!(hi.roots.iter().any(|w| w.pole == z.pole && w.residue.mod_floor(&m) == z.residue));
                }
            }
        }

        #[test]
        fn measures_sum_to_unit_mass(f in small_form(), pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            prop_assume!(!f.discriminant().unwrap().is_zero());
            let prof = LocalProfile::new(&f, p).unwrap();
            let total: BigRational = (0..12).map(|j| prof.measure(j)).sum();
            let unit = BigRational::new(BigInt::from(p * p - 1), BigInt::from(p * p));
            prop_assert!(total <= unit);
            prop_assert_eq!(&unit - total, prof.tail(12));
        }
    }
}

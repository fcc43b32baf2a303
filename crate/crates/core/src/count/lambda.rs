//! The k-free density `λ_{F,k} = ∏_P (1 − ρ_F(P^k)/P^{2k})`.
//!
//! Tail bound. For `P ∤ D(F)` the zeros of `F` on `ℙ¹(𝔽_P)` are simple, so
//! each of them (at most `n`) lifts uniquely. Sorting pairs mod `P^k` by
//! `w = min(v_P(a), v_P(b))`: pairs with `nw ≥ k` always count, a fraction
//! `P^{−2w₀}` with `w₀ = ⌈k/n⌉`; for `w < w₀` the primitive part must be a
//! zero mod `P^{k−nw}`, a fraction at most `n·P^{−(k−nw)}` of the pairs at
//! scale `P^{−2w}`. Hence
//!
//! `ρ_F(P^k)/P^{2k} ≤ b(P) = P^{−2w₀} + n Σ_{w<w₀} P^{(n−2)w−k}`,
//!
//! every term being `c·P^{−e}` with `e ≥ (2k+n−2)/n > 1`. With
//! `Σ_{m>x} m^{−e} ≤ x^{1−e}/(e−1)` the omitted factors multiply to at least
//! `1 − δ`, `δ = Σ_terms c·Pmax^{1−e}/(e−1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, primes_up_to};
use crate::error::{Error, Result};
use crate::exec;
use crate::forms::BinaryForm;
use crate::padic::{rho, val_int};

/// Largest prime the tail bound is validated against.
const VALIDATION_LIMIT: u64 = 100;

/// `1 − ρ_F(P^k)/P^{2k}`, exactly.
pub fn lambda_factor(form: &BinaryForm, p: u64, k: u32) -> Result<BigRational> {
    let m = p
        .checked_pow(k)
        .filter(|&m| m < 1 << 62)
        .ok_or_else(|| Error::Overflow(format!("{p}^{k} exceeds 2^62")))?;
    let r = rho(form, m)?;
    let m2 = BigInt::from(m) * BigInt::from(m);
    Ok(BigRational::one() - BigRational::new(BigInt::from(r), m2))
}

/// Errors unless no `P^k` divides every value `F(a, b)`.
///
/// A form that is non-zero mod `P` vanishes on all of `𝔽_P²` only if `P ≤ n`,
/// so beyond `n` only primes dividing the content can be fixed divisors, and
/// for those `P^k | F(a, b)` for all `(a, b)` iff `P^k` divides the content.
pub fn check_fixed_divisors(form: &BinaryForm, k: u32) -> Result<()> {
    let n = form.degree() as u64;
    let content = form.content();
    let mut suspects: Vec<u64> = primes_up_to(n);
    for (p, _) in factorize(&content)?.factors {
        if let Some(p) = p.to_u64() {
            if p > n {
                suspects.push(p);
            }
        } else {
            return Err(Error::Unsupported("content has a prime beyond 64 bits".into()));
        }
    }
    for p in suspects {
        let fixed = if p > n {
            val_int(&content, p).unwrap_or(u32::MAX) >= k
        } else {
            lambda_factor(form, p, k)?.is_zero()
        };
        if fixed {
            return Err(Error::Unsupported(format!(
                "{p}^{k} divides F(a, b) for all integers a, b"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaK {
    pub k: u32,
    pub pmax: u64,
    /// `∏_{P ≤ Pmax} (1 − ρ_F(P^k)/P^{2k})`, times the exact factors of any
    /// primes above `Pmax` that divide the discriminant.
    pub partial: f64,
    /// `δ` with `partial·(1 − δ) ≤ λ_{F,k} ≤ partial`; `None` if the bound
    /// could not be validated.
    pub tail_bound: Option<f64>,
    /// Exact factors for `P ≤ min(Pmax, 100)`.
    #[serde(with = "crate::json::keyed_rat")]
    pub small_factors: Vec<(u64, BigRational)>,
}

impl LambdaK {
    pub fn lo(&self) -> Option<f64> {
        self.tail_bound.map(|d| self.partial * (1.0 - d))
    }
}

/// The per-prime bound `b(P)` from the module docs, as `(c, e)` terms.
fn bound_terms(n: u32, k: u32) -> Vec<(f64, f64)> {
    let w0 = k.div_ceil(n);
    let mut t = vec![(1.0, 2.0 * w0 as f64)];
    for w in 0..w0 {
        t.push((n as f64, k as f64 - ((n - 2) * w) as f64));
    }
    t
}

/// `λ_{F,k}` truncated at `Pmax`, with a validated tail bound.
pub fn lambda_k(form: &BinaryForm, k: u32, pmax: u64) -> Result<LambdaK> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    if form.degree() < 3 {
        return Err(Error::InvalidDegree("degree must be at least 3".into()));
    }
    check_fixed_divisors(form, k)?;
    let n = form.degree() as u32;
    let disc = form.discriminant()?;
    let primes = primes_up_to(pmax);
    let factors = exec::map_ordered(primes.clone(), |p| lambda_factor(form, p, k));
    let mut partial = 1.0f64;
    let mut small_factors = Vec::new();
    for (&p, f) in primes.iter().zip(factors) {
        let f = f?;
        if !f.is_positive() {
            return Err(Error::Unsupported(format!("factor at {p} is not positive")));
        }
        partial *= f.to_f64().unwrap_or(0.0);
        if p <= VALIDATION_LIMIT {
            small_factors.push((p, f));
        }
    }
    let terms = bound_terms(n, k);
    let b = |p: f64| terms.iter().map(|&(c, e)| c * p.powf(-e)).sum::<f64>();
    let mut valid = !disc.is_zero();
    // Validate b(P) against ρ for small unramified primes.
    for p in primes_up_to(VALIDATION_LIMIT) {
        if !valid {
            break;
        }
        if val_int(&disc, p).unwrap_or(1) > 0 {
            continue;
        }
        let f = lambda_factor(form, p, k)?;
        let ratio = (BigRational::one() - f).to_f64().unwrap_or(f64::INFINITY);
        if ratio > b(p as f64) * (1.0 + 1e-12) {
            valid = false;
        }
    }
    // Ramified primes above Pmax are included exactly.
    if valid {
        match factorize(&disc) {
            Ok(fz) => {
                for (p, _) in fz.factors {
                    let p = p.to_u64().filter(|&p| p > pmax);
                    if let Some(p) = p {
                        match lambda_factor(form, p, k) {
                            Ok(f) => partial *= f.to_f64().unwrap_or(0.0),
                            Err(_) => valid = false,
                        }
                    }
                }
            }
            Err(_) => valid = false,
        }
    }
    let tail_bound = valid.then(|| {
        let x = pmax.max(1) as f64;
        let delta: f64 = terms.iter().map(|&(c, e)| c * x.powf(1.0 - e) / (e - 1.0)).sum();
        delta.min(1.0) * (1.0 + 1e-12)
    });
    Ok(LambdaK {
        k,
        pmax,
        partial,
        tail_bound,
        small_factors,
    })
}

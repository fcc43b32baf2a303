//! Explicit bounds for the number and size of solutions, and a checker that
//! compares enumerated counts against them.
//!
//! Values whose natural log exceeds [`LOG_THRESHOLD`] are carried as logs;
//! comparisons against them happen in the log domain.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::approx::approximation_count_bound;
use crate::error::{Error, Result};

/// Natural log above which a value is stored in log form (about `10^304`).
pub const LOG_THRESHOLD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    /// `(c₁nH)^{√n} + (c₂n)^{t+1}` solutions of a Thue–Mahler equation.
    TmAbsoluteConstants,
    /// `64·n^{ω(m)+1}` primitive solutions of `F = m`.
    #[serde(rename = "thue_omega_64")]
    ThueOmega64,
    /// `c₀·n^{ω(m)+1}` primitive solutions of `F = m`.
    ThueOmegaC0,
    /// `4200·n^{ω(g)+1}` solutions of `|F| = g` with `ω(g)` the prime count.
    #[serde(rename = "thue_omega_4200")]
    ThueOmega4200,
    /// `2·(10⁵n)^{t+1}` solutions of a Thue–Mahler equation.
    TmCount,
    /// `7^{2t+4}` solutions of `x + y = 1` in S-units.
    SunitCount,
    /// `2^{16(r+1)}` solutions of `ax + by = 1` in a group of rank `r`.
    WeightedSunitRank,
    /// `2³⁰δ⁻³·ln(3n)·ln(δ⁻¹ ln 3n)` large approximations, `δ = 1 − 2/β₁`.
    ApproximationCount,
    /// Some `S` of size `t` has `exp((4 − ε)(t/ln t)^{1/2})` S-unit solutions.
    SunitLower,
    /// Some `S` of size `t` has `exp(t^{2−√2−ε})` S-unit solutions.
    SunitLowerImproved,
    /// `ln|p, q| < c(n)·H^{2n−2}·(ln H)^{2n−1}·ln M`,
    /// `c(n) = 3^{3(n+9)}·n^{18(n+1)}`.
    ThueHeight,
}

impl BoundName {
    pub const ALL: [BoundName; 11] = [
        BoundName::TmAbsoluteConstants,
        BoundName::ThueOmega64,
        BoundName::ThueOmegaC0,
        BoundName::ThueOmega4200,
        BoundName::TmCount,
        BoundName::SunitCount,
        BoundName::WeightedSunitRank,
        BoundName::ApproximationCount,
        BoundName::SunitLower,
        BoundName::SunitLowerImproved,
        BoundName::ThueHeight,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::TmAbsoluteConstants => "tm_absolute_constants",
            BoundName::ThueOmega64 => "thue_omega_64",
            BoundName::ThueOmegaC0 => "thue_omega_c0",
            BoundName::ThueOmega4200 => "thue_omega_4200",
            BoundName::TmCount => "tm_count",
            BoundName::SunitCount => "sunit_count",
            BoundName::WeightedSunitRank => "weighted_sunit_rank",
            BoundName::ApproximationCount => "approximation_count",
            BoundName::SunitLower => "sunit_lower",
            BoundName::SunitLowerImproved => "sunit_lower_improved",
            BoundName::ThueHeight => "thue_height",
        }
    }

    pub fn side(&self) -> Side {
        match self {
            BoundName::SunitLower | BoundName::SunitLowerImproved => Side::LowerCount,
            BoundName::ThueHeight => Side::HeightBound,
            _ => Side::UpperCount,
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown bound {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    UpperCount,
    LowerCount,
    HeightBound,
}

/// Parameters of a bound; each formula reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundValue {
    Exact(#[serde(with = "crate::json::int")] BigInt),
    Real(f64),
    /// Natural log of the value.
    Log(f64),
}

impl BoundValue {
    pub fn ln(&self) -> f64 {
        match self {
            BoundValue::Exact(v) => big_ln(v),
            BoundValue::Real(x) => x.ln(),
            BoundValue::Log(l) => *l,
        }
    }

    /// `observed ≤ value`, decided exactly where the value is exact.
    pub fn dominates(&self, observed: u64) -> bool {
        match self {
            BoundValue::Exact(v) => BigInt::from(observed) <= *v,
            BoundValue::Real(x) => (observed as f64) <= *x,
            BoundValue::Log(l) => observed == 0 || (observed as f64).ln() <= *l,
        }
    }
}

fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: BoundName,
    pub params: BoundParams,
    pub side: Side,
    pub value: BoundValue,
    /// `ln c(n)` for the height bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_constant: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, what: &str, name: BoundName) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("{name} requires parameter {what}")))
}

fn degree(p: &BoundParams, name: BoundName) -> Result<u32> {
    let n = need(p.n, "n", name)?;
    if n < 3 {
        return Err(Error::Domain(format!("{name} requires n ≥ 3, got {n}")));
    }
    Ok(n)
}

fn positive(v: Option<f64>, what: &str, name: BoundName) -> Result<f64> {
    let x = need(v, what, name)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("{name} requires {what} > 0, got {x}")));
    }
    Ok(x)
}

fn at_least(v: Option<f64>, lo: f64, what: &str, name: BoundName) -> Result<f64> {
    let x = need(v, what, name)?;
    if !(x >= lo && x.is_finite()) {
        return Err(Error::Domain(format!("{name} requires {what} ≥ {lo}, got {x}")));
    }
    Ok(x)
}

/// `coef · base^exp`, exact while small and as a log beyond the threshold.
fn exact_power(coef: u64, base: u64, exp: u64) -> BoundValue {
    let ln = (coef as f64).ln() + exp as f64 * (base as f64).ln();
    if ln > LOG_THRESHOLD {
        return BoundValue::Log(ln);
    }
    BoundValue::Exact(BigInt::from(coef) * BigInt::from(base).pow(exp as u32))
}

fn real_or_log(ln: f64) -> BoundValue {
    if ln > LOG_THRESHOLD {
        BoundValue::Log(ln)
    } else {
        BoundValue::Real(ln.exp())
    }
}

/// `ln(eˣ + eʸ)`.
fn log_add(x: f64, y: f64) -> f64 {
    let (a, b) = if x >= y { (x, y) } else { (y, x) };
    a + (b - a).exp().ln_1p()
}

/// `ln c(n) = 3(n + 9)·ln 3 + 18(n + 1)·ln n`.
pub fn ln_height_constant(n: u32) -> f64 {
    let n = n as f64;
    3.0 * (n + 9.0) * 3f64.ln() + 18.0 * (n + 1.0) * n.ln()
}

/// `c(n) = 3^{3(n+9)}·n^{18(n+1)}`, exactly.
pub fn height_constant(n: u32) -> BigInt {
    BigInt::from(3u32).pow(3 * (n + 9)) * BigInt::from(n).pow(18 * (n + 1))
}

pub fn eval_bound(name: BoundName, params: &BoundParams) -> Result<Bound> {
    let p = params;
    let mut ln_constant = None;
    let value = match name {
        BoundName::TmAbsoluteConstants => {
            let n = degree(p, name)? as f64;
            let h = at_least(p.h, 1.0, "H", name)?;
            let t = need(p.t, "t", name)? as f64;
            let c1 = positive(p.c1, "c1", name)?;
            let c2 = positive(p.c2, "c2", name)?;
            let a = n.sqrt() * (c1 * n * h).ln();
            let b = (t + 1.0) * (c2 * n).ln();
            real_or_log(log_add(a, b))
        }
        BoundName::ThueOmega64 | BoundName::ThueOmega4200 => {
            let n = degree(p, name)?;
            let w = need(p.omega, "omega", name)?;
            let c = if name == BoundName::ThueOmega64 { 64 } else { 4200 };
            exact_power(c, n as u64, w as u64 + 1)
        }
        BoundName::ThueOmegaC0 => {
            let n = degree(p, name)? as f64;
            let w = need(p.omega, "omega", name)? as f64;
            let c0 = positive(p.c0, "c0", name)?;
            real_or_log(c0.ln() + (w + 1.0) * n.ln())
        }
        BoundName::TmCount => {
            let n = degree(p, name)?;
            let t = need(p.t, "t", name)?;
            exact_power(2, 100_000 * n as u64, t as u64 + 1)
        }
        BoundName::SunitCount => {
            let t = need(p.t, "t", name)?;
            exact_power(1, 7, 2 * t as u64 + 4)
        }
        BoundName::WeightedSunitRank => {
            let r = need(p.r, "r", name)?;
            exact_power(1, 2, 16 * (r as u64 + 1))
        }
        BoundName::ApproximationCount => {
            let n = degree(p, name)?;
            let b = need(p.beta1, "beta1", name)?;
            BoundValue::Real(approximation_count_bound(n, b)?)
        }
        BoundName::SunitLower => {
            let t = need(p.t, "t", name)?;
            if t < 2 {
                return Err(Error::Domain(format!("{name} requires t ≥ 2, got {t}")));
            }
            let e = need(p.eps, "eps", name)?;
            if !(e > 0.0 && e < 4.0) {
                return Err(Error::Domain(format!("{name} requires 0 < eps < 4, got {e}")));
            }
            let t = t as f64;
            real_or_log((4.0 - e) * (t / t.ln()).sqrt())
        }
        BoundName::SunitLowerImproved => {
            let t = need(p.t, "t", name)?;
            if t < 2 {
                return Err(Error::Domain(format!("{name} requires t ≥ 2, got {t}")));
            }
            let e = positive(p.eps, "eps", name)?;
            real_or_log((t as f64).powf(2.0 - std::f64::consts::SQRT_2 - e))
        }
        BoundName::ThueHeight => {
            let n = degree(p, name)?;
            let h = at_least(p.h, 3.0, "H", name)?;
            let m = at_least(p.m, 3.0, "M", name)?;
            let lc = ln_height_constant(n);
            ln_constant = Some(lc);
            let nf = n as f64;
            // The bound is on ln|p, q|; its own log is kept.
            BoundValue::Log(lc + (2.0 * nf - 2.0) * h.ln() + (2.0 * nf - 1.0) * h.ln().ln() + m.ln().ln())
        }
    };
    if let BoundValue::Real(x) | BoundValue::Log(x) = value {
        if !x.is_finite() {
            return Err(Error::Overflow(format!("{name} is not finite for these parameters")));
        }
    }
    Ok(Bound {
        name,
        params: params.clone(),
        side: name.side(),
        value,
        ln_constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub verdict: Verdict,
    pub observed: u64,
    pub instance: String,
    pub bound: Bound,
}

/// Compares an enumerated count with a bound. Lower bounds speak about some
/// instance of each size, never a given one, so they only yield `INFO`.
pub fn verify_counts(observed: u64, instance: &str, bound: &Bound) -> Result<Verification> {
    let verdict = match bound.side {
        Side::UpperCount if bound.value.dominates(observed) => Verdict::Pass,
        Side::UpperCount => Verdict::Fail,
        Side::LowerCount => Verdict::Info,
        Side::HeightBound => {
            return Err(Error::Domain(format!(
                "{} bounds heights, not solution counts",
                bound.name
            )))
        }
    };
    Ok(Verification {
        verdict,
        observed,
        instance: instance.to_string(),
        bound: bound.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> BoundParams {
        BoundParams::default()
    }

    #[test]
    fn examples() {
        let b = eval_bound(
            BoundName::TmCount,
            &BoundParams {
                n: Some(3),
                t: Some(1),
                ..params()
            },
        )
        .unwrap();
        assert_eq!(b.value, BoundValue::Exact(BigInt::from(180_000_000_000u64)));
        let b = eval_bound(BoundName::SunitCount, &BoundParams { t: Some(2), ..params() }).unwrap();
        assert_eq!(b.value, BoundValue::Exact(BigInt::from(5_764_801u64)));
        let b = eval_bound(
            BoundName::SunitLower,
            &BoundParams {
                t: Some(100),
                eps: Some(1.0),
                ..params()
            },
        )
        .unwrap();
        let BoundValue::Real(x) = b.value else { panic!() };
        assert!((x / 1.2e6 - 1.0).abs() < 0.02, "{x}");
        assert_eq!(b.side, Side::LowerCount);
    }

    #[test]
    fn height_constant_in_log_form() {
        let p = BoundParams {
            n: Some(3),
            h: Some(3.0),
            m: Some(3.0),
            ..params()
        };
        let b = eval_bound(BoundName::ThueHeight, &p).unwrap();
        let lc = b.ln_constant.unwrap();
        let want = 108.0 * 3f64.ln();
        assert!(((lc - want) / want).abs() < 1e-15);
        assert_eq!(height_constant(3), BigInt::from(3u32).pow(108));
        assert!((big_ln(&height_constant(3)) - want).abs() < 1e-12);
        assert!(matches!(b.value, BoundValue::Log(_)));
        for n in 3..12 {
            let rel = (big_ln(&height_constant(n)) - ln_height_constant(n)) / ln_height_constant(n);
            assert!(rel.abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let bad = [
            (
                BoundName::ThueHeight,
                BoundParams {
                    n: Some(3),
                    h: Some(3.0),
                    m: Some(1.0),
                    ..params()
                },
            ),
            (
                BoundName::ThueHeight,
                BoundParams {
                    n: Some(3),
                    h: Some(2.0),
                    m: Some(5.0),
                    ..params()
                },
            ),
            (
                BoundName::SunitLower,
                BoundParams {
                    t: Some(1),
                    eps: Some(1.0),
                    ..params()
                },
            ),
            (
                BoundName::ThueOmegaC0,
                BoundParams {
                    n: Some(3),
                    omega: Some(1),
                    ..params()
                },
            ),
            (
                BoundName::TmAbsoluteConstants,
                BoundParams {
                    n: Some(3),
                    h: Some(5.0),
                    t: Some(1),
                    c1: Some(1.0),
                    ..params()
                },
            ),
            (
                BoundName::TmCount,
                BoundParams {
                    n: Some(2),
                    t: Some(1),
                    ..params()
                },
            ),
            (
                BoundName::ApproximationCount,
                BoundParams {
                    n: Some(3),
                    beta1: Some(2.0),
                    ..params()
                },
            ),
        ];
        for (name, p) in bad {
            let e = eval_bound(name, &p).unwrap_err();
            assert!(e.is_domain(), "{name}: {e}");
        }
    }

    #[test]
    fn huge_values_switch_to_logs() {
        let b = eval_bound(
            BoundName::SunitCount,
            &BoundParams {
                t: Some(1000),
                ..params()
            },
        )
        .unwrap();
        assert_eq!(b.value, BoundValue::Log(2004.0 * 7f64.ln()));
        let b = eval_bound(
            BoundName::SunitCount,
            &BoundParams {
                t: Some(100),
                ..params()
            },
        )
        .unwrap();
        let BoundValue::Exact(v) = &b.value else { panic!() };
        assert_eq!(*v, BigInt::from(7u32).pow(204));
        assert!(b.value.dominates(u64::MAX));
    }

    #[test]
    fn verification() {
        let tm = eval_bound(
            BoundName::TmCount,
            &BoundParams {
                n: Some(3),
                t: Some(2),
                ..params()
            },
        )
        .unwrap();
        assert_eq!(verify_counts(5, "X^3-2Y^3", &tm).unwrap().verdict, Verdict::Pass);
        let su = eval_bound(BoundName::SunitCount, &BoundParams { t: Some(1), ..params() }).unwrap();
        assert_eq!(verify_counts(3, "S={2}", &su).unwrap().verdict, Verdict::Pass);
        assert_eq!(verify_counts(117_649 + 1, "", &su).unwrap().verdict, Verdict::Fail);
        let lo = eval_bound(
            BoundName::SunitLower,
            &BoundParams {
                t: Some(5),
                eps: Some(1.0),
                ..params()
            },
        )
        .unwrap();
        assert_eq!(verify_counts(0, "", &lo).unwrap().verdict, Verdict::Info);
        let h = eval_bound(
            BoundName::ThueHeight,
            &BoundParams {
                n: Some(3),
                h: Some(3.0),
                m: Some(3.0),
                ..params()
            },
        )
        .unwrap();
        assert!(verify_counts(1, "", &h).is_err());
    }

    #[test]
    fn names_round_trip() {
        for b in BoundName::ALL {
            assert_eq!(b.as_str().parse::<BoundName>().unwrap(), b);
            let j = serde_json::to_string(&b).unwrap();
            assert_eq!(j, format!("\"{}\"", b.as_str()));
        }
    }

    fn full(n: u32, t: u32, w: u32, h: f64, m: f64) -> BoundParams {
        BoundParams {
            n: Some(n),
            t: Some(t),
            omega: Some(w),
            r: Some(t),
            h: Some(h),
            m: Some(m),
            c0: Some(2.5),
            c1: Some(0.5),
            c2: Some(3.0),
            beta1: Some(2.5),
            eps: Some(0.1),
        }
    }

    proptest! {
        #[test]
        fn upper_bounds_monotone(n in 3u32..40, t in 2u32..200, w in 0u32..200,
                                 h in 3.0f64..1e6, m in 3.0f64..1e6) {
            let base = full(n, t, w, h, m);
            let steps = [
                full(n + 1, t, w, h, m),
                full(n, t + 1, w, h, m),
                full(n, t, w + 1, h, m),
                full(n, t, w, h * 1.5, m),
                full(n, t, w, h, m * 1.5),
            ];
            for name in BoundName::ALL {
                let b0 = eval_bound(name, &base).unwrap();
                prop_assert!(b0.value.ln().is_finite());
                if name.side() == Side::LowerCount {
                    continue;
                }
                for s in &steps {
                    let b1 = eval_bound(name, s).unwrap();
                    prop_assert!(b1.value.ln() >= b0.value.ln() - 1e-12 * b0.value.ln().abs(),
                                 "{} decreased", name);
                }
            }
        }

        #[test]
        fn log_switch_is_exact(t in 0u32..2000) {
            let b = eval_bound(BoundName::SunitCount, &BoundParams { t: Some(t), ..BoundParams::default() }).unwrap();
            let ln = (2.0 * t as f64 + 4.0) * 7f64.ln();
            match b.value {
                BoundValue::Exact(v) => {
                    prop_assert!(ln <= LOG_THRESHOLD);
                    prop_assert_eq!(v, BigInt::from(7u32).pow(2 * t + 4));
                }
                BoundValue::Log(l) => {
                    prop_assert!(ln > LOG_THRESHOLD);
                    prop_assert_eq!(l, ln);
                }
                BoundValue::Real(_) => prop_assert!(false),
            }
        }
    }
}

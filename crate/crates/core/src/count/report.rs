//! Convergence series, value multiplicities and prime-factor scans.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{count_a_from_scan, lambda_k, sigma_archimedean, sigma_s, CountOptions, ScanBox, ValueScan};
use crate::arith::{gpf, gpf_u64, PrimeSet};
use crate::error::{Error, Result};
use crate::exec;
use crate::forms::BinaryForm;
use crate::padic::padic_roots;
use crate::poly::isolate_real_roots;
use crate::solve::CoprimePair;

/// Places of `S ∪ {∞}` where `F(X, 1)` has a zero, as `"inf"` or the prime.
pub fn t0_places(form: &BinaryForm, s: &PrimeSet) -> Result<Vec<String>> {
    let f = form.dehomogenize();
    let mut out = Vec::new();
    if !isolate_real_roots(&f).is_empty() {
        out.push("inf".to_string());
    }
    for &p in s.primes() {
        let r = padic_roots(&f, p, 1)?;
        if !r.roots.is_empty() {
            out.push(p.to_string());
        } else if !r.undecided.is_empty() {
            return Err(Error::Undecided(format!("zeros of F(X,1) in Q_{p}")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CountKind {
    /// `A_{F,S}(Z)`.
    Pairs,
    /// `N_{F,k}(Z)`.
    KFree { k: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub z: u64,
    pub count: u64,
    /// Enclosure of `count / Z^{2/n}`.
    pub normalized_lo: f64,
    pub normalized_hi: f64,
    /// `count − reference·Z^{2/n}`.
    pub residual: f64,
    pub scan_box: ScanBox,
    /// Pairs found outside the primary box.
    pub margin_pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub form: BinaryForm,
    pub primes: Vec<u64>,
    pub kind: CountKind,
    pub points: Vec<SeriesPoint>,
    /// `σ_{F,S}`, or `λ_{F,k}σ_F` for k-free counts.
    pub reference: f64,
    pub reference_radius: f64,
    pub t0_places: Vec<String>,
    pub t0: usize,
    /// Predicted error term `Z^{exponent} (log Z)^{log_power}`.
    pub error_exponent: f64,
    pub log_power: u32,
    /// Largest `|residual| / (Z^{exponent} (log Z)^{log_power})` over the
    /// grid; a diagnostic, not a claim.
    pub fitted_constant: f64,
}

/// Numerical parameters for [`asymptotic_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub count: CountOptions,
    /// Radius target for `σ_F`.
    pub tol: f64,
    /// Truncation level of the local factors and of the S-part search.
    pub jmax: u32,
    /// Primes used in `λ_{F,k}`.
    pub pmax: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            count: CountOptions::default(),
            tol: 1e-4,
            jmax: 2,
            pmax: 10_000,
        }
    }
}

fn z_pow(z: u64, e: f64) -> (f64, f64) {
    let v = (z as f64).powf(e);
    (v * (1.0 - 4.0 * f64::EPSILON), v * (1.0 + 4.0 * f64::EPSILON))
}

/// Counts on a grid of `Z`, normalised by `Z^{2/n}` and compared with the
/// predicted constant.
pub fn asymptotic_report(
    form: &BinaryForm,
    s: &PrimeSet,
    zs: &[u64],
    k: Option<u32>,
    opts: &ReportOptions,
) -> Result<CountSeries> {
    if zs.is_empty() || zs.windows(2).any(|w| w[0] >= w[1]) || zs[0] == 0 {
        return Err(Error::InvalidInput("Z grid must be positive and increasing".into()));
    }
    if k.is_some() && !s.is_empty() {
        return Err(Error::Unsupported("k-free counts are only defined for S = ∅".into()));
    }
    if s.is_empty() && k.is_none() && form.has_linear_factor() {
        return Err(Error::Unsupported(
            "a form with a linear factor over Q vanishes on infinitely many pairs".into(),
        ));
    }
    let n = form.degree();
    let e = 2.0 / n as f64;
    let s_part: u128 = s
        .primes()
        .iter()
        .try_fold(1u128, |acc, &p| acc.checked_mul((p as u128).checked_pow(opts.jmax)?))
        .ok_or_else(|| Error::Overflow("S-part bound".into()))?;
    let zmax = *zs.last().unwrap() as u128;
    let vmax = zmax
        .checked_mul(s_part)
        .ok_or_else(|| Error::Overflow("value bound".into()))?;
    let top = ScanBox::new(n, vmax, &opts.count)?;
    let scan = ValueScan::run(form, vmax, top.scanned)?;

    let (reference, reference_radius) = match k {
        None if s.is_empty() => {
            let a = sigma_archimedean(form, opts.tol)?;
            (a.value, a.radius)
        }
        None => {
            let ss = sigma_s(form, s, opts.jmax.max(6), opts.tol)?;
            (ss.value, ss.radius)
        }
        Some(k) => {
            let a = sigma_archimedean(form, opts.tol)?;
            let l = lambda_k(form, k, opts.pmax)?;
            let hi = l.partial * a.hi();
            let lo = l.lo().unwrap_or(0.0) * a.lo();
            (0.5 * (hi + lo), 0.5 * (hi - lo))
        }
    };

    let places = t0_places(form, s)?;
    let t0 = places.len();
    let (error_exponent, log_power) = if t0 == 0 {
        (1.0 / n as f64, 0)
    } else {
        (1.0 / (n as f64 - 1.0), (t0 - 1) as u32)
    };

    let mut points = Vec::with_capacity(zs.len());
    let mut fitted: f64 = 0.0;
    for &z in zs {
        let bx = ScanBox::new(n, z as u128 * s_part, &opts.count)?;
        let (count, margin_pairs) = match k {
            None => {
                let a = count_a_from_scan(&scan, s, z, bx)?;
                (a.count, a.count - a.primary_count)
            }
            Some(k) => {
                let c = scan.count_kfree_pairs(k, z as u128, bx.scanned)?;
                let p = scan.count_kfree_pairs(k, z as u128, bx.primary)?;
                (c, c - p)
            }
        };
        let (lo, hi) = z_pow(z, e);
        let residual = count as f64 - reference * 0.5 * (lo + hi);
        if z >= 3 {
            let scale = (z as f64).powf(error_exponent) * (z as f64).ln().powi(log_power as i32);
            fitted = fitted.max(residual.abs() / scale);
        }
        points.push(SeriesPoint {
            z,
            count,
            normalized_lo: count as f64 / hi,
            normalized_hi: count as f64 / lo,
            residual,
            scan_box: bx,
            margin_pairs,
        });
    }
    Ok(CountSeries {
        form: form.clone(),
        primes: s.primes().to_vec(),
        kind: k.map_or(CountKind::Pairs, |k| CountKind::KFree { k }),
        points,
        reference,
        reference_radius,
        t0_places: places,
        t0,
        error_exponent,
        log_power,
        fitted_constant: fitted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichTarget {
    pub m: i128,
    /// Number of integer pairs with `F(p, q) = m` in the scan box.
    pub count: u64,
    /// `(log |m|)^{1/4}`, `(log |m|)^{1/3}`, `(log |m|)^{1/2}`.
    pub log_curves: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichestReport {
    pub m_bound: u64,
    pub scan_box: ScanBox,
    pub targets: Vec<RichTarget>,
}

/// Values `m` with `|m| ≤ M` taken most often by a cubic form, by number of
/// integer pairs in the scan box; ties broken by `|m|`, then `m`.
pub fn richest_targets(form: &BinaryForm, m_bound: u64, top: usize, opts: &CountOptions) -> Result<RichestReport> {
    if form.degree() != 3 {
        return Err(Error::InvalidDegree(
            "richest targets are defined for cubic forms".into(),
        ));
    }
    if form.discriminant()?.is_zero() {
        return Err(Error::Domain(
            "the form has a repeated factor (zero discriminant)".into(),
        ));
    }
    let bx = ScanBox::new(3, m_bound as u128, opts)?;
    let scan = ValueScan::run(form, m_bound as u128, bx.scanned)?;
    let mut buckets: BTreeMap<i128, u64> = BTreeMap::new();
    for r in &scan.records {
        if r.value == 0 {
            continue;
        }
        *buckets.entry(r.value).or_default() += 1;
        if r.q != 0 {
            *buckets.entry(-r.value).or_default() += 1;
        }
    }
    let mut all: Vec<(i128, u64)> = buckets.into_iter().collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.abs().cmp(&b.0.abs())).then(a.0.cmp(&b.0)));
    let targets = all
        .into_iter()
        .take(top)
        .map(|(m, count)| {
            let l = (m.unsigned_abs() as f64).ln().max(0.0);
            RichTarget {
                m,
                count,
                log_curves: [l.powf(0.25), l.powf(1.0 / 3.0), l.sqrt()],
            }
        })
        .collect();
    Ok(RichestReport {
        m_bound,
        scan_box: bx,
        targets,
    })
}

/// Greatest prime factors of `F(p, q)` over coprime pairs with
/// `2^i ≤ |p, q| < 2^{i+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpfShell {
    pub shell: u32,
    pub pairs: u64,
    pub min_gpf: u64,
    pub min_pair: CoprimePair,
    pub max_gpf: u64,
    pub max_pair: CoprimePair,
    /// `(log log H)^{1/4}` at the shell's lower edge `H = 2^i`, when defined.
    pub loglog_quarter: Option<f64>,
    /// `log₂H · log₃H / log₄H` with iterated logarithms, when defined.
    pub iterated_log_shape: Option<f64>,
}

fn iterated_log(x: f64, times: u32) -> Option<f64> {
    let mut v = x;
    for _ in 0..times {
        if v <= 0.0 {
            return None;
        }
        v = v.ln();
    }
    Some(v)
}

/// Shell-wise minimum and maximum of the greatest prime factor of `F(p, q)`
/// over coprime pairs with `1 ≤ |p, q| ≤ B`. `(p, q)` and `(−p, −q)` share a
/// value, so each shell is scanned over one of them.
pub fn gpf_scan(form: &BinaryForm, b: u64) -> Result<Vec<GpfShell>> {
    if form.degree() < 3 || !form.is_irreducible() {
        return Err(Error::Domain("gpf scans need an irreducible form of degree ≥ 3".into()));
    }
    if b == 0 || b >= 1 << 31 {
        return Err(Error::Domain("B must be in [1, 2^31)".into()));
    }
    let bb = b as i64;
    let shells = 64 - b.leading_zeros();
    let results = exec::map_ordered((0..shells).collect::<Vec<_>>(), |i| -> Result<Option<GpfShell>> {
        let lo = 1i64 << i;
        let hi = ((1i64 << (i + 1)) - 1).min(bb);
        let mut best: Option<(u64, CoprimePair, u64, CoprimePair, u64)> = None;
        for q in 0..=hi {
            for p in -hi..=hi {
                let h = p.abs().max(q);
                if h < lo || (q == 0 && p < 0) || p.gcd(&q) != 1 {
                    continue;
                }
                let g = match form.eval_i128(p as i128, q as i128) {
                    Some(v) if v.unsigned_abs() < u64::MAX as u128 => gpf_u64(v.unsigned_abs() as u64),
                    _ => gpf(&form.eval_i64(p, q))?
                        .to_u64()
                        .ok_or_else(|| Error::Unsupported("greatest prime factor beyond 64 bits".into()))?,
                };
                let pair = || CoprimePair::new(p, q);
                best = Some(match best {
                    None => (g, pair(), g, pair(), 1),
                    Some((mn, mp, mx, xp, c)) => {
                        let (mn, mp) = if g < mn { (g, pair()) } else { (mn, mp) };
                        let (mx, xp) = if g > mx { (g, pair()) } else { (mx, xp) };
                        (mn, mp, mx, xp, c + 1)
                    }
                });
            }
        }
        Ok(best.map(|(min_gpf, min_pair, max_gpf, max_pair, pairs)| {
            let h = lo as f64;
            let l2 = iterated_log(h, 2);
            let l3 = iterated_log(h, 3);
            let l4 = iterated_log(h, 4).filter(|&x| x > 0.0);
            GpfShell {
                shell: i,
                pairs,
                min_gpf,
                min_pair,
                max_gpf,
                max_pair,
                loglog_quarter: l2.filter(|&x| x > 0.0).map(|x| x.powf(0.25)),
                iterated_log_shape: match (l2, l3, l4) {
                    (Some(a), Some(b), Some(c)) if a > 0.0 && b > 0.0 => Some(a * b / c),
                    _ => None,
                },
            }
        }))
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

//! Lattice-point counting functions and their asymptotic constants.
//!
//! All counts come from one enumeration: every pair `(p, q)` with
//! `|p, q| ≤ box` and `|F(p, q)| ≤ V` is found row by row through
//! [`RowScanner`](crate::scan::RowScanner), only the half plane `q ≥ 0` is
//! scanned, and `(−p, −q)` is accounted for by `F(−p,−q) = (−1)ⁿ F(p,q)`.

mod lambda;
mod report;
mod sigma;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{is_kfree_u64, PrimeSet};
use crate::error::{Error, Result};
use crate::exec;
use crate::forms::BinaryForm;
use crate::scan::RowScanner;
use crate::solve::CoprimePair;

pub use lambda::{check_fixed_divisors, lambda_factor, lambda_k, LambdaK};
pub use report::{
    asymptotic_report, gpf_scan, richest_targets, t0_places, CountKind, CountSeries, GpfShell, ReportOptions,
    RichTarget, RichestReport, SeriesPoint,
};
pub use sigma::{
    area_sublevel, sigma_archimedean, sigma_monte_carlo, sigma_s, AreaEstimate, AreaMethod, SigmaS, DEFAULT_MAX_CELLS,
};

/// Default ratio between the scanned box and the large-solution threshold.
pub const DEFAULT_MARGIN: u64 = 2;

/// Search-box policy for counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    /// Scanned box = `margin ·` primary box.
    pub margin: u64,
    /// Overrides the scanned box entirely.
    pub box_override: Option<u64>,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            margin: DEFAULT_MARGIN,
            box_override: None,
        }
    }
}

/// Primary and scanned boxes for a value bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanBox {
    /// Smallest `B` with `B^{n−2} ≥ 4V`: beyond it solutions are large.
    pub primary: u64,
    pub scanned: u64,
}

impl ScanBox {
    pub fn new(n: usize, v: u128, opts: &CountOptions) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDegree(format!("degree must be at least 3, got {n}")));
        }
        let target = v
            .max(1)
            .checked_mul(4)
            .ok_or_else(|| Error::Overflow("value bound".into()))?;
        let e = (n - 2) as u32;
        let mut b = (target as f64).powf(1.0 / e as f64).floor().max(1.0) as u128;
        while b > 1 && pow_ge(b - 1, e, target) {
            b -= 1;
        }
        while !pow_ge(b, e, target) {
            b += 1;
        }
        let primary = u64::try_from(b).map_err(|_| Error::Overflow("box".into()))?;
        let scanned = match opts.box_override {
            Some(s) => s,
            None => primary
                .checked_mul(opts.margin.max(1))
                .ok_or_else(|| Error::Overflow("box".into()))?,
        };
        if scanned >= 1 << 40 {
            return Err(Error::Unsupported(format!("scan box {scanned} is beyond desk scale")));
        }
        // An override smaller than the primary box shrinks both.
        Ok(Self {
            primary: primary.min(scanned),
            scanned,
        })
    }
}

fn pow_ge(b: u128, e: u32, target: u128) -> bool {
    b.checked_pow(e).is_none_or(|x| x >= target)
}

/// A pair found by the scan, with `q ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Record {
    p: i64,
    q: i64,
    value: i128,
}

impl Record {
    fn height(&self) -> u64 {
        self.p.unsigned_abs().max(self.q.unsigned_abs())
    }

    /// Number of pairs this record stands for: itself and, off the row `q = 0`,
    /// its negative.
    fn weight(&self) -> u64 {
        if self.q == 0 {
            1
        } else {
            2
        }
    }
}

/// All pairs with `|p, q| ≤ box` and `|F(p, q)| ≤ vmax`.
#[derive(Debug, Clone)]
pub struct ValueScan {
    degree: usize,
    vmax: u128,
    bx: u64,
    records: Vec<Record>,
}

impl ValueScan {
    pub fn run(form: &BinaryForm, vmax: u128, bx: u64) -> Result<Self> {
        let n = form.degree();
        if n < 3 {
            return Err(Error::InvalidDegree(format!("degree must be at least 3, got {n}")));
        }
        let lim = i128::try_from(vmax).map_err(|_| Error::Overflow("value bound".into()))?;
        let b = i64::try_from(bx).map_err(|_| Error::Overflow("box".into()))?;
        let scanner = RowScanner::new(form);
        let chunks = exec::map_chunks(0..b + 1, 2048, |range| {
            let mut out = Vec::new();
            for q in range {
                scanner.scan_row(q, -lim, lim, -b, b, &mut |p, value| out.push(Record { p, q, value }));
            }
            out
        });
        let records = chunks.into_iter().flatten().collect();
        Ok(Self {
            degree: n,
            vmax,
            bx,
            records,
        })
    }

    pub fn value_bound(&self) -> u128 {
        self.vmax
    }

    pub fn box_size(&self) -> u64 {
        self.bx
    }

    fn check(&self, z: u128, bx: u64) -> Result<()> {
        if z > self.vmax || bx > self.bx {
            return Err(Error::Internal(format!(
                "query (Z={z}, box={bx}) outside scan (V={}, box={})",
                self.vmax, self.bx
            )));
        }
        Ok(())
    }

    fn within(&self, z: u128, bx: u64) -> impl Iterator<Item = &Record> {
        self.records
            .iter()
            .filter(move |r| r.value.unsigned_abs() <= z && r.height() <= bx)
    }

    /// `#{(p, q) : |F(p, q)| ≤ Z, |p, q| ≤ box}`.
    pub fn count_pairs(&self, z: u128, bx: u64) -> Result<u64> {
        self.check(z, bx)?;
        Ok(self.within(z, bx).map(Record::weight).sum())
    }

    /// Pairs with `1 ≤ |F| ≤ Z` and `F(p, q)` k-free.
    pub fn count_kfree_pairs(&self, k: u32, z: u128, bx: u64) -> Result<u64> {
        self.check(z, bx)?;
        Ok(self
            .within(z, bx)
            .filter(|r| r.value != 0 && kfree(r.value, k))
            .map(Record::weight)
            .sum())
    }

    /// Distinct non-zero values `h`, `|h| ≤ Z`, taken in the box.
    pub fn values(&self, z: u128, bx: u64, k: Option<u32>) -> Result<BTreeSet<i128>> {
        self.check(z, bx)?;
        let odd = self.degree % 2 == 1;
        let mut out = BTreeSet::new();
        for r in self.within(z, bx) {
            if r.value == 0 || k.is_some_and(|k| !kfree(r.value, k)) {
                continue;
            }
            out.insert(r.value);
            if r.q != 0 {
                out.insert(if odd { -r.value } else { r.value });
            }
        }
        Ok(out)
    }

    /// Pairs with `|F| ≤ Z` and `primary < |p, q| ≤ box`, normalised to `q > 0`
    /// or `q = 0, p > 0`.
    pub fn margin_pairs(&self, z: u128, primary: u64, bx: u64) -> Result<Vec<CoprimePair>> {
        self.check(z, bx)?;
        Ok(self
            .within(z, bx)
            .filter(|r| r.height() > primary && (r.q > 0 || r.p > 0))
            .map(|r| CoprimePair::new(r.p, r.q))
            .collect())
    }

    /// `Σ` weight over pairs satisfying `keep(p, q, F(p, q))`.
    fn count_where(&self, bx: u64, keep: impl Fn(i64, i64, i128) -> bool) -> u64 {
        self.records
            .iter()
            .filter(|r| r.height() <= bx && keep(r.p, r.q, r.value))
            .map(Record::weight)
            .sum()
    }
}

fn kfree(v: i128, k: u32) -> bool {
    match u64::try_from(v.unsigned_abs()) {
        Ok(u) => is_kfree_u64(u, k),
        Err(_) => crate::arith::is_kfree(&BigInt::from(v), k).unwrap_or(false),
    }
}

fn check_countable(form: &BinaryForm) -> Result<()> {
    if form.degree() < 3 {
        return Err(Error::InvalidDegree(format!(
            "degree must be at least 3, got {}",
            form.degree()
        )));
    }
    if form.discriminant()?.is_zero() {
        return Err(Error::Domain(
            "the form has a repeated factor (zero discriminant)".into(),
        ));
    }
    Ok(())
}

/// Result of `A_{F,S}(Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ACount {
    pub z: u64,
    /// All pairs found in the scanned box.
    pub count: u64,
    /// Pairs inside the primary box.
    pub primary_count: u64,
    pub scan_box: ScanBox,
    /// Largest `|F(p, q)|` examined.
    pub value_bound: u128,
    /// Pairs outside the primary box (one of each `±` pair).
    pub margin_pairs: Vec<CoprimePair>,
}

/// `A_{F,S}(Z)`: pairs with `∏_{P ∈ S ∪ {∞}} |F(p,q)|_P ≤ Z` and
/// `gcd(p, q, ∏ P) = 1`; for `S = ∅` every pair with `|F(p,q)| ≤ Z`.
///
/// For `S = ∅` the value bound is `Z`. Otherwise pairs are searched with
/// `|F(p, q)| ≤ Z·∏ P^J`, so pairs whose S-part exceeds `∏ P^J` are only
/// seen through the box override.
pub fn count_a(form: &BinaryForm, s: &PrimeSet, z: u64, s_levels: u32, opts: &CountOptions) -> Result<ACount> {
    check_countable(form)?;
    if s.is_empty() && form.has_linear_factor() {
        return Err(Error::Unsupported(
            "a form with a linear factor over Q vanishes on infinitely many pairs".into(),
        ));
    }
    let mut vmax = z as u128;
    for &p in s.primes() {
        let pj = (p as u128)
            .checked_pow(s_levels)
            .ok_or_else(|| Error::Overflow("S-part bound".into()))?;
        vmax = vmax
            .checked_mul(pj)
            .ok_or_else(|| Error::Overflow("value bound".into()))?;
    }
    let bx = ScanBox::new(form.degree(), vmax, opts)?;
    let scan = ValueScan::run(form, vmax, bx.scanned)?;
    count_a_from_scan(&scan, s, z, bx)
}

/// `A_{F,S}(Z)` from an existing scan covering the boxes in `bx`.
pub fn count_a_from_scan(scan: &ValueScan, s: &PrimeSet, z: u64, bx: ScanBox) -> Result<ACount> {
    if bx.scanned > scan.box_size() {
        return Err(Error::Internal("scan box smaller than requested".into()));
    }
    let zz = z as u128;
    let (count, primary_count, margin_pairs) = if s.is_empty() {
        (
            scan.count_pairs(zz, bx.scanned)?,
            scan.count_pairs(zz, bx.primary)?,
            scan.margin_pairs(zz, bx.primary, bx.scanned)?,
        )
    } else {
        let keep = |p: i64, q: i64, v: i128| -> bool {
            if v == 0 {
                return false;
            }
            let mut rest = v.unsigned_abs();
            for &pr in s.primes() {
                let pr = pr as u128;
                if p.rem_euclid(pr as i64) == 0 && q.rem_euclid(pr as i64) == 0 {
                    return false;
                }
                while rest.is_multiple_of(pr) {
                    rest /= pr;
                }
            }
            rest <= zz
        };
        let margin: Vec<CoprimePair> = scan
            .records
            .iter()
            .filter(|r| {
                r.height() > bx.primary && r.height() <= bx.scanned && (r.q > 0 || r.p > 0) && keep(r.p, r.q, r.value)
            })
            .map(|r| CoprimePair::new(r.p, r.q))
            .collect();
        (
            scan.count_where(bx.scanned, keep),
            scan.count_where(bx.primary, keep),
            margin,
        )
    };
    Ok(ACount {
        z,
        count,
        primary_count,
        scan_box: bx,
        value_bound: scan.value_bound(),
        margin_pairs,
    })
}

/// A count together with the box it was taken in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxedCount {
    pub z: u64,
    pub count: u64,
    pub scan_box: ScanBox,
}

fn scan_for(form: &BinaryForm, z: u64, opts: &CountOptions) -> Result<(ValueScan, ScanBox)> {
    if form.degree() < 3 {
        return Err(Error::InvalidDegree(format!(
            "degree must be at least 3, got {}",
            form.degree()
        )));
    }
    let bx = ScanBox::new(form.degree(), z as u128, opts)?;
    Ok((ValueScan::run(form, z as u128, bx.scanned)?, bx))
}

/// `R_F(Z)`: distinct non-zero `h`, `|h| ≤ Z`, with `F(p, q) = h` in the box.
pub fn count_r(form: &BinaryForm, z: u64, opts: &CountOptions) -> Result<BoxedCount> {
    let (scan, bx) = scan_for(form, z, opts)?;
    let count = scan.values(z as u128, bx.scanned, None)?.len() as u64;
    Ok(BoxedCount { z, count, scan_box: bx })
}

/// `R_{F,k}(Z)`: the k-free values among those counted by [`count_r`].
pub fn count_rk(form: &BinaryForm, k: u32, z: u64, opts: &CountOptions) -> Result<BoxedCount> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    let (scan, bx) = scan_for(form, z, opts)?;
    let count = scan.values(z as u128, bx.scanned, Some(k))?.len() as u64;
    Ok(BoxedCount { z, count, scan_box: bx })
}

/// `N_{F,k}(Z)`: pairs with `1 ≤ |F(p, q)| ≤ Z` and `F(p, q)` k-free.
pub fn count_nk(form: &BinaryForm, k: u32, z: u64, opts: &CountOptions) -> Result<BoxedCount> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    check_fixed_divisors(form, k)?;
    let (scan, bx) = scan_for(form, z, opts)?;
    let count = scan.count_kfree_pairs(k, z as u128, bx.scanned)?;
    Ok(BoxedCount { z, count, scan_box: bx })
}

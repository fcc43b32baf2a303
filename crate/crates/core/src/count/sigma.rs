//! The area `σ_F` of `{|F(x, y)| ≤ 1}` and its S-adic version.
//!
//! Writing `x = ty` gives `σ_F = ∫_ℝ |F(t, 1)|^{−2/n} dt`; splitting at
//! `|t| = 1` and substituting `t = 1/s` outside turns this into two integrals
//! over `[−1, 1]`, of `|F(t,1)|^{−2/n}` and `|F(1,s)|^{−2/n}`. Both integrands
//! are finite except at real zeros, where they blow up like `|t − θ|^{−2/n}`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeSet;
use crate::error::{Error, Result};
use crate::exec;
use crate::forms::BinaryForm;
use crate::interval::{horner, Interval};
use crate::padic::local_factor;
use crate::poly::{real_roots_f64, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaMethod {
    Quadrature,
    MonteCarlo,
}

/// An area with either a rigorous radius (quadrature) or a 99% confidence
/// half-width (Monte Carlo).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub value: f64,
    pub radius: f64,
    pub method: AreaMethod,
    pub seed: Option<u64>,
    /// Cells (quadrature) or samples (Monte Carlo) used.
    pub work: u64,
}

impl AreaEstimate {
    pub fn lo(&self) -> f64 {
        self.value - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.value + self.radius
    }
}

fn check_form(form: &BinaryForm) -> Result<()> {
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

/// The two chart polynomials `F(t, 1)` and `F(1, s)`, lowest degree first.
fn charts(form: &BinaryForm) -> [Poly; 2] {
    [form.dehomogenize(), form.dehomogenize_y()]
}

/// Anchors are multiples of `2^−ANCHOR_BITS`, so segment ends relative to
/// them are exact in f64.
const ANCHOR_BITS: u32 = 40;

/// Enclosure of `num / 2^(ANCHOR_BITS·pow)`.
fn scaled_interval(num: &BigInt, pow: usize) -> Interval {
    let mut x = Interval::from_bigint(num);
    let step = 2f64.powi(-(ANCHOR_BITS as i32));
    for _ in 0..pow {
        let (lo, hi) = (x.lo * step, x.hi * step);
        // Exact unless the result is subnormal.
        x = if lo.abs() < f64::MIN_POSITIVE || hi.abs() < f64::MIN_POSITIVE {
            Interval::new(lo.next_down(), hi.next_up())
        } else {
            Interval::new(lo, hi)
        };
    }
    x
}

/// Interval coefficients of `p(k/2^ANCHOR_BITS + u)` in `u`.
fn shifted(p: &Poly, k: i64) -> Vec<Interval> {
    let n = p.coeffs().len();
    if n == 0 {
        return vec![Interval::point(0.0)];
    }
    let d = BigInt::one() << ANCHOR_BITS;
    let k = BigInt::from(k);
    // b_j · D^(n−1) = Σ_i a_i C(i, j) k^(i−j) D^(n−1−i+j).
    (0..n)
        .map(|j| {
            let mut acc = BigInt::zero();
            let mut binom = BigInt::one();
            for i in j..n {
                if i > j {
                    binom = binom * BigInt::from(i) / BigInt::from(i - j);
                }
                let t = &p.coeffs()[i] * &binom * k.pow((i - j) as u32) * d.pow((n - 1 - i + j) as u32);
                acc += t;
            }
            scaled_interval(&acc, n - 1)
        })
        .collect()
}

/// Integration segments of `[−1, 1]` for one chart polynomial: each is
/// anchored at a breakpoint (an end or a dyadic point near a real zero) and
/// covers up to halfway to the next one.
fn segments(p: &Poly) -> Vec<Chart> {
    let unit = (1i64) << ANCHOR_BITS;
    let mut anchors = vec![-unit, unit];
    for r in real_roots_f64(&p.to_f64()) {
        if r.abs() < 1.0 {
            anchors.push((r * unit as f64).round() as i64);
        }
    }
    anchors.sort_unstable();
    anchors.dedup();
    let d = p.derivative();
    let dd = d.derivative();
    let make = |k: i64, u0: f64, u1: f64| Chart {
        f: shifted(p, k),
        df: shifted(&d, k),
        ddf: shifted(&dd, k),
        u0,
        u1,
    };
    let step = 2f64.powi(-(ANCHOR_BITS as i32));
    let mut out = Vec::new();
    for w in anchors.windows(2) {
        let (l, r) = (w[0], w[1]);
        let m = l + (r - l) / 2;
        if m > l {
            out.push(make(l, 0.0, (m - l) as f64 * step));
        }
        if r > m {
            out.push(make(r, (m - r) as f64 * step, 0.0));
        }
    }
    out
}

/// One integration segment, in the local coordinate `u ∈ [u0, u1]`.
struct Chart {
    f: Vec<Interval>,
    df: Vec<Interval>,
    ddf: Vec<Interval>,
    u0: f64,
    u1: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    chart: usize,
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
}

impl Cell {
    fn excess(&self) -> f64 {
        self.hi - self.lo
    }
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.excess()
            .total_cmp(&o.excess())
            .then(o.chart.cmp(&self.chart))
            .then(o.a.total_cmp(&self.a))
    }
}

/// Enclosure of `∫_a^b |f|^{−α}`.
///
/// Away from zeros: midpoint rule plus `w³/24 · g″`, with
/// `g″ = α|f|^{−α−2}((α+1)f′² − f f″)`. Around a simple zero `θ` where `f′`
/// keeps its sign: `min|f′|·|t − θ| ≤ |f(t)| ≤ max|f′|·|t − θ|`, and `θ` is
/// located from the endpoint values.
fn enclose(ch: &Chart, chart: usize, a: f64, b: f64, alpha: f64) -> Cell {
    let x = Interval::new(a, b);
    let wf = b - a;
    let w = Interval::new(wf.next_down().max(0.0), wf.next_up());
    let v = horner(&ch.f, x);
    let (lo, hi) = if !v.contains_zero() {
        let (m, mm) = v.abs_bounds();
        let crude = w * Interval::new(m, mm).powf_pos(-alpha);
        let fm = horner(&ch.f, Interval::point(0.5 * (a + b)));
        if fm.contains_zero() {
            (crude.lo.max(0.0), crude.hi)
        } else {
            let (fl, fh) = fm.abs_bounds();
            let gm = Interval::new(fl, fh).powf_pos(-alpha);
            let d = horner(&ch.df, x);
            let dd = horner(&ch.ddf, x);
            let q = Interval::point(alpha + 1.0) * d * d - v * dd;
            let g2 = Interval::point(alpha) * Interval::new(m, mm).powf_pos(-alpha - 2.0) * q;
            let w3 = w * w * w * Interval::point(1.0 / 24.0);
            let t = w * gm + w3 * g2;
            (t.lo.max(crude.lo).max(0.0), t.hi.min(crude.hi))
        }
    } else {
        let d = horner(&ch.df, x);
        if d.contains_zero() {
            (0.0, f64::INFINITY)
        } else {
            let (dm, dmax) = d.abs_bounds();
            let fa = horner(&ch.f, Interval::point(a));
            let fb = horner(&ch.f, Interval::point(b));
            let beta = 1.0 - alpha;
            let exact_zero = |v: &Interval| v.lo == 0.0 && v.hi == 0.0;
            let bracket = if exact_zero(&fa) && !fb.contains_zero() {
                Some((0.0, 0.0))
            } else if exact_zero(&fb) && !fa.contains_zero() {
                Some((wf, wf))
            } else if !fa.contains_zero() && !fb.contains_zero() && (fa.lo > 0.0) != (fb.lo > 0.0) {
                // u = θ − a lies in [|f(a)|/max|f′|, |f(a)|/min|f′|], and
                // likewise from b.
                let (al, ah) = fa.abs_bounds();
                let (bl, bh) = fb.abs_bounds();
                let u0 = (al / dmax * (1.0 - 1e-12)).max(wf - bh / dm * (1.0 + 1e-12)).max(0.0);
                let u1 = (ah / dm * (1.0 + 1e-12)).min(wf - bl / dmax * (1.0 - 1e-12)).min(wf);
                Some(if u0 <= u1 { (u0, u1) } else { (0.0, wf) })
            } else {
                None
            };
            if let Some((u0, u1)) = bracket {
                // I(u) = (u^β + (w − u)^β)/β is concave and symmetric about w/2.
                let i = |u: f64| (u.max(0.0).powf(beta) + (wf - u).max(0.0).powf(beta)) / beta;
                let imin = i(u0).min(i(u1));
                let imax = i((0.5 * wf).clamp(u0, u1));
                let low = dmax.powf(-alpha) * imin * (1.0 - 1e-12);
                let up = dm.powf(-alpha) * imax * (1.0 + 1e-12);
                (low.max(0.0), up)
            } else {
                // |f(t)| ≥ min|f′|·|t − θ| for the zero (or nearest endpoint)
                // θ, and ∫_a^b |t − θ|^{−α} ≤ 2^α w^{1−α} / (1 − α).
                let up = dm.powf(-alpha) * 2f64.powf(alpha) * wf.powf(beta) / beta;
                let (_, vm) = v.abs_bounds();
                let low = if vm > 0.0 {
                    (w * Interval::point(vm).powf_pos(-alpha)).lo
                } else {
                    0.0
                };
                (low.max(0.0), up * (1.0 + 1e-12))
            }
        }
    };
    Cell {
        chart,
        a,
        b,
        lo,
        hi: hi.max(lo),
    }
}

/// A point inside `(a, b)` near the middle where `f` is not numerically zero,
/// unless it is exactly zero there.
fn split_point(ch: &Chart, a: f64, b: f64) -> f64 {
    let w = b - a;
    for off in [0.0, 1.0 / 64.0, -1.0 / 64.0, 1.0 / 16.0, -1.0 / 16.0] {
        let m = a + w * (0.5 + off);
        let v = horner(&ch.f, Interval::point(m));
        if !v.contains_zero() || (v.lo == 0.0 && v.hi == 0.0) {
            return m;
        }
    }
    0.5 * (a + b)
}

/// Area of `{|F(x, y)| ≤ T}` by adaptive interval quadrature, stopping once
/// the rigorous radius is at most `tol` or `max_cells` cells are in use (the
/// estimate then carries the radius achieved).
pub fn area_sublevel(form: &BinaryForm, t: f64, tol: f64, max_cells: usize) -> Result<AreaEstimate> {
    check_form(form)?;
    if t.is_nan() || tol.is_nan() || t <= 0.0 || tol <= 0.0 {
        return Err(Error::Domain("T and tol must be positive".into()));
    }
    let n = form.degree();
    let alpha = 2.0 / n as f64;
    let cs: Vec<Chart> = charts(form).iter().flat_map(segments).collect();
    let scale = Interval::point(t).powf_pos(alpha);
    let mut heap = BinaryHeap::new();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for (c, ch) in cs.iter().enumerate() {
        let cell = enclose(ch, c, ch.u0, ch.u1, alpha);
        lo += cell.lo;
        hi += cell.hi;
        heap.push(cell);
    }
    let mut cells = heap.len();
    let mut stuck = Vec::new();
    loop {
        // Recompute the sums now and then to shed accumulated rounding.
        if cells % 4096 == 0 {
            lo = heap.iter().chain(&stuck).map(|c: &Cell| c.lo).sum();
            hi = heap.iter().chain(&stuck).map(|c: &Cell| c.hi).sum();
        }
        let radius = 0.5 * (hi - lo) * scale.hi;
        if radius.is_finite() && radius <= tol {
            break;
        }
        if cells >= max_cells {
            break;
        }
        let Some(cell) = heap.pop() else { break };
        let m = split_point(&cs[cell.chart], cell.a, cell.b);
        if !(m > cell.a && m < cell.b) {
            stuck.push(cell);
            continue;
        }
        let l = enclose(&cs[cell.chart], cell.chart, cell.a, m, alpha);
        let r = enclose(&cs[cell.chart], cell.chart, m, cell.b, alpha);
        lo += l.lo + r.lo - cell.lo;
        hi += l.hi + r.hi - cell.hi;
        heap.push(l);
        heap.push(r);
        cells += 1;
    }
    lo = heap.iter().chain(&stuck).map(|c| c.lo).sum();
    hi = heap.iter().chain(&stuck).map(|c| c.hi).sum();
    // Summation error: at most one ulp of the total per cell.
    let slack = hi * f64::EPSILON * cells as f64;
    let (lo, hi) = ((lo - slack).max(0.0) * scale.lo, (hi + slack) * scale.hi);
    if !hi.is_finite() {
        return Err(Error::Undecided("quadrature could not separate the zeros of F".into()));
    }
    Ok(AreaEstimate {
        value: 0.5 * (lo + hi),
        radius: 0.5 * (hi - lo),
        method: AreaMethod::Quadrature,
        seed: None,
        work: cells as u64,
    })
}

/// Default cell budget for quadrature.
pub const DEFAULT_MAX_CELLS: usize = 2_000_000;

/// `σ_F` with rigorous radius at most `tol` (or the best reached within the
/// default cell budget).
pub fn sigma_archimedean(form: &BinaryForm, tol: f64) -> Result<AreaEstimate> {
    area_sublevel(form, 1.0, tol, DEFAULT_MAX_CELLS)
}

/// Samples per independently seeded Monte Carlo block.
const MC_BLOCK: u64 = 1 << 16;

/// Importance-sampled `σ_F`.
///
/// Each chart draws from a mixture of the uniform density on `[−1, 1]` and
/// densities `∝ |t − θ|^{−2/n}` around every real zero `θ` near the chart, so
/// the weights stay bounded and the variance finite. Block `i` uses the
/// ChaCha8 stream `i` of `seed`, so the estimate does not depend on threads.
pub fn sigma_monte_carlo(form: &BinaryForm, samples: u64, seed: u64) -> Result<AreaEstimate> {
    check_form(form)?;
    if samples == 0 {
        return Err(Error::Domain("at least one sample is needed".into()));
    }
    let n = form.degree();
    let alpha = 2.0 / n as f64;
    let polys: Vec<Vec<f64>> = charts(form).iter().map(|p| p.to_f64()).collect();
    let centres: Vec<Vec<f64>> = polys
        .iter()
        .map(|c| real_roots_f64(c).into_iter().filter(|x| x.abs() <= 1.5).collect())
        .collect();
    const R: f64 = 2.5;
    let density = |chart: usize, t: f64| -> f64 {
        let k = centres[chart].len() as f64 + 1.0;
        let mut d = if t.abs() <= 1.0 { 0.5 } else { 0.0 };
        for &th in &centres[chart] {
            let u = (t - th).abs();
            if u <= R {
                d += (1.0 - alpha) / (2.0 * R.powf(1.0 - alpha)) * u.powf(-alpha);
            }
        }
        d / k
    };
    let blocks = samples.div_ceil(MC_BLOCK);
    let sums = exec::map_ordered((0..blocks).collect::<Vec<_>>(), |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b);
        let count = MC_BLOCK.min(samples - b * MC_BLOCK);
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..count {
            let mut total = 0.0;
            for (chart, c) in polys.iter().enumerate() {
                let k = centres[chart].len() + 1;
                let comp = rng.gen_range(0..k);
                let t = if comp == 0 {
                    rng.gen_range(-1.0..=1.0)
                } else {
                    let th = centres[chart][comp - 1];
                    let u: f64 = rng.gen();
                    let dist = R * u.powf(1.0 / (1.0 - alpha));
                    if rng.gen::<bool>() {
                        th + dist
                    } else {
                        th - dist
                    }
                };
                if t.abs() <= 1.0 {
                    let v = c.iter().rev().fold(0.0, |acc, &a| acc * t + a).abs();
                    if v > 0.0 {
                        total += v.powf(-alpha) / density(chart, t);
                    }
                }
            }
            s1 += total;
            s2 += total * total;
        }
        (s1, s2)
    });
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let nn = samples as f64;
    let mean = s1 / nn;
    let var = (s2 / nn - mean * mean).max(0.0) * nn / (nn - 1.0).max(1.0);
    Ok(AreaEstimate {
        value: mean,
        radius: 2.5758293035489 * (var / nn).sqrt(),
        method: AreaMethod::MonteCarlo,
        seed: Some(seed),
        work: samples,
    })
}

/// `σ_{F,S} = σ_F · ∏_{P∈S} s_P` with each `s_P` truncated at `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaS {
    pub value: f64,
    /// Half-width of an interval containing the untruncated product.
    pub radius: f64,
    pub archimedean: AreaEstimate,
    /// `(P, s_P truncated, tail bound)`.
    pub local: Vec<(u64, f64, f64)>,
}

pub fn sigma_s(form: &BinaryForm, s: &PrimeSet, jmax: u32, tol: f64) -> Result<SigmaS> {
    let arch = sigma_archimedean(form, tol)?;
    let mut local = Vec::new();
    let (mut mid, mut lo, mut hi) = (arch.value, arch.lo(), arch.hi());
    for &p in s.primes() {
        let lf = local_factor(form, p, jmax)?;
        mid *= lf.value;
        lo *= lf.value;
        hi *= lf.value + lf.tail_bound;
        local.push((p, lf.value, lf.tail_bound));
    }
    let radius = (hi - mid).max(mid - lo) * (1.0 + 1e-12);
    Ok(SigmaS {
        value: mid,
        radius,
        archimedean: arch,
        local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_cubic() -> BinaryForm {
        BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap()
    }

    /// Independent oracle: midpoint rule after the substitution
    /// `t − θ = ±u^{n/(n−2)}` that removes each singularity, on `ℝ` directly.
    fn oracle_sigma_pure_cubic() -> f64 {
        // σ = ∫ |t³ − 2|^{−2/3} dt over ℝ. With t = 2^{1/3}x, this is
        // 2^{−1/3} ∫ |x³ − 1|^{−2/3} dx; split at the root x = 1 and use
        // x = 1 ± u³ near it.
        let g = |x: f64| (x * x * x - 1.0).abs().powf(-2.0 / 3.0);
        let mut s = 0.0;
        let m = 2_000_000;
        // x ∈ [1 − 1, 1 + 1]: x = 1 ± u³, dx = 3u² du, u ∈ [0, 1].
        for i in 0..m {
            let u = (i as f64 + 0.5) / m as f64;
            // (1 + v)³ − 1 = v(3 + 3v + v²) and |v|^{−2/3}·3u² = 3 for v = ±u³.
            let h = |v: f64| 3.0 * (3.0 + 3.0 * v + v * v).abs().powf(-2.0 / 3.0);
            s += (h(u * u * u) + h(-u * u * u)) / m as f64;
        }
        // |x| > 2 and x ∈ [−∞, 0]: x = ±1/v with dx = dv/v², v ∈ (0, 1/2].
        for i in 0..m {
            let v = 0.5 * (i as f64 + 0.5) / m as f64;
            let w = 0.5 / m as f64 / (v * v);
            s += (g(1.0 / v) + g(-1.0 / v)) * w;
        }
        // x ∈ [−2, 0].
        for i in 0..m {
            let x = -2.0 * (i as f64 + 0.5) / m as f64;
            s += g(x) * 2.0 / m as f64;
        }
        2f64.powf(-1.0 / 3.0) * s
    }

    #[test]
    fn quadrature_matches_oracle() {
        let q = sigma_archimedean(&pure_cubic(), 1e-4).unwrap();
        assert!(q.radius <= 1e-4);
        let o = oracle_sigma_pure_cubic();
        assert!((q.value - o).abs() <= q.radius + 1e-5, "{} vs {o}", q.value);
        // For a cubic of negative discriminant D the area is √3·B(1/3, 1/3)/|D|^{1/6}.
        let (g13, g23) = (2.678_938_534_707_747_6, 1.354_117_939_426_400_4);
        let closed = 3f64.sqrt() * g13 * g13 / g23 / 108f64.powf(1.0 / 6.0);
        assert!((q.value - closed).abs() <= q.radius + 1e-12, "{} vs {closed}", q.value);
    }

    #[test]
    fn monte_carlo_agrees() {
        let f = pure_cubic();
        let q = sigma_archimedean(&f, 1e-4).unwrap();
        let mc = sigma_monte_carlo(&f, 400_000, 7).unwrap();
        assert!((q.value - mc.value).abs() <= q.radius + mc.radius, "{q:?} {mc:?}");
        assert_eq!(mc, sigma_monte_carlo(&f, 400_000, 7).unwrap());
    }

    #[test]
    fn scaling_law() {
        let f = pure_cubic();
        let s1 = area_sublevel(&f, 1.0, 1e-4, DEFAULT_MAX_CELLS).unwrap();
        for t in [8.0, 32.0] {
            let st = area_sublevel(&f, t, 1e-3, DEFAULT_MAX_CELLS).unwrap();
            let k = t.powf(2.0 / 3.0);
            assert!((st.value / k - s1.value).abs() <= st.radius / k + s1.radius);
        }
    }

    #[test]
    fn unimodular_invariance() {
        let f = BinaryForm::from_i64(&[1, -1, -2, 1]).unwrap();
        let m = crate::forms::UnimodularMap::new_i64(2, 1, 1, 1).unwrap();
        let g = f.apply_map(&m);
        let a = sigma_archimedean(&f, 1e-4).unwrap();
        let b = sigma_archimedean(&g, 1e-4).unwrap();
        assert!((a.value - b.value).abs() <= a.radius + b.radius);
    }

    #[test]
    fn discriminant_area_bound_pure_cubic() {
        let q = sigma_archimedean(&pure_cubic(), 1e-3).unwrap();
        let cap = 16.0 * 108f64.powf(-1.0 / 6.0);
        assert!(q.hi() <= cap && cap < 7.34);
    }

    #[test]
    fn sigma_s_examples() {
        let f = pure_cubic();
        let s = sigma_s(&f, &PrimeSet::empty(), 6, 1e-4).unwrap();
        assert_eq!(s.value, s.archimedean.value);
        // x³ − 2 has no root in ℚ₇? It has none mod 7, and 7 ∤ 6: s₇ = m_{7,0}.
        let s7 = sigma_s(&f, &PrimeSet::new(vec![7]).unwrap(), 6, 1e-4).unwrap();
        let ratio = s7.value / s.value;
        assert!((ratio - 48.0 / 49.0).abs() < 1e-12);
        let a = local_factor(&f, 5, 4).unwrap().value;
        let b = local_factor(&f, 5, 5).unwrap().value;
        assert!(b >= a);
    }

    #[test]
    fn degenerate_forms_rejected() {
        let f = BinaryForm::from_i64(&[1, -2, 1, 0]).unwrap();
        assert!(sigma_archimedean(&f, 1e-3).is_err());
    }
}

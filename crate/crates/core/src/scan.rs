//! Exact sublevel sets of a binary form along rows of fixed `q`.
//!
//! For fixed `q ≠ 0`, `g(p) = F(p, q) = qⁿ f(p/q)` has its critical points at
//! `p = q·c` for the real critical points `c` of `f = F(·, 1)`. Those are
//! isolated once per form with Sturm sequences and kept as f64 enclosures;
//! every row then splits into small windows around them (evaluated point by
//! point) and monotone pieces in between, where `{p : lo ≤ g(p) ≤ hi}` is an
//! interval found by galloping binary search with exact integer evaluation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::forms::BinaryForm;
use crate::poly::isolate_real_roots;

/// Per-form data for row scans.
#[derive(Debug, Clone)]
pub struct RowScanner {
    form: BinaryForm,
    coeffs: Option<Vec<i128>>,
    /// Enclosures of the real critical points of `f`.
    crit: Vec<(f64, f64)>,
    /// Approximate real roots of `f` (search starting points only).
    roots: Vec<f64>,
}

/// `F(·, q)` with coefficients `aᵢqⁱ`, highest power of `p` first.
struct Row {
    q: i64,
    small: Option<Vec<i128>>,
}

impl RowScanner {
    pub fn new(form: &BinaryForm) -> Self {
        let coeffs = form.coeffs().iter().map(|c| c.to_i128()).collect();
        let f = form.dehomogenize();
        let fine = BigRational::new(BigInt::one(), BigInt::one() << 60);
        let crit = isolate_real_roots(&f.derivative())
            .into_iter()
            .map(|mut r| {
                r.refine_to(&fine);
                let lo = r.lo.to_f64().unwrap();
                let hi = r.hi.to_f64().unwrap();
                (lo.next_down(), hi.next_up())
            })
            .collect();
        let roots = isolate_real_roots(&f)
            .into_iter()
            .map(|mut r| {
                r.refine_to(&fine);
                r.midpoint_f64()
            })
            .collect();
        Self {
            form: form.clone(),
            coeffs,
            crit,
            roots,
        }
    }

    pub fn form(&self) -> &BinaryForm {
        &self.form
    }

    fn row(&self, q: i64) -> Row {
        let small = self.coeffs.as_ref().and_then(|a| {
            let mut qp: i128 = 1;
            let mut out = Vec::with_capacity(a.len());
            for (i, &c) in a.iter().enumerate() {
                if i > 0 {
                    qp = qp.checked_mul(q as i128)?;
                }
                out.push(c.checked_mul(qp)?);
            }
            Some(out)
        });
        Row { q, small }
    }

    /// `F(p, q)`, saturated to the i128 range (exact whenever it fits).
    fn eval(&self, row: &Row, p: i64) -> i128 {
        if let Some(b) = &row.small {
            let mut acc: i128 = 0;
            let mut ok = true;
            for &c in b {
                match acc.checked_mul(p as i128).and_then(|x| x.checked_add(c)) {
                    Some(x) => acc = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return acc;
            }
        }
        let v = self.form.eval_i64(p, row.q);
        v.to_i128()
            .unwrap_or(if v > BigInt::zero() { i128::MAX } else { i128::MIN })
    }

    /// Calls `visit(p, F(p,q))` for every `p ∈ [pmin, pmax]` with
    /// `lo ≤ F(p,q) ≤ hi`, in increasing order of `p`.
    pub fn scan_row(&self, q: i64, lo: i128, hi: i128, pmin: i64, pmax: i64, visit: &mut dyn FnMut(i64, i128)) {
        if pmin > pmax || lo > hi {
            return;
        }
        let row = self.row(q);
        let n = self.form.degree();
        let leading_zero = self.form.coeffs()[0].is_zero();
        if q == 0 && leading_zero {
            // F(p, 0) ≡ 0
            if lo <= 0 && 0 <= hi {
                for p in pmin..=pmax {
                    visit(p, 0);
                }
            }
            return;
        }
        if q != 0 && self.form.dehomogenize().degree() == Some(0) {
            let v = self.eval(&row, 0);
            if lo <= v && v <= hi {
                for p in pmin..=pmax {
                    visit(p, v);
                }
            }
            return;
        }
        let mut windows: Vec<(i64, i64)> = if q == 0 {
            if n >= 2 {
                vec![(-2, 2)]
            } else {
                Vec::new()
            }
        } else {
            let qf = q as f64;
            self.crit
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (qf * a, qf * b);
                    let (x, y) = (x.min(y), x.max(y));
                    (
                        (x.floor() as i64).saturating_sub(2),
                        (y.ceil() as i64).saturating_add(2),
                    )
                })
                .collect()
        };
        windows.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::new();
        for (a, b) in windows {
            let (a, b) = (a.max(pmin), b.min(pmax));
            if a > b {
                continue;
            }
            match merged.last_mut() {
                Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let mut cursor = pmin;
        for (a, b) in merged {
            if cursor < a {
                self.monotone(&row, lo, hi, cursor, a - 1, visit);
            }
            for p in a..=b {
                let v = self.eval(&row, p);
                if lo <= v && v <= hi {
                    visit(p, v);
                }
            }
            cursor = b + 1;
        }
        if cursor <= pmax {
            self.monotone(&row, lo, hi, cursor, pmax, visit);
        }
    }

    fn monotone(&self, row: &Row, lo: i128, hi: i128, a: i64, b: i64, visit: &mut dyn FnMut(i64, i128)) {
        let ga = self.eval(row, a);
        let gb = self.eval(row, b);
        let inc = ga <= gb;
        let (gmin, gmax) = if inc { (ga, gb) } else { (gb, ga) };
        if gmax < lo || gmin > hi {
            return;
        }
        let guess = self
            .roots
            .iter()
            .map(|&t| t * row.q as f64)
            .find(|&x| x >= a as f64 && x <= b as f64)
            .map(|x| x.round() as i64)
            .unwrap_or(if ga.unsigned_abs() <= gb.unsigned_abs() { a } else { b });
        let (first, last) = if inc {
            (
                find_first(a, b, guess, |p| self.eval(row, p) >= lo),
                find_first(a, b, guess, |p| self.eval(row, p) > hi) - 1,
            )
        } else {
            (
                find_first(a, b, guess, |p| self.eval(row, p) <= hi),
                find_first(a, b, guess, |p| self.eval(row, p) < lo) - 1,
            )
        };
        for p in first..=last {
            visit(p, self.eval(row, p));
        }
    }
}

/// Smallest `p ∈ [a, b]` with `pred(p)` for a predicate that is false then
/// true on `[a, b]`; `b + 1` if it is never true. Gallops out from `guess`.
fn find_first(a: i64, b: i64, guess: i64, pred: impl Fn(i64) -> bool) -> i64 {
    let g = guess.clamp(a, b);
    let (mut lo, mut hi);
    if pred(g) {
        hi = g;
        lo = a - 1;
        let mut step = 1i64;
        loop {
            let c = g.saturating_sub(step);
            if c < a {
                break;
            }
            if !pred(c) {
                lo = c;
                break;
            }
            hi = c;
            step = step.saturating_mul(2);
        }
    } else {
        lo = g;
        hi = b + 1;
        let mut step = 1i64;
        loop {
            let c = g.saturating_add(step);
            if c > b {
                break;
            }
            if pred(c) {
                hi = c;
                break;
            }
            lo = c;
            step = step.saturating_mul(2);
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(f: &BinaryForm, q: i64, lo: i128, hi: i128, r: i64) -> Vec<(i64, i128)> {
        (-r..=r)
            .filter_map(|p| {
                let v = f.eval_i128(p as i128, q as i128).unwrap();
                (lo <= v && v <= hi).then_some((p, v))
            })
            .collect()
    }

    fn scan(f: &BinaryForm, q: i64, lo: i128, hi: i128, r: i64) -> Vec<(i64, i128)> {
        let s = RowScanner::new(f);
        let mut out = Vec::new();
        s.scan_row(q, lo, hi, -r, r, &mut |p, v| out.push((p, v)));
        out
    }

    #[test]
    fn find_first_edges() {
        for guess in [-10, 0, 3, 7, 20] {
            assert_eq!(find_first(0, 10, guess, |p| p >= 4), 4);
            assert_eq!(find_first(0, 10, guess, |_| false), 11);
            assert_eq!(find_first(0, 10, guess, |_| true), 0);
        }
    }

    #[test]
    fn rows_of_pure_cubic() {
        let f = BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap();
        for q in [-7, -1, 0, 1, 2, 13, 100] {
            assert_eq!(scan(&f, q, -1000, 1000, 300), brute(&f, q, -1000, 1000, 300));
            assert_eq!(scan(&f, q, 1, 1, 300), brute(&f, q, 1, 1, 300));
        }
    }

    #[test]
    fn degenerate_rows() {
        let xy = BinaryForm::from_i64(&[0, 1, 1, 0]).unwrap();
        for q in [-3, 0, 1, 5] {
            assert_eq!(scan(&xy, q, -20, 20, 40), brute(&xy, q, -20, 20, 40));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn scan_matches_brute_force(
            c in prop::collection::vec(-7i64..=7, 4..=6),
            q in -30i64..=30,
            lo in -500i128..=500,
            w in 0i128..2000,
        ) {
            let f = match BinaryForm::from_i64(&c) { Ok(f) => f, Err(_) => return Ok(()) };
            prop_assert_eq!(scan(&f, q, lo, lo + w, 120), brute(&f, q, lo, lo + w, 120));
        }
    }
}

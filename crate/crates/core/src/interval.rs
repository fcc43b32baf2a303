//! Closed f64 intervals with outward rounding.
//!
//! Every operation widens its result by one ulp on each side, which covers the
//! round-to-nearest error of the underlying f64 operation. Transcendental
//! functions (`powf`) are widened by a few ulps relative, enough for libm's
//! documented error.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Enclosure of an integer that may not be representable in f64.
    pub fn from_bigint(v: &BigInt) -> Self {
        let x = v.to_f64().unwrap_or(f64::NAN);
        if BigInt::from(x as i128) == *v && x.abs() < 1e38 {
            return Self::point(x);
        }
        Self::new(x.next_down(), x.next_up())
    }

    fn outward(lo: f64, hi: f64) -> Self {
        Self {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    /// Smallest and largest absolute value over the interval.
    pub fn abs_bounds(&self) -> (f64, f64) {
        if self.contains_zero() {
            (0.0, self.lo.abs().max(self.hi.abs()))
        } else {
            let (a, b) = (self.lo.abs(), self.hi.abs());
            (a.min(b), a.max(b))
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Enclosure of `x^e` for `e` real, on a strictly positive interval.
    pub fn powf_pos(&self, e: f64) -> Interval {
        debug_assert!(self.lo > 0.0);
        let a = self.lo.powf(e);
        let b = self.hi.powf(e);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        const REL: f64 = 8.0 * f64::EPSILON;
        Interval::outward(lo * (1.0 - REL), hi * (1.0 + REL))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::outward(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::outward(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::outward(lo, hi)
    }
}

/// Interval Horner evaluation; `coeffs` lowest degree first.
pub fn horner(coeffs: &[Interval], x: Interval) -> Interval {
    coeffs.iter().rev().fold(Interval::point(0.0), |acc, &c| acc * x + c)
}

//! Binary forms `F(X,Y) = a₀Xⁿ + a₁Xⁿ⁻¹Y + ⋯ + aₙYⁿ` over ℤ.

mod factor;
mod modp;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

pub use factor::{factor_z, squarefree_decomposition};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Integer binary form; coefficients stored highest X-power first.
///
/// Coefficients are kept exactly as given: dividing out the content is an
/// explicit operation ([`BinaryForm::primitive`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidDegree("a binary form needs degree at least 1".into()));
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidInput("the zero form".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `a₀, …, aₙ`, highest X-power first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `F(p, q)`, exactly.
    pub fn eval(&self, p: &BigInt, q: &BigInt) -> BigInt {
        // Homogeneous Horner: ((a₀p + a₁q)p + a₂q²)p + …
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        let n = self.degree();
        let mut terms = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            terms.push(qpow.clone());
            qpow *= q;
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            acc = acc * p + a * &terms[i];
        }
        acc
    }

    pub fn eval_i64(&self, p: i64, q: i64) -> BigInt {
        self.eval(&BigInt::from(p), &BigInt::from(q))
    }

    /// `F(p, q)` in i128, `None` on overflow.
    pub fn eval_i128(&self, p: i128, q: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        let mut qpow: i128 = 1;
        for (i, a) in self.coeffs.iter().enumerate() {
            let a = a.to_i128()?;
            if i > 0 {
                qpow = qpow.checked_mul(q)?;
            }
            acc = acc.checked_mul(p)?.checked_add(a.checked_mul(qpow)?)?;
        }
        Some(acc)
    }

    /// `f(x) = F(x, 1)` as a univariate polynomial.
    pub fn dehomogenize(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    /// `F(1, y)` as a univariate polynomial in y.
    pub fn dehomogenize_y(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    /// `F(Y, X)`.
    pub fn swapped(&self) -> BinaryForm {
        let mut c = self.coeffs.clone();
        c.reverse();
        BinaryForm { coeffs: c }
    }

    /// Height `H(F) = maxᵢ |aᵢ|`.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn primitive(&self) -> BinaryForm {
        let g = self.content();
        BinaryForm {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    /// `F(aX + bY, cX + dY)`.
    pub fn apply_map(&self, m: &UnimodularMap) -> BinaryForm {
        let n = self.degree();
        // Work in y = Y/X: aX+bY ↦ a + b·y, cX+dY ↦ c + d·y.
        let lx = Poly::new(vec![m.a.clone(), m.b.clone()]);
        let ly = Poly::new(vec![m.c.clone(), m.d.clone()]);
        let mut acc = vec![BigInt::zero(); n + 1];
        for (i, ai) in self.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let term = lx.pow((n - i) as u32).mul(&ly.pow(i as u32)).scale(ai);
            for (k, c) in term.coeffs().iter().enumerate() {
                acc[k] += c;
            }
        }
        BinaryForm { coeffs: acc }
    }

    /// Discriminant `D(F)`.
    ///
    /// For `a₀ ≠ 0` this is `(−1)^{n(n−1)/2} a₀⁻¹ Res(f, f′)` with `f = F(X,1)`;
    /// otherwise `F` is first moved by `Y ↦ uX + Y`, which preserves `D`.
    /// The sign convention makes `D(aX²+bXY+cY²) = b² − 4ac` and matches the
    /// usual cubic formula.
    pub fn discriminant(&self) -> Result<BigInt> {
        let n = self.degree();
        if n < 2 {
            return Err(Error::InvalidDegree(format!("discriminant needs degree ≥ 2, got {n}")));
        }
        if self.coeffs[0].is_zero() {
            let u = (0..=n as i64)
                .find(|&u| !self.eval_i64(1, u).is_zero())
                .expect("a non-zero form has at most n zeros on the line X = 1");
            let shifted = self.apply_map(&UnimodularMap::new_i64(1, 0, u, 1)?);
            return shifted.discriminant();
        }
        let f = self.dehomogenize();
        let res = resultant(&f, &f.derivative());
        let (q, r) = res.div_rem(&self.coeffs[0]);
        debug_assert!(r.is_zero());
        let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
        Ok(q * sign)
    }

    /// Irreducible factorisation over ℚ as primitive integer forms.
    pub fn factor_over_q(&self) -> FormFactorization {
        let n = self.degree();
        let e = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let f = self.dehomogenize();
        let (mut content, fs) = factor_z(&f);
        let mut factors: Vec<(BinaryForm, u32)> = fs
            .into_iter()
            .map(|(g, m)| {
                let mut c = g.coeffs().to_vec();
                c.reverse();
                (BinaryForm { coeffs: c }, m)
            })
            .collect();
        if e > 0 {
            factors.insert(
                0,
                (
                    BinaryForm {
                        coeffs: vec![BigInt::zero(), BigInt::one()],
                    },
                    e as u32,
                ),
            );
        }
        if self.coeffs[e].is_negative() != content.is_negative() {
            content = -content;
        }
        debug_assert_eq!(factors.iter().map(|(g, m)| g.degree() * *m as usize).sum::<usize>(), n);
        FormFactorization { content, factors }
    }

    /// Irreducible over ℚ (content is ignored).
    pub fn is_irreducible(&self) -> bool {
        let fz = self.factor_over_q();
        fz.factors.len() == 1 && fz.factors[0].1 == 1
    }

    /// Whether `F` has a factor of degree one over ℚ (a rational zero on ℙ¹).
    pub fn has_linear_factor(&self) -> bool {
        self.factor_over_q().factors.iter().any(|(g, _)| g.degree() == 1)
    }

    /// Finds the lexicographically smallest `(u, v)` with `F(1,u) ≠ 0` and
    /// `F(v, uv+1) ≠ 0`, and returns `G = F(X + vY, uX + (uv+1)Y)`, which has
    /// `G(1,0)·G(0,1) ≠ 0`.
    ///
    /// The search runs over `{0,…,n}²`: the range `{0,…,n−1}` alone can fail,
    /// e.g. for `Y(Y−X)(Y−2X)`.
    pub fn normalize_nonvanishing(&self) -> Normalized {
        let n = self.degree() as i64;
        for u in 0..=n {
            if self.eval_i64(1, u).is_zero() {
                continue;
            }
            for v in 0..=n {
                if self.eval_i64(v, u * v + 1).is_zero() {
                    continue;
                }
                let map = UnimodularMap::new_i64(1, v, u, u * v + 1).expect("det = 1");
                return Normalized {
                    form: self.apply_map(&map),
                    u,
                    v,
                    map,
                };
            }
        }
        unreachable!("F(1,u) and F(v,uv+1) are non-zero polynomials of degree ≤ n")
    }
}

/// Output of [`BinaryForm::normalize_nonvanishing`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalized {
    pub form: BinaryForm,
    pub u: i64,
    pub v: i64,
    pub map: UnimodularMap,
}

/// `F = content · ∏ Gᵢ^{mᵢ}` with primitive irreducible `Gᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormFactorization {
    #[serde(with = "crate::json::int")]
    pub content: BigInt,
    pub factors: Vec<(BinaryForm, u32)>,
}

impl FormFactorization {
    /// Multiplies the factorisation back out.
    pub fn expand(&self) -> BinaryForm {
        let mut acc = Poly::new(vec![self.content.clone()]);
        for (g, m) in &self.factors {
            // In y = Y/X the homogeneous product is an ordinary product.
            acc = acc.mul(&g.dehomogenize_y().pow(*m));
        }
        let n: usize = self.factors.iter().map(|(g, m)| g.degree() * *m as usize).sum();
        let mut c = acc.coeffs().to_vec();
        c.resize(n + 1, BigInt::zero());
        BinaryForm { coeffs: c }
    }
}

/// Determinant of an integer matrix (Bareiss, fraction-free).
fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester resultant of two non-zero polynomials.
pub fn resultant(f: &Poly, g: &Poly) -> BigInt {
    let m = f.degree().expect("non-zero");
    let n = g.degree().expect("non-zero");
    if m + n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    let fc: Vec<BigInt> = f.coeffs().iter().rev().cloned().collect();
    let gc: Vec<BigInt> = g.coeffs().iter().rev().cloned().collect();
    for i in 0..n {
        for (j, c) in fc.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in gc.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    determinant(rows)
}

/// Integer substitution `X ↦ aX + bY`, `Y ↦ cX + dY` with `ad − bc = ±1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMap {
    #[serde(with = "crate::json::int")]
    pub a: BigInt,
    #[serde(with = "crate::json::int")]
    pub b: BigInt,
    #[serde(with = "crate::json::int")]
    pub c: BigInt,
    #[serde(with = "crate::json::int")]
    pub d: BigInt,
}

impl UnimodularMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if det.abs() != BigInt::one() {
            return Err(Error::NonUnimodular(det.to_string()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn new_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::new_i64(1, 0, 0, 1).unwrap()
    }

    pub fn determinant(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// `M·(p, q) = (ap + bq, cp + dq)`.
    pub fn apply(&self, p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
        (&self.a * p + &self.b * q, &self.c * p + &self.d * q)
    }

    pub fn inverse(&self) -> Self {
        let det = self.determinant();
        Self {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        }
    }
}

// ----------------------------------------------------------- serialisation

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&crate::json::Int(c.clone()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = BinaryForm;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of integer coefficients (strings or numbers)")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<BinaryForm, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(v) = seq.next_element::<serde_json::Value>()? {
                    let c = match &v {
                        serde_json::Value::String(s) => s.trim().parse::<BigInt>().ok(),
                        serde_json::Value::Number(n) => {
                            n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from))
                        }
                        _ => None,
                    }
                    .ok_or_else(|| de::Error::custom(format!("bad coefficient {v}")))?;
                    coeffs.push(c);
                }
                BinaryForm::new(coeffs).map_err(de::Error::custom)
            }
        }
        d.deserialize_seq(V)
    }
}

impl std::str::FromStr for BinaryForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("form {s:?}: {e}")))
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (px, py) = (n - i, i);
            let mag = a.abs();
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if a.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if !mag.is_one() || (px == 0 && py == 0) {
                write!(f, "{mag}")?;
            }
            for (var, e) in [("X", px), ("Y", py)] {
                match e {
                    0 => {}
                    1 => write!(f, "{var}")?,
                    _ => write!(f, "{var}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn cubic_disc(a: i64, b: i64, c: i64, d: i64) -> i64 {
        18 * a * b * c * d - 4 * b.pow(3) * d + b * b * c * c - 4 * a * c.pow(3) - 27 * a * a * d * d
    }

    #[test]
    fn eval_examples() {
        let f = form(&[1, 0, 0, -2]);
        assert_eq!(f.eval_i64(1, 1), BigInt::from(-1));
        assert_eq!(f.eval_i64(0, 0), BigInt::zero());
        assert_eq!(form(&[0, 1, 1, 0]).eval_i64(1, 1), BigInt::from(2));
        assert_eq!(f.eval_i128(5, 4), Some(-3));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(form(&[1, 0, 0, -2]).discriminant().unwrap(), BigInt::from(-108));
        assert_eq!(form(&[0, 1, 1, 0]).discriminant().unwrap(), BigInt::one());
        assert_eq!(form(&[1, 0, 0, 0]).discriminant().unwrap(), BigInt::zero());
        assert_eq!(form(&[1, 3, 5]).discriminant().unwrap(), BigInt::from(9 - 20));
        assert!(form(&[1, 2]).discriminant().is_err());
    }

    #[test]
    fn height_examples() {
        assert_eq!(form(&[1, 0, 0, -2]).height(), BigInt::from(2));
        assert_eq!(form(&[0, 1, 1, 0]).height(), BigInt::one());
        assert_eq!(form(&[7, 0, -3, 0, 1]).height(), BigInt::from(7));
    }

    #[test]
    fn factor_examples() {
        assert!(form(&[1, 0, 0, -2]).is_irreducible());
        let f5 = form(&[1, 0, 0, 0, 0, 1]).factor_over_q();
        assert_eq!(f5.factors, vec![(form(&[1, 1]), 1), (form(&[1, -1, 1, -1, 1]), 1)]);
        let xy = form(&[0, 1, 1, 0]).factor_over_q();
        assert_eq!(xy.factors.len(), 3);
        assert!(xy.factors.iter().all(|(g, m)| g.degree() == 1 && *m == 1));
        assert_eq!(xy.expand(), form(&[0, 1, 1, 0]));
        let neg = form(&[-2, 0, 0, 4]).factor_over_q();
        assert_eq!(neg.content, BigInt::from(-2));
        assert_eq!(neg.expand(), form(&[-2, 0, 0, 4]));
    }

    #[test]
    fn normalize_examples() {
        let f = form(&[1, 0, 0, -2]);
        let n = f.normalize_nonvanishing();
        assert_eq!((n.u, n.v), (0, 0));
        assert_eq!(n.form, f);
        for c in [[0, 1, 1, 0], [0, 1, 0, 0]] {
            let g = form(&c).normalize_nonvanishing();
            assert!(!g.form.coeffs()[0].is_zero());
            assert!(!g.form.coeffs()[3].is_zero());
            // brute-force the rule
            let f = form(&c);
            let first = (0..=3i64)
                .flat_map(|u| (0..=3i64).map(move |v| (u, v)))
                .find(|&(u, v)| !f.eval_i64(1, u).is_zero() && !f.eval_i64(v, u * v + 1).is_zero())
                .unwrap();
            assert_eq!((g.u, g.v), first);
        }
        // Y(Y-X)(Y-2X): no u in {0,1,2} works
        let hard = form(&[0, 2, -3, 1]);
        let g = hard.normalize_nonvanishing();
        assert_eq!(g.u, 3);
        assert!(!g.form.coeffs()[0].is_zero() && !g.form.coeffs()[3].is_zero());
    }

    #[test]
    fn apply_map_examples() {
        let f = form(&[1, 0, 0, -2]);
        assert_eq!(f.apply_map(&UnimodularMap::identity()), f);
        let shear = UnimodularMap::new_i64(1, 1, 0, 1).unwrap();
        let g = f.apply_map(&shear);
        // (X+Y)^3 - 2Y^3 = X^3 + 3X^2Y + 3XY^2 - Y^3
        assert_eq!(g, form(&[1, 3, 3, -1]));
        assert_eq!(g.discriminant().unwrap(), BigInt::from(cubic_disc(1, 3, 3, -1)));
        assert_eq!(g.discriminant().unwrap(), BigInt::from(-108));
        let swap = UnimodularMap::new_i64(0, 1, 1, 0).unwrap();
        assert_eq!(form(&[0, 1, 0]).apply_map(&swap), form(&[0, 1, 0]));
        assert!(UnimodularMap::new_i64(2, 0, 0, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = form(&[1, 0, 0, -2]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[1,0,0,-2]");
        assert_eq!(serde_json::from_str::<BinaryForm>(&s).unwrap(), f);
        assert_eq!("[1,0,0,-2]".parse::<BinaryForm>().unwrap(), f);
        assert!("[0,0,0]".parse::<BinaryForm>().is_err());
        assert_eq!(f.to_string(), "X^3 - 2Y^3");
    }

    fn small_form() -> impl Strategy<Value = BinaryForm> {
        prop::collection::vec(-6i64..=6, 4..=5).prop_filter_map("non-zero", |c| BinaryForm::from_i64(&c).ok())
    }

    fn small_map() -> impl Strategy<Value = UnimodularMap> {
        (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
            .prop_filter_map("unimodular", |(a, b, c, d)| UnimodularMap::new_i64(a, b, c, d).ok())
    }

    proptest! {
        #[test]
        fn discriminant_is_unimodular_invariant(f in small_form(), m in small_map()) {
            let d1 = f.discriminant().unwrap();
            let d2 = f.apply_map(&m).discriminant().unwrap();
            prop_assert_eq!(d1.abs(), d2.abs());
        }

        #[test]
        fn cubic_discriminant_matches_formula(a in -9i64..=9, b in -9i64..=9, c in -9i64..=9, d in -9i64..=9) {
            prop_assume!((a, b, c, d) != (0, 0, 0, 0));
            let f = form(&[a, b, c, d]);
            prop_assert_eq!(f.discriminant().unwrap(), BigInt::from(cubic_disc(a, b, c, d)));
        }

        #[test]
        fn eval_commutes_with_maps(f in small_form(), m in small_map(), p in -20i64..20, q in -20i64..20) {
            let (bp, bq) = (BigInt::from(p), BigInt::from(q));
            let (mp, mq) = m.apply(&bp, &bq);
            prop_assert_eq!(f.apply_map(&m).eval(&bp, &bq), f.eval(&mp, &mq));
        }

        #[test]
        fn factorisation_reassembles(f in small_form()) {
            prop_assert_eq!(f.factor_over_q().expand(), f);
        }

        #[test]
        fn normalized_ends_are_nonzero(f in small_form()) {
            let g = f.normalize_nonvanishing();
            prop_assert!(!g.form.eval_i64(1, 0).is_zero());
            prop_assert!(!g.form.eval_i64(0, 1).is_zero());
            prop_assert_eq!(g.form, f.apply_map(&g.map));
        }
    }
}

//! Factorisation in ℤ[x]: Yun's squarefree decomposition, then Zassenhaus
//! (factor modulo a small prime, Hensel-lift, recombine).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modp::{self, ModPoly};
use crate::arith::small_primes;
use crate::poly::Poly;

/// Squarefree decomposition of a primitive polynomial with positive leading
/// coefficient: pairs `(g_i, i)` with `f = ∏ g_i^i`, `g_i` squarefree and
/// pairwise coprime. Constant factors are dropped.
pub fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let a = f.primitive();
    if a.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let b = a.derivative();
    let c = a.gcd(&b);
    let mut w = a.div_exact(&c).expect("gcd divides").primitive();
    let mut y = b.div_exact(&c).expect("gcd divides derivative");
    let mut z = sub(&y, &w.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let g = w.gcd(&z);
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        w = w.div_exact(&g).expect("gcd divides").primitive();
        y = z.div_exact(&g).expect("gcd divides");
        z = sub(&y, &w.derivative());
        i += 1;
    }
    out
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.coeffs().len().max(b.coeffs().len());
    Poly::new(
        (0..n)
            .map(|i| a.coeffs().get(i).cloned().unwrap_or_default() - b.coeffs().get(i).cloned().unwrap_or_default())
            .collect(),
    )
}

/// Full factorisation over ℤ: `f = content · ∏ g^e` with primitive `g`
/// of positive leading coefficient, sorted by (degree, coefficients).
pub fn factor_z(f: &Poly) -> (BigInt, Vec<(Poly, u32)>) {
    assert!(!f.is_zero(), "factor_z(0)");
    let mut content = f.content();
    if f.leading().unwrap().is_negative() {
        content = -content;
    }
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for h in zassenhaus(&g) {
            out.push((h, e));
        }
    }
    out.sort_by(|(a, ea), (b, eb)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
            .then(ea.cmp(eb))
    });
    (content, out)
}

fn to_modp(f: &Poly, p: u64) -> ModPoly {
    let bp = BigInt::from(p);
    let mut v: ModPoly = f.coeffs().iter().map(|c| c.mod_floor(&bp).to_u64().unwrap()).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

// Polynomials modulo m = p^k with BigInt coefficients in [0, m).
type BigPoly = Vec<BigInt>;

fn bp_trim(mut a: BigPoly) -> BigPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn bp_reduce(a: &[BigInt], m: &BigInt) -> BigPoly {
    bp_trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn bp_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> BigPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    bp_reduce(&out, m)
}

fn bp_from_mod(a: &[u64]) -> BigPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn bp_add_scaled(a: &[BigInt], b: &[u64], scale: &BigInt, m: &BigInt) -> BigPoly {
    let n = a.len().max(b.len());
    let v: BigPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + scale * BigInt::from(b.get(i).copied().unwrap_or(0)))
        .collect();
    bp_reduce(&v, m)
}

/// Lifts `f ≡ a·b (mod p)` with `a` monic to a factorisation modulo `p^k`.
fn hensel_two(f: &[BigInt], a0: &[u64], b0: &[u64], p: u64, k: u32) -> (BigPoly, BigPoly) {
    let (g, s, t) = modp::ext_gcd(a0, b0, p);
    debug_assert_eq!(g, vec![1]);
    let bigp = BigInt::from(p);
    let mk = bigp.pow(k);
    let mut a = bp_from_mod(a0);
    let mut b = bp_from_mod(b0);
    let mut pj = bigp.clone();
    for _ in 1..k {
        let ab = bp_mul(&a, &b, &mk);
        let n = f.len().max(ab.len());
        let e: ModPoly = {
            let v: Vec<u64> = (0..n)
                .map(|i| {
                    let d = f.get(i).cloned().unwrap_or_default() - ab.get(i).cloned().unwrap_or_default();
                    let (q, r) = d.div_rem(&pj);
                    debug_assert!(r.is_zero() || (r.mod_floor(&pj)).is_zero());
                    q.mod_floor(&bigp).to_u64().unwrap()
                })
                .collect();
            let mut v = v;
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        if !e.is_empty() {
            let (q, alpha) = modp::divrem(&modp::mul(&t, &e, p), a0, p);
            let beta = {
                let es = modp::mul(&e, &s, p);
                let qb = modp::mul(&q, b0, p);
                let n = es.len().max(qb.len());
                let mut v: ModPoly = (0..n)
                    .map(|i| (es.get(i).unwrap_or(&0) + qb.get(i).unwrap_or(&0)) % p)
                    .collect();
                while v.last() == Some(&0) {
                    v.pop();
                }
                v
            };
            a = bp_add_scaled(&a, &alpha, &pj, &mk);
            b = bp_add_scaled(&b, &beta, &pj, &mk);
        }
        pj *= &bigp;
    }
    (a, b)
}

/// Lifts the monic factors `gs` of `f / lc(f) (mod p)` to monic factors
/// modulo `p^k`.
fn hensel_multi(f: &[BigInt], gs: &[ModPoly], p: u64, k: u32) -> Vec<BigPoly> {
    if gs.len() == 1 {
        let mk = BigInt::from(p).pow(k);
        let lc = f.last().unwrap().clone();
        let linv = lc.modinv(&mk).expect("leading coefficient is a unit");
        return vec![bp_reduce(&f.iter().map(|c| c * &linv).collect::<Vec<_>>(), &mk)];
    }
    let half = gs.len() / 2;
    let a0 = gs[..half].iter().fold(vec![1u64], |acc, g| modp::mul(&acc, g, p));
    let rest = gs[half..].iter().fold(vec![1u64], |acc, g| modp::mul(&acc, g, p));
    let lc = f.last().unwrap().mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let b0: ModPoly = rest.iter().map(|&c| c * lc % p).collect();
    let (a, b) = hensel_two(f, &a0, &b0, p, k);
    let mut out = hensel_multi(&a, &gs[..half], p, k);
    out.extend(hensel_multi(&b, &gs[half..], p, k));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Poly {
    let half = m >> 1u32;
    Poly::new(
        a.iter()
            .map(|c| {
                let c = c.mod_floor(m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Irreducible factors of a primitive squarefree polynomial.
fn zassenhaus(f: &Poly) -> Vec<Poly> {
    let f = f.primitive();
    let d = f.degree().unwrap_or(0);
    if d <= 1 {
        return vec![f];
    }
    let lc = f.leading().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // Try a handful of good primes and keep the one with fewest factors.
    let mut best: Option<(u64, Vec<ModPoly>)> = None;
    let mut tried = 0;
    for &p in small_primes().iter().skip(1) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = to_modp(&f, p);
        if fp.len() != d + 1 || !modp::is_squarefree(&fp, p) {
            continue;
        }
        let fs = modp::factor_squarefree(&modp::monic(&fp, p), p, &mut rng);
        if fs.len() == 1 {
            return vec![f];
        }
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (p, gs) = best.expect("some prime keeps f squarefree");

    // Mignotte: every factor of f has coefficients below 2^d·‖f‖₂.
    let norm2 = f.coeffs().iter().map(|c| c * c).fold(BigInt::zero(), |a, b| a + b);
    let bound = (BigInt::one() << d) * (norm2.sqrt() + 1u32) * lc.abs();
    let mut k = 1u32;
    let bigp = BigInt::from(p);
    while bigp.pow(k) <= &bound * 2u32 {
        k += 1;
    }
    let m = bigp.pow(k);
    let mut lifted = hensel_multi(f.coeffs(), &gs, p, k);

    let mut out = Vec::new();
    let mut cur = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for comb in combinations(lifted.len(), size) {
            let lcc = cur.leading().unwrap().clone();
            let prod = comb
                .iter()
                .fold(vec![lcc.clone()], |acc, &i| bp_mul(&acc, &lifted[i], &m));
            let cand = symmetric(&prod, &m).primitive();
            if let Some(q) = cur.div_exact(&cand) {
                out.push(cand);
                cur = q.primitive();
                let mut keep = Vec::new();
                for (i, g) in lifted.into_iter().enumerate() {
                    if !comb.contains(&i) {
                        keep.push(g);
                    }
                }
                lifted = keep;
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if cur.degree().unwrap_or(0) > 0 {
        out.push(cur);
    }
    out
}

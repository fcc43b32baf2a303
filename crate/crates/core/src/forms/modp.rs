//! Dense polynomials over 𝔽_p (p < 2³¹), lowest degree first, and the
//! Cantor–Zassenhaus factorisation used to seed Hensel lifting.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type ModPoly = Vec<u64>;

fn trim(mut a: ModPoly) -> ModPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub fn inv(a: u64, p: u64) -> u64 {
    pow_u64(a, p - 2, p)
}

fn pow_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulm(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be non-zero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (ModPoly, ModPoly) {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let linv = inv(b[db], p);
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let f = mulm(*r.last().unwrap(), linv, p);
        q[k] = f;
        for (i, &bc) in b.iter().enumerate() {
            r[k + i] = (r[k + i] + p - mulm(f, bc, p)) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn monic(a: &[u64], p: u64) -> ModPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let li = inv(l, p);
            a.iter().map(|&c| mulm(c, li, p)).collect()
        }
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> ModPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// `(g, s, t)` with `s·a + t·b = g = gcd(a, b)` (monic).
pub fn ext_gcd(a: &[u64], b: &[u64], p: u64) -> (ModPoly, ModPoly, ModPoly) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let l = inv(*r0.last().unwrap(), p);
    let sc = |v: &[u64]| trim(v.iter().map(|&c| mulm(c, l, p)).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

fn powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> ModPoly {
    let mut result: ModPoly = vec![1];
    let mut b = divrem(base, m, p).1;
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result = divrem(&mul(&result, &b, p), m, p).1;
        }
        if i + 1 < bits {
            b = divrem(&mul(&b, &b, p), m, p).1;
        }
    }
    result
}

pub fn derivative(a: &[u64], p: u64) -> ModPoly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulm(c, i as u64 % p, p))
            .collect(),
    )
}

pub fn is_squarefree(a: &[u64], p: u64) -> bool {
    let d = derivative(a, p);
    if d.is_empty() {
        return a.len() <= 1;
    }
    gcd(a, &d, p).len() == 1
}

/// Monic irreducible factors of a monic squarefree `f` over 𝔽_p, p odd.
pub fn factor_squarefree(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    let mut out = Vec::new();
    let mut rest = trim(f.to_vec());
    let x: ModPoly = vec![0, 1];
    let mut h = x.clone();
    let mut deg = 0;
    while rest.len() > 1 {
        deg += 1;
        if 2 * deg > rest.len() - 1 {
            out.push(monic(&rest, p));
            break;
        }
        h = powmod(&h, &BigUint::from(p), &rest, p);
        let g = gcd(&rest, &sub(&h, &x, p), p);
        if g.len() > 1 {
            let (q, _) = divrem(&rest, &g, p);
            rest = monic(&q, p);
            h = divrem(&h, &rest, p).1;
            equal_degree(&g, deg, p, rng, &mut out);
        }
    }
    out.sort();
    out
}

fn equal_degree(g: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<ModPoly>) {
    let n = g.len() - 1;
    if n == d {
        out.push(g.to_vec());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1u32;
    loop {
        let a: ModPoly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let b = powmod(&a, &e, g, p);
        let c = gcd(g, &sub(&b, &[1], p), p);
        if c.len() > 1 && c.len() < g.len() {
            let (q, _) = divrem(g, &c, p);
            equal_degree(&c, d, p, rng, out);
            equal_degree(&monic(&q, p), d, p, rng, out);
            return;
        }
        if e.is_zero() {
            unreachable!("p must be odd");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn factors_multiply_back() {
        let p = 7;
        // x^4 + 1 over F_7
        let f = vec![1, 0, 0, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = factor_squarefree(&f, p, &mut rng);
        let prod = fs.iter().fold(vec![1u64], |acc, g| mul(&acc, g, p));
        assert_eq!(prod, f);
        assert!(fs.len() > 1);
    }

    #[test]
    fn ext_gcd_identity() {
        let p = 11;
        let a = vec![1, 2, 1];
        let b = vec![3, 1];
        let (g, s, t) = ext_gcd(&a, &b, p);
        assert_eq!(g, vec![1]);
        let lhs = {
            let x = mul(&s, &a, p);
            let y = mul(&t, &b, p);
            let n = x.len().max(y.len());
            trim(
                (0..n)
                    .map(|i| (x.get(i).unwrap_or(&0) + y.get(i).unwrap_or(&0)) % p)
                    .collect(),
            )
        };
        assert_eq!(lhs, vec![1]);
    }
}

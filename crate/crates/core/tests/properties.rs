use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use thue_core::approx::{check_product, check_system, gamma_tuples, ApproxSystem, Place};
use thue_core::arith::{is_smooth, PrimeSet};
use thue_core::bounds::{eval_bound, verify_counts, BoundName, BoundParams, Verdict};
use thue_core::count::{self, CountOptions};
use thue_core::exec;
use thue_core::forms::BinaryForm;
use thue_core::poly::Poly;
use thue_core::solve;
use thue_core::Error;

fn irreducible_form(deg: usize) -> impl Strategy<Value = BinaryForm> {
    prop::collection::vec(-5i64..=5, deg + 1).prop_filter_map("irreducible with non-zero ends", move |c| {
        let f = BinaryForm::from_i64(&c).ok()?;
        (c[0] != 0 && c[deg] != 0 && f.is_irreducible()).then_some(f)
    })
}

fn any_form() -> impl Strategy<Value = BinaryForm> {
    prop_oneof![irreducible_form(3), irreducible_form(4)]
}

fn prime_subset() -> impl Strategy<Value = PrimeSet> {
    prop::sample::subsequence(vec![2u64, 3, 5, 7], 0..=4).prop_map(|s| PrimeSet::new(s).unwrap())
}

fn r(s: &str) -> BigRational {
    thue_core::approx::parse_rational(s).unwrap()
}

/// Canonical sign for a pair: `p > 0`, or `(0, 1)`.
fn canonical(p: BigInt, q: BigInt) -> (BigInt, BigInt) {
    if p.is_negative() || (p.is_zero() && q.is_negative()) {
        (-p, -q)
    } else {
        (p, q)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn thue_mahler_solutions_reverify(f in any_form(), s in prime_subset()) {
        let sols = solve::solve_thue_mahler(&f, &s, 40, None).unwrap();
        for sol in &sols.solutions {
            let v = f.eval(&sol.pair.p, &sol.pair.q);
            prop_assert!(!v.is_zero());
            prop_assert_eq!(v.abs(), sol.value.clone());
            prop_assert!(is_smooth(&v, &s).unwrap());
            prop_assert!(sol.pair.p.gcd(&sol.pair.q).is_one());
            let rebuilt = s.primes().iter().zip(&sol.exponents)
                .fold(BigInt::one(), |acc, (&p, &e)| acc * num_traits::pow(BigInt::from(p), e as usize));
            prop_assert_eq!(rebuilt, sol.value.clone());
        }
    }

    #[test]
    fn thue_mahler_corresponds_under_normalisation(f in irreducible_form(3), s in prime_subset()) {
        let b = 25u64;
        let norm = f.normalize_nonvanishing();
        let ours = solve::solve_thue_mahler(&f, &s, b, None).unwrap();
        let inv = norm.map.inverse();
        let mapped: Vec<(BigInt, BigInt)> = ours.solutions.iter().map(|x| {
            let (p, q) = inv.apply(&x.pair.p, &x.pair.q);
            canonical(p, q)
        }).collect();
        let bprime = mapped.iter().map(|(p, q)| p.abs().max(q.abs())).max()
            .map_or(1, |h| h.to_u64().unwrap()).max(1);
        let theirs: BTreeSet<(BigInt, BigInt)> = solve::solve_thue_mahler(&norm.form, &s, bprime, None).unwrap()
            .solutions.into_iter().map(|x| canonical(x.pair.p, x.pair.q)).collect();
        for (p, q) in &mapped {
            prop_assert!(theirs.contains(&(p.clone(), q.clone())), "({}, {}) missing", p, q);
            prop_assert_eq!(norm.form.eval(p, q), f.eval(&norm.map.apply(p, q).0, &norm.map.apply(p, q).1));
        }
    }

    #[test]
    fn enumeration_ignores_parallelism(f in any_form(), s in prime_subset(), m in -20i64..=20) {
        let par = solve::solve_thue_mahler(&f, &s, 30, None).unwrap();
        let seq = exec::with_sequential(|| solve::solve_thue_mahler(&f, &s, 30, None).unwrap());
        prop_assert_eq!(par, seq);
        if m != 0 {
            let par = solve::solve_thue(&f, &BigInt::from(m), 200, None).unwrap();
            let seq = exec::with_sequential(|| solve::solve_thue(&f, &BigInt::from(m), 200, None).unwrap());
            prop_assert_eq!(par, seq);
        }
    }

    #[test]
    fn counts_are_monotone_and_nested(f in any_form(), z0 in 2u64..300) {
        let opts = CountOptions::default();
        let s = PrimeSet::empty();
        let zs = [z0, 2 * z0, 5 * z0];
        let mut last = (0, 0, 0, 0);
        for z in zs {
            let a = count::count_a(&f, &s, z, 0, &opts).unwrap().count;
            let rr = count::count_r(&f, z, &opts).unwrap().count;
            let rk = count::count_rk(&f, 2, z, &opts).unwrap().count;
            let nk = count::count_nk(&f, 2, z, &opts).unwrap().count;
            prop_assert!(rk <= rr && rr <= 2 * z);
            prop_assert!(nk <= a);
            prop_assert!(a >= last.0 && rr >= last.1 && rk >= last.2 && nk >= last.3);
            last = (a, rr, rk, nk);
        }
    }

    #[test]
    fn counts_ignore_parallelism(f in any_form(), z in 2u64..2000) {
        let opts = CountOptions::default();
        let s = PrimeSet::new(vec![2, 3]).unwrap();
        let par = count::count_a(&f, &s, z, 4, &opts).unwrap();
        let seq = exec::with_sequential(|| count::count_a(&f, &s, z, 4, &opts).unwrap());
        prop_assert_eq!(par, seq);
    }

    #[test]
    fn count_at_one_matches_unit_equations(f in irreducible_form(3)) {
        let opts = CountOptions::default();
        let a = count::count_a(&f, &PrimeSet::empty(), 1, 0, &opts).unwrap();
        let bx = a.scan_box.scanned;
        let plus = solve::solve_thue(&f, &BigInt::from(1), bx, None).unwrap().solutions.len();
        let minus = solve::solve_thue(&f, &BigInt::from(-1), bx, None).unwrap().solutions.len();
        // A counts every pair in the scanned box, (0, 0) included.
        prop_assert_eq!(a.count as usize, 1 + plus + minus);
    }

    #[test]
    fn lambda_factors_lie_in_unit_interval(f in any_form(), k in 2u32..4) {
        if count::check_fixed_divisors(&f, k).is_err() {
            return Ok(());
        }
        for &p in thue_core::arith::primes_up_to(100).iter() {
            let x = count::lambda_factor(&f, p, k).unwrap();
            prop_assert!(x.is_positive() && x <= BigRational::one(), "P={}: {}", p, x);
        }
    }

    #[test]
    fn lower_bounds_never_fail(observed in 0u64..10_000_000, t in 2u32..60, which in 0usize..2) {
        let name = [BoundName::SunitLower, BoundName::SunitLowerImproved][which];
        let params = BoundParams { t: Some(t), c0: Some(0.5), c1: Some(0.5), eps: Some(1.0), ..Default::default() };
        let b = eval_bound(name, &params).unwrap();
        let v = verify_counts(observed, "s-unit", &b).unwrap();
        prop_assert_ne!(v.verdict, Verdict::Fail);
    }

    #[test]
    fn sunit_solutions_are_closed_under_symmetries(s in prime_subset(), e in 1u32..6) {
        prop_assume!(!s.is_empty());
        let sols = solve::solve_sunit(&s, e).unwrap();
        let set: BTreeSet<(BigRational, BigRational)> = sols.iter().map(|x| (x.x.clone(), x.y.clone())).collect();
        for x in &sols {
            prop_assert_eq!(&x.x + &x.y, BigRational::one());
            let images = [
                (x.y.clone(), x.x.clone()),
                (x.x.recip(), -&x.y / &x.x),
            ];
            for (a, b) in images {
                let within = [&a, &b].iter().all(|v| {
                    solve::sunit_exponents(v, &s).is_some_and(|(_, z)| z.iter().all(|c| c.unsigned_abs() <= e as u64))
                });
                if within {
                    prop_assert!(set.contains(&(a.clone(), b.clone())), "missing ({}, {})", a, b);
                }
            }
        }
    }
}

fn decide<T>(sys: &mut ApproxSystem, mut f: impl FnMut(&ApproxSystem) -> Result<T, Error>) -> T {
    loop {
        match f(sys) {
            Ok(v) => return v,
            Err(Error::NeedsRelift { needed }) => sys.relift(needed).unwrap(),
            Err(e) => panic!("{e}"),
        }
    }
}

/// Every solution of the product inequality above `k^{1/β₁}` solves one of
/// the systems indexed by the Γ-tuples.
#[test]
fn reduction_to_systems_is_sound() {
    let f = Poly::from_i64(&[-2, 0, 0, 1]);
    let mut reduced = 0;
    for (k, beta, beta1, p) in [
        ("1", "3", "2", 5u64),
        ("2", "3", "2", 5),
        ("3/2", "5/2", "3/2", 11),
        ("1", "4", "5/2", 5),
    ] {
        let (k, beta, beta1) = (r(k), r(beta), r(beta1));
        let places = [Place::Infinity, Place::Prime(p)];
        let tuples = gamma_tuples(&beta, &beta1, 1).unwrap();
        let mut systems: Vec<ApproxSystem> = tuples
            .iter()
            .map(|tup| {
                let conds: Vec<_> = places
                    .iter()
                    .zip(tuples.gammas(&tup))
                    .map(|(&pl, g)| (pl, 0, g))
                    .collect();
                ApproxSystem::new(&f, k.clone(), beta1.clone(), &conds, 8).unwrap()
            })
            .collect();
        let mut product = systems[0].clone();
        for q in 1..=40i64 {
            for pp in -80..=80i64 {
                if pp.gcd(&q) != 1 {
                    continue;
                }
                let (bp, bq) = (BigInt::from(pp), BigInt::from(q));
                if !product.above_threshold(&bp.abs().max(bq.clone())) {
                    continue;
                }
                if !decide(&mut product, |s| check_product(s, &beta, &bp, &bq)) {
                    continue;
                }
                let covered = systems
                    .iter_mut()
                    .any(|s| decide(s, |s| check_system(s, &bp, &bq)).holds);
                assert!(covered, "{pp}/{q} satisfies the product inequality but no system");
                reduced += 1;
            }
        }
    }
    assert!(reduced > 0);
}

//! Dispatch from parsed commands to the library, producing JSON records.
//!
//! Every command yields item records followed by one `summary` record. The
//! records depend only on the command and the seed.

use std::io::Read;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thue_core::approx::{self, Place};
use thue_core::arith::PrimeSet;
use thue_core::bounds::{self, BoundParams, BoundValue};
use thue_core::count::{self, AreaMethod, CountOptions, ReportOptions};
use thue_core::{padic, solve};

use crate::args::*;
use crate::cache::{config_hash, Cache, VERSION};
use crate::error::CliError;

fn usage(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{field}: {e}"))
}

/// `value` as an object tagged with `"record": kind`.
pub fn record(kind: &str, value: impl Serialize) -> Result<Value, CliError> {
    let v = serde_json::to_value(value)?;
    let mut m = match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    m.insert("record".into(), Value::String(kind.into()));
    Ok(Value::Object(m))
}

fn prime_set(p: &PrimesArg) -> Result<PrimeSet, CliError> {
    PrimeSet::new(p.primes.clone()).map_err(|e| usage("primes", e))
}

fn rational(field: &str, s: &str) -> Result<BigRational, CliError> {
    approx::parse_rational(s).map_err(|e| usage(field, e))
}

fn grid(g: &GridArg) -> Result<Vec<u64>, CliError> {
    if g.z.is_empty() || g.z[0] == 0 || g.z.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("z", "grid must be positive and strictly increasing"));
    }
    Ok(g.z.clone())
}

fn count_opts(o: &CountArgs) -> Result<CountOptions, CliError> {
    if o.margin == 0 {
        return Err(usage("margin", "must be at least 1"));
    }
    Ok(CountOptions {
        margin: o.margin,
        box_override: o.box_override,
    })
}

pub struct Outcome {
    pub records: Vec<Value>,
}

/// Canonical configuration: the command, its arguments and the seed.
pub fn canonical_config(cmd: &Command, seed: u64) -> Result<Value, CliError> {
    Ok(json!({ "command": serde_json::to_value(cmd)?, "seed": seed }))
}

pub fn run(cmd: &Command, seed: u64, cache: &mut Cache) -> Result<Outcome, CliError> {
    let mut config = canonical_config(cmd, seed)?;
    let mut records = if let Command::Bounds(BoundsCmd::Verify { summary, name }) = cmd {
        // Verification reads its input at run time, so it is hashed with the
        // input and never cached.
        let input = read_summary(summary)?;
        config["input"] = input.clone();
        verify_summary(&input, *name)?
    } else {
        let hash = config_hash(&config);
        match cache.lookup(&hash) {
            Some(r) => r,
            None => {
                let r = dispatch(cmd, seed, cache)?;
                cache.store(&hash, &r)?;
                r
            }
        }
    };
    let hash = config_hash(&config);
    let summary = records
        .iter_mut()
        .rev()
        .find(|r| r["record"] == "summary")
        .ok_or_else(|| CliError::Core(thue_core::Error::Internal("no summary record".into())))?;
    if let Value::Object(m) = summary {
        m.insert("command".into(), Value::String(cmd.path()));
        m.insert("config_hash".into(), Value::String(hash));
        m.insert("version".into(), Value::String(VERSION.into()));
        m.insert("seed".into(), json!(seed));
    }
    Ok(Outcome { records })
}

fn dispatch(cmd: &Command, seed: u64, cache: &mut Cache) -> Result<Vec<Value>, CliError> {
    match cmd {
        Command::Solve(c) => solve_cmd(c),
        Command::Count(c) => count_cmd(c, seed, cache),
        Command::Approx(c) => approx_cmd(c),
        Command::Padic(c) => padic_cmd(c),
        Command::Forms(c) => forms_cmd(c),
        Command::Bounds(c) => bounds_cmd(c),
    }
}

fn solve_cmd(c: &SolveCmd) -> Result<Vec<Value>, CliError> {
    let mut out = Vec::new();
    match c {
        SolveCmd::Thue {
            form,
            m,
            b,
            certified_bound,
        } => {
            let r = solve::solve_thue(&form.form, m, *b, certified_bound.as_ref())?;
            for s in &r.solutions {
                out.push(record("solution", s)?);
            }
            out.push(record(
                "summary",
                json!({ "count": r.solutions.len(), "completeness": r.completeness }),
            )?);
        }
        SolveCmd::Tm {
            form,
            primes,
            b,
            certified_bound,
        } => {
            let s = prime_set(primes)?;
            let r = solve::solve_thue_mahler(&form.form, &s, *b, certified_bound.as_ref())?;
            for x in &r.solutions {
                out.push(record("solution", x)?);
            }
            out.push(record(
                "summary",
                json!({
                    "count": r.solutions.len(),
                    "completeness": r.completeness,
                    "degree": form.form.degree(),
                    "primes": s.primes(),
                }),
            )?);
        }
        SolveCmd::Sunit { primes, e } => {
            let s = prime_set(primes)?;
            let r = solve::solve_sunit(&s, *e)?;
            for x in &r {
                out.push(record("solution", x)?);
            }
            out.push(record(
                "summary",
                json!({ "count": r.len(), "primes": s.primes(), "exponent": e }),
            )?);
        }
        SolveCmd::Wsunit { a, b, primes, e } => {
            let s = prime_set(primes)?;
            let (a, b) = (rational("a", a)?, rational("b", b)?);
            let r = solve::solve_weighted_sunit(&a, &b, &s, *e)?;
            for x in &r {
                out.push(record("solution", x)?);
            }
            out.push(record(
                "summary",
                json!({ "count": r.len(), "primes": s.primes(), "exponent": e }),
            )?);
        }
    }
    Ok(out)
}

/// One record per `Z`, each cached on its own so that a grid extending an
/// earlier one recomputes only the new points.
fn per_point(
    cache: &mut Cache,
    cmd: &CountCmd,
    seed: u64,
    zs: &[u64],
    mut point: impl FnMut(u64) -> Result<Value, CliError>,
) -> Result<Vec<Value>, CliError> {
    let mut base = serde_json::to_value(cmd)?;
    if let Value::Object(m) = &mut base {
        for inner in m.values_mut() {
            if let Value::Object(args) = inner {
                args.remove("grid");
            }
        }
    }
    let mut out = Vec::new();
    for &z in zs {
        let key = json!({ "point": base, "seed": seed, "z": z });
        let mut r = cache.get_or_compute(&key, || Ok(vec![point(z)?]))?;
        out.append(&mut r);
    }
    Ok(out)
}

fn normalised(count: u64, z: u64, n: usize) -> f64 {
    count as f64 / (z as f64).powf(2.0 / n as f64)
}

fn count_cmd(c: &CountCmd, seed: u64, cache: &mut Cache) -> Result<Vec<Value>, CliError> {
    let mut out = Vec::new();
    match c {
        CountCmd::A {
            form,
            primes,
            grid: g,
            levels,
            opts,
        } => {
            let (s, zs, o) = (prime_set(primes)?, grid(g)?, count_opts(opts)?);
            let f = &form.form;
            out = per_point(cache, c, seed, &zs, |z| {
                let a = count::count_a(f, &s, z, *levels, &o)?;
                let mut r = record("point", &a)?;
                r["normalized"] = json!(normalised(a.count, z, f.degree()));
                Ok(r)
            })?;
            out.push(record("summary", json!({ "points": zs.len() }))?);
        }
        CountCmd::R { form, grid: g, opts } => {
            let (zs, o) = (grid(g)?, count_opts(opts)?);
            out = per_point(cache, c, seed, &zs, |z| {
                record("point", count::count_r(&form.form, z, &o)?)
            })?;
            out.push(record("summary", json!({ "points": zs.len() }))?);
        }
        CountCmd::Rk { form, k, grid: g, opts } => {
            let (zs, o) = (grid(g)?, count_opts(opts)?);
            out = per_point(cache, c, seed, &zs, |z| {
                record("point", count::count_rk(&form.form, *k, z, &o)?)
            })?;
            out.push(record("summary", json!({ "points": zs.len() }))?);
        }
        CountCmd::Nk { form, k, grid: g, opts } => {
            let (zs, o) = (grid(g)?, count_opts(opts)?);
            let f = &form.form;
            out = per_point(cache, c, seed, &zs, |z| {
                let n = count::count_nk(f, *k, z, &o)?;
                let mut r = record("point", &n)?;
                r["normalized"] = json!(normalised(n.count, z, f.degree()));
                Ok(r)
            })?;
            out.push(record("summary", json!({ "points": zs.len() }))?);
        }
        CountCmd::Sigma {
            form,
            tol,
            t,
            method,
            samples,
        } => {
            let est = match method {
                AreaMethodArg::Quadrature => count::area_sublevel(&form.form, *t, *tol, count::DEFAULT_MAX_CELLS)?,
                AreaMethodArg::MonteCarlo => {
                    if *t != 1.0 {
                        return Err(usage("t", "Monte Carlo estimates σ_F only (T = 1)"));
                    }
                    count::sigma_monte_carlo(&form.form, *samples, seed)?
                }
            };
            debug_assert!(matches!(est.method, AreaMethod::Quadrature | AreaMethod::MonteCarlo));
            out.push(record("summary", &est)?);
        }
        CountCmd::SigmaS {
            form,
            primes,
            jmax,
            tol,
        } => {
            let s = prime_set(primes)?;
            out.push(record("summary", count::sigma_s(&form.form, &s, *jmax, *tol)?)?);
        }
        CountCmd::Lambda { form, k, pmax } => {
            out.push(record("summary", count::lambda_k(&form.form, *k, *pmax)?)?);
        }
        CountCmd::Asym {
            form,
            primes,
            grid: g,
            k,
            tol,
            jmax,
            pmax,
            opts,
        } => {
            let (s, zs) = (prime_set(primes)?, grid(g)?);
            let ro = ReportOptions {
                count: count_opts(opts)?,
                tol: *tol,
                jmax: *jmax,
                pmax: *pmax,
            };
            let series = count::asymptotic_report(&form.form, &s, &zs, *k, &ro)?;
            for p in &series.points {
                out.push(record("point", p)?);
            }
            let mut summary = record("summary", &series)?;
            if let Value::Object(m) = &mut summary {
                m.remove("points");
            }
            out.push(summary);
        }
        CountCmd::Richest { form, m, top, opts } => {
            let r = count::richest_targets(&form.form, *m, *top, &count_opts(opts)?)?;
            for t in &r.targets {
                out.push(record("target", t)?);
            }
            out.push(record(
                "summary",
                json!({ "m_bound": r.m_bound, "scan_box": r.scan_box }),
            )?);
        }
        CountCmd::Gpfscan { form, b } => {
            let shells = count::gpf_scan(&form.form, *b)?;
            for s in &shells {
                out.push(record("shell", s)?);
            }
            out.push(record("summary", json!({ "shells": shells.len(), "box": b }))?);
        }
    }
    Ok(out)
}

fn parse_cond(s: &str) -> Result<(Place, usize, BigRational), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage("cond", format!("{s:?} is not place:root:gamma")));
    }
    let place: Place = parts[0].parse().map_err(|e| usage("cond", e))?;
    let idx: usize = parts[1].parse().map_err(|e| usage("cond", e))?;
    Ok((place, idx, rational("cond", parts[2])?))
}

fn approx_cmd(c: &ApproxCmd) -> Result<Vec<Value>, CliError> {
    let mut out = Vec::new();
    match c {
        ApproxCmd::Tuples { beta, beta1, t, limit } => {
            let set = approx::gamma_tuples(&rational("beta", beta)?, &rational("beta1", beta1)?, *t)?;
            for tuple in set.iter().take(*limit) {
                let gammas: Vec<thue_core::json::Rat> =
                    set.gammas(&tuple).into_iter().map(thue_core::json::Rat).collect();
                out.push(record("tuple", json!({ "f": tuple, "gammas": gammas }))?);
            }
            out.push(record(
                "summary",
                json!({
                    "v": set.v,
                    "t": set.t,
                    "cardinality": thue_core::json::Int(set.cardinality()),
                    "within_power_bound": set.within_power_bound(),
                    "lambda": thue_core::json::Rat(set.lambda()),
                    "listed": out.len(),
                }),
            )?);
        }
        ApproxCmd::Check {
            form,
            k,
            beta1,
            conds,
            p,
            q,
            precision,
        } => {
            let conds = conds.iter().map(|s| parse_cond(s)).collect::<Result<Vec<_>, _>>()?;
            let sys = approx::ApproxSystem::new(
                &form.form.dehomogenize(),
                rational("k", k)?,
                rational("beta1", beta1)?,
                &conds,
                *precision,
            )?;
            out.push(record("summary", approx::check_system(&sys, p, q)?)?);
        }
        ApproxCmd::Gap { k, beta1, h1, h2 } => {
            let (k, b1) = (rational("k", k)?, rational("beta1", beta1)?);
            let th = approx::gap_threshold(&k, &b1, h1)?;
            let mut r = record("summary", &th)?;
            if let Some(h2) = h2 {
                r["holds"] = json!(approx::gap_holds(&k, &b1, h1, h2));
            }
            out.push(r);
        }
    }
    Ok(out)
}

fn padic_cmd(c: &PadicCmd) -> Result<Vec<Value>, CliError> {
    let mut out = Vec::new();
    match c {
        PadicCmd::Roots { form, p, n } => {
            let r = padic::padic_roots(&form.form.dehomogenize(), *p, *n)?;
            for x in &r.roots {
                out.push(record("root", x)?);
            }
            out.push(record(
                "summary",
                json!({ "count": r.roots.len(), "undecided": r.undecided, "depth_cap": r.depth_cap }),
            )?);
        }
        PadicCmd::Rho { form, m } => {
            for &mm in m {
                let r = padic::rho(&form.form, mm)?;
                out.push(record(
                    "rho",
                    json!({ "m": mm, "rho": thue_core::json::Int(BigInt::from(r)) }),
                )?);
            }
            out.push(record("summary", json!({ "count": m.len() }))?);
        }
        PadicCmd::Measure { form, p, j } => {
            out.push(record("summary", padic::local_factor(&form.form, *p, *j)?)?);
        }
    }
    Ok(out)
}

fn forms_cmd(c: &FormsCmd) -> Result<Vec<Value>, CliError> {
    let v = match c {
        FormsCmd::Disc { form } => json!({
            "form": form.form,
            "degree": form.form.degree(),
            "discriminant": thue_core::json::Int(form.form.discriminant()?),
        }),
        FormsCmd::Factor { form } => {
            let fz = form.form.factor_over_q();
            json!({
                "form": form.form,
                "factorization": fz,
                "irreducible": form.form.is_irreducible(),
                "linear_factor": form.form.has_linear_factor(),
            })
        }
        FormsCmd::Normalize { form } => serde_json::to_value(form.form.normalize_nonvanishing())?,
    };
    Ok(vec![record("summary", v)?])
}

fn bound_params(a: &BoundArgs) -> BoundParams {
    BoundParams {
        n: a.n,
        t: a.t,
        omega: a.omega,
        r: a.r,
        h: a.h,
        m: a.m,
        c0: a.c0,
        c1: a.c1,
        c2: a.c2,
        beta1: a.beta1,
        eps: a.eps,
    }
}

/// A bound as a flat record: `value` when held exactly or as a float,
/// `log_value` (natural log) when huge.
pub fn bound_record(kind: &str, b: &bounds::Bound) -> Result<Value, CliError> {
    let mut m = Map::new();
    m.insert("name".into(), json!(b.name));
    m.insert("params".into(), serde_json::to_value(&b.params)?);
    m.insert("side".into(), json!(b.side));
    match &b.value {
        BoundValue::Exact(v) => {
            m.insert("value".into(), serde_json::to_value(thue_core::json::Int(v.clone()))?);
        }
        BoundValue::Real(x) => {
            m.insert("value".into(), json!(x));
        }
        BoundValue::Log(l) => {
            m.insert("log_value".into(), json!(l));
        }
    }
    if let Some(c) = b.ln_constant {
        m.insert("ln_constant".into(), json!(c));
    }
    record(kind, Value::Object(m))
}

fn bounds_cmd(c: &BoundsCmd) -> Result<Vec<Value>, CliError> {
    match c {
        BoundsCmd::Eval { name, params } => {
            let b = bounds::eval_bound(*name, &bound_params(params))?;
            Ok(vec![bound_record("summary", &b)?])
        }
        BoundsCmd::Verify { summary, name } => verify_summary(&read_summary(summary)?, *name),
    }
}

/// The last summary record of a JSON-lines file, or of stdin for `-`.
fn read_summary(path: &std::path::Path) -> Result<Value, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| usage("summary", e))?
    };
    text.lines()
        .rev()
        .filter_map(|l| serde_json::from_str::<Value>(l).ok())
        .find(|v| v["record"] == "summary")
        .ok_or_else(|| usage("summary", "no summary record found"))
}

/// Checks a `solve tm` / `solve sunit` summary against its count bound.
pub fn verify_summary(rec: &Value, name: Option<bounds::BoundName>) -> Result<Vec<Value>, CliError> {
    let command = rec["command"].as_str().unwrap_or_default();
    let count = rec["count"].as_u64().ok_or_else(|| usage("summary", "missing count"))?;
    let t = rec["primes"]
        .as_array()
        .map(|a| a.len() as u32)
        .ok_or_else(|| usage("summary", "missing primes"))?;
    let (default, params) = match command {
        "solve tm" => {
            let n = rec["degree"]
                .as_u64()
                .ok_or_else(|| usage("summary", "missing degree"))? as u32;
            (
                bounds::BoundName::TmCount,
                BoundParams {
                    n: Some(n),
                    t: Some(t),
                    ..Default::default()
                },
            )
        }
        "solve sunit" => (
            bounds::BoundName::SunitCount,
            BoundParams {
                t: Some(t),
                ..Default::default()
            },
        ),
        other => return Err(usage("summary", format!("cannot verify output of {other:?}"))),
    };
    let b = bounds::eval_bound(name.unwrap_or(default), &params)?;
    let v = bounds::verify_counts(count, command, &b)?;
    let mut r = bound_record("summary", &b)?;
    r["verdict"] = json!(v.verdict);
    r["observed"] = json!(v.observed);
    r["instance"] = json!(command);
    Ok(vec![r])
}

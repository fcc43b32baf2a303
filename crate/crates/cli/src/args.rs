use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use thue_core::arith::is_prime_u64;
use thue_core::bounds::BoundName;
use thue_core::BinaryForm;

#[derive(Parser, Debug)]
#[command(
    name = "thue",
    version,
    about = "Experiments with Thue, Thue-Mahler and S-unit equations"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for randomised methods.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory for cached results; caching is off without it.
    #[arg(long, global = true, env = "THUE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// File of `key = value` lines supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Exact solvers.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Counting functions and asymptotic constants.
    #[command(subcommand)]
    Count(CountCmd),
    /// Approximation systems and their combinatorics.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// P-adic roots and local densities.
    #[command(subcommand)]
    Padic(PadicCmd),
    /// Invariants of binary forms.
    #[command(subcommand)]
    Forms(FormsCmd),
    /// Explicit bounds and their verification.
    #[command(subcommand)]
    Bounds(BoundsCmd),
}

impl Command {
    pub fn path(&self) -> String {
        let (a, b) = match self {
            Command::Solve(c) => ("solve", serde_variant(c)),
            Command::Count(c) => ("count", serde_variant(c)),
            Command::Approx(c) => ("approx", serde_variant(c)),
            Command::Padic(c) => ("padic", serde_variant(c)),
            Command::Forms(c) => ("forms", serde_variant(c)),
            Command::Bounds(c) => ("bounds", serde_variant(c)),
        };
        format!("{a} {b}")
    }
}

fn serde_variant<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::Object(m)) => m.keys().next().cloned().unwrap_or_default(),
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

pub fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if is_prime_u64(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not prime"))
    }
}

fn parse_form(s: &str) -> Result<BinaryForm, String> {
    s.parse().map_err(|e: thue_core::Error| e.to_string())
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct FormArg {
    /// Coefficients `[a0, ..., an]` of `a0 X^n + ... + an Y^n`.
    #[arg(long, value_parser = parse_form)]
    pub form: BinaryForm,
}

#[derive(Args, Debug, Serialize, Clone, Default)]
pub struct PrimesArg {
    /// Comma-separated primes of S.
    #[arg(short = 'S', long, value_delimiter = ',', value_parser = parse_prime)]
    pub primes: Vec<u64>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveCmd {
    /// F(p, q) = m in a box.
    Thue {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'm', allow_hyphen_values = true)]
        #[serde(with = "thue_core::json::int")]
        m: BigInt,
        #[arg(short = 'B', long = "box")]
        b: u64,
        /// A proven height bound; the result is complete when it is ≤ B.
        #[arg(long)]
        #[serde(with = "opt_int")]
        certified_bound: Option<BigInt>,
    },
    /// |F(p, q)| composed of primes of S, gcd(p, q) = 1.
    Tm {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        primes: PrimesArg,
        #[arg(short = 'B', long = "box")]
        b: u64,
        #[arg(long)]
        #[serde(with = "opt_int")]
        certified_bound: Option<BigInt>,
    },
    /// x + y = 1 in S-units with exponents at most E.
    Sunit {
        #[command(flatten)]
        primes: PrimesArg,
        #[arg(short = 'E', long = "exponent")]
        e: u32,
    },
    /// ax + by = 1 in S-units with exponents at most E.
    Wsunit {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        primes: PrimesArg,
        #[arg(short = 'E', long = "exponent")]
        e: u32,
    },
}

mod opt_int {
    use num_bigint::BigInt;
    use serde::Serializer;
    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => thue_core::json::int::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct CountArgs {
    /// Scanned box as a multiple of the primary box.
    #[arg(long, default_value_t = thue_core::count::DEFAULT_MARGIN)]
    pub margin: u64,
    /// Fixed scan box, overriding the margin.
    #[arg(long = "box")]
    pub box_override: Option<u64>,
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct GridArg {
    /// Increasing comma-separated Z values.
    #[arg(short = 'Z', long = "z", value_delimiter = ',', required = true)]
    pub z: Vec<u64>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum CountCmd {
    /// A_{F,S}(Z).
    #[command(name = "A")]
    #[serde(rename = "A")]
    A {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        primes: PrimesArg,
        #[command(flatten)]
        grid: GridArg,
        /// S-part levels J: values up to Z·∏P^J are searched.
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[command(flatten)]
        opts: CountArgs,
    },
    /// R_F(Z): distinct values.
    #[command(name = "R")]
    #[serde(rename = "R")]
    R {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        opts: CountArgs,
    },
    /// R_{F,k}(Z): distinct k-free values.
    #[command(name = "Rk")]
    #[serde(rename = "Rk")]
    Rk {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'k')]
        k: u32,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        opts: CountArgs,
    },
    /// N_{F,k}(Z): pairs with k-free values.
    #[command(name = "Nk")]
    #[serde(rename = "Nk")]
    Nk {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'k')]
        k: u32,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        opts: CountArgs,
    },
    /// Area of |F| ≤ T.
    #[command(name = "sigma")]
    #[serde(rename = "sigma")]
    Sigma {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(short = 'T', default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_enum, default_value_t = AreaMethodArg::Quadrature)]
        method: AreaMethodArg,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// The S-adic constant σ_{F,S}.
    #[command(name = "sigmaS")]
    #[serde(rename = "sigmaS")]
    SigmaS {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        primes: PrimesArg,
        #[arg(long, default_value_t = 8)]
        jmax: u32,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// The k-free density λ_{F,k}.
    #[command(name = "lambda")]
    #[serde(rename = "lambda")]
    Lambda {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'k')]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
    },
    /// Normalised counts against the predicted constant.
    #[command(name = "asym")]
    #[serde(rename = "asym")]
    Asym {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        primes: PrimesArg,
        #[command(flatten)]
        grid: GridArg,
        #[arg(short = 'k')]
        k: Option<u32>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 2)]
        jmax: u32,
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
        #[command(flatten)]
        opts: CountArgs,
    },
    /// Values |m| ≤ M taken most often by a cubic form.
    #[command(name = "richest")]
    #[serde(rename = "richest")]
    Richest {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'M')]
        m: u64,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[command(flatten)]
        opts: CountArgs,
    },
    /// Greatest prime factors of F(p, q) over dyadic height shells.
    #[command(name = "gpfscan")]
    #[serde(rename = "gpfscan")]
    Gpfscan {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'B', long = "box")]
        b: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaMethodArg {
    Quadrature,
    MonteCarlo,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxCmd {
    /// The exponent tuples for (β, β₁, t).
    Tuples {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        beta1: String,
        #[arg(short = 't')]
        t: u32,
        /// Tuples listed at most.
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Whether (p, q) satisfies an approximation system.
    Check {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'k')]
        k: String,
        #[arg(long)]
        beta1: String,
        /// `place:root:gamma`, e.g. `inf:0:1/2` or `5:0:1/2`.
        #[arg(long = "cond", required = true)]
        conds: Vec<String>,
        #[arg(short = 'p', allow_hyphen_values = true)]
        #[serde(with = "thue_core::json::int")]
        p: BigInt,
        #[arg(short = 'q', allow_hyphen_values = true)]
        #[serde(with = "thue_core::json::int")]
        q: BigInt,
        #[arg(long, default_value_t = 30)]
        precision: u32,
    },
    /// The gap threshold (1/2k)·h₁^{β₁−1}, optionally tested against h₂.
    Gap {
        #[arg(short = 'k')]
        k: String,
        #[arg(long)]
        beta1: String,
        #[arg(long)]
        #[serde(with = "thue_core::json::int")]
        h1: BigInt,
        #[arg(long)]
        #[serde(with = "opt_int")]
        h2: Option<BigInt>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PadicCmd {
    /// Roots of f(X) = F(X, 1) in Q_P to precision N.
    Roots {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'p', value_parser = parse_prime)]
        p: u64,
        #[arg(short = 'N', default_value_t = 10)]
        n: u32,
    },
    /// ρ_F(m) for each m.
    Rho {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'm', value_delimiter = ',', required = true)]
        m: Vec<u64>,
    },
    /// Local measures m_{P,j} and the local factor at P.
    Measure {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'p', value_parser = parse_prime)]
        p: u64,
        #[arg(short = 'j', default_value_t = 8)]
        j: u32,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormsCmd {
    Disc {
        #[command(flatten)]
        form: FormArg,
    },
    Factor {
        #[command(flatten)]
        form: FormArg,
    },
    /// An equivalent form with F(1, 0) ≠ 0 and F(0, 1) ≠ 0.
    Normalize {
        #[command(flatten)]
        form: FormArg,
    },
}

#[derive(Args, Debug, Serialize, Clone, Default)]
pub struct BoundArgs {
    #[arg(short = 'n')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(short = 't')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<u32>,
    #[arg(short = 'r')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[arg(short = 'H')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[arg(short = 'M')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

fn parse_bound_name(s: &str) -> Result<BoundName, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = BoundName::ALL.iter().map(|b| b.as_str()).collect();
        format!("unknown bound {s:?}; one of {}", names.join(", "))
    })
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsCmd {
    /// Evaluates a bound.
    Eval {
        #[arg(long, value_parser = parse_bound_name)]
        name: BoundName,
        #[command(flatten)]
        params: BoundArgs,
    },
    /// Checks a solver summary record against its count bound.
    Verify {
        /// JSON-lines output of `solve tm` or `solve sunit` (`-` for stdin).
        #[arg(long)]
        summary: PathBuf,
        /// Bound to use instead of the default for the solver.
        #[arg(long, value_parser = parse_bound_name)]
        name: Option<BoundName>,
    },
}

//! Command-line interface over the stepped-search toolkit.
//!
//! Exit codes: 0 = factored / pair found, 1 = certified or certain prime,
//! 2 = input or configuration error, 3 = heuristic step exhausted without
//! a verdict.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stepfermat::arith::parse_natural;
use stepfermat::fermat::IterationRecord;
use stepfermat::limit::{self, CertifyOutcome};
use stepfermat::pipeline::{self, FactorOptions};
use stepfermat::screening;
use stepfermat::stepped::{self, SearchConfig};
use stepfermat::totient::{euler_phi, pair_phi, FactorPair, PrimePower};
use stepfermat::{Error, Natural};

const SEED_VAR: &str = "STEPFERMAT_SEED";

#[derive(Parser)]
#[command(
    name = "stepfermat",
    version,
    about = "Factor odd numbers by totient-seeded stepped pair searches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Factor completely through the recursive pipeline.
    First,
    /// Run a single stepped search on n to the trivial pair.
    Exhaustive,
}

#[derive(Subcommand)]
enum Command {
    /// Factor n into certified prime powers (or enumerate its pairs).
    Factor {
        n: String,
        /// Step factor: 1 or even. 1 and 2 are exhaustive.
        #[arg(long, default_value_t = 2)]
        step: u64,
        #[arg(long, value_enum, default_value_t = Mode::First)]
        mode: Mode,
        /// Write one JSON line per search probe to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print the result as a single JSON document.
        #[arg(long)]
        json: bool,
    },
    /// Run the classical walk and stepped walks side by side.
    Compare {
        n: String,
        /// Comma-separated step factors.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        steps: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Certify n prime by an exhausted limit search (or find a pair).
    Certify {
        n: String,
        /// Odd prime exclusion bound.
        #[arg(long, conflicts_with = "auto")]
        bl: Option<String>,
        /// Use the recommended bound for n.
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the limit-search parameters for n and a bound, no search.
    Limit {
        n: String,
        #[arg(long)]
        bl: String,
        #[arg(long)]
        json: bool,
    },
    /// Euler totient of n from its prime factorization.
    Totient {
        n: String,
        /// Comma-separated prime powers, e.g. 7,89,113 or 3^2,5.
        #[arg(long)]
        factors: String,
        #[arg(long)]
        json: bool,
    },
    /// Pair totient (a-1)(b-1) of a divisor pair.
    Phis {
        a: String,
        b: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Factor {
            n,
            step,
            mode,
            trace,
            json,
        } => cmd_factor(&n, step, mode, trace.as_deref(), json),
        Command::Compare { n, steps, json } => cmd_compare(&n, &steps, json),
        Command::Certify { n, bl, auto, json } => cmd_certify(&n, bl.as_deref(), auto, json),
        Command::Limit { n, bl, json } => cmd_limit(&n, &bl, json),
        Command::Totient { n, factors, json } => cmd_totient(&n, &factors, json),
        Command::Phis { a, b, json } => cmd_phis(&a, &b, json),
    }
}

fn fail(e: impl Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn seed_from_env() -> Result<Option<u64>, String> {
    match std::env::var(SEED_VAR) {
        Ok(raw) => raw
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("{SEED_VAR} must be a decimal u64, got `{raw}`")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{SEED_VAR}: {e}")),
    }
}

/// One probe of a search, as written to `--trace` files (JSON lines).
#[derive(Serialize)]
struct TraceLine {
    i: u64,
    x: String,
    y_sq: String,
    y_integer: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<String>,
}

impl From<&IterationRecord> for TraceLine {
    fn from(r: &IterationRecord) -> Self {
        Self {
            i: r.i,
            x: r.x.to_string(),
            y_sq: r.y_sq.to_string(),
            y_integer: r.y.is_some(),
            a: r.pair.as_ref().map(|p| p.a().to_string()),
            b: r.pair.as_ref().map(|p| p.b().to_string()),
        }
    }
}

/// Probe sink that appends JSON lines, flushing after each so a killed run
/// still leaves a complete prefix. The first I/O error is kept and
/// reported after the search.
struct TraceWriter {
    out: BufWriter<File>,
    error: Option<std::io::Error>,
}

impl TraceWriter {
    fn create(path: &std::path::Path) -> std::io::Result<Self> {
        Ok(Self {
            out: BufWriter::new(File::create(path)?),
            error: None,
        })
    }

    fn record(&mut self, r: &IterationRecord) {
        if self.error.is_some() {
            return;
        }
        let line = TraceLine::from(r);
        let result = serde_json::to_writer(&mut self.out, &line)
            .map_err(std::io::Error::from)
            .and_then(|()| self.out.write_all(b"\n"))
            .and_then(|()| self.out.flush());
        if let Err(e) = result {
            self.error = Some(e);
        }
    }

    fn finish(self) -> Result<(), std::io::Error> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn cmd_factor(
    n: &str,
    step: u64,
    mode: Mode,
    trace: Option<&std::path::Path>,
    json: bool,
) -> ExitCode {
    let n = match parse_natural(n) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let seed = match seed_from_env() {
        Ok(seed) => seed,
        Err(e) => return fail(e),
    };
    let mut writer = match trace.map(TraceWriter::create) {
        Some(Ok(w)) => Some(w),
        Some(Err(e)) => return fail(e),
        None => None,
    };

    let code = match mode {
        Mode::First => {
            let opts = FactorOptions {
                step,
                seed,
                ..FactorOptions::default()
            };
            let mut sink = |r: &IterationRecord| {
                if let Some(w) = writer.as_mut() {
                    w.record(r);
                }
            };
            let result = pipeline::factor_with_trace(
                &n,
                &opts,
                trace.is_some().then_some(&mut sink as &mut dyn FnMut(&IterationRecord)),
            );
            match result {
                Ok(report) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    } else {
                        print_report(&report);
                    }
                    let prime = report.factors.len() == 1
                        && report.factors[0].exponent == 1
                        && report.factors[0].prime == n;
                    ExitCode::from(if prime { 1 } else { 0 })
                }
                Err(e @ Error::HeuristicExhausted { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
                Err(e) => return fail(e),
            }
        }
        Mode::Exhaustive => {
            let config = match SearchConfig::exhaustive(step) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let mut sink = |r: &IterationRecord| {
                if let Some(w) = writer.as_mut() {
                    w.record(r);
                }
            };
            match stepped::search_with(&n, &config, &mut sink) {
                Ok(outcome) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&outcome).unwrap());
                    } else {
                        for f in &outcome.found {
                            println!("pair {} at iteration {}", f.pair, f.iteration);
                        }
                        println!(
                            "terminal: {:?} after {} iterations ({})",
                            outcome.terminal,
                            outcome.iterations,
                            if outcome.certain { "certain" } else { "heuristic" }
                        );
                    }
                    let nontrivial = outcome.found.iter().any(|f| !f.pair.is_trivial());
                    if nontrivial {
                        ExitCode::from(0)
                    } else if outcome.certain {
                        ExitCode::from(1)
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => return fail(e),
            }
        }
    };

    if let Some(w) = writer {
        if let Err(e) = w.finish() {
            return fail(format!("trace write failed: {e}"));
        }
    }
    code
}

fn print_report(report: &pipeline::FactorizationReport) {
    if report.factors.is_empty() {
        println!("{} = (empty product)", report.n);
    } else if report.factors.len() == 1
        && report.factors[0].exponent == 1
        && report.factors[0].prime == report.n
    {
        println!("{} is prime", report.n);
    } else {
        let product = report
            .factors
            .iter()
            .map(|f| {
                if f.exponent == 1 {
                    f.prime.to_string()
                } else {
                    format!("{}^{}", f.prime, f.exponent)
                }
            })
            .collect::<Vec<_>>()
            .join(" · ");
        println!("{} = {}", report.n, product);
    }
    for f in &report.factors {
        match &f.evidence {
            pipeline::PrimeEvidence::TrialDivision { horizon } => {
                println!("  {} prime by trial division to {horizon}", f.prime);
            }
            pipeline::PrimeEvidence::LimitCertificate(cert) => {
                println!(
                    "  {} prime by limit certificate: b_limit={} iterations={}",
                    f.prime, cert.params.b_limit, cert.params.iterations
                );
            }
            pipeline::PrimeEvidence::ProbabilisticOnly { rounds } => {
                println!("  {} probable prime ({rounds} witness rounds)", f.prime);
            }
        }
    }
    for s in &report.stages {
        match &s.kind {
            pipeline::StageKind::Search { target, step } => {
                println!("stage search target={target} step={step} iterations={}", s.iterations);
            }
            pipeline::StageKind::Certification { target, b_limit } => {
                println!(
                    "stage certification target={target} b_limit={b_limit} iterations={}",
                    s.iterations
                );
            }
        }
    }
    println!("total iterations: {}", report.total_iterations);
}

fn cmd_compare(n: &str, steps: &[u64], json: bool) -> ExitCode {
    let n = match parse_natural(n) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let cmp = match pipeline::compare_algorithms(&n, steps) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&cmp).unwrap());
        return ExitCode::SUCCESS;
    }
    match &cmp {
        pipeline::AlgorithmComparison::Prime(p) => {
            println!("{} is prime; trivial-pair iterations:", p.n);
            println!("  classical: {}", p.classical_trivial);
            for row in &p.rows {
                println!(
                    "  step {}: {} ({})",
                    row.step,
                    row.trivial_iteration,
                    if row.certain { "certain" } else { "heuristic" }
                );
            }
        }
        pipeline::AlgorithmComparison::Composite(c) => {
            println!(
                "classical: start {} bound {} pair {} at iteration {}",
                c.classical.start_x, c.classical.totient_bound, c.classical.pair, c.classical.iteration
            );
            for row in &c.rows {
                match &row.found {
                    Some(f) => println!(
                        "step {}: start {} bound {} pair {} at iteration {}{}",
                        row.step,
                        row.start_x,
                        row.totient_bound,
                        f.pair,
                        f.iteration,
                        match row.classification_consistent {
                            Some(true) => " (consistent)",
                            Some(false) => " (INCONSISTENT)",
                            None => " (different pair)",
                        }
                    ),
                    None => println!(
                        "step {}: start {} bound {} no pair; trivial at {}",
                        row.step,
                        row.start_x,
                        row.totient_bound,
                        row.trivial_iteration.unwrap_or(0)
                    ),
                }
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_certify(n: &str, bl: Option<&str>, auto: bool, json: bool) -> ExitCode {
    let n = match parse_natural(n) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let b_limit = match (bl, auto) {
        (Some(raw), false) => match parse_natural(raw) {
            Ok(b) => b,
            Err(e) => return fail(e),
        },
        (None, true) => match limit::recommended_b_limit(&n) {
            Ok(b) => b,
            Err(e) => return fail(e),
        },
        (None, false) => return fail("pass --bl <prime> or --auto"),
        (Some(_), true) => unreachable!("clap rejects --bl with --auto"),
    };
    if b_limit < Natural::from(3u32) {
        return fail(Error::TooSmall(b_limit));
    }
    // Cover every odd prime below the bound, as the certificate requires.
    let horizon = match num_traits::ToPrimitive::to_u64(&(&b_limit - 2u32)) {
        Some(h) => h.max(1),
        None => return fail(Error::BoundTooLarge(b_limit)),
    };
    let receipt = match screening::trial_division(&n, horizon) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Some(hit) = &receipt.divisor {
        // Trial division alone already split n.
        if json {
            println!("{}", serde_json::to_string_pretty(&receipt).unwrap());
        } else {
            println!("composite: divisor {} found by trial division", hit.prime);
        }
        return ExitCode::from(0);
    }
    match limit::certify(&n, &b_limit, &receipt) {
        Ok(outcome) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&outcome).unwrap());
            }
            match outcome {
                CertifyOutcome::Composite { pair, iteration } => {
                    if !json {
                        println!("composite: pair {pair} at iteration {iteration}");
                    }
                    ExitCode::from(0)
                }
                CertifyOutcome::Certificate(cert) => {
                    if !json {
                        println!("prime: limit search exhausted");
                        println!(
                            "  b_limit={} trial_horizon={} iterations={} x_limit={} a_limit={}",
                            cert.params.b_limit,
                            cert.params.trial_horizon,
                            cert.params.iterations,
                            cert.params.x_limit,
                            cert.params.a_limit
                        );
                    }
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => fail(e),
    }
}

#[derive(Serialize)]
struct LimitReport {
    n: String,
    b_limit: String,
    admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_limit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_limit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_limit_floor: Option<String>,
}

fn cmd_limit(n: &str, bl: &str, json: bool) -> ExitCode {
    let n = match parse_natural(n) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let b_limit = match parse_natural(bl) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let x1 = match stepped::start_x(&n, limit::CERT_STEP) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let admissible = match limit::admits_b_limit(&n, &x1, &b_limit) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    if !admissible {
        let floor = match limit::b_limit_floor(&n, &x1) {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        if json {
            let report = LimitReport {
                n: n.to_string(),
                b_limit: b_limit.to_string(),
                admissible: false,
                iterations: None,
                x_limit: None,
                a_limit: None,
                b_limit_floor: Some(floor.to_string()),
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        } else {
            println!(
                "b_limit {b_limit} inadmissible for {n}: largest admissible value is {floor}"
            );
        }
        return ExitCode::from(2);
    }
    let iterations = match limit::limit_iterations(&n, &b_limit, &x1, limit::CERT_STEP) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let x_limit = match limit::limit_x(&x1, limit::CERT_STEP, &iterations) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let a_limit = match limit::largest_odd_quotient(&n, &b_limit) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    if json {
        let report = LimitReport {
            n: n.to_string(),
            b_limit: b_limit.to_string(),
            admissible: true,
            iterations: Some(iterations.to_string()),
            x_limit: Some(x_limit.to_string()),
            a_limit: Some(a_limit.to_string()),
            b_limit_floor: None,
        };
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("b_limit {b_limit} admissible for {n}");
        println!("iterations: {iterations}");
        println!("x_limit: {x_limit}");
        println!("a_limit: {a_limit}");
    }
    ExitCode::SUCCESS
}

#[derive(Serialize)]
struct TotientReport {
    n: String,
    phi: String,
}

fn parse_prime_powers(spec: &str) -> Result<Vec<PrimePower>, Error> {
    spec.split(',')
        .map(|token| {
            let token = token.trim();
            let (prime, exponent) = match token.split_once('^') {
                Some((p, k)) => (p.trim(), k.trim()),
                None => (token, "1"),
            };
            let prime = parse_natural(prime)?;
            let exponent: u32 = exponent.parse().map_err(|_| {
                Error::InvalidDecimal(exponent.to_string(), "exponent must be a positive integer")
            })?;
            PrimePower::new(prime, exponent)
        })
        .collect()
}

fn cmd_totient(n: &str, factors: &str, json: bool) -> ExitCode {
    let n = match parse_natural(n) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    let powers = match parse_prime_powers(factors) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let mut product = Natural::from(1u32);
    for p in &powers {
        product *= p.value();
    }
    if product != n {
        return fail(Error::FactorProductMismatch { product, n });
    }
    let phi = match euler_phi(&powers) {
        Ok(phi) => phi,
        Err(e) => return fail(e),
    };
    if json {
        let report = TotientReport {
            n: n.to_string(),
            phi: phi.to_string(),
        };
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("phi({n}) = {phi}");
    }
    ExitCode::SUCCESS
}

#[derive(Serialize)]
struct PhisReport {
    a: String,
    b: String,
    product: String,
    pair_phi: String,
}

fn cmd_phis(a: &str, b: &str, json: bool) -> ExitCode {
    let a = match parse_natural(a) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let b = match parse_natural(b) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let pair = match FactorPair::new(a, b) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let phi = pair_phi(&pair);
    if json {
        let report = PhisReport {
            a: pair.a().to_string(),
            b: pair.b().to_string(),
            product: pair.product().to_string(),
            pair_phi: phi.to_string(),
        };
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("pair {}: product {}, pair totient {}", pair, pair.product(), phi);
    }
    ExitCode::SUCCESS
}

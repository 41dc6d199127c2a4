//! `mod1`: configure and run circle-spectrum and digit experiments.
//!
//! Exit codes: 0 success (and `verdict` converges), 2 configuration error,
//! 3 `verdict` diverges, 4 `verdict` indeterminate, 5 I/O failure.

mod manifest;
mod output;

use clap::{Parser, Subcommand};
use manifest::{manifest_path, RunManifest};
use mod1_core::{
    benford_digit_probabilities, convergence_verdict, distance_to_benford, simulate_product_digits,
    Base, DensitySequence, DistanceMetric, ExperimentConfig, FactorFamily, Mod1Error,
    ModifiedPareto, VerdictKind,
};
use output::fmt12;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "mod1",
    version,
    about = "Sums modulo 1: circle spectra, convergence verdicts, Benford digit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Fourier coefficients of a family's first factor density
    /// as CSV (n, re, im, modulus).
    Spectrum {
        /// Family name: uniform | box | box11 | box-powers | box-cycle |
        /// raised-cosine | atoms | pareto
        #[arg(long)]
        family: String,
        /// Family parameters, e.g. "m=4", "alpha=2", "0:0.5,0.5:0.5"
        #[arg(long, default_value = "")]
        params: String,
        /// Largest frequency to print (rows n = 0..=max-n)
        #[arg(long = "max-n")]
        max_n: usize,
        /// Write CSV here (with a manifest alongside) instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the coefficient-product convergence test on a sequence and print
    /// a JSON verdict. Exit code encodes the verdict (0/3/4).
    Verdict {
        /// Sequence descriptor, e.g. "box:i=2 repeated", "box:11^m",
        /// "atoms:{0,1/2} repeated", "pareto:alpha=2"
        #[arg(long)]
        sequence: String,
        #[arg(long = "max-n", default_value_t = 64)]
        max_n: usize,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
    },
    /// Monte Carlo first-digit experiment: CSV of empirical vs Benford
    /// frequencies with distance footers, plus a manifest.
    Benford {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "")]
        params: String,
        /// Number of factors in each product
        #[arg(long)]
        factors: usize,
        /// Number of independent products
        #[arg(long)]
        trials: u64,
        /// Digit base: an integer >= 2, or "euler" for base e
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the base-e mantissa law of the modified Pareto density:
    /// CSV of (s, cdf, density, tail_bound) on a grid over [1, e].
    ParetoTable {
        #[arg(long)]
        alpha: f64,
        /// Series terms per evaluation
        #[arg(long, default_value_t = 10_000)]
        terms: usize,
        /// Grid cells (points+1 rows, endpoints included)
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(cli.command, started) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    };
    std::process::exit(code);
}

/// MOD1_THREADS caps parallelism; 0 or unset means automatic.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("MOD1_THREADS") {
        if let Ok(threads) = value.trim().parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

enum AppError {
    Core(Mod1Error),
    Io(std::io::Error),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Mod1Error> for AppError {
    fn from(e: Mod1Error) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn classify(err: &AppError) -> i32 {
    match err {
        AppError::Io(_) => 5,
        AppError::Core(_) => 2,
    }
}

fn run(command: Command, started: Instant) -> Result<i32, AppError> {
    match command {
        Command::Spectrum {
            family,
            params,
            max_n,
            out,
        } => cmd_spectrum(&family, &params, max_n, out, started),
        Command::Verdict {
            sequence,
            max_n,
            horizon,
            threshold,
        } => cmd_verdict(&sequence, max_n, horizon, threshold),
        Command::Benford {
            family,
            params,
            factors,
            trials,
            base,
            seed,
            out,
        } => cmd_benford(&family, &params, factors, trials, &base, seed, out, started),
        Command::ParetoTable {
            alpha,
            terms,
            points,
            out,
        } => cmd_pareto_table(alpha, terms, points, out, started),
    }
}

/// Deliver a CSV: stdout when no path was given, otherwise the file plus a
/// manifest JSON alongside it.
fn deliver(
    csv: String,
    out: Option<PathBuf>,
    mut manifest: RunManifest,
    started: Instant,
) -> Result<i32, AppError> {
    match out {
        None => {
            print!("{csv}");
            Ok(0)
        }
        Some(path) => {
            std::fs::write(&path, csv.as_bytes())?;
            manifest.record_output(&path, csv.as_bytes());
            manifest.wall_ms = started.elapsed().as_millis();
            manifest.write(&manifest_path(&path))?;
            Ok(0)
        }
    }
}

fn cmd_spectrum(
    family: &str,
    params: &str,
    max_n: usize,
    out: Option<PathBuf>,
    started: Instant,
) -> Result<i32, AppError> {
    let family = FactorFamily::from_name_params(family, params)?;
    let seq = family.with_base(family_base(&family, None)?)?;
    let mut csv = String::from("n,re,im,modulus\n");
    for n in 0..=max_n as i64 {
        let c = seq.factor_coefficient(1, n)?;
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            fmt12(c.re),
            fmt12(c.im),
            fmt12(c.norm())
        ));
    }
    let manifest = RunManifest::new(
        "spectrum",
        json!({ "family": family, "max_n": max_n }),
        None,
    );
    deliver(csv, out, manifest, started)
}

fn cmd_verdict(
    sequence: &str,
    max_n: usize,
    horizon: usize,
    threshold: f64,
) -> Result<i32, AppError> {
    let family = FactorFamily::parse_descriptor(sequence)?;
    let seq = family.with_base(family_base(&family, None)?)?;
    let verdict = convergence_verdict(&seq, max_n, horizon, threshold)?;
    let body = json!({
        "verdict": verdict.verdict,
        "worst_n": verdict.worst_n,
        "limiting_modulus_estimate": verdict.limiting_modulus_estimate,
        "l1_bound": verdict.l1_bound,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&body).expect("verdict serializes")
    );
    Ok(match verdict.verdict {
        VerdictKind::Converges => 0,
        VerdictKind::Diverges => 3,
        VerdictKind::Indeterminate => 4,
    })
}

/// The base an experiment runs in: explicit flag when given, otherwise e for
/// the Pareto family and 10 for everything else.
fn family_base(family: &FactorFamily, explicit: Option<&str>) -> Result<Base, Mod1Error> {
    match explicit {
        Some(text) => Base::parse(text),
        None => Ok(match family {
            FactorFamily::Pareto { .. } => Base::Euler,
            _ => Base::Integer(10),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_benford(
    family: &str,
    params: &str,
    factors: usize,
    trials: u64,
    base: &str,
    seed: u64,
    out: PathBuf,
    started: Instant,
) -> Result<i32, AppError> {
    let family = FactorFamily::from_name_params(family, params)?;
    let base = family_base(&family, Some(base))?;
    let cfg = ExperimentConfig {
        base,
        factor_count: factors,
        trials,
        seed,
        family,
        truncation: 64,
        output: Some(out.clone()),
    };
    let digits = simulate_product_digits(&cfg)?;
    let reference = benford_digit_probabilities(base);

    let mut csv = String::from("digit,empirical_freq,benford_prob,abs_diff\n");
    for ((j, p), (_, b)) in digits.digits().zip(reference.digits()) {
        csv.push_str(&format!(
            "{j},{},{},{}\n",
            fmt12(p),
            fmt12(b),
            fmt12((p - b).abs())
        ));
    }
    let l1 = distance_to_benford(&digits, DistanceMetric::L1)?;
    let sup = distance_to_benford(&digits, DistanceMetric::Sup)?;
    let chi = distance_to_benford(&digits, DistanceMetric::ChiSquare)?;
    csv.push_str(&format!("l1,{}\n", fmt12(l1)));
    csv.push_str(&format!("sup,{}\n", fmt12(sup)));
    csv.push_str(&format!("chi_square,{}\n", fmt12(chi)));

    let manifest = RunManifest::new(
        "benford",
        serde_json::to_value(&cfg).expect("config serializes"),
        Some(seed),
    );
    deliver(csv, Some(out), manifest, started)
}

fn cmd_pareto_table(
    alpha: f64,
    terms: usize,
    points: usize,
    out: Option<PathBuf>,
    started: Instant,
) -> Result<i32, AppError> {
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Mod1Error::config(format!(
            "pareto-table needs alpha > 1 for a convergent series, got {alpha}"
        ))
        .into());
    }
    if points < 1 {
        return Err(Mod1Error::config("points must be at least 1").into());
    }
    let p = ModifiedPareto::new(alpha)?;
    let e = std::f64::consts::E;
    let mut csv = String::from("s,cdf,density,tail_bound\n");
    for k in 0..=points {
        let s = if k == points {
            e
        } else {
            1.0 + (e - 1.0) * k as f64 / points as f64
        };
        let (cdf, cdf_tail) = p.mantissa_cdf(s, terms)?;
        let (density, density_tail) = p.mantissa_density(s, terms)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt12(s),
            fmt12(cdf),
            fmt12(density),
            fmt12(cdf_tail.max(density_tail))
        ));
    }
    let manifest = RunManifest::new(
        "pareto-table",
        json!({ "alpha": alpha, "terms": terms, "points": points }),
        None,
    );
    deliver(csv, out, manifest, started)
}

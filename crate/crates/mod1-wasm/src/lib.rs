//! Browser bindings: three interactive views over the circle toolkit.
//!
//! Each export takes a factor-sequence descriptor (same grammar as the CLI,
//! e.g. `box:i=4 repeated`, `box:11^m`, `atoms:{0,1/2}`, `pareto:alpha=2`)
//! and returns a JSON string for the page to plot. The `*_impl` functions
//! hold the logic so they stay testable off-wasm; the exported wrappers only
//! translate errors into `JsValue`.

use mod1_core::{
    benford_digit_probabilities, convergence_verdict, distance_to_benford, l1_distance_to_uniform,
    simulate_product_digits, sum_mod1_spectrum, Base, DistanceMetric, ExperimentConfig,
    FactorFamily, Result, VerdictKind,
};
use wasm_bindgen::prelude::*;

fn verdict_name(kind: VerdictKind) -> &'static str {
    match kind {
        VerdictKind::Converges => "converges",
        VerdictKind::Diverges => "diverges",
        VerdictKind::Indeterminate => "indeterminate",
    }
}

fn natural_base(family: &FactorFamily) -> Base {
    match family {
        FactorFamily::Pareto { .. } => Base::Euler,
        _ => Base::Integer(10),
    }
}

fn curve_impl(descriptor: &str, factors: u32, truncation: u32, grid: u32) -> Result<String> {
    let family = FactorFamily::parse_descriptor(descriptor)?;
    let seq = family.with_base(natural_base(&family))?;
    let truncation = truncation.clamp(1, 512) as usize;
    let grid = grid.clamp((2 * truncation + 1) as u32, 8192) as usize;
    let cs = sum_mod1_spectrum(&seq, factors.max(1) as usize, truncation)?;
    let distance = l1_distance_to_uniform(&cs, grid)?;
    let mut xs = Vec::with_capacity(grid);
    let mut ys = Vec::with_capacity(grid);
    for j in 0..grid {
        let x = j as f64 / grid as f64;
        xs.push(x);
        ys.push(cs.spectrum.fejer_mean(x)?);
    }
    Ok(serde_json::json!({
        "x": xs,
        "y": ys,
        "grid_l1": distance.grid_l1,
        "fejer_bound": distance.fejer_bound,
    })
    .to_string())
}

fn digits_impl(
    descriptor: &str,
    factors: u32,
    trials: u32,
    base: &str,
    seed: u32,
) -> Result<String> {
    let family = FactorFamily::parse_descriptor(descriptor)?;
    let base = Base::parse(base)?;
    let cfg = ExperimentConfig {
        base,
        factor_count: factors.max(1) as usize,
        trials: trials.clamp(1, 2_000_000) as u64,
        seed: seed as u64,
        family,
        truncation: 64,
        output: None,
    };
    let digits = simulate_product_digits(&cfg)?;
    let reference = benford_digit_probabilities(base);
    let l1 = distance_to_benford(&digits, DistanceMetric::L1)?;
    let sup = distance_to_benford(&digits, DistanceMetric::Sup)?;
    Ok(serde_json::json!({
        "digits": digits.digits().map(|(j, _)| j).collect::<Vec<_>>(),
        "empirical": digits.probabilities(),
        "benford": reference.probabilities(),
        "l1": l1,
        "sup": sup,
        "trials": cfg.trials,
    })
    .to_string())
}

fn report_impl(descriptor: &str, max_n: u32, horizon: u32, threshold: f64) -> Result<String> {
    let family = FactorFamily::parse_descriptor(descriptor)?;
    let seq = family.with_base(natural_base(&family))?;
    let verdict = convergence_verdict(
        &seq,
        max_n.clamp(1, 256) as usize,
        horizon.max(1) as usize,
        threshold,
    )?;
    Ok(serde_json::json!({
        "verdict": verdict_name(verdict.verdict),
        "worst_n": verdict.worst_n,
        "limiting_modulus_estimate": verdict.limiting_modulus_estimate,
        "l1_bound": verdict.l1_bound,
        "frequencies": verdict.per_frequency.iter().map(|f| f.n).collect::<Vec<_>>(),
        "moduli": verdict.per_frequency.iter().map(|f| f.modulus).collect::<Vec<_>>(),
        "states": verdict
            .per_frequency
            .iter()
            .map(|f| verdict_name(f.state))
            .collect::<Vec<_>>(),
    })
    .to_string())
}

/// Fejér reconstruction of the density of `Y_1 + ... + Y_M mod 1` on a grid,
/// with its distance to uniform. JSON: `{x, y, grid_l1, fejer_bound}`.
#[wasm_bindgen]
pub fn reconstruction_curve(
    descriptor: &str,
    factors: u32,
    truncation: u32,
    grid: u32,
) -> std::result::Result<String, JsValue> {
    curve_impl(descriptor, factors, truncation, grid).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Seeded digit experiment for the product `X_1···X_M`. JSON:
/// `{digits, empirical, benford, l1, sup, trials}`.
#[wasm_bindgen]
pub fn digit_experiment(
    descriptor: &str,
    factors: u32,
    trials: u32,
    base: &str,
    seed: u32,
) -> std::result::Result<String, JsValue> {
    digits_impl(descriptor, factors, trials, base, seed)
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

/// The coefficient-product convergence test with per-frequency moduli.
/// JSON: `{verdict, worst_n, limiting_modulus_estimate, l1_bound,
/// frequencies, moduli, states}`.
#[wasm_bindgen]
pub fn convergence_report(
    descriptor: &str,
    max_n: u32,
    horizon: u32,
    threshold: f64,
) -> std::result::Result<String, JsValue> {
    report_impl(descriptor, max_n, horizon, threshold)
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

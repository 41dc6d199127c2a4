//! Adaptive Gauss–Kronrod quadrature with breakpoint-aware panel seeding.
//!
//! Densities declare their discontinuity points; the integrator splits there
//! before refining, so narrow boxes and kinks are resolved instead of missed.

use crate::error::{Mod1Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 15-point Kronrod rule with embedded 7-point Gauss rule (positive abscissae).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
// Gauss weights pair with the odd-indexed Kronrod abscissae.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of panels in the final subdivision.
    pub panels: usize,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One Gauss–Kronrod pass over `[a, b]`; returns the Kronrod value and an
/// error estimate from the Gauss/Kronrod discrepancy.
fn gauss_kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut res_abs = WGK[7] * f_center.abs();

    let mut samples = [0.0f64; 7];
    for j in 0..7 {
        let offset = half * XGK[j];
        let f1 = f(center - offset);
        let f2 = f(center + offset);
        let sum = f1 + f2;
        samples[j] = sum;
        kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }

    // Scaled discrepancy, clamped below by roundoff on the magnitude sum.
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * (samples[j] - 2.0 * mean).abs();
    }
    let raw_err = ((kronrod - gauss) * half).abs();
    let res_asc = res_asc * half.abs();
    let mut err = raw_err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs * half.abs();
    (kronrod * half, err.max(roundoff))
}

/// Integrate `f` over `[a, b]`, splitting first at the supplied breakpoints
/// and then adaptively until the summed error estimate drops below `tol`.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<QuadOutcome> {
    if b <= a || a.is_nan() || b.is_nan() {
        return Ok(QuadOutcome {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }

    let mut edges: Vec<f64> = vec![a];
    for &p in breakpoints {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();

    let mut heap = BinaryHeap::new();
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gauss_kronrod(f, w[0], w[1]);
        total_value += v;
        total_error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }

    while total_error > tol {
        if heap.len() >= max_panels {
            return Err(Mod1Error::QuadratureDidNotConverge {
                achieved: total_error,
                tolerance: tol,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap cannot be empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept what we have.
            return Err(Mod1Error::QuadratureDidNotConverge {
                achieved: total_error,
                tolerance: tol,
                panels: heap.len() + 1,
            });
        }
        let (v1, e1) = gauss_kronrod(f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    Ok(QuadOutcome {
        value: total_value,
        error: total_error,
        panels: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn constant_integrates_exactly() {
        let out = integrate(&|_| 1.0, 0.0, 1.0, &[], 1e-12, 100).unwrap();
        assert!((out.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integral_vanishes() {
        // One full period of cos integrates to zero.
        for n in [1i64, 3, 17] {
            let f = move |x: f64| (TAU * n as f64 * x).cos();
            let out = integrate(&f, 0.0, 1.0, &[], 1e-12, 2000).unwrap();
            assert!(out.value.abs() < 1e-11, "n = {n}: {}", out.value);
        }
    }

    #[test]
    fn narrow_box_needs_breakpoints() {
        // A box of width 1/64 at 1/8: with declared edges the mass is exact.
        let m = 64.0;
        let lo = 0.125 - 0.5 / m;
        let hi = 0.125 + 0.5 / m;
        let f = move |x: f64| if x >= lo && x <= hi { m } else { 0.0 };
        let out = integrate(&f, 0.0, 1.0, &[lo, hi], 1e-10, 4000).unwrap();
        assert!((out.value - 1.0).abs() < 1e-9, "got {}", out.value);
    }

    #[test]
    fn smooth_reference_value() {
        // ∫_0^1 sin(πx) dx = 2/π.
        let out = integrate(&|x: f64| (PI * x).sin(), 0.0, 1.0, &[], 1e-12, 200).unwrap();
        assert!((out.value - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn refusal_reports_achieved_error() {
        // Starved of panels, the integrator must fail loudly and report the
        // error estimate it reached.
        let f = |x: f64| (TAU * 200.0 * x).cos() * (1.0 + x);
        let err = integrate(&f, 0.0, 1.0, &[], 1e-14, 4).unwrap_err();
        match err {
            Mod1Error::QuadratureDidNotConverge {
                achieved, panels, ..
            } => {
                assert!(achieved > 1e-14);
                assert!(panels >= 4);
            }
            other => panic!("unexpected error: {other}"),
        }
    }
}

//! WebAssembly bindings for the browser demo.
//!
//! Each export returns a JSON string for the page to plot. The computations
//! live in plain functions so they run and are tested natively as well.

use frame_forge::envelopes::fit_decay;
use frame_forge::frames::{
    build_perturbed_basis, canonical_dual, cross_gram, frame_bounds, FrameSystem, PerturbationSpec,
};
use frame_forge::hermite::{evaluate_expansion, gaussian_coefficient, TestFunction};
use frame_forge::jaffard::{jaffard_predict, verify_inverse_decay, JaffardParams};
use frame_forge::linalg::inverse;
use frame_forge::{CoefficientSequence, TruncatedMatrix};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Size caps keeping each call interactive in a browser.
pub const MAX_TERMS: usize = 400;
pub const MAX_INVERSE_N: usize = 256;
pub const MAX_FRAME_N: usize = 256;
const PLOT_POINTS: usize = 401;

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn check_range(name: &str, v: usize, lo: usize, hi: usize) -> Result<(), String> {
    if v < lo || v > hi {
        Err(format!("{name} must lie in {lo}..={hi}, got {v}"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct HermiteCurve {
    pub x: Vec<f64>,
    pub exact: Vec<f64>,
    pub partial: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// `‖f − Σ_{n≤M} c_n h_n‖_{L²}` by Parseval.
    pub l2_error: f64,
}

/// Partial Hermite sum of `e^{−a x²/2}` with `terms` coefficients on `[−x_max, x_max]`.
pub fn hermite_curve_data(a: f64, terms: usize, x_max: f64) -> Result<HermiteCurve, String> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(format!("a must be positive, got {a}"));
    }
    if !(x_max > 0.0 && x_max <= 40.0) {
        return Err(format!("x_max must lie in (0, 40], got {x_max}"));
    }
    check_range("terms", terms, 1, MAX_TERMS)?;
    let f = TestFunction::gaussian(a);
    let coefficients: Vec<f64> = (1..=terms).map(|n| gaussian_coefficient(a, n)).collect();
    let c = CoefficientSequence::from_real(&coefficients).map_err(|e| e.to_string())?;
    let x: Vec<f64> = (0..PLOT_POINTS).map(|i| -x_max + 2.0 * x_max * i as f64 / (PLOT_POINTS - 1) as f64).collect();
    let exact = x.iter().map(|&t| f.eval(t).expect("gaussians evaluate")).collect();
    let partial = x.iter().map(|&t| evaluate_expansion(&c, t).re).collect();
    let norm_sq = f.l2_norm_sq().expect("closed-form norm");
    let l2_error = (norm_sq - coefficients.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
    Ok(HermiteCurve { x, exact, partial, coefficients, l2_error })
}

#[derive(Debug, Serialize)]
pub struct InverseProfile {
    /// Distances `d = |m − n|` from the central row.
    pub distance: Vec<usize>,
    /// `max |A⁻¹_{m,m±d}|` over the interior rows.
    pub observed: Vec<f64>,
    /// `C_inv e^{−γ₁ d}`.
    pub predicted: Vec<f64>,
    pub gamma1: f64,
    pub c_inv: f64,
    pub r: f64,
    pub violations: usize,
    pub fitted_gamma: Option<f64>,
}

/// Off-diagonal profile of the inverse of `tridiagonal(off, 1, off)` against the predicted envelope.
pub fn inverse_decay_profile_data(off: f64, n: usize, gamma: f64) -> Result<InverseProfile, String> {
    check_range("n", n, 16, MAX_INVERSE_N)?;
    if !(off.abs() < 0.5) {
        return Err(format!("|off| must be below 1/2 for an invertible matrix, got {off}"));
    }
    let a = TruncatedMatrix::tridiagonal(n, off, 1.0, off);
    let rep = jaffard_predict(&a, 1.0, gamma, JaffardParams::default()).map_err(|e| e.to_string())?;
    let chk = verify_inverse_decay(&a, &rep).map_err(|e| e.to_string())?;
    let inv = inverse(a.dense()).map_err(|e| e.to_string())?;
    let (lo, hi) = a.window();
    let span = hi - lo;
    let distance: Vec<usize> = (0..=span).collect();
    let observed = distance
        .iter()
        .map(|&d| {
            (lo..=hi - d).map(|m| inv[(m - 1, m + d - 1)].norm().max(inv[(m + d - 1, m - 1)].norm())).fold(0.0, f64::max)
        })
        .collect();
    let predicted = distance.iter().map(|&d| rep.c_inv_pred * (-rep.gamma1_pred * d as f64).exp()).collect();
    Ok(InverseProfile {
        distance,
        observed,
        predicted,
        gamma1: rep.gamma1_pred,
        c_inv: rep.c_inv_pred,
        r: rep.r_contraction,
        violations: chk.violations,
        fitted_gamma: chk.fit.map(|f| f.gamma),
    })
}

#[derive(Debug, Serialize)]
pub struct PerturbedFrame {
    pub singular_values: Vec<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `|⟨d_m, h_{m+j}⟩|` for the central dual element, `j = −J..J`.
    pub offsets: Vec<i64>,
    pub dual_row: Vec<f64>,
    pub dual_gamma: f64,
}

/// Frame data of `e_n = h_n + a h_{n+1}` and the decay of its canonical dual.
pub fn perturbed_frame_data(a: f64, eps: f64, n: usize) -> Result<PerturbedFrame, String> {
    check_range("n", n, 16, MAX_FRAME_N)?;
    let spec = PerturbationSpec::constant(a, vec![eps]);
    let e = build_perturbed_basis(&spec, n).map_err(|e| e.to_string())?.frame;
    let (lower_bound, upper_bound) = frame_bounds(&e);
    let d = canonical_dual(&e).map_err(|e| e.to_string())?;
    let g = cross_gram(&d, &FrameSystem::onb(n)).map_err(|e| e.to_string())?;
    let mid = n / 2;
    let reach = (n / 4) as i64;
    let offsets: Vec<i64> = (-reach..=reach).collect();
    let dual_row = offsets.iter().map(|&j| g.get(mid, (mid as i64 + j) as usize).norm()).collect();
    let dual_gamma = fit_decay(&g, 1.0).map_err(|e| e.to_string())?.gamma;
    Ok(PerturbedFrame {
        singular_values: e.singular_values().to_vec(),
        lower_bound,
        upper_bound,
        offsets,
        dual_row,
        dual_gamma,
    })
}

#[wasm_bindgen]
pub fn hermite_curve(a: f64, terms: usize, x_max: f64) -> Result<String, JsError> {
    hermite_curve_data(a, terms, x_max).and_then(|v| to_json(&v)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn inverse_decay_profile(off: f64, n: usize, gamma: f64) -> Result<String, JsError> {
    inverse_decay_profile_data(off, n, gamma).and_then(|v| to_json(&v)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn perturbed_frame(a: f64, eps: f64, n: usize) -> Result<String, JsError> {
    perturbed_frame_data(a, eps, n).and_then(|v| to_json(&v)).map_err(|e| JsError::new(&e))
}

//! Explicit constants for the inverse of a matrix with sub-exponential off-diagonal decay.
//!
//! Write `AA* = ‖AA*‖ (Id − R)` with `r = ‖R‖ < 1`. Splitting the Neumann series
//! of `R` at the index where `K^k e^{−γ''(1−ε)|m−n|^β}` drops below `r^k` gives
//! `Σ_k |(R^k)_{mn}| ≤ (1 + r/(1−r)·1/(2P) + 1/(1−r)) e^{−γ₁|m−n|^β}` with
//!
//! `γ₁ = min{ ln(1/r)/ln(K/r) · γ''(1−ε), ε γ'' }`.
//!
//! Then `A⁻¹ = A* (AA*)⁻¹ = ‖AA*‖⁻¹ A* Σ R^k` and the product bound give
//! `|A⁻¹_{mn}| ≤ C_inv e^{−γ₁|m−n|^β}`.

use serde::{Deserialize, Serialize};

use crate::envelopes::{fit_decay, membership_in, DecayFit, EnvelopeShape};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_TOL};
use crate::matrix::TruncatedMatrix;
use crate::series::{p_series, SERIES_TOL};

/// Free parameters; `None` selects `γ' = γ/2` and `γ'' = γ'/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JaffardParams {
    pub gamma_prime: Option<f64>,
    pub gamma_dprime: Option<f64>,
    pub eps: f64,
}

impl Default for JaffardParams {
    fn default() -> Self {
        Self { gamma_prime: None, gamma_dprime: None, eps: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JaffardReport {
    pub beta: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub gamma_dprime: f64,
    pub eps_free: f64,
    /// Constant of `A` in `E_{γ,β}` over the full truncation.
    pub c_a: f64,
    pub norm_aas: f64,
    pub r_contraction: f64,
    /// Constant of `AA*` in `E_{γ',β}` over the full truncation.
    pub c_aas: f64,
    pub c1: f64,
    /// `P_{γ'−γ'',β}`.
    pub p: f64,
    pub k: f64,
    pub gamma1_pred: f64,
    pub c_inv_pred: f64,
}

/// `ln(1/r)/ln(K/r)`, tending to 1 as `r → 0`.
fn log_ratio(r: f64, k: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        (1.0 / r).ln() / (k / r).ln()
    }
}

/// Predicted decay rate and constant of `A⁻¹` for `A ∈ E_{γ,β}`.
pub fn jaffard_predict(a: &TruncatedMatrix, beta: f64, gamma: f64, params: JaffardParams) -> Result<JaffardReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("β must lie in (0,1], got {beta}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("γ must be positive and finite, got {gamma}")));
    }
    let gamma_prime = params.gamma_prime.unwrap_or(gamma / 2.0);
    let gamma_dprime = params.gamma_dprime.unwrap_or(gamma_prime / 2.0);
    if !(gamma_prime > 0.0 && gamma_prime < gamma) {
        return Err(Error::InvalidParameter(format!("γ' = {gamma_prime} must lie in (0, γ)")));
    }
    if !(gamma_dprime > 0.0 && gamma_dprime < gamma_prime) {
        return Err(Error::InvalidParameter(format!("γ'' = {gamma_dprime} must lie in (0, γ')")));
    }
    let eps = params.eps;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("ε must lie in (0,1), got {eps}")));
    }
    let n = a.n();
    let c_a = membership_in(a, &EnvelopeShape::Jaffard { beta, gamma }, 1, n)?.constant();

    let aas = a.matmul(&a.adjoint())?;
    let norm_aas = linalg::hermitian_norm(aas.dense());
    if norm_aas == 0.0 {
        return Err(Error::Singular { sigma_min: 0.0 });
    }
    let mut resid = aas.dense().map(|z| -z / norm_aas);
    for i in 0..n {
        resid[(i, i)] += 1.0;
    }
    let r = linalg::hermitian_norm(&resid);
    // λ_min(AA*) = (1−r)‖AA*‖ = σ_min(A)²
    let sigma_min = ((1.0 - r).max(0.0) * norm_aas).sqrt();
    if sigma_min <= RANK_TOL {
        return Err(Error::Singular { sigma_min });
    }
    if r >= 1.0 {
        return Err(Error::NotContractive(r));
    }
    let c_aas = membership_in(&aas, &EnvelopeShape::Jaffard { beta, gamma: gamma_prime }, 1, n)?.constant();
    let c1 = 1.0 + c_aas / norm_aas;
    let p = p_series(gamma_prime - gamma_dprime, beta, SERIES_TOL);
    let k = 2.0 * c1 * p;
    if k <= r {
        return Err(Error::DegenerateConstants { k, r });
    }
    let gamma1 = (log_ratio(r, k) * gamma_dprime * (1.0 - eps)).min(eps * gamma_dprime);
    let series_const = 1.0 + r / (1.0 - r) / (2.0 * p) + 1.0 / (1.0 - r);
    let c_inv = c_a / norm_aas * series_const * 2.0 * p_series(gamma - gamma1, beta, SERIES_TOL);
    Ok(JaffardReport {
        beta,
        gamma,
        gamma_prime,
        gamma_dprime,
        eps_free: eps,
        c_a,
        norm_aas,
        r_contraction: r,
        c_aas,
        c1,
        p,
        k,
        gamma1_pred: gamma1,
        c_inv_pred: c_inv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseDecayCheck {
    pub violations: usize,
    pub checked: usize,
    /// `max |A⁻¹_{mn}| e^{γ₁|m−n|^β}` on the window; at most `C_inv` when there are no violations.
    pub observed_constant: f64,
    /// Decay fit of `A⁻¹`; `None` when fewer than three anti-diagonals carry mass.
    pub fit: Option<DecayFit>,
}

/// Compares the numerical inverse with the predicted envelope on the interior window.
pub fn verify_inverse_decay(a: &TruncatedMatrix, report: &JaffardReport) -> Result<InverseDecayCheck> {
    let inv = TruncatedMatrix::new(linalg::inverse(a.dense())?, a.margin())?;
    let shape = EnvelopeShape::Jaffard { beta: report.beta, gamma: report.gamma1_pred };
    let (lo, hi) = inv.window();
    let observed_constant = membership_in(&inv, &shape, lo, hi)?.constant();
    let mut violations = 0;
    for m in lo..=hi {
        for n in lo..=hi {
            if inv.get(m, n).norm() > report.c_inv_pred * shape.unit_value(m, n) {
                violations += 1;
            }
        }
    }
    let fit = match fit_decay(&inv, report.beta) {
        Ok(f) => Some(f),
        Err(Error::InsufficientDecayData { .. }) => None,
        Err(err) => return Err(err),
    };
    Ok(InverseDecayCheck { violations, checked: (hi - lo + 1).pow(2), observed_constant, fit })
}

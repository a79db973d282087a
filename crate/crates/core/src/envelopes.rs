//! Off-diagonal decay envelopes and the operator bounds attached to them.
//!
//! An envelope is a positive function of `(m, n)` bounding `|A_{m,n}|` up to a
//! constant. Two-branch envelopes use `c0` for the `n > m` branch and `c1` for
//! the `n ≤ m` branch; the diagonal belongs to the decaying `n ≤ m` branch.
//! Single-constant envelopes carry the same value in both slots.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{apply_matrix, TruncatedMatrix};
use crate::series::{self, SERIES_TOL};
use crate::summation::KahanSum;
use crate::weights::{sup_graded_norm, CoefficientSequence, GradedFamily};

/// Anti-diagonals whose maximum falls below this are ignored by the fit.
pub const FIT_FLOOR: f64 = 1e-300;
/// Growth factor under `N → 2N` that flags a condition as divergent.
pub const DIVERGENCE_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvelopeShape {
    /// `(1+min)^γ / (1+max)^{2γ}`
    PolyStar { gamma: f64 },
    /// `(1+|n−m|)^{−γ}`
    PolyDstar { gamma: f64 },
    /// `(min/max)^γ`
    PolyTstar { gamma: f64 },
    /// `n^{γ0}` for `n > m`, `n^{γ1} m^{−γ1}` for `n ≤ m`
    ColrowPoly { gamma0: f64, gamma1: f64 },
    /// `e^{γ0 n^β}` for `n > m`, `e^{−γ1(m^β−n^β)}` for `n ≤ m`
    ColrowSubexp { beta: f64, gamma0: f64, gamma1: f64 },
    /// `(1+|n−m|)^{−γ1−1−ε}`
    Grdecay { gamma1: f64, eps: f64 },
    /// `n^{−1−ε}` for `n > m`, `n^{γ1} m^{−γ1−1−ε}` for `n ≤ m`
    EqNewdecay { gamma1: f64, eps: f64 },
    /// `e^{−ε n^β}` for `n > m`, `e^{γ1 n^β} e^{−(γ1+ε) m^β}` for `n ≤ m`
    SubexpSplit { beta: f64, gamma1: f64, eps: f64 },
    /// `e^{−γ|m−n|^β}`
    Jaffard { beta: f64, gamma: f64 },
}

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.to_string()))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    check(beta > 0.0 && beta <= 1.0, "β must lie in (0,1]")
}

impl EnvelopeShape {
    pub fn validate(&self) -> Result<()> {
        use EnvelopeShape::*;
        match *self {
            PolyStar { gamma } | PolyDstar { gamma } | PolyTstar { gamma } => check(gamma > 0.0, "γ must be positive"),
            ColrowPoly { gamma0, gamma1 } => {
                check(gamma0 >= 0.0, "γ0 must be nonnegative")?;
                check(gamma1 > 0.0, "γ1 must be positive")
            }
            ColrowSubexp { beta, gamma0, gamma1 } => {
                check_beta(beta)?;
                check(gamma0 >= 0.0, "γ0 must be nonnegative")?;
                check(gamma1 > 0.0, "γ1 must be positive")
            }
            Grdecay { gamma1, eps } | EqNewdecay { gamma1, eps } => {
                check(gamma1 > 0.0, "γ1 must be positive")?;
                check(eps > 0.0, "ε must be positive")
            }
            SubexpSplit { beta, gamma1, eps } => {
                check_beta(beta)?;
                check(gamma1 > 0.0, "γ1 must be positive")?;
                check(eps > 0.0, "ε must be positive")
            }
            Jaffard { beta, gamma } => {
                check_beta(beta)?;
                check(gamma > 0.0, "γ must be positive")
            }
        }
    }

    /// Whether the envelope distinguishes the `n > m` and `n ≤ m` branches.
    pub fn is_split(&self) -> bool {
        matches!(
            self,
            EnvelopeShape::ColrowPoly { .. }
                | EnvelopeShape::ColrowSubexp { .. }
                | EnvelopeShape::EqNewdecay { .. }
                | EnvelopeShape::SubexpSplit { .. }
        )
    }

    /// Envelope value with unit constant.
    pub fn unit_value(&self, m: usize, n: usize) -> f64 {
        use EnvelopeShape::*;
        let (mf, nf) = (m as f64, n as f64);
        let (lo, hi) = if m <= n { (mf, nf) } else { (nf, mf) };
        let dist = (mf - nf).abs();
        match *self {
            PolyStar { gamma } => (1.0 + lo).powf(gamma) / (1.0 + hi).powf(2.0 * gamma),
            PolyDstar { gamma } => (1.0 + dist).powf(-gamma),
            PolyTstar { gamma } => (lo / hi).powf(gamma),
            ColrowPoly { gamma0, gamma1 } => {
                if n > m {
                    nf.powf(gamma0)
                } else {
                    (nf / mf).powf(gamma1)
                }
            }
            ColrowSubexp { beta, gamma0, gamma1 } => {
                if n > m {
                    (gamma0 * nf.powf(beta)).exp()
                } else {
                    (-gamma1 * (mf.powf(beta) - nf.powf(beta))).exp()
                }
            }
            Grdecay { gamma1, eps } => (1.0 + dist).powf(-gamma1 - 1.0 - eps),
            EqNewdecay { gamma1, eps } => {
                if n > m {
                    nf.powf(-1.0 - eps)
                } else {
                    nf.powf(gamma1) * mf.powf(-gamma1 - 1.0 - eps)
                }
            }
            SubexpSplit { beta, gamma1, eps } => {
                if n > m {
                    (-eps * nf.powf(beta)).exp()
                } else {
                    (gamma1 * nf.powf(beta) - (gamma1 + eps) * mf.powf(beta)).exp()
                }
            }
            Jaffard { beta, gamma } => (-gamma * dist.powf(beta)).exp(),
        }
    }

    /// `ln` of [`unit_value`](Self::unit_value), finite where the linear value under- or overflows.
    pub fn log_unit_value(&self, m: usize, n: usize) -> f64 {
        use EnvelopeShape::*;
        let (mf, nf) = (m as f64, n as f64);
        let (lo, hi) = if m <= n { (mf, nf) } else { (nf, mf) };
        let dist = (mf - nf).abs();
        match *self {
            PolyStar { gamma } => gamma * lo.ln_1p() - 2.0 * gamma * hi.ln_1p(),
            PolyDstar { gamma } => -gamma * dist.ln_1p(),
            PolyTstar { gamma } => gamma * (lo / hi).ln(),
            ColrowPoly { gamma0, gamma1 } => {
                if n > m {
                    gamma0 * nf.ln()
                } else {
                    gamma1 * (nf / mf).ln()
                }
            }
            ColrowSubexp { beta, gamma0, gamma1 } => {
                if n > m {
                    gamma0 * nf.powf(beta)
                } else {
                    -gamma1 * (mf.powf(beta) - nf.powf(beta))
                }
            }
            Grdecay { gamma1, eps } => (-gamma1 - 1.0 - eps) * dist.ln_1p(),
            EqNewdecay { gamma1, eps } => {
                if n > m {
                    (-1.0 - eps) * nf.ln()
                } else {
                    gamma1 * nf.ln() + (-gamma1 - 1.0 - eps) * mf.ln()
                }
            }
            SubexpSplit { beta, gamma1, eps } => {
                if n > m {
                    -eps * nf.powf(beta)
                } else {
                    gamma1 * nf.powf(beta) - (gamma1 + eps) * mf.powf(beta)
                }
            }
            Jaffard { beta, gamma } => -gamma * dist.powf(beta),
        }
    }

    /// `|a| / unit_value(m, n)`, in log space when the envelope leaves the normal range.
    fn ratio(&self, a: f64, m: usize, n: usize) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let u = self.unit_value(m, n);
        if u.is_normal() {
            a / u
        } else {
            (a.ln() - self.log_unit_value(m, n)).exp()
        }
    }
}

/// An envelope shape together with its constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    #[serde(flatten)]
    pub shape: EnvelopeShape,
    /// Constant on the `n > m` branch.
    pub c0: f64,
    /// Constant on the `n ≤ m` branch.
    pub c1: f64,
}

impl DecayEnvelope {
    pub fn new(shape: EnvelopeShape, c: f64) -> Self {
        Self { shape, c0: c, c1: c }
    }

    pub fn split(shape: EnvelopeShape, c0: f64, c1: f64) -> Self {
        Self { shape, c0, c1 }
    }

    pub fn jaffard(gamma: f64, beta: f64, c: f64) -> Self {
        Self::new(EnvelopeShape::Jaffard { beta, gamma }, c)
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        check(self.c0 >= 0.0 && self.c1 >= 0.0, "envelope constants must be nonnegative")
    }

    pub fn constant_at(&self, m: usize, n: usize) -> f64 {
        if n > m {
            self.c0
        } else {
            self.c1
        }
    }

    pub fn value(&self, m: usize, n: usize) -> f64 {
        self.constant_at(m, n) * self.shape.unit_value(m, n)
    }
}

/// Bound assigned by `env` at `(m, n)`.
pub fn envelope_value(env: &DecayEnvelope, m: usize, n: usize) -> f64 {
    env.value(m, n)
}

/// Matrix whose entries equal the envelope exactly.
pub fn envelope_matrix(env: &DecayEnvelope, n: usize) -> Result<TruncatedMatrix> {
    env.validate()?;
    TruncatedMatrix::from_fn(n, |i, j| env.value(i, j))
}

/// Random matrix dominated entrywise by `env`: `A_{mn} = u·s·env(m,n)`
/// with `u ~ U[0,1]` and a random sign `s`.
pub fn random_dominated<R: Rng>(env: &DecayEnvelope, n: usize, rng: &mut R) -> Result<TruncatedMatrix> {
    env.validate()?;
    TruncatedMatrix::from_fn(n, |i, j| {
        let u: f64 = rng.gen();
        let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        u * s * env.value(i, j)
    })
}

/// Empirical constants per branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    /// Over entries with `n > m`.
    pub upper: f64,
    /// Over entries with `n ≤ m`.
    pub lower: f64,
}

impl Membership {
    pub fn constant(&self) -> f64 {
        self.upper.max(self.lower)
    }

    /// Whether the declared constants cover the observed ones, with relative slack `rel`.
    pub fn within(&self, env: &DecayEnvelope, rel: f64) -> bool {
        self.upper <= env.c0 * (1.0 + rel) && self.lower <= env.c1 * (1.0 + rel)
    }
}

/// Constants over the index range `lo..=hi` (both axes).
pub fn membership_in(a: &TruncatedMatrix, shape: &EnvelopeShape, lo: usize, hi: usize) -> Result<Membership> {
    if lo > hi || hi > a.n() || lo == 0 {
        return Err(Error::EmptyWindow);
    }
    let mut upper: f64 = 0.0;
    let mut lower: f64 = 0.0;
    for m in lo..=hi {
        for n in lo..=hi {
            let r = shape.ratio(a.get(m, n).norm(), m, n);
            if n > m {
                upper = upper.max(r);
            } else {
                lower = lower.max(r);
            }
        }
    }
    Ok(Membership { upper, lower })
}

/// `max |A_{mn}| / env(m,n)` over the interior window (constants ignored).
pub fn membership_constant(a: &TruncatedMatrix, shape: &EnvelopeShape) -> Result<Membership> {
    shape.validate()?;
    let (lo, hi) = a.window();
    membership_in(a, shape, lo, hi)
}

/// Least-squares fit of `ln max_{|m−n|=d} |A_{mn}| ≈ ln C − γ d^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `+∞` when there is no off-diagonal mass at all.
    #[serde(with = "crate::nonfinite")]
    pub gamma: f64,
    #[serde(with = "crate::nonfinite")]
    pub c: f64,
    pub residual: f64,
    pub usable: usize,
}

impl DecayFit {
    pub fn is_sentinel(&self) -> bool {
        self.gamma == f64::INFINITY
    }
}

/// Ordinary least squares on `(x, y)`; returns `(slope, intercept, max residual)`.
pub(crate) fn line_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: KahanSum = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).collect();
    let sxx: KahanSum = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).collect();
    let slope = sxy.value() / sxx.value();
    let intercept = my - slope * mx;
    let residual = points.iter().map(|p| (p.1 - (intercept + slope * p.0)).abs()).fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Fits the decay class `E_{γ,β}` on the interior window of `a`.
pub fn fit_decay(a: &TruncatedMatrix, beta: f64) -> Result<DecayFit> {
    check_beta(beta)?;
    if a.n() < 16 {
        return Err(Error::InvalidParameter(format!("fit needs N ≥ 16, got {}", a.n())));
    }
    let (lo, hi) = a.window();
    let d_max = hi - lo;
    let mut maxima = vec![0.0f64; d_max + 1];
    for m in lo..=hi {
        for n in lo..=hi {
            let d = m.abs_diff(n);
            maxima[d] = maxima[d].max(a.get(m, n).norm());
        }
    }
    let points: Vec<(f64, f64)> = (1..=d_max)
        .filter(|&d| maxima[d] >= FIT_FLOOR)
        .map(|d| ((d as f64).powf(beta), maxima[d].ln()))
        .collect();
    match points.len() {
        0 => Ok(DecayFit { gamma: f64::INFINITY, c: maxima[0], residual: 0.0, usable: 0 }),
        k if k < 3 => Err(Error::InsufficientDecayData { usable: k }),
        k => {
            let (slope, intercept, residual) = line_fit(&points);
            Ok(DecayFit { gamma: (-slope).max(0.0), c: intercept.exp(), residual, usable: k })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    /// Constant on the full `N` window.
    pub constant: f64,
    /// Constant on the leading `N/2` block.
    pub constant_half: f64,
    pub divergent: bool,
}

/// Membership constants for conditions (*), (**), (***) with doubling flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub gamma: f64,
    pub star: ChainEntry,
    pub dstar: ChainEntry,
    pub tstar: ChainEntry,
}

/// Evaluates the three polynomial conditions at `N` and on the leading `N/2` block.
pub fn check_implication_chain(a: &TruncatedMatrix, gamma: f64) -> Result<ImplicationReport> {
    if a.n() < 32 {
        return Err(Error::InvalidParameter(format!("implication check needs N ≥ 32, got {}", a.n())));
    }
    let half = a.leading(a.n() / 2)?;
    let entry = |shape: EnvelopeShape| -> Result<ChainEntry> {
        let constant = membership_constant(a, &shape)?.constant();
        let constant_half = membership_constant(&half, &shape)?.constant();
        Ok(ChainEntry { constant, constant_half, divergent: constant >= DIVERGENCE_FACTOR * constant_half })
    };
    Ok(ImplicationReport {
        gamma,
        star: entry(EnvelopeShape::PolyStar { gamma })?,
        dstar: entry(EnvelopeShape::PolyDstar { gamma })?,
        tstar: entry(EnvelopeShape::PolyTstar { gamma })?,
    })
}

/// Maximum absolute row sum `K1` and column sum `K2`.
pub fn row_col_sums(a: &TruncatedMatrix) -> (f64, f64) {
    let n = a.n();
    let mut k1: f64 = 0.0;
    let mut k2: f64 = 0.0;
    for i in 1..=n {
        let row: KahanSum = (1..=n).map(|j| a.get(i, j).norm()).collect();
        let col: KahanSum = (1..=n).map(|j| a.get(j, i).norm()).collect();
        k1 = k1.max(row.value());
        k2 = k2.max(col.value());
    }
    (k1, k2)
}

/// Schur test bound `K1^{1/p'} K2^{1/p}` on `‖A‖_{ℓ^p→ℓ^p}`.
pub fn schur_bound(a: &TruncatedMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must satisfy p ≥ 1 or p = ∞, got {p}")));
    }
    let (k1, k2) = row_col_sums(a);
    Ok(if p == 1.0 {
        k2
    } else if p.is_infinite() {
        k1
    } else {
        let p_conj = p / (p - 1.0);
        k1.powf(1.0 / p_conj) * k2.powf(1.0 / p)
    })
}

/// `P_{γ,β} = Σ_{j≥0} e^{−γ j^β}` within `tol`.
pub fn p_series(gamma: f64, beta: f64, tol: f64) -> Result<f64> {
    check(gamma > 0.0, "γ must be positive")?;
    check_beta(beta)?;
    check(tol > 0.0, "tolerance must be positive")?;
    Ok(series::p_series(gamma, beta, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionConstant {
    pub value: f64,
    /// Pair `(m, n)` attaining the maximum.
    pub argmax: (usize, usize),
}

/// `max_{m,n ≤ N} e^{(γ/2)|m−n|^β} Σ_{k ≤ N} e^{−γ|m−k|^β} e^{−γ|k−n|^β}`.
///
/// For a fixed gap `d = n − m` the inner sum is a window sum of
/// `g_d(j) = f(j) f(j−d)` over `j ∈ [1−m, N−m]`, so prefix sums give all
/// `m` at once and the whole search costs `O(N²)`.
pub fn convolution_constant(gamma: f64, beta: f64, n: usize) -> Result<ConvolutionConstant> {
    check(gamma > 0.0, "γ must be positive")?;
    check_beta(beta)?;
    if n < 16 {
        return Err(Error::InvalidParameter(format!("convolution constant needs N ≥ 16, got {n}")));
    }
    let f = |j: i64| (-gamma * (j.unsigned_abs() as f64).powf(beta)).exp();
    let offset = n as i64 - 1; // j = 1−N maps to index 0
    let mut best = ConvolutionConstant { value: 0.0, argmax: (1, 1) };
    let mut prefix = vec![0.0f64; 2 * n];
    for d in 0..n {
        let di = d as i64;
        let mut acc = KahanSum::new();
        for (idx, slot) in prefix.iter_mut().enumerate().skip(1) {
            let j = idx as i64 - 1 - offset;
            acc.add(f(j) * f(j - di));
            *slot = acc.value();
        }
        let gain = (0.5 * gamma * (d as f64).powf(beta)).exp();
        for m in 1..=(n - d) {
            let lo = (1 - m as i64 + offset) as usize; // index of j = 1−m
            let hi = (n as i64 - m as i64 + offset) as usize;
            let value = (prefix[hi + 1] - prefix[lo]) * gain;
            if value > best.value {
                best = ConvolutionConstant { value, argmax: (m, m + d) };
            }
        }
    }
    Ok(best)
}

/// Predicted class data of a product `AB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductPrediction {
    pub c: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// Constant for `AB` with `A ∈ E_{γ_A,β}`, `B ∈ E_{γ_B,β}`.
///
/// Without a target the product lands in `E_{min(γ_A,γ_B),β}` with constant
/// `C_A C_B · 2 P_{|γ_A−γ_B|,β}`; equal rates require a target `γ' < γ`.
pub fn product_envelope(
    c_a: f64,
    gamma_a: f64,
    c_b: f64,
    gamma_b: f64,
    beta: f64,
    target: Option<f64>,
) -> Result<ProductPrediction> {
    check(gamma_a > 0.0 && gamma_b > 0.0, "γ must be positive")?;
    check_beta(beta)?;
    let hi = gamma_a.max(gamma_b);
    let lo_rate = gamma_a.min(gamma_b);
    let lo = match target {
        Some(t) if t >= lo_rate || t <= 0.0 => {
            return Err(Error::InvalidParameter(format!("target rate {t} must lie in (0, {lo_rate})")));
        }
        Some(t) => t,
        None if gamma_a == gamma_b => {
            return Err(Error::InvalidParameter("equal rates need a target γ' < γ".into()));
        }
        None => lo_rate,
    };
    let c = c_a * c_b * 2.0 * series::p_series(hi - lo, beta, SERIES_TOL);
    Ok(ProductPrediction { c, gamma: lo, beta })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub observed: f64,
    pub predicted: f64,
    pub violations: usize,
}

/// Multiplies `a·b` and compares against the prediction on the interior window.
pub fn verify_product(a: &TruncatedMatrix, b: &TruncatedMatrix, pred: &ProductPrediction) -> Result<ProductCheck> {
    let ab = a.matmul(b)?;
    let env = DecayEnvelope::jaffard(pred.gamma, pred.beta, pred.c);
    let observed = membership_constant(&ab, &env.shape)?.constant();
    let (lo, hi) = ab.window();
    let mut violations = 0;
    for m in lo..=hi {
        for n in lo..=hi {
            if ab.get(m, n).norm() > env.value(m, n) {
                violations += 1;
            }
        }
    }
    Ok(ProductCheck { observed, predicted: pred.c, violations })
}

fn check_eps(eps: f64) -> Result<()> {
    check(eps > 0.0 && eps < 1.0, "ε must lie in (0,1)")
}

/// `K` with `‖𝒜c‖_{sup,γ1} ≤ K ‖c‖_{sup,γ0+γ1+1+ε}` under the `colrow_poly` envelope:
/// `K = C1 ζ(γ0+1+ε) + C0 ζ(1+ε)`.
pub fn poly_continuity_bound(gamma0: f64, gamma1: f64, eps: f64, c0: f64, c1: f64) -> Result<f64> {
    EnvelopeShape::ColrowPoly { gamma0, gamma1 }.validate()?;
    check_eps(eps)?;
    let mut k = 0.0;
    if c1 != 0.0 {
        k += c1 * series::zeta(gamma0 + 1.0 + eps);
    }
    if c0 != 0.0 {
        k += c0 * series::zeta(1.0 + eps);
    }
    Ok(k)
}

/// `K` with `‖𝒜c‖^β_{sup,γ1} ≤ K ‖c‖^β_{sup,γ1+γ0+ε}` under the `colrow_subexp` envelope:
/// `K = C1 P'_{γ0+ε,β} + C0 P'_{ε,β}`.
pub fn subexp_continuity_bound(beta: f64, gamma0: f64, gamma1: f64, eps: f64, c0: f64, c1: f64) -> Result<f64> {
    EnvelopeShape::ColrowSubexp { beta, gamma0, gamma1 }.validate()?;
    check_eps(eps)?;
    let mut k = 0.0;
    if c1 != 0.0 {
        k += c1 * series::p_series_from_one(gamma0 + eps, beta, SERIES_TOL);
    }
    if c0 != 0.0 {
        k += c0 * series::p_series_from_one(eps, beta, SERIES_TOL);
    }
    Ok(k)
}

/// Outcome of one continuity inequality `‖𝒜c‖_{target} ≤ K ‖c‖_{source}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl ContinuityCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

pub fn continuity_check(
    a: &TruncatedMatrix,
    c: &CoefficientSequence,
    family: GradedFamily,
    target_level: f64,
    source_level: f64,
    k: f64,
) -> Result<ContinuityCheck> {
    let image = apply_matrix(a, c)?;
    Ok(ContinuityCheck {
        lhs: sup_graded_norm(&image, family, target_level)?,
        rhs: k * sup_graded_norm(c, family, source_level)?,
    })
}

/// Random vector with `|c_n| ≤ 1/w(n)` at the given level.
pub fn random_level_vector<R: Rng>(n: usize, family: GradedFamily, level: f64, rng: &mut R) -> CoefficientSequence {
    let v = (1..=n)
        .map(|i| {
            let u: f64 = rng.gen_range(-1.0..=1.0);
            Complex64::new(u * (-family.log_weight(i, level)).exp(), 0.0)
        })
        .collect();
    CoefficientSequence::new(v).expect("finite entries")
}

/// Exact `ℓ^∞_w → ℓ^∞_w` norm: `max_m w_m Σ_n |A_{mn}| / w_n`.
pub fn weighted_sup_operator_norm(a: &TruncatedMatrix, family: GradedFamily, level: f64) -> f64 {
    let n = a.n();
    (1..=n)
        .map(|m| {
            let lw_m = family.log_weight(m, level);
            let row: KahanSum =
                (1..=n).map(|j| a.get(m, j).norm() * (lw_m - family.log_weight(j, level)).exp()).collect();
            row.value()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedLevelReport {
    /// Largest observed `‖𝒜c‖/‖c‖` over the trials.
    pub max_ratio: f64,
    /// Exact weighted sup-norm of the truncated operator.
    pub operator_norm: f64,
    pub membership: Membership,
}

fn fixed_level(shape: &EnvelopeShape) -> Result<(GradedFamily, f64)> {
    match *shape {
        EnvelopeShape::EqNewdecay { gamma1, .. } | EnvelopeShape::Grdecay { gamma1, .. } => {
            Ok((GradedFamily::Poly, gamma1))
        }
        EnvelopeShape::SubexpSplit { beta, gamma1, .. } => Ok((GradedFamily::Subexp { beta }, gamma1)),
        _ => Err(Error::InvalidParameter("fixed-level continuity needs eq_newdecay, grdecay or subexp_split".into())),
    }
}

/// Empirical norm of `𝒜` on the fixed grading level `γ1` of the envelope.
pub fn verify_fixed_level_continuity<R: Rng>(
    a: &TruncatedMatrix,
    env: &DecayEnvelope,
    trials: usize,
    rng: &mut R,
) -> Result<FixedLevelReport> {
    env.validate()?;
    let (family, level) = fixed_level(&env.shape)?;
    let membership = membership_in(a, &env.shape, 1, a.n())?;
    if !membership.within(env, 1e-12) {
        return Err(Error::EnvelopeViolated {
            observed: membership.constant(),
            declared: env.c0.max(env.c1),
        });
    }
    let mut max_ratio: f64 = 0.0;
    // all-positive extremal vector first, then random ones
    let extremal = CoefficientSequence::new(
        (1..=a.n()).map(|i| Complex64::new((-family.log_weight(i, level)).exp(), 0.0)).collect(),
    )?;
    let mut probe = |c: &CoefficientSequence| -> Result<()> {
        let den = sup_graded_norm(c, family, level)?;
        if den > 0.0 {
            let num = sup_graded_norm(&apply_matrix(a, c)?, family, level)?;
            max_ratio = max_ratio.max(num / den);
        }
        Ok(())
    };
    probe(&extremal)?;
    for _ in 0..trials {
        let c = random_level_vector(a.n(), family, level, rng);
        probe(&c)?;
    }
    Ok(FixedLevelReport { max_ratio, operator_norm: weighted_sup_operator_norm(a, family, level), membership })
}

/// `Σ_{d∈ℤ} (1+|d|)^{−1−ε} = 2ζ(1+ε) − 1`: the `grdecay` transfer constant at unit `C`.
pub fn grdecay_transfer_bound(eps: f64) -> f64 {
    2.0 * series::zeta(1.0 + eps) - 1.0
}

/// Spectral norm of the truncated operator (see [`linalg::spectral_norm`]).
pub fn spectral_norm(a: &TruncatedMatrix) -> f64 {
    linalg::spectral_norm(a.dense())
}

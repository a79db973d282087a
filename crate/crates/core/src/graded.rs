//! Graded norms `‖(a_n w_k(n))‖_{ℓ²}` and finite proxies for Fréchet-space statements.
//!
//! Membership in a graded space cannot be certified from finitely many
//! coefficients. The proxy used throughout is stability of each level under
//! `N → 2N`: a level whose norm on `1..N` exceeds its norm on `1..N/2` by 5% or
//! more is flagged as divergent.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{analysis, canonical_dual, check_localized, frame_operator, FrameSystem};
use crate::hermite::{classify_coefficient_decay, project, DecayClassification, HermiteContext, TestFunction};
use crate::matrix::{apply_matrix, to_vector};
use crate::series::{exp_power_sum, exp_tail_integral, power_tail_bound, SERIES_TOL};
use crate::weights::{sup_graded_norm, CoefficientSequence, GradedFamily};

/// Relative growth under `N → 2N` that flags a level.
pub const DOUBLING_TOL: f64 = 0.05;
/// Above this log-magnitude, `ℓ²` terms are rescaled by the largest one before summing.
const LINEAR_LOG_LIMIT: f64 = 300.0;

fn log_terms(values: &[Complex64], family: GradedFamily, k: f64) -> impl Iterator<Item = f64> + '_ {
    values.iter().enumerate().map(move |(i, z)| z.norm().ln() + family.log_weight(i + 1, k))
}

/// `ℓ²` norm of `(a_n w_k(n))` over `values`, rescaled by the largest term when it leaves the linear range.
fn level_norm(values: &[Complex64], family: GradedFamily, k: f64) -> f64 {
    let top = log_terms(values, family, k).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    let shift = if top.abs() < LINEAR_LOG_LIMIT { 0.0 } else { top };
    let mut acc = 0.0;
    for (i, z) in values.iter().enumerate() {
        let a = z.norm();
        if a == 0.0 {
            continue;
        }
        let t = if shift == 0.0 {
            let w = match family {
                GradedFamily::Poly => ((i + 1) as f64).powf(k),
                GradedFamily::Subexp { .. } => family.log_weight(i + 1, k).exp(),
            };
            a * w
        } else {
            (a.ln() + family.log_weight(i + 1, k) - shift).exp()
        };
        acc += t * t;
    }
    acc.sqrt() * shift.exp()
}

/// Norms at sorted levels; the running maximum removes rounding reversals so the result is nondecreasing.
fn level_norms(values: &[Complex64], family: GradedFamily, levels: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = levels.iter().map(|&k| level_norm(values, family, k)).collect();
    for i in 1..out.len() {
        out[i] = out[i].max(out[i - 1]);
    }
    out
}

/// `‖c‖_{H^k}` for one level.
pub fn graded_norm(c: &CoefficientSequence, family: GradedFamily, k: f64) -> f64 {
    level_norm(c.values(), family, k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedNormProfile {
    pub family: GradedFamily,
    pub levels: Vec<f64>,
    #[serde(with = "crate::nonfinite::vec")]
    pub norms: Vec<f64>,
    /// Norms of the leading `N/2` coefficients.
    #[serde(with = "crate::nonfinite::vec")]
    pub half_norms: Vec<f64>,
    /// Levels whose norm is infinite or grows by 5% or more under `N/2 → N`.
    pub divergent: Vec<bool>,
}

impl GradedNormProfile {
    pub fn all_stable(&self) -> bool {
        !self.divergent.iter().any(|&d| d)
    }
}

/// Default levels `0, 1, …, 10`.
pub fn default_levels() -> Vec<f64> {
    (0..=10).map(f64::from).collect()
}

pub fn graded_profile(c: &CoefficientSequence, family: GradedFamily, levels: &[f64]) -> Result<GradedNormProfile> {
    if levels.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
        return Err(Error::InvalidParameter("levels must be finite and nonnegative".into()));
    }
    if levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("levels must be sorted".into()));
    }
    let norms = level_norms(c.values(), family, levels);
    let half_norms = level_norms(&c.values()[..c.len() / 2], family, levels);
    let divergent = norms
        .iter()
        .zip(&half_norms)
        .map(|(&full, &half)| !full.is_finite() || full > (1.0 + DOUBLING_TOL) * half)
        .collect();
    Ok(GradedNormProfile { family, levels: levels.to_vec(), norms, half_norms, divergent })
}

/// Empirical F-frame constants at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FFrameBounds {
    pub k: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `min` and `max` of `‖analysis(E, f)‖_{H^k} / ‖f‖_{H^k}` over the samples.
pub fn fframe_bounds_estimate(
    e: &FrameSystem,
    samples: &[CoefficientSequence],
    family: GradedFamily,
    k: f64,
) -> Result<FFrameBounds> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for (i, f) in samples.iter().enumerate() {
        let den = graded_norm(f, family, k);
        if den == 0.0 {
            return Err(Error::ZeroNormSample(i));
        }
        let ratio = graded_norm(&analysis(e, f)?, family, k) / den;
        lower = lower.min(ratio);
        upper = upper.max(ratio);
    }
    if !(lower > 0.0 && upper.is_finite()) {
        return Err(Error::InvalidParameter(format!("degenerate F-frame interval [{lower}, {upper}] at level {k}")));
    }
    Ok(FFrameBounds { k, lower, upper })
}

/// Random vectors `u_n e^{−n}` with complex normal `u_n`.
pub fn random_decaying<R: Rng>(n: usize, rng: &mut R) -> CoefficientSequence {
    let v = (1..=n)
        .map(|i| {
            let s = (-(i as f64)).exp();
            Complex64::new(rng.sample::<f64, _>(StandardNormal) * s, rng.sample::<f64, _>(StandardNormal) * s)
        })
        .collect();
    CoefficientSequence::new(v).expect("finite samples")
}

/// `random` decaying vectors plus `h_1..h_8`, `gaussian(1)` and `gaussian(3)`.
pub fn default_fframe_samples<R: Rng>(
    ctx: &HermiteContext,
    n: usize,
    random: usize,
    rng: &mut R,
) -> Result<Vec<CoefficientSequence>> {
    let mut out: Vec<CoefficientSequence> = (0..random).map(|_| random_decaying(n, rng)).collect();
    for k in 1..=8.min(n) {
        out.push(CoefficientSequence::delta(n, k)?);
    }
    out.push(project(ctx, &TestFunction::gaussian(1.0), n)?);
    out.push(project(ctx, &TestFunction::gaussian(3.0), n)?);
    Ok(out)
}

/// `‖f − Σ_{n≤M} ⟨f, d_n⟩ e_n‖_{H^k}` at each checkpoint `M`, with `d` the canonical dual.
pub fn expansion_error_curve(
    f: &CoefficientSequence,
    e: &FrameSystem,
    family: GradedFamily,
    k: f64,
    checkpoints: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let n = e.n();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    if let Some(&m) = checkpoints.iter().find(|&&m| m > n) {
        return Err(Error::IndexOutOfRange { index: m, max: n });
    }
    let d = canonical_dual(e)?;
    let alpha = analysis(&d, f)?;
    let rows = e.coeffs().dense();
    let mut order: Vec<usize> = checkpoints.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut partial = vec![Complex64::new(0.0, 0.0); n];
    let mut done = 0;
    let mut errors = std::collections::BTreeMap::new();
    for m in order {
        for row in done..m {
            let a = alpha.values()[row];
            for (col, p) in partial.iter_mut().enumerate() {
                *p += a * rows[(row, col)];
            }
        }
        done = m;
        let resid: Vec<Complex64> = f.values().iter().zip(&partial).map(|(x, p)| x - p).collect();
        errors.insert(m, graded_norm(&CoefficientSequence::new(resid)?, family, k));
    }
    Ok(checkpoints.iter().map(|m| (*m, errors[m])).collect())
}

/// Totals and intermediate sizes of `Σ ⟨f, e_n⟩ e_n` summed in random orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationReport {
    pub permutations: usize,
    /// Largest `‖total_π − S f‖` over the permutations.
    pub max_total_deviation: f64,
    /// Largest norm of an intermediate partial sum.
    pub max_partial_norm: f64,
}

pub fn permutation_stability<R: Rng>(
    e: &FrameSystem,
    f: &CoefficientSequence,
    permutations: usize,
    rng: &mut R,
) -> Result<PermutationReport> {
    let n = e.n();
    let coeffs = analysis(e, f)?;
    let reference = to_vector(&apply_matrix(&frame_operator(e), f)?);
    let rows = e.coeffs().dense();
    let mut order: Vec<usize> = (0..n).collect();
    let mut report = PermutationReport { permutations, max_total_deviation: 0.0, max_partial_norm: 0.0 };
    for _ in 0..permutations {
        order.shuffle(rng);
        let mut partial = nalgebra::DVector::<Complex64>::zeros(n);
        for &m in &order {
            let a = coeffs.values()[m];
            for col in 0..n {
                partial[col] += a * rows[(m, col)];
            }
            report.max_partial_norm = report.max_partial_norm.max(partial.norm());
        }
        report.max_total_deviation = report.max_total_deviation.max((&partial - &reference).norm());
    }
    Ok(report)
}

/// Coefficients `b_n = F(h_n)` of a distribution with a declared growth bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCoefficients {
    pub b: CoefficientSequence,
    /// `|b_n| ≤ C n^q` (poly) or `|b_n| ≤ C e^{q n^β}` (subexp).
    pub q: f64,
    pub c: f64,
    pub family: GradedFamily,
}

impl DistributionCoefficients {
    pub fn new(b: CoefficientSequence, q: f64, c: f64, family: GradedFamily) -> Result<Self> {
        if !(q >= 0.0 && c > 0.0 && q.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParameter("growth order must be ≥ 0 and constant > 0".into()));
        }
        for (i, z) in b.values().iter().enumerate() {
            let bound = c.ln() + family.log_weight(i + 1, q);
            if z.norm() > 0.0 && z.norm().ln() > bound + 1e-12 {
                return Err(Error::GrowthViolated(i + 1));
            }
        }
        Ok(Self { b, q, c, family })
    }

    /// `b_n = n^q`.
    pub fn power(n: usize, q: f64) -> Result<Self> {
        Self::new(CoefficientSequence::from_fn(n, |i| (i as f64).powf(q))?, q, 1.0, GradedFamily::Poly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pairing {
    pub value: Complex64,
    /// Bound on `|Σ_{n>N} ⟨f, h_n⟩ b_n|` extrapolated from the decay class of `f`.
    pub tail_bound: f64,
    /// Decay level of `f` used for the majorant.
    pub level: f64,
}

/// Sub-exponential majorant level, kept below the fitted rate.
const SUBEXP_LEVEL_FRACTION: f64 = 0.9;

/// `F(f) = Σ_n ⟨f, h_n⟩ b_n` over the stored range with a tail bound.
///
/// The tail uses `|⟨f, h_n⟩| ≤ M w_s(n)^{−1}` with `M = ‖f‖_{sup,s}` at the
/// level `s` found by [`classify_coefficient_decay`], and the declared growth of `b`.
pub fn pair_distribution(
    b: &DistributionCoefficients,
    f: &CoefficientSequence,
    family: GradedFamily,
) -> Result<Pairing> {
    if b.family != family {
        return Err(Error::InvalidParameter("distribution growth family differs from the pairing family".into()));
    }
    let n = f.len().min(b.b.len());
    let value: Complex64 = f.values()[..n].iter().zip(&b.b.values()[..n]).map(|(x, y)| x * y).sum();
    let (level, tail_bound) = match family {
        GradedFamily::Poly => {
            let class = classify_coefficient_decay(f, &[])?;
            let s = class.poly_k.ok_or_else(|| Error::NonSummable("coefficients of f do not decay".into()))? as f64;
            if s - b.q <= 1.0 {
                return Err(Error::NonSummable(format!("decay order {s} of f does not dominate growth {} + 1", b.q)));
            }
            let m = sup_graded_norm(f, family, s)?;
            (s, b.c * m * power_tail_bound(s - b.q, n as f64))
        }
        GradedFamily::Subexp { beta } => {
            let class = classify_coefficient_decay(f, &[beta])?;
            let fit = class.subexp[0].gamma;
            if fit == f64::INFINITY {
                return Ok(Pairing { value, tail_bound: 0.0, level: f64::INFINITY });
            }
            let s = SUBEXP_LEVEL_FRACTION * fit;
            if s <= b.q {
                return Err(Error::NonSummable(format!("decay rate {fit} of f does not dominate growth {}", b.q)));
            }
            let m = sup_graded_norm(f, family, s)?;
            let mut tail = exp_tail_integral(s - b.q, beta, n as f64);
            if !tail.is_finite() {
                tail = exp_power_sum(s - b.q, beta, n as u64 + 1, SERIES_TOL) + SERIES_TOL;
            }
            (s, b.c * m * tail)
        }
    };
    Ok(Pairing { value, tail_bound, level })
}

/// Decay class of one input and of its analysis coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgTrial {
    pub input: DecayClassification,
    pub output: DecayClassification,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgReport {
    pub trials: Vec<PgTrial>,
}

impl PgReport {
    pub fn all_agree(&self) -> bool {
        self.trials.iter().all(|t| t.agree)
    }
}

/// Relative tolerance for matching sub-exponential rates.
pub const RATE_MATCH_TOL: f64 = 0.10;

fn classes_agree(family: GradedFamily, a: &DecayClassification, b: &DecayClassification) -> bool {
    match family {
        GradedFamily::Poly => match (a.poly_k, b.poly_k) {
            (Some(x), Some(y)) => x.abs_diff(y) <= 1,
            (x, y) => x == y,
        },
        GradedFamily::Subexp { .. } => {
            let (x, y) = (a.subexp[0].gamma, b.subexp[0].gamma);
            if x.is_infinite() || y.is_infinite() {
                x == y
            } else {
                (x - y).abs() <= RATE_MATCH_TOL * x.abs()
            }
        }
    }
}

/// Compares the decay class of `f` and of `(⟨f, e_n⟩)` for random `f` of a prescribed class.
///
/// Poly inputs have `|f_n| ∈ [½, 1]·n^{−q}` with `q` cycling through 2, 3, 4;
/// sub-exponential inputs have `|f_n| ∈ [½, 1]·e^{−n^β}`.
pub fn property_pg_check<R: Rng>(e: &FrameSystem, family: GradedFamily, trials: usize, rng: &mut R) -> Result<PgReport> {
    let beta = match family {
        GradedFamily::Poly => 1.0,
        GradedFamily::Subexp { beta } => beta,
    };
    check_localized(e, beta)?;
    let n = e.n();
    let betas = [beta];
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let q = [2.0, 3.0, 4.0][t % 3];
        let v = (1..=n)
            .map(|i| {
                let mag = rng.gen_range(0.5..=1.0)
                    * match family {
                        GradedFamily::Poly => (i as f64).powf(-q),
                        GradedFamily::Subexp { beta } => (-(i as f64).powf(beta)).exp(),
                    };
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(mag, phase)
            })
            .collect();
        let f = CoefficientSequence::new(v)?;
        let input = classify_coefficient_decay(&f, &betas)?;
        let output = classify_coefficient_decay(&analysis(e, &f)?, &betas)?;
        let agree = classes_agree(family, &input, &output);
        out.push(PgTrial { input, output, agree });
    }
    Ok(PgReport { trials: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::frames::{build_perturbed_basis, PerturbationSpec};
    use crate::rng::stream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn half_shift(n: usize) -> FrameSystem {
        build_perturbed_basis(&PerturbationSpec::constant(0.5, vec![0.5]), n).unwrap().frame
    }

    #[test]
    fn profile_examples() {
        let p = graded_profile(&CoefficientSequence::delta(16, 1).unwrap(), GradedFamily::Poly, &[0.0, 1.0, 2.0, 3.0])
            .unwrap();
        assert_eq!(p.norms, vec![1.0; 4]);
        let p = graded_profile(&CoefficientSequence::delta(16, 2).unwrap(), GradedFamily::Poly, &[0.0, 1.0, 2.0])
            .unwrap();
        assert_eq!(p.norms, vec![1.0, 2.0, 4.0]);
        assert!(p.all_stable());

        // level 1 makes every term 1, so the norm grows like √N
        let e = CoefficientSequence::from_fn(64, |n| (-(n as f64)).exp()).unwrap();
        let p = graded_profile(&e, GradedFamily::Subexp { beta: 1.0 }, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(p.divergent, vec![false, true, true]);
        assert_relative_eq!(p.norms[1], 8.0, max_relative = 1e-12);
        assert!(graded_profile(&e, GradedFamily::Poly, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn profile_survives_huge_weights() {
        let e = CoefficientSequence::from_fn(600, |n| (-(n as f64)).exp()).unwrap();
        let p = graded_profile(&e, GradedFamily::Subexp { beta: 1.0 }, &[0.5, 1.5, 2.5]).unwrap();
        assert_relative_eq!(p.norms[0], (1.0 / (1f64.exp() - 1.0)).sqrt(), max_relative = 1e-9);
        assert_relative_eq!(p.norms[1].ln(), 0.5 * 600.0 + 0.5 * (1.0 / (1.0 - (-1.0f64).exp())).ln(), epsilon = 1e-9);
        // e^{1.5·600} is beyond f64
        assert_eq!(p.norms[2], f64::INFINITY);
        assert_eq!(p.divergent, vec![false, true, true]);
        let json = serde_json::to_string(&p).unwrap();
        let back: GradedNormProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn onb_fframe_is_exact() {
        let ctx = HermiteContext::new(64).unwrap();
        let mut rng = stream(1, "fframe");
        let samples = default_fframe_samples(&ctx, 64, 20, &mut rng).unwrap();
        for k in 0..4 {
            let b = fframe_bounds_estimate(&FrameSystem::onb(64), &samples, GradedFamily::Poly, k as f64).unwrap();
            assert_eq!((b.lower, b.upper), (1.0, 1.0));
        }
        let zero = [CoefficientSequence::zeros(64)];
        assert!(matches!(
            fframe_bounds_estimate(&FrameSystem::onb(64), &zero, GradedFamily::Poly, 0.0),
            Err(Error::ZeroNormSample(0))
        ));
    }

    #[test]
    fn half_shift_fframe_level_zero() {
        let ctx = HermiteContext::new(128).unwrap();
        let mut rng = stream(2, "fframe");
        let samples = default_fframe_samples(&ctx, 128, 200, &mut rng).unwrap();
        let b = fframe_bounds_estimate(&half_shift(128), &samples, GradedFamily::Poly, 0.0).unwrap();
        assert!(b.lower >= 0.5 && b.upper <= 1.5, "{b:?}");
    }

    #[test]
    fn expansion_examples() {
        let e = half_shift(64);
        // e_3 itself is a finite expansion
        let e3 = CoefficientSequence::new(e.coeffs().dense().row(2).iter().copied().collect()).unwrap();
        let curve = expansion_error_curve(&e3, &e, GradedFamily::Poly, 2.0, &[3, 4, 10, 64]).unwrap();
        assert!(curve.iter().all(|(_, err)| *err < 1e-12), "{curve:?}");
        // h_3 = Σ_{n≥3} (−½)^{n−3} e_n; the residual after M is (−½)^{M−2} h_{M+1}
        let h3 = CoefficientSequence::delta(64, 3).unwrap();
        let curve = expansion_error_curve(&h3, &e, GradedFamily::Poly, 2.0, &[4, 10, 63, 64]).unwrap();
        for &(m, err) in &curve[..3] {
            assert_relative_eq!(err, 0.5f64.powi(m as i32 - 2) * ((m + 1) as f64).powi(2), max_relative = 1e-12);
        }
        assert!(curve[3].1 < 1e-12);
        let zero = CoefficientSequence::zeros(64);
        let curve = expansion_error_curve(&zero, &e, GradedFamily::Poly, 1.0, &[1, 32, 64]).unwrap();
        assert!(curve.iter().all(|(_, err)| *err == 0.0));
        assert!(expansion_error_curve(&zero, &e, GradedFamily::Poly, 1.0, &[65]).is_err());
    }

    #[test]
    fn pairing_examples() {
        let ctx = HermiteContext::new(64).unwrap();
        let g1 = project(&ctx, &TestFunction::gaussian(1.0), 64).unwrap();
        let delta = DistributionCoefficients::new(CoefficientSequence::delta(64, 1).unwrap(), 0.0, 1.0, GradedFamily::Poly)
            .unwrap();
        let p = pair_distribution(&delta, &g1, GradedFamily::Poly).unwrap();
        assert_relative_eq!(p.value.re, 1.331335363800390, epsilon = 1e-10);

        let b = DistributionCoefficients::power(64, 2.0).unwrap();
        let p = pair_distribution(&b, &CoefficientSequence::delta(64, 5).unwrap(), GradedFamily::Poly).unwrap();
        assert_eq!(p.value, Complex64::new(25.0, 0.0));

        let over = CoefficientSequence::from_fn(8, |n| (n as f64).powi(3)).unwrap();
        assert!(matches!(
            DistributionCoefficients::new(over, 2.0, 1.0, GradedFamily::Poly),
            Err(Error::GrowthViolated(2))
        ));
        let slow = CoefficientSequence::from_fn(64, |n| (n as f64).powi(-2)).unwrap();
        assert!(matches!(pair_distribution(&b, &slow, GradedFamily::Poly), Err(Error::NonSummable(_))));
    }

    #[test]
    fn pairing_truncations_agree_within_tail() {
        let ctx = HermiteContext::new(512).unwrap();
        let g = project(&ctx, &TestFunction::gaussian(3.0), 512).unwrap();
        let b = DistributionCoefficients::power(512, 1.0).unwrap();
        let short = pair_distribution(&b, &g.truncate(256), GradedFamily::Poly).unwrap();
        let long = pair_distribution(&b, &g, GradedFamily::Poly).unwrap();
        assert!((short.value - long.value).norm() <= short.tail_bound);
    }

    #[test]
    fn permutations_reach_same_total() {
        let e = half_shift(64);
        let mut rng = stream(8, "perm");
        let f = random_decaying(64, &mut rng);
        let r = permutation_stability(&e, &f, 50, &mut rng).unwrap();
        assert!(r.max_total_deviation < 1e-10, "{r:?}");
        assert!(r.max_partial_norm.is_finite());
    }

    #[test]
    fn pg_property() {
        let mut rng = stream(9, "pg");
        let onb = property_pg_check(&FrameSystem::onb(64), GradedFamily::Poly, 6, &mut rng).unwrap();
        assert!(onb.trials.iter().all(|t| t.input == t.output));
        let e = half_shift(128);
        let r = property_pg_check(&e, GradedFamily::Subexp { beta: 1.0 }, 6, &mut rng).unwrap();
        assert!(r.all_agree(), "{r:?}");
        for t in &r.trials {
            assert!((t.output.subexp[0].gamma - 1.0).abs() <= 0.1);
        }
        let r = property_pg_check(&e, GradedFamily::Poly, 6, &mut rng).unwrap();
        assert!(r.all_agree(), "{r:?}");
        // 1/n² class: stable through order 1 on both sides
        assert_eq!(r.trials[0].input.poly_k, Some(1));
        assert_eq!(r.trials[0].output.poly_k, Some(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn profile_is_monotone(seed in any::<u64>(), beta in 0.2f64..1.0, subexp in any::<bool>()) {
            let mut rng = stream(seed, "mono");
            let c = random_decaying(96, &mut rng);
            let family = if subexp { GradedFamily::Subexp { beta } } else { GradedFamily::Poly };
            let levels: Vec<f64> = (0..=12).map(|k| k as f64 * 0.75).collect();
            let p = graded_profile(&c, family, &levels).unwrap();
            for w in p.norms.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }

        #[test]
        fn finite_rank_expansion_is_exact(seed in any::<u64>(), a in -0.6f64..0.6, k in 0.0f64..3.0) {
            let e = build_perturbed_basis(&PerturbationSpec::constant(a, vec![a.abs()]), 48).unwrap().frame;
            let mut rng = stream(seed, "exact");
            let f = random_decaying(48, &mut rng);
            let curve = expansion_error_curve(&f, &e, GradedFamily::Poly, k, &[48]).unwrap();
            prop_assert!(curve[0].1 < 1e-8);
        }

        #[test]
        fn pairing_is_bilinear(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
            let mut rng = stream(seed, "bilinear");
            let f = random_decaying(40, &mut rng);
            let g = random_decaying(40, &mut rng);
            let b1 = CoefficientSequence::from_fn(40, |n| rng.gen_range(-1.0..1.0) * n as f64).unwrap();
            let b2 = CoefficientSequence::from_fn(40, |n| rng.gen_range(-1.0..1.0) * n as f64).unwrap();
            let db = |b: &CoefficientSequence| DistributionCoefficients::new(b.clone(), 1.0, 1.0, GradedFamily::Poly).unwrap();
            let val = |b: &CoefficientSequence, x: &CoefficientSequence| pair_distribution(&db(b), x, GradedFamily::Poly).unwrap().value;
            let (sc, tc) = (Complex64::new(s, 0.0), Complex64::new(t, 0.0));
            let comb = f.scale(sc).add(&g.scale(tc)).unwrap();
            let lhs = val(&b1, &comb);
            let rhs = sc * val(&b1, &f) + tc * val(&b1, &g);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
            let half = b1.scale(Complex64::new(0.5, 0.0)).add(&b2.scale(Complex64::new(0.5, 0.0))).unwrap();
            let lhs = val(&half, &f);
            let rhs = 0.5 * val(&b1, &f) + 0.5 * val(&b2, &f);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}

//! Truncated frame systems in Hermite coordinates.
//!
//! A system is stored through its coefficient matrix `E_{mn} = ⟨e_m, h_n⟩`, so
//! row `m` holds the Hermite coefficients of `e_m`. In these coordinates
//!
//! - analysis `f ↦ (⟨f, e_m⟩)_m` is `Ē f`,
//! - synthesis `c ↦ Σ c_m e_m` is `Eᵀ c`,
//! - the frame operator is `S = Eᵀ Ē`,
//! - the canonical dual has rows `S⁻¹ e_m`, which is `E^{−H}` for square invertible `E`.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::envelopes::{fit_decay, DecayFit};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_TOL};
use crate::matrix::{from_vector, to_vector, TruncatedMatrix};
use crate::weights::{weighted_norm, CoefficientSequence, Weight, WeightKind};

/// A finite system `e_1..e_N` expressed in the Hermite basis.
#[derive(Debug, Clone)]
pub struct FrameSystem {
    coeffs: TruncatedMatrix,
    label: String,
    singular_values: OnceLock<Vec<f64>>,
    dual: OnceLock<std::result::Result<TruncatedMatrix, f64>>,
}

impl PartialEq for FrameSystem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.label == other.label
    }
}

impl FrameSystem {
    pub fn new(coeffs: TruncatedMatrix, label: impl Into<String>) -> Self {
        Self { coeffs, label: label.into(), singular_values: OnceLock::new(), dual: OnceLock::new() }
    }

    /// The Hermite basis itself.
    pub fn onb(n: usize) -> Self {
        Self::new(TruncatedMatrix::identity(n), "onb")
    }

    pub fn coeffs(&self) -> &TruncatedMatrix {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.coeffs.n()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `λ E`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        Self::new(self.coeffs.scale(lambda), self.label.clone())
    }

    /// Singular values of `E`, descending.
    pub fn singular_values(&self) -> &[f64] {
        self.singular_values.get_or_init(|| linalg::singular_values(self.coeffs.dense()))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            Err(Error::DimensionMismatch { expected: self.n(), got: len })
        } else {
            Ok(())
        }
    }
}

/// `⟨e_m, f_n⟩ = (E F^H)_{mn}`.
pub fn cross_gram(e: &FrameSystem, f: &FrameSystem) -> Result<TruncatedMatrix> {
    e.check_len(f.n())?;
    TruncatedMatrix::new(e.coeffs.dense() * f.coeffs.dense().adjoint(), e.coeffs.margin())
}

/// `(⟨f, e_m⟩)_m`.
pub fn analysis(e: &FrameSystem, f: &CoefficientSequence) -> Result<CoefficientSequence> {
    e.check_len(f.len())?;
    Ok(from_vector(e.coeffs.dense().conjugate() * to_vector(f)))
}

/// Coefficients of `Σ_m c_m e_m`.
pub fn synthesis(e: &FrameSystem, c: &CoefficientSequence) -> Result<CoefficientSequence> {
    e.check_len(c.len())?;
    Ok(from_vector(e.coeffs.dense().transpose() * to_vector(c)))
}

/// `(σ_min², σ_max²)` of the coefficient matrix.
pub fn frame_bounds(e: &FrameSystem) -> (f64, f64) {
    let s = e.singular_values();
    (s[s.len() - 1].powi(2), s[0].powi(2))
}

/// `S = Eᵀ Ē`, so that `S f = Σ_m ⟨f, e_m⟩ e_m`.
pub fn frame_operator(e: &FrameSystem) -> TruncatedMatrix {
    let d = e.coeffs.dense();
    TruncatedMatrix::new(d.transpose() * d.conjugate(), e.coeffs.margin()).expect("square product of a valid matrix")
}

/// The canonical dual `(S⁻¹ e_m)_m`.
pub fn canonical_dual(e: &FrameSystem) -> Result<FrameSystem> {
    let dual = e.dual.get_or_init(|| {
        // E^{−H} via LU keeps exponentially small entries accurate
        match linalg::inverse(e.coeffs.dense()) {
            Ok(inv) => Ok(TruncatedMatrix::new(inv.adjoint(), e.coeffs.margin()).expect("inverse is finite")),
            Err(Error::Singular { sigma_min }) => Err(sigma_min),
            Err(_) => Err(0.0),
        }
    });
    match dual {
        Ok(d) => Ok(FrameSystem::new(d.clone(), format!("{}-dual", e.label))),
        Err(sigma_min) => Err(Error::Singular { sigma_min: *sigma_min }),
    }
}

/// Decay fits of the primal and dual cross-Gram matrices against the Hermite basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualLocalization {
    /// `+∞` for banded or diagonal primal systems.
    #[serde(with = "crate::nonfinite")]
    pub gamma_primal: f64,
    pub primal: Option<DecayFit>,
    pub dual: DecayFit,
}

pub fn dual_localization_check(e: &FrameSystem, beta: f64) -> Result<DualLocalization> {
    let onb = FrameSystem::onb(e.n());
    let primal = match fit_decay(&cross_gram(e, &onb)?, beta) {
        Ok(fit) => Some(fit),
        Err(Error::InsufficientDecayData { .. }) => None,
        Err(err) => return Err(err),
    };
    let gamma_primal = primal.map_or(f64::INFINITY, |f| f.gamma);
    let d = canonical_dual(e)?;
    let dual = fit_decay(&cross_gram(&d, &onb)?, beta)?;
    Ok(DualLocalization { gamma_primal, primal, dual })
}

/// Perturbation sequences `a^i`, either listed or constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerturbationCoefficients {
    Sequences(#[serde(with = "crate::cvalue::nested")] Vec<Vec<Complex64>>),
    Constant {
        #[serde(with = "crate::cvalue::scalar")]
        constant: Complex64,
    },
}

/// Data of `e_n = h_n + Σ_{i=1}^r a_n^i h_{n+i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub r: usize,
    pub eps: Vec<f64>,
    pub a: PerturbationCoefficients,
}

impl PerturbationSpec {
    /// `r = eps.len()` with `a^i ≡ value` for every `i`.
    pub fn constant(value: f64, eps: Vec<f64>) -> Self {
        Self { r: eps.len(), eps, a: PerturbationCoefficients::Constant { constant: Complex64::new(value, 0.0) } }
    }

    /// `a_n^i` for `1 ≤ i ≤ r`, `n ≥ 1`; listed sequences are zero past their end.
    pub fn coefficient(&self, i: usize, n: usize) -> Complex64 {
        match &self.a {
            PerturbationCoefficients::Constant { constant } => *constant,
            PerturbationCoefficients::Sequences(seqs) => {
                seqs.get(i - 1).and_then(|s| s.get(n - 1)).copied().unwrap_or(Complex64::new(0.0, 0.0))
            }
        }
    }

    /// Indices `n` carrying stored data for sequence `i` (all `n` for a constant).
    fn stored_len(&self, i: usize) -> Option<usize> {
        match &self.a {
            PerturbationCoefficients::Constant { .. } => None,
            PerturbationCoefficients::Sequences(seqs) => Some(seqs[i - 1].len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidParameter("r must be positive".into()));
        }
        if self.eps.len() != self.r {
            return Err(Error::DimensionMismatch { expected: self.r, got: self.eps.len() });
        }
        if let PerturbationCoefficients::Sequences(seqs) = &self.a {
            if seqs.len() != self.r {
                return Err(Error::DimensionMismatch { expected: self.r, got: seqs.len() });
            }
        }
        if self.eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::InvalidParameter("eps entries must be finite and nonnegative".into()));
        }
        for i in 1..=self.r {
            let exceeds = match self.stored_len(i) {
                None => self.coefficient(i, 2).norm() > self.eps[i - 1],
                Some(len) => (2..=len).any(|n| self.coefficient(i, n).norm() > self.eps[i - 1]),
            };
            if exceeds {
                return Err(Error::InvalidPerturbation("entry exceeds eps"));
            }
        }
        let first: f64 = (1..=self.r).map(|i| self.coefficient(i, 1).norm()).sum();
        if first > 1.0 {
            return Err(Error::InvalidPerturbation("first-row sum > 1"));
        }
        if self.eps.iter().sum::<f64>() >= 1.0 {
            return Err(Error::InvalidPerturbation("eps sum ≥ 1"));
        }
        Ok(())
    }

    /// `(3 + Σ ε_i)/4`.
    pub fn contraction_constant(&self) -> f64 {
        (3.0 + self.eps.iter().sum::<f64>()) / 4.0
    }
}

#[derive(Debug, Clone)]
pub struct PerturbedBasis {
    pub frame: FrameSystem,
    /// Nonzero terms `a_n^i h_{n+i}` with `n + i > N`.
    pub dropped: usize,
}

/// `E = Id + Σ_i a^i` placed on the `i`-th superdiagonal.
pub fn build_perturbed_basis(spec: &PerturbationSpec, n: usize) -> Result<PerturbedBasis> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let mut m = DMatrix::<Complex64>::identity(n, n);
    let mut dropped = 0;
    for i in 1..=spec.r {
        for row in 1..=n {
            let a = spec.coefficient(i, row);
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            if row + i > n {
                dropped += 1;
            } else {
                m[(row - 1, row + i - 1)] += a;
            }
        }
    }
    let frame = FrameSystem::new(TruncatedMatrix::from_dense(m)?, "perturbed");
    Ok(PerturbedBasis { frame, dropped })
}

/// Unit vector with independent standard normal real and imaginary parts.
pub fn random_unit<R: Rng>(n: usize, rng: &mut R) -> CoefficientSequence {
    let v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let c = CoefficientSequence::new(v).expect("finite samples");
    let norm = c.l2_norm();
    c.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Extremes of the three bounds used to show `U` is bijective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleReport {
    /// `(3 + Σ ε_i)/4`.
    pub c: f64,
    /// `max ‖Uf − f‖ / (c (‖Uf‖ + ‖f‖))`, at most 1.
    pub contraction_max: f64,
    /// `max ‖Uf‖ / ‖f‖`, at most 3.
    pub growth_max: f64,
    /// `min ‖Uf‖ / |⟨f, h_1⟩|`, at least 1.
    pub first_coefficient_min: f64,
    pub trials: usize,
}

impl ExampleReport {
    pub fn holds(&self) -> bool {
        self.contraction_max <= 1.0 && self.growth_max <= 3.0 && self.first_coefficient_min >= 1.0 - 1e-12
    }
}

/// Probes `Uf = Σ ⟨f, h_n⟩ e_n` on `h_1` and on `trials` random unit vectors.
pub fn verify_example_inequalities<R: Rng>(
    spec: &PerturbationSpec,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<ExampleReport> {
    let basis = build_perturbed_basis(spec, n)?;
    let c = spec.contraction_constant();
    let mut report = ExampleReport {
        c,
        contraction_max: 0.0,
        growth_max: 0.0,
        first_coefficient_min: f64::INFINITY,
        trials: trials + 1,
    };
    let mut probe = |f: &CoefficientSequence| -> Result<()> {
        let uf = synthesis(&basis.frame, f)?;
        let (nu, nf) = (uf.l2_norm(), f.l2_norm());
        let diff = uf.add(&f.scale(Complex64::new(-1.0, 0.0)))?.l2_norm();
        report.contraction_max = report.contraction_max.max(diff / (c * (nu + nf)));
        report.growth_max = report.growth_max.max(nu / nf);
        let f1 = f.get(1).norm();
        if f1 > 0.0 {
            report.first_coefficient_min = report.first_coefficient_min.min(nu / f1);
        }
        Ok(())
    };
    probe(&CoefficientSequence::delta(n, 1)?)?;
    for _ in 0..trials {
        probe(&random_unit(n, rng))?;
    }
    Ok(report)
}

/// Empirical operator ratios on `ℓ^p_μ` over random inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNorms {
    pub analysis_max: f64,
    pub synthesis_max: f64,
    pub frame_operator_max: f64,
    /// Lower ratio of `S`, positive when `S` is invertible.
    pub frame_operator_min: f64,
}

/// Rejects systems whose cross-Gram matrix with the Hermite basis shows no
/// off-diagonal decay; banded systems pass.
pub fn check_localized(e: &FrameSystem, beta: f64) -> Result<()> {
    match fit_decay(&cross_gram(e, &FrameSystem::onb(e.n()))?, beta) {
        Ok(fit) if fit.gamma <= 0.0 => {
            Err(Error::InvalidParameter("cross-Gram matrix shows no off-diagonal decay".into()))
        }
        Ok(_) | Err(Error::InsufficientDecayData { .. }) => Ok(()),
        Err(err) => Err(err),
    }
}

/// Random vector normalised by the weight so that every index contributes.
fn random_weighted<R: Rng>(n: usize, w: &Weight, rng: &mut R) -> CoefficientSequence {
    let v = (1..=n)
        .map(|i| {
            let s = (-w.log_eval(i as f64)).exp();
            Complex64::new(rng.sample::<f64, _>(StandardNormal) * s, rng.sample::<f64, _>(StandardNormal) * s)
        })
        .collect();
    CoefficientSequence::new(v).expect("finite samples")
}

/// Ratios `‖U_E f‖_{p,μ}/‖f‖_{p,μ}`, likewise for `T_E` and `S_E`, over `trials` inputs.
///
/// `beta` is the localization class of `E`; sub-exponential weights must grow
/// with a strictly smaller exponent.
pub fn weighted_operator_norms<R: Rng>(
    e: &FrameSystem,
    w: &Weight,
    p: f64,
    beta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<WeightedNorms> {
    w.validate()?;
    if w.kind != WeightKind::Moderate && w.growth_beta() >= beta {
        return Err(Error::IncompatibleWeight(format!(
            "weight growth order {} must be below the localization order {beta}",
            w.growth_beta()
        )));
    }
    check_localized(e, beta)?;
    let s = frame_operator(e);
    let mut out = WeightedNorms {
        analysis_max: 0.0,
        synthesis_max: 0.0,
        frame_operator_max: 0.0,
        frame_operator_min: f64::INFINITY,
    };
    for _ in 0..trials {
        let f = random_weighted(e.n(), w, rng);
        let nf = weighted_norm(&f, w, p)?;
        out.analysis_max = out.analysis_max.max(weighted_norm(&analysis(e, &f)?, w, p)? / nf);
        out.synthesis_max = out.synthesis_max.max(weighted_norm(&synthesis(e, &f)?, w, p)? / nf);
        let sf = weighted_norm(&crate::matrix::apply_matrix(&s, &f)?, w, p)? / nf;
        out.frame_operator_max = out.frame_operator_max.max(sf);
        out.frame_operator_min = out.frame_operator_min.min(sf);
    }
    Ok(out)
}

/// Smallest singular value of `E` must exceed the rank tolerance.
pub fn is_riesz(e: &FrameSystem) -> bool {
    e.singular_values().last().is_some_and(|&s| s > RANK_TOL)
}

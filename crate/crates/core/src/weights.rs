//! Weight functions and weighted sequence norms.
//!
//! Exponential-type weights are handled in log space throughout, so
//! `e^{k n^β}` never has to be materialised for large `n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::KahanSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `(1+|x|)^k`
    Moderate,
    /// `e^{γ|x|^β}`, `β ∈ (0,1)`
    Subexponential,
    /// `e^{γ|x|}`
    Exponential,
}

/// A positive weight on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub kind: WeightKind,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    /// Declared admissibility constant.
    #[serde(default = "one")]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

impl Weight {
    pub fn moderate(k: f64) -> Self {
        Weight { kind: WeightKind::Moderate, k, beta: 1.0, gamma: 1.0, c: 1.0 }
    }

    pub fn subexponential(gamma: f64, beta: f64) -> Self {
        let kind = if beta == 1.0 { WeightKind::Exponential } else { WeightKind::Subexponential };
        Weight { kind, k: 0.0, beta, gamma, c: 1.0 }
    }

    pub fn exponential(gamma: f64) -> Self {
        Weight { kind: WeightKind::Exponential, k: 0.0, beta: 1.0, gamma, c: 1.0 }
    }

    /// The constant weight `μ ≡ 1`.
    pub fn unit() -> Self {
        Self::moderate(0.0)
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.c > 0.0) {
            return bad("weight constant must be positive");
        }
        match self.kind {
            WeightKind::Moderate if !(self.k >= 0.0) => bad("moderate order k must be nonnegative"),
            WeightKind::Subexponential | WeightKind::Exponential
                if !(self.beta > 0.0 && self.beta <= 1.0) =>
            {
                bad("weight β must lie in (0,1]")
            }
            WeightKind::Subexponential | WeightKind::Exponential if !(self.gamma > 0.0) => {
                bad("weight γ must be positive")
            }
            _ => Ok(()),
        }
    }

    /// Growth order `β_μ` used in compatibility checks; moderate weights have order 0.
    pub fn growth_beta(&self) -> f64 {
        match self.kind {
            WeightKind::Moderate => 0.0,
            WeightKind::Subexponential => self.beta,
            WeightKind::Exponential => 1.0,
        }
    }

    /// `ln μ(x)`.
    pub fn log_eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self.kind {
            WeightKind::Moderate => self.k * ax.ln_1p(),
            WeightKind::Subexponential => self.gamma * ax.powf(self.beta),
            WeightKind::Exponential => self.gamma * ax,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.log_eval(x).exp()
    }
}

/// `μ(x)` for a valid weight.
pub fn eval_weight(w: &Weight, x: f64) -> f64 {
    w.eval(x)
}

/// Smallest constant `C` with `μ(t+x) ≤ C·env(t)·μ(x)` on the grid, where
/// `env` is the growth envelope declared by `envelope` (`(1+|t|)^k` or
/// `e^{γ|t|^β}`).
pub fn admissibility_constant(mu: &Weight, envelope: &Weight, grid: &[(f64, f64)]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let log_c = grid
        .iter()
        .map(|&(t, x)| mu.log_eval(t + x) - envelope.log_eval(t) - mu.log_eval(x))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(log_c.exp())
}

/// Empirical admissibility constant of `w` against its own declared envelope.
pub fn verify_weight_admissibility(w: &Weight, grid: &[(f64, f64)]) -> Result<f64> {
    admissibility_constant(w, w, grid)
}

/// Integer lattice `{−half,…,half}²`.
pub fn lattice_grid(half: i64) -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(((2 * half + 1) * (2 * half + 1)) as usize);
    for t in -half..=half {
        for x in -half..=half {
            g.push((t as f64, x as f64));
        }
    }
    g
}

/// Default admissibility grid: the lattice on `[−50, 50]²`.
pub fn default_grid() -> Vec<(f64, f64)> {
    lattice_grid(50)
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub constants: Vec<(i64, f64)>,
    /// Set when the constant grows by a factor ≥ 1.5 between consecutive widths.
    pub divergent: bool,
}

/// Re-evaluates the admissibility constant on lattices of increasing half-width.
pub fn admissibility_widening(mu: &Weight, envelope: &Weight, widths: &[i64]) -> Result<AdmissibilityReport> {
    let mut constants = Vec::with_capacity(widths.len());
    for &h in widths {
        constants.push((h, admissibility_constant(mu, envelope, &lattice_grid(h))?));
    }
    let divergent = constants.windows(2).any(|w| w[1].1 >= 1.5 * w[0].1);
    Ok(AdmissibilityReport { constants, divergent })
}

/// A finite coefficient sequence with logical indices `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    values: Vec<Complex64>,
}

impl CoefficientSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("coefficient sequence must be nonempty".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("coefficient sequence has non-finite entries".into()));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds `(f(1), …, f(n))`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((1..=n).map(|i| Complex64::new(f(i), 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); n.max(1)] }
    }

    /// Canonical vector `δ_k` of length `n`.
    pub fn delta(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { index: k, max: n });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k - 1] = Complex64::new(1.0, 0.0);
        Ok(Self { values: v })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry at logical index `n` (1-based).
    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self { values: self.values[..n.min(self.len()).max(1)].to_vec() }
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self { values: self.values.iter().map(|z| z * lambda).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    /// Euclidean norm.
    pub fn l2_norm(&self) -> f64 {
        weighted_norm(self, &Weight::unit(), 2.0).expect("p = 2 is valid")
    }
}

/// `ℓ^p_μ` norm over indices `1..=N`; `p = ∞` gives `sup |a_n| μ(n)`.
pub fn weighted_norm(c: &CoefficientSequence, w: &Weight, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must satisfy p ≥ 1 or p = ∞, got {p}")));
    }
    let logs: Vec<f64> = c
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| z.norm().ln() + w.log_eval((i + 1) as f64))
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(top.exp());
    }
    if top.abs() * p < 600.0 {
        let acc: KahanSum = logs.iter().map(|&l| (p * l).exp()).collect();
        return Ok(acc.value().powf(1.0 / p));
    }
    // Rescale by the largest term to stay in range.
    let acc: KahanSum = logs.iter().map(|&l| (p * (l - top)).exp()).collect();
    Ok(top.exp() * acc.value().powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GradedFamily {
    /// weights `n^k`
    Poly,
    /// weights `e^{k n^β}`
    Subexp { beta: f64 },
}

impl GradedFamily {
    /// `ln` of the level-`k` weight at index `n`.
    pub fn log_weight(&self, n: usize, k: f64) -> f64 {
        match *self {
            GradedFamily::Poly => k * (n as f64).ln(),
            GradedFamily::Subexp { beta } => k * (n as f64).powf(beta),
        }
    }
}

/// `‖c‖_{sup,k} = sup_n |a_n| n^k` (poly) or `sup_n |a_n| e^{k n^β}` (subexp).
pub fn sup_graded_norm(c: &CoefficientSequence, family: GradedFamily, k: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("grading level must be nonnegative, got {k}")));
    }
    Ok(sup_graded_norm_range(c.values(), family, k, 1))
}

/// Sup-norm over a slice whose first entry has logical index `first`.
pub(crate) fn sup_graded_norm_range(values: &[Complex64], family: GradedFamily, k: f64, first: usize) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, z)| z.norm().ln() + family.log_weight(first + i, k))
        .fold(f64::NEG_INFINITY, f64::max)
        .exp()
}

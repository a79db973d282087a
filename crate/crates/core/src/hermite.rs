//! Hermite functions, Gauss–Hermite projection and coefficient-decay classification.
//!
//! Indices are 1-based: `h_n` is the classical Hermite function of order `n−1`.
//! Values are produced by the orthonormal three-term recurrence with a
//! separate log-scale, so neither factorials nor `e^{−x²/2}` are formed.
//!
//! The quadrature stores modified weights `W_i = w_i e^{x_i²} = 1/(Q h_Q(x_i)²)`,
//! so `∫ f g ≈ Σ W_i f(x_i) g(x_i)` is exact whenever `f g` is a Gaussian times a
//! polynomial of degree below `2Q`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::envelopes::line_fit;
use crate::error::{Error, Result};
use crate::summation::KahanSum;
use crate::weights::{sup_graded_norm_range, CoefficientSequence, GradedFamily};

pub const DEFAULT_NMAX: usize = 512;
/// Largest polynomial order probed by the classifier.
pub const MAX_POLY_ORDER: u32 = 20;
/// Required drop of the outer-half supremum for a level to count as stable.
pub const STABILITY_DROP: f64 = 0.05;

const RESCALE: f64 = 1e100;
const GRID_TOL: f64 = 1e-12;

/// Running state of the recurrence: `h_k(x) = value · e^{logscale}`.
#[derive(Clone, Copy)]
struct Recurrence {
    x: f64,
    k: usize,
    prev: f64,
    cur: f64,
    logscale: f64,
}

impl Recurrence {
    fn new(x: f64) -> Self {
        Self { x, k: 0, prev: 0.0, cur: std::f64::consts::PI.powf(-0.25), logscale: -0.5 * x * x }
    }

    /// Advances from classical order `k` to `k+1`.
    fn step(&mut self) {
        let k = self.k as f64;
        let next = self.x * (2.0 / (k + 1.0)).sqrt() * self.cur - (k / (k + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        if self.cur.abs() > RESCALE {
            self.cur /= RESCALE;
            self.prev /= RESCALE;
            self.logscale += RESCALE.ln();
        }
    }

    fn value(&self) -> f64 {
        if self.cur == 0.0 {
            0.0
        } else {
            self.cur * self.logscale.exp()
        }
    }
}

/// `(h_1(x), …, h_count(x))`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut r = Recurrence::new(x);
    for i in 0..count {
        if i > 0 {
            r.step();
        }
        out.push(r.value());
    }
    out
}

/// `h_Q(x)` and `h_{Q+1}(x)` (classical orders `Q−1`, `Q`) sharing one log-scale.
fn top_pair(x: f64, q: usize) -> (f64, f64, f64) {
    let mut r = Recurrence::new(x);
    for _ in 0..q {
        r.step();
    }
    (r.prev, r.cur, r.logscale)
}

/// Number of eigenvalues below `x` of the Jacobi matrix with zero diagonal and
/// off-diagonal `√(k/2)`.
fn sturm_count(x: f64, q: usize) -> usize {
    let mut count = 0;
    let mut d = -x;
    for k in 1..=q {
        if k > 1 {
            let b2 = (k - 1) as f64 / 2.0;
            d = -x - b2 / d;
        }
        if d == 0.0 {
            d = -f64::EPSILON * (1.0 + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gauss–Hermite nodes (ascending) and modified weights of order `q`.
pub fn gauss_hermite(q: usize) -> (Vec<f64>, Vec<f64>) {
    let bound = (2.0 * q as f64 + 1.0).sqrt() + 1.0;
    let mut nodes = vec![0.0; q];
    for i in q / 2..q {
        // i-th smallest eigenvalue: smallest x with sturm_count(x) > i
        let (mut lo, mut hi) = (if i == q / 2 { -1e-300 } else { nodes[i - 1] }, bound);
        if q % 2 == 1 && i == q / 2 {
            nodes[i] = 0.0;
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(mid, q) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            let (p, c, _) = top_pair(x, q);
            let deriv = (2.0 * q as f64).sqrt() * p - x * c;
            if deriv == 0.0 {
                break;
            }
            let dx = c / deriv;
            if !dx.is_finite() || dx.abs() > (hi - lo).max(1e-12) {
                break;
            }
            x -= dx;
        }
        nodes[i] = x;
    }
    for i in 0..q / 2 {
        nodes[i] = -nodes[q - 1 - i];
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _, ls) = top_pair(x, q);
            (-2.0 * ls - (q as f64).ln() - 2.0 * p.abs().ln()).exp()
        })
        .collect();
    (nodes, weights)
}

/// Basis `h_1..h_nmax` together with a quadrature rule of order `2·nmax + 8`.
#[derive(Debug)]
pub struct HermiteContext {
    nmax: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `table[i·nmax + (n−1)] = h_n(x_i)`
    table: OnceLock<Vec<f64>>,
}

impl HermiteContext {
    pub fn new(nmax: usize) -> Result<Self> {
        if nmax == 0 {
            return Err(Error::InvalidParameter("nmax must be positive".into()));
        }
        let (nodes, weights) = gauss_hermite(2 * nmax + 8);
        Ok(Self { nmax, nodes, weights, table: OnceLock::new() })
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn quadrature_order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn table(&self) -> &[f64] {
        self.table.get_or_init(|| self.nodes.iter().flat_map(|&x| hermite_functions(x, self.nmax)).collect())
    }

    /// `h_n(x_i)` for `n ≤ nmax`.
    pub fn basis_at_node(&self, i: usize, n: usize) -> f64 {
        self.table()[i * self.nmax + n - 1]
    }

    /// `Σ_i W_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let acc: KahanSum = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        acc.value()
    }

    /// Gram matrix of `h_1..h_n` under the rule.
    pub fn gram(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        self.check_index(n)?;
        let t = self.table();
        let q = self.nodes.len();
        Ok((1..=n)
            .map(|a| {
                (1..=n)
                    .map(|b| {
                        let acc: KahanSum = (0..q)
                            .map(|i| self.weights[i] * t[i * self.nmax + a - 1] * t[i * self.nmax + b - 1])
                            .collect();
                        acc.value()
                    })
                    .collect()
            })
            .collect())
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.nmax {
            Err(Error::IndexOutOfRange { index: n, max: self.nmax })
        } else {
            Ok(())
        }
    }
}

/// `h_n(x)` for `1 ≤ n ≤ nmax`.
pub fn hermite_eval(ctx: &HermiteContext, n: usize, x: f64) -> Result<f64> {
    ctx.check_index(n)?;
    Ok(*hermite_functions(x, n).last().expect("n ≥ 1"))
}

/// `Σ_n c_n h_n(x)`.
pub fn evaluate_expansion(c: &CoefficientSequence, x: f64) -> Complex64 {
    hermite_functions(x, c.len()).iter().zip(c.values()).map(|(&h, &z)| z * h).sum()
}

/// Concrete elements of `L²(ℝ)` used as projection inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `e^{−a x²/2}`
    Gaussian { a: f64 },
    /// `Σ_n coeffs[n−1] h_n`
    HermiteCombo {
        #[serde(with = "crate::cvalue::vec")]
        coeffs: Vec<Complex64>,
    },
    /// Values at the quadrature nodes of a context.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl TestFunction {
    pub fn gaussian(a: f64) -> Self {
        TestFunction::Gaussian { a }
    }

    /// `h_k` as a combination.
    pub fn basis(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs[k - 1] = Complex64::new(1.0, 0.0);
        TestFunction::HermiteCombo { coeffs }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Gaussian { a } if !(*a > 0.0 && a.is_finite()) => {
                Err(Error::InvalidParameter(format!("gaussian parameter must be positive, got {a}")))
            }
            TestFunction::HermiteCombo { coeffs } if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) => {
                Err(Error::InvalidParameter("hermite_combo coefficients must be finite".into()))
            }
            TestFunction::Sampled { grid, values } if grid.len() != values.len() => {
                Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() })
            }
            TestFunction::Sampled { values, .. } if values.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidParameter("sampled values must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// `‖f‖²_{L²}` when known in closed form.
    pub fn l2_norm_sq(&self) -> Option<f64> {
        match self {
            TestFunction::Gaussian { a } => Some((std::f64::consts::PI / a).sqrt()),
            TestFunction::HermiteCombo { coeffs } => Some(coeffs.iter().map(|z| z.norm_sqr()).sum()),
            TestFunction::Sampled { .. } => None,
        }
    }

    /// Pointwise value, where defined in closed form.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            TestFunction::Gaussian { a } => Some((-0.5 * a * x * x).exp()),
            TestFunction::HermiteCombo { coeffs } if coeffs.iter().all(|z| z.im == 0.0) => {
                Some(hermite_functions(x, coeffs.len()).iter().zip(coeffs).map(|(h, z)| h * z.re).sum())
            }
            _ => None,
        }
    }
}

/// Exact `⟨e^{−a x²/2}, h_n⟩`.
///
/// Only odd `n` (even classical order `2j`) are nonzero:
/// `π^{1/4} √(2/(1+a)) ((1−a)/(1+a))^j √((2j)!) / (2^j j!)`.
pub fn gaussian_coefficient(a: f64, n: usize) -> f64 {
    if n % 2 == 0 {
        return 0.0;
    }
    let j = (n - 1) / 2;
    let q = (1.0 - a) / (1.0 + a);
    let mut t = 1.0;
    for i in 1..=j {
        let i = i as f64;
        t *= q * ((2.0 * i - 1.0) / (2.0 * i)).sqrt();
    }
    std::f64::consts::PI.powf(0.25) * (2.0 / (1.0 + a)).sqrt() * t
}

/// `(⟨f, h_n⟩)_{n=1..N}`.
pub fn project(ctx: &HermiteContext, f: &TestFunction, n: usize) -> Result<CoefficientSequence> {
    ctx.check_index(n)?;
    f.validate()?;
    let samples: Vec<f64> = match f {
        TestFunction::HermiteCombo { coeffs } => {
            let mut v = coeffs.clone();
            v.resize(n, Complex64::new(0.0, 0.0));
            return CoefficientSequence::new(v);
        }
        TestFunction::Gaussian { a } => ctx.nodes.iter().map(|&x| (-0.5 * a * x * x).exp()).collect(),
        TestFunction::Sampled { grid, values } => {
            if grid.len() != ctx.nodes.len() {
                return Err(Error::IncompatibleGrid(format!(
                    "sampled grid has {} points, rule has {}",
                    grid.len(),
                    ctx.nodes.len()
                )));
            }
            if let Some(i) =
                grid.iter().zip(&ctx.nodes).position(|(g, x)| (g - x).abs() > GRID_TOL * x.abs().max(1.0))
            {
                return Err(Error::IncompatibleGrid(format!("grid point {i} is not a quadrature node")));
            }
            values.clone()
        }
    };
    let t = ctx.table();
    let q = ctx.nodes.len();
    let coeffs = (1..=n)
        .map(|k| {
            let acc: KahanSum = (0..q).map(|i| ctx.weights[i] * samples[i] * t[i * ctx.nmax + k - 1]).collect();
            Complex64::new(acc.value(), 0.0)
        })
        .collect();
    CoefficientSequence::new(coeffs)
}

/// Sub-exponential fit of `ln |c_n| ≈ ln C − γ n^β` at one `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubexpFit {
    pub beta: f64,
    /// `+∞` when fewer than three entries are nonzero.
    #[serde(with = "crate::nonfinite")]
    pub gamma: f64,
    #[serde(with = "crate::nonfinite")]
    pub c: f64,
    pub residual: f64,
    pub usable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayClassification {
    /// Largest integer `k ≤ 20` such that every level up to `k` is stable; `None` if level 0 is not.
    pub poly_k: Option<u32>,
    pub subexp: Vec<SubexpFit>,
}

/// Whether `sup_{n > N/2} |c_n| w_k(n)` lies at least 5% below `sup_{n ≤ N/2}`.
fn level_stable(values: &[Complex64], family: GradedFamily, k: f64) -> bool {
    let half = values.len() / 2;
    let inner = sup_graded_norm_range(&values[..half], family, k, 1);
    let outer = sup_graded_norm_range(&values[half..], family, k, half + 1);
    outer == 0.0 || outer <= (1.0 - STABILITY_DROP) * inner
}

/// Polynomial order and sub-exponential rates of a coefficient sequence.
pub fn classify_coefficient_decay(c: &CoefficientSequence, betas: &[f64]) -> Result<DecayClassification> {
    if c.len() < 32 {
        return Err(Error::InvalidParameter(format!("classification needs N ≥ 32, got {}", c.len())));
    }
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
        return Err(Error::InvalidParameter(format!("β must lie in (0,1], got {b}")));
    }
    let values = c.values();
    let mut poly_k = None;
    for k in 0..=MAX_POLY_ORDER {
        if !level_stable(values, GradedFamily::Poly, k as f64) {
            break;
        }
        poly_k = Some(k);
    }
    let subexp = betas
        .iter()
        .map(|&beta| {
            let points: Vec<(f64, f64)> = values
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() >= crate::envelopes::FIT_FLOOR)
                .map(|(i, z)| (((i + 1) as f64).powf(beta), z.norm().ln()))
                .collect();
            if points.len() < 3 {
                return SubexpFit { beta, gamma: f64::INFINITY, c: f64::NAN, residual: 0.0, usable: points.len() };
            }
            let (slope, intercept, residual) = line_fit(&points);
            SubexpFit { beta, gamma: -slope, c: intercept.exp(), residual, usable: points.len() }
        })
        .collect();
    Ok(DecayClassification { poly_k, subexp })
}

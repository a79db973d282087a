//! Dense truncated matrices with 1-based logical indexing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weights::CoefficientSequence;

/// An `N×N` truncation of an infinite matrix.
///
/// `margin` marks the interior verification window
/// `margin+1 ..= N−margin` used by all envelope checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    entries: DMatrix<Complex64>,
    margin: usize,
}

/// Default interior margin `N/8`.
pub fn default_margin(n: usize) -> usize {
    n / 8
}

impl TruncatedMatrix {
    pub fn new(entries: DMatrix<Complex64>, margin: usize) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c || r == 0 {
            return Err(Error::InvalidParameter(format!("matrix must be square and nonempty, got {r}×{c}")));
        }
        if 2 * margin >= r {
            return Err(Error::InvalidParameter(format!("margin {margin} must be < N/2 for N = {r}")));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        Ok(Self { entries, margin })
    }

    /// Wraps `entries` with the default margin.
    pub fn from_dense(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        Self::new(entries, default_margin(n))
    }

    /// Builds `A_{mn} = f(m, n)` for `m, n ∈ 1..=N`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::from_dense(DMatrix::from_fn(n, n, |i, j| Complex64::new(f(i + 1, j + 1), 0.0)))
    }

    pub fn from_complex_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::from_dense(DMatrix::from_fn(n, n, |i, j| f(i + 1, j + 1)))
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n), margin: default_margin(n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: DMatrix::zeros(n, n), margin: default_margin(n) }
    }

    /// Toeplitz tridiagonal matrix with the given sub-, main and super-diagonal.
    pub fn tridiagonal(n: usize, sub: f64, diag: f64, sup: f64) -> Self {
        let m = Self::from_fn(n, |i, j| {
            if i == j {
                diag
            } else if i == j + 1 {
                sub
            } else if j == i + 1 {
                sup
            } else {
                0.0
            }
        });
        m.expect("finite tridiagonal entries")
    }

    pub fn with_margin(mut self, margin: usize) -> Result<Self> {
        if 2 * margin >= self.n() {
            return Err(Error::InvalidParameter(format!("margin {margin} must be < N/2 for N = {}", self.n())));
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// First and last logical index of the interior window.
    pub fn window(&self) -> (usize, usize) {
        (self.margin + 1, self.n() - self.margin)
    }

    /// Entry at logical position `(m, n)`.
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m - 1, n - 1)]
    }

    pub fn dense(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_dense(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    /// Leading `k×k` block, margin scaled proportionally.
    pub fn leading(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return Err(Error::IndexOutOfRange { index: k, max: self.n() });
        }
        let margin = self.margin * k / self.n();
        Self::new(self.entries.view((0, 0), (k, k)).into_owned(), margin)
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), margin: self.margin }
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self { entries: &self.entries * lambda, margin: self.margin }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        Ok(Self { entries: &self.entries * &other.entries, margin: self.margin })
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn to_vector(c: &CoefficientSequence) -> DVector<Complex64> {
    DVector::from_column_slice(c.values())
}

pub(crate) fn from_vector(v: DVector<Complex64>) -> CoefficientSequence {
    CoefficientSequence::new(v.as_slice().to_vec()).expect("finite product of finite data")
}

/// `a_m = Σ_n A_{m,n} c_n`.
pub fn apply_matrix(a: &TruncatedMatrix, c: &CoefficientSequence) -> Result<CoefficientSequence> {
    if a.n() != c.len() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: c.len() });
    }
    Ok(from_vector(a.dense() * to_vector(c)))
}

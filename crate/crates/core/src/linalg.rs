//! Spectral norms, singular values and inverses on dense complex matrices.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this size spectral norms come from a full SVD.
pub const SVD_CUTOFF: usize = 256;
/// Relative tolerance of the power iteration.
pub const POWER_TOL: f64 = 1e-10;
/// Rank tolerance for invertibility checks.
pub const RANK_TOL: f64 = 1e-10;

fn start_vector(n: usize) -> DVector<Complex64> {
    // fixed, non-symmetric start so no eigenvector is missed by parity
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let v = DVector::from_fn(n, |_, _| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        Complex64::new(0.5 + (state >> 11) as f64 / (1u64 << 53) as f64, 0.0)
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// `A v` restricted to the nonzero rows of each column.
struct SparseColumns<'a> {
    a: &'a DMatrix<Complex64>,
    spans: Vec<Range<usize>>,
}

impl<'a> SparseColumns<'a> {
    fn new(a: &'a DMatrix<Complex64>) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let spans = a
            .column_iter()
            .map(|col| match col.iter().position(|z| *z != zero) {
                Some(lo) => lo..col.iter().rposition(|z| *z != zero).expect("a nonzero entry exists") + 1,
                None => 0..0,
            })
            .collect();
        Self { a, spans }
    }

    fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut w = DVector::zeros(self.a.nrows());
        for (j, span) in self.spans.iter().enumerate() {
            let vj = v[j];
            if vj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.a.column(j);
            for i in span.clone() {
                w[i] += col[i] * vj;
            }
        }
        w
    }
}

/// `‖A‖₂` by power iteration on `A*A` (cap `10·N` iterations).
pub fn power_iteration_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let adj = a.adjoint();
    let (fwd, back) = (SparseColumns::new(a), SparseColumns::new(&adj));
    let mut v = start_vector(n);
    let mut sigma = 0.0;
    for _ in 0..(10 * n).max(50) {
        let w = fwd.apply(&v);
        let est = w.norm();
        let u = back.apply(&w);
        let un = u.norm();
        if un == 0.0 {
            return est;
        }
        v = u / Complex64::new(un, 0.0);
        if (est - sigma).abs() <= POWER_TOL * est {
            return est;
        }
        sigma = est;
    }
    sigma
}

/// `‖H‖₂` for Hermitian `H` by power iteration on `H` itself.
pub fn hermitian_power_norm(h: &DMatrix<Complex64>) -> f64 {
    let n = h.ncols();
    if n == 0 {
        return 0.0;
    }
    let op = SparseColumns::new(h);
    let mut v = start_vector(n);
    let mut lambda = 0.0;
    for _ in 0..(10 * n).max(50) {
        let w = op.apply(&v);
        let est = w.norm();
        if est == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(est, 0.0);
        if (est - lambda).abs() <= POWER_TOL * est {
            return est;
        }
        lambda = est;
    }
    lambda
}

pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    s
}

/// Spectral norm: SVD below [`SVD_CUTOFF`], power iteration above.
pub fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.nrows() < SVD_CUTOFF {
        singular_values(a).first().copied().unwrap_or(0.0)
    } else {
        power_iteration_norm(a)
    }
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(h: &DMatrix<Complex64>) -> f64 {
    if h.nrows() < SVD_CUTOFF {
        singular_values(h).first().copied().unwrap_or(0.0)
    } else {
        hermitian_power_norm(h)
    }
}

/// Inverse via LU with partial pivoting; rejects matrices whose smallest
/// singular value is below [`RANK_TOL`].
pub fn inverse(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::Singular { sigma_min: 0.0 })?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular { sigma_min: 0.0 });
    }
    // σ_min = 1/‖A⁻¹‖₂ and ‖A⁻¹‖_F/√N ≤ ‖A⁻¹‖₂ ≤ ‖A⁻¹‖_F
    let frob = inv.norm();
    if 1.0 / frob >= RANK_TOL {
        return Ok(inv);
    }
    let sigma_min = 1.0 / spectral_norm(&inv);
    if !(sigma_min >= RANK_TOL) {
        return Err(Error::Singular { sigma_min });
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn real(n: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |i, j| Complex64::new(f(i, j), 0.0))
    }

    #[test]
    fn sparse_columns_match_dense_product() {
        let banded = real(30, |i, j| if i.abs_diff(j) <= 2 { 1.0 + (i * j % 5) as f64 } else { 0.0 });
        let mut dense = real(30, |i, j| ((i * 13 + j * 5) % 7) as f64 - 3.0);
        dense[(4, 9)] = Complex64::new(0.5, -2.0);
        let mut empty_col = dense.clone();
        empty_col.column_mut(3).fill(Complex64::new(0.0, 0.0));
        let v = start_vector(30);
        for m in [&banded, &dense, &empty_col] {
            let diff = (SparseColumns::new(m).apply(&v) - m * &v).norm();
            assert!(diff < 1e-13, "{diff}");
        }
    }

    #[test]
    fn power_iteration_matches_svd() {
        let a = real(40, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4);
        let s = singular_values(&a)[0];
        assert_relative_eq!(power_iteration_norm(&a), s, max_relative = 1e-8);
    }

    #[test]
    fn hermitian_norm_of_tridiagonal() {
        let n = 300;
        let t = real(n, |i, j| if i == j { 1.0 } else if i.abs_diff(j) == 1 { 0.3 } else { 0.0 });
        let exact = 1.0 + 0.6 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        // top eigenvalue gap ~1e−4: power iteration under the 10·N cap stalls near 1e−5
        let est = hermitian_norm(&t);
        assert!(est <= exact * (1.0 + 1e-12));
        assert_relative_eq!(est, exact, max_relative = 1e-4);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = real(5, |i, _| i as f64);
        assert!(matches!(inverse(&a), Err(Error::Singular { .. })));
        let id = real(5, |i, j| if i == j { 2.0 } else { 0.0 });
        let inv = inverse(&id).unwrap();
        assert_relative_eq!(inv[(3, 3)].re, 0.5);
    }
}

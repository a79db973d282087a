//! Infinite series constants used by the decay-class bounds.
//!
//! Exponential-type sums are truncated once an integral-comparison tail bound
//! drops below the requested tolerance. Power sums use Euler–Maclaurin
//! corrections past a fixed cutoff.

use crate::summation::KahanSum;

/// Default tolerance for series constants.
pub const SERIES_TOL: f64 = 1e-12;

/// Upper bound on `∫_x0^∞ e^{−a t^β} dt`, or `+∞` when the closed-form bound
/// is not yet valid at `x0`.
///
/// Uses `∫ = β^{−1} a^{−s} Γ(s, a x0^β)` with `s = 1/β` and
/// `Γ(s, x) ≤ x^{s−1} e^{−x} / (1 − (s−1)/x)` for `x > s − 1`.
pub fn exp_tail_integral(a: f64, beta: f64, x0: f64) -> f64 {
    let s = 1.0 / beta;
    let x = a * x0.powf(beta);
    if x <= s - 1.0 || x <= 0.0 {
        return f64::INFINITY;
    }
    let denom = 1.0 - (s - 1.0) / x;
    let log_val = -beta.ln() - s * a.ln() + (s - 1.0) * x.ln() - x - denom.ln();
    log_val.exp()
}

/// `Σ_{j ≥ start} e^{−a j^β}` to within `tol`.
pub fn exp_power_sum(a: f64, beta: f64, start: u64, tol: f64) -> f64 {
    assert!(a > 0.0 && beta > 0.0 && beta <= 1.0, "need a > 0 and β ∈ (0,1]");
    let mut acc = KahanSum::new();
    let mut j = start;
    loop {
        acc.add((-a * (j as f64).powf(beta)).exp());
        // Σ_{i > j} f(i) ≤ ∫_j^∞ f since f is decreasing.
        let tail = exp_tail_integral(a, beta, j as f64);
        if tail < tol {
            return acc.value();
        }
        j += 1;
    }
}

/// `P_{γ,β} = Σ_{j≥0} e^{−γ j^β}`.
pub fn p_series(gamma: f64, beta: f64, tol: f64) -> f64 {
    exp_power_sum(gamma, beta, 0, tol)
}

/// `P'_{a,β} = Σ_{n≥1} e^{−a n^β}`.
pub fn p_series_from_one(a: f64, beta: f64, tol: f64) -> f64 {
    exp_power_sum(a, beta, 1, tol)
}

/// Riemann zeta `Σ_{n≥1} n^{−s}` for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const CUT: u64 = 64;
    let mut acc = KahanSum::new();
    for n in 1..CUT {
        acc.add((n as f64).powf(-s));
    }
    let j = CUT as f64;
    // Euler–Maclaurin tail Σ_{n≥J} n^{−s}.
    let tail = j.powf(1.0 - s) / (s - 1.0) + 0.5 * j.powf(-s) + s * j.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * j.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * j.powf(-s - 5.0) / 30240.0;
    acc.add(tail);
    acc.value()
}

/// `Σ_{n > n0} n^{−s}` bounded above by `∫_{n0}^∞ t^{−s} dt`.
pub fn power_tail_bound(s: f64, n0: f64) -> f64 {
    if s <= 1.0 {
        return f64::INFINITY;
    }
    n0.powf(1.0 - s) / (s - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geometric_cases() {
        assert_relative_eq!(p_series(1.0, 1.0, SERIES_TOL), 1.0 / (1.0 - (-1.0f64).exp()), epsilon = 1e-12);
        assert_relative_eq!(p_series(2f64.ln(), 1.0, SERIES_TOL), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn square_root_exponent() {
        // mpmath nsum, 30 digits
        assert_relative_eq!(p_series(1.0, 0.5, 1e-12), 2.670406817966339, epsilon = 1e-11);
    }

    #[test]
    fn zeta_values() {
        assert_relative_eq!(zeta(1.5), 2.612375348685488, epsilon = 1e-13);
        assert_relative_eq!(zeta(2.0), std::f64::consts::PI.powi(2) / 6.0, epsilon = 1e-14);
        assert_relative_eq!(zeta(3.5), 1.126733867317057, epsilon = 1e-13);
    }

    #[test]
    fn tail_integral_dominates_tail_sum() {
        for &(a, b) in &[(1.0, 1.0), (0.5, 0.5), (2.0, 0.3)] {
            let x0 = 200.0;
            let bound = exp_tail_integral(a, b, x0);
            let direct = exp_power_sum(a, b, 201, 1e-300f64.max(bound * 1e-6));
            assert!(direct <= bound, "a={a} b={b}: {direct} > {bound}");
        }
    }
}

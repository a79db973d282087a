use frame_forge_web::{hermite_curve_data, inverse_decay_profile_data, perturbed_frame_data};

#[test]
fn single_term_reproduces_the_standard_gaussian() {
    let c = hermite_curve_data(1.0, 1, 5.0).unwrap();
    assert!((c.coefficients[0] - std::f64::consts::PI.powf(0.25)).abs() < 1e-12);
    assert!(c.l2_error < 1e-7);
    let dev = c.exact.iter().zip(&c.partial).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-12);
}

#[test]
fn partial_sums_converge_for_wide_gaussians() {
    let few = hermite_curve_data(1.0 / 9.0, 10, 10.0).unwrap().l2_error;
    let many = hermite_curve_data(1.0 / 9.0, 200, 10.0).unwrap().l2_error;
    assert!(many < few && many < 1e-6, "{few} {many}");
    assert!(hermite_curve_data(-1.0, 10, 5.0).is_err());
    assert!(hermite_curve_data(1.0, 0, 5.0).is_err());
}

#[test]
fn inverse_profile_stays_under_prediction() {
    let p = inverse_decay_profile_data(0.3, 128, 1.0).unwrap();
    assert_eq!(p.violations, 0);
    assert!(p.observed.iter().zip(&p.predicted).all(|(o, q)| o <= q));
    assert!((p.fitted_gamma.unwrap() - 3f64.ln()).abs() < 1e-3);
    assert!(inverse_decay_profile_data(0.6, 128, 1.0).is_err());
}

#[test]
fn perturbed_frame_bounds_and_dual_decay() {
    let f = perturbed_frame_data(0.5, 0.5, 128).unwrap();
    assert!(f.lower_bound >= 0.25 - 1e-8 && f.upper_bound <= 2.25 + 1e-8);
    assert!((f.dual_gamma - 2f64.ln()).abs() < 1e-6);
    assert!(perturbed_frame_data(1.1, 0.5, 128).unwrap_err().contains("entry exceeds eps"));
    let small = perturbed_frame_data(0.2, 0.3, 32).unwrap();
    assert_eq!(small.offsets.len(), 17);
}

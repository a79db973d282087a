//! Cross-module flows: storage, duals, expansions and the inverse-decay pipeline.

use frame_forge::envelopes::{envelope_matrix, fit_decay, DecayEnvelope};
use frame_forge::frames::{
    analysis, build_perturbed_basis, canonical_dual, cross_gram, synthesis, FrameSystem, PerturbationCoefficients,
    PerturbationSpec,
};
use frame_forge::graded::{expansion_error_curve, graded_profile, property_pg_check};
use frame_forge::hermite::{classify_coefficient_decay, project, HermiteContext, TestFunction};
use frame_forge::io::{load_frame, save_frame};
use frame_forge::jaffard::{jaffard_predict, verify_inverse_decay, JaffardParams};
use frame_forge::rng::stream;
use frame_forge::{GradedFamily, TruncatedMatrix};
use num_complex::Complex64;

fn spec_from_json(text: &str) -> PerturbationSpec {
    serde_json::from_str(text).unwrap()
}

#[test]
fn stored_system_gives_the_same_dual() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_from_json(r#"{"r": 2, "eps": [0.3, 0.2], "a": {"constant": 0.15}}"#);
    let e = build_perturbed_basis(&spec, 96).unwrap().frame;
    let path = dir.path().join("sys.csv");
    save_frame(&e, &path).unwrap();
    let back = load_frame(&path).unwrap();
    let (d1, d2) = (canonical_dual(&e).unwrap(), canonical_dual(&back).unwrap());
    assert_eq!(d1.coeffs().dense(), d2.coeffs().dense());
    let g = cross_gram(&back, &d2).unwrap();
    assert!(g.max_abs_diff(&TruncatedMatrix::identity(96)) < 1e-12);
}

#[test]
fn listed_sequences_match_the_constant_form() {
    let listed = spec_from_json(r#"{"r": 1, "eps": [0.5], "a": [[0.5, 0.5, 0.5, 0.5]]}"#);
    assert!(matches!(listed.a, PerturbationCoefficients::Sequences(_)));
    let e = build_perturbed_basis(&listed, 32).unwrap().frame;
    let c = build_perturbed_basis(&PerturbationSpec::constant(0.5, vec![0.5]), 32).unwrap().frame;
    // sequences end after four entries, the constant continues
    for m in 1..=4 {
        assert_eq!(e.coeffs().get(m, m + 1), c.coeffs().get(m, m + 1));
    }
    assert_eq!(e.coeffs().get(5, 6), Complex64::new(0.0, 0.0));
}

#[test]
fn dual_expansion_reconstructs_hermite_projections() {
    let n = 128;
    let ctx = HermiteContext::new(n).unwrap();
    let e = build_perturbed_basis(&PerturbationSpec::constant(-0.4, vec![0.4]), n).unwrap().frame;
    let d = canonical_dual(&e).unwrap();
    for f in [TestFunction::gaussian(2.0), TestFunction::basis(7)] {
        let c = project(&ctx, &f, n).unwrap();
        let rebuilt = synthesis(&e, &analysis(&d, &c).unwrap()).unwrap();
        let err = rebuilt.add(&c.scale(Complex64::new(-1.0, 0.0))).unwrap().l2_norm();
        assert!(err < 1e-12, "{err}");
        let curve = expansion_error_curve(&c, &e, GradedFamily::Poly, 2.0, &[n]).unwrap();
        assert!(curve[0].1 < 1e-8);
    }
}

#[test]
fn analysis_preserves_decay_class_of_gaussians() {
    let n = 128;
    let ctx = HermiteContext::new(n).unwrap();
    let e = build_perturbed_basis(&PerturbationSpec::constant(0.5, vec![0.5]), n).unwrap().frame;
    let c = project(&ctx, &TestFunction::gaussian(3.0), n).unwrap();
    let before = classify_coefficient_decay(&c, &[0.5]).unwrap();
    let after = classify_coefficient_decay(&analysis(&e, &c).unwrap(), &[0.5]).unwrap();
    assert_eq!(before.poly_k.is_some(), after.poly_k.is_some());
    let profile = graded_profile(&analysis(&e, &c).unwrap(), GradedFamily::Poly, &[0.0, 2.0, 4.0, 8.0]).unwrap();
    assert!(profile.all_stable());
    let mut rng = stream(11, "pg");
    assert!(property_pg_check(&e, GradedFamily::Poly, 6, &mut rng).unwrap().all_agree());
}

#[test]
fn inverse_of_a_jaffard_class_matrix_is_localized() {
    // Id plus a small exponentially decaying off-diagonal part
    let env = envelope_matrix(&DecayEnvelope::jaffard(1.5, 1.0, 0.1), 160).unwrap();
    let a = TruncatedMatrix::from_complex_fn(160, |m, n| if m == n { Complex64::new(1.0, 0.0) } else { env.get(m, n) })
        .unwrap();
    let rep = jaffard_predict(&a, 1.0, 1.5, JaffardParams::default()).unwrap();
    let chk = verify_inverse_decay(&a, &rep).unwrap();
    assert_eq!(chk.violations, 0);
    let fit = chk.fit.unwrap();
    assert!(fit.gamma >= rep.gamma1_pred);
    // A itself carries a finite exponential rate
    assert!(fit_decay(&a, 1.0).unwrap().gamma > 0.0);
    let e = FrameSystem::new(a, "jaffard-class");
    assert!(canonical_dual(&e).is_ok());
}

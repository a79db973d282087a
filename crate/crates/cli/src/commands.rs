//! One function per subcommand. Each writes its files under the output
//! directory plus a `<command>.json` summary.

use std::time::{SystemTime, UNIX_EPOCH};

use frame_forge::envelopes::{fit_decay, schur_bound, spectral_norm, DecayFit};
use frame_forge::frames::{canonical_dual, cross_gram, dual_localization_check, frame_bounds, FrameSystem};
use frame_forge::graded::{default_fframe_samples, expansion_error_curve, fframe_bounds_estimate};
use frame_forge::hermite::{project, HermiteContext};
use frame_forge::io::{error_curves_csv, save_frame};
use frame_forge::jaffard::{jaffard_predict, verify_inverse_decay};
use frame_forge::nonfinite::format_f64;
use frame_forge::rng::stream;
use frame_forge::{Error, TruncatedMatrix};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, MatrixFormat};
use crate::{to_json, write_output, CliError, Outcome, RunOptions};

/// Slack allowed when comparing the Schur bound with the spectral norm.
pub const SCHUR_SLACK: f64 = 1e-10;
/// Allowed increase between consecutive checkpoints of an error curve.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Error required at `M = N`.
pub const EXACTNESS_TOL: f64 = 1e-8;
pub const BIORTHOGONALITY_TOL: f64 = 1e-8;

/// JSON number, or the strings `"inf"`/`"nan"` for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_f64(x))
    }
}

pub fn finish(command: &str, opts: &RunOptions, mut summary: Value, passed: bool) -> Result<Outcome, CliError> {
    summary["command"] = json!(command);
    summary["passed"] = json!(passed);
    if opts.timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        summary["generated_unix"] = json!(secs);
    }
    write_output(&opts.out, &format!("{command}.json"), &to_json(&summary))?;
    Ok(Outcome { passed, summary })
}

fn fit_json(fit: &DecayFit) -> Value {
    json!({ "gamma": num(fit.gamma), "c": num(fit.c), "residual": num(fit.residual), "usable": fit.usable })
}

fn matrix_ext(cfg: &ExperimentConfig) -> &'static str {
    match cfg.format {
        MatrixFormat::Csv => "csv",
        MatrixFormat::Bin => "bin",
    }
}

pub fn gen(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (e, dropped) = cfg.build_system()?;
    std::fs::create_dir_all(&opts.out).map_err(|err| CliError::io(format!("{}: {err}", opts.out.display())))?;
    let path = opts.out.join(format!("{}.{}", cfg.name, matrix_ext(cfg)));
    save_frame(&e, &path)?;
    let summary = json!({
        "label": e.label(),
        "n": e.n(),
        "margin": e.coeffs().margin(),
        "dropped_terms": dropped,
        "path": path.file_name().map(|p| p.to_string_lossy().into_owned()),
    });
    finish("gen", opts, summary, true)
}

/// CSV with columns `beta,gamma,c,residual,usable`.
pub fn fit_rows_csv(rows: &[(f64, DecayFit)]) -> String {
    let mut out = String::from("beta,gamma,c,residual,usable\n");
    for (beta, f) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_f64(*beta),
            format_f64(f.gamma),
            format_f64(f.c),
            format_f64(f.residual),
            f.usable
        ));
    }
    out
}

pub fn fit(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (e, _) = cfg.build_system()?;
    let rows = cfg
        .betas
        .iter()
        .map(|&beta| Ok((beta, fit_decay(e.coeffs(), beta)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    write_output(&opts.out, "fit.csv", &fit_rows_csv(&rows))?;
    let fits: Vec<Value> = rows.iter().map(|(b, f)| json!({ "beta": b, "fit": fit_json(f) })).collect();
    finish("fit", opts, json!({ "n": e.n(), "fits": fits }), true)
}

/// Schur bounds at every configured `p` and the spectral norm; fails when the `p = 2` bound is below the norm.
pub fn schur_step(a: &TruncatedMatrix, ps: &[f64]) -> Result<(Value, bool), CliError> {
    let spectral = spectral_norm(a);
    let mut bounds = Vec::new();
    let mut passed = true;
    for &p in ps {
        let b = schur_bound(a, p)?;
        if p == 2.0 && b < spectral - SCHUR_SLACK {
            passed = false;
        }
        bounds.push(json!({ "p": num(p), "bound": num(b) }));
    }
    Ok((json!({ "spectral_norm": spectral, "bounds": bounds }), passed))
}

pub fn schur(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (e, _) = cfg.build_system()?;
    let (summary, passed) = schur_step(e.coeffs(), &cfg.schur_p)?;
    finish("schur", opts, summary, passed)
}

pub fn jaffard(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (e, _) = cfg.build_system()?;
    let report = jaffard_predict(e.coeffs(), cfg.beta, cfg.gamma, cfg.jaffard)?;
    let check = verify_inverse_decay(e.coeffs(), &report)?;
    let summary = json!({
        "report": report,
        "violations": check.violations,
        "checked": check.checked,
        "observed_constant": num(check.observed_constant),
        "inverse_fit": check.fit.as_ref().map(fit_json),
    });
    finish("jaffard", opts, summary, check.violations == 0)
}

/// Frame bounds, biorthogonality of the canonical dual and the decay of its cross-Gram matrix.
pub fn dual_step(e: &FrameSystem, beta: f64) -> Result<(Value, bool, FrameSystem), CliError> {
    let (a, b) = frame_bounds(e);
    let d = canonical_dual(e)?;
    let g = cross_gram(e, &d)?;
    let residual = g.max_abs_diff(&TruncatedMatrix::identity(e.n()));
    let loc = dual_localization_check(e, beta)?;
    let passed = residual < BIORTHOGONALITY_TOL && loc.dual.gamma > 0.0;
    let summary = json!({
        "frame_bounds": [a, b],
        "biorthogonality_residual": residual,
        "gamma_primal": num(loc.gamma_primal),
        "dual_fit": fit_json(&loc.dual),
    });
    Ok((summary, passed, d))
}

pub fn dual(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (e, _) = cfg.build_system()?;
    let (summary, passed, d) = dual_step(&e, cfg.beta)?;
    std::fs::create_dir_all(&opts.out).map_err(|err| CliError::io(format!("{}: {err}", opts.out.display())))?;
    save_frame(&d, &opts.out.join(format!("{}-dual.{}", cfg.name, matrix_ext(cfg))))?;
    finish("dual", opts, summary, passed)
}

/// Error curves per level; passes when each is nonincreasing and exact at `M = N`.
pub fn expansion_step(cfg: &ExperimentConfig, e: &FrameSystem) -> Result<(Value, bool, String), CliError> {
    let n = e.n();
    let ctx = HermiteContext::new(n)?;
    let f = project(&ctx, &cfg.test_function, n)?;
    let checkpoints = cfg.checkpoints(n);
    let mut curves = Vec::new();
    let mut levels = Vec::new();
    let mut passed = true;
    for &k in &cfg.levels {
        let curve = expansion_error_curve(&f, e, cfg.family, k, &checkpoints)?;
        let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1 + MONOTONE_TOL);
        let final_error = curve.iter().find(|(m, _)| *m == n).map(|(_, err)| *err);
        let exact = final_error.is_none_or(|err| err < EXACTNESS_TOL);
        passed &= monotone && exact;
        levels.push(json!({
            "k": k,
            "monotone": monotone,
            "final_error": final_error.map(num),
        }));
        curves.push((k, curve));
    }
    Ok((json!({ "checkpoints": checkpoints, "levels": levels }), passed, error_curves_csv(&curves)))
}

pub fn expand(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (e, _) = cfg.build_system()?;
    let (summary, passed, csv) = expansion_step(cfg, &e)?;
    write_output(&opts.out, "expand.csv", &csv)?;
    finish("expand", opts, summary, passed)
}

/// Empirical F-frame intervals per level; a level fails when its interval is degenerate.
pub fn fframe_step(cfg: &ExperimentConfig, e: &FrameSystem, seed: u64) -> Result<(Value, bool), CliError> {
    let n = e.n();
    let ctx = HermiteContext::new(n)?;
    let mut rng = stream(seed, "fframe");
    let samples = default_fframe_samples(&ctx, n, cfg.samples, &mut rng)?;
    let mut levels = Vec::new();
    let mut passed = true;
    for &k in &cfg.levels {
        match fframe_bounds_estimate(e, &samples, cfg.family, k) {
            Ok(b) => levels.push(json!({ "k": k, "lower": b.lower, "upper": b.upper })),
            Err(err @ Error::ZeroNormSample(_)) => return Err(err.into()),
            Err(err) => {
                passed = false;
                levels.push(json!({ "k": k, "error": err.to_string() }));
            }
        }
    }
    Ok((json!({ "samples": samples.len(), "levels": levels }), passed))
}

pub fn fframe(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let seed = cfg.seed(opts.seed)?;
    let (e, _) = cfg.build_system()?;
    let (summary, passed) = fframe_step(cfg, &e, seed)?;
    finish("fframe", opts, summary, passed)
}

//! The consolidated report: every pipeline applied to one configured system.
//!
//! Steps run concurrently on per-step random streams and are assembled in a
//! fixed order, so the JSON output depends only on the config and the seed.

use frame_forge::envelopes::check_implication_chain;
use frame_forge::frames::{verify_example_inequalities, weighted_operator_norms, FrameSystem};
use frame_forge::rng::stream;
use frame_forge::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::{dual_step, expansion_step, fframe_step, finish, schur_step};
use crate::config::{ExperimentConfig, SystemSpec};
use crate::{write_output, CliError, Outcome, RunOptions};

pub const STEPS: [&str; 7] = ["implication_chain", "schur", "dual", "example", "expansion", "fframe", "weighted_norms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A precondition of the step does not hold for this config.
    Rejected,
    Skipped,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Rejected => "rejected",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }
}

struct StepResult {
    status: Status,
    detail: Value,
    csv: Option<String>,
}

impl StepResult {
    fn checked(detail: Value, passed: bool) -> Self {
        Self { status: if passed { Status::Pass } else { Status::Fail }, detail, csv: None }
    }

    fn skipped(reason: &str) -> Self {
        Self { status: Status::Skipped, detail: json!({ "reason": reason }), csv: None }
    }
}

fn run_step(name: &str, cfg: &ExperimentConfig, e: &FrameSystem, seed: u64) -> Result<StepResult, CliError> {
    match name {
        "implication_chain" => {
            let r = check_implication_chain(e.coeffs(), cfg.gamma)?;
            // a stable stronger condition must not coexist with a divergent weaker one
            let consistent = (r.star.divergent || !r.dstar.divergent) && (r.dstar.divergent || !r.tstar.divergent);
            Ok(StepResult::checked(serde_json::to_value(r).expect("report serializes"), consistent))
        }
        "schur" => {
            let (v, ok) = schur_step(e.coeffs(), &cfg.schur_p)?;
            Ok(StepResult::checked(v, ok))
        }
        "dual" => {
            let (v, ok, _) = dual_step(e, cfg.beta)?;
            Ok(StepResult::checked(v, ok))
        }
        "example" => match cfg.system_spec()? {
            SystemSpec::Perturbation(spec) => {
                let mut rng = stream(seed, name);
                let r = verify_example_inequalities(&spec, e.n(), cfg.trials, &mut rng)?;
                Ok(StepResult::checked(serde_json::to_value(r).expect("report serializes"), r.holds()))
            }
            _ => Ok(StepResult::skipped("system is not a perturbation of the Hermite basis")),
        },
        "expansion" => {
            let (v, ok, csv) = expansion_step(cfg, e)?;
            Ok(StepResult { csv: Some(csv), ..StepResult::checked(v, ok) })
        }
        "fframe" => {
            let (v, ok) = fframe_step(cfg, e, seed)?;
            Ok(StepResult::checked(v, ok))
        }
        "weighted_norms" => match &cfg.weight {
            Some(w) => {
                let mut rng = stream(seed, name);
                match weighted_operator_norms(e, w, cfg.p, cfg.beta, cfg.trials.min(200), &mut rng) {
                    Ok(r) => {
                        let ok = r.frame_operator_min > 0.0 && r.frame_operator_max.is_finite();
                        Ok(StepResult::checked(serde_json::to_value(r).expect("report serializes"), ok))
                    }
                    Err(err @ Error::IncompatibleWeight(_)) => Ok(StepResult {
                        status: Status::Rejected,
                        detail: json!({ "reason": err.to_string() }),
                        csv: None,
                    }),
                    Err(err) => Err(err.into()),
                }
            }
            None => Ok(StepResult::skipped("no weight configured")),
        },
        other => unreachable!("unknown step {other}"),
    }
}

/// Runs every step; fails when a step fails or errors. Rejected and skipped steps do not fail the report.
pub fn report(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let seed = cfg.seed(opts.seed)?;
    let (e, dropped) = cfg.build_system()?;
    let results: Vec<StepResult> = STEPS
        .par_iter()
        .map(|name| {
            run_step(name, cfg, &e, seed).unwrap_or_else(|err| StepResult {
                status: Status::Error,
                detail: json!({ "error": err.message, "exit_code": err.code }),
                csv: None,
            })
        })
        .collect();
    let mut steps = Vec::new();
    let mut passed = true;
    for (name, r) in STEPS.iter().zip(results) {
        passed &= !matches!(r.status, Status::Fail | Status::Error);
        if let Some(csv) = &r.csv {
            write_output(&opts.out, &format!("report_{name}.csv"), csv)?;
        }
        steps.push(json!({ "step": name, "status": r.status.as_str(), "detail": r.detail }));
    }
    let summary = json!({
        "label": e.label(),
        "n": e.n(),
        "seed": seed,
        "dropped_terms": dropped,
        "steps": steps,
    });
    finish("report", opts, summary, passed)
}

//! Executes the checks of a scenario.

use std::time::{Duration, Instant};

use cnalg_core::bundle::check_courant_axioms;
use cnalg_core::compat::{
    bivector_graph_pn, check_cn, check_dirac, check_dual_im, check_h_r_compatible, check_im,
    gauge_equivalent, lagrangian_invariance,
};
use cnalg_core::deriv::{check_nijenhuis, NijenhuisMode};
use cnalg_core::report::{CheckReport, Entry};
use cnalg_core::sample::DEFAULT_SEED;
use cnalg_core::split::{check_manin, induced_bivector_identity};
use serde::Serialize;

use crate::resolve::Env;
use crate::scenario::{Check, CheckSpec, Expected, ModeSpec, Scenario, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub status: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub status: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_status: Option<Expected>,
    pub checks: Vec<CheckOutcome>,
}

impl RunReport {
    /// 0 when every check passes, 1 when one fails, 2 when one could not run.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Error => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("scenario {} (seed {})\n", self.scenario, self.seed);
        for c in &self.checks {
            let status = match c.status {
                Outcome::Pass => "pass",
                Outcome::Fail => "FAIL",
                Outcome::Error => "ERROR",
            };
            let label = c
                .label
                .as_deref()
                .map(|l| format!(" {l}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "[{status}] {}{label} ({:.1?})\n",
                c.kind, c.elapsed
            ));
            if let Some(r) = &c.report {
                out.push_str(&r.render_text());
            }
            if let Some(e) = &c.error {
                out.push_str(&format!("  error: {e}\n"));
            }
        }
        let failed = self
            .checks
            .iter()
            .filter(|c| c.status != Outcome::Pass)
            .count();
        let status = match self.status {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Error => "error",
        };
        out.push_str(&format!(
            "status: {status} ({} checks, {failed} not passing)\n",
            self.checks.len()
        ));
        out
    }
}

/// Runs every check of `scenario`. `seed` overrides the seeds in the document.
pub fn run(scenario: &Scenario, seed: Option<u64>) -> Result<RunReport, ScenarioError> {
    let env = Env::build(scenario)?;
    for (i, c) in scenario.checks.iter().enumerate() {
        env.validate(i, &c.spec)?;
    }
    let base = seed.or(scenario.seed).unwrap_or(DEFAULT_SEED);
    let outcomes = std::thread::scope(|scope| {
        let handles: Vec<_> = scenario
            .checks
            .iter()
            .map(|c| {
                let env = &env;
                let seed = seed.or(c.seed).unwrap_or(base);
                scope.spawn(move || run_check(env, c, seed))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect::<Vec<_>>()
    });
    let status = if outcomes.iter().any(|c| c.status == Outcome::Error) {
        Outcome::Error
    } else if outcomes.iter().any(|c| c.status == Outcome::Fail) {
        Outcome::Fail
    } else {
        Outcome::Pass
    };
    Ok(RunReport {
        scenario: scenario.name.clone(),
        seed: base,
        status,
        expected_status: scenario.expected_status,
        checks: outcomes,
    })
}

fn run_check(env: &Env, check: &Check, seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let result = evaluate(env, &check.spec, seed);
    let elapsed = start.elapsed();
    let (status, report, error) = match result {
        Ok(r) if r.passed() => (Outcome::Pass, Some(r), None),
        Ok(r) => (Outcome::Fail, Some(r), None),
        Err(e) => (Outcome::Error, None, Some(e.to_string())),
    };
    CheckOutcome {
        kind: check.spec.kind(),
        label: check.label.clone(),
        status,
        report,
        error,
        elapsed,
    }
}

type BoxError = Box<dyn std::error::Error + Send + Sync>;

fn evaluate(env: &Env, spec: &CheckSpec, seed: u64) -> Result<CheckReport, BoxError> {
    let at = format!("checks.{}", spec.kind());
    let at = at.as_str();
    let report = match spec {
        CheckSpec::CourantAxioms { bundle } => check_courant_axioms(env.bundle(at, bundle)?, seed),
        CheckSpec::Cn { bundle, derivation } => check_cn(
            env.bundle(at, bundle)?,
            env.derivation(at, derivation)?,
            seed,
        ),
        CheckSpec::HRCompatible { twist, r } => {
            check_h_r_compatible(&env.chart, env.form(at, twist)?, env.endo(at, r)?)
        }
        CheckSpec::Nijenhuis { derivation, mode } => {
            let mode = match mode {
                ModeSpec::Nijenhuis => NijenhuisMode::Nijenhuis,
                ModeSpec::AlmostComplex => NijenhuisMode::AlmostComplex,
                ModeSpec::Dolbeault => NijenhuisMode::Dolbeault,
            };
            check_nijenhuis(env.derivation(at, derivation)?, mode, seed)
        }
        CheckSpec::LagrangianInvariance {
            bundle,
            derivation,
            lagrangian,
        } => {
            lagrangian_invariance(
                env.bundle(at, bundle)?,
                env.derivation(at, derivation)?,
                env.lagrangian(at, lagrangian)?,
            )?
            .0
        }
        CheckSpec::Dirac { bundle, lagrangian } => {
            check_dirac(env.bundle(at, bundle)?, env.lagrangian(at, lagrangian)?)
        }
        CheckSpec::GaugeEquivalent {
            derivation,
            target,
            b,
        } => {
            let entry: Entry = gauge_equivalent(
                env.derivation(at, derivation)?,
                env.derivation(at, target)?,
                env.form(at, b)?,
            )?;
            let mut r = CheckReport::new("gauge_equivalent");
            r.push(entry);
            r
        }
        CheckSpec::Im {
            algebroid,
            derivation,
        } => check_im(
            env.algebroid(at, algebroid)?,
            env.derivation(at, derivation)?,
            seed,
        ),
        CheckSpec::DualIm {
            algebroid,
            derivation,
            degrees,
        } => check_dual_im(
            env.algebroid(at, algebroid)?,
            env.derivation(at, derivation)?,
            degrees,
            seed,
        ),
        CheckSpec::Jacobi { algebroid } => {
            let mut r = CheckReport::new("jacobi");
            r.push(env.algebroid(at, algebroid)?.jacobi_entry());
            r
        }
        CheckSpec::BivectorGraphPn { bivector, r } => bivector_graph_pn(
            &env.chart,
            env.bivector(at, bivector)?,
            env.endo(at, r)?,
            seed,
        ),
        CheckSpec::InducedBivector { proto } => induced_bivector_identity(env.proto(at, proto)?).1,
        CheckSpec::Manin {
            bundle,
            a,
            b,
            derivation,
        } => check_manin(
            env.bundle(at, bundle)?,
            env.lagrangian(at, a)?,
            env.lagrangian(at, b)?,
            env.derivation(at, derivation)?,
            seed,
        )?,
    };
    Ok(report)
}

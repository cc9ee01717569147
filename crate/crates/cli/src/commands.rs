//! Command implementations. Each returns a JSON report whose `exit_code`
//! field is the process exit code.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use veq_core::conditions::CheckError;
use veq_core::expr::{fixture, FixtureId};
use veq_core::panel::{run_checker, run_panel, PanelProblem, TheoremId};
use veq_core::solver::{self, ProblemKind, SetRelation, VviKind};
use veq_core::{SolutionSet, SolveError, VExpr, Verdict};

use crate::problem::{ProblemBody, ProblemSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_EVAL: i32 = 2;
pub const EXIT_EXPECTATION: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Primal,
    Dual,
    Both,
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckSelection {
    Checkers(Vec<String>),
    Panel(TheoremId),
}

/// Evaluation failures exit with 2; everything else is a problem-file issue.
pub fn solve_error_code(e: &SolveError) -> i32 {
    match e {
        SolveError::Check(CheckError::Eval { .. }) => EXIT_EVAL,
        _ => EXIT_PARSE,
    }
}

pub fn error_report(command: &str, message: String, exit_code: i32) -> Value {
    json!({ "command": command, "error": message, "exit_code": exit_code })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn zero_like(f: &VExpr) -> VExpr {
    VExpr::parse(&format!("({})", vec!["0"; f.out_dim()].join(", "))).expect("constant tuple parses")
}

/// The trifunction the problem defines: `f(z,y) + g(x,y)` for bifunctions.
pub fn trifunction(spec: &ProblemSpec) -> Result<VExpr, SolveError> {
    match &spec.body {
        ProblemBody::Trifunction(f) | ProblemBody::Fixture(_, f) => Ok(f.clone()),
        ProblemBody::Bifunctions { f, g } => {
            let zero = zero_like(f);
            VExpr::perturbed_trifunction(f, g.as_ref().unwrap_or(&zero))
                .ok_or_else(|| SolveError::Incompatible("f and g differ in output dimension".into()))
        }
        ProblemBody::Vvi(p) => Ok(fixture(FixtureId::VviAffine, p)?),
    }
}

fn solve_kind(spec: &ProblemSpec, f: &VExpr, kind: ProblemKind) -> Result<SolutionSet, SolveError> {
    let ys = spec.y_domain.as_ref().unwrap_or(&spec.domain);
    solver::solve_on(kind, f, &spec.domain, ys.points(), &spec.cone, spec.tol)
}

pub fn solve(spec: &ProblemSpec, mode: SolveMode, expect_nonempty: bool) -> Value {
    match solve_inner(spec, mode) {
        Ok(sets) => {
            let mut report = serde_json::Map::new();
            report.insert("command".into(), json!("solve"));
            report.insert("mode".into(), json!(format!("{mode:?}").to_uppercase()));
            let empty: Vec<&str> = sets.iter().filter(|(_, s)| s.is_empty()).map(|(k, _)| *k).collect();
            if let [(_, p), (_, d)] = sets.as_slice() {
                report.insert("relation".into(), to_value(&SetRelation::of(p, d)));
            }
            for (k, s) in &sets {
                report.insert((*k).into(), to_value(s));
            }
            let code = if expect_nonempty && !empty.is_empty() {
                report.insert(
                    "expectation".into(),
                    json!({ "nonempty": false, "empty_sets": empty }),
                );
                EXIT_EXPECTATION
            } else {
                if expect_nonempty {
                    report.insert("expectation".into(), json!({ "nonempty": true }));
                }
                EXIT_OK
            };
            report.insert("exit_code".into(), json!(code));
            Value::Object(report)
        }
        Err(e) => error_report("solve", e.to_string(), solve_error_code(&e)),
    }
}

fn solve_inner(spec: &ProblemSpec, mode: SolveMode) -> Result<Vec<(&'static str, SolutionSet)>, SolveError> {
    if let ProblemBody::Vvi(params) = &spec.body {
        let run = |k| solver::vvi(params, k, &spec.domain, &spec.cone, spec.tol);
        return match mode {
            SolveMode::Primal => Ok(vec![("stampacchia", run(VviKind::Stampacchia)?)]),
            SolveMode::Dual => Ok(vec![("minty", run(VviKind::Minty)?)]),
            SolveMode::Both => Ok(vec![("stampacchia", run(VviKind::Stampacchia)?), ("minty", run(VviKind::Minty)?)]),
            SolveMode::Perturbed => Err(SolveError::Incompatible("--perturbed needs bifunction blocks".into())),
        };
    }
    if mode == SolveMode::Perturbed {
        let ProblemBody::Bifunctions { f, g } = &spec.body else {
            return Err(SolveError::Incompatible("--perturbed needs bifunction_f (and bifunction_g) blocks".into()));
        };
        let g = g.clone().unwrap_or_else(|| zero_like(f));
        return Ok(vec![("perturbed", solver::solve_perturbed(f, &g, &spec.domain, &spec.cone, spec.tol)?)]);
    }
    let f = trifunction(spec)?;
    Ok(match mode {
        SolveMode::Primal => vec![("primal", solve_kind(spec, &f, ProblemKind::Primal)?)],
        SolveMode::Dual => vec![("dual", solve_kind(spec, &f, ProblemKind::Dual)?)],
        _ => vec![
            ("primal", solve_kind(spec, &f, ProblemKind::Primal)?),
            ("dual", solve_kind(spec, &f, ProblemKind::Dual)?),
        ],
    })
}

pub fn check(spec: &ProblemSpec, selection: &CheckSelection) -> Value {
    let tri = match trifunction(spec) {
        Ok(t) => t,
        Err(e) => return error_report("check", e.to_string(), solve_error_code(&e)),
    };
    let mut problem = match &spec.body {
        ProblemBody::Bifunctions { f, g } => {
            let mut p = PanelProblem::trifunction(&tri, &spec.domain, &spec.cone, spec.tol);
            p.f = Some(f);
            p.g = g.as_ref();
            p
        }
        _ => PanelProblem::trifunction(&tri, &spec.domain, &spec.cone, spec.tol),
    }
    .with_seed(spec.seed);
    problem.tsched = spec.tschedule.clone();
    problem.x0 = spec.x0.clone();
    if matches!(selection, CheckSelection::Panel(id) if id.needs_bifunctions()) {
        problem.trifunction = None;
    }

    let verdicts: Result<BTreeMap<String, Verdict>, SolveError> = match selection {
        CheckSelection::Panel(id) => run_panel(*id, &problem),
        CheckSelection::Checkers(names) => names
            .iter()
            .map(|n| run_checker(n, &problem).map(|v| (n.clone(), v)))
            .collect(),
    };
    match verdicts {
        Ok(verdicts) => {
            let failed: Vec<&String> = verdicts.iter().filter(|(_, v)| v.is_fail()).map(|(k, _)| k).collect();
            let code = if failed.is_empty() { EXIT_OK } else { EXIT_CHECK_FAILED };
            let mut report = json!({
                "command": "check",
                "verdicts": verdicts,
                "failed": failed,
                "exit_code": code,
            });
            if let CheckSelection::Panel(id) = selection {
                report["panel"] = json!(id.name());
            }
            report
        }
        Err(e) => error_report("check", e.to_string(), solve_error_code(&e)),
    }
}

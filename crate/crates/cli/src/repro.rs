//! Scripted reproductions of the two worked examples.

use serde::Serialize;
use serde_json::{json, Value};
use veq_core::conditions::{check_usc_violation, verify_condition_c_witness, CheckError, Slice, Status};
use veq_core::expr::{fixture, FixtureId, FixtureParams};
use veq_core::panel::{run_checker, PanelProblem};
use veq_core::solver::{solve_dual, solve_primal};
use veq_core::{GridDomain, PolyCone, Region, SolveError, VExpr, WitnessSequence};

use crate::commands::{error_report, EXIT_EXPECTATION, EXIT_OK, EXIT_PARSE};

pub const NAMES: [&str; 2] = ["ex31", "ex32"];
pub const TOL: f64 = 1e-9;
/// Agreement required between computed and closed-form values.
pub const VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub id: String,
    pub claim: String,
    pub passed: bool,
    pub evidence: Value,
}

fn assertion(id: &str, claim: &str, passed: bool, evidence: Value) -> Assertion {
    Assertion {
        id: id.into(),
        claim: claim.into(),
        passed,
        evidence,
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p - q).abs() <= VALUE_TOL)
}

pub fn repro(name: &str) -> Value {
    let result = match name {
        "ex31" => ex31(),
        "ex32" => ex32(),
        _ => {
            return error_report(
                "repro",
                format!("UnknownFixture: `{name}` (expected one of {})", NAMES.join(", ")),
                EXIT_PARSE,
            )
        }
    };
    match result {
        Ok(assertions) => {
            let ok = assertions.iter().all(|a| a.passed);
            json!({
                "command": "repro",
                "name": name,
                "reproduced": ok,
                "assertions": assertions,
                "exit_code": if ok { EXIT_OK } else { EXIT_EXPECTATION },
            })
        }
        Err(e) => error_report("repro", e.to_string(), crate::commands::solve_error_code(&e)),
    }
}

fn ex31_f() -> VExpr {
    fixture(FixtureId::Ex31F, &FixtureParams::new()).expect("fixture without parameters")
}

/// Grid `[-1, 1]` with step 1/400, `C = R^2_+`.
pub fn ex31() -> Result<Vec<Assertion>, SolveError> {
    let f = ex31_f();
    let grid = GridDomain::box_grid(&[-1.0], &[1.0], 1.0 / 400.0)?;
    let cone = PolyCone::orthant(2);
    let x0 = [-0.5];
    let mut out = Vec::new();

    let dual = solve_dual(&f, &grid, &cone, TOL)?;
    out.push(assertion(
        "a",
        "x = -1/2 solves the dual problem",
        dual.contains(&x0),
        json!({ "dual_solution_count": dual.solutions.len(), "contains_-1/2": dual.contains(&x0) }),
    ));

    let primal = solve_primal(&f, &grid, &cone, TOL)?;
    let y = [0.75];
    let value = Slice::Primal.at(&f, &x0, &y)?;
    let neg_int = cone.member(&value, Region::InNegIntC, TOL).map_err(CheckError::from)?;
    let stored = primal.refutations.iter().find(|r| r.x == x0);
    out.push(assertion(
        "b",
        "x = -1/2 is refuted for the primal problem by y = 3/4 with F = (-1/3, -1/3)",
        !primal.contains(&x0) && neg_int && close(&value, &[-1.0 / 3.0, -1.0 / 3.0]),
        json!({
            "y": y,
            "F(x,y,x)": value,
            "in_neg_int_C": neg_int,
            "solver_refutation": stored,
            "primal_solutions": primal.solutions,
        }),
    ));

    let p = PanelProblem::trifunction(&f, &grid, &cone, TOL);
    let q = run_checker("explicit_quasiconvex", &p)?;
    let (triple, diffs) = match (&q.counterexample, q.status) {
        (Some(c), Status::Fail) => (
            vec![c.p("x")[0], c.p("y")[0], c.p("z")[0]],
            vec![c.v("F(x,p,z)-F(x,x,z)").to_vec(), c.v("F(x,p,z)-F(x,y,z)").to_vec()],
        ),
        _ => (vec![], vec![]),
    };
    let zero_diffs = diffs.len() == 2 && diffs.iter().all(|d| d.iter().all(|&v| v == 0.0));
    out.push(assertion(
        "c",
        "explicit quasiconvexity fails at (x, y, z) = (-1, -1/2, 1/2) with both differences (0, 0)",
        triple == [-1.0, -0.5, 0.5] && zero_diffs,
        json!({ "verdict": q }),
    ));

    let d = run_checker("diagonal_offdiag_neg_c", &p)?;
    out.push(assertion(
        "d",
        "F(x, x, y) lies in -C for x != y",
        d.is_ok(),
        json!({ "verdict": d }),
    ));
    Ok(out)
}

/// The cone `{|z1| <= z2}` as rows `(1, 1)` and `(-1, 1)`.
pub fn ex32_cone() -> PolyCone {
    PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]], "abs").expect("valid rows")
}

/// `x_k = 1/2 + (-1)^k / 2^(k+2)`, `k = 1..10`.
pub fn ex32_sequence() -> WitnessSequence {
    let pts = (1..=10).map(|k| vec![0.5 + (-1f64).powi(k) / 2f64.powi(k + 2)]).collect();
    WitnessSequence::converging(pts, vec![0.5]).expect("shrinking sequence")
}

pub fn ex32() -> Result<Vec<Assertion>, SolveError> {
    let f = fixture(FixtureId::Ex32F, &FixtureParams::new()).expect("fixture without parameters");
    let cone = ex32_cone();
    let seq = ex32_sequence();
    let mut usc = Vec::new();
    let mut witness = Vec::new();
    let (mut usc_ok, mut witness_ok) = (true, true);
    for y in [0.0, 0.3, 1.0] {
        let v = check_usc_violation(&f, Slice::Primal, &[y], &[0.5], &[-0.5, 1.0], &[0.75], &cone, TOL)?;
        let diff = v.evidence.as_ref().map(|e| e.v("c+M(x)-M(probe)").to_vec());
        usc_ok &= v.is_ok() && diff.as_deref().is_some_and(|d| close(d, &[-1.5, 1.5]));
        usc.push(json!({ "y": y, "verdict": v }));

        let zs: Vec<Vec<f64>> = seq.points().iter().map(|x| vec![x[0] + y, x[0]]).collect();
        let w = WitnessSequence::converging(zs, vec![0.5 + y, 0.5])?;
        let v = verify_condition_c_witness(&f, Slice::Primal, &[y], &seq, &w, &cone, TOL)?;
        witness_ok &= v.is_ok();
        witness.push(json!({ "y": y, "gap": w.gap(), "verdict": v }));
    }
    Ok(vec![
        assertion(
            "a",
            "x -> F(x,y,x) is not C-upper semicontinuous at 1/2: c = (-1/2, 1), probe 3/4 give (-3/2, 3/2) outside int C",
            usc_ok,
            json!(usc),
        ),
        assertion(
            "b",
            "condition (c) holds at 1/2 with z_k = (x_k + y, x_k) and z = (1/2 + y, 1/2)",
            witness_ok,
            json!(witness),
        ),
    ])
}

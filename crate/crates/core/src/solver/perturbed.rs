//! Perturbed problems `f(x,y) + g(x,y) ∉ -int C`.

use serde::Serialize;

use crate::cone::{PolyCone, Region};
use crate::conditions::{
    check_diagonal, find_coercivity, CheckError, CoercivityOutcome, CoercivityVariant, Counterexample, DiagonalMode,
    Slice, Status, Verdict,
};
use crate::expr::{fixture, FixtureId, FixtureParams, VExpr};
use crate::geometry::{GridDomain, TSchedule};
use crate::vector::{add, lerp, norm, sub};

use super::{solve_on, ProblemKind, SolutionSet, SolveError};

/// `g(x, y) = ε ‖x - y‖ e` with `e ∈ C \ {0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub e: Vec<f64>,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, e: Vec<f64>, cone: &PolyCone, tol: f64) -> Result<Self, SolveError> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(SolveError::BadPerturbation(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        if !(norm(&e) > 0.0) {
            return Err(SolveError::BadPerturbation("direction e must be nonzero".into()));
        }
        if !cone.member(&e, Region::InC, tol).map_err(CheckError::from)? {
            return Err(SolveError::BadPerturbation(format!("direction {e:?} is not in the cone")));
        }
        Ok(PerturbationSpec { epsilon, e })
    }

    /// The perturbation bifunction on `R^n`.
    pub fn bifunction(&self, n: usize) -> Result<VExpr, SolveError> {
        let mut p = FixtureParams::new();
        p.insert("eps".into(), self.epsilon);
        p.insert("n".into(), n as f64);
        for (i, ei) in self.e.iter().enumerate() {
            p.insert(format!("e{}", i + 1), *ei);
        }
        Ok(fixture(FixtureId::PerturbEps, &p)?)
    }
}

pub(crate) fn perturbed(f: &VExpr, g: &VExpr) -> Result<VExpr, SolveError> {
    VExpr::perturbed_trifunction(f, g).ok_or_else(|| {
        SolveError::Incompatible(format!(
            "f has {} components but g has {}",
            f.out_dim(),
            g.out_dim()
        ))
    })
}

/// Solves the perturbed problem and flags the instance when no BALL_LT
/// coercivity certificate exists, since solutions near the domain's edge may
/// then be artifacts of truncation.
pub fn solve_perturbed(
    f: &VExpr,
    g: &VExpr,
    grid: &GridDomain,
    cone: &PolyCone,
    tol: f64,
) -> Result<SolutionSet, SolveError> {
    let f1 = perturbed(f, g)?;
    let mut set = solve_on(ProblemKind::Perturbed, &f1, grid, grid.points(), cone, tol)?;
    let coercivity = find_coercivity(&f1, Slice::Primal, grid, CoercivityVariant::BallLt, None, cone, tol)?;
    if let CoercivityOutcome::Failed(v) = coercivity {
        set.flags.push(format!(
            "COERCIVITY_FAILED: BALL_LT ({}); solutions may be truncation artifacts",
            v.notes
        ));
    }
    Ok(set)
}

/// ε-equilibrium points: the perturbed problem with `g = ε ‖x - y‖ e`.
pub fn epsilon_equilibrium(
    f: &VExpr,
    spec: &PerturbationSpec,
    grid: &GridDomain,
    cone: &PolyCone,
    tol: f64,
) -> Result<SolutionSet, SolveError> {
    let g = spec.bifunction(grid.dim())?;
    solve_perturbed(f, &g, grid, cone, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    pub x0: Vec<f64>,
    pub precondition: Verdict,
    pub condition_i: Verdict,
    pub condition_ii: Verdict,
    pub condition_iii: Verdict,
    /// Direct scan of `f(x0,y) + g(x0,y)`, run when no hypothesis fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<Verdict>,
    pub verdict: Verdict,
}

fn is_neg_int(cone: &PolyCone, v: &[f64], tol: f64) -> Result<bool, SolveError> {
    Ok(cone.member(v, Region::InNegIntC, tol).map_err(CheckError::from)?)
}

/// Checks the hypotheses under which a solution `x0` of the `g`-problem also
/// solves the perturbed problem, then confirms that conclusion directly.
///
/// The gap condition is skipped at `y = x0`, where it reduces to
/// `-f(x0,x0) = 0 ∈ -int C` and can never hold.
pub fn transfer_theorem_5_2(
    f: &VExpr,
    g: &VExpr,
    x0: &[f64],
    grid: &GridDomain,
    tsched: &TSchedule,
    cone: &PolyCone,
    tol: f64,
) -> Result<TransferReport, SolveError> {
    let f1 = perturbed(f, g)?;
    crate::conditions::check_grid(&f1, grid, cone)?;
    let ev = |h: &VExpr, x: &[f64], y: &[f64]| Slice::Raw.at(h, x, y);
    let ys = grid.points();

    let mut checked = 0u64;
    for y in ys {
        checked += 1;
        let v = ev(g, x0, y)?;
        if is_neg_int(cone, &v, tol)? {
            return Err(SolveError::NotADualSolution {
                x0: x0.to_vec(),
                y: y.clone(),
                value: v,
            });
        }
    }
    let precondition = Verdict::pass("solves_g", checked, tol, "g(x0,y) avoids -int C on the grid");

    let ts: Vec<f64> = tsched.open_values().collect();
    let mut condition_i = None;
    let mut checked = 0u64;
    'i: for y in ys.iter().filter(|y| y.as_slice() != x0) {
        for &t in &ts {
            checked += 1;
            let p = lerp(x0, y, t);
            let v = sub(&sub(&ev(g, x0, &p)?, &ev(f, &p, y)?), &ev(g, x0, y)?);
            if !is_neg_int(cone, &v, tol)? {
                let c = Counterexample::new()
                    .point("x0", x0)
                    .point("y", y)
                    .point("t", &[t])
                    .value("g(x0,p)-f(p,y)-g(x0,y)", &v);
                condition_i = Some(Verdict::fail("transfer_gap", c, checked, tol, "gap avoids -int C"));
                break 'i;
            }
        }
    }
    let condition_i = condition_i.unwrap_or_else(|| {
        Verdict::pass("transfer_gap", checked, tol, "gap lies in -int C for every y != x0 and sampled t")
    });

    let mut condition_ii = None;
    let mut checked = 0u64;
    'ii: for y in ys {
        let gy = ev(g, x0, y)?;
        for &t in tsched.values() {
            checked += 1;
            let p = lerp(x0, y, t);
            if is_neg_int(cone, &add(&ev(f, &p, y)?, &gy), tol)? {
                continue 'ii;
            }
        }
        checked += 1;
        let end = add(&ev(f, x0, y)?, &gy);
        if is_neg_int(cone, &end, tol)? {
            let c = Counterexample::new()
                .point("x0", x0)
                .point("y", y)
                .value("f(x0,y)+g(x0,y)", &end);
            condition_ii = Some(Verdict::fail(
                "transfer_hemicontinuity",
                c,
                checked,
                tol,
                "antecedent holds on every sampled t but the limit value lies in -int C",
            ));
            break;
        }
    }
    let condition_ii = condition_ii.unwrap_or_else(|| {
        Verdict::consistent(
            "transfer_hemicontinuity",
            checked,
            tol,
            "implication holds on the sampled schedule",
        )
    });

    let condition_iii = check_diagonal(f, grid, DiagonalMode::Zero, cone, tol)?;

    let hypotheses = [&condition_i, &condition_ii, &condition_iii];
    let (conclusion, verdict) = if let Some(failed) = hypotheses.iter().find(|v| v.is_fail()) {
        let mut v = (*failed).clone();
        v.checker = "transfer".into();
        v.notes = format!("hypothesis {} fails: {}", failed_label(&hypotheses, failed), failed.notes);
        (None, v)
    } else {
        let set = solve_on(
            ProblemKind::Perturbed,
            &f1,
            &GridDomain::point_list(vec![x0.to_vec()])?,
            ys,
            cone,
            tol,
        )?;
        let conclusion = match set.refutations.first() {
            None => Verdict::pass("transfer_conclusion", ys.len() as u64, tol, "x0 solves the perturbed problem"),
            Some(r) => Verdict::fail(
                "transfer_conclusion",
                Counterexample::new().point("x0", &r.x).point("y", &r.y).value("f(x0,y)+g(x0,y)", &r.value),
                ys.len() as u64,
                tol,
                "hypotheses hold on the grid but x0 does not solve the perturbed problem",
            ),
        };
        let mut verdict = conclusion.clone();
        verdict.checker = "transfer".into();
        if verdict.status == Status::Pass {
            verdict.notes = "hypotheses hold at resolution and the conclusion is confirmed".into();
        }
        (Some(conclusion), verdict)
    };
    Ok(TransferReport {
        x0: x0.to_vec(),
        precondition,
        condition_i,
        condition_ii,
        condition_iii,
        conclusion,
        verdict,
    })
}

fn failed_label(all: &[&Verdict; 3], failed: &Verdict) -> &'static str {
    ["(i)", "(ii)", "(iii)"][all.iter().position(|v| std::ptr::eq(*v, failed)).unwrap_or(0)]
}

//! Brute-force solution engines over finite grids.
//!
//! A point `x` solves the primal problem when no grid `y` puts `F(x,y,x)` in
//! `-int C`, and the dual problem when no `y` puts `F(x,y,y)` there. Scans are
//! parallel over `x`; each refutation stores the first violating `y` in grid
//! order, so results do not depend on thread count.

mod perturbed;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cone::{PolyCone, Region};
use crate::conditions::{CheckError, CoercivityCertificate, Slice, Verdict};
use crate::expr::{fixture, FixtureError, FixtureId, FixtureParams, VExpr};
use crate::geometry::{GeometryError, GridDomain, GridMeta};
use crate::panel::{run_panel, PanelProblem, TheoremId};

pub(crate) use perturbed::perturbed;
pub use perturbed::{
    epsilon_equilibrium, solve_perturbed, transfer_theorem_5_2, PerturbationSpec, TransferReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("x0 = {x0:?} does not solve the g-problem: g(x0, {y:?}) = {value:?} lies in -int C")]
    NotADualSolution { x0: Vec<f64>, y: Vec<f64>, value: Vec<f64> },
    #[error("{0}")]
    Incompatible(String),
    #[error("bad perturbation: {0}")]
    BadPerturbation(String),
    #[error("unknown checker `{0}`")]
    UnknownChecker(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProblemKind {
    Primal,
    Dual,
    Perturbed,
    VviStampacchia,
    VviMinty,
}

impl ProblemKind {
    /// The slice whose values decide membership.
    pub fn slice(self) -> Slice {
        match self {
            ProblemKind::Primal | ProblemKind::Perturbed | ProblemKind::VviStampacchia => Slice::Primal,
            ProblemKind::Dual | ProblemKind::VviMinty => Slice::Dual,
        }
    }
}

/// A point `x`, the first `y` refuting it, and the value at `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refutation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionSet {
    pub problem: ProblemKind,
    pub solutions: Vec<Vec<f64>>,
    pub refutations: Vec<Refutation>,
    pub grid: GridMeta,
    pub tol: f64,
    /// Warnings such as a failed coercivity search.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl SolutionSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.solutions.iter().any(|s| s.as_slice() == x)
    }

    pub fn is_subset_of(&self, other: &SolutionSet) -> bool {
        self.solutions.iter().all(|s| other.contains(s))
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Re-evaluates every refutation (value must be in `-int C`) and every
    /// solution against `ys` (no value may be).
    pub fn replay(&self, f: &VExpr, ys: &[Vec<f64>], cone: &PolyCone) -> Result<bool, SolveError> {
        let slice = self.problem.slice();
        for r in &self.refutations {
            let v = slice.at(f, &r.x, &r.y)?;
            if v != r.value || !cone.member(&v, Region::InNegIntC, self.tol).map_err(CheckError::from)? {
                return Ok(false);
            }
        }
        for x in &self.solutions {
            for y in ys {
                let v = slice.at(f, x, y)?;
                if cone.member(&v, Region::InNegIntC, self.tol).map_err(CheckError::from)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Solves over `grid` with the `∀y` quantifier ranging over `ys`.
pub fn solve_on(
    kind: ProblemKind,
    f: &VExpr,
    grid: &GridDomain,
    ys: &[Vec<f64>],
    cone: &PolyCone,
    tol: f64,
) -> Result<SolutionSet, SolveError> {
    crate::conditions::check_grid(f, grid, cone)?;
    if let Some(y) = ys.iter().find(|y| y.len() != grid.dim()) {
        return Err(SolveError::Incompatible(format!(
            "y-grid point {y:?} has dimension {}, domain has {}",
            y.len(),
            grid.dim()
        )));
    }
    let slice = kind.slice();
    let verdicts: Vec<Option<Refutation>> = grid
        .points()
        .par_iter()
        .map(|x| -> Result<Option<Refutation>, CheckError> {
            for y in ys {
                let v = slice.at(f, x, y)?;
                if cone.member(&v, Region::InNegIntC, tol)? {
                    return Ok(Some(Refutation {
                        x: x.clone(),
                        y: y.clone(),
                        value: v,
                    }));
                }
            }
            Ok(None)
        })
        .collect::<Result<_, _>>()?;
    let mut solutions = Vec::new();
    let mut refutations = Vec::new();
    for (x, r) in grid.points().iter().zip(verdicts) {
        match r {
            Some(r) => refutations.push(r),
            None => solutions.push(x.clone()),
        }
    }
    Ok(SolutionSet {
        problem: kind,
        solutions,
        refutations,
        grid: grid.meta(),
        tol,
        flags: Vec::new(),
    })
}

/// `F(x,y,x) ∉ -int C` for every grid `y`.
pub fn solve_primal(f: &VExpr, grid: &GridDomain, cone: &PolyCone, tol: f64) -> Result<SolutionSet, SolveError> {
    solve_on(ProblemKind::Primal, f, grid, grid.points(), cone, tol)
}

/// `F(x,y,y) ∉ -int C` for every grid `y`.
pub fn solve_dual(f: &VExpr, grid: &GridDomain, cone: &PolyCone, tol: f64) -> Result<SolutionSet, SolveError> {
    solve_on(ProblemKind::Dual, f, grid, grid.points(), cone, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SetRelation {
    Equal,
    PrimalSubsetDual,
    DualSubsetPrimal,
    Incomparable,
}

impl SetRelation {
    pub fn of(primal: &SolutionSet, dual: &SolutionSet) -> SetRelation {
        match (primal.is_subset_of(dual), dual.is_subset_of(primal)) {
            (true, true) => SetRelation::Equal,
            (true, false) => SetRelation::PrimalSubsetDual,
            (false, true) => SetRelation::DualSubsetPrimal,
            (false, false) => SetRelation::Incomparable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub primal: SolutionSet,
    pub dual: SolutionSet,
    pub relation: SetRelation,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub panel: BTreeMap<String, Verdict>,
}

/// Both solution sets, their relation, and optionally the hypothesis panel
/// telling which inclusion is licensed.
pub fn compare_primal_dual(
    f: &VExpr,
    grid: &GridDomain,
    cone: &PolyCone,
    tol: f64,
    panel: bool,
) -> Result<CompareReport, SolveError> {
    let primal = solve_primal(f, grid, cone, tol)?;
    let dual = solve_dual(f, grid, cone, tol)?;
    let relation = SetRelation::of(&primal, &dual);
    let panel = if panel {
        run_panel(TheoremId::T30, &PanelProblem::trifunction(f, grid, cone, tol))?
    } else {
        BTreeMap::new()
    };
    Ok(CompareReport {
        primal,
        dual,
        relation,
        panel,
    })
}

/// Whether solutions found on `K0` remain solutions on the whole grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionReport {
    pub k0_points: usize,
    pub extended: Vec<Vec<f64>>,
    pub not_extended: Vec<Refutation>,
    pub all_extended: bool,
}

/// Solves on the certificate's `K0`, then re-checks each solution against
/// the full grid.
pub fn solve_truncated(
    f: &VExpr,
    grid: &GridDomain,
    certificate: &CoercivityCertificate,
    cone: &PolyCone,
    tol: f64,
) -> Result<(SolutionSet, ExtensionReport), SolveError> {
    let kind = match certificate.slice {
        Slice::Dual => ProblemKind::Dual,
        _ => ProblemKind::Primal,
    };
    if certificate.k0.iter().any(|p| grid.index_of(p).is_none()) {
        return Err(SolveError::Incompatible("certificate K0 is not a subset of the grid".into()));
    }
    let k0 = GridDomain::point_list(certificate.k0.clone())?;
    let on_k0 = solve_on(kind, f, &k0, k0.points(), cone, tol)?;
    let sub = GridDomain::point_list(on_k0.solutions.clone());
    let mut extended = Vec::new();
    let mut not_extended = Vec::new();
    if let Ok(sub) = sub {
        let full = solve_on(kind, f, &sub, grid.points(), cone, tol)?;
        extended = full.solutions;
        not_extended = full.refutations;
    }
    let report = ExtensionReport {
        k0_points: k0.len(),
        all_extended: not_extended.is_empty(),
        extended,
        not_extended,
    };
    Ok((on_k0, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VviKind {
    Stampacchia,
    Minty,
}

/// Weak vector variational inequality `⟨A(·), y - x⟩ ∉ -int C` for the affine
/// operator described by `params` (see [`FixtureId::VviAffine`]).
pub fn vvi(
    params: &FixtureParams,
    kind: VviKind,
    grid: &GridDomain,
    cone: &PolyCone,
    tol: f64,
) -> Result<SolutionSet, SolveError> {
    let f = fixture(FixtureId::VviAffine, params)?;
    let problem = match kind {
        VviKind::Stampacchia => ProblemKind::VviStampacchia,
        VviKind::Minty => ProblemKind::VviMinty,
    };
    solve_on(problem, &f, grid, grid.points(), cone, tol)
}

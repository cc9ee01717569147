//! Hypothesis panels: each theorem's assumption list mapped to checkers.
//!
//! Panel keys are `<roman numeral>.<checker>` so they sort in the theorem's
//! own order. Cubic scans run on a coarsened subgrid, noted in the verdict.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cone::PolyCone;
use crate::conditions::{
    all_pairs, check_c_convex, check_closedness, check_diagonal, check_essential_quasimonotone,
    check_explicit_quasiconvex, check_hemicontinuity, check_kkm, check_pseudomonotone, find_coercivity,
    CoercivityOutcome, CoercivityVariant, Counterexample, DiagonalMode, KkmForm, Slice, SubsetSampling, Verdict,
};
use crate::expr::VExpr;
use crate::geometry::{pair_weights, GridDomain, TSchedule};
use crate::solver::{solve_primal, transfer_theorem_5_2, SolveError};

pub type Panel = BTreeMap<String, Verdict>;

/// Points per axis for the cubic quasiconvexity scan.
pub const QUASICONVEX_AXIS_POINTS: usize = 5;
/// Points per axis for convexity scans.
pub const CONVEX_AXIS_POINTS: usize = 17;
/// Points per axis for pair and closedness scans.
pub const PAIR_AXIS_POINTS: usize = 65;
/// Depth of the neighbor sequences in the closedness scan.
pub const CLOSEDNESS_DEPTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    #[serde(rename = "t3.0")]
    T30,
    #[serde(rename = "t11")]
    T11,
    #[serde(rename = "t110")]
    T110,
    #[serde(rename = "t112")]
    T112,
    #[serde(rename = "t12")]
    T12,
    #[serde(rename = "t13")]
    T13,
    #[serde(rename = "t134")]
    T134,
    #[serde(rename = "t5.1")]
    T51,
    #[serde(rename = "t5.2")]
    T52,
    #[serde(rename = "t5.3")]
    T53,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::T30,
        TheoremId::T11,
        TheoremId::T110,
        TheoremId::T112,
        TheoremId::T12,
        TheoremId::T13,
        TheoremId::T134,
        TheoremId::T51,
        TheoremId::T52,
        TheoremId::T53,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::T30 => "t3.0",
            TheoremId::T11 => "t11",
            TheoremId::T110 => "t110",
            TheoremId::T112 => "t112",
            TheoremId::T12 => "t12",
            TheoremId::T13 => "t13",
            TheoremId::T134 => "t134",
            TheoremId::T51 => "t5.1",
            TheoremId::T52 => "t5.2",
            TheoremId::T53 => "t5.3",
        }
    }

    /// Panels stated for a pair of bifunctions `f`, `g`.
    pub fn needs_bifunctions(self) -> bool {
        matches!(self, TheoremId::T51 | TheoremId::T52 | TheoremId::T53)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|t| t.name()).collect();
                format!("unknown theorem id `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Everything a panel may need. Trifunction panels use `trifunction`, or
/// `f(z,y) + g(x,y)` when only bifunctions are given.
#[derive(Debug, Clone)]
pub struct PanelProblem<'a> {
    pub trifunction: Option<&'a VExpr>,
    pub f: Option<&'a VExpr>,
    pub g: Option<&'a VExpr>,
    pub grid: &'a GridDomain,
    pub cone: &'a PolyCone,
    pub tol: f64,
    pub tsched: TSchedule,
    pub sampling: SubsetSampling,
    /// Convexity weights `t`.
    pub weights: Vec<f64>,
    /// Candidate solution of the `g`-problem; the first grid solution is used
    /// when absent.
    pub x0: Option<Vec<f64>>,
}

impl<'a> PanelProblem<'a> {
    pub fn trifunction(f: &'a VExpr, grid: &'a GridDomain, cone: &'a PolyCone, tol: f64) -> Self {
        PanelProblem {
            trifunction: Some(f),
            f: None,
            g: None,
            grid,
            cone,
            tol,
            tsched: TSchedule::default(),
            sampling: SubsetSampling::default(),
            weights: pair_weights(7, 0),
            x0: None,
        }
    }

    pub fn bifunctions(f: &'a VExpr, g: &'a VExpr, grid: &'a GridDomain, cone: &'a PolyCone, tol: f64) -> Self {
        PanelProblem {
            trifunction: None,
            f: Some(f),
            g: Some(g),
            ..PanelProblem::trifunction(f, grid, cone, tol)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sampling.seed = seed;
        self.weights = pair_weights(7, seed);
        self
    }
}

/// Keeps at most `per_axis` points on each axis (dyadic strides when they
/// divide the axis, else evenly spaced indices).
pub fn coarsen(grid: &GridDomain, per_axis: usize) -> GridDomain {
    let per_axis = per_axis.max(2);
    let Some(shape) = grid.shape().map(|s| s.to_vec()) else {
        if grid.len() <= per_axis {
            return grid.clone();
        }
        let pts = spaced(grid.len(), per_axis)
            .into_iter()
            .map(|i| grid.points()[i].clone())
            .collect();
        return GridDomain::point_list(pts).expect("subset of a valid grid");
    };
    if shape.iter().all(|&s| s <= per_axis) {
        return grid.clone();
    }
    let keep: Vec<Vec<usize>> = shape
        .iter()
        .map(|&s| {
            if s <= per_axis {
                return (0..s).collect();
            }
            let mut stride = 1;
            while (s - 1) % (2 * stride) == 0 && (s - 1) / stride + 1 > per_axis {
                stride *= 2;
            }
            if (s - 1) / stride + 1 <= per_axis {
                (0..s).step_by(stride).collect()
            } else {
                spaced(s, per_axis)
            }
        })
        .collect();
    grid.sublattice(&keep).expect("indices within the lattice")
}

fn spaced(n: usize, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..k)
        .map(|i| ((i as f64) * (n - 1) as f64 / (k - 1) as f64).round() as usize)
        .collect();
    v.dedup();
    v
}

fn noted(mut v: Verdict, full: &GridDomain, used: &GridDomain) -> Verdict {
    if used.len() < full.len() {
        v.notes = format!("{} (on a {}-point subgrid of {})", v.notes, used.len(), full.len());
    }
    v
}

/// Summarizes a coercivity search as a verdict.
pub fn coercivity_verdict(outcome: CoercivityOutcome, tol: f64) -> Verdict {
    match outcome {
        CoercivityOutcome::Certified(c) => {
            let mut ev = Counterexample::new();
            if let Some(r) = c.r {
                ev = ev.value("r", &[r]);
            }
            if let Some((x, y0)) = c.assignments.first() {
                ev = ev.point("x", x).point("y0", y0);
            }
            Verdict::pass(
                &format!("coercivity_{}", c.variant.name().to_ascii_lowercase()),
                c.assignments.len() as u64,
                tol,
                format!(
                    "certificate found: |K0| = {}, {} witness assignment(s){}",
                    c.k0.len(),
                    c.assignments.len(),
                    c.r.map(|r| format!(", r = {r}")).unwrap_or_default()
                ),
            )
            .with_evidence(ev)
        }
        CoercivityOutcome::Failed(v) => v,
    }
}

fn trifunction_of(p: &PanelProblem) -> Result<VExpr, SolveError> {
    if let Some(t) = p.trifunction {
        return Ok(t.clone());
    }
    match (p.f, p.g) {
        (Some(f), Some(g)) => crate::solver::perturbed(f, g),
        (Some(f), None) => Ok(f.rename(|v| if v == crate::expr::Var::X { crate::expr::Var::Z } else { v })),
        _ => Err(SolveError::Incompatible("panel needs a trifunction or a bifunction f".into())),
    }
}

fn bifunctions_of<'a>(p: &PanelProblem<'a>, id: TheoremId) -> Result<(&'a VExpr, &'a VExpr), SolveError> {
    match (p.f, p.g) {
        (Some(f), Some(g)) => Ok((f, g)),
        _ => Err(SolveError::Incompatible(format!(
            "panel {id} is stated for bifunctions f and g"
        ))),
    }
}

/// Checkers shared by panels and `run_checker`, with their subgrids.
struct Runner<'p, 'a> {
    p: &'p PanelProblem<'a>,
    quasi: GridDomain,
    convex: GridDomain,
    pairs: GridDomain,
}

impl<'p, 'a> Runner<'p, 'a> {
    fn new(p: &'p PanelProblem<'a>) -> Self {
        Runner {
            p,
            quasi: coarsen(p.grid, QUASICONVEX_AXIS_POINTS),
            convex: coarsen(p.grid, CONVEX_AXIS_POINTS),
            pairs: coarsen(p.grid, PAIR_AXIS_POINTS),
        }
    }

    fn pseudomonotone(&self, f: &VExpr) -> Result<Verdict, SolveError> {
        Ok(check_pseudomonotone(f, self.p.grid, self.p.cone, self.p.tol)?)
    }

    fn closed(&self, f: &VExpr, slice: Slice) -> Result<Verdict, SolveError> {
        let v = check_closedness(f, slice, &self.pairs, CLOSEDNESS_DEPTH, self.p.cone, self.p.tol)?;
        Ok(noted(v, self.p.grid, &self.pairs))
    }

    fn c_convex(&self, f: &VExpr, slice: Slice) -> Result<Verdict, SolveError> {
        let v = check_c_convex(slice, f, &self.convex, self.p.cone, &self.p.weights, self.p.tol)?;
        Ok(noted(v, self.p.grid, &self.convex))
    }

    fn quasiconvex(&self, f: &VExpr) -> Result<Verdict, SolveError> {
        let v = check_explicit_quasiconvex(f, &self.quasi, &self.p.tsched, self.p.cone, self.p.tol)?;
        Ok(noted(v, self.p.grid, &self.quasi))
    }

    fn hemi(&self, f: &VExpr) -> Result<Verdict, SolveError> {
        let v = check_hemicontinuity(f, &all_pairs(&self.pairs), &self.p.tsched, self.p.cone, self.p.tol)?;
        Ok(noted(v, self.p.grid, &self.pairs))
    }

    fn diag(&self, f: &VExpr, mode: DiagonalMode) -> Result<Verdict, SolveError> {
        Ok(check_diagonal(f, self.p.grid, mode, self.p.cone, self.p.tol)?)
    }

    fn coercive(&self, f: &VExpr, slice: Slice, v: CoercivityVariant) -> Result<Verdict, SolveError> {
        let out = find_coercivity(f, slice, self.p.grid, v, None, self.p.cone, self.p.tol)?;
        Ok(coercivity_verdict(out, self.p.tol))
    }

    fn essential(&self, f: &VExpr) -> Result<Verdict, SolveError> {
        Ok(check_essential_quasimonotone(f, self.p.grid, self.p.cone, &self.p.sampling, self.p.tol)?)
    }

    fn kkm(&self, f: &VExpr, form: KkmForm) -> Result<Verdict, SolveError> {
        Ok(check_kkm(f, form, self.p.grid, &self.p.sampling, self.p.cone, self.p.tol)?)
    }
}

/// Checker names accepted by [`run_checker`]; `<mode>` and `<variant>` are
/// lowercase diagonal modes and coercivity variants.
pub const CHECKERS: [&str; 13] = [
    "pseudomonotone",
    "explicit_quasiconvex",
    "hemicontinuity",
    "closedness",
    "closedness_dual",
    "c_convex",
    "c_convex_dual",
    "essential_quasimonotone",
    "kkm",
    "kkm_dual",
    "diagonal_<mode>",
    "coercivity_<variant>",
    "coercivity_<variant>_dual",
];

/// Runs one checker by name on the problem's trifunction (`f` alone for
/// `essential_quasimonotone` when bifunctions are given).
pub fn run_checker(name: &str, p: &PanelProblem) -> Result<Verdict, SolveError> {
    let r = Runner::new(p);
    let f = trifunction_of(p)?;
    let unknown = || SolveError::UnknownChecker(name.to_string());
    match name {
        "pseudomonotone" => r.pseudomonotone(&f),
        "explicit_quasiconvex" => r.quasiconvex(&f),
        "hemicontinuity" => r.hemi(&f),
        "closedness" => r.closed(&f, Slice::Primal),
        "closedness_dual" => r.closed(&f, Slice::Dual),
        "c_convex" => r.c_convex(&f, Slice::Primal),
        "c_convex_dual" => r.c_convex(&f, Slice::Dual),
        "essential_quasimonotone" => r.essential(p.f.unwrap_or(&f)),
        "kkm" => r.kkm(&f, KkmForm::Primal),
        "kkm_dual" => r.kkm(&f, KkmForm::Dual),
        _ => {
            if let Some(mode) = name.strip_prefix("diagonal_") {
                return r.diag(&f, mode.parse().map_err(|_| unknown())?);
            }
            let rest = name.strip_prefix("coercivity_").ok_or_else(unknown)?;
            let (variant, slice) = match rest.strip_suffix("_dual") {
                Some(v) => (v, Slice::Dual),
                None => (rest, Slice::Primal),
            };
            r.coercive(&f, slice, variant.parse().map_err(|_| unknown())?)
        }
    }
}

/// Runs the named theorem's hypothesis panel.
pub fn run_panel(id: TheoremId, p: &PanelProblem) -> Result<Panel, SolveError> {
    let mut out = Panel::new();
    let (grid, cone, tol) = (p.grid, p.cone, p.tol);
    let r = Runner::new(p);

    match id {
        TheoremId::T30 => {
            let f = trifunction_of(p)?;
            out.insert("i.pseudomonotone".into(), r.pseudomonotone(&f)?);
            out.insert("ii.explicit_quasiconvex".into(), r.quasiconvex(&f)?);
            out.insert("ii.hemicontinuity".into(), r.hemi(&f)?);
            out.insert("ii.diagonal_offdiag_neg_c".into(), r.diag(&f, DiagonalMode::OffdiagNegC)?);
        }
        TheoremId::T11 | TheoremId::T110 | TheoremId::T12 | TheoremId::T13 | TheoremId::T134 => {
            let f = trifunction_of(p)?;
            let (mode, variant) = match id {
                TheoremId::T11 => (DiagonalMode::NotNegInt, CoercivityVariant::CompactSet),
                TheoremId::T110 => (DiagonalMode::NegCNotNegInt, CoercivityVariant::Core),
                TheoremId::T12 => (DiagonalMode::NegCNotNegInt, CoercivityVariant::BallLt),
                TheoremId::T13 => (DiagonalMode::NotNegInt, CoercivityVariant::BallLe),
                _ => (DiagonalMode::NegCNotNegInt, CoercivityVariant::Sphere),
            };
            out.insert("i.closedness".into(), r.closed(&f, Slice::Primal)?);
            out.insert("ii.c_convex".into(), r.c_convex(&f, Slice::Primal)?);
            out.insert(format!("iii.diagonal_{}", mode.name().to_ascii_lowercase()), r.diag(&f, mode)?);
            out.insert(
                format!("iv.coercivity_{}", variant.name().to_ascii_lowercase()),
                r.coercive(&f, Slice::Primal, variant)?,
            );
        }
        TheoremId::T112 => {
            let f = trifunction_of(p)?;
            out.insert("i.closedness_dual".into(), r.closed(&f, Slice::Dual)?);
            out.insert("ii.c_convex_dual".into(), r.c_convex(&f, Slice::Dual)?);
            out.insert("iii.diagonal_neg_c_not_neg_int".into(), r.diag(&f, DiagonalMode::NegCNotNegInt)?);
            out.insert("iii.diagonal_offdiag_neg_c".into(), r.diag(&f, DiagonalMode::OffdiagNegC)?);
            out.insert("iv.coercivity_core_dual".into(), r.coercive(&f, Slice::Dual, CoercivityVariant::Core)?);
            out.insert("v.explicit_quasiconvex".into(), r.quasiconvex(&f)?);
            out.insert("vi.hemicontinuity".into(), r.hemi(&f)?);
        }
        TheoremId::T51 => {
            let (f, g) = bifunctions_of(p, id)?;
            let f1 = crate::solver::perturbed(f, g)?;
            out.insert("i.closedness".into(), r.closed(&f1, Slice::Primal)?);
            out.insert("ii.c_convex_f".into(), r.c_convex(f, Slice::Raw)?);
            out.insert("ii.c_convex_g".into(), r.c_convex(g, Slice::Raw)?);
            out.insert("iii.diagonal_zero_f".into(), r.diag(f, DiagonalMode::Zero)?);
            out.insert("iii.diagonal_not_neg_int_g".into(), r.diag(g, DiagonalMode::NotNegInt)?);
            out.insert(
                "iv.coercivity_compact_set".into(),
                r.coercive(&f1, Slice::Primal, CoercivityVariant::CompactSet)?,
            );
        }
        TheoremId::T52 => {
            let (f, g) = bifunctions_of(p, id)?;
            let x0 = match &p.x0 {
                Some(x0) => x0.clone(),
                None => {
                    let sol = solve_primal(g, grid, cone, tol)?;
                    match sol.solutions.first() {
                        Some(x0) => x0.clone(),
                        None => {
                            let rf = &sol.refutations[0];
                            let c = Counterexample::new().point("x", &rf.x).point("y", &rf.y).value("g(x,y)", &rf.value);
                            out.insert(
                                "precondition.solves_g".into(),
                                Verdict::fail("solves_g", c, grid.len() as u64, tol, "the g-problem has no grid solution"),
                            );
                            return Ok(out);
                        }
                    }
                }
            };
            match transfer_theorem_5_2(f, g, &x0, grid, &p.tsched, cone, tol) {
                Ok(rep) => {
                    out.insert("precondition.solves_g".into(), rep.precondition);
                    out.insert("i.gap".into(), rep.condition_i);
                    out.insert("ii.hemicontinuity".into(), rep.condition_ii);
                    out.insert("iii.diagonal_zero_f".into(), rep.condition_iii);
                    if let Some(c) = rep.conclusion {
                        out.insert("z.conclusion".into(), c);
                    }
                }
                Err(SolveError::NotADualSolution { x0, y, value }) => {
                    let c = Counterexample::new().point("x0", &x0).point("y", &y).value("g(x0,y)", &value);
                    out.insert(
                        "precondition.solves_g".into(),
                        Verdict::fail("solves_g", c, grid.len() as u64, tol, "x0 does not solve the g-problem"),
                    );
                }
                Err(e) => return Err(e),
            }
        }
        TheoremId::T53 => {
            let (f, g) = bifunctions_of(p, id)?;
            let f1 = crate::solver::perturbed(f, g)?;
            let outcome = find_coercivity(&f1, Slice::Primal, grid, CoercivityVariant::Core, None, cone, tol)?;
            let k0 = match outcome.certificate() {
                Some(c) => GridDomain::point_list(c.k0.clone())?,
                None => grid.clone(),
            };
            out.insert("i.coercivity_core".into(), coercivity_verdict(outcome, tol));
            let k0_pairs = coarsen(&k0, PAIR_AXIS_POINTS);
            out.insert(
                "ii.closedness".into(),
                noted(check_closedness(&f1, Slice::Primal, &k0_pairs, CLOSEDNESS_DEPTH, cone, tol)?, &k0, &k0_pairs),
            );
            out.insert(
                "iii.essential_quasimonotone".into(),
                check_essential_quasimonotone(f, &k0, cone, &p.sampling, tol)?,
            );
            out.insert("iv.c_convex_f".into(), r.c_convex(f, Slice::Raw)?);
            out.insert("iv.c_convex_g".into(), r.c_convex(g, Slice::Raw)?);
            out.insert(
                "v.diagonal_neg_c_not_neg_int_f".into(),
                check_diagonal(f, &k0, DiagonalMode::NegCNotNegInt, cone, tol)?,
            );
            out.insert("v.diagonal_zero_g".into(), check_diagonal(g, &k0, DiagonalMode::Zero, cone, tol)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::Status;
    use crate::expr::{fixture, FixtureId, FixtureParams};

    const TOL: f64 = 1e-9;

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.name().parse::<TheoremId>().unwrap(), t);
        }
        assert!("t9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn coarsening_prefers_dyadic_strides() {
        let g = GridDomain::box_grid(&[-1.0], &[1.0], 1.0 / 400.0).unwrap();
        let c = coarsen(&g, 5);
        let xs: Vec<f64> = c.points().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g = GridDomain::box_grid(&[0.0, 0.0], &[1.0, 1.0], 0.125).unwrap();
        assert_eq!(coarsen(&g, 3).len(), 9);
        let g = GridDomain::box_grid(&[0.0], &[1.0], 0.1).unwrap();
        assert_eq!(coarsen(&g, 5).len(), 5);
    }

    #[test]
    fn ex31_panel() {
        let f = fixture(FixtureId::Ex31F, &FixtureParams::new()).unwrap();
        let grid = GridDomain::box_grid(&[-1.0], &[1.0], 1.0 / 8.0).unwrap();
        let cone = PolyCone::orthant(2);
        let panel = run_panel(TheoremId::T30, &PanelProblem::trifunction(&f, &grid, &cone, TOL)).unwrap();
        assert_eq!(panel.len(), 4);
        let q = &panel["ii.explicit_quasiconvex"];
        assert_eq!(q.status, Status::Fail);
        let c = q.counterexample.as_ref().unwrap();
        assert_eq!((c.p("x")[0], c.p("y")[0], c.p("z")[0]), (-1.0, -0.5, 0.5));
        assert_eq!(panel["ii.hemicontinuity"].status, Status::ConsistentAtResolution);
        assert_eq!(panel["ii.diagonal_offdiag_neg_c"].status, Status::Pass);
    }

    #[test]
    fn named_checkers() {
        let f = fixture(FixtureId::Ex31F, &FixtureParams::new()).unwrap();
        let grid = GridDomain::box_grid(&[-1.0], &[1.0], 1.0 / 400.0).unwrap();
        let cone = PolyCone::orthant(2);
        let p = PanelProblem::trifunction(&f, &grid, &cone, TOL);
        let q = run_checker("explicit_quasiconvex", &p).unwrap();
        let c = q.counterexample.as_ref().unwrap();
        assert_eq!((c.p("x")[0], c.p("y")[0], c.p("z")[0]), (-1.0, -0.5, 0.5));
        assert_eq!(run_checker("hemicontinuity", &p).unwrap().status, Status::ConsistentAtResolution);
        assert_eq!(run_checker("diagonal_offdiag_neg_c", &p).unwrap().status, Status::Pass);
        assert!(run_checker("coercivity_ball_lt_dual", &p).is_ok());
        for bad in ["nope", "diagonal_x", "coercivity_round"] {
            assert_eq!(run_checker(bad, &p), Err(SolveError::UnknownChecker(bad.into())));
        }
    }

    #[test]
    fn bifunction_panels_need_bifunctions() {
        let f = VExpr::parse("y1 - x1").unwrap();
        let grid = GridDomain::box_grid(&[0.0], &[1.0], 0.25).unwrap();
        let cone = PolyCone::orthant(1);
        assert!(run_panel(TheoremId::T51, &PanelProblem::trifunction(&f, &grid, &cone, TOL)).is_err());
        let g = VExpr::parse("0").unwrap();
        let p = PanelProblem::bifunctions(&f, &g, &grid, &cone, TOL);
        for id in [TheoremId::T51, TheoremId::T52, TheoremId::T53] {
            let panel = run_panel(id, &p).unwrap();
            assert!(!panel.is_empty());
        }
        let panel = run_panel(TheoremId::T53, &p).unwrap();
        assert_eq!(panel["iii.essential_quasimonotone"].status, Status::Pass);
    }

    #[test]
    fn existence_panels_run() {
        let f = VExpr::parse("y1 - x1").unwrap();
        let grid = GridDomain::box_grid(&[0.0], &[2.0], 0.25).unwrap();
        let cone = PolyCone::orthant(1);
        let p = PanelProblem::trifunction(&f, &grid, &cone, TOL);
        for id in [TheoremId::T11, TheoremId::T110, TheoremId::T112, TheoremId::T12, TheoremId::T13, TheoremId::T134] {
            let panel = run_panel(id, &p).unwrap();
            assert!(panel.values().all(|v| v.is_ok()), "{id}: {panel:?}");
        }
    }
}

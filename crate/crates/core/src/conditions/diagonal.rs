//! Diagonal conditions.

use serde::Serialize;

use crate::cone::{PolyCone, Region};
use crate::expr::VExpr;
use crate::geometry::GridDomain;

use super::{check_grid, eval, first_hit, is_in, CheckError, Counterexample, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagonalMode {
    /// `F(x,x,x) ∉ -int C`.
    NotNegInt,
    /// `F(x,x,x) ∈ -C \ -int C`.
    NegCNotNegInt,
    /// `f(x,x) = 0` within tolerance.
    Zero,
    /// `F(x,x,y) ∈ -C` for `x ≠ y`.
    OffdiagNegC,
    /// `g(x,x) ∈ C`.
    InC,
}

impl DiagonalMode {
    pub fn name(self) -> &'static str {
        match self {
            DiagonalMode::NotNegInt => "NOT_NEG_INT",
            DiagonalMode::NegCNotNegInt => "NEG_C_NOT_NEG_INT",
            DiagonalMode::Zero => "ZERO",
            DiagonalMode::OffdiagNegC => "OFFDIAG_NEG_C",
            DiagonalMode::InC => "IN_C",
        }
    }

    fn holds(self, v: &[f64], cone: &PolyCone, tol: f64) -> bool {
        match self {
            DiagonalMode::NotNegInt => !is_in(cone, v, Region::InNegIntC, tol),
            DiagonalMode::NegCNotNegInt => {
                is_in(cone, v, Region::InNegC, tol) && !is_in(cone, v, Region::InNegIntC, tol)
            }
            DiagonalMode::Zero => v.iter().all(|c| c.abs() <= tol),
            DiagonalMode::OffdiagNegC => is_in(cone, v, Region::InNegC, tol),
            DiagonalMode::InC => is_in(cone, v, Region::InC, tol),
        }
    }
}

impl std::str::FromStr for DiagonalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            DiagonalMode::NotNegInt,
            DiagonalMode::NegCNotNegInt,
            DiagonalMode::Zero,
            DiagonalMode::OffdiagNegC,
            DiagonalMode::InC,
        ]
        .into_iter()
        .find(|m| m.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown diagonal mode `{s}`"))
    }
}

/// Mode test at one point (`y` is only used by [`DiagonalMode::OffdiagNegC`]).
pub fn diagonal_violation(
    f: &VExpr,
    mode: DiagonalMode,
    x: &[f64],
    y: &[f64],
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    let (v, label) = match mode {
        DiagonalMode::OffdiagNegC => (eval(f, x, x, y)?, "F(x,x,y)"),
        _ => (eval(f, x, x, x)?, "F(x,x,x)"),
    };
    if mode.holds(&v, cone, tol) {
        return Ok(None);
    }
    let mut c = Counterexample::new().point("x", x).value(label, &v);
    if mode == DiagonalMode::OffdiagNegC {
        c = c.point("y", y);
    }
    Ok(Some(c))
}

pub fn check_diagonal(
    f: &VExpr,
    grid: &GridDomain,
    mode: DiagonalMode,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    let name = format!("diagonal_{}", mode.name().to_ascii_lowercase());
    check_grid(f, grid, cone)?;
    let pts = grid.points();
    let n = pts.len();
    let (hit, per) = if mode == DiagonalMode::OffdiagNegC {
        let hit = first_hit(n, |i| {
            for y in pts.iter().filter(|y| **y != pts[i]) {
                if let Some(c) = diagonal_violation(f, mode, &pts[i], y, cone, tol)? {
                    return Ok(Some(c));
                }
            }
            Ok(None)
        })?;
        (hit, n.saturating_sub(1) as u64)
    } else {
        (first_hit(n, |i| diagonal_violation(f, mode, &pts[i], &pts[i], cone, tol))?, 1)
    };
    Ok(match hit {
        Some((i, c)) => Verdict::fail(
            &name,
            c,
            (i as u64 + 1) * per,
            tol,
            format!("{} fails", mode.name()),
        ),
        None => Verdict::pass(&name, n as u64 * per, tol, format!("{} holds on the grid", mode.name())),
    })
}

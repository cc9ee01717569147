//! Pseudomonotonicity, explicit quasiconvexity and hemicontinuity.

use crate::cone::{PolyCone, Region};
use crate::expr::VExpr;
use crate::geometry::{GridDomain, TSchedule};
use crate::vector::{lerp, sub};

use super::{check_grid, eval, first_hit, is_in, CheckError, Counterexample, Verdict};

/// `F(x,y,x) ∉ -int C` but `F(x,y,y) ∈ -int C`: a pseudomonotonicity violation.
pub fn pseudomonotone_violation(
    f: &VExpr,
    x: &[f64],
    y: &[f64],
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    let at_x = eval(f, x, y, x)?;
    if is_in(cone, &at_x, Region::InNegIntC, tol) {
        return Ok(None);
    }
    let at_y = eval(f, x, y, y)?;
    if !is_in(cone, &at_y, Region::InNegIntC, tol) {
        return Ok(None);
    }
    Ok(Some(
        Counterexample::new()
            .point("x", x)
            .point("y", y)
            .value("F(x,y,x)", &at_x)
            .value("F(x,y,y)", &at_y),
    ))
}

/// Weak C-pseudomonotonicity in the third variable over every ordered pair.
pub fn check_pseudomonotone(f: &VExpr, grid: &GridDomain, cone: &PolyCone, tol: f64) -> Result<Verdict, CheckError> {
    const NAME: &str = "pseudomonotone";
    check_grid(f, grid, cone)?;
    let pts = grid.points();
    let n = pts.len();
    let hit = first_hit(n, |i| {
        for y in pts {
            if let Some(c) = pseudomonotone_violation(f, &pts[i], y, cone, tol)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    })?;
    let total = (n * n) as u64;
    Ok(match hit {
        Some((i, c)) => Verdict::fail(
            NAME,
            c,
            ((i + 1) * n) as u64,
            tol,
            "F(x,y,x) avoids -int C while F(x,y,y) lies in it",
        ),
        None => Verdict::pass(NAME, total, tol, "all ordered grid pairs satisfy the implication"),
    })
}

/// Both quasiconvexity differences avoid `-int C` at `(x, y, z, t)`.
pub fn explicit_quasiconvex_violation(
    f: &VExpr,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    t: f64,
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    let p = lerp(x, y, t);
    let mid = eval(f, x, &p, z)?;
    let d1 = sub(&mid, &eval(f, x, x, z)?);
    if is_in(cone, &d1, Region::InNegIntC, tol) {
        return Ok(None);
    }
    let d2 = sub(&mid, &eval(f, x, y, z)?);
    if is_in(cone, &d2, Region::InNegIntC, tol) {
        return Ok(None);
    }
    Ok(Some(
        Counterexample::new()
            .point("x", x)
            .point("y", y)
            .point("z", z)
            .point("t", &[t])
            .value("F(x,p,z)-F(x,x,z)", &d1)
            .value("F(x,p,z)-F(x,y,z)", &d2),
    ))
}

/// Weak explicit C-quasiconvexity in the second variable over grid³ (`x ≠ y`)
/// and the schedule's values in `(0, 1)`. Cost is cubic in the grid size.
pub fn check_explicit_quasiconvex(
    f: &VExpr,
    grid: &GridDomain,
    tsched: &TSchedule,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    check_grid(f, grid, cone)?;
    let pts = grid.points();
    let n = pts.len();
    let ts: Vec<f64> = tsched.open_values().collect();
    let per_x = (n.saturating_sub(1) * n * ts.len()) as u64;
    let hit = first_hit(n, |i| {
        let x = &pts[i];
        for y in pts.iter().filter(|y| *y != x) {
            for z in pts {
                for &t in &ts {
                    if let Some(c) = explicit_quasiconvex_violation(f, x, y, z, t, cone, tol)? {
                        return Ok(Some(c));
                    }
                }
            }
        }
        Ok(None)
    })?;
    Ok(verdict_for_quasiconvex(hit, per_x, n as u64 * per_x, tol))
}

/// The same check restricted to explicit `(x, y, z)` triples.
pub fn check_explicit_quasiconvex_at(
    f: &VExpr,
    triples: &[[Vec<f64>; 3]],
    tsched: &TSchedule,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    if let Some([x, ..]) = triples.first() {
        super::check_shapes(f, x.len(), cone)?;
    }
    let ts: Vec<f64> = tsched.open_values().collect();
    let hit = first_hit(triples.len(), |i| {
        let [x, y, z] = &triples[i];
        if x == y {
            return Ok(None);
        }
        for &t in &ts {
            if let Some(c) = explicit_quasiconvex_violation(f, x, y, z, t, cone, tol)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    })?;
    let per = ts.len() as u64;
    Ok(verdict_for_quasiconvex(hit, per, per * triples.len() as u64, tol))
}

fn verdict_for_quasiconvex(hit: Option<(usize, Counterexample)>, per: u64, total: u64, tol: f64) -> Verdict {
    const NAME: &str = "explicit_quasiconvex";
    match hit {
        Some((i, c)) => Verdict::fail(
            NAME,
            c,
            (i as u64 + 1) * per,
            tol,
            "neither difference lies in -int C",
        ),
        None => Verdict::pass(NAME, total, tol, "one difference lies in -int C for every sampled (x,y,z,t)"),
    }
}

/// Every ordered pair of distinct grid points.
pub fn all_pairs(grid: &GridDomain) -> Vec<(Vec<f64>, Vec<f64>)> {
    let pts = grid.points();
    let mut out = Vec::with_capacity(pts.len() * pts.len().saturating_sub(1));
    for x in pts {
        for y in pts {
            if x != y {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// Antecedent holds on every sampled `t` while `F(x,y,x) ∈ -int C`.
pub fn hemicontinuity_violation(
    f: &VExpr,
    x: &[f64],
    y: &[f64],
    tsched: &TSchedule,
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    if x == y {
        return Ok(None);
    }
    for &t in tsched.values() {
        let v = eval(f, x, y, &lerp(x, y, t))?;
        if is_in(cone, &v, Region::InNegIntC, tol) {
            return Ok(None);
        }
    }
    let end = eval(f, x, y, x)?;
    if !is_in(cone, &end, Region::InNegIntC, tol) {
        return Ok(None);
    }
    let t_min = *tsched.values().last().expect("schedule nonempty");
    Ok(Some(
        Counterexample::new()
            .point("x", x)
            .point("y", y)
            .point("t_min", &[t_min])
            .value("F(x,y,x)", &end),
    ))
}

/// Weak C-hemicontinuity in the third variable, sampled along the schedule.
pub fn check_hemicontinuity(
    f: &VExpr,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tsched: &TSchedule,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "hemicontinuity";
    if let Some((x, _)) = pairs.first() {
        super::check_shapes(f, x.len(), cone)?;
    }
    let hit = first_hit(pairs.len(), |i| {
        let (x, y) = &pairs[i];
        hemicontinuity_violation(f, x, y, tsched, cone, tol)
    })?;
    let per = tsched.values().len() as u64 + 1;
    Ok(match hit {
        Some((i, c)) => Verdict::fail(
            NAME,
            c,
            (i as u64 + 1) * per,
            tol,
            "F(x,y,(1-t)x+ty) avoids -int C for every sampled t but F(x,y,x) lies in it",
        ),
        None => Verdict::consistent(
            NAME,
            per * pairs.len() as u64,
            tol,
            format!(
                "no violation down to t = {:e}; a finite schedule cannot certify the limit",
                tsched.values().last().unwrap()
            ),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::Status;
    use crate::expr::{fixture, FixtureId, FixtureParams};

    const TOL: f64 = 1e-9;

    fn unit(step: f64) -> GridDomain {
        GridDomain::box_grid(&[0.0], &[1.0], step).unwrap()
    }

    fn ex31() -> VExpr {
        fixture(FixtureId::Ex31F, &FixtureParams::new()).unwrap()
    }

    #[test]
    fn z_free_function_is_pseudomonotone() {
        let f = VExpr::parse("y1 - x1").unwrap();
        let v = check_pseudomonotone(&f, &unit(0.25), &PolyCone::orthant(1), TOL).unwrap();
        assert_eq!(v.status, Status::Pass);
        assert_eq!(v.checked_count, 25);
    }

    #[test]
    fn ex31_pseudomonotone_matches_brute_force() {
        let f = ex31();
        let grid = GridDomain::box_grid(&[-1.0], &[1.0], 0.25).unwrap();
        let cone = PolyCone::orthant(2);
        // Independent scan in plain arithmetic (both components are equal).
        let fs = |x: f64| {
            if x <= -0.5 {
                -2.0 * x - 1.0
            } else if x <= 0.0 {
                2.0 * x + 1.0
            } else {
                -2.0 * x + 1.0
            }
        };
        let gs = |x: f64| if x <= 0.5 { -2.0 * x / 3.0 + 1.0 / 3.0 } else { -2.0 * x + 1.0 };
        let mut first = None;
        'outer: for x in grid.points() {
            for y in grid.points() {
                let a = (fs(y[0]) - fs(x[0])) * gs(x[0]);
                let b = (fs(y[0]) - fs(x[0])) * gs(y[0]);
                if a >= -TOL && b < -TOL {
                    first = Some((x[0], y[0]));
                    break 'outer;
                }
            }
        }
        let v = check_pseudomonotone(&f, &grid, &cone, TOL).unwrap();
        match first {
            Some((x, y)) => {
                assert_eq!(v.status, Status::Fail);
                let c = v.counterexample.unwrap();
                assert_eq!((c.p("x")[0], c.p("y")[0]), (x, y));
            }
            None => assert_eq!(v.status, Status::Pass),
        }
    }

    #[test]
    fn monotone_vvi_is_pseudomonotone() {
        let f = VExpr::parse("z1 * (y1 - x1)").unwrap();
        let grid = unit(0.25);
        // Oracle: x(y - x) >= 0 implies y(y - x) >= 0 since y(y-x) - x(y-x) = (y-x)^2.
        for x in grid.points() {
            for y in grid.points() {
                let (x, y) = (x[0], y[0]);
                assert!(!(x * (y - x) >= 0.0 && y * (y - x) < 0.0));
            }
        }
        let v = check_pseudomonotone(&f, &grid, &PolyCone::orthant(1), TOL).unwrap();
        assert_eq!(v.status, Status::Pass);
    }

    #[test]
    fn ex31_quasiconvexity_fails_at_paper_triple() {
        let f = ex31();
        let s = TSchedule::default();
        let triple = [vec![-1.0], vec![-0.5], vec![0.5]];
        let v = check_explicit_quasiconvex_at(&f, &[triple], &s, &PolyCone::orthant(2), TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        let c = v.counterexample.unwrap();
        assert_eq!(c.v("F(x,p,z)-F(x,x,z)"), &[0.0, 0.0]);
        assert_eq!(c.v("F(x,p,z)-F(x,y,z)"), &[0.0, 0.0]);
        // On the half-step grid the lexicographic scan meets the same triple first.
        let grid = GridDomain::box_grid(&[-1.0], &[1.0], 0.5).unwrap();
        let v = check_explicit_quasiconvex(&f, &grid, &s, &PolyCone::orthant(2), TOL).unwrap();
        let c = v.counterexample.unwrap();
        assert_eq!((c.p("x")[0], c.p("y")[0], c.p("z")[0]), (-1.0, -0.5, 0.5));
    }

    #[test]
    fn linear_bifunction_second_difference_is_negative() {
        let f = VExpr::parse("y1 - x1").unwrap();
        let s = TSchedule::default();
        let cone = PolyCone::orthant(1);
        // x < y: difference two equals (1 - t)(x - y) < 0.
        for (x, y) in [(0.0, 1.0), (0.25, 0.5)] {
            assert!(explicit_quasiconvex_violation(&f, &[x], &[y], &[0.0], 0.5, &cone, TOL)
                .unwrap()
                .is_none());
        }
        let zero = VExpr::parse("0").unwrap();
        let v = check_explicit_quasiconvex(&zero, &unit(0.5), &s, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.counterexample.unwrap().p("x"), &[0.0]);
    }

    #[test]
    fn ex31_is_hemicontinuous_at_resolution() {
        let grid = GridDomain::box_grid(&[-1.0], &[1.0], 0.25).unwrap();
        let v = check_hemicontinuity(&ex31(), &all_pairs(&grid), &TSchedule::default(), &PolyCone::orthant(2), TOL)
            .unwrap();
        assert_eq!(v.status, Status::ConsistentAtResolution);
    }

    #[test]
    fn jump_at_segment_start_is_caught() {
        let cone = PolyCone::orthant(1);
        let s = TSchedule::default();
        // Hand evaluation: z = t > 0 gives 1, z = x = 0 gives -1.
        let f = VExpr::parse("piecewise{ if z1 > x1 : 1 ; else : -1 }").unwrap();
        let v = check_hemicontinuity(&f, &[(vec![0.0], vec![1.0])], &s, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        // A jump at z = x + 0.001 breaks the antecedent first.
        let f = VExpr::parse("piecewise{ if z1 >= x1 + 0.001 : 1 ; else : -1 }").unwrap();
        let v = check_hemicontinuity(&f, &[(vec![0.0], vec![1.0])], &s, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::ConsistentAtResolution);
        let one = VExpr::parse("1").unwrap();
        let v = check_hemicontinuity(&one, &all_pairs(&unit(0.25)), &s, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::ConsistentAtResolution);
    }
}

//! Closedness of `G(y)` and its witness-level conditions.

use crate::cone::{PolyCone, Region};
use crate::expr::VExpr;
use crate::geometry::{GridDomain, WitnessSequence};
use crate::vector::{add, dist, lerp, sub};

use super::{check_grid, check_shapes, first_hit, is_in, CheckError, Counterexample, Slice, Verdict};

/// Verifies a user-supplied witness net for the closedness condition at `y`.
///
/// The witnesses carry their own declared gap: `‖z_N - z‖` must be at most
/// that gap plus `10·tol`, and the distances must be nonincreasing.
pub fn verify_condition_c_witness(
    f: &VExpr,
    slice: Slice,
    y: &[f64],
    seq: &WitnessSequence,
    witnesses: &WitnessSequence,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "condition_c_witness";
    if seq.len() != witnesses.len() {
        return Err(CheckError::LengthMismatch(format!(
            "{} sequence terms but {} witnesses",
            seq.len(),
            witnesses.len()
        )));
    }
    check_shapes(f, seq.limit().len(), cone)?;
    if witnesses.limit().len() != cone.dim() {
        return Err(CheckError::LengthMismatch(format!(
            "witness limit has {} components, cone has {}",
            witnesses.limit().len(),
            cone.dim()
        )));
    }
    let z = witnesses.limit();
    let mut checked = 0u64;
    for (k, (x_k, z_k)) in seq.points().iter().zip(witnesses.points()).enumerate() {
        checked += 1;
        let m = slice.at(f, x_k, y)?;
        let d = sub(&m, z_k);
        if !is_in(cone, &d, Region::InNegC, tol) {
            let c = Counterexample::new()
                .point("x_k", x_k)
                .point("y", y)
                .point("k", &[(k + 1) as f64])
                .value("z_k", z_k)
                .value("M(x_k)-z_k", &d);
            return Ok(Verdict::fail(NAME, c, checked, tol, "M(x_k) - z_k is not in -C"));
        }
    }
    let gaps: Vec<f64> = witnesses.points().iter().map(|z_k| dist(z_k, z)).collect();
    if let Some(k) = gaps.windows(2).position(|w| w[1] > w[0] + tol) {
        let c = Counterexample::new()
            .point("k", &[(k + 2) as f64])
            .value("z_k", &witnesses.points()[k + 1])
            .value("z", z);
        return Ok(Verdict::fail(NAME, c, checked, tol, "witness distance to z increases"));
    }
    let last = *gaps.last().expect("at least five witnesses");
    if last > witnesses.gap() + 10.0 * tol {
        let c = Counterexample::new()
            .value("z_N", witnesses.points().last().unwrap())
            .value("z", z)
            .value("distance", &[last]);
        return Ok(Verdict::fail(NAME, c, checked, tol, "witnesses do not reach z within the declared gap"));
    }
    checked += 1;
    let m = slice.at(f, seq.limit(), y)?;
    let d = sub(&m, z);
    if !is_in(cone, &d, Region::InC, tol) {
        let c = Counterexample::new()
            .point("x", seq.limit())
            .point("y", y)
            .value("z", z)
            .value("M(x)-z", &d);
        return Ok(Verdict::fail(NAME, c, checked, tol, "M(x) - z is not in C"));
    }
    Ok(Verdict::pass(
        NAME,
        checked,
        tol,
        format!("witnesses end {last:e} from z (declared gap {:e})", witnesses.gap()),
    ))
}

/// Witnesses `z_k = M(x_k)`, `z = M(x)`, with the gap taken from the data.
pub fn auto_witness(f: &VExpr, slice: Slice, y: &[f64], seq: &WitnessSequence) -> Result<WitnessSequence, CheckError> {
    let zs = seq
        .points()
        .iter()
        .map(|x_k| slice.at(f, x_k, y))
        .collect::<Result<Vec<_>, _>>()?;
    let z = slice.at(f, seq.limit(), y)?;
    let gap = zs.last().map_or(0.0, |z_n| dist(z_n, &z));
    Ok(WitnessSequence::new(zs, z, gap)?)
}

/// Largest `‖M(a) - M(b)‖` over adjacent grid points, for fixed `y`.
pub fn max_adjacent_jump(f: &VExpr, slice: Slice, y: &[f64], grid: &GridDomain) -> Result<f64, CheckError> {
    let vals = grid
        .points()
        .iter()
        .map(|x| slice.at(f, x, y))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = 0.0f64;
    for i in 0..grid.len() {
        for j in grid.neighbors(i) {
            best = best.max(dist(&vals[i], &vals[j]));
        }
    }
    Ok(best)
}

/// Confirms a certificate `(c, probe)` showing the slice is not C-upper
/// semicontinuous at `x`: `c ∈ int C` and `M(probe) ∉ M(x) + c - int C`.
pub fn check_usc_violation(
    f: &VExpr,
    slice: Slice,
    y: &[f64],
    x: &[f64],
    c: &[f64],
    probe: &[f64],
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "usc_violation";
    check_shapes(f, x.len(), cone)?;
    if c.len() != cone.dim() {
        return Err(CheckError::LengthMismatch(format!(
            "certificate direction has {} components, cone has {}",
            c.len(),
            cone.dim()
        )));
    }
    if !is_in(cone, c, Region::InIntC, tol) {
        let ce = Counterexample::new().value("c", c);
        return Ok(Verdict::fail(NAME, ce, 1, tol, "certificate direction not interior"));
    }
    let diff = add(c, &sub(&slice.at(f, x, y)?, &slice.at(f, probe, y)?));
    let ce = Counterexample::new()
        .point("x", x)
        .point("y", y)
        .point("probe", probe)
        .value("c", c)
        .value("c+M(x)-M(probe)", &diff);
    if is_in(cone, &diff, Region::InIntC, tol) {
        return Ok(Verdict::fail(
            NAME,
            ce,
            2,
            tol,
            "c + M(x) - M(probe) is interior, so the probe does not witness a violation",
        ));
    }
    Ok(Verdict::pass(NAME, 2, tol, "violation confirmed").with_evidence(ce))
}

/// Scans for closedness violations of `G(y) = {x : M_y(x) ∉ -int C}`.
///
/// For each grid point `x` and each grid neighbor `n`, the sequence
/// `x + (n - x)/2^k` approaches `x`; if its tail lies in `G(y)` while `x`
/// does not, the level set is not closed. Absence of such a tail is only
/// evidence, so success is reported as CONSISTENT_AT_RESOLUTION.
pub fn check_closedness(
    f: &VExpr,
    slice: Slice,
    grid: &GridDomain,
    depth: usize,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "closedness";
    check_grid(f, grid, cone)?;
    if depth < 2 {
        return Err(CheckError::InvalidArgument("closedness depth must be at least 2".into()));
    }
    let pts = grid.points();
    let n = pts.len();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|i| grid.neighbors(i)).collect();
    let per_y: u64 = nbrs.iter().map(|v| (v.len() * depth) as u64 + 1).sum();
    let hit = first_hit(n, |iy| {
        let y = &pts[iy];
        for (ix, x) in pts.iter().enumerate() {
            let at_x = slice.at(f, x, y)?;
            if !is_in(cone, &at_x, Region::InNegIntC, tol) {
                continue;
            }
            for &j in &nbrs[ix] {
                let mut tail_in_g = true;
                let mut last = Vec::new();
                for k in (depth / 2)..=depth {
                    let x_k = lerp(x, &pts[j], 0.5f64.powi(k as i32));
                    let m = slice.at(f, &x_k, y)?;
                    if is_in(cone, &m, Region::InNegIntC, tol) {
                        tail_in_g = false;
                        break;
                    }
                    last = x_k;
                }
                if tail_in_g {
                    return Ok(Some(
                        Counterexample::new()
                            .point("y", y)
                            .point("x", x)
                            .point("x_k", &last)
                            .value("M(x_k)", &slice.at(f, &last, y)?)
                            .value("M(x)", &at_x),
                    ));
                }
            }
        }
        Ok(None)
    })?;
    Ok(match hit {
        Some((i, c)) => Verdict::fail(
            NAME,
            c,
            (i as u64 + 1) * per_y,
            tol,
            "a sequence inside G(y) converges to a point outside G(y)",
        ),
        None => Verdict::consistent(
            NAME,
            n as u64 * per_y,
            tol,
            format!("no escaping sequence found with neighbor sequences down to 2^-{depth}"),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::Status;
    use crate::expr::{fixture, FixtureId, FixtureParams};

    const TOL: f64 = 1e-9;

    fn abs_cone() -> PolyCone {
        PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]], "abs").unwrap()
    }

    fn ex32() -> VExpr {
        fixture(FixtureId::Ex32F, &FixtureParams::new()).unwrap()
    }

    fn ex32_sequence() -> WitnessSequence {
        let pts = (1..=10)
            .map(|k| vec![0.5 + (-1f64).powi(k) / 2f64.powi(k + 2)])
            .collect();
        WitnessSequence::converging(pts, vec![0.5]).unwrap()
    }

    #[test]
    fn ex32_witness_passes() {
        let seq = ex32_sequence();
        for y in [0.0, 0.3, 1.0] {
            let zs: Vec<Vec<f64>> = seq.points().iter().map(|x| vec![x[0] + y, x[0]]).collect();
            let w = WitnessSequence::converging(zs, vec![0.5 + y, 0.5]).unwrap();
            let v = verify_condition_c_witness(&ex32(), Slice::Primal, &[y], &seq, &w, &abs_cone(), TOL).unwrap();
            assert_eq!(v.status, Status::Pass, "{v:?}");
        }
    }

    #[test]
    fn ex32_zero_witness_fails() {
        let seq = ex32_sequence();
        let zs = vec![vec![0.0, 0.0]; 10];
        let w = WitnessSequence::new(zs, vec![0.8, 0.5], 1.0).unwrap();
        let v = verify_condition_c_witness(&ex32(), Slice::Primal, &[0.3], &seq, &w, &abs_cone(), TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.counterexample.unwrap().p("k"), &[1.0]);
    }

    #[test]
    fn constant_function_witness() {
        let f = VExpr::parse("(1, 2)").unwrap();
        let seq = ex32_sequence();
        let w = WitnessSequence::converging(vec![vec![1.0, 2.0]; 10], vec![1.0, 2.0]).unwrap();
        let v = verify_condition_c_witness(&f, Slice::Primal, &[0.0], &seq, &w, &abs_cone(), TOL).unwrap();
        assert_eq!(v.status, Status::Pass);
        let short = WitnessSequence::converging(vec![vec![1.0, 2.0]; 5], vec![1.0, 2.0]).unwrap();
        let e = verify_condition_c_witness(&f, Slice::Primal, &[0.0], &seq, &short, &abs_cone(), TOL);
        assert!(matches!(e, Err(CheckError::LengthMismatch(_))));
    }

    #[test]
    fn ex32_usc_certificate() {
        for y in [0.0, 0.3, 1.0] {
            let v = check_usc_violation(&ex32(), Slice::Primal, &[y], &[0.5], &[-0.5, 1.0], &[0.75], &abs_cone(), TOL)
                .unwrap();
            assert_eq!(v.status, Status::Pass);
            let d = v.evidence.unwrap().v("c+M(x)-M(probe)").to_vec();
            assert!((d[0] + 1.5).abs() <= 1e-12 && (d[1] - 1.5).abs() <= 1e-12);
        }
        let v = check_usc_violation(&ex32(), Slice::Primal, &[0.0], &[0.5], &[1.0, 0.0], &[0.75], &abs_cone(), TOL)
            .unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.notes, "certificate direction not interior");
    }

    #[test]
    fn continuous_slice_has_no_usc_certificate() {
        let f = fixture(FixtureId::Ex31F, &FixtureParams::new()).unwrap();
        let cone = PolyCone::orthant(2);
        for x in [-1.0, -0.5, 0.0, 0.25, 1.0] {
            for dx in [1e-3, -1e-3, 1e-2] {
                let v = check_usc_violation(&f, Slice::Primal, &[0.3], &[x], &[1.0, 1.0], &[x + dx], &cone, TOL)
                    .unwrap();
                assert_eq!(v.status, Status::Fail);
            }
        }
    }

    #[test]
    fn closedness_scan() {
        let grid = GridDomain::box_grid(&[0.0], &[1.0], 0.125).unwrap();
        let cone = PolyCone::orthant(1);
        let f = VExpr::parse("y1 - x1").unwrap();
        let v = check_closedness(&f, Slice::Primal, &grid, 12, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::ConsistentAtResolution);
        // G(y) excludes exactly x = 1/2.
        let f = VExpr::parse("piecewise{ if x1 < 0.5 : 1 ; if x1 > 0.5 : 1 ; else : -1 }").unwrap();
        let v = check_closedness(&f, Slice::Primal, &grid, 12, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.counterexample.unwrap().p("x"), &[0.5]);
    }

    #[test]
    fn ex32_primal_level_sets_are_closed() {
        let grid = GridDomain::box_grid(&[0.0], &[1.0], 0.125).unwrap();
        let v = check_closedness(&ex32(), Slice::Primal, &grid, 12, &abs_cone(), TOL).unwrap();
        assert_eq!(v.status, Status::ConsistentAtResolution);
    }

    #[test]
    fn continuous_slice_auto_witness() {
        let f = VExpr::parse("(x1 + y1, x1)").unwrap();
        let grid = GridDomain::box_grid(&[0.0], &[1.0], 1.0 / 1024.0).unwrap();
        assert!(max_adjacent_jump(&f, Slice::Primal, &[0.3], &grid).unwrap() < 1e-2);
        let pts = (1..=10).map(|k| vec![0.5 + 1.0 / 2f64.powi(k)]).collect();
        let seq = WitnessSequence::converging(pts, vec![0.5]).unwrap();
        let w = auto_witness(&f, Slice::Primal, &[0.3], &seq).unwrap();
        let v = verify_condition_c_witness(&f, Slice::Primal, &[0.3], &seq, &w, &abs_cone(), TOL).unwrap();
        assert_eq!(v.status, Status::Pass);
    }
}

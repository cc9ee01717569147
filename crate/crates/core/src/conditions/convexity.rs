//! C-convexity, essential quasimonotonicity and the KKM property.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::{PolyCone, Region};
use crate::expr::VExpr;
use crate::geometry::{simplex_weights, GridDomain};
use crate::vector::{add, combine, lerp, scale, sub};

use super::{check_grid, eval, first_hit, is_in, CheckError, Counterexample, Slice, Verdict};

/// Convexity gap `t M(y1) + (1-t) M(y2) - M(t y1 + (1-t) y2)` leaves `C`.
pub fn c_convex_violation(
    slice: Slice,
    f: &VExpr,
    x: &[f64],
    y1: &[f64],
    y2: &[f64],
    t: f64,
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    let m1 = slice.at(f, x, y1)?;
    let m2 = slice.at(f, x, y2)?;
    let p = lerp(y2, y1, t);
    let mp = slice.at(f, x, &p)?;
    let gap = sub(&add(&scale(&m1, t), &scale(&m2, 1.0 - t)), &mp);
    if is_in(cone, &gap, Region::InC, tol) {
        return Ok(None);
    }
    Ok(Some(
        Counterexample::new()
            .point("x", x)
            .point("y1", y1)
            .point("y2", y2)
            .point("t", &[t])
            .value("gap", &gap),
    ))
}

/// C-convexity of `y -> M_x(y)` for every grid `x`, every ordered pair of
/// distinct grid points and every weight `t` in `weights`. Pairs suffice:
/// the n-point inequality follows by induction.
pub fn check_c_convex(
    slice: Slice,
    f: &VExpr,
    grid: &GridDomain,
    cone: &PolyCone,
    weights: &[f64],
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "c_convex";
    check_grid(f, grid, cone)?;
    if let Some(t) = weights.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(CheckError::InvalidArgument(format!("convexity weight {t} outside [0, 1]")));
    }
    let pts = grid.points();
    let n = pts.len();
    let per_x = (n * n.saturating_sub(1) * weights.len()) as u64;
    let hit = first_hit(n, |i| {
        let x = &pts[i];
        for y1 in pts {
            for y2 in pts.iter().filter(|y2| *y2 != y1) {
                for &t in weights {
                    if let Some(c) = c_convex_violation(slice, f, x, y1, y2, t, cone, tol)? {
                        return Ok(Some(c));
                    }
                }
            }
        }
        Ok(None)
    })?;
    Ok(match hit {
        Some((i, c)) => Verdict::fail(NAME, c, (i as u64 + 1) * per_x, tol, "convexity gap leaves C"),
        None => Verdict::pass(NAME, n as u64 * per_x, tol, "every sampled convexity gap lies in C"),
    })
}

/// How subsets and weights are drawn for n-point checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSampling {
    /// Largest subset size, at most 4.
    pub max_size: usize,
    /// Weight vectors per subset (vertices and barycenter come first).
    pub weight_count: usize,
    /// Subsets drawn per size above 2 when exhaustive enumeration is larger.
    pub random_subsets: usize,
    pub seed: u64,
}

impl Default for SubsetSampling {
    fn default() -> Self {
        SubsetSampling {
            max_size: 4,
            weight_count: 7,
            random_subsets: 200,
            seed: 0,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Index subsets with their weight lists: exhaustive for sizes 1 and 2 (and
/// for larger sizes when they fit the sampling budget), seeded otherwise.
pub(crate) fn subset_tasks(n: usize, sampling: &SubsetSampling) -> Result<Vec<(Vec<usize>, usize)>, CheckError> {
    if !(1..=4).contains(&sampling.max_size) {
        return Err(CheckError::InvalidArgument(format!(
            "subset size must lie in 1..=4, got {}",
            sampling.max_size
        )));
    }
    let mut tasks = Vec::new();
    for k in 1..=sampling.max_size.min(n) {
        if k <= 2 || binomial(n, k) <= sampling.random_subsets as u128 {
            tasks.extend(all_subsets(n, k).into_iter().map(|s| (s, k)));
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed.wrapping_add(k as u64));
            for _ in 0..sampling.random_subsets {
                let mut s = sample(&mut rng, n, k).into_vec();
                s.sort_unstable();
                tasks.push((s, k));
            }
        }
    }
    Ok(tasks)
}

pub(crate) fn weight_table(sampling: &SubsetSampling) -> Vec<Vec<Vec<f64>>> {
    (0..=sampling.max_size)
        .map(|k| match k {
            0 => Vec::new(),
            1 => vec![vec![1.0]],
            _ => simplex_weights(k, sampling.weight_count.max(k + 1), sampling.seed.wrapping_add(k as u64)),
        })
        .collect()
}

/// `Σ λ_i f(p, y_i)` with `p = Σ λ_i y_i` lands in `-int C`.
pub fn essential_quasimonotone_violation(
    f: &VExpr,
    ys: &[&[f64]],
    lambda: &[f64],
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    let p = combine(lambda, ys);
    let mut sum = vec![0.0; cone.dim()];
    for (y, &l) in ys.iter().zip(lambda) {
        sum = add(&sum, &scale(&eval(f, &p, y, &p)?, l));
    }
    if !is_in(cone, &sum, Region::InNegIntC, tol) {
        return Ok(None);
    }
    Ok(Some(subset_counterexample(ys, lambda, &p).value("weighted_sum", &sum)))
}

fn subset_counterexample(ys: &[&[f64]], lambda: &[f64], p: &[f64]) -> Counterexample {
    let mut c = Counterexample::new().point("lambda", lambda).point("p", p);
    for (i, y) in ys.iter().enumerate() {
        c = c.point(format!("y{}", i + 1), y);
    }
    c
}

/// C-essential quasimonotonicity of a bifunction `f(x, y)` over sampled
/// subsets of at most four grid points.
pub fn check_essential_quasimonotone(
    f: &VExpr,
    grid: &GridDomain,
    cone: &PolyCone,
    sampling: &SubsetSampling,
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "essential_quasimonotone";
    check_grid(f, grid, cone)?;
    let tasks = subset_tasks(grid.len(), sampling)?;
    let weights = weight_table(sampling);
    let pts = grid.points();
    let hit = first_hit(tasks.len(), |i| {
        let (idx, k) = &tasks[i];
        let ys: Vec<&[f64]> = idx.iter().map(|&j| pts[j].as_slice()).collect();
        for lambda in &weights[*k] {
            if let Some(c) = essential_quasimonotone_violation(f, &ys, lambda, cone, tol)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    })?;
    let total: u64 = tasks.iter().map(|(_, k)| weights[*k].len() as u64).sum();
    Ok(match hit {
        Some((i, c)) => Verdict::fail(
            NAME,
            c,
            tasks[..=i].iter().map(|(_, k)| weights[*k].len() as u64).sum(),
            tol,
            "weighted sum lies in -int C",
        ),
        None => Verdict::pass(NAME, total, tol, sampling_note(sampling)),
    })
}

fn sampling_note(s: &SubsetSampling) -> String {
    format!(
        "subsets of size <= 2 exhaustive; sizes 3..={} sampled ({} subsets, {} weights, seed {})",
        s.max_size, s.random_subsets, s.weight_count, s.seed
    )
}

/// Which level-set map the KKM check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KkmForm {
    /// `G(y) = {x : F(x,y,x) ∉ -int C}`.
    Primal,
    /// `G(y) = {x : F(x,y,y) ∉ -int C}`.
    Dual,
}

impl KkmForm {
    fn slice(self) -> Slice {
        match self {
            KkmForm::Primal => Slice::Primal,
            KkmForm::Dual => Slice::Dual,
        }
    }
}

/// The combination point `p` lies in no `G(y_i)`.
pub fn kkm_violation(
    f: &VExpr,
    form: KkmForm,
    ys: &[&[f64]],
    lambda: &[f64],
    cone: &PolyCone,
    tol: f64,
) -> Result<Option<Counterexample>, CheckError> {
    let p = combine(lambda, ys);
    let mut c = subset_counterexample(ys, lambda, &p);
    for (i, y) in ys.iter().enumerate() {
        let v = form.slice().at(f, &p, y)?;
        if !is_in(cone, &v, Region::InNegIntC, tol) {
            return Ok(None);
        }
        c = c.value(format!("F(p,y{})", i + 1), &v);
    }
    Ok(Some(c))
}

/// KKM property of `y -> G(y)`: every sampled combination point is covered.
pub fn check_kkm(
    f: &VExpr,
    form: KkmForm,
    grid: &GridDomain,
    sampling: &SubsetSampling,
    cone: &PolyCone,
    tol: f64,
) -> Result<Verdict, CheckError> {
    const NAME: &str = "kkm";
    check_grid(f, grid, cone)?;
    let tasks = subset_tasks(grid.len(), sampling)?;
    let weights = weight_table(sampling);
    let pts = grid.points();
    let hit = first_hit(tasks.len(), |i| {
        let (idx, k) = &tasks[i];
        let ys: Vec<&[f64]> = idx.iter().map(|&j| pts[j].as_slice()).collect();
        for lambda in &weights[*k] {
            if let Some(c) = kkm_violation(f, form, &ys, lambda, cone, tol)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    })?;
    let total: u64 = tasks.iter().map(|(_, k)| weights[*k].len() as u64).sum();
    Ok(match hit {
        Some((i, c)) => Verdict::fail(
            NAME,
            c,
            tasks[..=i].iter().map(|(_, k)| weights[*k].len() as u64).sum(),
            tol,
            "combination point lies outside every G(y_i)",
        ),
        None => Verdict::pass(NAME, total, tol, sampling_note(sampling)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::Status;
    use crate::expr::{fixture, FixtureId, FixtureParams};
    use crate::geometry::pair_weights;

    const TOL: f64 = 1e-9;

    fn grid(lo: f64, hi: f64, step: f64) -> GridDomain {
        GridDomain::box_grid(&[lo], &[hi], step).unwrap()
    }

    #[test]
    fn convex_examples() {
        let cone = PolyCone::orthant(1);
        let ts = pair_weights(7, 1);
        let sq = VExpr::parse("y1 * y1").unwrap();
        let v = check_c_convex(Slice::Raw, &sq, &grid(-1.0, 1.0, 0.25), &cone, &ts, TOL).unwrap();
        assert_eq!(v.status, Status::Pass);
        let c = VExpr::parse("3").unwrap();
        let v = check_c_convex(Slice::Raw, &c, &grid(-1.0, 1.0, 0.25), &cone, &ts, TOL).unwrap();
        assert_eq!(v.status, Status::Pass);
        let concave = VExpr::parse("-(y1 * y1)").unwrap();
        let v = check_c_convex(Slice::Raw, &concave, &grid(-1.0, 1.0, 0.25), &cone, &ts, TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
    }

    #[test]
    fn ex31_slice_is_not_convex() {
        let f = fixture(FixtureId::Ex31F, &FixtureParams::new()).unwrap();
        let cone = PolyCone::orthant(2);
        let g = grid(-1.0, 1.0, 0.125);
        let v = check_c_convex(Slice::Primal, &f, &g, &cone, &[0.25, 0.5, 0.75], TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        let c = v.counterexample.unwrap();
        assert_eq!(c.p("x"), &[-1.0]);
        // Replay by hand: the slice is f(y) - 1 in both components.
        let fs = |x: f64| {
            if x <= -0.5 {
                -2.0 * x - 1.0
            } else if x <= 0.0 {
                2.0 * x + 1.0
            } else {
                -2.0 * x + 1.0
            }
        };
        let (y1, y2, t) = (c.p("y1")[0], c.p("y2")[0], c.p("t")[0]);
        let gap = t * fs(y1) + (1.0 - t) * fs(y2) - fs(t * y1 + (1.0 - t) * y2);
        assert!(gap < -TOL);
        assert!((c.v("gap")[0] - gap).abs() < 1e-12);
    }

    #[test]
    fn subsets_are_exhaustive_when_small() {
        let s = SubsetSampling::default();
        let tasks = subset_tasks(5, &s).unwrap();
        let count = |k| tasks.iter().filter(|(_, kk)| *kk == k).count();
        assert_eq!((count(1), count(2), count(3), count(4)), (5, 10, 10, 5));
        let tasks = subset_tasks(30, &s).unwrap();
        assert_eq!(tasks.iter().filter(|(_, k)| *k == 3).count(), 200);
        assert!(subset_tasks(5, &SubsetSampling { max_size: 5, ..s }).is_err());
    }

    #[test]
    fn essential_quasimonotone_examples() {
        let cone = PolyCone::orthant(1);
        let s = SubsetSampling::default();
        let g = grid(-1.0, 1.0, 0.25);
        let f = VExpr::parse("y1 - x1").unwrap();
        assert_eq!(check_essential_quasimonotone(&f, &g, &cone, &s, TOL).unwrap().status, Status::Pass);
        let f = VExpr::parse("-1").unwrap();
        let v = check_essential_quasimonotone(&f, &g, &cone, &s, TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.counterexample.unwrap().p("lambda"), &[1.0]);
    }

    #[test]
    fn cubic_matches_brute_force_pairs() {
        let cone = PolyCone::orthant(1);
        let s = SubsetSampling {
            max_size: 2,
            ..SubsetSampling::default()
        };
        let g = grid(-1.0, 1.0, 0.25);
        let f = VExpr::parse("(y1 - x1) * (y1 - x1) * (y1 - x1)").unwrap();
        let ws = weight_table(&s);
        let mut oracle = false;
        let pts: Vec<f64> = g.points().iter().map(|p| p[0]).collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                for w in &ws[2] {
                    let p = w[0] * pts[i] + w[1] * pts[j];
                    let sum = w[0] * (pts[i] - p).powi(3) + w[1] * (pts[j] - p).powi(3);
                    oracle |= sum < -TOL;
                }
            }
        }
        let v = check_essential_quasimonotone(&f, &g, &cone, &s, TOL).unwrap();
        assert_eq!(v.is_fail(), oracle);
    }

    #[test]
    fn kkm_examples() {
        let cone = PolyCone::orthant(1);
        let s = SubsetSampling::default();
        let g = grid(0.0, 1.0, 0.25);
        let single = SubsetSampling { max_size: 1, ..s.clone() };
        let f = VExpr::parse("y1 - x1").unwrap();
        assert_eq!(check_kkm(&f, KkmForm::Primal, &g, &single, &cone, TOL).unwrap().status, Status::Pass);
        assert_eq!(check_kkm(&f, KkmForm::Primal, &g, &s, &cone, TOL).unwrap().status, Status::Pass);
        let f = VExpr::parse("-1").unwrap();
        let v = check_kkm(&f, KkmForm::Primal, &g, &s, &cone, TOL).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.counterexample.unwrap().p("lambda"), &[1.0]);
    }
}

//! Coercivity certificates: the license to truncate an unbounded domain.
//!
//! Witnesses `y0` are tried in ascending norm, then grid order; radii and
//! candidate sets are tried smallest first, so results are deterministic.

use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{PolyCone, Region};
use crate::expr::VExpr;
use crate::geometry::GridDomain;
use crate::vector::norm;

use super::{check_grid, is_in, CheckError, Counterexample, Slice, Verdict};

/// Largest domain for which the full witness matrix is tabulated.
pub const MAX_MATRIX_POINTS: usize = 4096;
const REPORTED_UNCOVERED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoercivityVariant {
    /// Compact `K0` and one `y0` with `F(x,y0,x) ∈ -int C` off `K0`.
    CompactSet,
    /// Every `x ∈ K0 \ core K0` has a witness `y0 ∈ core K0`.
    Core,
    /// Every `‖x‖ > r` has a witness with `‖y0‖ < ‖x‖`.
    BallLt,
    /// Every `‖x‖ ≤ r` has a witness with `‖y0‖ < r`.
    BallLe,
    /// Every `‖x‖ = r` has a witness with `‖y0‖ < r`.
    Sphere,
}

impl CoercivityVariant {
    pub const ALL: [CoercivityVariant; 5] = [
        CoercivityVariant::CompactSet,
        CoercivityVariant::Core,
        CoercivityVariant::BallLt,
        CoercivityVariant::BallLe,
        CoercivityVariant::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoercivityVariant::CompactSet => "COMPACT_SET",
            CoercivityVariant::Core => "CORE",
            CoercivityVariant::BallLt => "BALL_LT",
            CoercivityVariant::BallLe => "BALL_LE",
            CoercivityVariant::Sphere => "SPHERE",
        }
    }

    pub fn region(self) -> Region {
        match self {
            CoercivityVariant::CompactSet => Region::InNegIntC,
            _ => Region::InNegC,
        }
    }
}

impl std::str::FromStr for CoercivityVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown coercivity variant `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityCertificate {
    pub variant: CoercivityVariant,
    pub slice: Slice,
    pub r: Option<f64>,
    #[serde(rename = "K0")]
    pub k0: Vec<Vec<f64>>,
    /// `core_K K0` for the CORE variant, empty otherwise.
    pub core: Vec<Vec<f64>>,
    /// `(x, y0)` pairs.
    pub assignments: Vec<(Vec<f64>, Vec<f64>)>,
    pub cone_region_used: Region,
}

impl CoercivityCertificate {
    /// Re-evaluates every assignment against the variant's membership and
    /// norm constraints.
    pub fn verify(&self, f: &VExpr, cone: &PolyCone, tol: f64) -> Result<bool, CheckError> {
        for (x, y0) in &self.assignments {
            let v = self.slice.at(f, x, y0)?;
            if !is_in(cone, &v, self.cone_region_used, tol) {
                return Ok(false);
            }
            let (nx, ny) = (norm(x), norm(y0));
            let ok = match (self.variant, self.r) {
                (CoercivityVariant::BallLt, Some(r)) => nx > r && ny < nx,
                (CoercivityVariant::BallLe, Some(r)) => nx <= r && ny < r,
                (CoercivityVariant::Sphere, Some(r)) => ny < r,
                (CoercivityVariant::Core, _) => self.core.contains(y0) && self.k0.contains(x),
                (CoercivityVariant::CompactSet, _) => !self.k0.contains(x),
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoercivityOutcome {
    Certified(CoercivityCertificate),
    Failed(Verdict),
}

impl CoercivityOutcome {
    pub fn certificate(&self) -> Option<&CoercivityCertificate> {
        match self {
            CoercivityOutcome::Certified(c) => Some(c),
            CoercivityOutcome::Failed(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certificate().is_some()
    }
}

struct Search<'a> {
    f: &'a VExpr,
    slice: Slice,
    pts: &'a [Vec<f64>],
    norms: Vec<f64>,
    /// Indices by ascending norm, ties in grid order.
    order: Vec<usize>,
    cone: &'a PolyCone,
    region: Region,
    tol: f64,
}

impl Search<'_> {
    fn valid(&self, x: usize, y0: usize) -> Result<bool, CheckError> {
        let v = self.slice.at(self.f, &self.pts[x], &self.pts[y0])?;
        Ok(is_in(self.cone, &v, self.region, self.tol))
    }

    /// Smallest-norm witness for each `x`.
    fn min_witness(&self) -> Result<Vec<Option<usize>>, CheckError> {
        (0..self.pts.len())
            .into_par_iter()
            .map(|x| {
                for &y0 in &self.order {
                    if self.valid(x, y0)? {
                        return Ok(Some(y0));
                    }
                }
                Ok(None)
            })
            .collect()
    }

    /// `matrix[x][y0]`.
    fn matrix(&self) -> Result<Vec<Vec<bool>>, CheckError> {
        let n = self.pts.len();
        if n > MAX_MATRIX_POINTS {
            return Err(CheckError::TooLarge(n, MAX_MATRIX_POINTS));
        }
        (0..n)
            .into_par_iter()
            .map(|x| (0..n).map(|y0| self.valid(x, y0)).collect())
            .collect()
    }

    fn distinct_positive_norms(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.norms.iter().copied().filter(|r| *r > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn points(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| self.pts[i].clone()).collect()
    }

    fn ball(&self, r: f64) -> Vec<usize> {
        (0..self.pts.len()).filter(|&i| self.norms[i] <= r).collect()
    }

    fn certificate(
        &self,
        variant: CoercivityVariant,
        r: Option<f64>,
        k0: &[usize],
        core: &[usize],
        assignments: Vec<(usize, usize)>,
    ) -> CoercivityOutcome {
        CoercivityOutcome::Certified(CoercivityCertificate {
            variant,
            slice: self.slice,
            r,
            k0: self.points(k0),
            core: self.points(core),
            assignments: assignments
                .into_iter()
                .map(|(x, y)| (self.pts[x].clone(), self.pts[y].clone()))
                .collect(),
            cone_region_used: self.region,
        })
    }

    fn failure(&self, variant: CoercivityVariant, uncovered: &[usize], checked: u64, notes: String) -> CoercivityOutcome {
        let mut c = Counterexample::new();
        if let Some(&first) = uncovered.first() {
            let v = self.slice.at(self.f, &self.pts[first], &self.pts[first]).ok();
            c = c.point("x", &self.pts[first]);
            if let Some(v) = v {
                c = c.value("M(x,x)", &v);
            }
        }
        for (k, &i) in uncovered.iter().take(REPORTED_UNCOVERED).enumerate() {
            c = c.point(format!("uncovered[{k:02}]"), &self.pts[i]);
        }
        let notes = format!("{notes}; {} uncovered point(s)", uncovered.len());
        CoercivityOutcome::Failed(Verdict::fail(
            &format!("coercivity_{}", variant.name().to_ascii_lowercase()),
            c,
            checked,
            self.tol,
            notes,
        ))
    }
}

/// Box-grid sub-windows `[l, shape_d - 1 - u]` on every axis, excluding the
/// full grid. Returns `(K0, core)` index lists.
fn windows(grid: &GridDomain) -> Vec<(Vec<usize>, Vec<usize>)> {
    let Some(shape) = grid.shape() else {
        return Vec::new();
    };
    let min_len = *shape.iter().min().unwrap_or(&0);
    let mut out = Vec::new();
    for l in 0..min_len {
        for u in 0..(min_len - l) {
            if l + u > 0 {
                out.push(window(grid, l, u));
            }
        }
    }
    out
}

fn window(grid: &GridDomain, l: usize, u: usize) -> (Vec<usize>, Vec<usize>) {
    let shape = grid.shape().expect("box grid");
    let mut k0 = Vec::new();
    let mut core = Vec::new();
    let mut m = vec![0; shape.len()];
    for i in 0..grid.len() {
        let mut rest = i;
        for d in (0..shape.len()).rev() {
            m[d] = rest % shape[d];
            rest /= shape[d];
        }
        if !m.iter().zip(shape).all(|(&md, &sd)| md >= l && md + u < sd) {
            continue;
        }
        k0.push(i);
        let interior = m
            .iter()
            .zip(shape)
            .all(|(&md, &sd)| (l == 0 || md > l) && (u == 0 || md + u + 1 < sd));
        if interior {
            core.push(i);
        }
    }
    (k0, core)
}

fn window_margins(grid: &GridDomain, bad: &[usize]) -> Option<(usize, usize)> {
    let shape = grid.shape()?;
    let mut l = usize::MAX;
    let mut u = usize::MAX;
    for &i in bad {
        let mut rest = i;
        for d in (0..shape.len()).rev() {
            let md = rest % shape[d];
            rest /= shape[d];
            l = l.min(md);
            u = u.min(shape[d] - 1 - md);
        }
    }
    Some((l, u))
}

/// Searches for a coercivity certificate of the chosen variant.
///
/// `slice` picks `F(x,y0,x)` (primal) or `F(x,y0,y0)` (dual). For the ball
/// variants a fixed `radius` may be supplied; otherwise radii are scanned
/// over the distinct positive point norms, smallest first.
pub fn find_coercivity(
    f: &VExpr,
    slice: Slice,
    domain: &GridDomain,
    variant: CoercivityVariant,
    radius: Option<f64>,
    cone: &PolyCone,
    tol: f64,
) -> Result<CoercivityOutcome, CheckError> {
    check_grid(f, domain, cone)?;
    if let Some(r) = radius {
        if !(r > 0.0) {
            return Err(CheckError::InvalidArgument(format!("radius must be positive, got {r}")));
        }
    }
    let pts = domain.points();
    let norms: Vec<f64> = pts.iter().map(|p| norm(p)).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| norms[a].total_cmp(&norms[b]));
    let s = Search {
        f,
        slice,
        pts,
        norms,
        order,
        cone,
        region: variant.region(),
        tol,
    };
    match variant {
        CoercivityVariant::BallLt => ball_lt(&s, radius),
        CoercivityVariant::BallLe => ball_le(&s, radius),
        CoercivityVariant::Sphere => sphere(&s, radius),
        CoercivityVariant::Core => core(&s, domain),
        CoercivityVariant::CompactSet => compact_set(&s, domain),
    }
}

fn ball_lt(s: &Search, radius: Option<f64>) -> Result<CoercivityOutcome, CheckError> {
    let v = CoercivityVariant::BallLt;
    let n = s.pts.len();
    let wit = s.min_witness()?;
    let covered = |x: usize| wit[x].is_some_and(|y| s.norms[y] < s.norms[x]);
    let max_norm = s.norms.iter().copied().fold(0.0, f64::max);
    let candidates: Vec<f64> = match radius {
        Some(r) => vec![r],
        None => s.distinct_positive_norms().into_iter().filter(|r| *r < max_norm).collect(),
    };
    let checked = (n * n) as u64;
    for &r in &candidates {
        if r >= max_norm {
            break;
        }
        let outside: Vec<usize> = (0..n).filter(|&x| s.norms[x] > r).collect();
        if outside.iter().all(|&x| covered(x)) {
            let assign = outside.iter().map(|&x| (x, wit[x].unwrap())).collect();
            return Ok(s.certificate(v, Some(r), &s.ball(r), &[], assign));
        }
    }
    let best = candidates.iter().copied().filter(|r| *r < max_norm).fold(f64::NAN, f64::max);
    let uncovered: Vec<usize> = (0..n)
        .filter(|&x| !(s.norms[x] <= best) && !covered(x))
        .collect();
    let note = if candidates.iter().all(|r| *r >= max_norm) {
        "no radius below the largest point norm".to_string()
    } else {
        format!("best radius {best}")
    };
    Ok(s.failure(v, &uncovered, checked, note))
}

fn ball_le(s: &Search, radius: Option<f64>) -> Result<CoercivityOutcome, CheckError> {
    let v = CoercivityVariant::BallLe;
    let n = s.pts.len();
    let wit = s.min_witness()?;
    let candidates: Vec<f64> = match radius {
        Some(r) => vec![r],
        None => {
            let norms = s.distinct_positive_norms();
            let mut c = norms.clone();
            c.extend(norms.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            c.sort_by(f64::total_cmp);
            c
        }
    };
    let mut best: Option<Vec<usize>> = None;
    for &r in &candidates {
        let inside = s.ball(r);
        let uncovered: Vec<usize> = inside
            .iter()
            .copied()
            .filter(|&x| !wit[x].is_some_and(|y| s.norms[y] < r))
            .collect();
        if uncovered.is_empty() {
            let assign = inside.iter().map(|&x| (x, wit[x].unwrap())).collect();
            return Ok(s.certificate(v, Some(r), &inside, &[], assign));
        }
        if best.as_ref().map_or(true, |b| uncovered.len() < b.len()) {
            best = Some(uncovered);
        }
    }
    let uncovered = best.unwrap_or_else(|| (0..n).collect());
    Ok(s.failure(v, &uncovered, (n * n) as u64, "no radius covers its ball".into()))
}

fn sphere(s: &Search, radius: Option<f64>) -> Result<CoercivityOutcome, CheckError> {
    let v = CoercivityVariant::Sphere;
    let n = s.pts.len();
    let wit = s.min_witness()?;
    let candidates = match radius {
        Some(r) => vec![r],
        None => s.distinct_positive_norms(),
    };
    let mut best: Option<Vec<usize>> = None;
    for &r in &candidates {
        let on: Vec<usize> = (0..n)
            .filter(|&x| (s.norms[x] - r).abs() <= 1e-12 * r.max(1.0))
            .collect();
        if on.is_empty() {
            continue;
        }
        let uncovered: Vec<usize> = on
            .iter()
            .copied()
            .filter(|&x| !wit[x].is_some_and(|y| s.norms[y] < r))
            .collect();
        if uncovered.is_empty() {
            let assign = on.iter().map(|&x| (x, wit[x].unwrap())).collect();
            return Ok(s.certificate(v, Some(r), &s.ball(r), &[], assign));
        }
        if best.as_ref().map_or(true, |b| uncovered.len() < b.len()) {
            best = Some(uncovered);
        }
    }
    let uncovered = best.unwrap_or_default();
    let note = if candidates.is_empty() || uncovered.is_empty() {
        "no grid points on any candidate sphere".to_string()
    } else {
        "no sphere is covered".to_string()
    };
    Ok(s.failure(v, &uncovered, (n * n) as u64, note))
}

fn core(s: &Search, grid: &GridDomain) -> Result<CoercivityOutcome, CheckError> {
    let v = CoercivityVariant::Core;
    let n = s.pts.len();
    let m = s.matrix()?;
    let mut candidates: Vec<(Vec<usize>, Vec<usize>, Option<f64>)> = s
        .distinct_positive_norms()
        .into_iter()
        .map(|r| {
            let k0 = s.ball(r);
            let core = k0.iter().copied().filter(|&i| s.norms[i] < r).collect();
            (k0, core, Some(r))
        })
        .collect();
    candidates.extend(windows(grid).into_iter().map(|(k0, core)| (k0, core, None)));
    candidates.sort_by_key(|c| c.0.len());
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (pos, &i) in s.order.iter().enumerate() {
            r[i] = pos;
        }
        r
    };
    let mut best: Option<Vec<usize>> = None;
    for (k0, core, r) in &candidates {
        if core.is_empty() {
            continue;
        }
        let mut core_sorted = core.clone();
        core_sorted.sort_by_key(|&i| rank[i]);
        let mut assign = Vec::new();
        let mut uncovered = Vec::new();
        for &x in k0.iter().filter(|x| core.binary_search(x).is_err()) {
            match core_sorted.iter().find(|&&y| m[x][y]) {
                Some(&y) => assign.push((x, y)),
                None => uncovered.push(x),
            }
        }
        if uncovered.is_empty() {
            return Ok(s.certificate(v, *r, k0, core, assign));
        }
        if best.as_ref().map_or(true, |b| uncovered.len() < b.len()) {
            best = Some(uncovered);
        }
    }
    Ok(s.failure(
        v,
        &best.unwrap_or_default(),
        (n * n) as u64,
        format!("{} candidate sets tried", candidates.len()),
    ))
}

fn compact_set(s: &Search, grid: &GridDomain) -> Result<CoercivityOutcome, CheckError> {
    let v = CoercivityVariant::CompactSet;
    let n = s.pts.len();
    if n > MAX_MATRIX_POINTS {
        return Err(CheckError::TooLarge(n, MAX_MATRIX_POINTS));
    }
    let bad: Vec<Vec<usize>> = s
        .order
        .par_iter()
        .map(|&y0| {
            let mut bad = Vec::new();
            for x in 0..n {
                if !s.valid(x, y0)? {
                    bad.push(x);
                }
            }
            Ok(bad)
        })
        .collect::<Result<_, CheckError>>()?;
    let min_norm = s.norms.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best: Option<(Vec<usize>, usize, Option<f64>)> = None;
    let mut fewest: Option<&Vec<usize>> = None;
    for (pos, b) in bad.iter().enumerate() {
        let y0 = s.order[pos];
        let mut options: Vec<(Vec<usize>, Option<f64>)> = Vec::new();
        let r = b.iter().map(|&i| s.norms[i]).fold(min_norm, f64::max);
        options.push((s.ball(r), Some(r)));
        if !b.is_empty() {
            if let Some((l, u)) = window_margins(grid, b) {
                if l + u > 0 {
                    options.push((window(grid, l, u).0, None));
                }
            }
        }
        for (k0, r) in options {
            if k0.len() == n {
                continue;
            }
            if best.as_ref().map_or(true, |(bk, _, _)| k0.len() < bk.len()) {
                best = Some((k0, y0, r));
            }
        }
        if fewest.map_or(true, |f| b.len() < f.len()) {
            fewest = Some(b);
        }
    }
    match best {
        Some((k0, y0, r)) => {
            let assign = (0..n)
                .filter(|x| k0.binary_search(x).is_err())
                .map(|x| (x, y0))
                .collect();
            Ok(s.certificate(v, r, &k0, &[], assign))
        }
        None => Ok(s.failure(
            v,
            fewest.map(|b| b.as_slice()).unwrap_or(&[]),
            (n * n) as u64,
            "no proper subset K0 works for any witness (K0 = K is vacuous on a bounded grid)".into(),
        )),
    }
}

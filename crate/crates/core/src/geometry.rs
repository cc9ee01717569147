//! Finite discretizations of the feasible set and the samplers the checkers use.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::vector::{dist, lerp, norm};

/// Upper bound on materialized grid points.
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("grid would have {0} points, more than the limit of {MAX_GRID_POINTS}")]
    TooManyPoints(u128),
    #[error("bad bounds: {0}")]
    BadBounds(String),
    #[error("point list is empty or ragged")]
    BadPoints,
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("bad witness sequence: {0}")]
    BadSequence(String),
}

/// How a [`GridDomain`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GridKind {
    BoxGrid { lo: Vec<f64>, hi: Vec<f64>, step: f64 },
    PointList,
}

/// A finite, nonempty, duplicate-free set of points of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    kind: GridKind,
    points: Vec<Vec<f64>>,
    /// Per-coordinate lattice counts for box grids (points per axis).
    shape: Option<Vec<usize>>,
    norm_bound: f64,
}

/// Coordinates `lo + k (hi - lo) / n` along one axis, ending exactly at `hi`.
fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let width = hi - lo;
    let ratio = width / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        let n = rounded as usize;
        (0..=n).map(|k| lo + (k as f64 * width) / n as f64).collect()
    } else {
        let n = ratio.floor() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
        if *pts.last().unwrap() < hi {
            pts.push(hi);
        }
        pts
    }
}

impl GridDomain {
    /// Lattice `lo + k·step` in every coordinate, lexicographically ordered
    /// (first coordinate slowest). Both endpoints are always included.
    pub fn box_grid(lo: &[f64], hi: &[f64], step: f64) -> Result<GridDomain, GeometryError> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(GeometryError::BadBounds("lo and hi must have equal nonzero length".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(GeometryError::BadBounds(format!("step must be positive, got {step}")));
        }
        if lo.iter().zip(hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(GeometryError::BadBounds("need lo < hi in every coordinate".into()));
        }
        let mut total: u128 = 1;
        for (l, h) in lo.iter().zip(hi) {
            let per = ((h - l) / step).ceil() as u128 + 1;
            total = total.saturating_mul(per);
            if total > MAX_GRID_POINTS as u128 {
                return Err(GeometryError::TooManyPoints(total));
            }
        }
        let axes: Vec<Vec<f64>> = lo.iter().zip(hi).map(|(l, h)| axis(*l, *h, step)).collect();
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let count: usize = shape.iter().product();
        let mut points = Vec::with_capacity(count);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..count {
            points.push(idx.iter().enumerate().map(|(d, &k)| axes[d][k]).collect());
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        let norm_bound = points.iter().map(|p: &Vec<f64>| norm(p)).fold(0.0, f64::max);
        Ok(GridDomain {
            kind: GridKind::BoxGrid {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
                step,
            },
            points,
            shape: Some(shape),
            norm_bound,
        })
    }

    /// An explicit point list; duplicates are dropped, first occurrence kept.
    pub fn point_list(points: Vec<Vec<f64>>) -> Result<GridDomain, GeometryError> {
        let dim = points.first().map(Vec::len).ok_or(GeometryError::BadPoints)?;
        if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
            return Err(GeometryError::BadPoints);
        }
        let mut seen = HashSet::new();
        let points: Vec<Vec<f64>> = points
            .into_iter()
            .filter(|p| seen.insert(p.iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
            .collect();
        let norm_bound = points.iter().map(|p| norm(p)).fold(0.0, f64::max);
        Ok(GridDomain {
            kind: GridKind::PointList,
            points,
            shape: None,
            norm_bound,
        })
    }

    /// The sub-lattice of a box grid keeping axis indices `keep[d]` (sorted,
    /// nonempty). Lattice neighbors are kept; `None` for point lists.
    pub fn sublattice(&self, keep: &[Vec<usize>]) -> Option<GridDomain> {
        let shape = self.shape.as_ref()?;
        if keep.len() != shape.len()
            || keep.iter().zip(shape).any(|(k, &s)| k.is_empty() || k.iter().any(|&i| i >= s) || k.windows(2).any(|w| w[0] >= w[1]))
        {
            return None;
        }
        let sub: Vec<usize> = keep.iter().map(Vec::len).collect();
        let count: usize = sub.iter().product();
        let mut points = Vec::with_capacity(count);
        let mut idx = vec![0usize; sub.len()];
        for _ in 0..count {
            let flat = (0..sub.len()).fold(0, |acc, d| acc * shape[d] + keep[d][idx[d]]);
            points.push(self.points[flat].clone());
            for d in (0..sub.len()).rev() {
                idx[d] += 1;
                if idx[d] < sub[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        let norm_bound = points.iter().map(|p: &Vec<f64>| norm(p)).fold(0.0, f64::max);
        Some(GridDomain {
            kind: GridKind::PointList,
            points,
            shape: Some(sub),
            norm_bound,
        })
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Points per axis for box grids.
    pub fn shape(&self) -> Option<&[usize]> {
        self.shape.as_deref()
    }

    /// Index of `p` if it is a grid point (exact comparison).
    pub fn index_of(&self, p: &[f64]) -> Option<usize> {
        self.points.iter().position(|q| q.as_slice() == p)
    }

    /// Grid neighbors of point `i`: adjacent lattice points for box grids,
    /// the nearest other point for point lists.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        match &self.shape {
            Some(shape) => {
                let mut multi = Vec::with_capacity(shape.len());
                let mut rest = i;
                for d in (0..shape.len()).rev() {
                    multi.push(rest % shape[d]);
                    rest /= shape[d];
                }
                multi.reverse();
                let mut out = Vec::new();
                let mut stride = 1;
                for d in (0..shape.len()).rev() {
                    if multi[d] > 0 {
                        out.push(i - stride);
                    }
                    if multi[d] + 1 < shape[d] {
                        out.push(i + stride);
                    }
                    stride *= shape[d];
                }
                out.sort_unstable();
                out
            }
            None => {
                let p = &self.points[i];
                self.points
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .min_by(|a, b| dist(a.1, p).total_cmp(&dist(b.1, p)))
                    .map(|(j, _)| vec![j])
                    .unwrap_or_default()
            }
        }
    }

    /// Summary for reports.
    pub fn meta(&self) -> GridMeta {
        GridMeta {
            kind: self.kind.clone(),
            points: self.points.len(),
            dim: self.dim(),
            norm_bound: self.norm_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeta {
    #[serde(flatten)]
    pub kind: GridKind,
    pub points: usize,
    pub dim: usize,
    pub norm_bound: f64,
}

/// Decreasing segment parameters in `(0, 1]` used to probe `t -> 0` limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSchedule {
    values: Vec<f64>,
    pub t0: f64,
    pub rho: f64,
    pub count: usize,
}

impl TSchedule {
    /// Geometric schedule `t_k = t0 * rho^k`, `k = 0..count`.
    pub fn geometric(t0: f64, rho: f64, count: usize) -> Result<TSchedule, GeometryError> {
        if !(t0 > 0.0 && t0 <= 1.0) {
            return Err(GeometryError::BadSchedule(format!("t0 must lie in (0, 1], got {t0}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(GeometryError::BadSchedule(format!("rho must lie in (0, 1), got {rho}")));
        }
        if count < 3 {
            return Err(GeometryError::BadSchedule("count must be at least 3".into()));
        }
        let values: Vec<f64> = (0..count).map(|k| t0 * rho.powi(k as i32)).collect();
        if values.last().is_some_and(|v| *v <= 0.0) {
            return Err(GeometryError::BadSchedule("schedule underflows to zero".into()));
        }
        Ok(TSchedule { values, t0, rho, count })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values strictly inside `(0, 1)`.
    pub fn open_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|t| *t < 1.0)
    }
}

impl Default for TSchedule {
    /// `t0 = 1`, `rho = 0.5`, 20 values (down to about `1e-6`).
    fn default() -> Self {
        TSchedule::geometric(1.0, 0.5, 20).expect("default schedule is valid")
    }
}

/// A finite sequence converging toward a declared limit.
///
/// `gap` bounds the distance of the last term to the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSequence {
    points: Vec<Vec<f64>>,
    limit: Vec<f64>,
    gap: f64,
}

impl WitnessSequence {
    /// Checks length (at least 5), nonincreasing distance to the limit, and the
    /// declared gap. `slack` absorbs roundoff in the monotonicity check.
    pub fn new(points: Vec<Vec<f64>>, limit: Vec<f64>, gap: f64) -> Result<Self, GeometryError> {
        const SLACK: f64 = 1e-15;
        if points.len() < 5 {
            return Err(GeometryError::BadSequence(format!(
                "need at least 5 terms, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| p.len() != limit.len()) {
            return Err(GeometryError::BadSequence("term dimension differs from limit".into()));
        }
        let d: Vec<f64> = points.iter().map(|p| dist(p, &limit)).collect();
        if let Some(k) = d.windows(2).position(|w| w[1] > w[0] + SLACK) {
            return Err(GeometryError::BadSequence(format!(
                "distance to limit increases at term {}",
                k + 2
            )));
        }
        if *d.last().unwrap() > gap + SLACK {
            return Err(GeometryError::BadSequence(format!(
                "last term is {} from the limit, declared gap is {gap}",
                d.last().unwrap()
            )));
        }
        Ok(WitnessSequence { points, limit, gap })
    }

    /// Like [`WitnessSequence::new`] with the gap set to the last term's distance.
    pub fn converging(points: Vec<Vec<f64>>, limit: Vec<f64>) -> Result<Self, GeometryError> {
        let gap = points.last().map_or(0.0, |p| dist(p, &limit));
        Self::new(points, limit, gap)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn limit(&self) -> &[f64] {
        &self.limit
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(t, (1 - t) x + t y)` for every `t` in the schedule.
pub fn segment_points(x: &[f64], y: &[f64], sched: &TSchedule) -> Result<Vec<(f64, Vec<f64>)>, GeometryError> {
    if x == y {
        return Err(GeometryError::DegenerateSegment);
    }
    Ok(sched.values().iter().map(|&t| (t, lerp(x, y, t))).collect())
}

/// Weight vectors on the `k`-simplex: the `k` vertices, the barycenter, then
/// seeded uniform samples until `count` vectors are produced.
pub fn simplex_weights(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(k >= 1 && count >= 1, "simplex_weights needs k >= 1 and count >= 1");
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    for i in 0..k {
        out.push((0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect());
    }
    if k > 1 {
        out.push(vec![1.0 / k as f64; k]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        // Normalized exponentials are uniform on the simplex.
        let e: Vec<f64> = (0..k)
            .map(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln())
            .collect();
        let s: f64 = e.iter().sum();
        out.push(e.iter().map(|v| v / s).collect());
    }
    out.truncate(count);
    out
}

/// Weight pairs `(t, 1 - t)` as used by two-point convexity checks.
pub fn pair_weights(count: usize, seed: u64) -> Vec<f64> {
    simplex_weights(2, count.max(3), seed)
        .into_iter()
        .map(|w| w[0])
        .filter(|t| *t > 0.0 && *t < 1.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = GridDomain::box_grid(&[-1.0], &[1.0], 0.5).unwrap();
        let pts: Vec<f64> = g.points().iter().map(|p| p[0]).collect();
        assert_eq!(pts, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);

        // Integer-indexed oracle: 0.5 = 200 * step and 0.75 = 300 * step.
        let g = GridDomain::box_grid(&[0.0], &[1.0], 1.0 / 400.0).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g.points()[200], vec![0.5]);
        assert_eq!(g.points()[300], vec![0.75]);
        assert_eq!(g.points()[400], vec![1.0]);

        let g = GridDomain::box_grid(&[0.0, 0.0], &[1.0, 1.0], 0.5).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.points()[1], vec![0.0, 0.5]);
        assert_eq!(g.points()[3], vec![0.5, 0.0]);
    }

    #[test]
    fn ex31_grid_hits_paper_points() {
        let g = GridDomain::box_grid(&[-1.0], &[1.0], 1.0 / 400.0).unwrap();
        assert_eq!(g.len(), 801);
        assert!(g.index_of(&[-0.5]).is_some());
        assert!(g.index_of(&[0.75]).is_some());
    }

    #[test]
    fn non_dividing_step_clips_to_hi() {
        let g = GridDomain::box_grid(&[0.0], &[1.0], 0.3).unwrap();
        let pts: Vec<f64> = g.points().iter().map(|p| p[0]).collect();
        assert_eq!(pts.len(), 5);
        assert_eq!(*pts.last().unwrap(), 1.0);
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(
            GridDomain::box_grid(&[1.0], &[0.0], 0.1),
            Err(GeometryError::BadBounds(_))
        ));
        assert!(matches!(
            GridDomain::box_grid(&[0.0], &[1.0], 0.0),
            Err(GeometryError::BadBounds(_))
        ));
        assert!(matches!(
            GridDomain::box_grid(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], 1e-3),
            Err(GeometryError::TooManyPoints(_))
        ));
        assert_eq!(GridDomain::point_list(vec![]), Err(GeometryError::BadPoints));
    }

    #[test]
    fn point_list_dedupes() {
        let g = GridDomain::point_list(vec![vec![1.0], vec![2.0], vec![1.0]]).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.norm_bound(), 2.0);
        assert_eq!(g.neighbors(0), vec![1]);
    }

    #[test]
    fn neighbors_on_lattice() {
        let g = GridDomain::box_grid(&[0.0, 0.0], &[1.0, 1.0], 0.5).unwrap();
        assert_eq!(g.neighbors(4), vec![1, 3, 5, 7]);
        assert_eq!(g.neighbors(0), vec![1, 3]);
    }

    #[test]
    fn segment_examples() {
        let s = TSchedule::geometric(0.5, 0.5, 3).unwrap();
        assert_eq!(segment_points(&[0.0], &[1.0], &s).unwrap()[0], (0.5, vec![0.5]));
        let s = TSchedule::geometric(0.25, 0.5, 3).unwrap();
        assert_eq!(
            segment_points(&[-1.0, 0.0], &[1.0, 2.0], &s).unwrap()[0].1,
            vec![-0.5, 0.5]
        );
        // Direct formula (1 - t)(-1/2) + t(3/4).
        let s = TSchedule::geometric(1.0, 0.5, 4).unwrap();
        let pts: Vec<f64> = segment_points(&[-0.5], &[0.75], &s)
            .unwrap()
            .into_iter()
            .map(|(_, p)| p[0])
            .collect();
        assert_eq!(pts, vec![0.75, 0.125, -0.1875, -11.0 / 32.0]);
        assert_eq!(
            segment_points(&[1.0], &[1.0], &s),
            Err(GeometryError::DegenerateSegment)
        );
    }

    #[test]
    fn schedule_validation() {
        assert!(TSchedule::geometric(1.0, 0.5, 2).is_err());
        assert!(TSchedule::geometric(1.5, 0.5, 5).is_err());
        assert!(TSchedule::geometric(1.0, 1.0, 5).is_err());
        let d = TSchedule::default();
        assert_eq!(d.values().len(), 20);
        assert!(d.values().windows(2).all(|w| w[1] < w[0]));
        assert!(*d.values().last().unwrap() < 2e-6);
    }

    #[test]
    fn simplex_examples() {
        let w = simplex_weights(2, 3, 0);
        assert_eq!(w, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
        let w = simplex_weights(3, 4, 0);
        assert_eq!(w[3], vec![1.0 / 3.0; 3]);
        assert!((w[3].iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        let w = simplex_weights(2, 10, 9);
        assert_eq!(w.len(), 10);
        for l in &w {
            assert!(l.iter().all(|v| *v >= 0.0));
            assert!((l.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        }
        assert_eq!(simplex_weights(4, 12, 5), simplex_weights(4, 12, 5));
    }

    #[test]
    fn witness_sequence_validation() {
        let pts: Vec<Vec<f64>> = (1..=6).map(|k| vec![0.5 + 0.5f64.powi(k)]).collect();
        let seq = WitnessSequence::converging(pts.clone(), vec![0.5]).unwrap();
        assert_eq!(seq.len(), 6);
        assert!(WitnessSequence::new(pts[..4].to_vec(), vec![0.5], 1.0).is_err());
        let mut bad = pts.clone();
        bad.swap(0, 3);
        assert!(WitnessSequence::new(bad, vec![0.5], 1.0).is_err());
        assert!(WitnessSequence::new(pts, vec![0.5], 1e-6).is_err());
    }
}

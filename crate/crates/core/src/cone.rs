//! Polyhedral ordering cones in half-space representation.
//!
//! A cone is stored as a list of unit normals `a_i` and represents
//! `C = { z : a_i · z >= 0 for all i }`. Every membership predicate used by the
//! solvers and checkers (`C`, `int C`, `-C`, `-int C`) is answered here, with a
//! single explicit tolerance:
//!
//! | region          | test                        |
//! |-----------------|-----------------------------|
//! | `InC`           | `min_i a_i·z  >= -tol`      |
//! | `InIntC`        | `min_i a_i·z  >  +tol`      |
//! | `InNegC`        | `min_i a_i·(-z) >= -tol`    |
//! | `InNegIntC`     | `min_i a_i·(-z) >  +tol`    |
//!
//! Interior membership needs a strict margin, so boundary vectors are never
//! classified as interior.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::vector::{dot, norm};


#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("cone has no rows")]
    EmptyRows,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row {0} has zero norm")]
    ZeroRow(usize),
    #[error("rejection sampling found no vector in {region} after {attempts} attempts")]
    RegionEmpty { region: Region, attempts: usize },
}

/// One of the four membership predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    InC,
    InIntC,
    InNegC,
    InNegIntC,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::InC => "IN_C",
            Region::InIntC => "IN_INT_C",
            Region::InNegC => "IN_NEG_C",
            Region::InNegIntC => "IN_NEG_INT_C",
        };
        f.write_str(s)
    }
}

/// A polyhedral cone `{ z : a_i · z >= 0 }` with normalized rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCone {
    rows: Vec<Vec<f64>>,
    dim: usize,
    label: String,
}

impl PolyCone {
    /// Builds a cone from raw normals; each row is scaled to unit length.
    pub fn new(rows: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self, ConeError> {
        let dim = rows.first().map(Vec::len).ok_or(ConeError::EmptyRows)?;
        if dim == 0 {
            return Err(ConeError::DimensionMismatch { expected: 1, got: 0 });
        }
        let mut normalized = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(ConeError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            let n = norm(&row);
            if n == 0.0 || !n.is_finite() {
                return Err(ConeError::ZeroRow(i));
            }
            normalized.push(row.iter().map(|v| v / n).collect());
        }
        Ok(PolyCone {
            rows: normalized,
            dim,
            label: label.into(),
        })
    }

    /// The nonnegative orthant of `R^m`.
    pub fn orthant(m: usize) -> Self {
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        PolyCone {
            rows,
            dim: m,
            label: format!("R^{m}_+"),
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_dim(&self, z: &[f64]) -> Result<(), ConeError> {
        if z.len() != self.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        Ok(())
    }

    /// `min_i a_i · z`; positive means `z` is interior, negative means outside.
    pub fn margin(&self, z: &[f64]) -> Result<f64, ConeError> {
        self.check_dim(z)?;
        Ok(self.margin_unchecked(z))
    }

    fn margin_unchecked(&self, z: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|a| dot(a, z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership of `z` in the requested region at tolerance `tol`.
    pub fn member(&self, z: &[f64], region: Region, tol: f64) -> Result<bool, ConeError> {
        self.check_dim(z)?;
        Ok(match region {
            Region::InC => self.margin_unchecked(z) >= -tol,
            Region::InIntC => self.margin_unchecked(z) > tol,
            Region::InNegC => self.neg_margin(z) >= -tol,
            Region::InNegIntC => self.neg_margin(z) > tol,
        })
    }

    fn neg_margin(&self, z: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|a| -dot(a, z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Structural validation: pointedness and a nonempty interior.
    pub fn validate(&self, tol: f64) -> ConeReport {
        let (min_spread, resolution) = sphere_min_spread(&self.rows, self.dim);
        // Largest z in the unit ball with |a_i·z| <= tol for every row.
        let max_two_sided = if min_spread <= 0.0 {
            1.0
        } else {
            (tol / min_spread).min(1.0)
        };
        let pointed = max_two_sided <= 10.0 * tol;
        let interior_witness = interior_direction(&self.rows, self.dim, tol);
        ConeReport {
            pointed,
            interior_nonempty: interior_witness.is_some(),
            interior_witness,
            sphere_resolution: resolution,
            min_sphere_spread: min_spread,
            kappa: pointedness_constant(&self.rows, self.dim),
        }
    }

    /// Draws `count` vectors from `region`, deterministically for a fixed seed.
    ///
    /// Norms are drawn uniformly from `[0.1, 10]`. Directions are proposed
    /// half the time isotropically and half the time around an interior
    /// witness, so narrow cones are still reachable.
    pub fn sample(&self, region: Region, count: usize, seed: u64) -> Result<Vec<Vec<f64>>, ConeError> {
        const SAMPLE_TOL: f64 = 1e-9;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = interior_direction(&self.rows, self.dim, SAMPLE_TOL);
        let sign = match region {
            Region::InC | Region::InIntC => 1.0,
            Region::InNegC | Region::InNegIntC => -1.0,
        };
        let attempts = 10 * count;
        let mut out = Vec::with_capacity(count);
        for attempt in 0..attempts {
            if out.len() == count {
                break;
            }
            let mut dir: Vec<f64> = (0..self.dim).map(|_| gaussian(&mut rng)).collect();
            if let (Some(c), true) = (&center, attempt % 2 == 0) {
                let spread = rng.gen_range(0.0..1.0);
                for (d, ci) in dir.iter_mut().zip(c) {
                    *d = ci + spread * *d / (self.dim as f64).sqrt();
                }
            }
            let n = norm(&dir);
            if n == 0.0 {
                continue;
            }
            let radius = rng.gen_range(0.1..=10.0);
            let z: Vec<f64> = dir.iter().map(|d| sign * radius * d / n).collect();
            if self.member(&z, region, SAMPLE_TOL)? {
                out.push(z);
            }
        }
        if out.len() < count {
            return Err(ConeError::RegionEmpty { region, attempts });
        }
        Ok(out)
    }
}

impl fmt::Display for PolyCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} rows in R^{})", self.label, self.rows.len(), self.dim)
    }
}

/// Outcome of [`PolyCone::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeReport {
    pub pointed: bool,
    pub interior_nonempty: bool,
    pub interior_witness: Option<Vec<f64>>,
    /// Number of unit directions inspected by the pointedness search.
    pub sphere_resolution: usize,
    /// Smallest `max_i |a_i·u|` seen over the sampled unit directions.
    pub min_sphere_spread: f64,
    /// Bound `kappa` with `z ∈ C ∩ -C` at tolerance `tol` implying `|z| <= kappa·tol`.
    /// Infinite when the rows do not span the ambient space.
    pub kappa: f64,
}

impl ConeReport {
    pub fn is_valid(&self) -> bool {
        self.pointed && self.interior_nonempty
    }
}

/// Minimizes `max_i |a_i·u|` over a discretized unit sphere.
fn sphere_min_spread(rows: &[Vec<f64>], dim: usize) -> (f64, usize) {
    let spread = |u: &[f64]| {
        rows.iter()
            .map(|a| dot(a, u).abs())
            .fold(0.0_f64, f64::max)
    };
    let directions = sphere_directions(dim);
    let best = directions
        .iter()
        .map(|u| spread(u))
        .fold(f64::INFINITY, f64::min);
    (best, directions.len())
}

fn sphere_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            // Antipodal directions give the same spread, so half a circle suffices.
            const STEPS: usize = 3600;
            (0..STEPS)
                .map(|k| {
                    let theta = std::f64::consts::PI * k as f64 / STEPS as f64;
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        3 => {
            // Fibonacci lattice.
            const POINTS: usize = 20_000;
            let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
            (0..POINTS)
                .map(|k| {
                    let zc = 1.0 - 2.0 * (k as f64 + 0.5) / POINTS as f64;
                    let r = (1.0 - zc * zc).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), zc]
                })
                .collect()
        }
        _ => {
            const POINTS: usize = 40_000;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut dirs: Vec<Vec<f64>> = (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            while dirs.len() < POINTS {
                let v: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
                let n = norm(&v);
                if n > 0.0 {
                    dirs.push(v.iter().map(|x| x / n).collect());
                }
            }
            dirs
        }
    }
}

/// `sqrt(k) / sigma_min(A)`, since `|Au|_inf >= |Au|_2 / sqrt(k) >= sigma_min / sqrt(k)`.
fn pointedness_constant(rows: &[Vec<f64>], dim: usize) -> f64 {
    let k = rows.len();
    if k < dim {
        return f64::INFINITY;
    }
    let a = DMatrix::from_fn(k, dim, |i, j| rows[i][j]);
    let sv = a.singular_values();
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 1e-14 {
        f64::INFINITY
    } else {
        (k as f64).sqrt() / smin
    }
}

/// Looks for a unit `z` with `min_i a_i·z > tol`: the row average first, then a
/// projected subgradient ascent on the minimum margin.
fn interior_direction(rows: &[Vec<f64>], dim: usize, tol: f64) -> Option<Vec<f64>> {
    let margin = |z: &[f64]| rows.iter().map(|a| dot(a, z)).fold(f64::INFINITY, f64::min);
    let mut z = vec![0.0; dim];
    for a in rows {
        for (zi, ai) in z.iter_mut().zip(a) {
            *zi += ai;
        }
    }
    let mut n = norm(&z);
    if n == 0.0 {
        z = rows[0].clone();
        n = 1.0;
    }
    z.iter_mut().for_each(|v| *v /= n);
    if margin(&z) > tol {
        return Some(z);
    }
    let mut step = 0.5;
    for _ in 0..2000 {
        let worst = rows
            .iter()
            .min_by(|a, b| dot(a, &z).total_cmp(&dot(b, &z)))
            .expect("rows nonempty");
        let candidate: Vec<f64> = z.iter().zip(worst).map(|(zi, ai)| zi + step * ai).collect();
        let cn = norm(&candidate);
        if cn > 0.0 {
            let candidate: Vec<f64> = candidate.iter().map(|v| v / cn).collect();
            if margin(&candidate) >= margin(&z) {
                z = candidate;
            } else {
                step *= 0.7;
            }
        }
        if margin(&z) > tol {
            return Some(z);
        }
    }
    None
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; u1 is kept away from zero.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn abs_cone() -> PolyCone {
        PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]], "|z1|<=z2").unwrap()
    }

    #[test]
    fn rows_are_normalized() {
        let c = abs_cone();
        for r in c.rows() {
            assert!((norm(r) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(PolyCone::new(vec![], "e"), Err(ConeError::EmptyRows));
        assert!(matches!(
            PolyCone::new(vec![vec![1.0, 0.0], vec![1.0]], "bad"),
            Err(ConeError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert_eq!(
            PolyCone::new(vec![vec![0.0, 0.0]], "zero"),
            Err(ConeError::ZeroRow(0))
        );
    }

    #[test]
    fn orthant_is_valid_with_diagonal_witness() {
        let r = PolyCone::orthant(2).validate(TOL);
        assert!(r.pointed && r.interior_nonempty);
        let w = r.interior_witness.unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w[0] - h).abs() < 1e-12 && (w[1] - h).abs() < 1e-12);
    }

    #[test]
    fn abs_cone_is_valid() {
        let r = abs_cone().validate(TOL);
        assert!(r.pointed);
        assert!(r.interior_nonempty);
        assert!(r.kappa.is_finite());
    }

    #[test]
    fn axis_is_not_pointed() {
        let c = PolyCone::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], "axis").unwrap();
        // Direct evaluation: (0, 1) and (0, -1) both satisfy every constraint.
        for z in [[0.0, 1.0], [0.0, -1.0]] {
            assert!(c.rows().iter().all(|a| dot(a, &z) >= 0.0));
        }
        let r = c.validate(TOL);
        assert!(!r.pointed);
        assert!(!r.interior_nonempty);
        assert!(r.kappa.is_infinite());
    }

    #[test]
    fn membership_examples() {
        let orth = PolyCone::orthant(2);
        assert!(orth.member(&[-1.0 / 3.0, -1.0 / 3.0], Region::InNegIntC, TOL).unwrap());
        for c in [orth.clone(), abs_cone()] {
            assert!(c.member(&[0.0, 0.0], Region::InC, TOL).unwrap());
            assert!(!c.member(&[0.0, 0.0], Region::InIntC, TOL).unwrap());
            assert!(!c.member(&[0.0, 0.0], Region::InNegIntC, TOL).unwrap());
        }
        assert!(!abs_cone().member(&[-1.5, 1.5], Region::InIntC, TOL).unwrap());
        assert!(abs_cone().member(&[-1.5, 1.5], Region::InC, TOL).unwrap());
        assert!(matches!(
            orth.member(&[1.0], Region::InC, TOL),
            Err(ConeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sampling_examples() {
        let orth = PolyCone::orthant(2);
        let s = orth.sample(Region::InIntC, 3, 7).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|z| z.iter().all(|v| *v > 1e-9)));

        let s = abs_cone().sample(Region::InC, 5, 1).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(|z| z[0].abs() <= z[1] + 1e-9));

        let s = orth.sample(Region::InNegIntC, 2, 3).unwrap();
        assert!(s.iter().all(|z| z.iter().all(|v| *v < -1e-9)));

        assert_eq!(orth.sample(Region::InC, 4, 11), orth.sample(Region::InC, 4, 11));
        for z in orth.sample(Region::InC, 50, 2).unwrap() {
            let n = norm(&z);
            assert!((0.1..=10.0 + 1e-12).contains(&n));
        }
    }

    #[test]
    fn degenerate_region_reports_empty() {
        let axis = PolyCone::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], "axis").unwrap();
        assert!(matches!(
            axis.sample(Region::InIntC, 3, 0),
            Err(ConeError::RegionEmpty { .. })
        ));
    }
}

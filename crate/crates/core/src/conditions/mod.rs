//! Hypothesis checkers.
//!
//! Every checker scans a finite grid (plus off-grid convex combinations where
//! the definition calls for them) and returns a [`Verdict`]. A `FAIL` carries
//! the first violating tuple in scan order; scans run in parallel but the
//! reported counterexample does not depend on scheduling.
//!
//! Checks involving limits (hemicontinuity, closedness) can refute but not
//! prove, so on success they report [`Status::ConsistentAtResolution`].

mod closedness;
mod coercivity;
mod convexity;
mod diagonal;
mod monotonicity;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cone::{ConeError, PolyCone, Region};
use crate::expr::{EvalError, VExpr};
use crate::geometry::{GeometryError, GridDomain};

pub use closedness::{
    auto_witness, check_closedness, check_usc_violation, max_adjacent_jump, verify_condition_c_witness,
};
pub use coercivity::{find_coercivity, CoercivityCertificate, CoercivityOutcome, CoercivityVariant};
pub use convexity::{
    c_convex_violation, check_c_convex, check_essential_quasimonotone, check_kkm, essential_quasimonotone_violation,
    kkm_violation, KkmForm, SubsetSampling,
};
pub use diagonal::{check_diagonal, diagonal_violation, DiagonalMode};
pub use monotonicity::{
    all_pairs, check_explicit_quasiconvex, check_explicit_quasiconvex_at, check_hemicontinuity,
    check_pseudomonotone, explicit_quasiconvex_violation, hemicontinuity_violation, pseudomonotone_violation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("evaluation failed at x={x:?}, y={y:?}, z={z:?}: {source}")]
    Eval {
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("function has {got} output components but the cone lives in R^{expected}")]
    OutputDim { expected: usize, got: usize },
    #[error("function needs arguments of dimension {needed}, domain has dimension {domain}")]
    ArgDim { needed: usize, domain: usize },
    #[error("domain has {0} points; this check supports at most {1}")]
    TooLarge(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "CONSISTENT_AT_RESOLUTION")]
    ConsistentAtResolution,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ConsistentAtResolution => "CONSISTENT_AT_RESOLUTION",
        })
    }
}

/// Named points and values that exhibit a violation (or, for certificates, a
/// confirmed property).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Counterexample {
    pub points: BTreeMap<String, Vec<f64>>,
    pub values: BTreeMap<String, Vec<f64>>,
}

impl Counterexample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(mut self, name: impl Into<String>, p: &[f64]) -> Self {
        self.points.insert(name.into(), p.to_vec());
        self
    }

    pub fn value(mut self, name: impl Into<String>, v: &[f64]) -> Self {
        self.values.insert(name.into(), v.to_vec());
        self
    }

    /// Looks up a point, panicking with the key name when absent.
    pub fn p(&self, name: &str) -> &[f64] {
        self.points
            .get(name)
            .unwrap_or_else(|| panic!("counterexample has no point `{name}`"))
    }

    pub fn v(&self, name: &str) -> &[f64] {
        self.values
            .get(name)
            .unwrap_or_else(|| panic!("counterexample has no value `{name}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub checker: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Supporting data on success, e.g. the difference vector of a confirmed
    /// semicontinuity violation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Counterexample>,
    pub checked_count: u64,
    pub tol: f64,
    pub notes: String,
}

impl Verdict {
    pub fn pass(checker: &str, checked_count: u64, tol: f64, notes: impl Into<String>) -> Verdict {
        Verdict {
            checker: checker.to_string(),
            status: Status::Pass,
            counterexample: None,
            evidence: None,
            checked_count,
            tol,
            notes: notes.into(),
        }
    }

    pub fn consistent(checker: &str, checked_count: u64, tol: f64, notes: impl Into<String>) -> Verdict {
        Verdict {
            status: Status::ConsistentAtResolution,
            ..Verdict::pass(checker, checked_count, tol, notes)
        }
    }

    pub fn fail(
        checker: &str,
        counterexample: Counterexample,
        checked_count: u64,
        tol: f64,
        notes: impl Into<String>,
    ) -> Verdict {
        Verdict {
            status: Status::Fail,
            counterexample: Some(counterexample),
            ..Verdict::pass(checker, checked_count, tol, notes)
        }
    }

    pub fn with_evidence(mut self, evidence: Counterexample) -> Verdict {
        self.evidence = Some(evidence);
        self
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    /// PASS or CONSISTENT_AT_RESOLUTION.
    pub fn is_ok(&self) -> bool {
        !self.is_fail()
    }
}

/// Which map a checker looks at for fixed outer argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Slice {
    /// `F(x, y, x)`.
    Primal,
    /// `F(x, y, y)`.
    Dual,
    /// A bifunction `f(x, y)`.
    Raw,
}

impl Slice {
    /// Value of the slice at `(x, y)`.
    pub fn at(self, f: &VExpr, x: &[f64], y: &[f64]) -> Result<Vec<f64>, CheckError> {
        let z = match self {
            Slice::Primal | Slice::Raw => x,
            Slice::Dual => y,
        };
        eval(f, x, y, z)
    }
}

pub(crate) fn eval(f: &VExpr, x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>, CheckError> {
    f.eval(x, y, z).map_err(|source| CheckError::Eval {
        x: x.to_vec(),
        y: y.to_vec(),
        z: z.to_vec(),
        source,
    })
}

/// Confirms `f` maps the domain into the cone's space.
pub(crate) fn check_shapes(f: &VExpr, dim: usize, cone: &PolyCone) -> Result<(), CheckError> {
    if f.out_dim() != cone.dim() {
        return Err(CheckError::OutputDim {
            expected: cone.dim(),
            got: f.out_dim(),
        });
    }
    if f.x_dim() > dim {
        return Err(CheckError::ArgDim {
            needed: f.x_dim(),
            domain: dim,
        });
    }
    Ok(())
}

pub(crate) fn check_grid(f: &VExpr, grid: &GridDomain, cone: &PolyCone) -> Result<(), CheckError> {
    check_shapes(f, grid.dim(), cone)
}

/// Membership with the dimension already validated.
pub(crate) fn is_in(cone: &PolyCone, v: &[f64], region: Region, tol: f64) -> bool {
    cone.member(v, region, tol)
        .expect("output dimension checked against cone")
}

/// Runs `probe` for every index in `0..n` in parallel and returns the first
/// hit (error or counterexample) in index order.
pub(crate) fn first_hit<F>(n: usize, probe: F) -> Result<Option<(usize, Counterexample)>, CheckError>
where
    F: Fn(usize) -> Result<Option<Counterexample>, CheckError> + Sync + Send,
{
    let hit = (0..n).into_par_iter().find_map_first(|i| match probe(i) {
        Ok(None) => None,
        Ok(Some(c)) => Some(Ok((i, c))),
        Err(e) => Some(Err(e)),
    });
    hit.transpose()
}

//! Primal-dual solvers and hypothesis checkers for weak vector equilibrium
//! problems on discretized domains.
//!
//! Given an ordering cone `C`, a finite grid `K` and a trifunction
//! `F(x, y, z)`, the primal problem asks for `x` with `F(x, y, x) ∉ -int C`
//! for every `y`, the dual for `x` with `F(x, y, y) ∉ -int C`. The
//! [`solver`] module enumerates both solution sets; the [`conditions`] module
//! checks the structural hypotheses (pseudomonotonicity, quasiconvexity,
//! hemicontinuity, KKM, coercivity, ...) that relate them, returning
//! replayable counterexamples on failure.

pub mod cone;
pub mod conditions;
pub mod expr;
pub mod geometry;
pub mod panel;
pub mod solver;
pub mod vector;

pub use cone::{ConeError, ConeReport, PolyCone, Region};
pub use conditions::{Status, Verdict};
pub use expr::{EvalError, FixtureId, ParseError, VExpr};
pub use geometry::{GridDomain, TSchedule, WitnessSequence};
pub use solver::{SolutionSet, SolveError};

/// Default tolerance for every membership test.
pub const DEFAULT_TOL: f64 = 1e-9;

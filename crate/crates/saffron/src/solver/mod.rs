//! Deterministic global solver for the assembled models: a bounded-variable
//! simplex core, interval bound tightening, McCormick relaxation of the
//! registered products, best-first branch and bound over binaries with
//! spatial fallback, an incumbent restoration heuristic, an independent
//! solution verifier, and model export to lp-text and MPS.

mod bb;
mod bounds;
mod export;
mod lp;
mod relax;
mod verify;

pub use bb::{solve_miqcp, SolveOptions, Solution, SolveStatus};
pub use bounds::{propagate_bounds, BoundBox, PropagationOutcome};
pub use export::{
    read_lp_text, read_mps, write_lp_text, write_mps, ExportFormat, ParseError,
};
pub use lp::{solve_lp, Basis, ColState, LpOptions, LpProblem, LpSolution, LpStatus, Row};
pub use relax::{relax_bilinear, OwnedRow, RelaxedLp};
pub use verify::{verify_solution, VerifierReport, VERIFY_TOL};

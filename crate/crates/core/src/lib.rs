//! Weighted Bloch norms of analytic functions on the unit disk and
//! essential-norm estimates for composition operators `C_φ: B^α → B^μ`.
//!
//! The crate is organized bottom-up:
//!
//! * [`disk`]: points, sampling grids and local refinement;
//! * [`symbol`]: an expression language for analytic maps with exact
//!   derivatives;
//! * [`weights`]: radial weights `μ`;
//! * [`sigma`]: the test functions `σ_a`;
//! * [`norm`]: supremum search for `‖f‖_μ` and `‖f‖_{B^μ}`;
//! * [`estimators`]: boundary scans, essential-norm bounds and the power and
//!   automorphism criteria;
//! * [`report`]: configuration, reports and the command implementations.

pub mod disk;
pub mod error;
pub mod estimators;
pub mod norm;
pub mod report;
pub mod selfcheck;
pub mod sigma;
pub mod symbol;
pub mod weights;

pub use error::{Error, Result};

//! Shape optimisation of a rotating flywheel cross-section.
//!
//! The thickness profile is a clamped cubic B-spline over equally spaced
//! radii. For a given profile the crate computes
//!
//! - mass and kinetic energy, as dot products with per-control-point
//!   coefficients integrated by Gauss-Legendre quadrature ([`model`]);
//! - radial, tangential and Von Mises stress from a finite-difference
//!   solution of the stress-function boundary value problem ([`stress`]);
//!
//! and [`optimizer`] maximises kinetic energy under mass and stress limits
//! with a static penalty and the Jaya algorithm.

pub mod bspline;
pub mod config;
pub mod error;
pub mod model;
pub mod optimizer;
pub mod quadrature;
pub mod stress;

pub use bspline::{knot_vector, ProfileCurve};
pub use config::Config;
pub use error::{FlywheelError, Result};
pub use model::{control_radii, DesignVector, FlywheelModel, FlywheelSpec};
pub use optimizer::{run, Evaluation, Problem, ProblemConfig, RunResult, StopReason};
pub use stress::{assemble_and_solve, BoundaryStencil, SolverSettings, StressField};

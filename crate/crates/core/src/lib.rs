//! Asymptotic-preserving Lagrange-Projection relaxation solver for the 1D
//! moment equations of a dispersed particle phase coupled to a gas by drag
//! and a prescribed subgrid stress.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: states, closure and Stokes-number coefficients
//! - [`mesh`]: uniform grid, ghost cells, initial condition
//! - [`acoustic`]: Lagrangian relaxation step, explicit and implicit
//! - [`transport`]: upwind projection onto the fixed grid
//! - [`sources`]: pointwise energy relaxation and drag
//! - [`asymptotic`]: small-Stokes limit solver and exact solution
//! - [`driver`]: scheme composition, time steps, time loop
//! - [`harness`]: config files, CSV output, error norms, sweeps

// NaN must fail positivity checks, hence `!(x > 0.0)` rather than `x <= 0.0`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod asymptotic;
pub mod driver;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod model;
pub mod sources;
pub mod transport;

pub use driver::{explicit_dt, run, DtConstraint, ExplicitDt, SchemeKind, Snapshot, Solver, TimeStepPolicy};
pub use error::{Error, Result};
pub use harness::{parse_config, ReferenceSpec, RunConfig};
pub use mesh::{BoundaryPolicy, FieldSet, Grid1D};
pub use model::{ConservedState, GasClosure, ModelCoefficients, PrimitiveState};

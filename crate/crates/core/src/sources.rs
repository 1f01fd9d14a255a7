//! Pointwise implicit source steps: internal-energy relaxation (every scheme)
//! and drag on the mean velocity (schemes that do not upwind their sources).

use crate::error::Result;
use crate::mesh::{BoundaryPolicy, FieldSet};
use crate::model::{ConservedState, PrimitiveState};

/// Backward-Euler solution of `dε/dt = -(2ε - St μ)/St`.
pub fn energy_relaxation(eps: f64, st: f64, mu: f64, dt: f64) -> f64 {
    st * (mu * dt + eps) / (st + 2.0 * dt)
}

/// Backward-Euler drag `du/dt = -(u - ū_g)/St`. Internal energy is untouched;
/// the kinetic energy change is the drag work. Returns `(u', ε')`.
pub fn pointwise_drag(u: f64, eps: f64, u_g: f64, st: f64, dt: f64) -> (f64, f64) {
    let r = dt / st;
    ((u + r * u_g) / (1.0 + r), eps)
}

fn map_cells(
    fields: &FieldSet,
    boundary: BoundaryPolicy,
    f: impl Fn(PrimitiveState) -> PrimitiveState,
) -> Result<FieldSet> {
    let cells: Vec<ConservedState> = fields
        .primitives()?
        .into_iter()
        .map(|p| f(p).to_conserved())
        .collect();
    Ok(FieldSet::from_interior(&cells, boundary))
}

pub fn relax_energy_field(
    fields: &FieldSet,
    st: f64,
    mu: f64,
    dt: f64,
    boundary: BoundaryPolicy,
) -> Result<FieldSet> {
    map_cells(fields, boundary, |p| {
        PrimitiveState::new(p.rho, p.u, energy_relaxation(p.eps, st, mu, dt))
    })
}

pub fn drag_field(
    fields: &FieldSet,
    u_g: f64,
    st: f64,
    dt: f64,
    boundary: BoundaryPolicy,
) -> Result<FieldSet> {
    map_cells(fields, boundary, |p| {
        let (u, eps) = pointwise_drag(p.u, p.eps, u_g, st, dt);
        PrimitiveState::new(p.rho, u, eps)
    })
}

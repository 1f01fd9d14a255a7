//! Projection step: first-order upwind advection of `(ρ, ρu, ρE)` with the
//! interface velocities produced by the Lagrangian step.

use crate::error::{Error, Result};
use crate::mesh::{BoundaryPolicy, FieldSet};
use crate::model::ConservedState;

/// Slack on the transport CFL so a step taken at exactly the reported bound
/// is not rejected by rounding.
const CFL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct TransportInput<'a> {
    /// Fields at `t^{n+1=}` with ghosts filled.
    pub fields: &'a FieldSet,
    /// One velocity per face, `n_cells + 1` entries.
    pub u_star: &'a [f64],
    pub dt: f64,
    pub dx: f64,
    pub boundary: BoundaryPolicy,
}

fn pos(v: f64) -> f64 {
    0.5 * (v + v.abs())
}

fn neg(v: f64) -> f64 {
    0.5 * (v - v.abs())
}

/// Largest `Δt` with `Δt/Δx (u*⁺_{j-1/2} - u*⁻_{j+1/2}) ≤ 1` in every cell;
/// infinite when nothing moves.
pub fn transport_cfl_dt(u_star: &[f64], dx: f64) -> f64 {
    let max_rate = u_star
        .windows(2)
        .map(|w| pos(w[0]) - neg(w[1]))
        .fold(0.0, f64::max);
    if max_rate > 0.0 {
        dx / max_rate
    } else {
        f64::INFINITY
    }
}

fn upwind(left: f64, mid: f64, right: f64, u_l: f64, u_r: f64, lam: f64) -> f64 {
    mid + lam * (pos(u_l) * left + (neg(u_r) - pos(u_l)) * mid - neg(u_r) * right)
}

/// `X_j ← X_j + Δt/Δx [u⁺_{j-1/2} X_{j-1} + (u⁻_{j+1/2} - u⁺_{j-1/2}) X_j - u⁻_{j+1/2} X_{j+1}]`
/// for each conserved component.
pub fn transport_step(input: TransportInput<'_>) -> Result<FieldSet> {
    let TransportInput {
        fields,
        u_star,
        dt,
        dx,
        boundary,
    } = input;
    let n = fields.n_cells();
    if u_star.len() != n + 1 {
        return Err(Error::InvalidParameter {
            name: "u_star",
            reason: format!("expected {} face velocities, got {}", n + 1, u_star.len()),
        });
    }
    let admissible_dt = transport_cfl_dt(u_star, dx);
    if dt > admissible_dt * (1.0 + CFL_SLACK) {
        return Err(Error::StepRejected {
            constraint: "transport CFL",
            dt,
            admissible_dt,
        });
    }

    let lam = dt / dx;
    let cells = fields.with_ghosts();
    let interior: Vec<ConservedState> = (1..=n)
        .map(|i| {
            let (l, m, r) = (&cells[i - 1], &cells[i], &cells[i + 1]);
            let (u_l, u_r) = (u_star[i - 1], u_star[i]);
            ConservedState::new(
                upwind(l.rho, m.rho, r.rho, u_l, u_r, lam),
                upwind(l.mom, m.mom, r.mom, u_l, u_r, lam),
                upwind(l.etot, m.etot, r.etot, u_l, u_r, lam),
            )
        })
        .collect();
    for (j, c) in interior.iter().enumerate() {
        if !(c.rho > 0.0) {
            return Err(Error::NonPositiveDensity {
                cell: Some(j),
                value: c.rho,
            });
        }
    }
    Ok(FieldSet::from_interior(&interior, boundary))
}

/// Density after Lagrangian + transport written directly in conservation form,
/// `ρ_j^{n+1-} = ρ_j^n - Δt/Δx ({ρu}_{j+1/2} - {ρu}_{j-1/2})` with
/// `{ρu}_{j+1/2} = ρ_j^{n+1=} u*⁺ + ρ_{j+1}^{n+1=} u*⁻`.
///
/// `rho_n` and `tau_n1eq` include ghosts; the result covers interior cells.
/// Only used to cross-check the two-stage update.
pub fn conservative_mass_update(
    rho_n: &[f64],
    tau_n1eq: &[f64],
    u_star: &[f64],
    dt: f64,
    dx: f64,
) -> Vec<f64> {
    let n_all = rho_n.len();
    let flux: Vec<f64> = (0..n_all - 1)
        .map(|k| pos(u_star[k]) / tau_n1eq[k] + neg(u_star[k]) / tau_n1eq[k + 1])
        .collect();
    (1..n_all - 1)
        .map(|i| rho_n[i] - dt / dx * (flux[i] - flux[i - 1]))
        .collect()
}

//! Lagrangian step: acoustic waves plus drag, solved with a Suliciu-type
//! relaxation of the pressure and sources upwinded into the interface
//! Riemann solution.
//!
//! Interface arrays are indexed over the `n_cells + 1` faces of the interior:
//! face `k` separates cell `k - 1` from cell `k` (ghosts included), so face 0
//! is the left domain boundary.

mod banded;
mod explicit;
mod implicit;

pub use banded::{solve_banded, BandedLu, BandedMatrix, PentadiagonalSystem};
pub use explicit::{explicit_w_update, lagrangian_explicit_step};
pub use implicit::{assemble_implicit_system, lagrangian_implicit_step};

use crate::error::{Error, Result};
use crate::mesh::{BoundaryPolicy, FieldSet};
use crate::model::{ConservedState, GasClosure, ModelCoefficients, PrimitiveState};

pub const DEFAULT_SAFETY: f64 = 1.05;

/// How drag enters the interface solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceTreatment {
    /// Drag terms are part of the star states and the `w` updates.
    Upwinded,
    /// Plain relaxation solver; drag is left to a separate pointwise step.
    Omitted,
}

/// Per-run data shared by every Lagrangian step.
#[derive(Debug, Clone, Copy)]
pub struct AcousticContext {
    pub gas: GasClosure,
    pub coeffs: ModelCoefficients,
    pub dx: f64,
    pub boundary: BoundaryPolicy,
    pub sources: SourceTreatment,
}

/// Relaxation variables for every cell (ghosts included), initialized at
/// equilibrium `Π = P`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationState {
    pub tau: Vec<f64>,
    pub w_fwd: Vec<f64>,
    pub w_bwd: Vec<f64>,
    /// Specific total energy `E`.
    pub etot: Vec<f64>,
}

impl RelaxationState {
    pub fn at_equilibrium(prims: &[PrimitiveState], coeffs: &ModelCoefficients, a: f64) -> Self {
        let n = prims.len();
        let mut state = Self {
            tau: Vec::with_capacity(n),
            w_fwd: Vec::with_capacity(n),
            w_bwd: Vec::with_capacity(n),
            etot: Vec::with_capacity(n),
        };
        for p in prims {
            let pi = coeffs.pressure(p.rho, p.eps);
            state.tau.push(1.0 / p.rho);
            state.w_fwd.push(pi + a * p.u);
            state.w_bwd.push(pi - a * p.u);
            state.etot.push(p.specific_energy());
        }
        state
    }
}

/// Interface velocity and pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarState {
    pub u_star: f64,
    pub p_star: f64,
}

/// Lagrangian mass increments `Δm_j = ρ_j Δx` (ghosts included) and their
/// face averages.
#[derive(Debug, Clone, PartialEq)]
pub struct MassGeometry {
    pub dm: Vec<f64>,
    pub dm_half: Vec<f64>,
}

impl MassGeometry {
    pub fn new(prims: &[PrimitiveState], dx: f64) -> Self {
        let dm: Vec<f64> = prims.iter().map(|p| p.rho * dx).collect();
        let dm_half = dm.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Self { dm, dm_half }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSpeed {
    pub a: f64,
    pub safety: f64,
}

/// `a = safety · max_j ρ_j c_j`, the subcharacteristic bound with margin.
pub fn relaxation_speed(
    states: &[PrimitiveState],
    coeffs: &ModelCoefficients,
    safety: f64,
) -> Result<RelaxationSpeed> {
    let max_rho_c = max_lagrangian_sound_speed(states, coeffs)?;
    let a = safety * max_rho_c;
    if !(a > 0.0) {
        return Err(Error::DegenerateSpeed);
    }
    Ok(RelaxationSpeed { a, safety })
}

/// `max_j ρ_j c_j`, zero allowed.
pub(crate) fn max_lagrangian_sound_speed(
    states: &[PrimitiveState],
    coeffs: &ModelCoefficients,
) -> Result<f64> {
    let mut max_rho_c = 0.0f64;
    for (j, p) in states.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::Inadmissible(format!("non-finite state in cell {j}: {p:?}")));
        }
        if !(p.rho > 0.0) {
            return Err(Error::NonPositiveDensity {
                cell: Some(j),
                value: p.rho,
            });
        }
        max_rho_c = max_rho_c.max(p.rho * coeffs.sound_speed(p.eps)?);
    }
    Ok(max_rho_c)
}

/// Interface Riemann solution from the outgoing invariants of the two
/// neighbouring cells. With upwinded sources the drag relaxes `u*` towards
/// `ū_g` in proportion to the interface mass `Δm_{j+1/2}`.
pub fn star_state_explicit(
    w_fwd_left: f64,
    w_bwd_right: f64,
    a: f64,
    st: f64,
    u_g: f64,
    dm_half: f64,
) -> StarState {
    let u_star = st / (2.0 * a * st + dm_half) * (w_fwd_left - w_bwd_right + u_g * dm_half / st);
    StarState {
        u_star,
        p_star: 0.5 * (w_fwd_left + w_bwd_right),
    }
}

/// Source-free relaxation star state.
pub fn star_state_plain(w_fwd_left: f64, w_bwd_right: f64, a: f64) -> StarState {
    StarState {
        u_star: (w_fwd_left - w_bwd_right) / (2.0 * a),
        p_star: 0.5 * (w_fwd_left + w_bwd_right),
    }
}

pub(crate) fn star_states(
    w_fwd: &[f64],
    w_bwd: &[f64],
    geom: &MassGeometry,
    a: f64,
    ctx: &AcousticContext,
) -> Vec<StarState> {
    (0..geom.dm_half.len())
        .map(|k| match ctx.sources {
            SourceTreatment::Upwinded => star_state_explicit(
                w_fwd[k],
                w_bwd[k + 1],
                a,
                ctx.coeffs.st,
                ctx.gas.u_g,
                geom.dm_half[k],
            ),
            SourceTreatment::Omitted => star_state_plain(w_fwd[k], w_bwd[k + 1], a),
        })
        .collect()
}

/// Result of a Lagrangian step: the fields at `t^{n+1=}` (ghosts refreshed)
/// and the star states, which the transport step reuses.
#[derive(Debug, Clone)]
pub struct LagrangianStep {
    pub fields: FieldSet,
    pub stars: Vec<StarState>,
}

impl LagrangianStep {
    pub fn star_velocities(&self) -> Vec<f64> {
        self.stars.iter().map(|s| s.u_star).collect()
    }
}

/// `τ` and `E` updates shared by the explicit and implicit schemes, followed
/// by `u = (w→ - w←)/(2a)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish_lagrangian_update(
    relax: &RelaxationState,
    new_w_fwd: &[f64],
    new_w_bwd: &[f64],
    geom: &MassGeometry,
    stars: Vec<StarState>,
    a: f64,
    dt: f64,
    ctx: &AcousticContext,
) -> Result<LagrangianStep> {
    let n_all = relax.tau.len();
    let st = ctx.coeffs.st;
    let u_g = ctx.gas.u_g;
    let mut cells = vec![ConservedState::new(0.0, 0.0, 0.0); n_all];
    for i in 1..n_all - 1 {
        let left = stars[i - 1];
        let right = stars[i];
        let dm = geom.dm[i];
        let dmh_left = geom.dm_half[i - 1];
        let dmh_right = geom.dm_half[i];
        let lam = dt / dm;

        let tau = relax.tau[i] + lam * (right.u_star - left.u_star);
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::NonPositiveDensity {
                cell: Some(i - 1),
                value: 1.0 / tau,
            });
        }
        let mut etot = relax.etot[i]
            - lam * (right.u_star * right.p_star - left.u_star * left.p_star);
        if ctx.sources == SourceTreatment::Upwinded {
            etot += lam * u_g * (dmh_right * right.u_star + dmh_left * left.u_star) / (2.0 * st);
            etot -= lam
                * (dmh_right * right.u_star * right.u_star + dmh_left * left.u_star * left.u_star)
                / (2.0 * st);
        }
        let u = (new_w_fwd[i] - new_w_bwd[i]) / (2.0 * a);
        let rho = 1.0 / tau;
        cells[i] = ConservedState::new(rho, rho * u, rho * etot);
    }
    let fields = FieldSet::from_interior(&cells[1..n_all - 1], ctx.boundary);
    Ok(LagrangianStep { fields, stars })
}

//! Small-Stokes limit: the density obeys
//! `∂t ρ + ∂x (ρ ū_g) = ∂x (τ_g ∂x ρ)`, while velocity and internal energy are
//! slaved to it:
//!
//! ```text
//! u  = ū_g - (τ_g/ρ) ∂x ρ
//! 2ε = τ_g (1 + ∂x ((τ_g/ρ) ∂x ρ))
//! ```

use crate::error::{Error, Result};
use crate::mesh::{fill_ghosts, BoundaryPolicy};

/// Closed-form density for the Gaussian bump on an unbounded domain:
/// `1 + (σ0/σ(t)) exp(-(x - ū_g t)²/(2σ(t)²))`, `σ(t)² = σ0² + 2 τ_g t`.
pub fn heat_kernel_density(x: f64, t: f64, sigma0: f64, tau_g: f64, u_g: f64) -> f64 {
    let var = sigma0 * sigma0 + 2.0 * tau_g * t;
    let xi = x - u_g * t;
    1.0 + sigma0 / var.sqrt() * (-xi * xi / (2.0 * var)).exp()
}

/// Width `σ(t)` of the diffusing bump.
pub fn heat_kernel_width(t: f64, sigma0: f64, tau_g: f64) -> f64 {
    (sigma0 * sigma0 + 2.0 * tau_g * t).sqrt()
}

/// Largest stable explicit step for the advection-diffusion scheme.
pub fn advection_diffusion_dt(u_g: f64, tau_g: f64, dx: f64) -> f64 {
    let diffusive = if tau_g > 0.0 { dx * dx / (2.0 * tau_g) } else { f64::INFINITY };
    let advective = if u_g != 0.0 { dx / u_g.abs() } else { f64::INFINITY };
    diffusive.min(advective)
}

/// One explicit step: upwind advective flux plus centered diffusive flux.
/// `rho` includes ghosts (refreshed here from `policy`); returns interior values.
pub fn advection_diffusion_step(
    rho: &[f64],
    u_g: f64,
    tau_g: f64,
    dt: f64,
    dx: f64,
    policy: BoundaryPolicy,
) -> Result<Vec<f64>> {
    let admissible_dt = advection_diffusion_dt(u_g, tau_g, dx);
    if dt > admissible_dt {
        return Err(Error::StepRejected {
            constraint: "advection-diffusion stability",
            dt,
            admissible_dt,
        });
    }
    let mut r = rho.to_vec();
    fill_ghosts(&mut r, policy);
    let (up, un) = (0.5 * (u_g + u_g.abs()), 0.5 * (u_g - u_g.abs()));
    let flux: Vec<f64> = r
        .windows(2)
        .map(|w| up * w[0] + un * w[1] - tau_g * (w[1] - w[0]) / dx)
        .collect();
    Ok((1..r.len() - 1)
        .map(|i| r[i] - dt / dx * (flux[i] - flux[i - 1]))
        .collect())
}

/// Centered first derivative, one-sided at the two ends.
fn gradient(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| match j {
            0 => (f[1] - f[0]) / dx,
            _ if j == n - 1 => (f[n - 1] - f[n - 2]) / dx,
            _ => (f[j + 1] - f[j - 1]) / (2.0 * dx),
        })
        .collect()
}

/// Diffusive flux velocity `(τ_g/ρ) ∂x ρ` on cell centers.
fn diffusion_velocity(rho: &[f64], tau_g: f64, dx: f64) -> Vec<f64> {
    gradient(rho, dx)
        .iter()
        .zip(rho)
        .map(|(d, r)| tau_g * d / r)
        .collect()
}

/// `u = ū_g - (τ_g/ρ) ∂x ρ` on the interior cells in `rho`.
pub fn asymptotic_velocity(rho: &[f64], tau_g: f64, u_g: f64, dx: f64) -> Vec<f64> {
    diffusion_velocity(rho, tau_g, dx)
        .into_iter()
        .map(|v| u_g - v)
        .collect()
}

/// `ε = τ_g/2 (1 + ∂x((τ_g/ρ) ∂x ρ))` by nested differences.
pub fn asymptotic_internal_energy(rho: &[f64], tau_g: f64, dx: f64) -> Vec<f64> {
    let v = diffusion_velocity(rho, tau_g, dx);
    gradient(&v, dx)
        .into_iter()
        .map(|dv| 0.5 * tau_g * (1.0 + dv))
        .collect()
}

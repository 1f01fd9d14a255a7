//! State variables, closure coefficients and pointwise algebra of the 1D
//! dispersed-phase moment system
//!
//! ```text
//! ∂t ρ  + ∂x ρu          = 0
//! ∂t ρu + ∂x (ρu² + P)   = -ρ (u - ug) / St
//! ∂t ρE + ∂x (ρE + P) u  = -ρu (u - ug) / St - ρ (2ε - St μ) / St
//! ```
//!
//! with `E = u²/2 + ε` and `P = ρ(2ε + λ)`. Everything is non-dimensional.

use crate::error::{check_non_negative, check_positive, Error, Result};

/// Cell state in primitive variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub eps: f64,
}

/// Cell state in conserved variables `(ρ, ρu, ρE)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: f64,
    pub etot: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: f64, eps: f64) -> Self {
        Self { rho, u, eps }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.u.is_finite() && self.eps.is_finite()
    }

    /// Specific total energy `E = u²/2 + ε`.
    pub fn specific_energy(&self) -> f64 {
        0.5 * self.u * self.u + self.eps
    }

    pub fn to_conserved(&self) -> ConservedState {
        prim_to_cons(self)
    }
}

impl ConservedState {
    pub fn new(rho: f64, mom: f64, etot: f64) -> Self {
        Self { rho, mom, etot }
    }

    pub fn to_primitive(&self) -> Result<PrimitiveState> {
        cons_to_prim(self)
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.mom.is_finite() && self.etot.is_finite()
    }
}

/// Prescribed gas-phase data seen by the particles: filtered velocity `ū_g`
/// and subgrid stress `τ_g`. Constant in space and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasClosure {
    pub u_g: f64,
    pub tau_g: f64,
}

impl GasClosure {
    pub fn new(u_g: f64, tau_g: f64) -> Result<Self> {
        if !u_g.is_finite() {
            return Err(Error::InvalidParameter {
                name: "u_g",
                reason: format!("must be finite, got {u_g}"),
            });
        }
        check_non_negative("tau_g", tau_g)?;
        Ok(Self { u_g, tau_g })
    }
}

impl Default for GasClosure {
    fn default() -> Self {
        Self { u_g: 0.0, tau_g: 0.1 }
    }
}

/// Stokes-number dependent coefficients, computed once per run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCoefficients {
    pub st: f64,
    pub f_r: f64,
    pub g_r: f64,
    pub l_r: f64,
    /// Pressure augmentation `λ`.
    pub lambda: f64,
    /// Energy relaxation target coefficient `μ`; `ε` relaxes to `St μ / 2`.
    pub mu: f64,
}

impl ModelCoefficients {
    pub fn new(st: f64, gas: &GasClosure) -> Result<Self> {
        let (f_r, g_r, l_r) = response_coefficients(st)?;
        let (lambda, mu) = subgrid_coefficients(st, gas)?;
        Ok(Self {
            st,
            f_r,
            g_r,
            l_r,
            lambda,
            mu,
        })
    }

    pub fn pressure(&self, rho: f64, eps: f64) -> f64 {
        pressure(rho, eps, self.lambda)
    }

    pub fn sound_speed(&self, eps: f64) -> Result<f64> {
        sound_speed(eps, self.lambda)
    }

    pub fn equilibrium_internal_energy(&self) -> f64 {
        self.st * self.mu / 2.0
    }
}

/// Long-time particle response coefficients `(f_u^r, g_u^r, l_u^r)`.
pub fn response_coefficients(st: f64) -> Result<(f64, f64, f64)> {
    check_positive("st", st)?;
    let one_st = 1.0 + st;
    Ok((1.0 / one_st, 1.0 / (st * one_st), 1.0 / (st * one_st * one_st)))
}

/// `λ = μ = τ_g / (St (1 + St))` for a gas field without velocity gradients.
pub fn subgrid_coefficients(st: f64, gas: &GasClosure) -> Result<(f64, f64)> {
    check_positive("st", st)?;
    check_non_negative("tau_g", gas.tau_g)?;
    let lambda = gas.tau_g / (st * (1.0 + st));
    Ok((lambda, lambda))
}

pub fn pressure(rho: f64, eps: f64, lambda: f64) -> f64 {
    rho * (2.0 * eps + lambda)
}

/// `c = √(6ε + 3λ)`. A negative radicand means `ε` fell below `-λ/2`.
pub fn sound_speed(eps: f64, lambda: f64) -> Result<f64> {
    let c2 = 6.0 * eps + 3.0 * lambda;
    if c2.is_nan() || c2 < 0.0 {
        return Err(Error::Inadmissible(format!(
            "negative squared sound speed 6ε+3λ = {c2:e} (ε = {eps:e}, λ = {lambda:e})"
        )));
    }
    Ok(c2.sqrt())
}

pub fn prim_to_cons(p: &PrimitiveState) -> ConservedState {
    ConservedState {
        rho: p.rho,
        mom: p.rho * p.u,
        etot: p.rho * p.specific_energy(),
    }
}

pub fn cons_to_prim(c: &ConservedState) -> Result<PrimitiveState> {
    if !(c.rho > 0.0) {
        return Err(Error::NonPositiveDensity {
            cell: None,
            value: c.rho,
        });
    }
    let u = c.mom / c.rho;
    let eps = c.etot / c.rho - 0.5 * u * u;
    Ok(PrimitiveState { rho: c.rho, u, eps })
}

/// Zero of the energy source `-(2ε - St μ)/St`.
pub fn equilibrium_internal_energy(st: f64, mu: f64) -> f64 {
    st * mu / 2.0
}

use std::time::Duration;

use crate::asymptotic::heat_kernel_density;
use crate::driver::Snapshot;
use crate::error::{Error, Result};

/// Closed-form small-Stokes solution at a given time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticReference {
    pub time: f64,
    pub sigma0: f64,
    pub tau_g: f64,
    pub u_g: f64,
}

impl AnalyticReference {
    pub fn density(&self, x: f64) -> f64 {
        heat_kernel_density(x, self.time, self.sigma0, self.tau_g, self.u_g)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    Snapshot(&'a Snapshot),
    /// Sampled at the solution's cell centers.
    Analytic(AnalyticReference),
}

/// Norms of `ρ − ρ_ref` on the solution grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub n_cells: usize,
    pub wall_clock: Duration,
}

impl ErrorReport {
    pub fn from_difference(diff: &[f64], dx: f64) -> Self {
        let l1 = diff.iter().map(|d| d.abs()).sum::<f64>() * dx;
        let l2 = (diff.iter().map(|d| d * d).sum::<f64>() * dx).sqrt();
        let linf = diff.iter().map(|d| d.abs()).fold(0.0, f64::max);
        Self {
            l1,
            l2,
            linf,
            n_cells: diff.len(),
            wall_clock: Duration::ZERO,
        }
    }
}

/// Averages consecutive blocks of `k` fine cells.
pub fn restrict(fine: &[f64], k: usize) -> Vec<f64> {
    assert!(k > 0 && fine.len().is_multiple_of(k), "{} cells do not split into blocks of {k}", fine.len());
    fine.chunks_exact(k)
        .map(|c| c.iter().sum::<f64>() / k as f64)
        .collect()
}

fn domain(s: &Snapshot) -> (f64, f64) {
    let dx = s.dx();
    (s.x[0] - 0.5 * dx, s.x[s.n_cells() - 1] + 0.5 * dx)
}

/// Integer factor by which `reference` refines `solution`.
pub fn refinement_ratio(solution: &Snapshot, reference: &Snapshot) -> Result<usize> {
    let (n, m) = (solution.n_cells(), reference.n_cells());
    if n < 2 || m < 2 {
        return Err(Error::IncompatibleGrids(format!("need at least two cells, got {n} and {m}")));
    }
    if m % n != 0 {
        return Err(Error::IncompatibleGrids(format!(
            "reference has {m} cells, not an integer multiple of {n}"
        )));
    }
    let (a, b) = (domain(solution), domain(reference));
    let tol = 1e-9 * (a.1 - a.0);
    if (a.0 - b.0).abs() > tol || (a.1 - b.1).abs() > tol {
        return Err(Error::IncompatibleGrids(format!(
            "domains differ: [{}, {}] vs [{}, {}]",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(m / n)
}

pub fn error_norms(solution: &Snapshot, reference: Reference<'_>) -> Result<ErrorReport> {
    let reference_rho: Vec<f64> = match reference {
        Reference::Snapshot(r) => restrict(&r.rho, refinement_ratio(solution, r)?),
        Reference::Analytic(a) => solution.x.iter().map(|&x| a.density(x)).collect(),
    };
    let diff: Vec<f64> = solution
        .rho
        .iter()
        .zip(&reference_rho)
        .map(|(r, q)| r - q)
        .collect();
    Ok(ErrorReport::from_difference(&diff, solution.dx()))
}

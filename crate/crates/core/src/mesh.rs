//! Uniform grid, ghost cells and the Gaussian-bump initial condition.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_positive, Error, Result};
use crate::model::{ConservedState, PrimitiveState};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
    pub centers: Vec<f64>,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        build_grid(x_min, x_max, n_cells)
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }
}

/// Uniform grid with `centers[j] = x_min + (j + 1/2) dx`.
pub fn build_grid(x_min: f64, x_max: f64, n_cells: usize) -> Result<Grid1D> {
    if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
        return Err(Error::InvalidParameter {
            name: "x_max",
            reason: format!("degenerate domain [{x_min}, {x_max}]"),
        });
    }
    if n_cells < 3 {
        return Err(Error::InvalidParameter {
            name: "n_cells",
            reason: format!("need at least 3 cells, got {n_cells}"),
        });
    }
    let dx = (x_max - x_min) / n_cells as f64;
    let centers = (0..n_cells)
        .map(|j| x_min + (j as f64 + 0.5) * dx)
        .collect();
    Ok(Grid1D {
        x_min,
        x_max,
        n_cells,
        dx,
        centers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// Zero-gradient ghosts.
    #[default]
    Transmissive,
    Periodic,
}

impl fmt::Display for BoundaryPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryPolicy::Transmissive => "transmissive",
            BoundaryPolicy::Periodic => "periodic",
        })
    }
}

impl FromStr for BoundaryPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "transmissive" => Ok(BoundaryPolicy::Transmissive),
            "periodic" => Ok(BoundaryPolicy::Periodic),
            other => Err(format!(
                "unknown boundary `{other}` (expected transmissive or periodic)"
            )),
        }
    }
}

/// Fills `values[0]` and `values[len-1]` from the interior `values[1..len-1]`.
pub fn fill_ghosts<T: Copy>(values: &mut [T], policy: BoundaryPolicy) {
    let n = values.len();
    debug_assert!(n >= 3);
    match policy {
        BoundaryPolicy::Transmissive => {
            values[0] = values[1];
            values[n - 1] = values[n - 2];
        }
        BoundaryPolicy::Periodic => {
            values[0] = values[n - 2];
            values[n - 1] = values[1];
        }
    }
}

/// Conserved cell averages over the interior plus one ghost cell per side.
/// Index 0 and `n_cells + 1` are ghosts.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    cells: Vec<ConservedState>,
}

impl FieldSet {
    pub fn from_interior(interior: &[ConservedState], policy: BoundaryPolicy) -> Self {
        let mut cells = Vec::with_capacity(interior.len() + 2);
        cells.push(interior[0]);
        cells.extend_from_slice(interior);
        cells.push(interior[interior.len() - 1]);
        let mut fields = Self { cells };
        fields.apply_boundary(policy);
        fields
    }

    pub fn from_primitive(interior: &[PrimitiveState], policy: BoundaryPolicy) -> Self {
        let cons: Vec<_> = interior.iter().map(PrimitiveState::to_conserved).collect();
        Self::from_interior(&cons, policy)
    }

    pub fn uniform(n_cells: usize, state: PrimitiveState, policy: BoundaryPolicy) -> Self {
        Self::from_primitive(&vec![state; n_cells], policy)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() - 2
    }

    /// All cells including the two ghosts.
    pub fn with_ghosts(&self) -> &[ConservedState] {
        &self.cells
    }

    pub fn with_ghosts_mut(&mut self) -> &mut [ConservedState] {
        &mut self.cells
    }

    pub fn interior(&self) -> &[ConservedState] {
        let n = self.cells.len();
        &self.cells[1..n - 1]
    }

    pub fn interior_mut(&mut self) -> &mut [ConservedState] {
        let n = self.cells.len();
        &mut self.cells[1..n - 1]
    }

    pub fn apply_boundary(&mut self, policy: BoundaryPolicy) {
        fill_ghosts(&mut self.cells, policy);
    }

    /// Primitive states of all cells including ghosts.
    pub fn primitives_with_ghosts(&self) -> Result<Vec<PrimitiveState>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.to_primitive().map_err(|_| Error::NonPositiveDensity {
                    cell: Some(i.saturating_sub(1)),
                    value: c.rho,
                })
            })
            .collect()
    }

    pub fn primitives(&self) -> Result<Vec<PrimitiveState>> {
        let mut all = self.primitives_with_ghosts()?;
        all.pop();
        all.remove(0);
        Ok(all)
    }

    pub fn total_mass(&self, dx: f64) -> f64 {
        self.interior().iter().map(|c| c.rho).sum::<f64>() * dx
    }

    pub fn min_density(&self) -> f64 {
        self.interior()
            .iter()
            .map(|c| c.rho)
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the initial bump is projected onto the cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialSampling {
    /// Point value at the cell center.
    #[default]
    Center,
    /// Exact cell average.
    Average,
}

impl fmt::Display for InitialSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialSampling::Center => "center",
            InitialSampling::Average => "average",
        })
    }
}

impl FromStr for InitialSampling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "center" => Ok(InitialSampling::Center),
            "average" => Ok(InitialSampling::Average),
            _ => Err(format!("unknown initial sampling `{s}` (expected center or average)")),
        }
    }
}

/// Particles at rest with `ρ = 1 + exp(-x²/(2σ0²))` sampled at cell centers.
pub fn gaussian_initial_condition(
    grid: &Grid1D,
    sigma0: f64,
    policy: BoundaryPolicy,
) -> Result<FieldSet> {
    gaussian_initial_condition_with(grid, sigma0, policy, InitialSampling::Center)
}

pub fn gaussian_initial_condition_with(
    grid: &Grid1D,
    sigma0: f64,
    policy: BoundaryPolicy,
    sampling: InitialSampling,
) -> Result<FieldSet> {
    check_positive("sigma0", sigma0)?;
    let interior: Vec<_> = grid
        .centers
        .iter()
        .map(|&x| {
            let rho = match sampling {
                InitialSampling::Center => gaussian_density(x, sigma0),
                InitialSampling::Average => {
                    gaussian_cell_average(x - 0.5 * grid.dx, x + 0.5 * grid.dx, sigma0)
                }
            };
            PrimitiveState::new(rho, 0.0, 0.0)
        })
        .collect();
    Ok(FieldSet::from_primitive(&interior, policy))
}

fn gaussian_cell_average(lo: f64, hi: f64, sigma0: f64) -> f64 {
    let s = std::f64::consts::SQRT_2 * sigma0;
    let integral = 0.5 * std::f64::consts::PI.sqrt() * s * (libm::erf(hi / s) - libm::erf(lo / s));
    1.0 + integral / (hi - lo)
}

pub(crate) fn gaussian_density(x: f64, sigma0: f64) -> f64 {
    1.0 + (-x * x / (2.0 * sigma0 * sigma0)).exp()
}

pub fn apply_boundary(fields: &mut FieldSet, policy: BoundaryPolicy) {
    fields.apply_boundary(policy);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_hand_values() {
        let g = build_grid(-1.0, 1.0, 100).unwrap();
        assert_relative_eq!(g.dx, 0.02, max_relative = 1e-15);
        assert_relative_eq!(g.centers[0], -0.99, max_relative = 1e-14);
        assert_relative_eq!(g.centers[99], 0.99, max_relative = 1e-14);

        let g = build_grid(-1.0, 1.0, 2000).unwrap();
        assert_relative_eq!(g.dx, 0.001, max_relative = 1e-15);

        let g = build_grid(0.0, 1.0, 4).unwrap();
        assert_eq!(g.centers, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(g.centers.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(build_grid(1.0, 1.0, 10).is_err());
        assert!(build_grid(1.0, -1.0, 10).is_err());
        assert!(build_grid(-1.0, 1.0, 2).is_err());
        assert!(build_grid(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn gaussian_hand_values() {
        assert_eq!(gaussian_density(0.0, 0.01), 2.0);
        assert_eq!(gaussian_density(0.99, 0.01), 1.0);
        assert_relative_eq!(gaussian_density(0.01, 0.01), 1.606_530_659_712_633, max_relative = 1e-14);

        let grid = build_grid(-1.0, 1.0, 100).unwrap();
        let f = gaussian_initial_condition(&grid, 0.01, BoundaryPolicy::Transmissive).unwrap();
        let prims = f.primitives().unwrap();
        assert!(prims.iter().all(|p| p.u == 0.0 && p.eps == 0.0));
        assert!(gaussian_initial_condition(&grid, 0.0, BoundaryPolicy::Transmissive).is_err());
    }

    #[test]
    fn initial_mass_converges() {
        let grid = build_grid(-1.0, 1.0, 2000).unwrap();
        let f = gaussian_initial_condition(&grid, 0.01, BoundaryPolicy::Transmissive).unwrap();
        let exact = 2.0 + 0.01 * (2.0 * std::f64::consts::PI).sqrt();
        assert!((f.total_mass(grid.dx) - exact).abs() < 1e-4);
    }

    #[test]
    fn cell_averages_carry_the_exact_mass() {
        let exact = 2.0 + 0.01 * (2.0 * std::f64::consts::PI).sqrt();
        for n in [25, 50, 100] {
            let grid = build_grid(-1.0, 1.0, n).unwrap();
            let f = gaussian_initial_condition_with(&grid, 0.01, BoundaryPolicy::Transmissive, InitialSampling::Average).unwrap();
            assert!((f.total_mass(grid.dx) - exact).abs() < 1e-13, "n = {n}");
        }
        // wide bump: average ≈ center value
        let grid = build_grid(-1.0, 1.0, 400).unwrap();
        let a = gaussian_initial_condition_with(&grid, 0.3, BoundaryPolicy::Transmissive, InitialSampling::Average).unwrap();
        let c = gaussian_initial_condition(&grid, 0.3, BoundaryPolicy::Transmissive).unwrap();
        for (p, q) in a.interior().iter().zip(c.interior()) {
            assert!((p.rho - q.rho).abs() < 1e-4);
        }
        assert_eq!("average".parse::<InitialSampling>(), Ok(InitialSampling::Average));
        assert!("mid".parse::<InitialSampling>().is_err());
    }

    #[test]
    fn initial_condition_is_even() {
        let grid = build_grid(-1.0, 1.0, 101).unwrap();
        let f = gaussian_initial_condition(&grid, 0.3, BoundaryPolicy::Transmissive).unwrap();
        let rho: Vec<f64> = f.interior().iter().map(|c| c.rho).collect();
        let n = rho.len();
        for j in 0..n {
            assert!((rho[j] - rho[n - 1 - j]).abs() <= 1e-14);
        }
    }

    #[test]
    fn ghost_filling() {
        let mut v = [0, 1, 2, 3, 4, 0];
        fill_ghosts(&mut v, BoundaryPolicy::Transmissive);
        assert_eq!(v, [1, 1, 2, 3, 4, 4]);
        let once = v;
        fill_ghosts(&mut v, BoundaryPolicy::Transmissive);
        assert_eq!(v, once);

        let mut v = [0, 1, 2, 3, 4, 0];
        fill_ghosts(&mut v, BoundaryPolicy::Periodic);
        assert_eq!(v, [4, 1, 2, 3, 4, 1]);
        let once = v;
        fill_ghosts(&mut v, BoundaryPolicy::Periodic);
        assert_eq!(v, once);
    }

    #[test]
    fn boundary_parses() {
        assert_eq!("periodic".parse(), Ok(BoundaryPolicy::Periodic));
        assert_eq!("transmissive".parse(), Ok(BoundaryPolicy::Transmissive));
        assert!("reflective".parse::<BoundaryPolicy>().is_err());
    }
}

//! Direct solver for strictly diagonally dominant banded systems.
//!
//! Dominance makes elimination without pivoting stable, so the LU factors stay
//! inside the band. Periodic problems add a few entries outside the band; those
//! are handled as a low-rank correction (Sherman–Morrison–Woodbury).

use crate::error::{Error, Result};

/// Row-major band storage: entry `(i, j)` with `-kl ≤ j - i ≤ ku` lives at
/// `i * (kl + ku + 1) + (j - i + kl)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn identity(n: usize, kl: usize, ku: usize) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Five-band matrix from its diagonals, offsets -2..=2. `diags[k]` has
    /// length `n - |k - 2|` and starts at the first row the diagonal touches.
    pub fn pentadiagonal(diags: [&[f64]; 5]) -> Self {
        let n = diags[2].len();
        let mut m = Self::zeros(n, 2, 2);
        for (k, diag) in diags.iter().enumerate() {
            let off = k as isize - 2;
            for (t, &v) in diag.iter().enumerate() {
                let (i, j) = if off < 0 {
                    (t + off.unsigned_abs(), t)
                } else {
                    (t, t + off as usize)
                };
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Panics when `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += value;
    }

    fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Sum of absolute off-diagonal entries of row `i`.
    pub fn off_diagonal_sum(&self, i: usize) -> f64 {
        self.row_range(i)
            .filter(|&j| j != i)
            .map(|j| self.get(i, j).abs())
            .sum()
    }
}

/// LU factors of a banded matrix computed without pivoting.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
}

impl BandedLu {
    /// Callers are expected to have checked dominance; a zero pivot is still
    /// reported rather than producing infinities.
    pub fn factor(matrix: &BandedMatrix) -> Result<Self> {
        let mut lu = matrix.clone();
        let n = lu.n;
        for k in 0..n {
            let pivot = lu.get(k, k);
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SolverAssumption(format!("zero pivot in row {k}")));
            }
            let i_end = (k + lu.kl + 1).min(n);
            let j_end = (k + lu.ku + 1).min(n);
            for i in k + 1..i_end {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                if factor != 0.0 {
                    for j in k + 1..j_end {
                        let v = lu.get(k, j);
                        lu.add(i, j, -factor * v);
                    }
                }
            }
        }
        Ok(Self { lu })
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let lu = &self.lu;
        let n = lu.n;
        for i in 0..n {
            let start = i.saturating_sub(lu.kl);
            let s: f64 = (start..i).map(|j| lu.get(i, j) * rhs[j]).sum();
            rhs[i] -= s;
        }
        for i in (0..n).rev() {
            let end = (i + lu.ku + 1).min(n);
            let s: f64 = (i + 1..end).map(|j| lu.get(i, j) * rhs[j]).sum();
            rhs[i] = (rhs[i] - s) / lu.get(i, i);
        }
    }
}

/// `A x = rhs` where `A` is the banded matrix plus optional `corners`
/// `(row, col, value)` lying outside the band.
#[derive(Debug, Clone, PartialEq)]
pub struct PentadiagonalSystem {
    pub matrix: BandedMatrix,
    pub corners: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl PentadiagonalSystem {
    pub fn new(matrix: BandedMatrix, rhs: Vec<f64>) -> Self {
        Self {
            matrix,
            corners: Vec::new(),
            rhs,
        }
    }

    /// `A x` including the corner entries.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.matrix.mul_vec(x);
        for &(i, j, v) in &self.corners {
            y[i] += v * x[j];
        }
        y
    }

    pub fn residual_max(&self, x: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .map(|(ax, b)| (ax - b).abs())
            .fold(0.0, f64::max)
    }

    /// First row that is not strictly dominant, if any.
    pub fn dominance_violation(&self) -> Option<usize> {
        let mut off: Vec<f64> = (0..self.matrix.n)
            .map(|i| self.matrix.off_diagonal_sum(i))
            .collect();
        for &(i, _, v) in &self.corners {
            off[i] += v.abs();
        }
        (0..self.matrix.n).find(|&i| !(self.matrix.get(i, i).abs() > off[i]))
    }

    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        self.dominance_violation().is_none()
    }
}

/// Direct banded elimination; corner entries go through a Woodbury update.
pub fn solve_banded(system: &PentadiagonalSystem) -> Result<Vec<f64>> {
    let n = system.matrix.dim();
    if system.rhs.len() != n {
        return Err(Error::SolverAssumption(format!(
            "rhs length {} does not match matrix dimension {n}",
            system.rhs.len()
        )));
    }
    if let Some(row) = system.dominance_violation() {
        return Err(Error::SolverAssumption(format!(
            "row {row} is not strictly diagonally dominant"
        )));
    }
    for &(i, j, _) in &system.corners {
        if system.matrix.in_band(i, j) || i >= n || j >= n {
            return Err(Error::SolverAssumption(format!(
                "corner ({i}, {j}) must lie outside the band"
            )));
        }
    }

    let lu = BandedLu::factor(&system.matrix)?;
    let mut z = system.rhs.clone();
    lu.solve_in_place(&mut z);
    if system.corners.is_empty() {
        return Ok(z);
    }

    // A = B + U Vᵀ with U[:, k] = v_k e_{row_k}, V[:, k] = e_{col_k}
    let m = system.corners.len();
    let q: Vec<Vec<f64>> = system
        .corners
        .iter()
        .map(|&(i, _, v)| {
            let mut col = vec![0.0; n];
            col[i] = v;
            lu.solve_in_place(&mut col);
            col
        })
        .collect();
    // capacitance C = I + Vᵀ Q
    let mut cap = vec![vec![0.0; m]; m];
    for (r, &(_, col_r, _)) in system.corners.iter().enumerate() {
        for (c, qc) in q.iter().enumerate() {
            cap[r][c] = qc[col_r] + if r == c { 1.0 } else { 0.0 };
        }
    }
    let mut y: Vec<f64> = system.corners.iter().map(|&(_, j, _)| z[j]).collect();
    dense_solve(&mut cap, &mut y)?;
    for (k, qk) in q.iter().enumerate() {
        for (zi, qi) in z.iter_mut().zip(qk) {
            *zi -= qi * y[k];
        }
    }
    Ok(z)
}

/// Gaussian elimination with partial pivoting for the small capacitance matrix.
fn dense_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<()> {
    let m = b.len();
    for k in 0..m {
        let p = (k..m)
            .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
            .unwrap_or(k);
        if a[p][k] == 0.0 {
            return Err(Error::SolverAssumption("singular capacitance matrix".into()));
        }
        a.swap(k, p);
        b.swap(k, p);
        let (upper, lower) = a.split_at_mut(k + 1);
        let pivot = &upper[k];
        for (i, row) in lower.iter_mut().enumerate() {
            let f = row[k] / pivot[k];
            for (x, &p) in row[k..m].iter_mut().zip(&pivot[k..m]) {
                *x -= f * p;
            }
            b[k + 1 + i] -= f * b[k];
        }
    }
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| a[i][j] * b[j]).sum();
        b[i] = (b[i] - s) / a[i][i];
    }
    Ok(())
}

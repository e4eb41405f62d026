//! Interior-node linear algebra shared by the steady solvers, eigen
//! iterations, and the implicit time stepper.
//!
//! Vectors here live on the interior nodes only (Dirichlet boundary values
//! are identically zero), ordered like `Grid::interior_indices`. 1D systems
//! use a tridiagonal LU; 2D systems go through dense nalgebra factorizations,
//! which is adequate at the coarse 2D sizes this crate targets.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::domain::Grid;
use crate::error::FdeError;

/// Applies (−Δ_h − b) to an interior vector with implied zero boundary.
pub fn apply_neg_lap(grid: &Arc<Grid<f64>>, b: f64, u: &[f64]) -> Vec<f64> {
    match grid.dimension() {
        1 => {
            let n = grid.nodes_per_axis(0) - 2;
            let h2 = grid.spacing(0) * grid.spacing(0);
            let mut out = vec![0.0; n];
            for i in 0..n {
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                out[i] = (2.0 * u[i] - left - right) / h2 - b * u[i];
            }
            out
        }
        _ => {
            let (nx, ny) = (grid.nodes_per_axis(0) - 2, grid.nodes_per_axis(1) - 2);
            let hx2 = grid.spacing(0) * grid.spacing(0);
            let hy2 = grid.spacing(1) * grid.spacing(1);
            let mut out = vec![0.0; nx * ny];
            let at = |ix: isize, iy: isize, u: &[f64]| -> f64 {
                if ix < 0 || iy < 0 || ix >= nx as isize || iy >= ny as isize {
                    0.0
                } else {
                    u[iy as usize * nx + ix as usize]
                }
            };
            for iy in 0..ny as isize {
                for ix in 0..nx as isize {
                    let c = at(ix, iy, u);
                    let v = (2.0 * c - at(ix - 1, iy, u) - at(ix + 1, iy, u)) / hx2
                        + (2.0 * c - at(ix, iy - 1, u) - at(ix, iy + 1, u)) / hy2
                        - b * c;
                    out[iy as usize * nx as usize + ix as usize] = v;
                }
            }
            out
        }
    }
}

/// Tridiagonal system solved by LU without pivoting. Adequate for the
/// diagonally-dominant and SPD systems assembled here.
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, FdeError> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0];
        if piv == 0.0 {
            return Err(FdeError::Solver("tridiagonal pivot vanished".into()));
        }
        c[0] = self.sup[0] / piv;
        d[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - self.sub[i] * c[i - 1];
            if piv == 0.0 {
                return Err(FdeError::Solver("tridiagonal pivot vanished".into()));
            }
            if i + 1 < n {
                c[i] = self.sup[i] / piv;
            }
            d[i] = (rhs[i] - self.sub[i] * d[i - 1]) / piv;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        Ok(x)
    }
}

/// Assembles M = diag(extra) + s·(−Δ_h − b) on the interior of a 1D grid.
pub fn tridiag_system(grid: &Arc<Grid<f64>>, b: f64, extra: &[f64], s: f64) -> Tridiag {
    let n = grid.nodes_per_axis(0) - 2;
    let h2 = grid.spacing(0) * grid.spacing(0);
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for i in 0..n {
        diag[i] = extra[i] + s * (2.0 / h2 - b);
        if i > 0 {
            sub[i] = -s / h2;
        }
        if i + 1 < n {
            sup[i] = -s / h2;
        }
    }
    Tridiag { sub, diag, sup }
}

/// Assembles M = diag(extra) + s·(−Δ_h − b) on the interior of a 2D grid as
/// a dense matrix.
pub fn dense_system(grid: &Arc<Grid<f64>>, b: f64, extra: &[f64], s: f64) -> DMatrix<f64> {
    let (nx, ny) = (grid.nodes_per_axis(0) - 2, grid.nodes_per_axis(1) - 2);
    let hx2 = grid.spacing(0) * grid.spacing(0);
    let hy2 = grid.spacing(1) * grid.spacing(1);
    let n = nx * ny;
    let mut m = DMatrix::zeros(n, n);
    for iy in 0..ny {
        for ix in 0..nx {
            let row = iy * nx + ix;
            m[(row, row)] = extra[row] + s * (2.0 / hx2 + 2.0 / hy2 - b);
            if ix > 0 {
                m[(row, row - 1)] = -s / hx2;
            }
            if ix + 1 < nx {
                m[(row, row + 1)] = -s / hx2;
            }
            if iy > 0 {
                m[(row, row - nx)] = -s / hy2;
            }
            if iy + 1 < ny {
                m[(row, row + nx)] = -s / hy2;
            }
        }
    }
    m
}

/// Solves M x = rhs by dense LU with partial pivoting.
pub fn dense_solve(m: DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>, FdeError> {
    let lu = m.lu();
    let x = lu
        .solve(&DVector::from_column_slice(rhs))
        .ok_or_else(|| FdeError::Solver("dense LU solve failed (singular matrix)".into()))?;
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_grid;

    #[test]
    fn tridiag_solves_poisson() {
        // (−Δ_h)u = f with u = x(1−x), f = 2.
        let grid = build_grid(1, &[[0.0, 1.0]], &[21]).unwrap();
        let n = 19;
        let sys = tridiag_system(&grid, 0.0, &vec![0.0; n], 1.0);
        let rhs = vec![2.0; n];
        let x = sys.solve(&rhs).unwrap();
        for (k, slot) in grid.interior_indices().enumerate() {
            let xi = grid.position(slot)[0];
            assert!((x[k] - xi * (1.0 - xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_matches_apply() {
        let grid = build_grid(2, &[[0.0, 1.0], [0.0, 2.0]], &[6, 7]).unwrap();
        let n = grid.interior_count();
        let u: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let extra: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
        let m = dense_system(&grid, 0.4, &extra, 0.7);
        let direct: Vec<f64> = {
            let a = apply_neg_lap(&grid, 0.4, &u);
            (0..n).map(|i| extra[i] * u[i] + 0.7 * a[i]).collect()
        };
        let mv = &m * DVector::from_column_slice(&u);
        for i in 0..n {
            assert!((mv[i] - direct[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_neg_lap_quadratic_1d() {
        let grid = build_grid(1, &[[0.0, 1.0]], &[11]).unwrap();
        let u: Vec<f64> = grid
            .interior_indices()
            .map(|i| {
                let x = grid.position(i)[0];
                x * (1.0 - x)
            })
            .collect();
        let out = apply_neg_lap(&grid, 0.0, &u);
        for v in out {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }
}

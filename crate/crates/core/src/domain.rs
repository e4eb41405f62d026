//! Grids, the boundary-distance field, quadrature, and discrete differential
//! operators with homogeneous Dirichlet conditions.
//!
//! Everything here is generic over the floating scalar so the kernels can be
//! instantiated at f32 or f64; the rest of the crate uses the f64 aliases
//! exported from the crate root. Grids are uniform lattices on an interval or
//! an axis-aligned rectangle. The discrete Laplacian is the standard 3/5-point
//! stencil, quadrature is trapezoidal, and the Dirichlet energy is defined
//! edge-wise so that summation by parts
//!
//!   ∫(−Δ_h f)·f  =  Σ_edges (Δf)²·(edge measure)
//!
//! holds exactly (up to round-off) for Dirichlet f, not just to O(h²).

use std::sync::Arc;

use num_traits::{Float, FromPrimitive};

use crate::error::FdeError;

/// Floating scalar the domain layer is generic over.
pub trait Scalar:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Default + Send + Sync + 'static
{
}

/// Uniform lattice on [x0,x1] (1D) or [x0,x1]×[y0,y1] (2D), including the
/// boundary nodes. Node order is row-major: index = iy·nx + ix.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<F: Scalar> {
    dimension: usize,
    extents: [[F; 2]; 2],
    n: [usize; 2],
    h: [F; 2],
    boundary: Vec<bool>,
}

impl<F: Scalar> Grid<F> {
    /// `extents[axis] = [lo, hi]`; only `extents[..dimension]` are read.
    pub fn new(dimension: usize, extents: &[[F; 2]], n: &[usize]) -> Result<Self, FdeError> {
        if dimension != 1 && dimension != 2 {
            return Err(FdeError::Config {
                path: "grid.dimension".into(),
                message: format!("dimension must be 1 or 2, got {dimension}"),
            });
        }
        if extents.len() < dimension || n.len() < dimension {
            return Err(FdeError::Config {
                path: "grid".into(),
                message: "extents and node counts must cover every axis".into(),
            });
        }
        let mut ext = [[F::zero(), F::one()]; 2];
        let mut nn = [1usize; 2];
        let mut h = [F::one(); 2];
        for a in 0..dimension {
            let [lo, hi] = extents[a];
            if !(hi > lo) {
                return Err(FdeError::Config {
                    path: format!("grid.extents[{a}]"),
                    message: format!("degenerate extent [{lo}, {hi}]"),
                });
            }
            if n[a] < 3 {
                return Err(FdeError::Config {
                    path: format!("grid.n[{a}]"),
                    message: format!("need at least 3 nodes per axis, got {}", n[a]),
                });
            }
            ext[a] = [lo, hi];
            nn[a] = n[a];
            h[a] = (hi - lo) / F::from_usize(n[a] - 1).unwrap();
        }
        let mut grid = Grid {
            dimension,
            extents: ext,
            n: nn,
            h,
            boundary: Vec::new(),
        };
        grid.boundary = (0..grid.node_count()).map(|i| grid.on_boundary_raw(i)).collect();
        Ok(grid)
    }

    pub fn interval(lo: F, hi: F, n: usize) -> Result<Self, FdeError> {
        Self::new(1, &[[lo, hi]], &[n])
    }

    pub fn rectangle(x: [F; 2], y: [F; 2], nx: usize, ny: usize) -> Result<Self, FdeError> {
        Self::new(2, &[x, y], &[nx, ny])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn extent(&self, axis: usize) -> [F; 2] {
        self.extents[axis]
    }

    pub fn nodes_per_axis(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn spacing(&self, axis: usize) -> F {
        self.h[axis]
    }

    pub fn node_count(&self) -> usize {
        if self.dimension == 1 {
            self.n[0]
        } else {
            self.n[0] * self.n[1]
        }
    }

    pub fn interior_count(&self) -> usize {
        if self.dimension == 1 {
            self.n[0] - 2
        } else {
            (self.n[0] - 2) * (self.n[1] - 2)
        }
    }

    /// Lattice coordinates of a node index.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        if self.dimension == 1 {
            [idx, 0]
        } else {
            [idx % self.n[0], idx / self.n[0]]
        }
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        if self.dimension == 1 {
            ix
        } else {
            iy * self.n[0] + ix
        }
    }

    /// Physical position of a node.
    pub fn position(&self, idx: usize) -> [F; 2] {
        let [ix, iy] = self.multi_index(idx);
        let x = self.extents[0][0] + self.h[0] * F::from_usize(ix).unwrap();
        let y = if self.dimension == 2 {
            self.extents[1][0] + self.h[1] * F::from_usize(iy).unwrap()
        } else {
            F::zero()
        };
        [x, y]
    }

    fn on_boundary_raw(&self, idx: usize) -> bool {
        let [ix, iy] = self.multi_index(idx);
        if self.dimension == 1 {
            ix == 0 || ix == self.n[0] - 1
        } else {
            ix == 0 || ix == self.n[0] - 1 || iy == 0 || iy == self.n[1] - 1
        }
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.boundary[idx]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&i| !self.boundary[i])
    }

    /// Trapezoidal quadrature weight of a node (tensor product in 2D).
    pub fn quad_weight(&self, idx: usize) -> F {
        let [ix, iy] = self.multi_index(idx);
        let half = F::from_f64(0.5).unwrap();
        let wx = if ix == 0 || ix == self.n[0] - 1 { self.h[0] * half } else { self.h[0] };
        if self.dimension == 1 {
            wx
        } else {
            let wy = if iy == 0 || iy == self.n[1] - 1 { self.h[1] * half } else { self.h[1] };
            wx * wy
        }
    }

    /// Exact Euclidean distance to the boundary of the interval/rectangle.
    pub fn boundary_distance(&self, idx: usize) -> F {
        let [x, y] = self.position(idx);
        let dx = (x - self.extents[0][0]).min(self.extents[0][1] - x);
        if self.dimension == 1 {
            dx
        } else {
            let dy = (y - self.extents[1][0]).min(self.extents[1][1] - y);
            dx.min(dy)
        }
    }
}

/// Builds a uniform grid; `extents` and `n` must cover `dimension` axes.
pub fn build_grid<F: Scalar>(
    dimension: usize,
    extents: &[[F; 2]],
    n: &[usize],
) -> Result<Arc<Grid<F>>, FdeError> {
    Ok(Arc::new(Grid::new(dimension, extents, n)?))
}

/// Nodal values on a grid. `dirichlet` tags functions that are identically
/// zero on boundary nodes; operators that require the tag check it.
#[derive(Debug, Clone)]
pub struct GridFunction<F: Scalar> {
    grid: Arc<Grid<F>>,
    values: Vec<F>,
    dirichlet: bool,
}

impl<F: Scalar> GridFunction<F> {
    pub fn from_values(grid: Arc<Grid<F>>, values: Vec<F>) -> Result<Self, FdeError> {
        if values.len() != grid.node_count() {
            return Err(FdeError::Contract(format!(
                "value count {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        let dirichlet = values
            .iter()
            .zip(grid.boundary_mask())
            .all(|(v, &b)| !b || *v == F::zero());
        Ok(GridFunction { grid, values, dirichlet })
    }

    /// Samples `f` at node positions; boundary values are forced to exactly
    /// zero when `dirichlet` is set.
    pub fn sample(grid: &Arc<Grid<F>>, dirichlet: bool, mut f: impl FnMut([F; 2]) -> F) -> Self {
        let values = (0..grid.node_count())
            .map(|i| {
                if dirichlet && grid.is_boundary(i) {
                    F::zero()
                } else {
                    f(grid.position(i))
                }
            })
            .collect();
        GridFunction {
            grid: grid.clone(),
            values,
            dirichlet,
        }
    }

    pub fn zeros(grid: &Arc<Grid<F>>) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![F::zero(); grid.node_count()],
            dirichlet: true,
        }
    }

    pub fn grid(&self) -> &Arc<Grid<F>> {
        &self.grid
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn is_dirichlet(&self) -> bool {
        self.dirichlet
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replaces interior values, keeping the Dirichlet boundary at zero.
    /// `interior` is ordered like `grid.interior_indices()`.
    pub fn from_interior(grid: &Arc<Grid<F>>, interior: &[F]) -> Result<Self, FdeError> {
        if interior.len() != grid.interior_count() {
            return Err(FdeError::Contract(format!(
                "interior count {} does not match grid interior {}",
                interior.len(),
                grid.interior_count()
            )));
        }
        let mut values = vec![F::zero(); grid.node_count()];
        for (slot, &v) in grid.interior_indices().zip(interior.iter()) {
            values[slot] = v;
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values,
            dirichlet: true,
        })
    }

    pub fn interior_values(&self) -> Vec<F> {
        self.grid.interior_indices().map(|i| self.values[i]).collect()
    }

    pub fn max_norm(&self) -> F {
        self.values.iter().fold(F::zero(), |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> F {
        self.values.iter().fold(F::neg_infinity(), |m, v| m.max(*v))
    }

    pub fn min_value(&self) -> F {
        self.values.iter().fold(F::infinity(), |m, v| m.min(*v))
    }

    pub fn map(&self, mut f: impl FnMut(F) -> F) -> Self {
        let values = self.values.iter().map(|&v| f(v)).collect();
        GridFunction {
            grid: self.grid.clone(),
            values,
            dirichlet: self.dirichlet,
        }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(F, F) -> F) -> Result<Self, FdeError> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            values,
            dirichlet: self.dirichlet && other.dirichlet,
        })
    }

    pub fn scale(&self, a: F) -> Self {
        self.map(|v| v * a)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<(), FdeError> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(FdeError::Contract("grid mismatch between grid functions".into()))
        }
    }
}

/// The distance field d(x) = dist(x, ∂Ω) as a grid function. d = 0 exactly
/// on boundary nodes and d > 0 in the interior.
#[derive(Debug, Clone)]
pub struct DistanceField<F: Scalar>(pub GridFunction<F>);

impl<F: Scalar> DistanceField<F> {
    pub fn values(&self) -> &[F] {
        self.0.values()
    }

    pub fn grid(&self) -> &Arc<Grid<F>> {
        self.0.grid()
    }
}

/// Exact Euclidean distance to the domain boundary at every node.
pub fn distance_field<F: Scalar>(grid: &Arc<Grid<F>>) -> DistanceField<F> {
    let values = (0..grid.node_count()).map(|i| grid.boundary_distance(i)).collect();
    DistanceField(GridFunction {
        grid: grid.clone(),
        values,
        dirichlet: true,
    })
}

/// Second-order centered Laplacian at interior nodes; zero on boundary nodes
/// by convention. Requires the Dirichlet tag.
pub fn laplacian<F: Scalar>(f: &GridFunction<F>) -> Result<GridFunction<F>, FdeError> {
    if !f.is_dirichlet() {
        return Err(FdeError::Contract(
            "laplacian requires a Dirichlet-tagged function".into(),
        ));
    }
    let grid = f.grid();
    let v = f.values();
    let mut out = vec![F::zero(); v.len()];
    match grid.dimension() {
        1 => {
            let h2 = grid.spacing(0) * grid.spacing(0);
            for i in 1..grid.nodes_per_axis(0) - 1 {
                out[i] = (v[i - 1] - v[i] - v[i] + v[i + 1]) / h2;
            }
        }
        _ => {
            let (nx, ny) = (grid.nodes_per_axis(0), grid.nodes_per_axis(1));
            let hx2 = grid.spacing(0) * grid.spacing(0);
            let hy2 = grid.spacing(1) * grid.spacing(1);
            for iy in 1..ny - 1 {
                for ix in 1..nx - 1 {
                    let i = grid.index(ix, iy);
                    let dxx = (v[i - 1] - v[i] - v[i] + v[i + 1]) / hx2;
                    let dyy = (v[i - nx] - v[i] - v[i] + v[i + nx]) / hy2;
                    out[i] = dxx + dyy;
                }
            }
        }
    }
    Ok(GridFunction {
        grid: grid.clone(),
        values: out,
        dirichlet: true,
    })
}

/// Trapezoidal quadrature of f (times an optional weight on the same grid).
pub fn integrate<F: Scalar>(
    f: &GridFunction<F>,
    weight: Option<&GridFunction<F>>,
) -> Result<F, FdeError> {
    if let Some(w) = weight {
        f.check_same_grid(w)?;
    }
    let grid = f.grid();
    let mut acc = F::zero();
    for i in 0..grid.node_count() {
        let mut term = f.values()[i];
        if let Some(w) = weight {
            term = term * w.values()[i];
        }
        acc = acc + term * grid.quad_weight(i);
    }
    Ok(acc)
}

/// Edge-based squared-gradient sum approximating ∫|∇f|². For Dirichlet f it
/// equals integrate(−laplacian(f)·f) exactly (summation by parts).
pub fn dirichlet_energy<F: Scalar>(f: &GridFunction<F>) -> F {
    let grid = f.grid();
    let v = f.values();
    let half = F::from_f64(0.5).unwrap();
    match grid.dimension() {
        1 => {
            let h = grid.spacing(0);
            let mut acc = F::zero();
            for i in 0..grid.nodes_per_axis(0) - 1 {
                let d = v[i + 1] - v[i];
                acc = acc + d * d;
            }
            acc / h
        }
        _ => {
            let (nx, ny) = (grid.nodes_per_axis(0), grid.nodes_per_axis(1));
            let (hx, hy) = (grid.spacing(0), grid.spacing(1));
            let mut acc = F::zero();
            // x-edges: (Δx f)²/hx · hy, rows at the y-boundary carry weight ½.
            for iy in 0..ny {
                let wy = if iy == 0 || iy == ny - 1 { hy * half } else { hy };
                for ix in 0..nx - 1 {
                    let i = grid.index(ix, iy);
                    let d = v[i + 1] - v[i];
                    acc = acc + d * d / hx * wy;
                }
            }
            // y-edges: (Δy f)²/hy · hx, columns at the x-boundary carry weight ½.
            for ix in 0..nx {
                let wx = if ix == 0 || ix == nx - 1 { hx * half } else { hx };
                for iy in 0..ny - 1 {
                    let i = grid.index(ix, iy);
                    let d = v[i + nx] - v[i];
                    acc = acc + d * d / hy * wx;
                }
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval(n: usize) -> Arc<Grid<f64>> {
        build_grid(1, &[[0.0, 1.0]], &[n]).unwrap()
    }

    fn unit_square(n: usize) -> Arc<Grid<f64>> {
        build_grid(2, &[[0.0, 1.0], [0.0, 1.0]], &[n, n]).unwrap()
    }

    #[test]
    fn grid_1d_nodes_and_spacing() {
        let g = unit_interval(5);
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.spacing(0), 0.25);
        let xs: Vec<f64> = (0..5).map(|i| g.position(i)[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!((g.spacing(0) * 4.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_2d_boundary_count() {
        let g = unit_square(3);
        assert_eq!(g.node_count(), 9);
        let boundary = g.boundary_mask().iter().filter(|&&b| b).count();
        assert_eq!(boundary, 8);
        assert_eq!(g.interior_count(), 1);
    }

    #[test]
    fn grid_rejects_too_few_nodes() {
        assert!(build_grid(1, &[[0.0f64, 1.0]], &[2]).is_err());
        assert!(build_grid(1, &[[1.0f64, 1.0]], &[5]).is_err());
        assert!(build_grid(3, &[[0.0f64, 1.0]], &[5]).is_err());
    }

    #[test]
    fn grid_interior_neighbors_inside() {
        let g = unit_square(5);
        for i in g.interior_indices() {
            let [ix, iy] = g.multi_index(i);
            for (jx, jy) in [(ix - 1, iy), (ix + 1, iy), (ix, iy - 1), (ix, iy + 1)] {
                assert!(jx < 5 && jy < 5);
            }
        }
    }

    #[test]
    fn distance_1d() {
        let g = unit_interval(5);
        let d = distance_field(&g);
        assert_eq!(d.values()[1], 0.25);
        assert_eq!(d.values()[0], 0.0);
        assert_eq!(d.values()[2], 0.5);
    }

    #[test]
    fn distance_2d_center() {
        let g = unit_square(5);
        let d = distance_field(&g);
        let center = g.index(2, 2);
        assert_eq!(d.values()[center], 0.5);
        for i in 0..g.node_count() {
            if g.is_boundary(i) {
                assert_eq!(d.values()[i], 0.0);
            } else {
                assert!(d.values()[i] > 0.0);
            }
        }
    }

    #[test]
    fn distance_is_1_lipschitz() {
        let g = unit_square(17);
        let d = distance_field(&g);
        let n = g.node_count();
        for i in 0..n {
            let [xi, yi] = g.position(i);
            for j in (i + 1)..n {
                let [xj, yj] = g.position(j);
                let dist = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
                assert!((d.values()[i] - d.values()[j]).abs() <= dist + 1e-14);
            }
        }
    }

    #[test]
    fn laplacian_exact_on_quadratic() {
        let g = unit_interval(11);
        let f = GridFunction::sample(&g, true, |[x, _]| x * (1.0 - x));
        let lap = laplacian(&f).unwrap();
        for i in g.interior_indices() {
            assert!((lap.values()[i] + 2.0).abs() < 1e-12, "node {i}: {}", lap.values()[i]);
        }
        for i in 0..g.node_count() {
            if g.is_boundary(i) {
                assert_eq!(lap.values()[i], 0.0);
            }
        }
    }

    #[test]
    fn laplacian_zero_function() {
        let g = unit_square(7);
        let f = GridFunction::zeros(&g);
        let lap = laplacian(&f).unwrap();
        assert!(lap.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_requires_dirichlet_tag() {
        let g = unit_interval(7);
        let f = GridFunction::sample(&g, false, |[x, _]| x + 1.0);
        assert!(!f.is_dirichlet());
        assert!(laplacian(&f).is_err());
    }

    #[test]
    fn laplacian_second_order_on_sine() {
        // Error against −π²·sin(πx) must drop by ~4 per mesh halving.
        let err = |n: usize| {
            let g = unit_interval(n);
            let f = GridFunction::sample(&g, true, |[x, _]| (std::f64::consts::PI * x).sin());
            let lap = laplacian(&f).unwrap();
            g.interior_indices()
                .map(|i| {
                    let x = g.position(i)[0];
                    let exact = -std::f64::consts::PI.powi(2) * (std::f64::consts::PI * x).sin();
                    (lap.values()[i] - exact).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let (e1, e2) = (err(41), err(81));
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn integrate_constants_and_linears() {
        let g = unit_interval(9);
        let one = GridFunction::sample(&g, false, |_| 1.0);
        assert!((integrate(&one, None).unwrap() - 1.0).abs() < 1e-15);
        let x = GridFunction::sample(&g, false, |[x, _]| x);
        assert!((integrate(&x, None).unwrap() - 0.5).abs() < 1e-15);
        let d = distance_field(&g);
        assert!((integrate(&one, Some(&d.0)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn integrate_2d_constant() {
        let g = unit_square(7);
        let one = GridFunction::sample(&g, false, |_| 1.0);
        assert!((integrate(&one, None).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_rejects_grid_mismatch() {
        let g1 = unit_interval(9);
        let g2 = unit_interval(11);
        let f = GridFunction::sample(&g1, false, |_| 1.0);
        let w = GridFunction::sample(&g2, false, |_| 1.0);
        assert!(integrate(&f, Some(&w)).is_err());
    }

    #[test]
    fn energy_of_parabola() {
        // ∫(1−2x)² dx = 1/3; the edge sum is the midpoint rule, error O(h²).
        let g = unit_interval(101);
        let f = GridFunction::sample(&g, true, |[x, _]| x * (1.0 - x));
        let e = dirichlet_energy(&f);
        assert!((e - 1.0 / 3.0).abs() < 1e-4, "{e}");
        let z = GridFunction::zeros(&g);
        assert_eq!(dirichlet_energy(&z), 0.0);
    }

    #[test]
    fn energy_of_sine_converges() {
        let energy_err = |n: usize| {
            let g = unit_interval(n);
            let f = GridFunction::sample(&g, true, |[x, _]| (std::f64::consts::PI * x).sin());
            (dirichlet_energy(&f) - std::f64::consts::PI.powi(2) / 2.0).abs()
        };
        assert!(energy_err(201) < 1e-3);
        assert!(energy_err(101) / energy_err(201) > 3.0);
    }

    #[test]
    fn summation_by_parts_exact_1d() {
        let g = unit_interval(33);
        let f = GridFunction::sample(&g, true, |[x, _]| (3.1 * x).sin() * x * (1.0 - x) + 0.3 * x * (1.0 - x));
        let lap = laplacian(&f).unwrap();
        let lhs = integrate(&lap.zip_with(&f, |a, b| -a * b).unwrap(), None).unwrap();
        let rhs = dirichlet_energy(&f);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn summation_by_parts_exact_2d() {
        let g = unit_square(17);
        let f = GridFunction::sample(&g, true, |[x, y]| {
            (std::f64::consts::PI * x).sin() * y * (1.0 - y) * (0.5 + x)
        });
        let lap = laplacian(&f).unwrap();
        let lhs = integrate(&lap.zip_with(&f, |a, b| -a * b).unwrap(), None).unwrap();
        let rhs = dirichlet_energy(&f);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn generic_layer_works_at_f32() {
        let g = build_grid(1, &[[0.0f32, 1.0f32]], &[17]).unwrap();
        let f = GridFunction::sample(&g, true, |[x, _]| x * (1.0 - x));
        let lap = laplacian(&f).unwrap();
        for i in g.interior_indices() {
            assert!((lap.values()[i] + 2.0).abs() < 1e-3);
        }
        let e = dirichlet_energy(&f);
        assert!((e - 1.0 / 3.0).abs() < 1e-2);
    }
}

//! Cell-centered rectangular grid and the Neumann-compatible operators on it.
//!
//! Values are stored row-major by `y` then `x`: cell `(i, j)` with
//! `0 ≤ i < nx`, `0 ≤ j < ny` lives at index `j * nx + i` and has its center
//! at `((i + ½) hx, (j + ½) hy)`. Homogeneous Neumann data are imposed by
//! reflecting the boundary cell into a ghost cell, so every boundary face
//! carries zero flux.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Rectangle `(0, lx) × (0, ly)` split into `nx × ny` equal cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 4;

    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < Self::MIN_CELLS || ny < Self::MIN_CELLS {
            return Err(Error::InvalidGrid("need at least 4 cells per axis"));
        }
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(Error::InvalidGrid("side lengths must be positive and finite"));
        }
        Ok(Grid { nx, ny, lx, ly })
    }

    /// Square `[0, side]²` with `n × n` cells.
    pub fn square(n: usize, side: f64) -> Result<Self> {
        Self::new(n, n, side, side)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    /// Measure of the domain.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Diameter of the rectangle, i.e. the length of its diagonal.
    pub fn diam(&self) -> f64 {
        libm::sqrt(self.lx * self.lx + self.ly * self.ly)
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx(), (j as f64 + 0.5) * self.hy())
    }
}

/// Cell-centered values on a [`Grid`]; every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField("length does not match the grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("non-finite entry"));
        }
        Ok(ScalarField { grid, values })
    }

    /// Callers guarantee the length and finiteness invariants.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        ScalarField { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_raw(grid, vec![0.0; grid.len()])
    }

    /// Samples `f(x, y)` at cell centers.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = grid.center(i, j);
                values.push(f(x, y));
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map; fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidField("fields live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values)
    }

    /// Midpoint-rule integral over the domain.
    pub fn integral(&self) -> f64 {
        integrate(self)
    }
}

/// Midpoint quadrature: `hx·hy·Σ values`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid.cell_area() * f.values.iter().sum::<f64>()
}

/// Discrete `L²` inner product `∫ f g`.
pub fn inner(f: &ScalarField, g: &ScalarField) -> f64 {
    debug_assert_eq!(f.grid, g.grid);
    f.grid.cell_area() * f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<f64>()
}

/// Five-point Laplacian with reflected ghost cells, written into `out`.
pub(crate) fn laplacian_into(grid: &Grid, f: &[f64], out: &mut [f64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let ihx2 = 1.0 / (grid.hx() * grid.hx());
    let ihy2 = 1.0 / (grid.hy() * grid.hy());
    for j in 0..ny {
        let row = j * nx;
        for i in 0..nx {
            let k = row + i;
            let c = f[k];
            let west = if i > 0 { f[k - 1] } else { c };
            let east = if i + 1 < nx { f[k + 1] } else { c };
            let south = if j > 0 { f[k - nx] } else { c };
            let north = if j + 1 < ny { f[k + nx] } else { c };
            out[k] = (west - 2.0 * c + east) * ihx2 + (south - 2.0 * c + north) * ihy2;
        }
    }
}

/// Neumann Laplacian `Δ_h f`. The stencil is conservative, so the result
/// integrates to zero up to round-off.
pub fn laplacian_neumann(f: &ScalarField) -> ScalarField {
    let mut out = vec![0.0; f.values.len()];
    laplacian_into(&f.grid, &f.values, &mut out);
    ScalarField::from_raw(f.grid, out)
}

/// Centered differences in the interior. At boundary cells the ghost value
/// equals the cell value, so the boundary face contributes no difference.
pub fn gradient_centered(f: &ScalarField) -> (ScalarField, ScalarField) {
    let grid = f.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let (ihx, ihy) = (0.5 / grid.hx(), 0.5 / grid.hy());
    let v = &f.values;
    let mut gx = vec![0.0; v.len()];
    let mut gy = vec![0.0; v.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            let west = if i > 0 { v[k - 1] } else { v[k] };
            let east = if i + 1 < nx { v[k + 1] } else { v[k] };
            let south = if j > 0 { v[k - nx] } else { v[k] };
            let north = if j + 1 < ny { v[k + nx] } else { v[k] };
            gx[k] = (east - west) * ihx;
            gy[k] = (north - south) * ihy;
        }
    }
    (ScalarField::from_raw(grid, gx), ScalarField::from_raw(grid, gy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn unit(n: usize) -> Grid {
        Grid::square(n, 1.0).unwrap()
    }

    fn sup_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(3, 8, 1.0, 1.0).is_err());
        assert!(Grid::new(8, 8, 0.0, 1.0).is_err());
        assert!(Grid::new(8, 8, 1.0, f64::NAN).is_err());
        let g = Grid::new(8, 4, 3.0, 4.0).unwrap();
        assert_eq!(g.diam() * g.diam(), 25.0);
        assert_eq!(g.area(), 12.0);
        assert_eq!(g.hx(), 0.375);
        assert_eq!(g.len(), 32);
    }

    #[test]
    fn field_rejects_bad_data() {
        let g = unit(4);
        assert!(ScalarField::new(g, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::INFINITY;
        assert!(ScalarField::new(g, v).is_err());
        assert!(ScalarField::constant(g, 1.0).unwrap().map(|x| x / 0.0).is_err());
    }

    #[test]
    fn integrate_constants() {
        assert_eq!(integrate(&ScalarField::constant(unit(16), 2.0).unwrap()), 2.0);
        assert_eq!(integrate(&ScalarField::zeros(unit(16))), 0.0);
    }

    #[test]
    fn midpoint_cosine_cancels() {
        // Midpoints pair up as x and 1 − x, where cos(πx) changes sign.
        let f = ScalarField::from_fn(unit(64), |x, _| libm::cos(PI * x)).unwrap();
        let mut direct = 0.0;
        for i in 0..32 {
            let x = (i as f64 + 0.5) / 64.0;
            direct += libm::cos(PI * x) + libm::cos(PI * (1.0 - x));
        }
        assert!(direct.abs() < 1e-13);
        assert!(integrate(&f).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let f = ScalarField::constant(Grid::new(6, 9, 2.0, 0.5).unwrap(), 3.7).unwrap();
        assert!(laplacian_neumann(&f).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cosine_is_a_discrete_eigenvector() {
        let g = Grid::new(40, 24, 2.0, 1.5).unwrap();
        for k in 1..4 {
            let kk = k as f64 * PI / g.lx();
            let f = ScalarField::from_fn(g, |x, _| libm::cos(kk * x)).unwrap();
            let hx = g.hx();
            let discrete = -(2.0 / (hx * hx)) * (1.0 - libm::cos(kk * hx));
            let lap = laplacian_neumann(&f);
            for (l, v) in lap.values().iter().zip(f.values()) {
                assert!((l - discrete * v).abs() < 1e-10 * discrete.abs());
            }
            // and the continuum eigenvalue is second-order close
            assert!((discrete + kk * kk).abs() < kk.powi(4) * hx * hx / 10.0);
        }
    }

    #[test]
    fn laplacian_and_gradient_converge_at_second_order() {
        let errors = |n: usize| {
            let g = unit(n);
            let f = ScalarField::from_fn(g, |x, y| libm::cos(PI * x) * libm::cos(2.0 * PI * y)).unwrap();
            let exact_lap =
                ScalarField::from_fn(g, |x, y| -5.0 * PI * PI * libm::cos(PI * x) * libm::cos(2.0 * PI * y)).unwrap();
            let exact_gx = ScalarField::from_fn(g, |x, y| -PI * libm::sin(PI * x) * libm::cos(2.0 * PI * y)).unwrap();
            let (gx, _) = gradient_centered(&f);
            (sup_diff(&laplacian_neumann(&f), &exact_lap), sup_diff(&gx, &exact_gx))
        };
        let (l1, g1) = errors(32);
        let (l2, g2) = errors(64);
        let (l3, g3) = errors(128);
        for ratio in [l1 / l2, l2 / l3, g1 / g2, g2 / g3] {
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let f = ScalarField::constant(unit(8), -2.0).unwrap();
        let (gx, gy) = gradient_centered(&f);
        assert!(gx.values().iter().chain(gy.values()).all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_face_carries_no_difference() {
        // A field that is flat across the first interior face: the only other
        // face of the boundary cell is the reflected one, so the result is 0.
        let g = unit(8);
        let f = ScalarField::from_fn(g, |x, _| if x < 0.2 { 1.0 } else { 1.0 + x * x }).unwrap();
        let (gx, _) = gradient_centered(&f);
        for j in 0..8 {
            assert_eq!(gx.get(0, j), 0.0);
            let expected = (f.get(7, j) - f.get(6, j)) / (2.0 * g.hx());
            assert_eq!(gx.get(7, j), expected);
        }
    }

    fn field_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, n * n)
    }

    proptest! {
        #[test]
        fn quadrature_is_linear(f in field_strategy(8), g in field_strategy(8), a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let grid = unit(8);
            let ff = ScalarField::new(grid, f).unwrap();
            let gg = ScalarField::new(grid, g).unwrap();
            let combo = ff.zip_map(&gg, |x, y| a * x + b * y).unwrap();
            let lhs = integrate(&combo);
            let rhs = a * integrate(&ff) + b * integrate(&gg);
            let scale = a.abs() * integrate(&ff.map(f64::abs).unwrap()) + b.abs() * integrate(&gg.map(f64::abs).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-13 * scale.max(1e-300));
        }

        #[test]
        fn laplacian_is_conservative(f in field_strategy(12)) {
            let field = ScalarField::new(Grid::new(12, 12, 1.3, 0.7).unwrap(), f).unwrap();
            let total = integrate(&laplacian_neumann(&field));
            prop_assert!(total.abs() <= 1e-12 * field.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300));
        }
    }
}

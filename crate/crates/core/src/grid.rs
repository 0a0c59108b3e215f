//! Grid-sampled fields on an elliptical domain.
//!
//! A field on the ellipse `(a1, a2)` is stored on the uniform lattice
//! `ξ ∈ [−1, 1]²` of the mapped unit disk, `ξα = yα / aα`. Every lattice node
//! carries a value (nodes outside the disk hold the field's extension or
//! zero); the mask selects nodes strictly inside the disk. Derivatives use
//! centered differences in `ξ` with the chain-rule factors `1/aα` and `1/aα²`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SmoothField;
use crate::geometry::{EllipseDomain, Point};

/// Uniform lattice on `[−1, 1]²` with `cells` intervals per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiskGrid {
    cells: usize,
}

impl DiskGrid {
    pub const MIN_CELLS: usize = 16;

    pub fn new(cells: usize) -> Result<Self> {
        if cells < Self::MIN_CELLS {
            return Err(Error::Domain(format!(
                "grid resolution must be at least {}, got {cells}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Nodes per side.
    pub fn side(&self) -> usize {
        self.cells + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing in mapped coordinates.
    pub fn spacing(&self) -> f64 {
        2.0 / self.cells as f64
    }

    pub fn xi(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.spacing()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.side() + i
    }

    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.side(), k / self.side())
    }

    pub fn mapped_radius_sq(&self, i: usize, j: usize) -> f64 {
        let (x, y) = (self.xi(i), self.xi(j));
        x * x + y * y
    }

    /// Strictly inside the unit disk.
    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.mapped_radius_sq(i, j) < 1.0 - 1e-12
    }

    /// Same lattice refined by a factor of two.
    pub fn refined(&self) -> Self {
        Self {
            cells: self.cells * 2,
        }
    }
}

/// Scalar samples on a [`DiskGrid`] attached to an ellipse.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: EllipseDomain,
    grid: DiskGrid,
    values: Vec<f64>,
}

/// Gradient of a grid field, one component per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub d1: ScalarField,
    pub d2: ScalarField,
}

impl ScalarField {
    pub fn from_values(domain: EllipseDomain, grid: DiskGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} samples for a {}x{} lattice, got {}",
                grid.len(),
                grid.side(),
                grid.side(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at lattice index {k}")));
        }
        Ok(Self {
            domain,
            grid,
            values,
        })
    }

    /// Samples `f` at every lattice node.
    pub fn sample(domain: EllipseDomain, grid: DiskGrid, f: impl Fn(Point) -> f64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = grid.coords(k);
                f(domain.to_physical([grid.xi(i), grid.xi(j)]))
            })
            .collect();
        Self {
            domain,
            grid,
            values,
        }
    }

    /// Samples a [`SmoothField`] at every lattice node.
    pub fn sample_field(domain: EllipseDomain, grid: DiskGrid, f: &dyn SmoothField) -> Self {
        Self::sample(domain, grid, |y| f.value(y))
    }

    pub fn zeros(domain: EllipseDomain, grid: DiskGrid) -> Self {
        Self {
            domain,
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn domain(&self) -> &EllipseDomain {
        &self.domain
    }

    pub fn grid(&self) -> DiskGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Physical coordinates of node `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> Point {
        self.domain.to_physical([self.grid.xi(i), self.grid.xi(j)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain: self.domain,
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same lattice.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            domain: self.domain,
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Zeroes every node that is not strictly inside the disk.
    pub fn masked(&self) -> Self {
        let mut out = self.clone();
        for j in 0..self.grid.side() {
            for i in 0..self.grid.side() {
                if !self.grid.is_inside(i, j) {
                    let k = self.grid.index(i, j);
                    out.values[k] = 0.0;
                }
            }
        }
        out
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape(format!(
                "fields live on different lattices ({} vs {} cells)",
                self.grid.cells(),
                other.grid.cells()
            )));
        }
        if !same_domain(&self.domain, &other.domain) {
            return Err(Error::Shape(format!(
                "fields live on different ellipses ({:?} vs {:?})",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    /// Inside-node iterator yielding `(i, j, value)`.
    pub fn inside(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let side = self.grid.side();
        (0..side).flat_map(move |j| {
            (0..side)
                .filter(move |&i| self.grid.is_inside(i, j))
                .map(move |i| (i, j, self.values[self.grid.index(i, j)]))
        })
    }

    /// Masked-cell quadrature over the ellipse: the lattice sum over nodes
    /// strictly inside the disk, each weighted by its cell area.
    pub fn integrate(&self) -> f64 {
        let h = self.grid.spacing();
        let cell = h * h * self.domain.a1 * self.domain.a2;
        self.inside().map(|(_, _, v)| v).sum::<f64>() * cell
    }

    /// Maximum of `|value|` over inside nodes with mapped radius `≤ radius`.
    pub fn max_abs_within(&self, radius: f64) -> f64 {
        let r2 = radius * radius;
        self.inside()
            .filter(|&(i, j, _)| self.grid.mapped_radius_sq(i, j) <= r2)
            .fold(0.0, |m, (_, _, v)| m.max(v.abs()))
    }

    /// Discrete L2 norm over inside nodes (masked-cell quadrature of `v²`).
    pub fn l2_norm(&self) -> f64 {
        self.map(|v| v * v).integrate().sqrt()
    }

    fn second_diff(&self, i: usize, j: usize, axis: usize) -> f64 {
        let n = self.grid.cells();
        let h = self.grid.spacing();
        let at = |t: isize| -> f64 {
            let (ii, jj) = if axis == 0 {
                (i as isize + t, j as isize)
            } else {
                (i as isize, j as isize + t)
            };
            self.values[self.grid.index(ii as usize, jj as usize)]
        };
        let pos = if axis == 0 { i } else { j };
        let d = if pos == 0 {
            2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)
        } else if pos == n {
            2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)
        } else {
            at(1) - 2.0 * at(0) + at(-1)
        };
        d / (h * h)
    }

    fn first_diff(&self, i: usize, j: usize, axis: usize) -> f64 {
        let n = self.grid.cells();
        let h = self.grid.spacing();
        let at = |t: isize| -> f64 {
            let (ii, jj) = if axis == 0 {
                (i as isize + t, j as isize)
            } else {
                (i as isize, j as isize + t)
            };
            self.values[self.grid.index(ii as usize, jj as usize)]
        };
        let pos = if axis == 0 { i } else { j };
        if pos == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if pos == n {
            (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h)
        } else {
            (at(1) - at(-1)) / (2.0 * h)
        }
    }

    fn map_nodes(&self, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let grid = self.grid;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = grid.coords(k);
                f(i, j)
            })
            .collect();
        Self {
            domain: self.domain,
            grid,
            values,
        }
    }
}

impl SmoothField for ScalarField {
    /// Bilinear interpolation on the mapped lattice, clamped to the square.
    fn value(&self, y: Point) -> f64 {
        let h = self.grid.spacing();
        let n = self.grid.cells();
        let locate = |x: f64| -> (usize, f64) {
            let t = ((x + 1.0) / h).clamp(0.0, n as f64);
            let i = (t.floor() as usize).min(n - 1);
            (i, t - i as f64)
        };
        let (i, tx) = locate(y[0] / self.domain.a1);
        let (j, ty) = locate(y[1] / self.domain.a2);
        let v = |a, b| self.values[self.grid.index(a, b)];
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }

    fn length_scale(&self) -> f64 {
        self.domain.scale()
    }
}

fn same_domain(a: &EllipseDomain, b: &EllipseDomain) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
    close(a.a1, b.a1) && close(a.a2, b.a2)
}

/// Discrete Laplacian `(1/a1²)∂²/∂ξ1² + (1/a2²)∂²/∂ξ2²`; centered in the
/// lattice interior, one-sided (third-order exact) on the lattice edge.
pub fn field_laplacian(f: &ScalarField) -> ScalarField {
    let (c1, c2) = (
        1.0 / (f.domain.a1 * f.domain.a1),
        1.0 / (f.domain.a2 * f.domain.a2),
    );
    f.map_nodes(|i, j| c1 * f.second_diff(i, j, 0) + c2 * f.second_diff(i, j, 1))
}

/// Discrete physical gradient `(∂/∂y1, ∂/∂y2)`.
pub fn field_gradient(f: &ScalarField) -> GradientField {
    let (a1, a2) = (f.domain.a1, f.domain.a2);
    GradientField {
        d1: f.map_nodes(|i, j| f.first_diff(i, j, 0) / a1),
        d2: f.map_nodes(|i, j| f.first_diff(i, j, 1) / a2),
    }
}

/// `∇·(w ∇f)` expanded by the product rule, `∇w·∇f + w Δf`.
pub fn div_weighted_grad(w: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
    w.check_same(f)?;
    let gw = field_gradient(w);
    let gf = field_gradient(f);
    let lf = field_laplacian(f);
    Ok(f.map_nodes(|i, j| {
        let k = f.grid.index(i, j);
        gw.d1.values[k] * gf.d1.values[k] + gw.d2.values[k] * gf.d2.values[k] + w.values[k] * lf.values[k]
    }))
}

/// `∇·(w ∇f)` in conservative flux form: face-averaged weights times
/// centered flux differences. Lattice-edge nodes fall back to
/// [`div_weighted_grad`].
pub fn div_weighted_grad_conservative(w: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
    let fallback = div_weighted_grad(w, f)?;
    let n = f.grid.cells();
    let h = f.grid.spacing();
    let (c1, c2) = (
        1.0 / (f.domain.a1 * f.domain.a1 * h * h),
        1.0 / (f.domain.a2 * f.domain.a2 * h * h),
    );
    let g = f.grid;
    Ok(f.map_nodes(|i, j| {
        if i == 0 || j == 0 || i == n || j == n {
            return fallback.values[g.index(i, j)];
        }
        let fv = |a, b| f.values[g.index(a, b)];
        let wv = |a, b| w.values[g.index(a, b)];
        let (f0, w0) = (fv(i, j), wv(i, j));
        let flux = |fa: f64, wa: f64| 0.5 * (w0 + wa) * (fa - f0);
        c1 * (flux(fv(i + 1, j), wv(i + 1, j)) + flux(fv(i - 1, j), wv(i - 1, j)))
            + c2 * (flux(fv(i, j + 1), wv(i, j + 1)) + flux(fv(i, j - 1), wv(i, j - 1)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ellipse() -> EllipseDomain {
        EllipseDomain::new(1.7, 0.6).unwrap()
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let g = DiskGrid::new(32).unwrap();
        let f = ScalarField::sample(ellipse(), g, |y| y[0] * y[0]);
        let l = field_laplacian(&f);
        for v in l.values() {
            assert_relative_eq!(*v, 2.0, epsilon = 1e-9);
        }
        let d = ellipse();
        let th = ScalarField::sample(d, g, |y| d.theta(y));
        let expected = -2.0 * (1.0 / (d.a1 * d.a1) + 1.0 / (d.a2 * d.a2));
        for v in field_laplacian(&th).values() {
            assert_relative_eq!(*v, expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn laplacian_second_order_on_smooth_field() {
        let d = ellipse();
        let exact = |y: Point| -(1.0 / (d.a1 * d.a1) + 1.0 / (d.a2 * d.a2)) * (y[0] / d.a1).sin() * (y[1] / d.a2).cos();
        let err = |cells| {
            let g = DiskGrid::new(cells).unwrap();
            let f = ScalarField::sample(d, g, |y| (y[0] / d.a1).sin() * (y[1] / d.a2).cos());
            let l = field_laplacian(&f);
            l.inside()
                .map(|(i, j, v)| (v - exact(l.point(i, j))).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(32) / err(64)).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn unit_weight_div_matches_laplacian() {
        let d = ellipse();
        let g = DiskGrid::new(24).unwrap();
        let f = ScalarField::sample(d, g, |y| (y[0] * 0.8).exp() * y[1].sin());
        let one = ScalarField::sample(d, g, |_| 1.0);
        let l = field_laplacian(&f);
        let a = div_weighted_grad(&one, &f).unwrap();
        let b = div_weighted_grad_conservative(&one, &f).unwrap();
        for k in 0..g.len() {
            assert_relative_eq!(a.values()[k], l.values()[k], epsilon = 1e-12 * l.values()[k].abs().max(1.0));
            let (i, j) = g.coords(k);
            if i > 0 && j > 0 && i < g.cells() && j < g.cells() {
                assert_relative_eq!(b.values()[k], l.values()[k], epsilon = 1e-9 * l.values()[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn mismatched_grids_are_shape_errors() {
        let d = ellipse();
        let a = ScalarField::zeros(d, DiskGrid::new(16).unwrap());
        let b = ScalarField::zeros(d, DiskGrid::new(32).unwrap());
        assert!(matches!(div_weighted_grad(&a, &b), Err(Error::Shape(_))));
        let c = ScalarField::zeros(EllipseDomain::new(1.0, 1.0).unwrap(), DiskGrid::new(16).unwrap());
        assert!(matches!(a.check_same(&c), Err(Error::Shape(_))));
        assert!(matches!(
            ScalarField::from_values(d, DiskGrid::new(16).unwrap(), vec![0.0; 3]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn grid_rejects_coarse_resolution() {
        assert!(DiskGrid::new(8).is_err());
    }

    #[test]
    fn bilinear_reproduces_nodes() {
        let d = ellipse();
        let g = DiskGrid::new(16).unwrap();
        let f = ScalarField::sample(d, g, |y| 3.0 * y[0] - y[1] + 0.5);
        for (i, j, v) in f.inside().collect::<Vec<_>>() {
            assert_relative_eq!(f.value(f.point(i, j)), v, epsilon = 1e-12);
        }
        // bilinear is exact on affine fields
        assert_relative_eq!(f.value([0.123, -0.2]), 3.0 * 0.123 + 0.2 + 0.5, epsilon = 1e-12);
    }
}

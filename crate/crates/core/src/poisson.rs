//! Dirichlet Poisson solver `Δu = f` in `ω`, `u = 0` on the contour.
//!
//! The problem is discretized on the mapped unit-disk lattice. Interior
//! rows use the five-point stencil. A neighbour that falls outside the disk
//! is replaced by linear extrapolation through the boundary crossing, which
//! only adds to the diagonal and keeps the matrix symmetric positive
//! definite. The system is solved by Jacobi-preconditioned conjugate
//! gradients.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::EllipseDomain;
use crate::grid::{DiskGrid, ScalarField};

/// Relative residual target `‖b − Au‖/‖b‖`.
pub const TOLERANCE: f64 = 1e-10;
/// Iteration budget per lattice point along one side.
pub const ITERATIONS_PER_SIDE: usize = 50;
const MIN_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
    pub unknowns: usize,
}

struct Row {
    node: usize,
    diag: f64,
    neighbours: [(usize, f64); 4],
    count: usize,
}

struct System {
    rows: Vec<Row>,
}

impl System {
    fn assemble(domain: &EllipseDomain, grid: DiskGrid) -> Self {
        let n = grid.cells();
        let h = grid.spacing();
        let mut unknown = vec![usize::MAX; grid.len()];
        let mut nodes = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                if grid.is_inside(i, j) {
                    unknown[grid.index(i, j)] = nodes.len();
                    nodes.push((i, j));
                }
            }
        }
        let c = [
            1.0 / (domain.a1 * domain.a1 * h * h),
            1.0 / (domain.a2 * domain.a2 * h * h),
        ];
        let rows = nodes
            .par_iter()
            .map(|&(i, j)| {
                let (x, y) = (grid.xi(i), grid.xi(j));
                let mut row = Row {
                    node: grid.index(i, j),
                    diag: 0.0,
                    neighbours: [(0, 0.0); 4],
                    count: 0,
                };
                // (di, dj, axis, coordinate along axis, transverse coordinate)
                let steps: [(isize, isize, usize, f64, f64); 4] =
                    [(1, 0, 0, x, y), (-1, 0, 0, -x, y), (0, 1, 1, y, x), (0, -1, 1, -y, x)];
                for (di, dj, axis, along, across) in steps {
                    let (ni, nj) = (i as isize + di, j as isize + dj);
                    let inside = ni >= 0
                        && nj >= 0
                        && ni as usize <= n
                        && nj as usize <= n
                        && grid.is_inside(ni as usize, nj as usize);
                    if inside {
                        row.diag += c[axis];
                        row.neighbours[row.count] = (unknown[grid.index(ni as usize, nj as usize)], -c[axis]);
                        row.count += 1;
                    } else {
                        let reach = (1.0 - across * across).max(0.0).sqrt() - along;
                        let fraction = (reach / h).clamp(MIN_FRACTION, 1.0);
                        row.diag += c[axis] / fraction;
                    }
                }
                row
            })
            .collect();
        Self { rows }
    }

    /// `out = A x`; rows are stored in unknown order.
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(k, o)| {
            let row = &self.rows[k];
            let mut acc = row.diag * x[k];
            for &(m, w) in &row.neighbours[..row.count] {
                acc += w * x[m];
            }
            *o = acc;
        });
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `Δu = rhs` on `domain` with `u = 0` on the contour.
pub fn poisson_solve_dirichlet(domain: &EllipseDomain, rhs: &ScalarField) -> Result<ScalarField> {
    poisson_solve_with_stats(domain, rhs).map(|(u, _)| u)
}

pub fn poisson_solve_with_stats(domain: &EllipseDomain, rhs: &ScalarField) -> Result<(ScalarField, SolveStats)> {
    if rhs.domain() != domain {
        return Err(Error::Shape(format!(
            "right-hand side sampled on {:?}, solve requested on {:?}",
            rhs.domain(),
            domain
        )));
    }
    let grid = rhs.grid();
    let system = System::assemble(domain, grid);
    let n = system.rows.len();
    let b: Vec<f64> = system.rows.iter().map(|r| -rhs.values()[r.node]).collect();
    let b_norm = dot(&b, &b).sqrt();
    let mut x = vec![0.0; n];
    let mut stats = SolveStats {
        iterations: 0,
        relative_residual: 0.0,
        unknowns: n,
    };
    if b_norm > 0.0 {
        let max_iter = ITERATIONS_PER_SIDE * grid.side();
        let inv_diag: Vec<f64> = system.rows.iter().map(|r| 1.0 / r.diag).collect();
        let mut r = b.clone();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let mut rel = 1.0;
        let mut it = 0;
        while it < max_iter {
            system.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            it += 1;
            rel = dot(&r, &r).sqrt() / b_norm;
            if rel <= TOLERANCE {
                break;
            }
            for k in 0..n {
                z[k] = r[k] * inv_diag[k];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        // Confirm with the true residual rather than the recursively updated one.
        system.apply(&x, &mut ap);
        let true_res: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
        rel = rel.max(dot(&true_res, &true_res).sqrt() / b_norm);
        stats.iterations = it;
        stats.relative_residual = rel;
        if !(rel <= TOLERANCE * 10.0) {
            return Err(Error::Solver {
                message: format!("conjugate gradients stalled on {n} unknowns"),
                iterations: it,
                residual: rel,
            });
        }
    }
    let mut values = vec![0.0; grid.len()];
    for (row, v) in system.rows.iter().zip(&x) {
        values[row.node] = *v;
    }
    Ok((ScalarField::from_values(*domain, grid, values)?, stats))
}

/// `Θ = −a1²a2²/(2(a1² + a2²)) (1 − y1²/a1² − y2²/a2²)`, the solution of
/// `ΔΘ = 1` vanishing on the contour.
pub fn unit_source_solution(domain: &EllipseDomain, y: crate::geometry::Point) -> f64 {
    let (a1s, a2s) = (domain.a1 * domain.a1, domain.a2 * domain.a2);
    -a1s * a2s / (2.0 * (a1s + a2s)) * domain.theta(y)
}

/// Relative L2 error of the discrete unit-source solve against the closed form.
pub fn unit_source_error(domain: &EllipseDomain, grid: DiskGrid) -> Result<f64> {
    let rhs = ScalarField::sample(*domain, grid, |_| 1.0);
    let u = poisson_solve_dirichlet(domain, &rhs)?;
    let exact = ScalarField::sample(*domain, grid, |y| unit_source_solution(domain, y));
    let err = u.zip_with(&exact, |a, b| a - b)?;
    Ok(err.l2_norm() / exact.l2_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Polynomial2, SmoothField};
    use approx::assert_relative_eq;

    fn domain() -> EllipseDomain {
        EllipseDomain::new(1.4, 0.8).unwrap()
    }

    #[test]
    fn zero_source_gives_zero() {
        let g = DiskGrid::new(32).unwrap();
        let (u, stats) = poisson_solve_with_stats(&domain(), &ScalarField::zeros(domain(), g)).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn unit_source_matches_closed_form() {
        let e64 = unit_source_error(&domain(), DiskGrid::new(64).unwrap()).unwrap();
        let e128 = unit_source_error(&domain(), DiskGrid::new(128).unwrap()).unwrap();
        assert!(e128 < 1e-3, "error {e128}");
        let ratio = e64 / e128;
        assert!(ratio > 3.0 && ratio < 5.0, "ratio {ratio}");
    }

    #[test]
    fn manufactured_quartic_converges_at_second_order() {
        let d = domain();
        let theta = Polynomial2::theta(d.a1, d.a2);
        let exact = &theta * &theta;
        let source = exact.laplacian_poly();
        let err = |cells| {
            let g = DiskGrid::new(cells).unwrap();
            let rhs = ScalarField::sample(d, g, |y| source.eval(y));
            let u = poisson_solve_dirichlet(&d, &rhs).unwrap();
            let ex = ScalarField::sample(d, g, |y| exact.value(y));
            u.zip_with(&ex, |a, b| a - b).unwrap().l2_norm() / ex.l2_norm()
        };
        let (e1, e2) = (err(64), err(128));
        let ratio = e1 / e2;
        assert!(ratio > 3.0 && ratio < 5.5, "ratio {ratio}, errors {e1} {e2}");
    }

    #[test]
    fn reflection_symmetry_preserved() {
        let d = domain();
        let g = DiskGrid::new(64).unwrap();
        let rhs = ScalarField::sample(d, g, |y| 1.0 + y[0] * y[0] - 0.3 * y[1].powi(4));
        let u = poisson_solve_dirichlet(&d, &rhs).unwrap();
        let n = g.cells();
        let scale = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..=n {
            for i in 0..=n {
                assert_relative_eq!(u.get(i, j), u.get(n - i, j), epsilon = 1e-10 * scale);
                assert_relative_eq!(u.get(i, j), u.get(i, n - j), epsilon = 1e-10 * scale);
            }
        }
    }

    #[test]
    fn mismatched_domain_rejected() {
        let g = DiskGrid::new(16).unwrap();
        let rhs = ScalarField::zeros(EllipseDomain::circle(1.0).unwrap(), g);
        assert!(matches!(poisson_solve_dirichlet(&domain(), &rhs), Err(Error::Shape(_))));
    }
}

//! Incompressible layers bonded to rigid substrates.
//!
//! Under a paraboloid gap the leading-order pressure solves
//! `−m⁻¹ Δp = δ0 − φ` with `p = ∂p/∂n = 0` on the contact contour, and has
//! the closed form `p0 (1 − y1²/a1² − y2²/a2²)²`. The contact parameters
//! follow from matching the constant and quadratic coefficients.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::field::Polynomial2;
use crate::geometry::{EllipseDomain, ParaboloidGap, Point};
use crate::grid::{div_weighted_grad, field_laplacian, ScalarField};
use crate::material::Material;

/// Elastic modulus and mean thickness of one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerStiffness {
    pub youngs: f64,
    pub thickness: f64,
}

impl LayerStiffness {
    pub fn new(youngs: f64, thickness: f64) -> Result<Self> {
        if !(youngs > 0.0) {
            return domain(format!("Young's modulus must be positive, got {youngs}"));
        }
        if !(thickness >= 0.0) || !thickness.is_finite() {
            return domain(format!("layer thickness must be non-negative, got {thickness}"));
        }
        Ok(Self { youngs, thickness })
    }

    /// `h³/E`.
    pub fn bending_compliance(&self) -> f64 {
        self.thickness.powi(3) / self.youngs
    }
}

/// Two layers and their aggregate stiffness `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bilayer {
    pub layers: [LayerStiffness; 2],
    pub m: f64,
}

impl Bilayer {
    pub fn new(first: LayerStiffness, second: LayerStiffness) -> Result<Self> {
        let layers = [first, second];
        let m = aggregate_compliance(&layers)?;
        Ok(Self { layers, m })
    }
}

/// `m = (Σ hα³/Eα)⁻¹`.
pub fn aggregate_compliance(layers: &[LayerStiffness]) -> Result<f64> {
    let total: f64 = layers.iter().map(LayerStiffness::bending_compliance).sum();
    if !(total > 0.0) {
        return domain("at least one layer must have positive thickness");
    }
    Ok(1.0 / total)
}

/// Admissible range of `R1/R2`.
pub const ASPECT_LIMITS: (f64, f64) = (1e-3, 1e3);

const COEFFICIENT_TOLERANCE: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;
const MAX_NEWTON: usize = 20;

/// Closed-form elliptic contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticContactSolution {
    pub p0: f64,
    pub domain: EllipseDomain,
    pub force: f64,
    /// `3P/(π m R1 R2 δ0³)`.
    pub m_p: f64,
    /// `a2/a1`.
    pub s: f64,
    /// Root-finder iterations, bisection and Newton combined.
    pub iterations: usize,
    /// Worst relative mismatch of the three matched coefficients.
    pub coefficient_residual: f64,
}

impl EllipticContactSolution {
    /// `p0 (1 − y1²/a1² − y2²/a2²)²` as a polynomial (not clipped to the
    /// contact region).
    pub fn pressure_polynomial(&self) -> Polynomial2 {
        let theta = Polynomial2::theta(self.domain.a1, self.domain.a2);
        (&theta * &theta).scale(self.p0)
    }
}

/// `s²(3s² + 1)/(s² + 3) − r`, whose root is the contact aspect ratio.
fn aspect_equation(s: f64, r: f64) -> (f64, f64) {
    let t = s * s;
    let g = t * (3.0 * t + 1.0) / (t + 3.0) - r;
    // d/dt [t(3t+1)/(t+3)] = (3t² + 18t + 3)/(t+3)²
    let dg = (3.0 * t * t + 18.0 * t + 3.0) / ((t + 3.0) * (t + 3.0)) * 2.0 * s;
    (g, dg)
}

fn solve_aspect(r: f64) -> Result<(f64, usize)> {
    let mut lo = r.min(1.0).sqrt() * 0.1;
    let mut hi = r.max(1.0).sqrt() * 10.0;
    let (glo, ghi) = (aspect_equation(lo, r).0, aspect_equation(hi, r).0);
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(Error::Solver {
            message: format!("aspect ratio root not bracketed for R2/R1 = {r}"),
            iterations: 0,
            residual: glo.abs().min(ghi.abs()),
        });
    }
    let mut iterations = 0;
    while hi - lo > 1e-6 * hi && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if aspect_equation(mid, r).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON {
        iterations += 1;
        let (g, dg) = aspect_equation(s, r);
        let next = s - g / dg;
        if !(next > lo && next < hi) {
            break;
        }
        let done = (next - s).abs() <= 4.0 * f64::EPSILON * s;
        s = next;
        if done {
            break;
        }
    }
    Ok((s, iterations))
}

/// Relative mismatches of the constant, `y1²` and `y2²` coefficients of
/// `−m⁻¹Δp − (δ0 − φ)`.
pub fn matching_residuals(p0: f64, domain: &EllipseDomain, m: f64, gap: &ParaboloidGap) -> [f64; 3] {
    let u = 1.0 / (domain.a1 * domain.a1);
    let v = 1.0 / (domain.a2 * domain.a2);
    let s = u + v;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    [
        rel(4.0 * p0 * s / m, gap.delta0),
        rel(4.0 * p0 * u * (s + 2.0 * u) / m, 1.0 / (2.0 * gap.r1)),
        rel(4.0 * p0 * v * (s + 2.0 * v) / m, 1.0 / (2.0 * gap.r2)),
    ]
}

pub fn elliptic_contact_solve(m: f64, gap: &ParaboloidGap) -> Result<EllipticContactSolution> {
    if !(m > 0.0) || !m.is_finite() {
        return domain(format!("stiffness coefficient m must be positive, got {m}"));
    }
    if !(gap.delta0 > 0.0) {
        return Err(Error::NoContact { delta0: gap.delta0 });
    }
    let aspect = gap.r1 / gap.r2;
    if !(ASPECT_LIMITS.0..=ASPECT_LIMITS.1).contains(&aspect) {
        return Err(Error::Unsupported(format!(
            "curvature ratio R1/R2 = {aspect} outside [{}, {}]",
            ASPECT_LIMITS.0, ASPECT_LIMITS.1
        )));
    }
    let (s, iterations) = solve_aspect(gap.r2 / gap.r1)?;
    let t = s * s;
    let v = (t + 1.0) / (2.0 * gap.r1 * gap.delta0 * t * (3.0 * t + 1.0));
    let a2 = 1.0 / v.sqrt();
    let a1 = a2 / s;
    let u = 1.0 / (a1 * a1);
    let p0 = m * gap.delta0 / (4.0 * (u + v));
    let domain = EllipseDomain::new(a1, a2)?;
    let residual = matching_residuals(p0, &domain, m, gap)
        .into_iter()
        .fold(0.0, f64::max);
    if !(residual <= COEFFICIENT_TOLERANCE) {
        return Err(Error::Solver {
            message: "matched coefficients out of tolerance".into(),
            iterations,
            residual,
        });
    }
    let force = PI * a1 * a2 * p0 / 3.0;
    Ok(EllipticContactSolution {
        p0,
        domain,
        force,
        m_p: 3.0 * force / (PI * m * gap.r1 * gap.r2 * gap.delta0.powi(3)),
        s: a2 / a1,
        iterations,
        coefficient_residual: residual,
    })
}

/// Pressure inside the contour, zero outside.
pub fn elliptic_pressure_eval(sol: &EllipticContactSolution, y: Point) -> f64 {
    let theta = sol.domain.theta(y);
    if theta <= 0.0 {
        0.0
    } else {
        sol.p0 * theta * theta
    }
}

/// `(P, M_P)` with `P = π a1 a2 p0/3` and `M_P = 3P/(π m R1 R2 δ0³)`.
#[allow(non_snake_case)]
pub fn contact_force_and_MP(sol: &EllipticContactSolution, m: f64, gap: &ParaboloidGap) -> (f64, f64) {
    let p = PI * sol.domain.a1 * sol.domain.a2 * sol.p0 / 3.0;
    (p, 3.0 * p / (PI * m * gap.r1 * gap.r2 * gap.delta0.powi(3)))
}

/// Surface displacement of one incompressible layer with variable thickness
/// `h + H̃`: `−(h³/E)Δp − (3h²/E)∇·(H̃∇p)`, summed over layers.
pub fn refined_surface_displacement(
    layers: &[LayerStiffness],
    pressure: &ScalarField,
    variations: &[ScalarField],
) -> Result<ScalarField> {
    if layers.len() != variations.len() {
        return Err(Error::Shape(format!(
            "{} layers but {} thickness variation fields",
            layers.len(),
            variations.len()
        )));
    }
    let lap = field_laplacian(pressure);
    let mut out = ScalarField::zeros(*pressure.domain(), pressure.grid());
    for (layer, ht) in layers.iter().zip(variations) {
        let div = div_weighted_grad(ht, pressure)?;
        let (h, e) = (layer.thickness, layer.youngs);
        let term = lap.zip_with(&div, |l, d| -(h.powi(3) / e) * l - 3.0 * h * h / e * d)?;
        out = out.zip_with(&term, |a, b| a + b)?;
    }
    Ok(out)
}

/// Elastic combinations that govern the higher-order surface terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCoefficients {
    /// `λ(λ−μ)/(μ(2μ+λ)²) = ν(1+ν)(4ν−1)/(E(1−ν)²)`.
    pub bending: f64,
    /// `λ/(2μ+λ)² = ν(1+ν)(1−2ν)/(E(1−ν)²)`.
    pub coupling: f64,
    /// `λ²/(μ(2μ+λ)²) = 2ν²(1+ν)/(E(1−ν)²)`.
    pub flux: f64,
}

/// Engineering-constant forms; finite at `ν = 0.5`.
pub fn incompressible_limit_coefficients(material: &Material) -> Result<LimitCoefficients> {
    let (e, nu) = (material.youngs, material.poisson);
    if !(nu > 0.0 && nu <= 0.5) {
        return domain(format!("Poisson's ratio must lie in (0, 0.5], got {nu}"));
    }
    let d = e * (1.0 - nu) * (1.0 - nu);
    Ok(LimitCoefficients {
        bending: nu * (1.0 + nu) * (4.0 * nu - 1.0) / d,
        coupling: nu * (1.0 + nu) * (1.0 - 2.0 * nu) / d,
        flux: 2.0 * nu * nu * (1.0 + nu) / d,
    })
}

/// Lamé forms of the same combinations; compressible materials only.
pub fn limit_coefficients_lame(material: &Material) -> Result<LimitCoefficients> {
    let (l, mu) = material.require_compressible()?;
    let m2 = (2.0 * mu + l) * (2.0 * mu + l);
    Ok(LimitCoefficients {
        bending: l * (l - mu) / (mu * m2),
        coupling: l / m2,
        flux: l * l / (mu * m2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SmoothField;
    use crate::grid::DiskGrid;
    use crate::quadrature::PolarRule;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Closed-form root of the aspect equation in `t = s²`.
    fn aspect_oracle(r: f64) -> f64 {
        let t = ((r - 1.0) + ((1.0 - r) * (1.0 - r) + 36.0 * r).sqrt()) / 6.0;
        t.sqrt()
    }

    #[test]
    fn compliance_examples() {
        let one = LayerStiffness::new(1.0, 1.0).unwrap();
        let none = LayerStiffness::new(f64::INFINITY, 0.0).unwrap();
        assert_relative_eq!(aggregate_compliance(&[one, none]).unwrap(), 1.0);
        assert_relative_eq!(aggregate_compliance(&[one, one]).unwrap(), 0.5);
        let l = LayerStiffness::new(4.0, 0.3).unwrap();
        assert_relative_eq!(Bilayer::new(l, l).unwrap().m, 4.0 / (2.0 * 0.027), max_relative = 1e-14);
        let z = LayerStiffness::new(1.0, 0.0).unwrap();
        assert!(aggregate_compliance(&[z, z]).is_err());
    }

    #[test]
    fn circular_contact_oracle() {
        let (m, r, d0) = (2.5, 3.0, 0.04);
        let sol = elliptic_contact_solve(m, &ParaboloidGap::new(r, r, d0).unwrap()).unwrap();
        assert_relative_eq!(sol.domain.a1.powi(2), 4.0 * r * d0, max_relative = 1e-10);
        assert_relative_eq!(sol.domain.a2.powi(2), 4.0 * r * d0, max_relative = 1e-10);
        assert_relative_eq!(sol.p0, m * r * d0 * d0 / 2.0, max_relative = 1e-10);
        assert_relative_eq!(sol.force, 2.0 * PI * m * r * r * d0.powi(3) / 3.0, max_relative = 1e-10);
        assert_relative_eq!(sol.m_p, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn aspect_matches_closed_form() {
        for r in [1e-3, 0.01, 0.3, 1.0, 2.0, 17.0, 1e3] {
            let (s, _) = solve_aspect(r).unwrap();
            assert_relative_eq!(s, aspect_oracle(r), max_relative = 1e-12);
        }
    }

    #[test]
    fn cubic_force_law() {
        let gap = ParaboloidGap::new(2.0, 0.7, 0.01).unwrap();
        let a = elliptic_contact_solve(1.3, &gap).unwrap();
        let b = elliptic_contact_solve(1.3, &ParaboloidGap { delta0: 0.04, ..gap }).unwrap();
        assert_relative_eq!(b.domain.a1, 2.0 * a.domain.a1, max_relative = 1e-12);
        assert_relative_eq!(b.domain.a2, 2.0 * a.domain.a2, max_relative = 1e-12);
        assert_relative_eq!(b.force, 64.0 * a.force, max_relative = 1e-12);
    }

    #[test]
    fn pressure_profile() {
        let sol = elliptic_contact_solve(1.0, &ParaboloidGap::new(1.0, 2.0, 0.1).unwrap()).unwrap();
        assert_eq!(elliptic_pressure_eval(&sol, [0.0, 0.0]), sol.p0);
        let edge = [sol.domain.a1 * 0.6, sol.domain.a2 * 0.8];
        assert!(elliptic_pressure_eval(&sol, edge).abs() < 1e-12 * sol.p0);
        assert_eq!(elliptic_pressure_eval(&sol, [2.0 * sol.domain.a1, 0.0]), 0.0);
        // Normal derivative on the contour vanishes.
        let poly = sol.pressure_polynomial();
        let g = poly.gradient(edge);
        assert!(g[0].abs() < 1e-10 * sol.p0 && g[1].abs() < 1e-10 * sol.p0);
    }

    #[test]
    fn pde_residual_vanishes() {
        let (m, gap) = (3.0, ParaboloidGap::new(1.5, 0.5, 0.02).unwrap());
        let sol = elliptic_contact_solve(m, &gap).unwrap();
        let lap = sol.pressure_polynomial().laplacian_poly();
        for k in 0..50 {
            let a = k as f64 * 0.37;
            let r = (k as f64 / 50.0).sqrt();
            let y = sol.domain.to_physical([r * a.cos(), r * a.sin()]);
            let res = -lap.eval(y) / m - gap.indentation(y);
            assert!(res.abs() <= 1e-10 * gap.delta0, "residual {res}");
        }
    }

    #[test]
    fn force_matches_quadrature() {
        let (m, gap) = (0.8, ParaboloidGap::new(0.4, 1.9, 0.05).unwrap());
        let sol = elliptic_contact_solve(m, &gap).unwrap();
        let q = PolarRule::new(16, 16).integrate(&sol.domain, |y| elliptic_pressure_eval(&sol, y));
        assert_relative_eq!(q, sol.force, max_relative = 1e-10);
        let (p, mp) = contact_force_and_MP(&sol, m, &gap);
        assert_relative_eq!(p, sol.force, max_relative = 1e-15);
        assert_relative_eq!(mp, sol.m_p, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = ParaboloidGap::new(1.0, 1.0, 0.1).unwrap();
        assert!(matches!(elliptic_contact_solve(0.0, &g), Err(Error::Domain(_))));
        let flat = ParaboloidGap::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(elliptic_contact_solve(1.0, &flat), Err(Error::NoContact { .. })));
        let thin = ParaboloidGap::new(1.0, 2000.0, 0.1).unwrap();
        assert!(matches!(elliptic_contact_solve(1.0, &thin), Err(Error::Unsupported(_))));
    }

    #[test]
    fn refined_displacement_recovers_gap() {
        let layer = LayerStiffness::new(2.0, 0.5).unwrap();
        let m = aggregate_compliance(&[layer]).unwrap();
        let gap = ParaboloidGap::new(1.0, 0.6, 0.03).unwrap();
        let sol = elliptic_contact_solve(m, &gap).unwrap();
        let grid = DiskGrid::new(64).unwrap();
        let poly = sol.pressure_polynomial();
        let p = ScalarField::sample(sol.domain, grid, |y| poly.eval(y));
        let zero = ScalarField::zeros(sol.domain, grid);
        let u = refined_surface_displacement(&[layer], &p, &[zero]).unwrap();
        // Five-point error on a quartic is h²/12 (∂⁴₁ + ∂⁴₂) p.
        for (i, j, v) in u.inside() {
            let y = u.point(i, j);
            assert_relative_eq!(v, gap.indentation(y), epsilon = 2e-3 * gap.delta0);
        }
    }

    #[test]
    fn refined_displacement_constant_cases() {
        let layer = LayerStiffness::new(1.5, 0.4).unwrap();
        let d = EllipseDomain::new(1.0, 0.7).unwrap();
        let grid = DiskGrid::new(32).unwrap();
        let flat = ScalarField::sample(d, grid, |_| 3.0);
        let ht = ScalarField::sample(d, grid, |y| 0.1 * y[0]);
        let u = refined_surface_displacement(&[layer], &flat, std::slice::from_ref(&ht)).unwrap();
        assert!(u.values().iter().all(|v| v.abs() < 1e-9));

        let p = ScalarField::sample(d, grid, |y| 1.0 - y[0] * y[0] - 2.0 * y[1] * y[1]);
        let c = 0.05;
        let constant = ScalarField::sample(d, grid, |_| c);
        let zero = ScalarField::zeros(d, grid);
        let base = refined_surface_displacement(&[layer], &p, &[zero]).unwrap();
        let with = refined_surface_displacement(&[layer], &p, &[constant]).unwrap();
        for k in 0..base.values().len() {
            assert_relative_eq!(with.values()[k], base.values()[k] * (1.0 + 3.0 * c / 0.4), max_relative = 1e-9);
        }
        assert!(matches!(
            refined_surface_displacement(&[layer, layer], &p, &[ht]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn limit_coefficient_values() {
        let c = incompressible_limit_coefficients(&Material::incompressible(1.0).unwrap()).unwrap();
        assert_relative_eq!(c.bending, 3.0, max_relative = 1e-15);
        assert_eq!(c.coupling, 0.0);
        assert_relative_eq!(c.flux, 3.0, max_relative = 1e-15);
        let c = incompressible_limit_coefficients(&Material::compressible(1.0, 0.25).unwrap()).unwrap();
        assert!(c.bending.abs() < 1e-12);
        let c = incompressible_limit_coefficients(&Material::compressible(2.0, 0.4999).unwrap()).unwrap();
        assert!((c.bending - 1.5).abs() / 1.5 < 2e-3);
        assert!(incompressible_limit_coefficients(&Material::compressible(1.0, -0.2).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn engineering_and_lame_forms_agree(nu in 0.001f64..0.499, e in 0.1f64..100.0) {
            let m = Material::compressible(e, nu).unwrap();
            let a = incompressible_limit_coefficients(&m).unwrap();
            let b = limit_coefficients_lame(&m).unwrap();
            for (x, y) in [(a.bending, b.bending), (a.coupling, b.coupling), (a.flux, b.flux)] {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(y.abs()).max(1e-300));
            }
        }

        #[test]
        fn aspect_relabel_symmetry(r1 in 0.01f64..10.0, r2 in 0.01f64..10.0, d0 in 0.001f64..0.1) {
            let a = elliptic_contact_solve(1.0, &ParaboloidGap::new(r1, r2, d0).unwrap()).unwrap();
            let b = elliptic_contact_solve(1.0, &ParaboloidGap::new(r2, r1, d0).unwrap()).unwrap();
            prop_assert!((a.m_p - b.m_p).abs() <= 1e-8 * a.m_p);
            prop_assert!((a.domain.a1 - b.domain.a2).abs() <= 1e-10 * a.domain.a1);
            prop_assert!((a.s * b.s - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn force_increases_with_approach_and_stiffness(
            r1 in 0.1f64..5.0, r2 in 0.1f64..5.0, d0 in 0.001f64..0.1, m in 0.1f64..10.0
        ) {
            let gap = ParaboloidGap::new(r1, r2, d0).unwrap();
            let base = elliptic_contact_solve(m, &gap).unwrap().force;
            let deeper = elliptic_contact_solve(m, &ParaboloidGap { delta0: d0 * 1.01, ..gap }).unwrap().force;
            let stiffer = elliptic_contact_solve(m * 1.01, &gap).unwrap().force;
            prop_assert!(deeper > base);
            prop_assert!(stiffer > base);
        }

        #[test]
        fn matched_coefficients_hold(r1 in 0.001f64..1.0, r2 in 0.001f64..1.0, d0 in 1e-4f64..1.0) {
            let (m, gap) = (1.7, ParaboloidGap::new(r1 * 1e3, r2 * 1e3, d0).unwrap());
            if let Ok(sol) = elliptic_contact_solve(m, &gap) {
                prop_assert!(sol.coefficient_residual <= 1e-10);
            }
        }
    }
}

//! Linearised response of the incompressible contact pressure to small
//! thickness variations `H̃α` of the two layers.
//!
//! The pressure variation solves
//! `Δp̃ = −m Σα (3hα²/Eα) ∇·(H̃α ∇p̄)` in `ω` with `p̃ = 0` on the contour,
//! where `p̄` is the closed-form elliptic pressure. Its integral vanishes
//! exactly when `Σα (hα²/Eα) ∬ H̃α ρ = 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{FieldRef, Polynomial2, SmoothField};
use crate::geometry::{EllipseDomain, Point};
use crate::grid::{div_weighted_grad_conservative, DiskGrid, ScalarField};
use crate::incompressible::{EllipticContactSolution, LayerStiffness};
use crate::poisson::{poisson_solve_with_stats, SolveStats};
use crate::quadrature::PolarRule;

/// One layer's stiffness together with its thickness variation.
#[derive(Clone)]
pub struct VariedLayer {
    pub stiffness: LayerStiffness,
    pub variation: FieldRef,
}

impl VariedLayer {
    pub fn new(stiffness: LayerStiffness, variation: FieldRef) -> Self {
        Self { stiffness, variation }
    }

    /// `h²/E`.
    fn weight(&self) -> f64 {
        let s = &self.stiffness;
        s.thickness * s.thickness / s.youngs
    }
}

impl std::fmt::Debug for VariedLayer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariedLayer").field("stiffness", &self.stiffness).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct SensitivityProblem {
    pub base: EllipticContactSolution,
    pub m: f64,
    pub layers: Vec<VariedLayer>,
}

impl SensitivityProblem {
    pub fn new(base: EllipticContactSolution, m: f64, layers: Vec<VariedLayer>) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::Domain(format!("stiffness coefficient m must be positive, got {m}")));
        }
        Ok(Self { base, m, layers })
    }

    pub fn domain(&self) -> &EllipseDomain {
        &self.base.domain
    }

    /// Unclipped base pressure `p̄` as a polynomial.
    pub fn base_pressure(&self) -> Polynomial2 {
        self.base.pressure_polynomial()
    }

    /// `Σα (hα²/Eα) H̃α(y)`.
    fn combined_variation(&self, y: Point) -> f64 {
        self.layers.iter().map(|l| l.weight() * l.variation.value(y)).sum()
    }
}

/// Right-hand side `−m Σα (3hα²/Eα) ∇·(H̃α∇p̄)` in conservative flux form.
pub fn sensitivity_rhs(prob: &SensitivityProblem, grid: DiskGrid) -> Result<ScalarField> {
    let domain = *prob.domain();
    let pbar = prob.base_pressure();
    let p = ScalarField::sample(domain, grid, |y| pbar.eval(y));
    let mut rhs = ScalarField::zeros(domain, grid);
    for layer in &prob.layers {
        let ht = ScalarField::sample_field(domain, grid, layer.variation.as_ref());
        let div = div_weighted_grad_conservative(&ht, &p)?;
        let c = -prob.m * 3.0 * layer.weight();
        rhs = rhs.zip_with(&div, |a, b| a + c * b)?;
    }
    Ok(rhs)
}

/// Same right-hand side from the product rule `∇H̃·∇p̄ + H̃Δp̄` with the
/// analytic derivatives of `p̄`.
pub fn sensitivity_rhs_product_rule(prob: &SensitivityProblem, grid: DiskGrid) -> ScalarField {
    let pbar = prob.base_pressure();
    let (g1, g2, lap) = (pbar.derivative(0), pbar.derivative(1), pbar.laplacian_poly());
    ScalarField::sample(*prob.domain(), grid, |y| {
        let gp = [g1.eval(y), g2.eval(y)];
        let lp = lap.eval(y);
        prob.layers
            .iter()
            .map(|l| {
                let gh = l.variation.gradient(y);
                let div = gh[0] * gp[0] + gh[1] * gp[1] + l.variation.value(y) * lp;
                -prob.m * 3.0 * l.weight() * div
            })
            .sum()
    })
}

/// `p̃` from the Dirichlet solve of the sensitivity problem.
pub fn pressure_variation(prob: &SensitivityProblem, grid: DiskGrid) -> Result<(ScalarField, SolveStats)> {
    let rhs = sensitivity_rhs(prob, grid)?;
    poisson_solve_with_stats(prob.domain(), &rhs)
}

/// `∬ p̃` by polar quadrature of the interpolated field.
pub fn force_variation(p: &ScalarField) -> f64 {
    PolarRule::production().integrate(p.domain(), |y| p.value(y))
}

/// `∬ |p̃|`, the scale against which [`force_variation`] is judged.
pub fn absolute_force_variation(p: &ScalarField) -> f64 {
    PolarRule::production().integrate(p.domain(), |y| p.value(y).abs())
}

/// `∬ p̃` predicted by the Green identity chain:
/// `−12 m p0 a1 a2 / (a1² + a2²)` times the orthogonality residual.
pub fn predicted_force_variation(prob: &SensitivityProblem) -> f64 {
    let d = prob.domain();
    let residual = orthogonality_residual(&prob.layers, &WeightFunction::rho(*d));
    -12.0 * prob.m * prob.base.p0 * d.a1 * d.a2 / (d.a1 * d.a1 + d.a2 * d.a2) * residual
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `ρ` on the contact ellipse.
    Rho,
    /// `ρ*` on a characteristic ellipse.
    RhoStar,
    /// `θ*`, the gap-variation weight.
    ThetaStar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    pub kind: WeightKind,
    pub domain: EllipseDomain,
}

impl WeightFunction {
    pub fn rho(domain: EllipseDomain) -> Self {
        Self {
            kind: WeightKind::Rho,
            domain,
        }
    }

    pub fn rho_star(domain: EllipseDomain) -> Self {
        Self {
            kind: WeightKind::RhoStar,
            domain,
        }
    }

    pub fn theta_star(domain: EllipseDomain) -> Self {
        Self {
            kind: WeightKind::ThetaStar,
            domain,
        }
    }
}

/// Evaluates the weight; zero outside its ellipse.
pub fn weight_eval(w: &WeightFunction, y: Point) -> f64 {
    let d = &w.domain;
    let theta = d.theta(y).max(0.0);
    match w.kind {
        WeightKind::Rho | WeightKind::RhoStar => {
            let s = d.aspect();
            let (x1, x2) = (y[0] / d.a1, y[1] / d.a2);
            (s * x1 * x1 + x2 * x2 / s) * theta
        }
        WeightKind::ThetaStar => theta,
    }
}

/// Signed `Σα (hα²/Eα) ∬ H̃α w` over the weight's ellipse.
pub fn orthogonality_residual(layers: &[VariedLayer], weight: &WeightFunction) -> f64 {
    PolarRule::production().integrate(&weight.domain, |y| {
        let w = weight_eval(weight, y);
        w * layers.iter().map(|l| l.weight() * l.variation.value(y)).sum::<f64>()
    })
}

/// `∬ θ Σα (hα²/Eα) ∇·(H̃α∇p̄)` before integration by parts; equals
/// `−8 p0/(a1 a2)` times the orthogonality residual.
pub fn weighted_divergence_integral(prob: &SensitivityProblem) -> f64 {
    let d = *prob.domain();
    let pbar = prob.base_pressure();
    let (g1, g2, lap) = (pbar.derivative(0), pbar.derivative(1), pbar.laplacian_poly());
    PolarRule::production().integrate(&d, |y| {
        let gp = [g1.eval(y), g2.eval(y)];
        let div: f64 = prob
            .layers
            .iter()
            .map(|l| {
                let gh = l.variation.gradient(y);
                l.weight() * (gh[0] * gp[0] + gh[1] * gp[1] + l.variation.value(y) * lap.eval(y))
            })
            .sum();
        d.theta(y) * div
    })
}

/// Boundary term `∮ θ Σβ nβ ∂p̄/∂yβ Σα(hα²/Eα)H̃α ds` left by integrating by
/// parts, assembled with `samples` midpoint panels along the contour.
pub fn green_boundary_term(prob: &SensitivityProblem, samples: usize) -> f64 {
    let d = *prob.domain();
    let pbar = prob.base_pressure();
    let (g1, g2) = (pbar.derivative(0), pbar.derivative(1));
    let dphi = 2.0 * PI / samples as f64;
    (0..samples)
        .map(|k| {
            let phi = (k as f64 + 0.5) * dphi;
            let (c, s) = (phi.cos(), phi.sin());
            let y = [d.a1 * c, d.a2 * s];
            // Outward normal scaled by the arc-length element.
            let n = [d.a2 * c, d.a1 * s];
            let flux = n[0] * g1.eval(y) + n[1] * g2.eval(y);
            d.theta(y) * flux * prob.combined_variation(y) * dphi
        })
        .sum()
}

/// `∬ φ̃ θ*` over the characteristic ellipse.
pub fn gap_variation_residual(gap_variation: &dyn SmoothField, domain: &EllipseDomain) -> f64 {
    let w = WeightFunction::theta_star(*domain);
    PolarRule::production().integrate(domain, |y| gap_variation.value(y) * weight_eval(&w, y))
}

/// Pressure variation of a gap perturbation: `Δp̃ = m φ̃`, `p̃ = 0` on the
/// contour.
pub fn gap_variation_pressure(m: f64, gap_variation: &ScalarField) -> Result<(ScalarField, SolveStats)> {
    let rhs = gap_variation.map(|v| m * v);
    poisson_solve_with_stats(gap_variation.domain(), &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Constant, FnField};
    use crate::geometry::ParaboloidGap;
    use crate::incompressible::{aggregate_compliance, elliptic_contact_solve};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn layers(variation: FieldRef) -> Vec<VariedLayer> {
        vec![
            VariedLayer::new(LayerStiffness::new(1.0, 1.0).unwrap(), variation),
            VariedLayer::new(LayerStiffness::new(2.0, 0.5).unwrap(), Arc::new(Constant(0.0))),
        ]
    }

    fn problem(variation: FieldRef) -> SensitivityProblem {
        let layers = layers(variation);
        let stiff: Vec<_> = layers.iter().map(|l| l.stiffness).collect();
        let m = aggregate_compliance(&stiff).unwrap();
        let base = elliptic_contact_solve(m, &ParaboloidGap::new(1.0, 0.5, 0.05).unwrap()).unwrap();
        SensitivityProblem::new(base, m, layers).unwrap()
    }

    #[test]
    fn zero_variation_gives_zero_response() {
        let prob = problem(Arc::new(Constant(0.0)));
        let g = DiskGrid::new(32).unwrap();
        assert!(sensitivity_rhs(&prob, g).unwrap().values().iter().all(|&v| v == 0.0));
        let (p, _) = pressure_variation(&prob, g).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
        assert_eq!(force_variation(&p), 0.0);
    }

    #[test]
    fn constant_variation_scales_base_laplacian() {
        let c = 0.1;
        let prob = problem(Arc::new(Constant(c)));
        let g = DiskGrid::new(32).unwrap();
        let rhs = sensitivity_rhs_product_rule(&prob, g);
        let lap = prob.base_pressure().laplacian_poly();
        for k in 0..g.len() {
            let (i, j) = g.coords(k);
            let y = rhs.point(i, j);
            assert_relative_eq!(rhs.values()[k], -prob.m * c * 3.0 * lap.eval(y), max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn conservative_and_product_forms_converge() {
        let d = problem(Arc::new(Constant(0.0))).base.domain;
        let theta = Polynomial2::theta(d.a1, d.a2);
        let prob = problem(Arc::new(theta));
        let err = |cells| {
            let g = DiskGrid::new(cells).unwrap();
            let a = sensitivity_rhs(&prob, g).unwrap();
            let b = sensitivity_rhs_product_rule(&prob, g);
            let diff = a.zip_with(&b, |x, y| x - y).unwrap();
            diff.max_abs_within(0.95) / b.max_abs_within(0.95)
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn uniform_thinning_raises_pressure() {
        // Constant H̃ = c gives p̃ = −3mc(h²/E) p̄ exactly.
        let c = -0.05;
        let prob = problem(Arc::new(Constant(c)));
        let (p, _) = pressure_variation(&prob, DiskGrid::new(64).unwrap()).unwrap();
        let pbar = prob.base_pressure();
        let k = -3.0 * prob.m * c * prob.layers[0].weight();
        let peak = k * prob.base.p0;
        for (i, j, v) in p.inside() {
            let exact = k * pbar.eval(p.point(i, j));
            assert!(exact >= 0.0);
            assert!((v - exact).abs() <= 2e-3 * peak, "p̃ = {v}, exact {exact}");
        }
        assert!(force_variation(&p) > 0.0);
    }

    #[test]
    fn force_variation_oracles() {
        let d = EllipseDomain::new(1.3, 0.6).unwrap();
        let g = DiskGrid::new(256).unwrap();
        let theta = ScalarField::sample(d, g, |y| d.theta(y).max(0.0));
        assert_relative_eq!(force_variation(&theta), PI * d.a1 * d.a2 / 2.0, max_relative = 1e-4);
        let odd = ScalarField::sample(d, g, |y| y[0] * d.theta(y).max(0.0));
        assert!(force_variation(&odd).abs() < 1e-12);
    }

    #[test]
    fn weight_values() {
        let d = EllipseDomain::new(2.0, 1.0).unwrap();
        let rho = WeightFunction::rho(d);
        assert_eq!(weight_eval(&rho, [0.0, 0.0]), 0.0);
        assert!(weight_eval(&rho, [2.0 * 0.6, 0.8]).abs() < 1e-15);
        let circle = WeightFunction::rho_star(EllipseDomain::circle(1.0).unwrap());
        let r = 1.0 / 2f64.sqrt();
        assert_relative_eq!(weight_eval(&circle, [r, 0.0]), 0.25, max_relative = 1e-15);
        assert_relative_eq!(weight_eval(&WeightFunction::theta_star(d), [0.0, 0.0]), 1.0);
        assert_eq!(weight_eval(&WeightFunction::theta_star(d), [3.0, 0.0]), 0.0);
    }

    #[test]
    fn orthogonality_oracles() {
        let d = EllipseDomain::new(1.5, 0.9).unwrap();
        let unit = |v: FieldRef| vec![VariedLayer::new(LayerStiffness::new(1.0, 1.0).unwrap(), v)];
        let rho = WeightFunction::rho(d);
        assert_eq!(orthogonality_residual(&unit(Arc::new(Constant(0.0))), &rho), 0.0);
        let odd = orthogonality_residual(&unit(Arc::new(FnField::new(|y: Point| y[0] * (1.0 + y[1])))), &rho);
        assert!(odd.abs() < 1e-14);
        let theta = orthogonality_residual(&unit(Arc::new(Polynomial2::theta(d.a1, d.a2))), &rho);
        let s = d.aspect();
        assert_relative_eq!(theta, PI * d.a1 * d.a2 * (s + 1.0 / s) / 24.0, max_relative = 1e-12);
    }

    #[test]
    fn green_chain_constants() {
        let variation = Polynomial2::from_terms(&[(0, 0, 0.02), (2, 0, -0.03), (1, 1, 0.01), (0, 3, 0.02)]);
        let prob = problem(Arc::new(variation));
        let dd = prob.domain();
        let before = weighted_divergence_integral(&prob);
        let after = orthogonality_residual(&prob.layers, &WeightFunction::rho(*dd));
        assert_relative_eq!(before, -8.0 * prob.base.p0 / (dd.a1 * dd.a2) * after, max_relative = 1e-10);
        assert!(green_boundary_term(&prob, 512).abs() <= 1e-10);
    }

    #[test]
    fn discrete_force_variation_matches_chain_prediction() {
        let variation = Polynomial2::from_terms(&[(0, 0, 0.02), (2, 0, -0.03), (1, 1, 0.01), (0, 2, 0.02)]);
        let prob = problem(Arc::new(variation));
        let (p, _) = pressure_variation(&prob, DiskGrid::new(128).unwrap()).unwrap();
        let predicted = predicted_force_variation(&prob);
        assert_relative_eq!(force_variation(&p), predicted, max_relative = 1e-3);
    }

    #[test]
    fn theta_star_gap_oracles() {
        let d = EllipseDomain::new(1.2, 0.7).unwrap();
        assert_eq!(gap_variation_residual(&Constant(0.0), &d), 0.0);
        let t = Polynomial2::theta(d.a1, d.a2);
        assert_relative_eq!(gap_variation_residual(&t, &d), PI * d.a1 * d.a2 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn theta_orthogonal_gap_keeps_force() {
        // φ̃ = θ − c with ∬(θ − c)θ = 0, i.e. c = (1/3)/(1/2) = 2/3.
        let d = EllipseDomain::new(1.2, 0.7).unwrap();
        let g = DiskGrid::new(256).unwrap();
        let phi = ScalarField::sample(d, g, |y| d.theta(y) - 2.0 / 3.0);
        let (p, _) = gap_variation_pressure(2.0, &phi).unwrap();
        let ratio = force_variation(&p).abs() / absolute_force_variation(&p);
        assert!(ratio < 1e-3, "ratio {ratio}");
    }
}

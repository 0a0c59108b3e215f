//! Quadrature over elliptical domains.
//!
//! Closed-form integrands use a mapped polar tensor rule: `y = (a1 r cos φ,
//! a2 r sin φ)`, Gauss–Legendre in `r ∈ [0, 1]` and the trapezoid rule in
//! `φ`, with Jacobian `a1 a2 r`. The rule integrates `r^k` exactly for
//! `k < 2 n_r` and trigonometric polynomials of degree `< n_φ` exactly.
//! Grid fields use [`ScalarField::integrate`](crate::grid::ScalarField::integrate).

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;

use crate::geometry::{EllipseDomain, Point};

/// Mapped polar tensor rule.
#[derive(Debug, Clone)]
pub struct PolarRule {
    radial: Vec<(f64, f64)>,
    angles: Vec<(f64, f64)>,
}

impl PolarRule {
    /// Radial/angular counts of the production rule.
    pub const PRODUCTION: usize = 256;

    pub fn new(radial: usize, angular: usize) -> Self {
        assert!(radial >= 2 && angular >= 3, "polar rule too small");
        let gl = GaussLegendre::new(radial.try_into().expect("nonzero degree"));
        let radial = gl
            .iter()
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        let angles = (0..angular)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / angular as f64;
                (phi.cos(), phi.sin())
            })
            .collect();
        Self { radial, angles }
    }

    pub fn production() -> Self {
        Self::new(Self::PRODUCTION, Self::PRODUCTION)
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial.len()
    }

    pub fn angular_nodes(&self) -> usize {
        self.angles.len()
    }

    /// `∬_ω f(y) dy`.
    pub fn integrate(&self, domain: &EllipseDomain, f: impl Fn(Point) -> f64) -> f64 {
        let dphi = 2.0 * PI / self.angles.len() as f64;
        let mut total = 0.0;
        for &(r, wr) in &self.radial {
            let ring: f64 = self
                .angles
                .iter()
                .map(|&(c, s)| f([domain.a1 * r * c, domain.a2 * r * s]))
                .sum();
            total += wr * r * ring;
        }
        total * dphi * domain.a1 * domain.a2
    }
}

impl Default for PolarRule {
    fn default() -> Self {
        Self::production()
    }
}

/// Integrates a closed-form `f` over the ellipse with the production rule.
pub fn integrate_ellipse(domain: &EllipseDomain, f: impl Fn(Point) -> f64) -> f64 {
    PolarRule::production().integrate(domain, f)
}

use crate::error::{Error, Result};
use crate::field::{product_laplacian, weighted_divergence, FieldRef, SmoothField};
use crate::geometry::Point;
use crate::material::Material;
use crate::thickness::LayerThickness;

/// Through-thickness displacement terms in stretched variables
/// `ζ ∈ [0, h*]`, driven by a pressure field `p` and the scaled thickness
/// variation `H̃*`.
#[derive(Clone)]
pub struct DisplacementProfile {
    lambda: f64,
    mu: f64,
    h_star: f64,
    pressure: FieldRef,
    variation: FieldRef,
}

impl std::fmt::Debug for DisplacementProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DisplacementProfile")
            .field("lambda", &self.lambda)
            .field("mu", &self.mu)
            .field("h_star", &self.h_star)
            .finish_non_exhaustive()
    }
}

pub fn displacement_profiles(
    material: &Material,
    layer: &LayerThickness,
    pressure: FieldRef,
) -> Result<DisplacementProfile> {
    let (lambda, mu) = material.require_compressible()?;
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("shear modulus must be positive, got {mu}")));
    }
    Ok(DisplacementProfile {
        lambda,
        mu,
        h_star: layer.h_star,
        pressure,
        variation: layer.scaled_variation_field(),
    })
}

impl DisplacementProfile {
    fn m(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }

    pub fn h_star(&self) -> f64 {
        self.h_star
    }

    /// `Ψ(ζ)`, the in-plane shape function of the first tangential term.
    pub fn psi(&self, zeta: f64) -> f64 {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        -(l + mu) / (2.0 * mu * m) * (h * h - zeta * zeta) + h / m * (h - zeta)
    }

    /// `Ψ'(ζ)`.
    pub fn psi_derivative(&self, zeta: f64) -> f64 {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        (l + mu) / (mu * m) * zeta - h / m
    }

    pub fn w0(&self, y: Point, zeta: f64) -> f64 {
        self.pressure.value(y) * (self.h_star - zeta) / self.m()
    }

    pub fn w1(&self, y: Point, _zeta: f64) -> f64 {
        self.pressure.value(y) * self.variation.value(y) / self.m()
    }

    pub fn w2(&self, y: Point, zeta: f64) -> f64 {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        let lap = self.pressure.laplacian(y);
        lap / (6.0 * mu * m * m)
            * (3.0 * l * mu * h * (zeta * zeta - h * h)
                - l * m * (zeta.powi(3) - h.powi(3))
                - 3.0 * l * (mu - l) * h * h * (zeta - h))
    }

    /// Full cubic-order profile `a ζ² + C1 ζ + C0`.
    pub fn w3(&self, y: Point, zeta: f64) -> f64 {
        let m = self.m();
        let quad = self.lambda / (2.0 * m * m) * self.pressure_variation_laplacian(y);
        quad * zeta * zeta + self.c1(y) * zeta + self.c0(y)
    }

    /// Surface value of the cubic-order term, `w3(y, 0) = C0(y)`.
    pub fn w3_surface(&self, y: Point) -> f64 {
        self.c0(y)
    }

    pub fn v0(&self, _y: Point, _zeta: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    pub fn v1(&self, y: Point, zeta: f64) -> [f64; 2] {
        let g = self.pressure.gradient(y);
        let s = self.psi(zeta);
        [s * g[0], s * g[1]]
    }

    pub fn v2(&self, y: Point, zeta: f64) -> [f64; 2] {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        let p = self.pressure.value(y);
        let gp = self.pressure.gradient(y);
        let ht = self.variation.value(y);
        let gh = self.variation.gradient(y);
        let a = (h - zeta) / m;
        let b = l * h / (mu * m) * ht;
        std::array::from_fn(|k| a * (ht * gp[k] + p * gh[k]) - b * gp[k])
    }

    fn pressure_variation_laplacian(&self, y: Point) -> f64 {
        product_laplacian(self.pressure.as_ref(), self.variation.as_ref(), y)
    }

    fn variation_flux_divergence(&self, y: Point) -> f64 {
        weighted_divergence(self.variation.as_ref(), self.pressure.as_ref(), y)
    }

    /// `C1 = λh*/(μ(2μ+λ)²) (λ∇·(H̃*∇p) − μΔ(pH̃*))`.
    pub fn c1(&self, y: Point) -> f64 {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        l * h / (mu * m * m)
            * (l * self.variation_flux_divergence(y) - mu * self.pressure_variation_laplacian(y))
    }

    /// `C0` from the product form, with `Δ(pH̃*)` and `∇·(H̃*∇p)` taken on
    /// the products.
    pub fn c0(&self, y: Point) -> f64 {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        let ht = self.variation.value(y);
        let lap_p = self.pressure.laplacian(y);
        l * h * h / (2.0 * m * m) * (ht * lap_p + self.pressure_variation_laplacian(y))
            - l * l * h * h / (mu * m * m) * self.variation_flux_divergence(y)
    }

    /// `C0` from the expanded form in terms of `∇H̃*·∇p`, `H̃*Δp` and
    /// `pΔH̃*`.
    pub fn c0_expanded(&self, y: Point) -> f64 {
        let (l, mu, h, m) = (self.lambda, self.mu, self.h_star, self.m());
        let gp = self.pressure.gradient(y);
        let gh = self.variation.gradient(y);
        let bracket = gh[0] * gp[0] + gh[1] * gp[1] + self.variation.value(y) * self.pressure.laplacian(y);
        -h * h * l * (l - mu) / (mu * m * m) * bracket
            + h * h * l / (2.0 * m * m) * self.pressure.value(y) * self.variation.laplacian(y)
    }
}

/// The four surface-displacement terms at `ζ = 0`, ordered by power of `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceExpansion {
    pub terms: [f64; 4],
}

impl SurfaceExpansion {
    pub fn total(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// `ε h* p/(2μ+λ) + ε² H̃* p/(2μ+λ) − ε³ h*³ λ(λ−μ)/(3μ(2μ+λ)²) Δp + ε⁴ C0`.
pub fn surface_displacement_expansion(
    material: &Material,
    layer: &LayerThickness,
    pressure: FieldRef,
    y: Point,
) -> Result<SurfaceExpansion> {
    let prof = displacement_profiles(material, layer, pressure)?;
    let e = layer.eps;
    Ok(SurfaceExpansion {
        terms: [
            e * prof.w0(y, 0.0),
            e * e * prof.w1(y, 0.0),
            e.powi(3) * prof.w2(y, 0.0),
            e.powi(4) * prof.w3_surface(y),
        ],
    })
}

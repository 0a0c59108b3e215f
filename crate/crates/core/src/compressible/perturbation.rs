use crate::error::{Error, Result};
use crate::field::{product_laplacian, weighted_divergence, FieldRef, Polynomial2, SmoothField};
use crate::geometry::{EllipseDomain, ParaboloidGap, Point};
use crate::grid::{div_weighted_grad, field_laplacian, DiskGrid, ScalarField};
use crate::material::Material;
use crate::thickness::LayerThickness;

/// Mapped radius of the interior region used by [`residual_check`].
pub const RESIDUAL_INSET: f64 = 0.9;

/// Four-term pressure series `p ≈ (2μ+λ)/h* (σ0 + εσ1 + ε²σ2 + ε³σ3)` in
/// starred variables.
#[derive(Clone)]
pub struct PerturbationSeries {
    /// `(2μ+λ)/h*`.
    pub prefactor: f64,
    pub eps: f64,
    pub h_star: f64,
    lambda: f64,
    mu: f64,
    gap_star: ParaboloidGap,
    f_star: Polynomial2,
    psi: FieldRef,
}

impl std::fmt::Debug for PerturbationSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PerturbationSeries")
            .field("prefactor", &self.prefactor)
            .field("eps", &self.eps)
            .field("h_star", &self.h_star)
            .field("f_star", &self.f_star)
            .finish_non_exhaustive()
    }
}

/// Coefficients split into the pure thickness part `(−ψ*)^k f*` and the
/// part carrying elastic constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaTerms {
    pub psi_part: [f64; 4],
    pub elastic_part: [f64; 4],
}

impl SigmaTerms {
    pub fn total(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.psi_part[k] + self.elastic_part[k])
    }
}

pub fn perturbation_coefficients(
    material: &Material,
    layer: &LayerThickness,
    gap: &ParaboloidGap,
) -> Result<PerturbationSeries> {
    let (lambda, mu) = material.require_compressible()?;
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("shear modulus must be positive, got {mu}")));
    }
    let gap_star = gap.starred(layer.eps);
    Ok(PerturbationSeries {
        prefactor: (2.0 * mu + lambda) / layer.h_star,
        eps: layer.eps,
        h_star: layer.h_star,
        lambda,
        mu,
        gap_star,
        f_star: Polynomial2::indentation(gap_star.r1, gap_star.r2, gap_star.delta0),
        psi: layer.psi_field(),
    })
}

impl PerturbationSeries {
    /// `h*²λ(λ−μ)/(3μ(2μ+λ))`, the coefficient of the Laplacian term.
    pub fn bending_coefficient(&self) -> f64 {
        let (l, m, h) = (self.lambda, self.mu, self.h_star);
        h * h * l * (l - m) / (3.0 * m * (2.0 * m + l))
    }

    /// `λh*²/(2μ(2μ+λ))`, the prefactor of the cubic braces.
    pub fn coupling_coefficient(&self) -> f64 {
        let (l, m, h) = (self.lambda, self.mu, self.h_star);
        l * h * h / (2.0 * m * (2.0 * m + l))
    }

    fn curvature_coefficient(&self) -> f64 {
        let (l, m, h) = (self.lambda, self.mu, self.h_star);
        h * h * l * (2.0 * l + m) / (6.0 * m * (2.0 * m + l))
    }

    pub fn lame(&self) -> (f64, f64) {
        (self.lambda, self.mu)
    }

    /// Gap in starred variables.
    pub fn gap_star(&self) -> &ParaboloidGap {
        &self.gap_star
    }

    /// `f* = δ0* − φ*`.
    pub fn f_star(&self) -> &Polynomial2 {
        &self.f_star
    }

    pub fn psi(&self) -> &FieldRef {
        &self.psi
    }

    /// Contact ellipse of `f*`, `aα* = √(2Rα* δ0*)`.
    pub fn contact_domain(&self) -> Result<EllipseDomain> {
        let g = &self.gap_star;
        if !(g.delta0 > 0.0) {
            return Err(Error::NoContact { delta0: g.delta0 });
        }
        EllipseDomain::new((2.0 * g.r1 * g.delta0).sqrt(), (2.0 * g.r2 * g.delta0).sqrt())
    }

    pub fn terms(&self, y: Point) -> SigmaTerms {
        let f = self.f_star.eval(y);
        let df = self.f_star.gradient(y);
        let lf = self.f_star.laplacian(y);
        let psi = self.psi.value(y);
        let dpsi = self.psi.gradient(y);
        let lpsi = self.psi.laplacian(y);
        let k2 = self.bending_coefficient();
        SigmaTerms {
            psi_part: [f, -psi * f, psi * psi * f, -psi * psi * psi * f],
            elastic_part: [
                0.0,
                0.0,
                k2 * lf,
                k2 * (df[0] * dpsi[0] + df[1] * dpsi[1] + psi * lf)
                    - self.curvature_coefficient() * f * lpsi,
            ],
        }
    }

    /// `[σ0, σ1, σ2, σ3](y)`.
    pub fn sigma(&self, y: Point) -> [f64; 4] {
        self.terms(y).total()
    }

    /// `σ3` in its unsimplified form, before the product-rule identities are
    /// applied. `Δ(ψ*f*)` and `∇·(ψ*∇f*)` are taken on the product directly.
    pub fn sigma3_unsimplified(&self, y: Point) -> f64 {
        let k2 = self.bending_coefficient();
        let k3 = self.coupling_coefficient();
        let psi = self.psi.value(y);
        let f = self.f_star.eval(y);
        let lf = self.f_star.laplacian(y);
        let lap_prod = product_laplacian(self.psi.as_ref(), &self.f_star, y);
        let div_term = weighted_divergence(self.psi.as_ref(), &self.f_star, y);
        -psi * psi * psi * f
            - k2 * (psi * lf + lap_prod)
            - k3 * (self.mu * (psi * lf + lap_prod) - 2.0 * self.lambda * div_term)
    }

    /// Coefficients as polynomials, available when `ψ*` is polynomial.
    pub fn sigma_polynomials(&self) -> Option<[Polynomial2; 4]> {
        let psi = self.psi.as_polynomial()?;
        let f = &self.f_star;
        let lf = f.laplacian_poly();
        let k2 = self.bending_coefficient();
        let s0 = f.clone();
        let s1 = -&(psi * f);
        let s2 = &(&psi.pow(2) * f) + &lf.scale(k2);
        let grad_dot = &(&f.derivative(0) * &psi.derivative(0)) + &(&f.derivative(1) * &psi.derivative(1));
        let s3 = &(&(-&(&psi.pow(3) * f)) + &(&grad_dot + &(psi * &lf)).scale(k2))
            - &(f * &psi.laplacian_poly()).scale(self.curvature_coefficient());
        Some([s0, s1, s2, s3])
    }

    /// Truncated series value in physical pressure units.
    pub fn pressure(&self, y: Point) -> f64 {
        let s = self.sigma(y);
        let e = self.eps;
        self.prefactor * (s[0] + e * (s[1] + e * (s[2] + e * s[3])))
    }
}

/// Horner evaluation of the four-term series.
pub fn perturbation_pressure(series: &PerturbationSeries, y: Point) -> f64 {
    series.pressure(y)
}

/// Residual of the pressure equation on an interior subregion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// Max-norm of `LHS − RHS` over mapped radius `≤ RESIDUAL_INSET`.
    pub max_abs: f64,
    /// Max-norm of the right-hand side over the same region.
    pub rhs_scale: f64,
}

impl ResidualReport {
    pub fn relative(&self) -> f64 {
        self.max_abs / self.rhs_scale
    }
}

/// Substitutes the series into
/// `p + εψ*p − ε²K2Δp + ε³K3{μ[ψ*Δp + Δ(pψ*)] − 2λ∇·(ψ*∇p)} = (2μ+λ)/h* f*`
/// using discrete lattice operators on the contact ellipse of `f*`.
pub fn residual_check(series: &PerturbationSeries, grid: DiskGrid) -> Result<ResidualReport> {
    let domain = series.contact_domain()?;
    let e = series.eps;
    let p = ScalarField::sample(domain, grid, |y| series.pressure(y));
    let psi = ScalarField::sample(domain, grid, |y| series.psi.value(y));
    let rhs = ScalarField::sample(domain, grid, |y| series.prefactor * series.f_star.eval(y));
    let lap_p = field_laplacian(&p);
    let lap_ppsi = field_laplacian(&p.zip_with(&psi, |a, b| a * b)?);
    let div = div_weighted_grad(&psi, &p)?;
    let k2 = series.bending_coefficient();
    let k3 = series.coupling_coefficient();
    let (lambda, mu) = (series.lambda, series.mu);
    let n = grid.len();
    let values: Vec<f64> = (0..n)
        .map(|k| {
            let (pv, sv) = (p.values()[k], psi.values()[k]);
            let lhs = pv + e * sv * pv - e * e * k2 * lap_p.values()[k]
                + e * e * e
                    * k3
                    * (mu * (sv * lap_p.values()[k] + lap_ppsi.values()[k]) - 2.0 * lambda * div.values()[k]);
            lhs - rhs.values()[k]
        })
        .collect();
    let residual = ScalarField::from_values(domain, grid, values)?;
    Ok(ResidualReport {
        max_abs: residual.max_abs_within(RESIDUAL_INSET),
        rhs_scale: rhs.max_abs_within(RESIDUAL_INSET),
    })
}

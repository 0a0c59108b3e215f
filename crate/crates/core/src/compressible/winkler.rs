use crate::error::{Error, Result};
use crate::geometry::{EllipseDomain, ParaboloidGap, Point};
use crate::grid::{DiskGrid, ScalarField};
use crate::material::Material;
use crate::quadrature::PolarRule;
use crate::thickness::{check_positive_on, LayerThickness};

/// Foundation modulus `k(y) = (2μ + λ) / H(y)`.
pub fn winkler_modulus(material: &Material, layer: &LayerThickness, y: Point) -> Result<f64> {
    let m = material.p_wave_modulus()?;
    let h = layer.thickness(y);
    if !(h > 0.0) {
        return Err(Error::Domain(format!("layer thickness must be positive, H = {h}")));
    }
    Ok(m / h)
}

/// Contact pressure `k(y) (δ0 − φ(y))₊`.
pub fn winkler_pressure(
    material: &Material,
    layer: &LayerThickness,
    gap: &ParaboloidGap,
    y: Point,
) -> Result<f64> {
    let k = winkler_modulus(material, layer, y)?;
    Ok(k * gap.indentation(y).max(0.0))
}

/// The contact ellipse `δ0 = φ(y)`, semi-axes `aα = √(2 Rα δ0)`.
pub fn winkler_contact_region(gap: &ParaboloidGap) -> Result<EllipseDomain> {
    if !(gap.delta0 > 0.0) {
        return Err(Error::NoContact { delta0: gap.delta0 });
    }
    EllipseDomain::new(
        (2.0 * gap.r1 * gap.delta0).sqrt(),
        (2.0 * gap.r2 * gap.delta0).sqrt(),
    )
}

/// Contact force with the production polar rule.
pub fn winkler_force(material: &Material, layer: &LayerThickness, gap: &ParaboloidGap) -> Result<f64> {
    winkler_force_with(material, layer, gap, &PolarRule::production())
}

pub fn winkler_force_with(
    material: &Material,
    layer: &LayerThickness,
    gap: &ParaboloidGap,
    rule: &PolarRule,
) -> Result<f64> {
    let region = winkler_contact_region(gap)?;
    let m = material.p_wave_modulus()?;
    check_positive_on(layer.thickness_field().as_ref(), &region)?;
    Ok(rule.integrate(&region, |y| m / layer.thickness(y) * gap.indentation(y).max(0.0)))
}

/// Sampled compressible contact solution.
#[derive(Debug, Clone)]
pub struct WinklerSolution {
    pub pressure: ScalarField,
    pub contact_ellipse: EllipseDomain,
    pub force: f64,
    pub modulus_map: ScalarField,
    pub peak_pressure: f64,
}

pub fn solve_winkler(
    material: &Material,
    layer: &LayerThickness,
    gap: &ParaboloidGap,
    grid: DiskGrid,
) -> Result<WinklerSolution> {
    let region = winkler_contact_region(gap)?;
    let force = winkler_force(material, layer, gap)?;
    let m = material.p_wave_modulus()?;
    let modulus_map = ScalarField::sample(region, grid, |y| m / layer.thickness(y));
    let pressure = ScalarField::sample(region, grid, |y| {
        m / layer.thickness(y) * gap.indentation(y).max(0.0)
    });
    let peak_pressure = pressure.values().iter().copied().fold(0.0, f64::max);
    Ok(WinklerSolution {
        pressure,
        contact_ellipse: region,
        force,
        modulus_map,
        peak_pressure,
    })
}

//! Weighted effective thickness of a layer with a measured thickness map.
//!
//! The effective thickness minimises `∬ (H − h)² w` over a characteristic
//! ellipse, which makes it the `w`-weighted mean of `H`. With `w = ρ*` and
//! the characteristic ellipse equal to the contact region, the leftover
//! variation `H − h` leaves the contact force unchanged to first order.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Affine, FieldRef, SmoothField};
use crate::geometry::EllipseDomain;
use crate::grid::{DiskGrid, ScalarField};
use crate::quadrature::PolarRule;
use crate::sensitivity::{weight_eval, WeightFunction};
use crate::thickness::check_positive_on;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingWeight {
    RhoStar,
    ThetaStar,
    Uniform,
}

impl AveragingWeight {
    pub const ALL: [AveragingWeight; 3] = [Self::RhoStar, Self::ThetaStar, Self::Uniform];

    pub fn name(&self) -> &'static str {
        match self {
            Self::RhoStar => "rho_star",
            Self::ThetaStar => "theta_star",
            Self::Uniform => "uniform",
        }
    }

    /// Weight value at `y`; zero outside `domain`.
    pub fn eval(&self, domain: &EllipseDomain, y: crate::geometry::Point) -> f64 {
        match self {
            Self::RhoStar => weight_eval(&WeightFunction::rho_star(*domain), y),
            Self::ThetaStar => weight_eval(&WeightFunction::theta_star(*domain), y),
            Self::Uniform => {
                if domain.contains(y) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveThicknessResult {
    pub h_eff: f64,
    /// `∬ (H − h_eff)² w`.
    pub criterion: f64,
    pub weight: AveragingWeight,
}

fn weighted_integral(domain: &EllipseDomain, weight: AveragingWeight, f: impl Fn(crate::geometry::Point) -> f64) -> f64 {
    PolarRule::production().integrate(domain, |y| weight.eval(domain, y) * f(y))
}

pub fn effective_thickness(
    map: &dyn SmoothField,
    domain: &EllipseDomain,
    weight: AveragingWeight,
) -> Result<EffectiveThicknessResult> {
    check_positive_on(map, domain)?;
    let mass = weighted_integral(domain, weight, |_| 1.0);
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("weight {} has non-positive integral", weight.name())));
    }
    let h_eff = weighted_integral(domain, weight, |y| map.value(y)) / mass;
    Ok(EffectiveThicknessResult {
        h_eff,
        criterion: criterion_value(map, h_eff, domain, weight),
        weight,
    })
}

/// `∬ (H − h)² w`.
pub fn criterion_value(map: &dyn SmoothField, h: f64, domain: &EllipseDomain, weight: AveragingWeight) -> f64 {
    weighted_integral(domain, weight, |y| {
        let d = map.value(y) - h;
        d * d
    })
}

/// `H̃ = H − h_eff` as a field.
pub fn orthogonal_variation(map: FieldRef, h_eff: f64) -> FieldRef {
    Arc::new(Affine::shifted(map, h_eff))
}

/// `H̃ = H − h_eff` sampled on the lattice of `domain`.
pub fn orthogonalize_variation(map: FieldRef, h_eff: f64, domain: &EllipseDomain, grid: DiskGrid) -> ScalarField {
    ScalarField::sample_field(*domain, grid, orthogonal_variation(map, h_eff).as_ref())
}

/// `(∬ H̃ w, ∬ |H̃| w)`; the first vanishes when `H̃` is `w`-orthogonal.
pub fn weighted_moment(variation: &dyn SmoothField, domain: &EllipseDomain, weight: AveragingWeight) -> (f64, f64) {
    (
        weighted_integral(domain, weight, |y| variation.value(y)),
        weighted_integral(domain, weight, |y| variation.value(y).abs()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSummary {
    pub result: EffectiveThicknessResult,
    /// `h_eff` minus the uniform-weight mean.
    pub shift_from_uniform: f64,
    /// Mapped radius of the weight maximum along the major axis; `None`
    /// for the uniform weight.
    pub argmax_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightComparison {
    pub domain: EllipseDomain,
    pub kappa: f64,
    pub entries: Vec<WeightSummary>,
}

impl WeightComparison {
    pub fn get(&self, weight: AveragingWeight) -> &WeightSummary {
        self.entries
            .iter()
            .find(|e| e.result.weight == weight)
            .expect("every weight is compared")
    }
}

/// Golden-section maximisation of `f` on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    // The maximum may sit on an end point.
    [lo, x, hi].into_iter().fold(x, |best, t| if f(t) > f(best) { t } else { best })
}

/// Effective thickness under every weight on `ω* = κ·domain`.
pub fn compare_weights(map: &dyn SmoothField, domain: &EllipseDomain, kappa: f64) -> Result<WeightComparison> {
    let scaled = domain.scaled(kappa)?;
    let uniform = effective_thickness(map, &scaled, AveragingWeight::Uniform)?.h_eff;
    let entries = AveragingWeight::ALL
        .iter()
        .map(|&w| {
            let result = effective_thickness(map, &scaled, w)?;
            let argmax_radius = match w {
                AveragingWeight::Uniform => None,
                _ => Some(golden_section_max(|r| w.eval(&scaled, [r * scaled.a1, 0.0]), 0.0, 1.0, 1e-10)),
            };
            Ok(WeightSummary {
                result,
                shift_from_uniform: result.h_eff - uniform,
                argmax_radius,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightComparison {
        domain: scaled,
        kappa,
        entries,
    })
}

//! Runtime verification suite.
//!
//! Each criterion compares a computed quantity against an independent
//! closed form or a convergence property and reports the measured values
//! next to their limits. Resolution-dependent criteria use the lattice
//! pair `(N, 2N)`: absolute limits apply at `2N`, ratios between the two.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::compressible::{
    displacement_profiles, perturbation_coefficients, residual_check, winkler_force,
};
use crate::effective::{compare_weights, criterion_value, effective_thickness, orthogonal_variation, AveragingWeight};
use crate::error::{Error, Result};
use crate::field::{Constant, FieldRef, FnField, Polynomial2};
use crate::geometry::{EllipseDomain, ParaboloidGap, Point};
use crate::grid::DiskGrid;
use crate::incompressible::{
    aggregate_compliance, elliptic_contact_solve, incompressible_limit_coefficients, LayerStiffness,
};
use crate::maps::ExprField;
use crate::material::Material;
use crate::poisson::unit_source_error;
use crate::quadrature::integrate_ellipse;
use crate::sensitivity::{
    absolute_force_variation, force_variation, pressure_variation, weight_eval, SensitivityProblem, VariedLayer,
    WeightFunction,
};
use crate::thickness::LayerThickness;

pub const CRITERIA: usize = 12;

/// Fine resolution at which the absolute error limits are stated.
pub const REFERENCE_CELLS: usize = 256;
/// Default coarse lattice of the convergence pair.
pub const DEFAULT_CELLS: usize = REFERENCE_CELLS / 2;

/// Thickness maps of the shipped two-layer sample, in millimetres.
pub const SAMPLE_MAPS: [&str; 2] = [
    "2 + 0.4*exp(-((y1-2)^2 + (y2+1)^2)/18) + 0.02*y1",
    "1.6 - 0.25*exp(-((y1+1.5)^2 + (y2-0.5)^2)/10) + 0.03*sin(y2/3)",
];
/// Nominal thicknesses the sample maps vary around.
pub const SAMPLE_BASE_THICKNESS: [f64; 2] = [2.0, 1.6];
/// Young's modulus of both sample layers, MPa.
pub const SAMPLE_YOUNGS: f64 = 10.0;
/// `(R1, R2, δ0)` of the sample gap, millimetres.
pub const SAMPLE_GAP: (f64, f64, f64) = (40.0, 25.0, 0.3);

/// Two-layer configuration used by the thickness-map criteria.
#[derive(Clone)]
pub struct SampleCase {
    pub maps: Vec<FieldRef>,
    pub base_thickness: Vec<f64>,
    pub youngs: Vec<f64>,
    pub gap: ParaboloidGap,
}

impl fmt::Debug for SampleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampleCase")
            .field("base_thickness", &self.base_thickness)
            .field("youngs", &self.youngs)
            .field("gap", &self.gap)
            .finish_non_exhaustive()
    }
}

impl SampleCase {
    pub fn shipped() -> Result<Self> {
        let maps = SAMPLE_MAPS
            .iter()
            .map(|s| ExprField::parse(s).map(|e| Arc::new(e) as FieldRef))
            .collect::<Result<Vec<_>>>()?;
        let (r1, r2, d0) = SAMPLE_GAP;
        Self::new(maps, SAMPLE_BASE_THICKNESS.to_vec(), vec![SAMPLE_YOUNGS; 2], ParaboloidGap::new(r1, r2, d0)?)
    }

    pub fn new(maps: Vec<FieldRef>, base_thickness: Vec<f64>, youngs: Vec<f64>, gap: ParaboloidGap) -> Result<Self> {
        if maps.is_empty() || maps.len() != base_thickness.len() || maps.len() != youngs.len() {
            return Err(Error::Shape(format!(
                "{} maps, {} base thicknesses, {} moduli",
                maps.len(),
                base_thickness.len(),
                youngs.len()
            )));
        }
        Ok(Self {
            maps,
            base_thickness,
            youngs,
            gap,
        })
    }

    /// Contact ellipse of the incompressible solution at the base thicknesses.
    pub fn contact_domain(&self) -> Result<EllipseDomain> {
        let m = aggregate_compliance(&self.stiffness(&self.base_thickness)?)?;
        Ok(elliptic_contact_solve(m, &self.gap)?.domain)
    }

    fn stiffness(&self, thickness: &[f64]) -> Result<Vec<LayerStiffness>> {
        self.youngs
            .iter()
            .zip(thickness)
            .map(|(&e, &h)| LayerStiffness::new(e, h))
            .collect()
    }

    /// Sensitivity problem for `H̃α = Hα − shiftα` with stiffness taken at the shifts.
    pub fn sensitivity_problem(&self, shifts: &[f64]) -> Result<SensitivityProblem> {
        let stiffness = self.stiffness(shifts)?;
        let m = aggregate_compliance(&stiffness)?;
        let base = elliptic_contact_solve(m, &self.gap)?;
        let layers = stiffness
            .into_iter()
            .zip(&self.maps)
            .zip(shifts)
            .map(|((s, map), &h)| VariedLayer::new(s, orthogonal_variation(map.clone(), h)))
            .collect();
        SensitivityProblem::new(base, m, layers)
    }
}

#[derive(Debug, Clone)]
pub struct ValidationSettings {
    /// Coarse lattice `N`; the fine lattice is `2N`.
    pub cells: usize,
    pub sample: SampleCase,
}

impl ValidationSettings {
    pub fn new(cells: usize, sample: SampleCase) -> Result<Self> {
        DiskGrid::new(cells)?;
        DiskGrid::new(2 * cells)?;
        Ok(Self { cells, sample })
    }

    pub fn shipped() -> Result<Self> {
        Self::new(DEFAULT_CELLS, SampleCase::shipped()?)
    }

    pub fn fine_cells(&self) -> usize {
        2 * self.cells
    }

    fn fine(&self) -> DiskGrid {
        DiskGrid::new(self.fine_cells()).expect("validated in the constructor")
    }

    fn coarse(&self) -> DiskGrid {
        DiskGrid::new(self.cells).expect("validated in the constructor")
    }

    /// Error limit at the fine lattice, scaled from the reference
    /// resolution by second-order convergence when running coarser.
    fn scaled_limit(&self, limit: f64) -> f64 {
        let r = REFERENCE_CELLS as f64 / self.fine_cells() as f64;
        limit * (r * r).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Limit {
    AtMost { limit: f64 },
    Above { limit: f64 },
    Within { target: f64, tolerance: f64 },
}

impl Limit {
    fn accepts(&self, x: f64) -> bool {
        match *self {
            Limit::AtMost { limit } => x <= limit,
            Limit::Above { limit } => x > limit,
            Limit::Within { target, tolerance } => (x - target).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Limit::AtMost { limit } => write!(f, "<= {limit:.1e}"),
            Limit::Above { limit } => write!(f, "> {limit:.1e}"),
            Limit::Within { target, tolerance } => write!(f, "{target:.6} ± {tolerance:.1e}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub limit: Limit,
    pub passed: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, measured: f64, limit: Limit) -> Self {
        Self {
            label: label.into(),
            measured,
            limit,
            passed: limit.accepts(measured),
        }
    }

    pub fn at_most(label: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self::new(label, measured, Limit::AtMost { limit })
    }

    pub fn above(label: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self::new(label, measured, Limit::Above { limit })
    }

    pub fn near(label: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(label, measured, Limit::Within { target, tolerance })
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:.6e} (limit {})", self.label, self.measured, self.limit)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    fn new(id: usize, name: &'static str, checks: Vec<Check>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self {
            id,
            name,
            passed,
            checks,
        }
    }

    fn failed(id: usize, name: &'static str, err: &Error) -> Self {
        Self {
            id,
            name,
            passed: false,
            checks: vec![Check::at_most(format!("error: {err}"), f64::NAN, f64::NAN)],
        }
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} criterion {:>2} ({}): ", self.id, self.name)?;
        for (k, c) in self.checks.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub cells: usize,
    pub fine_cells: usize,
    pub outcomes: Vec<CriterionOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "Winkler circular force",
        2 => "elliptic circular contact",
        3 => "incompressible pressure equation",
        4 => "unit-source Poisson solve",
        5 => "ellipse quadrature identities",
        6 => "orthogonal variation keeps force",
        7 => "perturbation residual order",
        8 => "constant-variation geometric series",
        9 => "incompressible limit coefficient",
        10 => "surface constant dual forms",
        11 => "effective thickness optimality",
        12 => "weight maxima",
        _ => "unknown",
    }
}

/// Runs one criterion; internal errors become a failing outcome.
pub fn run_criterion(id: usize, settings: &ValidationSettings) -> CriterionOutcome {
    let name = criterion_name(id);
    let checks = match id {
        1 => winkler_circular(),
        2 => elliptic_circular(),
        3 => pressure_equation(settings),
        4 => unit_source(settings),
        5 => quadrature_identities(settings),
        6 => orthogonal_variation_force(settings),
        7 => perturbation_order(settings),
        8 => geometric_series(),
        9 => limit_coefficient(),
        10 => surface_constant_forms(),
        11 => effective_optimality(settings),
        12 => weight_maxima(),
        _ => Err(Error::Domain(format!("no criterion {id}"))),
    };
    match checks {
        Ok(c) => CriterionOutcome::new(id, name, c),
        Err(e) => CriterionOutcome::failed(id, name, &e),
    }
}

pub fn run_validation(settings: &ValidationSettings) -> ValidationReport {
    let outcomes = (1..=CRITERIA)
        .into_par_iter()
        .map(|id| run_criterion(id, settings))
        .collect();
    ValidationReport {
        cells: settings.cells,
        fine_cells: settings.fine_cells(),
        outcomes,
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn winkler_circular() -> Result<Vec<Check>> {
    let (r, d0, h) = (1.5, 0.1, 0.2);
    let material = Material::compressible(2.0, 0.3)?;
    let force = winkler_force(&material, &LayerThickness::uniform(h)?, &ParaboloidGap::new(r, r, d0)?)?;
    let exact = PI * material.p_wave_modulus()? * r * d0 * d0 / h;
    Ok(vec![Check::at_most("relative force error", relative(force, exact), 1e-6)])
}

fn elliptic_circular() -> Result<Vec<Check>> {
    let (m, r, d0) = (1.3, 2.0, 0.05);
    let sol = elliptic_contact_solve(m, &ParaboloidGap::new(r, r, d0)?)?;
    let a2 = 4.0 * r * d0;
    let axes = relative(sol.domain.a1 * sol.domain.a1, a2).max(relative(sol.domain.a2 * sol.domain.a2, a2));
    Ok(vec![
        Check::at_most("semi-axis² error", axes, 1e-10),
        Check::at_most("p0 error", relative(sol.p0, m * r * d0 * d0 / 2.0), 1e-10),
        Check::at_most("M_P(1) error", relative(sol.m_p, 2.0), 1e-8),
    ])
}

fn pressure_equation(settings: &ValidationSettings) -> Result<Vec<Check>> {
    let gap = settings.sample.gap;
    let m = aggregate_compliance(&settings.sample.stiffness(&settings.sample.base_thickness)?)?;
    let sol = elliptic_contact_solve(m, &gap)?;
    let lap = sol.pressure_polynomial().laplacian_poly();
    let grid = DiskGrid::new(64)?;
    let n = grid.cells();
    let mut worst = 0.0f64;
    for j in 0..=n {
        for i in 0..=n {
            if grid.is_inside(i, j) {
                let y = sol.domain.to_physical([grid.xi(i), grid.xi(j)]);
                worst = worst.max((-lap.eval(y) / m - gap.indentation(y)).abs() / gap.delta0);
            }
        }
    }
    Ok(vec![Check::at_most("max |residual|/delta0 on 64² lattice", worst, 1e-10)])
}

fn unit_source(settings: &ValidationSettings) -> Result<Vec<Check>> {
    let domain = EllipseDomain::new(1.4, 0.8)?;
    let coarse = unit_source_error(&domain, settings.coarse())?;
    let fine = unit_source_error(&domain, settings.fine())?;
    Ok(vec![
        Check::at_most(format!("relative L2 error at {}²", settings.fine_cells()), fine, settings.scaled_limit(1e-4)),
        Check::near(format!("error ratio {}²/{}²", settings.cells, settings.fine_cells()), coarse / fine, 4.0, 0.5),
    ])
}

fn quadrature_identities(settings: &ValidationSettings) -> Result<Vec<Check>> {
    let mut worst_theta = 0.0f64;
    let mut worst_rho = 0.0f64;
    for d in [EllipseDomain::new(1.7, 0.6)?, EllipseDomain::circle(1.0)?, settings.sample.contact_domain()?] {
        let (a1, a2) = (d.a1, d.a2);
        let t = integrate_ellipse(&d, |y| d.theta(y).powi(2));
        worst_theta = worst_theta.max(relative(t, PI * a1 * a2 / 3.0));
        let w = WeightFunction::rho_star(d);
        let r = integrate_ellipse(&d, |y| weight_eval(&w, y));
        worst_rho = worst_rho.max(relative(r, PI * (a1 * a1 + a2 * a2) / 12.0));
    }
    Ok(vec![
        Check::at_most("theta² integral error", worst_theta, 1e-6),
        Check::at_most("rho* integral error", worst_rho, 1e-6),
    ])
}

/// `|∬p̃| / ∬|p̃|` on the fine lattice.
pub fn force_ratio(prob: &SensitivityProblem, grid: DiskGrid) -> Result<f64> {
    let (p, _) = pressure_variation(prob, grid)?;
    Ok(force_variation(&p).abs() / absolute_force_variation(&p))
}

/// `ρ*`-weighted effective thickness of each sample layer over the contact ellipse.
pub fn sample_effective_thickness(sample: &SampleCase) -> Result<Vec<f64>> {
    let domain = sample.contact_domain()?;
    sample
        .maps
        .iter()
        .map(|m| effective_thickness(m.as_ref(), &domain, AveragingWeight::RhoStar).map(|r| r.h_eff))
        .collect()
}

fn orthogonal_variation_force(settings: &ValidationSettings) -> Result<Vec<Check>> {
    let sample = &settings.sample;
    let h_eff = sample_effective_thickness(sample)?;
    let orthogonal = force_ratio(&sample.sensitivity_problem(&h_eff)?, settings.fine())?;
    let offset = force_ratio(&sample.sensitivity_problem(&sample.base_thickness)?, settings.fine())?;
    Ok(vec![
        Check::at_most("orthogonalized |∫p~|/∫|p~|", orthogonal, 1e-3),
        Check::above("base-offset |∫p~|/∫|p~|", offset, 1e-1),
    ])
}

fn perturbation_order(settings: &ValidationSettings) -> Result<Vec<Check>> {
    let psi: FieldRef = Arc::new(Polynomial2::from_terms(&[
        (0, 0, 0.3),
        (1, 0, 0.2),
        (2, 0, -0.4),
        (1, 1, 0.25),
        (0, 2, 0.1),
        (0, 3, 0.05),
    ]));
    let material = Material::compressible(2.0, 0.3)?;
    let (h_star, r1s, r2s, d0s) = (0.8, 1.5, 0.9, 0.4);
    let eps = [0.2, 0.1, 0.05, 0.025];
    let residuals = eps
        .iter()
        .map(|&e| {
            let layer = LayerThickness::from_scaled(h_star, e, psi.clone())?;
            let gap = ParaboloidGap::new(r1s / e, r2s / e, d0s * e)?;
            let series = perturbation_coefficients(&material, &layer, &gap)?;
            Ok(residual_check(&series, settings.fine())?.max_abs)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(residuals
        .windows(2)
        .zip(eps.windows(2))
        .map(|(r, e)| {
            let slope = (r[0] / r[1]).ln() / (e[0] / e[1]).ln();
            Check::near(format!("slope eps {}→{}", e[0], e[1]), slope, 4.0, 0.3)
        })
        .collect())
}

fn geometric_series() -> Result<Vec<Check>> {
    let material = Material::compressible(2.0, 0.3)?;
    let mut worst = 0.0f64;
    for c in [0.7, -0.4] {
        let eps = 0.1;
        let layer = LayerThickness::from_scaled(0.8, eps, Arc::new(Constant(c)))?;
        let gap = ParaboloidGap::new(1.5 / eps, 0.9 / eps, 0.4 * eps)?;
        let series = perturbation_coefficients(&material, &layer, &gap)?;
        for y in [[0.0, 0.0], [0.2, 0.1], [-0.5, 0.3]] {
            let f = series.f_star().eval(y);
            let t = series.terms(y);
            for (k, part) in t.psi_part.iter().enumerate() {
                worst = worst.max(relative(*part, (-c).powi(k as i32) * f));
            }
        }
    }
    Ok(vec![Check::at_most("max relative deviation k=0..3", worst, 1e-14)])
}

fn limit_coefficient() -> Result<Vec<Check>> {
    let e = 10.0;
    let near = incompressible_limit_coefficients(&Material::new(e, 0.4999)?)?.bending;
    let quarter = incompressible_limit_coefficients(&Material::new(e, 0.25)?)?.bending;
    Ok(vec![
        Check::at_most("relative gap to 3/E at nu = 0.4999", relative(near, 3.0 / e), 2e-3),
        Check::at_most("|value| at nu = 0.25", quarter.abs(), 1e-12),
    ])
}

fn surface_constant_forms() -> Result<Vec<Check>> {
    let material = Material::compressible(3.0, 0.35)?;
    let p = Polynomial2::from_terms(&[(0, 0, 1.0), (2, 0, -0.6), (0, 2, -0.3), (1, 1, 0.2), (4, 0, 0.1), (2, 2, -0.05)]);
    let ht = Polynomial2::from_terms(&[(0, 0, 0.1), (1, 0, 0.3), (0, 1, -0.2), (2, 0, 0.15), (1, 2, 0.1), (0, 4, -0.07)]);
    let h_star = 0.7;
    let layer = LayerThickness::from_scaled(h_star, 0.2, Arc::new(ht.scale(1.0 / h_star)))?;
    let prof = displacement_profiles(&material, &layer, Arc::new(p))?;
    let mut worst = 0.0f64;
    for k in 0..40 {
        let a = 2.399963 * k as f64;
        let r = 0.9 * (k as f64 / 40.0).sqrt();
        let y: Point = [r * a.cos(), r * a.sin()];
        let (x, z) = (prof.c0(y), prof.c0_expanded(y));
        worst = worst.max((x - z).abs() / x.abs().max(z.abs()).max(1e-12));
    }
    Ok(vec![Check::at_most("max relative disagreement", worst, 1e-10)])
}

fn effective_optimality(settings: &ValidationSettings) -> Result<Vec<Check>> {
    let domain = settings.sample.contact_domain()?;
    let mut maps = settings.sample.maps.clone();
    maps.push(Arc::new(Polynomial2::from_terms(&[
        (0, 0, 1.8),
        (1, 0, 0.01),
        (2, 0, -0.002),
        (1, 1, 0.003),
        (0, 3, 0.0004),
    ])));
    let mut margin = f64::INFINITY;
    for map in &maps {
        let r = effective_thickness(map.as_ref(), &domain, AveragingWeight::RhoStar)?;
        for t in [1.0 - 1e-3, 1.0 + 1e-3] {
            let c = criterion_value(map.as_ref(), r.h_eff * t, &domain, AveragingWeight::RhoStar);
            margin = margin.min(c - r.criterion);
        }
    }
    let (h0, beta) = (2.0, 0.3);
    let circle = EllipseDomain::circle(1.0)?;
    let profile = FnField::new(move |y: Point| h0 * (1.0 + beta * circle.theta(y)));
    let h = effective_thickness(&profile, &circle, AveragingWeight::RhoStar)?.h_eff;
    Ok(vec![
        Check::above(format!("min criterion increase at ±0.1% over {} maps", maps.len()), margin, 0.0),
        Check::at_most("theta-profile relative error", relative(h, h0 * (1.0 + beta / 2.0)), 1e-6),
    ])
}

fn weight_maxima() -> Result<Vec<Check>> {
    let c = compare_weights(&Constant(1.0), &EllipseDomain::circle(1.0)?, 1.0)?;
    let radius = |w| c.get(w).argmax_radius.unwrap_or(f64::NAN);
    Ok(vec![
        Check::near("rho* argmax radius vs 1/sqrt2", radius(AveragingWeight::RhoStar), FRAC_1_SQRT_2, 1e-6),
        Check::at_most("theta* argmax radius", radius(AveragingWeight::ThetaStar), 1e-6),
    ])
}

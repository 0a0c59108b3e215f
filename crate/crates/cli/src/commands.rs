use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use thinlayer_core::compressible::solve_winkler;
use thinlayer_core::effective::{compare_weights, orthogonal_variation, orthogonalize_variation, AveragingWeight};
use thinlayer_core::incompressible::{aggregate_compliance, elliptic_contact_solve, EllipticContactSolution, LayerStiffness};
use thinlayer_core::maps::{round_significant, write_field_csv};
use thinlayer_core::sensitivity::{
    absolute_force_variation, force_variation, orthogonality_residual, predicted_force_variation, pressure_variation,
    SensitivityProblem, VariedLayer, WeightFunction,
};
use thinlayer_core::thickness::{select_eps, thickness_decompose};
use thinlayer_core::validation::{run_validation, SampleCase, ValidationReport, ValidationSettings};
use thinlayer_core::{compressible, Constant, FieldRef, LayerThickness, Material, ScalarField};

use crate::config::{LayerConfig, RunConfig};

/// Where reports and field dumps go; nothing is written without a directory.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating output directory {}", d.display()))?;
        }
        Ok(Self { dir })
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn json<T: Serialize>(&self, name: &str, report: &T) -> Result<String> {
        let text = serde_json::to_string_pretty(report)? + "\n";
        if let Some(p) = self.path(name) {
            std::fs::write(&p, &text).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(text)
    }

    pub fn field(&self, name: &str, field: &ScalarField, column: &str) -> Result<Option<PathBuf>> {
        match self.path(name) {
            Some(p) => {
                write_field_csv(&p, field, column)?;
                Ok(Some(p))
            }
            None => Ok(None),
        }
    }
}

fn r(x: f64) -> f64 {
    round_significant(x)
}

fn display(p: Option<PathBuf>) -> Option<String> {
    p.map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
}

#[derive(Debug, Serialize)]
pub struct WinklerReport {
    pub a1: f64,
    pub a2: f64,
    pub force: f64,
    pub peak_pressure: f64,
    pub winkler_modulus_center: f64,
    pub grid: usize,
    pub pressure_csv: Option<String>,
}

pub fn cmd_winkler(cfg: &RunConfig, grid_override: Option<usize>, out: &Output) -> Result<String> {
    let grid = cfg.grid(grid_override)?;
    let gap = cfg.gap()?;
    let m = cfg.material.context("missing [material] section")?;
    let material = Material::new(m.youngs, m.poisson)?;
    let layer_cfg = cfg.layer.as_ref().context("missing [layer] section")?;
    let region = compressible::winkler_contact_region(&gap)?;
    let layer = match cfg.load_map(layer_cfg.map.as_deref(), layer_cfg.map_file.as_deref())? {
        None => LayerThickness::uniform(layer_cfg.thickness)?,
        Some(map) => {
            let eps = match layer_cfg.eps {
                Some(e) => e,
                None => select_eps(map.as_ref(), layer_cfg.thickness, &region)?,
            };
            thickness_decompose(map, layer_cfg.thickness, eps, &region)?
        }
    };
    let sol = solve_winkler(&material, &layer, &gap, grid)?;
    let csv = out.field("winkler_pressure.csv", &sol.pressure, "pressure")?;
    let report = WinklerReport {
        a1: r(sol.contact_ellipse.a1),
        a2: r(sol.contact_ellipse.a2),
        force: r(sol.force),
        peak_pressure: r(sol.peak_pressure),
        winkler_modulus_center: r(compressible::winkler_modulus(&material, &layer, [0.0, 0.0])?),
        grid: grid.cells(),
        pressure_csv: display(csv),
    };
    out.json("winkler.json", &report)
}

fn stiffness(layers: &[LayerConfig]) -> Result<Vec<LayerStiffness>> {
    if layers.is_empty() {
        bail!("at least one [[layers]] entry is required");
    }
    layers
        .iter()
        .map(|l| LayerStiffness::new(l.youngs, l.thickness).map_err(Into::into))
        .collect()
}

fn contact(cfg: &RunConfig) -> Result<(f64, EllipticContactSolution)> {
    let m = aggregate_compliance(&stiffness(&cfg.layers)?)?;
    Ok((m, elliptic_contact_solve(m, &cfg.gap()?)?))
}

#[derive(Debug, Serialize)]
pub struct EllipticReport {
    pub m: f64,
    pub p0: f64,
    pub a1: f64,
    pub a2: f64,
    pub s: f64,
    #[serde(rename = "P")]
    pub force: f64,
    #[serde(rename = "M_P")]
    pub m_p: f64,
    pub iterations: usize,
    pub coefficient_residual: f64,
    pub grid: usize,
    pub pressure_csv: Option<String>,
}

pub fn cmd_elliptic(cfg: &RunConfig, grid_override: Option<usize>, out: &Output) -> Result<String> {
    let grid = cfg.grid(grid_override)?;
    let (m, sol) = contact(cfg)?;
    let p = sol.pressure_polynomial();
    let field = ScalarField::sample(sol.domain, grid, |y| if sol.domain.contains(y) { p.eval(y) } else { 0.0 });
    let csv = out.field("elliptic_pressure.csv", &field, "pressure")?;
    let report = EllipticReport {
        m: r(m),
        p0: r(sol.p0),
        a1: r(sol.domain.a1),
        a2: r(sol.domain.a2),
        s: r(sol.s),
        force: r(sol.force),
        m_p: r(sol.m_p),
        iterations: sol.iterations,
        coefficient_residual: r(sol.coefficient_residual),
        grid: grid.cells(),
        pressure_csv: display(csv),
    };
    out.json("elliptic.json", &report)
}

#[derive(Debug, Serialize)]
pub struct SensitivityReport {
    pub force_variation: f64,
    pub absolute_force_variation: f64,
    pub force_ratio: f64,
    pub predicted_force_variation: f64,
    pub orthogonality_residual: f64,
    pub grid: usize,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub pressure_variation_csv: Option<String>,
}

pub fn cmd_sensitivity(cfg: &RunConfig, grid_override: Option<usize>, out: &Output) -> Result<String> {
    let grid = cfg.grid(grid_override)?;
    let (m, sol) = contact(cfg)?;
    let domain = sol.domain;
    let mut layers = Vec::with_capacity(cfg.layers.len());
    for (lc, st) in cfg.layers.iter().zip(stiffness(&cfg.layers)?) {
        let variation: FieldRef = match cfg.load_variation(lc, domain, grid)? {
            Some(field) => Arc::new(field),
            None => match cfg.load_map(lc.map.as_deref(), lc.map_file.as_deref())? {
                Some(map) => orthogonal_variation(map, lc.thickness),
                None => Arc::new(Constant(0.0)),
            },
        };
        layers.push(VariedLayer::new(st, variation));
    }
    let prob = SensitivityProblem::new(sol, m, layers)?;
    let (p, stats) = pressure_variation(&prob, grid)?;
    let csv = out.field("pressure_variation.csv", &p, "pressure_variation")?;
    let (fv, av) = (force_variation(&p), absolute_force_variation(&p));
    let report = SensitivityReport {
        force_variation: r(fv),
        absolute_force_variation: r(av),
        force_ratio: r(if av > 0.0 { fv.abs() / av } else { 0.0 }),
        predicted_force_variation: r(predicted_force_variation(&prob)),
        orthogonality_residual: r(orthogonality_residual(&prob.layers, &WeightFunction::rho(domain))),
        grid: grid.cells(),
        solver_iterations: stats.iterations,
        solver_residual: r(stats.relative_residual),
        pressure_variation_csv: display(csv),
    };
    out.json("sensitivity.json", &report)
}

#[derive(Debug, Serialize)]
pub struct WeightEntry {
    pub weight: AveragingWeight,
    pub h_eff: f64,
    pub criterion: f64,
    pub shift_from_uniform: f64,
    pub argmax_radius: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct LayerOptimum {
    pub layer: usize,
    pub weights: Vec<WeightEntry>,
    pub variation_csv: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub a1: f64,
    pub a2: f64,
    pub kappa: f64,
    pub layers: Vec<LayerOptimum>,
}

pub fn cmd_optimize(cfg: &RunConfig, grid_override: Option<usize>, out: &Output) -> Result<String> {
    let grid = cfg.grid(grid_override)?;
    let (_, sol) = contact(cfg)?;
    let mut layers = Vec::with_capacity(cfg.layers.len());
    for (k, lc) in cfg.layers.iter().enumerate() {
        let map = cfg
            .load_map(lc.map.as_deref(), lc.map_file.as_deref())?
            .with_context(|| format!("layers[{k}] needs a thickness map (map or map_file)"))?;
        let cmp = compare_weights(map.as_ref(), &sol.domain, cfg.domain.kappa)?;
        let weights = cmp
            .entries
            .iter()
            .map(|e| WeightEntry {
                weight: e.result.weight,
                h_eff: r(e.result.h_eff),
                criterion: r(e.result.criterion),
                shift_from_uniform: r(e.shift_from_uniform),
                argmax_radius: e.argmax_radius.map(r),
            })
            .collect();
        let variation_csv = if cfg.output.orthogonalized {
            let h = cmp.get(AveragingWeight::RhoStar).result.h_eff;
            let field = orthogonalize_variation(map.clone(), h, &sol.domain, grid);
            display(out.field(&format!("variation_layer{}.csv", k + 1), &field, "H")?)
        } else {
            None
        };
        layers.push(LayerOptimum {
            layer: k + 1,
            weights,
            variation_csv,
        });
    }
    let report = OptimizeReport {
        a1: r(sol.domain.a1),
        a2: r(sol.domain.a2),
        kappa: cfg.domain.kappa,
        layers,
    };
    out.json("optimize.json", &report)
}

/// Runs the verification suite; the sample case comes from the config
/// when it lists layers with thickness maps.
pub fn cmd_validate(cfg: &RunConfig, grid_override: Option<usize>, out: &Output) -> Result<ValidationReport> {
    let cells = match grid_override {
        Some(n) => cfg.grid(Some(n))?.cells(),
        None => thinlayer_core::validation::DEFAULT_CELLS,
    };
    let sample = if cfg.layers.is_empty() {
        SampleCase::shipped()?
    } else {
        let mut maps = Vec::new();
        for (k, lc) in cfg.layers.iter().enumerate() {
            let map = cfg
                .load_map(lc.map.as_deref(), lc.map_file.as_deref())
                .with_context(|| format!("loading thickness map of layers[{k}]; validation aborted"))?
                .with_context(|| format!("layers[{k}] needs a thickness map (map or map_file)"))?;
            maps.push(map);
        }
        SampleCase::new(
            maps,
            cfg.layers.iter().map(|l| l.thickness).collect(),
            cfg.layers.iter().map(|l| l.youngs).collect(),
            cfg.gap()?,
        )?
    };
    let report = run_validation(&ValidationSettings::new(cells, sample)?);
    out.json("validate.json", &report)?;
    Ok(report)
}

pub fn config_or_default(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

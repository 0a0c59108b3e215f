//! TOML run configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use thinlayer_core::maps::{ExprField, LatticeMap};
use thinlayer_core::{DiskGrid, EllipseDomain, FieldRef, ParaboloidGap, ScalarField};

pub const DEFAULT_GRID: usize = 128;
pub const GRID_RANGE: (usize, usize) = (32, 1024);

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<GeometryConfig>,
    pub material: Option<MaterialConfig>,
    pub layer: Option<WinklerLayerConfig>,
    #[serde(default)]
    pub layers: Vec<LayerConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory that relative map paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub r1: f64,
    pub r2: f64,
    pub delta0: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub youngs: f64,
    pub poisson: f64,
}

/// Single compressible layer for the Winkler model.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WinklerLayerConfig {
    pub thickness: f64,
    pub map: Option<String>,
    pub map_file: Option<PathBuf>,
    pub eps: Option<f64>,
}

/// One layer of an incompressible stack.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub youngs: f64,
    /// Nominal (or effective) thickness used for the stiffness.
    pub thickness: f64,
    pub map: Option<String>,
    pub map_file: Option<PathBuf>,
    pub variation: Option<String>,
    pub variation_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_grid")]
    pub grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID }
    }
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// `ω* = κ ω`.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { kappa: 1.0 }
    }
}

fn default_kappa() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write `H − h_eff` maps from `optimize`.
    #[serde(default)]
    pub orthogonalized: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in config {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let g = self.solver.grid;
        if !g.is_power_of_two() || g < GRID_RANGE.0 || g > GRID_RANGE.1 {
            bail!(
                "solver.grid = {g}: must be a power of two between {} and {}",
                GRID_RANGE.0,
                GRID_RANGE.1
            );
        }
        if let Some(geo) = &self.geometry {
            positive("geometry.r1", geo.r1)?;
            positive("geometry.r2", geo.r2)?;
            finite("geometry.delta0", geo.delta0)?;
        }
        if let Some(m) = &self.material {
            positive("material.youngs", m.youngs)?;
            if !(m.poisson > -1.0 && m.poisson <= 0.5) {
                bail!("material.poisson = {}: must lie in (-1, 0.5]", m.poisson);
            }
        }
        if let Some(l) = &self.layer {
            positive("layer.thickness", l.thickness)?;
            if l.map.is_some() && l.map_file.is_some() {
                bail!("layer: give either map or map_file, not both");
            }
            if let Some(eps) = l.eps {
                positive("layer.eps", eps)?;
            }
        }
        for (k, l) in self.layers.iter().enumerate() {
            positive(&format!("layers[{k}].youngs"), l.youngs)?;
            positive(&format!("layers[{k}].thickness"), l.thickness)?;
            if l.map.is_some() && l.map_file.is_some() {
                bail!("layers[{k}]: give either map or map_file, not both");
            }
            if l.variation.is_some() && l.variation_file.is_some() {
                bail!("layers[{k}]: give either variation or variation_file, not both");
            }
        }
        finite("domain.kappa", self.domain.kappa)?;
        Ok(())
    }

    pub fn grid(&self, override_cells: Option<usize>) -> Result<DiskGrid> {
        let cells = override_cells.unwrap_or(self.solver.grid);
        if !cells.is_power_of_two() || cells < GRID_RANGE.0 || cells > GRID_RANGE.1 {
            bail!(
                "grid = {cells}: must be a power of two between {} and {}",
                GRID_RANGE.0,
                GRID_RANGE.1
            );
        }
        Ok(DiskGrid::new(cells)?)
    }

    pub fn gap(&self) -> Result<ParaboloidGap> {
        let g = self.geometry.context("missing [geometry] section")?;
        Ok(ParaboloidGap::new(g.r1, g.r2, g.delta0)?)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Thickness map from an expression or a CSV lattice.
    pub fn load_map(&self, expr: Option<&str>, file: Option<&Path>) -> Result<Option<FieldRef>> {
        match (expr, file) {
            (Some(e), _) => Ok(Some(Arc::new(ExprField::parse(e)?))),
            (None, Some(f)) => Ok(Some(Arc::new(LatticeMap::read_csv(self.resolve(f), "H")?))),
            (None, None) => Ok(None),
        }
    }

    /// Thickness variation sampled on the solver lattice over `domain`.
    /// CSV variations must already live on that lattice.
    pub fn load_variation(
        &self,
        layer: &LayerConfig,
        domain: EllipseDomain,
        grid: DiskGrid,
    ) -> Result<Option<ScalarField>> {
        if let Some(e) = &layer.variation {
            let f = ExprField::parse(e)?;
            return Ok(Some(ScalarField::sample_field(domain, grid, &f)));
        }
        if let Some(path) = &layer.variation_file {
            let map = LatticeMap::read_csv(self.resolve(path), "H")?;
            return Ok(Some(map.to_scalar_field(domain, grid)?));
        }
        Ok(None)
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x <= 0.0 || !x.is_finite() {
        bail!("{name} = {x}: must be positive");
    }
    Ok(())
}

fn finite(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        bail!("{name} = {x}: must be finite");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_optional_sections() {
        let c = RunConfig::parse("[geometry]\nr1 = 1.0\nr2 = 2.0\ndelta0 = 0.1\n").unwrap();
        assert_eq!(c.solver.grid, DEFAULT_GRID);
        assert_eq!(c.domain.kappa, 1.0);
        assert!(!c.output.orthogonalized);
        assert!(c.layers.is_empty());
    }

    #[test]
    fn unknown_field_is_named() {
        let err = RunConfig::parse("[geometry]\nr1 = 1.0\nr2 = 2.0\ndelta = 0.1\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("delta"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn grid_must_be_power_of_two_in_range() {
        for bad in [48, 16, 2048] {
            let err = RunConfig::parse(&format!("[solver]\ngrid = {bad}\n")).unwrap_err();
            assert!(err.to_string().contains("power of two"));
        }
        let c = RunConfig::parse("[solver]\ngrid = 64\n").unwrap();
        assert!(c.grid(Some(100)).is_err());
        assert_eq!(c.grid(Some(32)).unwrap().cells(), 32);
    }

    #[test]
    fn physical_values_checked() {
        assert!(RunConfig::parse("[material]\nyoungs = -1.0\npoisson = 0.3\n").is_err());
        assert!(RunConfig::parse("[material]\nyoungs = 1.0\npoisson = 0.6\n").is_err());
        assert!(RunConfig::parse("[material]\nyoungs = 1.0\npoisson = 0.5\n").is_ok());
        let both = "[[layers]]\nyoungs = 1.0\nthickness = 1.0\nmap = \"1\"\nmap_file = \"a.csv\"\n";
        assert!(RunConfig::parse(both).is_err());
    }

    #[test]
    fn relative_paths_follow_the_config() {
        let c = RunConfig {
            base_dir: PathBuf::from("/data/run"),
            ..RunConfig::default()
        };
        assert_eq!(c.resolve(Path::new("h.csv")), PathBuf::from("/data/run/h.csv"));
        assert_eq!(c.resolve(Path::new("/abs/h.csv")), PathBuf::from("/abs/h.csv"));
    }
}

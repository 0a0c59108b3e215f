use crate::error::{Error, Result};

/// Isotropic elastic constants in engineering and Lamé form.
///
/// Compressible materials carry finite `(λ, μ)`. The incompressible limit
/// `ν = 0.5` is representable but has `λ = ∞`; operations that need a finite
/// `λ` reject it with [`Error::IncompressibleSingularity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs: f64,
    pub poisson: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Material {
    /// Compressible material, `−1 < ν < 0.5`.
    pub fn compressible(youngs: f64, poisson: f64) -> Result<Self> {
        let (lambda, mu) = lame_from_engineering(youngs, poisson)?;
        Ok(Self {
            youngs,
            poisson,
            lambda,
            mu,
        })
    }

    /// Incompressible material (`ν = 0.5`).
    pub fn incompressible(youngs: f64) -> Result<Self> {
        check_youngs(youngs)?;
        Ok(Self {
            youngs,
            poisson: 0.5,
            lambda: f64::INFINITY,
            mu: youngs / 3.0,
        })
    }

    /// Builds either representation depending on `ν`.
    pub fn new(youngs: f64, poisson: f64) -> Result<Self> {
        if poisson == 0.5 {
            Self::incompressible(youngs)
        } else {
            Self::compressible(youngs, poisson)
        }
    }

    pub fn from_lame(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !(lambda + mu > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "Lamé pair (lambda = {lambda}, mu = {mu}) is not admissible"
            )));
        }
        let (youngs, poisson) = engineering_from_lame(lambda, mu);
        Ok(Self {
            youngs,
            poisson,
            lambda,
            mu,
        })
    }

    pub fn is_incompressible(&self) -> bool {
        self.poisson == 0.5
    }

    /// P-wave modulus `2μ + λ`, the Winkler numerator.
    pub fn p_wave_modulus(&self) -> Result<f64> {
        if self.is_incompressible() {
            return Err(Error::IncompressibleSingularity(
                "2 mu + lambda is unbounded, the Winkler modulus diverges",
            ));
        }
        Ok(2.0 * self.mu + self.lambda)
    }

    pub(crate) fn require_compressible(&self) -> Result<(f64, f64)> {
        if self.is_incompressible() {
            return Err(Error::IncompressibleSingularity(
                "this operation needs a finite lambda",
            ));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Domain(format!("shear modulus must be positive, got {}", self.mu)));
        }
        Ok((self.lambda, self.mu))
    }
}

fn check_youngs(youngs: f64) -> Result<()> {
    if !(youngs > 0.0) || !youngs.is_finite() {
        return Err(Error::Domain(format!("Young's modulus must be positive, got {youngs}")));
    }
    Ok(())
}

/// Converts `(E, ν)` to the Lamé pair `(λ, μ)`.
pub fn lame_from_engineering(youngs: f64, poisson: f64) -> Result<(f64, f64)> {
    check_youngs(youngs)?;
    if poisson == 0.5 {
        return Err(Error::IncompressibleSingularity("lambda is undefined at nu = 0.5"));
    }
    if !(poisson > -1.0 && poisson < 0.5) {
        return Err(Error::Domain(format!(
            "Poisson's ratio must lie in (-1, 0.5), got {poisson}"
        )));
    }
    let lambda = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let mu = youngs / (2.0 * (1.0 + poisson));
    Ok((lambda, mu))
}

/// Inverse of [`lame_from_engineering`].
pub fn engineering_from_lame(lambda: f64, mu: f64) -> (f64, f64) {
    let youngs = mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
    let poisson = lambda / (2.0 * (lambda + mu));
    (youngs, poisson)
}

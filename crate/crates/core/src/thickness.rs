//! Thickness scaling `H(y) = h + H̃(y) = ε h* (1 + ε ψ*(y))`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Affine, Constant, FieldRef, SmoothField};
use crate::geometry::{EllipseDomain, Point};

/// Variable layer thickness split into its mean part and small variation.
#[derive(Clone)]
pub struct LayerThickness {
    /// Mean thickness `h = ε h*`.
    pub h: f64,
    /// Unscaled thickness scale `h*`.
    pub h_star: f64,
    /// Small parameter `ε`.
    pub eps: f64,
    thickness: FieldRef,
}

impl std::fmt::Debug for LayerThickness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LayerThickness")
            .field("h", &self.h)
            .field("h_star", &self.h_star)
            .field("eps", &self.eps)
            .finish_non_exhaustive()
    }
}

impl LayerThickness {
    /// Constant thickness `h`; `ε = 1` so that `h* = h` and `ψ* ≡ 0`.
    pub fn uniform(h: f64) -> Result<Self> {
        check_positive_mean(h)?;
        Ok(Self {
            h,
            h_star: h,
            eps: 1.0,
            thickness: Arc::new(Constant(h)),
        })
    }

    /// Builds the layer from starred data: `H = ε h* (1 + ε ψ*)`.
    pub fn from_scaled(h_star: f64, eps: f64, psi_star: FieldRef) -> Result<Self> {
        check_positive_mean(h_star)?;
        check_eps(eps)?;
        let h = eps * h_star;
        let thickness = Arc::new(Affine::new(psi_star, eps * h, h));
        Ok(Self {
            h,
            h_star,
            eps,
            thickness,
        })
    }

    /// `H(y)`.
    pub fn thickness(&self, y: Point) -> f64 {
        self.thickness.value(y)
    }

    /// `H̃(y) = H(y) − h`.
    pub fn variation(&self, y: Point) -> f64 {
        self.thickness.value(y) - self.h
    }

    /// `ψ*(y) = H̃(y) / (ε² h*)`.
    pub fn psi_star(&self, y: Point) -> f64 {
        self.variation(y) / (self.eps * self.eps * self.h_star)
    }

    pub fn thickness_field(&self) -> FieldRef {
        self.thickness.clone()
    }

    /// `H̃` as a field.
    pub fn variation_field(&self) -> FieldRef {
        Arc::new(Affine::shifted(self.thickness.clone(), self.h))
    }

    /// `H̃* = h* ψ* = H̃ / ε²` as a field.
    pub fn scaled_variation_field(&self) -> FieldRef {
        let k = 1.0 / (self.eps * self.eps);
        Arc::new(Affine::new(self.thickness.clone(), k, -k * self.h))
    }

    /// `ψ*` as a field.
    pub fn psi_field(&self) -> FieldRef {
        let k = 1.0 / (self.eps * self.eps * self.h_star);
        Arc::new(Affine::new(self.thickness.clone(), k, -k * self.h))
    }

    /// `h (1 + ε ψ*(y))`, which must agree with [`thickness`](Self::thickness).
    pub fn reconstruct(&self, y: Point) -> f64 {
        self.h * (1.0 + self.eps * self.psi_star(y))
    }
}

fn check_positive_mean(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("mean thickness must be positive, got {h}")));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Polar sampling of the closed ellipse, boundary ring included.
fn polar_samples(domain: &EllipseDomain) -> impl Iterator<Item = Point> + '_ {
    const N: usize = 128;
    (0..N).flat_map(move |a| {
        let phi = 2.0 * std::f64::consts::PI * a as f64 / N as f64;
        (0..=N / 2).map(move |r| {
            let r = r as f64 / (N / 2) as f64;
            [domain.a1 * r * phi.cos(), domain.a2 * r * phi.sin()]
        })
    })
}

pub(crate) fn check_positive_on(map: &dyn SmoothField, domain: &EllipseDomain) -> Result<()> {
    let mut worst: Option<(Point, f64)> = None;
    let mut visit = |y: Point| {
        let v = map.value(y);
        if !(v > 0.0) && worst.is_none_or(|(_, w)| v < w || w.is_nan()) {
            worst = Some((y, v));
        }
    };
    polar_samples(domain).for_each(&mut visit);
    match worst {
        Some((y, v)) => Err(Error::Domain(format!(
            "layer thickness must be positive, H({:.6}, {:.6}) = {v}",
            y[0], y[1]
        ))),
        None => Ok(()),
    }
}

/// Splits a thickness map into `h`, `h* = h/ε` and `ψ* = (H − h)/(ε² h*)`.
///
/// Positivity of `H` is checked on a polar sampling of `domain`.
pub fn thickness_decompose(
    map: FieldRef,
    h: f64,
    eps: f64,
    domain: &EllipseDomain,
) -> Result<LayerThickness> {
    check_positive_mean(h)?;
    check_eps(eps)?;
    check_positive_on(map.as_ref(), domain)?;
    Ok(LayerThickness {
        h,
        h_star: h / eps,
        eps,
        thickness: map,
    })
}

/// Default small parameter for a physical map: `ε = max |H − h| / h` over the
/// domain. A map without variation gets `ε = 1`.
pub fn select_eps(map: &dyn SmoothField, h: f64, domain: &EllipseDomain) -> Result<f64> {
    check_positive_mean(h)?;
    let max_dev = polar_samples(domain).fold(0.0f64, |m, y| m.max((map.value(y) - h).abs()));
    Ok(if max_dev > 0.0 { max_dev / h } else { 1.0 })
}

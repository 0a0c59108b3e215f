use crate::error::{domain, Error, Result};

/// A point `(y1, y2)` of the contact plane.
pub type Point = [f64; 2];

/// Elliptic paraboloid gap `φ(y) = y1²/(2 R1) + y2²/(2 R2)` together with the
/// indentation approach `δ0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaboloidGap {
    pub r1: f64,
    pub r2: f64,
    pub delta0: f64,
}

impl ParaboloidGap {
    pub fn new(r1: f64, r2: f64, delta0: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
            return domain(format!("curvature radii must be positive, got R1 = {r1}, R2 = {r2}"));
        }
        if !delta0.is_finite() {
            return domain("delta0 must be finite");
        }
        Ok(Self { r1, r2, delta0 })
    }

    /// `φ(y)`.
    pub fn eval(&self, y: Point) -> f64 {
        gap_eval(self, y)
    }

    /// `δ0 − φ(y)`, the required surface displacement.
    pub fn indentation(&self, y: Point) -> f64 {
        self.delta0 - self.eval(y)
    }

    /// Scales the gap to starred variables: `δ0* = δ0/ε`, `Rα* = ε Rα`.
    pub fn starred(&self, eps: f64) -> Self {
        Self {
            r1: eps * self.r1,
            r2: eps * self.r2,
            delta0: self.delta0 / eps,
        }
    }
}

/// Evaluates the paraboloid gap function.
pub fn gap_eval(gap: &ParaboloidGap, y: Point) -> f64 {
    y[0] * y[0] / (2.0 * gap.r1) + y[1] * y[1] / (2.0 * gap.r2)
}

/// Elliptical domain `y1²/a1² + y2²/a2² ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseDomain {
    pub a1: f64,
    pub a2: f64,
}

impl EllipseDomain {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) || !a1.is_finite() || !a2.is_finite() {
            return Err(Error::Domain(format!(
                "ellipse semi-axes must be positive, got a1 = {a1}, a2 = {a2}"
            )));
        }
        Ok(Self { a1, a2 })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(radius, radius)
    }

    /// Aspect ratio `s = a2 / a1`.
    pub fn aspect(&self) -> f64 {
        self.a2 / self.a1
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.a1 * self.a2
    }

    /// Mapped squared radius `y1²/a1² + y2²/a2²`.
    pub fn radius_sq(&self, y: Point) -> f64 {
        let (x1, x2) = (y[0] / self.a1, y[1] / self.a2);
        x1 * x1 + x2 * x2
    }

    pub fn contains(&self, y: Point) -> bool {
        self.radius_sq(y) <= 1.0
    }

    /// `θ(y) = 1 − y1²/a1² − y2²/a2²`.
    pub fn theta(&self, y: Point) -> f64 {
        1.0 - self.radius_sq(y)
    }

    /// Physical point for mapped coordinates `ξ`.
    pub fn to_physical(&self, xi: Point) -> Point {
        [self.a1 * xi[0], self.a2 * xi[1]]
    }

    /// Homothetic copy `κ ω`.
    pub fn scaled(&self, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return domain(format!("shrink factor kappa must lie in (0, 1], got {kappa}"));
        }
        Self::new(kappa * self.a1, kappa * self.a2)
    }

    /// Longest semi-axis, used as the length scale for finite differences.
    pub fn scale(&self) -> f64 {
        self.a1.max(self.a2)
    }
}

//! Closed-form scalar fields on the contact plane.
//!
//! Everything the solvers consume pointwise implements [`SmoothField`]. Exact
//! bivariate polynomials ([`Polynomial2`]) provide analytic derivatives; other
//! fields fall back to central differences with a step proportional to their
//! length scale.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::geometry::Point;

/// Relative step for first derivatives.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Relative step for second derivatives.
pub const LAPLACIAN_STEP: f64 = 1e-4;

pub trait SmoothField: Send + Sync {
    fn value(&self, y: Point) -> f64;

    /// Length scale of the field; finite-difference steps are proportional to it.
    fn length_scale(&self) -> f64 {
        1.0
    }

    fn gradient(&self, y: Point) -> [f64; 2] {
        let h = GRADIENT_STEP * self.length_scale();
        [
            (self.value([y[0] + h, y[1]]) - self.value([y[0] - h, y[1]])) / (2.0 * h),
            (self.value([y[0], y[1] + h]) - self.value([y[0], y[1] - h])) / (2.0 * h),
        ]
    }

    fn laplacian(&self, y: Point) -> f64 {
        let h = LAPLACIAN_STEP * self.length_scale();
        let c = self.value(y);
        (self.value([y[0] + h, y[1]]) + self.value([y[0] - h, y[1]]) + self.value([y[0], y[1] + h])
            + self.value([y[0], y[1] - h])
            - 4.0 * c)
            / (h * h)
    }

    /// Exact polynomial representation, when one exists.
    fn as_polynomial(&self) -> Option<&Polynomial2> {
        None
    }
}

/// Shared, type-erased field.
pub type FieldRef = Arc<dyn SmoothField>;

impl<T: SmoothField + ?Sized> SmoothField for Arc<T> {
    fn value(&self, y: Point) -> f64 {
        (**self).value(y)
    }
    fn length_scale(&self) -> f64 {
        (**self).length_scale()
    }
    fn gradient(&self, y: Point) -> [f64; 2] {
        (**self).gradient(y)
    }
    fn laplacian(&self, y: Point) -> f64 {
        (**self).laplacian(y)
    }
    fn as_polynomial(&self) -> Option<&Polynomial2> {
        (**self).as_polynomial()
    }
}

impl<T: SmoothField + ?Sized> SmoothField for &T {
    fn value(&self, y: Point) -> f64 {
        (**self).value(y)
    }
    fn length_scale(&self) -> f64 {
        (**self).length_scale()
    }
    fn gradient(&self, y: Point) -> [f64; 2] {
        (**self).gradient(y)
    }
    fn laplacian(&self, y: Point) -> f64 {
        (**self).laplacian(y)
    }
    fn as_polynomial(&self) -> Option<&Polynomial2> {
        (**self).as_polynomial()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl SmoothField for Constant {
    fn value(&self, _: Point) -> f64 {
        self.0
    }
    fn gradient(&self, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn laplacian(&self, _: Point) -> f64 {
        0.0
    }
}

/// Closure-backed field with optional analytic derivatives.
pub struct FnField<F> {
    f: F,
    scale: f64,
    gradient: Option<Box<dyn Fn(Point) -> [f64; 2] + Send + Sync>>,
    laplacian: Option<Box<dyn Fn(Point) -> f64 + Send + Sync>>,
}

impl<F: Fn(Point) -> f64 + Send + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            scale: 1.0,
            gradient: None,
            laplacian: None,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_gradient(mut self, g: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    pub fn with_laplacian(mut self, l: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.laplacian = Some(Box::new(l));
        self
    }
}

impl<F: Fn(Point) -> f64 + Send + Sync> SmoothField for FnField<F> {
    fn value(&self, y: Point) -> f64 {
        (self.f)(y)
    }
    fn length_scale(&self) -> f64 {
        self.scale
    }
    fn gradient(&self, y: Point) -> [f64; 2] {
        match &self.gradient {
            Some(g) => g(y),
            None => {
                let h = GRADIENT_STEP * self.scale;
                [
                    ((self.f)([y[0] + h, y[1]]) - (self.f)([y[0] - h, y[1]])) / (2.0 * h),
                    ((self.f)([y[0], y[1] + h]) - (self.f)([y[0], y[1] - h])) / (2.0 * h),
                ]
            }
        }
    }
    fn laplacian(&self, y: Point) -> f64 {
        match &self.laplacian {
            Some(l) => l(y),
            None => {
                let h = LAPLACIAN_STEP * self.scale;
                let f = &self.f;
                (f([y[0] + h, y[1]]) + f([y[0] - h, y[1]]) + f([y[0], y[1] + h]) + f([y[0], y[1] - h])
                    - 4.0 * f(y))
                    / (h * h)
            }
        }
    }
}

/// `scale · base(y) + offset`.
pub struct Affine {
    base: FieldRef,
    scale: f64,
    offset: f64,
    poly: Option<Polynomial2>,
}

impl Affine {
    pub fn new(base: FieldRef, scale: f64, offset: f64) -> Self {
        let poly = base
            .as_polynomial()
            .map(|p| &p.scale(scale) + &Polynomial2::constant(offset));
        Self {
            base,
            scale,
            offset,
            poly,
        }
    }

    /// `base(y) − shift`; the variation left after removing a reference value.
    pub fn shifted(base: FieldRef, shift: f64) -> Self {
        Self::new(base, 1.0, -shift)
    }
}

impl SmoothField for Affine {
    fn value(&self, y: Point) -> f64 {
        self.scale * self.base.value(y) + self.offset
    }
    fn length_scale(&self) -> f64 {
        self.base.length_scale()
    }
    fn gradient(&self, y: Point) -> [f64; 2] {
        let g = self.base.gradient(y);
        [self.scale * g[0], self.scale * g[1]]
    }
    fn laplacian(&self, y: Point) -> f64 {
        self.scale * self.base.laplacian(y)
    }
    fn as_polynomial(&self) -> Option<&Polynomial2> {
        self.poly.as_ref()
    }
}

/// Dense bivariate polynomial `Σ c_ij y1^i y2^j` with `i, j ≤ degree`.
#[derive(Clone, PartialEq)]
pub struct Polynomial2 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Polynomial2 {
    pub fn zero() -> Self {
        Self {
            degree: 0,
            coeffs: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn y1() -> Self {
        Self::from_terms(&[(1, 0, 1.0)])
    }

    pub fn y2() -> Self {
        Self::from_terms(&[(0, 1, 1.0)])
    }

    /// Builds a polynomial from `(i, j, c)` monomials `c y1^i y2^j`.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let degree = terms.iter().map(|&(i, j, _)| i.max(j)).max().unwrap_or(0);
        let mut p = Self {
            degree,
            coeffs: vec![0.0; (degree + 1) * (degree + 1)],
        };
        for &(i, j, c) in terms {
            let k = p.idx(i, j);
            p.coeffs[k] += c;
        }
        p
    }

    /// The gap polynomial `δ0 − y1²/(2R1) − y2²/(2R2)`.
    pub fn indentation(r1: f64, r2: f64, delta0: f64) -> Self {
        Self::from_terms(&[(0, 0, delta0), (2, 0, -0.5 / r1), (0, 2, -0.5 / r2)])
    }

    /// `θ(y) = 1 − y1²/a1² − y2²/a2²`.
    pub fn theta(a1: f64, a2: f64) -> Self {
        Self::from_terms(&[(0, 0, 1.0), (2, 0, -1.0 / (a1 * a1)), (0, 2, -1.0 / (a2 * a2))])
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.degree + 1) + j
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i > self.degree || j > self.degree {
            0.0
        } else {
            self.coeffs[self.idx(i, j)]
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn resized(&self, degree: usize) -> Self {
        let mut out = Self {
            degree,
            coeffs: vec![0.0; (degree + 1) * (degree + 1)],
        };
        for i in 0..=self.degree.min(degree) {
            for j in 0..=self.degree.min(degree) {
                let k = out.idx(i, j);
                out.coeffs[k] = self.coeff(i, j);
            }
        }
        out
    }

    pub fn eval(&self, y: Point) -> f64 {
        let n = self.degree + 1;
        let mut acc = 0.0;
        for i in (0..n).rev() {
            let mut row = 0.0;
            for j in (0..n).rev() {
                row = row * y[1] + self.coeffs[i * n + j];
            }
            acc = acc * y[0] + row;
        }
        acc
    }

    /// Partial derivative along axis 0 (`y1`) or 1 (`y2`).
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Self {
            degree: self.degree,
            coeffs: vec![0.0; self.coeffs.len()],
        };
        for i in 0..=self.degree {
            for j in 0..=self.degree {
                let c = self.coeff(i, j);
                match axis {
                    0 if i > 0 => {
                        let k = out.idx(i - 1, j);
                        out.coeffs[k] += i as f64 * c;
                    }
                    1 if j > 0 => {
                        let k = out.idx(i, j - 1);
                        out.coeffs[k] += j as f64 * c;
                    }
                    _ => {}
                }
            }
        }
        out
    }

    pub fn laplacian_poly(&self) -> Self {
        &self.derivative(0).derivative(0) + &self.derivative(1).derivative(1)
    }

    /// `∇·(self ∇other)`.
    pub fn div_weighted_grad(&self, other: &Self) -> Self {
        &(self * &other.derivative(0)).derivative(0) + &(self * &other.derivative(1)).derivative(1)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl fmt::Debug for Polynomial2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..=self.degree {
            for j in 0..=self.degree {
                let c = self.coeff(i, j);
                if c != 0.0 {
                    if !first {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}·y1^{i}·y2^{j}")?;
                    first = false;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Polynomial2 {
    type Output = Polynomial2;
    fn add(self, rhs: &Polynomial2) -> Polynomial2 {
        let d = self.degree.max(rhs.degree);
        let mut out = self.resized(d);
        let r = rhs.resized(d);
        for (a, b) in out.coeffs.iter_mut().zip(&r.coeffs) {
            *a += b;
        }
        out
    }
}

impl Sub for &Polynomial2 {
    type Output = Polynomial2;
    fn sub(self, rhs: &Polynomial2) -> Polynomial2 {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial2 {
    type Output = Polynomial2;
    fn neg(self) -> Polynomial2 {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial2 {
    type Output = Polynomial2;
    fn mul(self, rhs: &Polynomial2) -> Polynomial2 {
        let d = self.degree + rhs.degree;
        let mut out = Polynomial2 {
            degree: d,
            coeffs: vec![0.0; (d + 1) * (d + 1)],
        };
        for i in 0..=self.degree {
            for j in 0..=self.degree {
                let a = self.coeff(i, j);
                if a == 0.0 {
                    continue;
                }
                for k in 0..=rhs.degree {
                    for l in 0..=rhs.degree {
                        let b = rhs.coeff(k, l);
                        if b != 0.0 {
                            let m = out.idx(i + k, j + l);
                            out.coeffs[m] += a * b;
                        }
                    }
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Polynomial2 {
            type Output = Polynomial2;
            fn $m(self, rhs: Polynomial2) -> Polynomial2 {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl SmoothField for Polynomial2 {
    fn value(&self, y: Point) -> f64 {
        self.eval(y)
    }
    fn gradient(&self, y: Point) -> [f64; 2] {
        [self.derivative(0).eval(y), self.derivative(1).eval(y)]
    }
    fn laplacian(&self, y: Point) -> f64 {
        self.laplacian_poly().eval(y)
    }
    fn as_polynomial(&self) -> Option<&Polynomial2> {
        Some(self)
    }
}

/// `Δ(a b)` at `y`: exact for two polynomials, a five-point difference of
/// the product otherwise.
pub fn product_laplacian(a: &dyn SmoothField, b: &dyn SmoothField, y: Point) -> f64 {
    if let (Some(pa), Some(pb)) = (a.as_polynomial(), b.as_polynomial()) {
        return (pa * pb).laplacian_poly().eval(y);
    }
    let h = LAPLACIAN_STEP * a.length_scale().max(b.length_scale());
    let f = |q: Point| a.value(q) * b.value(q);
    (f([y[0] + h, y[1]]) + f([y[0] - h, y[1]]) + f([y[0], y[1] + h]) + f([y[0], y[1] - h]) - 4.0 * f(y))
        / (h * h)
}

/// `∇·(w ∇f)` at `y`: exact for two polynomials, a centered flux difference
/// otherwise.
pub fn weighted_divergence(w: &dyn SmoothField, f: &dyn SmoothField, y: Point) -> f64 {
    if let (Some(pw), Some(pf)) = (w.as_polynomial(), f.as_polynomial()) {
        return pw.div_weighted_grad(pf).eval(y);
    }
    let h = LAPLACIAN_STEP * w.length_scale().max(f.length_scale());
    let s = 0.5 * h;
    let flux = |q: Point, axis: usize| w.value(q) * f.gradient(q)[axis];
    (flux([y[0] + s, y[1]], 0) - flux([y[0] - s, y[1]], 0) + flux([y[0], y[1] + s], 1)
        - flux([y[0], y[1] - s], 1))
        / h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_algebra() {
        // (1 + y1)(1 - y1) = 1 - y1²
        let a = &Polynomial2::constant(1.0) + &Polynomial2::y1();
        let b = &Polynomial2::constant(1.0) - &Polynomial2::y1();
        let p = &a * &b;
        assert_eq!(p.coeff(0, 0), 1.0);
        assert_eq!(p.coeff(2, 0), -1.0);
        assert_eq!(p.coeff(1, 0), 0.0);
        assert_eq!(p.laplacian([0.3, 0.2]), -2.0);
    }

    #[test]
    fn theta_laplacian_is_constant() {
        let th = Polynomial2::theta(2.0, 0.5);
        let expected = -2.0 * (1.0 / 4.0 + 1.0 / 0.25);
        for y in [[0.0, 0.0], [1.0, 0.2], [-0.3, 0.4]] {
            assert_relative_eq!(th.laplacian(y), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn fd_fallback_matches_analytic() {
        let p = Polynomial2::from_terms(&[(3, 1, 0.7), (0, 2, -1.2), (1, 0, 0.4)]);
        let q = p.clone();
        let f = FnField::new(move |y| q.eval(y));
        for y in [[0.2, -0.1], [0.5, 0.7]] {
            let (ga, gf) = (p.gradient(y), f.gradient(y));
            assert_relative_eq!(ga[0], gf[0], epsilon = 1e-8);
            assert_relative_eq!(ga[1], gf[1], epsilon = 1e-8);
            assert_relative_eq!(p.laplacian(y), f.laplacian(y), epsilon = 1e-6);
        }
    }

    #[test]
    fn div_weighted_grad_product_rule() {
        let w = Polynomial2::from_terms(&[(0, 0, 1.0), (1, 1, 0.5), (2, 0, 0.3)]);
        let f = Polynomial2::from_terms(&[(2, 2, 1.0), (3, 0, -0.4)]);
        let div = w.div_weighted_grad(&f);
        for y in [[0.1, 0.9], [-0.7, 0.3]] {
            let gw = w.gradient(y);
            let gf = f.gradient(y);
            let expected = gw[0] * gf[0] + gw[1] * gf[1] + w.eval(y) * f.laplacian(y);
            assert_relative_eq!(div.eval(y), expected, max_relative = 1e-13);
        }
    }
}

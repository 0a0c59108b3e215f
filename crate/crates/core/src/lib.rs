//! Asymptotic contact models for thin elastic layers of variable thickness.
//!
//! The crate covers two regimes of a thin layer bonded to a rigid substrate:
//!
//! * compressible layers, which behave like a Winkler foundation with a
//!   thickness-dependent modulus, together with the four-term perturbation
//!   series for the pressure and the through-thickness displacement profiles;
//! * incompressible bilayers, whose pressure obeys a Laplacian relation and
//!   admits the exact elliptical solution `p0 (1 - y1²/a1² - y2²/a2²)²`.
//!
//! On top of the incompressible model sit the linearised thickness
//! sensitivity (a Dirichlet Poisson problem for the pressure variation) and
//! the weighted effective-thickness optimiser.
//!
//! Fields live on an elliptical domain mapped onto the unit disk
//! (`ξα = yα / aα`) and are sampled on a uniform lattice, see [`grid`].

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compressible;
pub mod effective;
pub mod error;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod incompressible;
pub mod maps;
pub mod material;
pub mod poisson;
pub mod quadrature;
pub mod sensitivity;
pub mod thickness;
pub mod validation;

pub use error::{Error, Result};
pub use field::{Affine, Constant, FieldRef, FnField, Polynomial2, SmoothField};
pub use geometry::{EllipseDomain, ParaboloidGap, Point};
pub use grid::{DiskGrid, GradientField, ScalarField};
pub use material::{lame_from_engineering, Material};
pub use quadrature::{integrate_ellipse, PolarRule};
pub use thickness::{thickness_decompose, LayerThickness};

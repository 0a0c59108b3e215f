//! Compressible layer (`ν < 0.5`): Winkler foundation with a variable
//! modulus, the perturbation series for the contact pressure and the
//! through-thickness displacement profiles.

mod perturbation;
mod profiles;
mod winkler;

pub use perturbation::{
    perturbation_coefficients, perturbation_pressure, residual_check, PerturbationSeries,
    ResidualReport, SigmaTerms, RESIDUAL_INSET,
};
pub use profiles::{
    displacement_profiles, surface_displacement_expansion, DisplacementProfile, SurfaceExpansion,
};
pub use winkler::{
    solve_winkler, winkler_contact_region, winkler_force, winkler_force_with, winkler_modulus,
    winkler_pressure, WinklerSolution,
};

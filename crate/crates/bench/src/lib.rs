//! Fixtures shared by the benchmarks.

use thinlayer_core::effective::{effective_thickness, AveragingWeight};
use thinlayer_core::sensitivity::SensitivityProblem;
use thinlayer_core::validation::SampleCase;
use thinlayer_core::{EllipseDomain, LayerThickness, Material, ParaboloidGap, ScalarField};

pub const LATTICES: [usize; 3] = [64, 128, 256];

pub fn unit_source(cells: usize) -> (EllipseDomain, ScalarField) {
    let domain = EllipseDomain::new(1.4, 0.8).expect("valid ellipse");
    let grid = thinlayer_core::DiskGrid::new(cells).expect("valid lattice");
    (domain, ScalarField::sample(domain, grid, |_| 1.0))
}

/// Sensitivity problem of the shipped sample with `ρ*`-orthogonal variations.
pub fn orthogonal_sample() -> SensitivityProblem {
    let sample = SampleCase::shipped().expect("shipped sample parses");
    let domain = sample.contact_domain().expect("sample is in contact");
    let h: Vec<f64> = sample
        .maps
        .iter()
        .map(|m| {
            effective_thickness(m.as_ref(), &domain, AveragingWeight::RhoStar)
                .expect("positive map")
                .h_eff
        })
        .collect();
    sample.sensitivity_problem(&h).expect("valid sample")
}

pub fn winkler_case() -> (Material, LayerThickness, ParaboloidGap) {
    (
        Material::compressible(2.0, 0.3).expect("valid material"),
        LayerThickness::uniform(0.2).expect("positive thickness"),
        ParaboloidGap::new(1.5, 0.9, 0.1).expect("valid gap"),
    )
}

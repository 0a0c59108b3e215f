//! Lattice maps read from disk drive the effective-thickness and
//! sensitivity steps the same way closed-form maps do.

use std::io::Write;
use std::sync::Arc;

use thinlayer_core::effective::{effective_thickness, AveragingWeight};
use thinlayer_core::maps::{write_field_csv, ExprField, LatticeMap};
use thinlayer_core::validation::{force_ratio, SampleCase, SAMPLE_MAPS};
use thinlayer_core::*;

fn write_lattice(path: &std::path::Path, map: &dyn SmoothField, n: usize, half: f64) {
    let mut f = std::fs::File::create(path).unwrap();
    writeln!(f, "y1,y2,H").unwrap();
    for j in 0..=n {
        for i in 0..=n {
            let y = [-half + 2.0 * half * i as f64 / n as f64, -half + 2.0 * half * j as f64 / n as f64];
            writeln!(f, "{},{},{}", y[0], y[1], map.value(y)).unwrap();
        }
    }
}

#[test]
fn lattice_map_reproduces_expression_results() {
    let dir = tempfile::tempdir().unwrap();
    let expr = ExprField::parse(SAMPLE_MAPS[0]).unwrap();
    let path = dir.path().join("h1.csv");
    write_lattice(&path, &expr, 160, 8.0);
    let lattice = LatticeMap::read_csv(&path, "H").unwrap();

    let sample = SampleCase::shipped().unwrap();
    let domain = sample.contact_domain().unwrap();
    let a = effective_thickness(&expr, &domain, AveragingWeight::RhoStar).unwrap().h_eff;
    let b = effective_thickness(&lattice, &domain, AveragingWeight::RhoStar).unwrap().h_eff;
    assert!((a - b).abs() < 1e-5 * a, "{a} vs {b}");

    let maps: Vec<FieldRef> = vec![Arc::new(lattice), sample.maps[1].clone()];
    let from_disk = SampleCase::new(maps, sample.base_thickness.clone(), sample.youngs.clone(), sample.gap).unwrap();
    let h2 = effective_thickness(sample.maps[1].as_ref(), &domain, AveragingWeight::RhoStar).unwrap().h_eff;
    let ratio = force_ratio(&from_disk.sensitivity_problem(&[b, h2]).unwrap(), DiskGrid::new(128).unwrap()).unwrap();
    assert!(ratio < 1e-3, "ratio {ratio}");
}

#[test]
fn field_dump_round_trips_onto_the_solver_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let domain = EllipseDomain::new(2.0, 1.5).unwrap();
    let grid = DiskGrid::new(32).unwrap();
    let field = ScalarField::sample(domain, grid, |y| 1.0 + 0.1 * y[0] - 0.05 * y[1] * y[1]);
    let path = dir.path().join("f.csv");
    write_field_csv(&path, &field, "H").unwrap();
    let back = LatticeMap::read_csv(&path, "H").unwrap().to_scalar_field(domain, grid).unwrap();
    for (a, b) in field.values().iter().zip(back.values()) {
        assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0));
    }
    let other = DiskGrid::new(64).unwrap();
    let err = LatticeMap::read_csv(&path, "H").unwrap().to_scalar_field(domain, other).unwrap_err();
    assert!(matches!(err, Error::Shape(_)));
}

#[test]
fn missing_and_corrupt_maps_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let err = LatticeMap::read_csv(dir.path().join("absent.csv"), "H").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "y1,y2,H\n0,0,1\n1,0,abc\n").unwrap();
    let err = LatticeMap::read_csv(&bad, "H").unwrap_err();
    assert!(matches!(err, Error::Ingest { .. } | Error::Shape(_)), "{err}");
}

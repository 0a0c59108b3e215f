//! Orthogonalised thickness variations leave the contact force unchanged.

use std::sync::Arc;

use proptest::prelude::*;
use thinlayer_core::effective::{effective_thickness, AveragingWeight};
use thinlayer_core::validation::{force_ratio, SampleCase};
use thinlayer_core::*;

fn bump_map(base: f64, amp: f64, cx: f64, cy: f64, width: f64, slope: f64) -> FieldRef {
    Arc::new(FnField::new(move |y: Point| {
        let d = (y[0] - cx).powi(2) + (y[1] - cy).powi(2);
        base + amp * (-d / (width * width)).exp() + slope * y[0]
    }))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn orthogonal_variations_keep_force(
        amp in prop::array::uniform2(-0.4f64..0.4),
        cx in prop::array::uniform2(-5.0f64..5.0),
        cy in prop::array::uniform2(-4.0f64..4.0),
        width in prop::array::uniform2(1.5f64..6.0),
        slope in prop::array::uniform2(-0.03f64..0.03),
        youngs in prop::array::uniform2(2.0f64..20.0),
    ) {
        let maps: Vec<FieldRef> = (0..2)
            .map(|k| bump_map([2.0, 1.5][k], amp[k], cx[k], cy[k], width[k], slope[k]))
            .collect();
        let gap = ParaboloidGap::new(40.0, 25.0, 0.3).unwrap();
        let sample = SampleCase::new(maps, vec![2.0, 1.5], youngs.to_vec(), gap).unwrap();
        let domain = sample.contact_domain().unwrap();
        let h_eff: Vec<f64> = sample
            .maps
            .iter()
            .map(|m| effective_thickness(m.as_ref(), &domain, AveragingWeight::RhoStar).unwrap().h_eff)
            .collect();
        let ratio = force_ratio(&sample.sensitivity_problem(&h_eff).unwrap(), DiskGrid::new(256).unwrap()).unwrap();
        prop_assert!(ratio <= 1e-3, "ratio {ratio}");
    }
}

#[test]
fn uniform_weight_mean_is_not_orthogonal() {
    let maps = vec![bump_map(2.0, 0.4, 3.0, 0.0, 2.0, 0.0)];
    let gap = ParaboloidGap::new(40.0, 25.0, 0.3).unwrap();
    let sample = SampleCase::new(maps, vec![2.0], vec![10.0], gap).unwrap();
    let domain = sample.contact_domain().unwrap();
    let grid = DiskGrid::new(128).unwrap();
    let h = |w| effective_thickness(sample.maps[0].as_ref(), &domain, w).unwrap().h_eff;
    let rho = force_ratio(&sample.sensitivity_problem(&[h(AveragingWeight::RhoStar)]).unwrap(), grid).unwrap();
    let uniform = force_ratio(&sample.sensitivity_problem(&[h(AveragingWeight::Uniform)]).unwrap(), grid).unwrap();
    assert!(rho < 1e-3, "rho* ratio {rho}");
    assert!(uniform > 10.0 * rho, "uniform ratio {uniform}, rho* ratio {rho}");
}

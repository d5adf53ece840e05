use lunabeam_core::diffraction::compute_irradiance_map;
use lunabeam_core::receiver::{panel_power_fixed, resolve_numerics};
use lunabeam_core::scenario::{CextSource, Scenario};
use lunabeam_core::{ScenarioF32, ScenarioF64};
use proptest::prelude::*;

fn with_dust(mut s: ScenarioF64, cext: f64) -> ScenarioF64 {
    s.dust.enabled = true;
    s.dust.source = Some(CextSource::Explicit(cext));
    s.resolve_cext().unwrap();
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn dust_never_adds_power(
        distance in 5e3f64..40e3,
        h0 in 2.0f64..12.0,
        cext in 1e-15f64..5e-13,
    ) {
        let mut s = ScenarioF64::baseline();
        s.geometry.distance = distance;
        s.geometry.source_height = h0;
        let clear = panel_power_fixed(&s, 64, 32).unwrap().power;
        let dusty = panel_power_fixed(&with_dust(s, cext), 64, 32).unwrap().power;
        prop_assert!(dusty <= clear * (1.0 + 1e-9), "{dusty} > {clear}");
    }

    #[test]
    fn more_extinction_means_less_power(
        distance in 5e3f64..40e3,
        c1 in 1e-15f64..2e-13,
        factor in 1.1f64..4.0,
    ) {
        let mut s = ScenarioF64::baseline();
        s.geometry.distance = distance;
        let p1 = panel_power_fixed(&with_dust(s.clone(), c1), 64, 32).unwrap().power;
        let p2 = panel_power_fixed(&with_dust(s, c1 * factor), 64, 32).unwrap().power;
        prop_assert!(p2 < p1);
    }

    #[test]
    fn power_scales_linearly_with_laser_power(p0 in 1.0f64..5000.0) {
        let s = ScenarioF64::baseline();
        let mut t = s.clone();
        t.laser.power = p0;
        let a = panel_power_fixed(&s, 64, 32).unwrap();
        let b = panel_power_fixed(&t, 64, 32).unwrap();
        prop_assert!((b.power / a.power / (p0 / 1000.0) - 1.0).abs() < 1e-12);
        prop_assert!((b.efficiency - a.efficiency).abs() < 1e-12);
    }

    #[test]
    fn maps_are_mirror_symmetric_in_x(distance in 5e3f64..50e3, h0 in 2.0f64..12.0) {
        let mut s = with_dust(ScenarioF64::baseline(), 5e-14);
        s.geometry.distance = distance;
        s.geometry.source_height = h0;
        s.numerics.aperture_resolution = Some(48);
        let m = compute_irradiance_map(&s, (0.5, 0.5), 33).unwrap();
        let peak = m.max();
        let n = m.xs.len();
        for iy in 0..m.ys.len() {
            for ix in 0..n {
                prop_assert!((m.value(ix, iy) - m.value(n - 1 - ix, iy)).abs() <= 1e-9 * peak);
            }
        }
    }
}

#[test]
fn larger_panel_collects_more() {
    let mut s = ScenarioF64::baseline();
    s.geometry.distance = 30e3;
    let small = panel_power_fixed(&s, 64, 48).unwrap().power;
    s.geometry.panel_length = 0.8;
    s.geometry.panel_width = 0.8;
    let large = panel_power_fixed(&s, 64, 48).unwrap().power;
    assert!(large > small);
}

#[test]
fn single_precision_tracks_double() {
    let d = ScenarioF64::baseline();
    let f = ScenarioF32::baseline();
    let a = panel_power_fixed(&d, 64, 32).unwrap().efficiency;
    let b = panel_power_fixed(&f, 64, 32).unwrap().efficiency as f64;
    assert!((a - b).abs() < 1e-3, "{a} vs {b}");
}

#[test]
fn numerics_are_settled_without_dust() {
    let clear = Scenario::<f64>::baseline();
    let dusty = with_dust(clear.clone(), 2e-13);
    let a = resolve_numerics(&clear).unwrap();
    let b = resolve_numerics(&dusty).unwrap();
    assert_eq!((a.aperture_resolution, a.panel_order), (b.aperture_resolution, b.panel_order));
}

//! Acceptance gate. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed.

use std::io::Write;
use std::time::Instant;

use lunabeam_core::calibrate::calibrate_cext;
use lunabeam_core::diffraction::{compute_irradiance_map, IrradianceMap};
use lunabeam_core::dust::{mie_extinction_cross_section, mie_scattering, rayleigh_cross_section};
use lunabeam_core::receiver::{beam_shift, converge};
use lunabeam_core::scenario::{CextSource, Scenario};
use lunabeam_core::sweeps::{run_sweep, SweepKind, SweepResult, SweepSpec};
use lunabeam_core::validate::{energy_capture, gaussian_oracle_error, phase_oracle_error};
use lunabeam_core::Complex;

struct Gate {
    lines: Vec<(bool, String)>,
}

impl Gate {
    fn record(&mut self, id: &str, passed: bool, detail: String) {
        let line = format!("[{}] criterion {id}: {detail}", if passed { "PASS" } else { "FAIL" });
        // Written to the raw handle so it shows even when output is captured.
        let mut out = std::io::stdout();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
        self.lines.push((passed, line));
    }

    fn info(&self, text: String) {
        let _ = writeln!(std::io::stdout(), "       {text}");
    }
}

fn clear() -> Scenario<f64> {
    Scenario::baseline()
}

fn dusty(diameter: f64, cext: f64) -> Scenario<f64> {
    let mut s = Scenario::<f64>::baseline();
    s.dust.enabled = true;
    s.dust.model.diameter = diameter;
    s.dust.source = Some(CextSource::Explicit(cext));
    s.resolve_cext().unwrap();
    s
}

fn efficiency(s: &Scenario<f64>) -> f64 {
    converge(s).unwrap().result.efficiency
}

fn efficiencies(r: &SweepResult) -> Vec<f64> {
    r.rows
        .iter()
        .map(|row| row.outcome.as_ref().expect("cell evaluated").result.efficiency)
        .collect()
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn map_parity_error(m: &IrradianceMap<f64>) -> f64 {
    let nx = m.xs.len();
    let peak = m.max();
    let mut worst = 0.0f64;
    for iy in 0..m.ys.len() {
        for ix in 0..nx {
            let d = (m.value(ix, iy) - m.value(nx - 1 - ix, iy)).abs();
            worst = worst.max(d / peak);
        }
    }
    worst
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate { lines: Vec::new() };
    let within = |v: f64, lo: f64, hi: f64| v >= lo && v <= hi;

    // 1. Free-space distance curve.
    let t = Instant::now();
    let mut s = clear();
    s.geometry.distance = 25e3;
    let e25 = efficiency(&s);
    s.geometry.distance = 50e3;
    let e50 = efficiency(&s);
    let distance_sweep = run_sweep(&SweepSpec::default_for(SweepKind::Distance, clear())).unwrap();
    let secs = t.elapsed().as_secs_f64();
    gate.record(
        "1 (free-space distance curve)",
        within(e25, 0.894, 0.954) && within(e50, 0.474, 0.534) && secs < 600.0,
        format!("eff(25 km) = {e25:.4} in [0.894, 0.954], eff(50 km) = {e50:.4} in [0.474, 0.534], {secs:.1} s incl. 1-50 km sweep"),
    );

    // 2. Analytic Gaussian oracle.
    let errs: Vec<f64> = [1.0, 2.0, 4.0, 7.0].iter().map(|&k| gaussian_oracle_error(k).unwrap()).collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    gate.record(
        "2 (Gaussian oracle, r_a = 3 w0)",
        worst <= 0.01,
        format!("rel errors at 1/2/4/7 z_R = {:.2e}/{:.2e}/{:.2e}/{:.2e}, bound 1e-2", errs[0], errs[1], errs[2], errs[3]),
    );

    // 3. Closed-form phase against quadrature.
    let (ep, ei) = phase_oracle_error(20_240_601, 1000).unwrap();
    gate.record(
        "3 (phase closed form vs quadrature)",
        ep <= 1e-9 && ei <= 1e-9,
        format!("1000 rays, max rel error {ep:.2e} (real) {ei:.2e} (imaginary), bound 1e-9"),
    );

    // 4. Energy within a plane of half-width 4 w(5 km), baseline source.
    let captured = energy_capture(1.0).unwrap();
    gate.record(
        "4 (energy within 4 w at 5 km)",
        captured >= 0.99,
        format!("baseline aperture (r_a = w0): {captured:.5} of P0, bound 0.99"),
    );
    gate.info(format!(
        "same plane with r_a = 3 w0: {:.6} of P0 (hard-edge diffraction carries the baseline shortfall)",
        energy_capture(3.0).unwrap()
    ));

    // 5. Calibrated 175 nm dust.
    let mut cal_base = clear();
    cal_base.dust.model.diameter = 175e-9;
    cal_base.geometry.source_height = 12.0;
    let c175 = calibrate_cext(&cal_base, 910.0).unwrap().cext;
    let at = |d: f64, h0: f64| {
        let mut s = dusty(175e-9, c175);
        s.geometry.distance = d;
        s.geometry.source_height = h0;
        efficiency(&s)
    };
    let (e5, e20, e50d, e6, e9) = (at(5e3, 12.0), at(20e3, 12.0), at(50e3, 12.0), at(5e3, 6.0), at(5e3, 9.0));
    gate.record(
        "5 (calibrated 175 nm curve)",
        within(e20, 0.66, 0.76) && within(e50d, 0.20, 0.30) && within(e6, 0.79, 0.89) && within(e9, 0.84, 0.94),
        format!(
            "C_ext = {c175:.4e} m² (5 km, h0 = 12 m -> {e5:.4}); 20 km {e20:.4} vs 0.71, 50 km {e50d:.4} vs 0.25, \
             h0 = 6 m {e6:.4} vs 0.84, h0 = 9 m {e9:.4} vs 0.89 (±0.05)"
        ),
    );

    // 6. Beam shift. 250 nm calibrated on its own 5 km, h0 = hp = 2 m point (19 %).
    let mut cal250 = clear();
    cal250.dust.model.diameter = 250e-9;
    let c250 = calibrate_cext(&cal250, 190.0).unwrap().cext;
    let shift = |d: f64, c: f64, dist: f64| {
        let mut s = dusty(d, c);
        s.geometry.distance = dist;
        let f = s.numerics.map_extent_factor;
        let extent = (f * s.geometry.panel_length / 2.0, f * s.geometry.panel_width / 2.0);
        let map = compute_irradiance_map(&s, extent, s.numerics.map_resolution).unwrap();
        let r = converge(&s).unwrap().result;
        (beam_shift(&map).unwrap(), r.peak_y, r.shift_y)
    };
    let s175 = shift(175e-9, c175, 50e3);
    let s250 = shift(250e-9, c250, 50e3);
    let s250_20 = shift(250e-9, c250, 20e3);
    let s175_20 = shift(175e-9, c175, 20e3);
    let ok175 = within(s175.0, 0.027 * 0.8, 0.027 * 1.2);
    let ok250 = within(s250.0, 0.173 * 0.8, 0.173 * 1.2);
    let ok20 = within(s250_20.0, 0.005, 0.013);
    let ordered = s175.0 > 0.0 && s250.0 > s175.0 && s175_20.0 > 0.0 && s250_20.0 > s175_20.0;
    gate.record(
        "6 (beam shift)",
        ok175 && ok250 && ok20 && ordered,
        format!(
            "centroid shift 50 km: 175 nm {:.2} cm vs 2.7 ±20% [{}], 250 nm {:.2} cm vs 17.3 ±20% [{}]; \
             20 km 250 nm {:.2} cm in [0.5, 1.3] [{}]; positive and increasing in d_p [{}]",
            s175.0 * 100.0,
            if ok175 { "ok" } else { "out" },
            s250.0 * 100.0,
            if ok250 { "ok" } else { "out" },
            s250_20.0 * 100.0,
            if ok20 { "ok" } else { "out" },
            if ordered { "ok" } else { "out" },
        ),
    );
    gate.info(format!("250 nm C_ext = {c250:.4e} m²"));
    gate.info(format!(
        "peak_y: {:.2} / {:.2} / {:.2} cm, panel-window centroid: {:.2} / {:.2} / {:.2} cm (175@50, 250@50, 250@20)",
        s175.1 * 100.0,
        s250.1 * 100.0,
        s250_20.1 * 100.0,
        s175.2 * 100.0,
        s250.2 * 100.0,
        s250_20.2 * 100.0
    ));

    // 7. Monotonicity over the default grids, comparison ordering, map parity.
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        if !pass {
            notes.push(name.to_string());
        }
        ok &= pass;
    };
    check("distance (dust-free)", non_increasing(&efficiencies(&distance_sweep)));
    let d175 = dusty(175e-9, c175);
    let d250 = dusty(250e-9, c250);
    let r = run_sweep(&SweepSpec::default_for(SweepKind::Distance, d175.clone())).unwrap();
    check("distance (175 nm)", non_increasing(&efficiencies(&r)));
    for (label, base) in [("175 nm", &d175), ("250 nm", &d250)] {
        let spec = SweepSpec::default_for(SweepKind::HeightMap, base.clone());
        let (nh, nd) = (spec.axes[0].values.len(), spec.axes[1].values.len());
        let e = efficiencies(&run_sweep(&spec).unwrap());
        let in_h = (0..nd).all(|j| (0..nh - 1).all(|i| e[(i + 1) * nd + j] >= e[i * nd + j]));
        let in_d = (0..nh).all(|i| non_increasing(&e[i * nd..(i + 1) * nd]));
        check(&format!("h0 ({label})"), in_h);
        check(&format!("distance at each h0 ({label})"), in_d);
    }
    for (label, base) in [("dust-free", clear()), ("175 nm", d175.clone()), ("250 nm", d250.clone())] {
        let e = efficiencies(&run_sweep(&SweepSpec::default_for(SweepKind::PanelHeight, base)).unwrap());
        check(&format!("hp ({label})"), e.windows(2).all(|w| w[1] >= w[0]));
    }
    let spec = SweepSpec::default_for(SweepKind::ParticleSize, d175.clone());
    let nd = spec.axes[1].values.len();
    let e = efficiencies(&run_sweep(&spec).unwrap());
    let strictly = (0..nd).all(|j| (0..e.len() / nd - 1).all(|i| e[(i + 1) * nd + j] < e[i * nd + j]));
    check("d_p strictly decreasing", strictly);
    for base in [&d175, &d250] {
        let r = run_sweep(&SweepSpec::default_for(SweepKind::Fig4Comparison, base.clone())).unwrap();
        let ordered = r.rows.iter().all(|row| {
            let d = row.outcome.as_ref().unwrap();
            d.result.power <= d.center_to_center.unwrap().min(d.no_dust_power.unwrap()) * (1.0 + 1e-3)
        });
        check("comparison ordering", ordered);
    }
    let maps = run_sweep(&SweepSpec::default_for(SweepKind::IrradianceMaps, d175.clone())).unwrap();
    let parity = maps.maps.iter().map(|(_, m)| map_parity_error(m)).fold(0.0, f64::max);
    check("map x-parity", parity <= 1e-9);
    gate.record(
        "7 (monotonicity, comparison ordering, x-parity)",
        ok,
        if notes.is_empty() {
            format!("all default grids monotone; comparison ordering holds; max map parity error {parity:.1e}")
        } else {
            format!("violations: {}", notes.join(", "))
        },
    );

    // 8. Mie validity.
    let m = Complex::new(1.733, 0.0);
    let lambda: f64 = 1064e-9;
    let rayleigh_err = [25e-9, 50e-9, 75e-9, 100e-9]
        .iter()
        .map(|&d| {
            (mie_extinction_cross_section(d, lambda, m).unwrap() / rayleigh_cross_section(d, lambda, 1.733).unwrap() - 1.0)
                .abs()
        })
        .fold(0.0, f64::max);
    let conv = [175e-9, 250e-9]
        .iter()
        .map(|&d| {
            let a = mie_scattering(d, lambda, m, None).unwrap();
            let b = mie_scattering(d, lambda, m, Some(a.terms + 5)).unwrap();
            (b.cext / a.cext - 1.0f64).abs()
        })
        .fold(0.0, f64::max);
    let ratio = mie_extinction_cross_section(250e-9, lambda, m).unwrap()
        / mie_extinction_cross_section(175e-9, lambda, m).unwrap();
    gate.record(
        "8 (Mie validity)",
        rayleigh_err <= 0.1 && conv < 1e-8 && within(ratio, 6.4, 10.6),
        format!("Rayleigh diff {rayleigh_err:.2e} (x <= 0.3), +5 terms {conv:.1e}, ratio 250/175 = {ratio:.3}"),
    );

    // 9. Worker-count independence.
    let mut same = true;
    for (kind, base) in [(SweepKind::Fig4Comparison, d175.clone()), (SweepKind::IrradianceMaps, d175)] {
        let mut outputs = Vec::new();
        for workers in [1, 4] {
            let mut b = base.clone();
            b.numerics.workers = workers;
            outputs.push(run_sweep(&SweepSpec::default_for(kind, b)).unwrap().to_csv(true));
        }
        same &= outputs[0] == outputs[1];
    }
    gate.record("9 (determinism)", same, "fig4_comparison and irradiance_maps CSV identical for 1 and 4 workers".into());

    let failed: Vec<_> = gate.lines.iter().filter(|(p, _)| !p).map(|(_, l)| l.clone()).collect();
    assert!(failed.is_empty(), "{} criteria failed:\n{}", failed.len(), failed.join("\n"));
}

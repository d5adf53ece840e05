//! Oracle suite run by `lunabeam validate`.
//!
//! Each check compares the production path against an independent
//! reference: adaptive quadrature for the closed-form phase, the Rayleigh
//! limit and series extension for Mie, the analytic Gaussian beam for the
//! diffraction sum.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffraction::{
    build_grid_at_least, field_at_point, free_space_gaussian_irradiance, irradiance_at_point, sampling_resolution,
};
use crate::dust::{mie_extinction_cross_section, mie_scattering, rayleigh_cross_section, DustModel};
use crate::error::Result;
use crate::geometry::{PathPoint, ScenarioGeometry};
use crate::phase::{phase_excess, phase_excess_quadrature};
use crate::receiver::converge;
use crate::scenario::Scenario;
use crate::source::{build_aperture_grid, APERTURE_POWER_TOLERANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured value and the bound it was held to.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub seed: u64,
    pub rays: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { seed: 20_240_601, rays: 1000 }
    }
}

/// Largest relative error of the closed-form phase against quadrature over
/// random rays, as `(dust phase, extinction)`.
pub fn phase_oracle_error(seed: u64, rays: usize) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dust = DustModel::lunar(175e-9, 5e-14);
    let lambda = 1064e-9;
    let mut worst = (0.0f64, 0.0f64);
    let rel = |q: f64, c: f64| {
        let scale = c.abs().max(q.abs());
        if scale > 0.0 {
            (q - c).abs() / scale
        } else {
            0.0
        }
    };
    for _ in 0..rays {
        let h0 = rng.gen_range(0.01..20.0);
        let h1 = rng.gen_range(0.01..20.0);
        let len: f64 = rng.gen_range(10.0..5e4);
        // Ray of length `len` between the two heights.
        let dist = (len * len - (h1 - h0) * (h1 - h0)).max(0.0).sqrt().max(1.0);
        let geom = ScenarioGeometry { distance: dist, source_height: h0, panel_height: h1, panel_length: 0.5, panel_width: 0.5 };
        let src = PathPoint::on_aperture(0.0, 0.0);
        let dst = PathPoint::new(0.0, 0.0, dist);
        let c = phase_excess(&src, &dst, &geom, Some(&dust), lambda)?;
        let q = phase_excess_quadrature(&src, &dst, &geom, Some(&dust), lambda, 1e-13)?;
        worst.0 = worst.0.max(rel(q.dust_phase, c.dust_phase));
        worst.1 = worst.1.max(rel(q.extinction, c.extinction));
    }
    Ok(worst)
}

/// Relative error of on-axis irradiance against the Gaussian beam at
/// `multiple · z_R` with a `3 w0` aperture.
pub fn gaussian_oracle_error(multiple: f64) -> Result<f64> {
    let mut s = Scenario::<f64>::baseline().laser;
    s.aperture_radius = 3.0 * s.waist;
    let z = multiple * s.rayleigh_range();
    let n = 2 * sampling_resolution(&s, s.aperture_radius, z);
    let grid = build_grid_at_least(&s, n, 8192)?;
    let geom = ScenarioGeometry { distance: z, source_height: 5.0, panel_height: 5.0, panel_length: 0.5, panel_width: 0.5 };
    let e = field_at_point(&grid, &PathPoint::new(0.0, 0.0, z), &geom, None, s.wavelength)?;
    let oracle = free_space_gaussian_irradiance(&s, 0.0, 0.0, z);
    Ok((irradiance_at_point(e, s.impedance) / oracle - 1.0).abs())
}

/// Power captured at 5 km by a square plane of half-width `4 w(5 km)`,
/// as a fraction of `P0`, for aperture radius `radius_in_waists · w0`.
pub fn energy_capture(radius_in_waists: f64) -> Result<f64> {
    let mut sc = Scenario::<f64>::baseline();
    sc.laser.aperture_radius = radius_in_waists * sc.laser.waist;
    let w = sc.laser.beam_radius(sc.geometry.distance);
    sc.geometry.panel_length = 8.0 * w;
    sc.geometry.panel_width = 8.0 * w;
    Ok(converge(&sc)?.result.efficiency)
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Runs every oracle check.
pub fn run_validation(opts: ValidationOptions) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    let (ep, ei) = phase_oracle_error(opts.seed, opts.rays)?;
    checks.push(check(
        "phase closed form vs quadrature",
        ep <= 1e-9 && ei <= 1e-9,
        format!("{} rays, max rel error {ep:.2e} (phase) {ei:.2e} (extinction), bound 1e-9", opts.rays),
    ));

    let lambda: f64 = 1064e-9;
    let m = Complex::new(1.733, 0.0);
    let mut worst = 0.0f64;
    for d in [25e-9, 50e-9, 75e-9, 100e-9] {
        let mie = mie_extinction_cross_section(d, lambda, m)?;
        let ray = rayleigh_cross_section(d, lambda, 1.733)?;
        worst = worst.max((mie / ray - 1.0).abs());
    }
    checks.push(check(
        "Mie vs Rayleigh (x <= 0.3)",
        worst <= 0.1,
        format!("max rel difference {worst:.3e}, bound 0.1"),
    ));

    let mut worst = 0.0f64;
    for d in [175e-9, 250e-9, 1e-6, 5e-6] {
        let base = mie_scattering(d, lambda, m, None)?;
        let more = mie_scattering(d, lambda, m, Some(base.terms + 5))?;
        worst = worst.max((more.cext / base.cext - 1.0).abs());
    }
    checks.push(check(
        "Mie series convergence (+5 terms)",
        worst < 1e-8,
        format!("max rel change {worst:.3e}, bound 1e-8"),
    ));

    let ratio = mie_extinction_cross_section(250e-9, lambda, m)? / mie_extinction_cross_section(175e-9, lambda, m)?;
    checks.push(check(
        "Mie size ratio 250/175 nm",
        (6.4..=10.6).contains(&ratio),
        format!("{ratio:.3}, range [6.4, 10.6]"),
    ));

    for k in [1.0, 2.0, 4.0, 7.0] {
        let err = gaussian_oracle_error(k)?;
        checks.push(check(
            "on-axis irradiance vs Gaussian beam",
            err <= 0.01,
            format!("z = {k} z_R, rel error {err:.3e}, bound 0.01"),
        ));
    }

    let s = Scenario::<f64>::baseline().laser;
    let grid = build_aperture_grid(&s, 64)?;
    let err = (grid.discrete_power(s.impedance) / s.power - 1.0).abs();
    checks.push(check(
        "aperture power",
        err <= APERTURE_POWER_TOLERANCE,
        format!("rel error {err:.3e} at resolution 64, bound {APERTURE_POWER_TOLERANCE}"),
    ));

    let captured = energy_capture(3.0)?;
    checks.push(check(
        "energy capture within 4 w(z) at 5 km (3 w0 aperture)",
        captured >= 0.99,
        format!("{captured:.6} of P0, bound 0.99"),
    ));
    Ok(ValidationReport { checks })
}

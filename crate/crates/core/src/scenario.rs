//! Complete experiment description: laser, geometry, dust and numerics.

use std::path::PathBuf;

use num_complex::Complex;

use crate::dust::{mie_extinction_cross_section, DustModel, DEFAULT_DIAMETER};
use crate::error::{Error, Result};
use crate::geometry::ScenarioGeometry;
use crate::scalar::Real;
use crate::source::LaserSource;

/// Largest particle diameter the effective-medium model is trusted for [m].
pub const MAX_DIAMETER: f64 = 10e-6;
/// Largest supported link distance [m].
pub const MAX_DISTANCE: f64 = 100e3;
/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LUNABEAM_OUTPUT_DIR";

/// Reference point a calibrated `C_ext` is fitted against. Geometry fields
/// left as `None` take the scenario's own values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget<T> {
    pub reference_power: T,
    pub distance: Option<T>,
    pub source_height: Option<T>,
    pub panel_height: Option<T>,
}

/// Where the extinction cross-section comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CextSource<T> {
    /// User-supplied value for the configured diameter.
    Explicit(T),
    /// Mie theory for a sphere with the configured real index.
    Mie,
    /// Fitted so that the simulated power matches a reference point.
    Calibrated {
        target: CalibrationTarget<T>,
        fitted: Option<T>,
    },
}

impl<T> CextSource<T> {
    pub fn mode_name(&self) -> &'static str {
        match self {
            CextSource::Explicit(_) => "explicit",
            CextSource::Mie => "mie",
            CextSource::Calibrated { .. } => "calibrated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DustSettings<T> {
    pub enabled: bool,
    pub model: DustModel<T>,
    pub source: Option<CextSource<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics<T> {
    /// Relative change accepted between successive refinements.
    pub target_rel: T,
    /// Fixed aperture resolution; `None` lets the convergence controller decide.
    pub aperture_resolution: Option<usize>,
    /// Fixed panel Gauss–Legendre order; `None` doubles from `initial_panel_order`.
    pub panel_order: Option<usize>,
    pub initial_panel_order: usize,
    pub max_aperture_resolution: usize,
    pub max_panel_order: usize,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
    /// Samples per axis of irradiance maps.
    pub map_resolution: usize,
    /// Map (and beam-shift window) size as a multiple of the panel size.
    pub map_extent_factor: T,
}

impl<T: Real> Default for Numerics<T> {
    fn default() -> Self {
        Self {
            target_rel: T::lit(1e-3),
            aperture_resolution: None,
            panel_order: None,
            initial_panel_order: 16,
            max_aperture_resolution: 4096,
            max_panel_order: 256,
            workers: 0,
            map_resolution: 65,
            map_extent_factor: T::lit(3.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub directory: PathBuf,
}

impl Default for Outputs {
    fn default() -> Self {
        let dir = std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("lunabeam-out"));
        Self { directory: dir }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub laser: LaserSource<T>,
    pub geometry: ScenarioGeometry<T>,
    pub dust: DustSettings<T>,
    pub numerics: Numerics<T>,
    pub outputs: Outputs,
}

impl<T: Real> Scenario<T> {
    /// 1 kW at 1064 nm, 5 cm waist, 10 cm aperture, 0.5 m × 0.5 m panel,
    /// both ends 2 m above ground, 5 km apart, dust disabled.
    pub fn baseline() -> Self {
        Self {
            laser: LaserSource {
                power: T::lit(1000.0),
                waist: T::lit(0.05),
                aperture_radius: T::lit(0.05),
                wavelength: T::lit(1064e-9),
                impedance: T::lit(377.0),
            },
            geometry: ScenarioGeometry {
                distance: T::lit(5000.0),
                source_height: T::lit(2.0),
                panel_height: T::lit(2.0),
                panel_length: T::lit(0.5),
                panel_width: T::lit(0.5),
            },
            dust: DustSettings {
                enabled: false,
                model: DustModel::lunar(T::lit(DEFAULT_DIAMETER), T::zero()),
                source: None,
            },
            numerics: Numerics::default(),
            outputs: Outputs::default(),
        }
    }

    /// Dust model seen by the propagator, `None` when propagation is in free space.
    pub fn active_dust(&self) -> Option<&DustModel<T>> {
        let m = &self.dust.model;
        if self.dust.enabled && m.diameter > T::zero() {
            Some(m)
        } else {
            None
        }
    }

    pub fn without_dust(&self) -> Self {
        let mut s = self.clone();
        s.dust.enabled = false;
        s
    }

    /// Efficiency of a received power.
    pub fn efficiency(&self, power: T) -> T {
        power / self.laser.power
    }

    /// Checks every sub-model and the terrain clearance of aperture and panel.
    pub fn validate(&self) -> Result<()> {
        self.laser.validate()?;
        let g = &self.geometry;
        if !(g.panel_height > T::zero()) {
            return Err(Error::validation("geometry.panel_height", "panel below minimum height"));
        }
        if !(g.source_height > T::zero()) {
            return Err(Error::validation("geometry.source_height", "source below minimum height"));
        }
        g.validate().map_err(|e| Error::validation("geometry", e.to_string()))?;
        if g.distance > T::lit(MAX_DISTANCE) {
            return Err(Error::validation(
                "geometry.distance",
                format!("must not exceed {MAX_DISTANCE} m"),
            ));
        }
        let c = g.tilt().cos();
        if !(g.source_point_height(-self.laser.aperture_radius, c) > T::zero()) {
            return Err(Error::validation(
                "geometry.source_height",
                "aperture intersects the ground",
            ));
        }
        if !(g.panel_point_height(-g.panel_width / T::lit(2.0), c) > T::zero()) {
            return Err(Error::validation(
                "geometry.panel_height",
                "panel below minimum height (lower edge at or below ground)",
            ));
        }
        self.dust.model.validate()?;
        if self.dust.model.diameter > T::lit(MAX_DIAMETER) {
            return Err(Error::validation(
                "dust.diameter",
                format!("exceeds the model validity limit of {MAX_DIAMETER} m"),
            ));
        }
        if self.dust.enabled && self.dust.source.is_none() {
            return Err(Error::validation(
                "dust.cext_source",
                "required when dust is enabled; one of \"mie\", \"calibrated\", \"explicit\"",
            ));
        }
        let n = &self.numerics;
        if !(n.target_rel > T::zero() && n.target_rel <= T::lit(0.05)) {
            return Err(Error::validation("numerics.target_rel", "must lie in (0, 0.05]"));
        }
        if n.initial_panel_order < 2 || n.max_panel_order < n.initial_panel_order {
            return Err(Error::validation(
                "numerics.initial_panel_order",
                "must be at least 2 and not exceed numerics.max_panel_order",
            ));
        }
        if n.map_resolution < 32 {
            return Err(Error::validation("numerics.map_resolution", "must be at least 32"));
        }
        if !(n.map_extent_factor >= T::one()) {
            return Err(Error::validation("numerics.map_extent_factor", "must be at least 1"));
        }
        Ok(())
    }

    /// Fills `dust.model.cext` from explicit and Mie sources. Calibrated
    /// sources keep their fitted value, or zero until calibration has run.
    pub fn resolve_cext(&mut self) -> Result<()> {
        let m = &mut self.dust.model;
        match self.dust.source {
            Some(CextSource::Explicit(c)) => m.cext = c,
            Some(CextSource::Mie) => {
                m.cext = if m.diameter > T::zero() {
                    mie_extinction_cross_section(
                        m.diameter,
                        self.laser.wavelength,
                        Complex::new(m.particle_index, T::zero()),
                    )?
                } else {
                    T::zero()
                }
            }
            Some(CextSource::Calibrated { fitted, .. }) => m.cext = fitted.unwrap_or(T::zero()),
            None => {}
        }
        Ok(())
    }

    /// Whether a calibrated `C_ext` still has to be fitted.
    pub fn needs_calibration(&self) -> bool {
        self.dust.enabled && matches!(self.dust.source, Some(CextSource::Calibrated { fitted: None, .. }))
    }

    /// Changes the particle diameter. Explicit and calibrated cross-sections are
    /// rescaled by the Mie ratio between the new and the configured diameter;
    /// Mie sources are recomputed.
    pub fn with_diameter(&self, diameter: T) -> Result<Self> {
        let mut s = self.clone();
        let old = self.dust.model.diameter;
        s.dust.model.diameter = diameter;
        match self.dust.source {
            Some(CextSource::Mie) => s.resolve_cext()?,
            Some(_) if diameter == old => {}
            Some(_) => {
                let index = Complex::new(self.dust.model.particle_index, T::zero());
                let lambda = self.laser.wavelength;
                s.dust.model.cext = if diameter > T::zero() && old > T::zero() {
                    let ratio = mie_extinction_cross_section(diameter, lambda, index)?
                        / mie_extinction_cross_section(old, lambda, index)?;
                    self.dust.model.cext * ratio
                } else {
                    T::zero()
                };
            }
            None => {}
        }
        Ok(s)
    }
}

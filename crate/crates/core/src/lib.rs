//! Ground-to-ground laser power beaming on the Moon.
//!
//! A truncated Gaussian beam leaves a circular aperture, every aperture
//! element radiates a spherical wavelet through height-stratified dust
//! with a complex refractive index, and the resulting irradiance is
//! integrated over a receiver panel.
//!
//! The physics is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); configuration, sweeps and validation work in `f64`.
//!
//! ```
//! use lunabeam_core::{receiver::panel_power, ScenarioF64};
//!
//! let mut s = ScenarioF64::baseline();
//! s.geometry.distance = 25_000.0;
//! let r = panel_power(&s).unwrap();
//! assert!(r.efficiency > 0.85 && r.efficiency < 0.96);
//! ```

pub mod calibrate;
pub mod config;
pub mod diffraction;
pub mod dust;
pub mod error;
pub mod geometry;
pub mod phase;
pub mod quadrature;
pub mod receiver;
pub mod scalar;
pub mod scenario;
pub mod source;
pub mod sweeps;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type ScenarioF64 = scenario::Scenario<f64>;
pub type ScenarioF32 = scenario::Scenario<f32>;
pub type LaserSourceF64 = source::LaserSource<f64>;
pub type LaserSourceF32 = source::LaserSource<f32>;
pub type DustModelF64 = dust::DustModel<f64>;
pub type DustModelF32 = dust::DustModel<f32>;
pub type GeometryF64 = geometry::ScenarioGeometry<f64>;
pub type GeometryF32 = geometry::ScenarioGeometry<f32>;
pub type PanelResultF64 = receiver::PanelResult<f64>;
pub type PanelResultF32 = receiver::PanelResult<f32>;
pub type IrradianceMapF64 = diffraction::IrradianceMap<f64>;
pub type IrradianceMapF32 = diffraction::IrradianceMap<f32>;

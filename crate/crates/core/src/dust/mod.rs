//! Stratified lunar dust: particle density, complex index and extinction
//! cross-sections.
//!
//! The density follows a logarithmic profile `N(h) = -A ln(h / H)` below the
//! ceiling `H` and vanishes above it. Close to the ground the profile diverges,
//! so heights below `floor` are clamped to the value at `floor`.

mod mie;

pub use mie::{mie_extinction_cross_section, mie_scattering, MieResult};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bulk refractive index of lunar dust grains.
pub const DEFAULT_PARTICLE_INDEX: f64 = 1.733;
/// Coefficient `A` of the density profile [m⁻³].
pub const DEFAULT_DENSITY_COEFFICIENT: f64 = 4.166e8;
/// Height above which the dust density is zero [m].
pub const DEFAULT_CEILING: f64 = 8.68;
/// Clamp height for the density profile [m].
pub const DEFAULT_FLOOR: f64 = 1e-3;
/// Default particle diameter [m].
pub const DEFAULT_DIAMETER: f64 = 175e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DustModel<T> {
    /// Particle diameter `d_p` [m].
    pub diameter: T,
    /// Extinction cross-section `C_ext` [m²].
    pub cext: T,
    /// Real bulk index of a grain.
    pub particle_index: T,
    /// Density coefficient `A` [m⁻³].
    pub density_coefficient: T,
    /// Dust ceiling `H` [m].
    pub ceiling: T,
    /// Evaluation floor [m].
    pub floor: T,
}

impl<T: Real> DustModel<T> {
    /// Lunar profile with the standard constants.
    pub fn lunar(diameter: T, cext: T) -> Self {
        Self {
            diameter,
            cext,
            particle_index: T::lit(DEFAULT_PARTICLE_INDEX),
            density_coefficient: T::lit(DEFAULT_DENSITY_COEFFICIENT),
            ceiling: T::lit(DEFAULT_CEILING),
            floor: T::lit(DEFAULT_FLOOR),
        }
    }

    pub fn validate(&self) -> Result<()> {
        // d_p = 0 is the dust-free limit used by particle-size sweeps.
        if !(self.diameter >= T::zero()) || !self.diameter.is_finite() {
            return Err(Error::validation("dust.diameter", "must be non-negative and finite"));
        }
        if !(self.cext >= T::zero()) || !self.cext.is_finite() {
            return Err(Error::validation("dust.cext", "must be non-negative and finite"));
        }
        if !(self.density_coefficient > T::zero()) {
            return Err(Error::validation("dust.density_coefficient", "must be positive"));
        }
        if !(self.ceiling > T::zero()) {
            return Err(Error::validation("dust.ceiling", "must be positive"));
        }
        if !(self.floor > T::zero() && self.floor < self.ceiling) {
            return Err(Error::validation("dust.floor", "must lie in (0, ceiling)"));
        }
        if !(self.particle_index >= T::one()) {
            return Err(Error::validation("dust.particle_index", "must be at least 1"));
        }
        Ok(())
    }

    /// Grain volume `(4π/3)(d_p/2)³` [m³].
    #[inline]
    pub fn particle_volume(&self) -> T {
        let r = self.diameter / T::lit(2.0);
        T::lit(4.0) * T::PI() / T::lit(3.0) * r * r * r
    }

    /// `(m_p − 1)·V`: index excess contributed per particle per m³.
    #[inline]
    pub fn index_excess_per_particle(&self) -> T {
        (self.particle_index - T::one()) * self.particle_volume()
    }

    /// Density without the domain check; heights `<= 0` are treated as the floor.
    #[inline]
    pub(crate) fn density_clamped(&self, h: T) -> T {
        if h >= self.ceiling {
            T::zero()
        } else {
            let h = h.max(self.floor);
            -self.density_coefficient * (h / self.ceiling).ln()
        }
    }

    fn check_height(h: T) -> Result<()> {
        if h > T::zero() {
            Ok(())
        } else {
            Err(Error::Domain(format!("height must be positive, got {h}")))
        }
    }

    /// Particle density `N(h)` [m⁻³].
    pub fn particle_density(&self, h: T) -> Result<T> {
        Self::check_height(h)?;
        Ok(self.density_clamped(h))
    }

    /// `Re(n(h)) − 1`, computed without forming `1 + ε`.
    pub fn real_index_excess(&self, h: T) -> Result<T> {
        Ok(self.index_excess_per_particle() * self.particle_density(h)?)
    }

    /// Volume-fraction-weighted real index; exactly 1 above the ceiling.
    pub fn real_index(&self, h: T) -> Result<T> {
        Ok(T::one() + self.real_index_excess(h)?)
    }

    /// `Im(n(h)) = C_ext N(h) λ / (2π)`.
    pub fn imag_index(&self, h: T, wavelength: T) -> Result<T> {
        if !(wavelength > T::zero()) {
            return Err(Error::Domain(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(self.cext * self.particle_density(h)? * wavelength / (T::lit(2.0) * T::PI()))
    }
}

/// Rayleigh-limit scattering cross-section of a sphere [m²].
pub fn rayleigh_cross_section<T: Real>(diameter: T, wavelength: T, particle_index: T) -> Result<T> {
    if !(diameter > T::zero() && wavelength > T::zero() && particle_index > T::zero()) {
        return Err(Error::Domain(format!(
            "Rayleigh cross-section needs positive inputs (d={diameter}, λ={wavelength}, m={particle_index})"
        )));
    }
    let m2 = particle_index * particle_index;
    let lorentz = (m2 - T::one()) / (m2 + T::lit(2.0));
    let pi = T::PI();
    Ok(T::lit(2.0) / T::lit(3.0) * pi.powi(5) * diameter.powi(6) / wavelength.powi(4) * lorentz * lorentz)
}

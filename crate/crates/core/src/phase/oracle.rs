//! Numerical-quadrature route to the cumulative phase.
//!
//! Integrates the pointwise index profile along the ray with adaptive
//! Gauss–Kronrod. Used for validation only; the closed form is the hot path.

use super::{ComplexPhase, PhaseExcess};
use crate::dust::DustModel;
use crate::error::{Error, Result};
use crate::geometry::{endpoint_heights, path_height, separation, PathPoint, ScenarioGeometry};
use crate::quadrature::integrate_adaptive;
use crate::scalar::Real;

const MAX_INTERVALS: usize = 2000;

/// Arclengths at which the linear height profile crosses the band edges.
fn band_crossings<T: Real>(dust: &DustModel<T>, h_start: T, h_end: T, length: T) -> Vec<T> {
    let mut out = Vec::new();
    if h_start == h_end {
        return out;
    }
    for edge in [dust.floor, dust.ceiling] {
        let s = (edge - h_start) / (h_end - h_start) * length;
        if s > T::zero() && s < length {
            out.push(s);
        }
    }
    out
}

/// Column density by quadrature of `N(h)` along a linear height profile.
pub fn column_density_quadrature<T: Real>(
    dust: &DustModel<T>,
    h_start: T,
    h_end: T,
    length: T,
    tol: T,
) -> Result<T> {
    if !(h_start > T::zero() && h_end > T::zero()) {
        return Err(Error::Terrain(format!("segment reaches height {}", h_start.min(h_end))));
    }
    let f = |s: T| {
        let h = h_start + (h_end - h_start) * (s / length);
        dust.particle_density(h).unwrap_or(T::nan())
    };
    let cuts = band_crossings(dust, h_start, h_end, length);
    integrate_adaptive(&f, T::zero(), length, &cuts, tol, T::zero(), MAX_INTERVALS)
}

/// Dust part of the phase by quadrature of `Re n − 1` and `Im n`.
pub fn phase_excess_quadrature<T: Real>(
    src: &PathPoint<T>,
    dst: &PathPoint<T>,
    geom: &ScenarioGeometry<T>,
    dust: Option<&DustModel<T>>,
    wavelength: T,
    tol: T,
) -> Result<PhaseExcess<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (hs, hd) = endpoint_heights(src, dst, geom);
    if !(hs > T::zero() && hd > T::zero()) {
        return Err(Error::Terrain(format!("ray reaches height {}", hs.min(hd))));
    }
    let Some(dust) = dust else {
        return Ok(PhaseExcess::default());
    };
    let r = separation(src, dst);
    if r == T::zero() {
        return Ok(PhaseExcess::default());
    }
    let k = T::lit(2.0) * T::PI() / wavelength;
    let height = |s: T| path_height(src, dst, geom, s.min(r)).unwrap_or(T::nan());
    let re = |s: T| k * dust.real_index_excess(height(s)).unwrap_or(T::nan());
    let im = |s: T| k * dust.imag_index(height(s), wavelength).unwrap_or(T::nan());
    let cuts = band_crossings(dust, hs, hd, r);
    Ok(PhaseExcess {
        dust_phase: integrate_adaptive(&re, T::zero(), r, &cuts, tol, T::zero(), MAX_INTERVALS)?,
        extinction: integrate_adaptive(&im, T::zero(), r, &cuts, tol, T::zero(), MAX_INTERVALS)?,
    })
}

/// Cumulative complex phase by adaptive quadrature to relative tolerance `tol`.
pub fn cumulative_phase_quadrature<T: Real>(
    src: &PathPoint<T>,
    dst: &PathPoint<T>,
    geom: &ScenarioGeometry<T>,
    dust: Option<&DustModel<T>>,
    wavelength: T,
    tol: T,
) -> Result<ComplexPhase<T>> {
    let excess = phase_excess_quadrature(src, dst, geom, dust, wavelength, tol)?;
    Ok(ComplexPhase::from_excess(separation(src, dst), wavelength, excess))
}

//! Cumulative complex phase along a straight ray through the dust.
//!
//! With a linear height profile the path integral of the index reduces to the
//! column density `∫ N(h(R')) dR' = R · mean_{[h_src, h_dst]} N(h)`. The mean
//! of the logarithmic profile has an exact antiderivative on each of the three
//! height bands (clamped, logarithmic, dust-free), so the closed form below is
//! exact up to rounding.

mod oracle;

pub use oracle::{column_density_quadrature, cumulative_phase_quadrature, phase_excess_quadrature};

use crate::dust::DustModel;
use crate::error::{Error, Result};
use crate::geometry::{endpoint_heights, separation, PathPoint, ScenarioGeometry};
use crate::scalar::Real;

/// `Φ = re + i·im`; the field picks up `exp(-i re) · exp(-im)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPhase<T> {
    /// Accumulated phase [rad].
    pub re: T,
    /// Accumulated field-extinction exponent.
    pub im: T,
}

/// The part of the phase contributed by the dust, i.e. `Φ − 2πR/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseExcess<T> {
    /// `(2π/λ) ∫ (Re n − 1) dR'` [rad].
    pub dust_phase: T,
    /// `(2π/λ) ∫ Im n dR' = C_ext · column`.
    pub extinction: T,
}

impl<T: Real> ComplexPhase<T> {
    pub fn vacuum(length: T, wavelength: T) -> Self {
        Self {
            re: T::lit(2.0) * T::PI() * length / wavelength,
            im: T::zero(),
        }
    }

    pub fn from_excess(length: T, wavelength: T, excess: PhaseExcess<T>) -> Self {
        let v = Self::vacuum(length, wavelength);
        Self {
            re: v.re + excess.dust_phase,
            im: excess.extinction,
        }
    }
}

/// Mean of `ln(h / ceiling)` over `[a, b]` with `0 < a <= b`.
fn mean_log_ratio<T: Real>(a: T, b: T, ceiling: T) -> T {
    let two = T::lit(2.0);
    let mid = (a + b) / two;
    let e = (b - a) / (b + a);
    // Mean of ln(1 + u) for u uniform on [-e, e]; series for small e avoids
    // the cancellation in the closed form.
    let spread = if e < T::lit(0.05) {
        let e2 = e * e;
        let mut term = e2;
        let mut acc = T::zero();
        let mut j = 1usize;
        loop {
            let jf = T::from_usize_lossy(j);
            let contrib = term / (two * jf * (two * jf + T::one()));
            acc = acc + contrib;
            if contrib <= acc * T::epsilon() || j > 40 {
                break;
            }
            term = term * e2;
            j += 1;
        }
        -acc
    } else {
        ((T::one() + e) * e.ln_1p() - (T::one() - e) * (-e).ln_1p()) / (two * e) - T::one()
    };
    (mid / ceiling).ln() + spread
}

/// Column density `∫₀ᴸ N(h(s)) ds` [m⁻²] along a segment of length `length`
/// whose height varies linearly from `h_start` to `h_end`.
///
/// Heights must be positive; callers check terrain clearance.
pub fn column_density<T: Real>(dust: &DustModel<T>, h_start: T, h_end: T, length: T) -> T {
    let (lo, hi) = if h_start <= h_end { (h_start, h_end) } else { (h_end, h_start) };
    let (floor, ceiling) = (dust.floor, dust.ceiling);
    if lo >= ceiling || length == T::zero() {
        return T::zero();
    }
    let span = hi - lo;
    if span == T::zero() {
        return dust.density_clamped(lo) * length;
    }
    let a = dust.density_coefficient;
    let mut weighted = T::zero();
    if lo < floor {
        let top = hi.min(floor);
        weighted = weighted + (top - lo) * dust.density_clamped(floor);
    }
    let band_lo = lo.max(floor);
    let band_hi = hi.min(ceiling);
    if band_hi > band_lo {
        weighted = weighted - (band_hi - band_lo) * a * mean_log_ratio(band_lo, band_hi, ceiling);
    }
    length * (weighted / span)
}

/// Dust contribution to the phase of a segment, from its endpoint heights.
#[inline]
pub fn segment_excess<T: Real>(dust: &DustModel<T>, h_start: T, h_end: T, length: T, wavelength: T) -> PhaseExcess<T> {
    let column = column_density(dust, h_start, h_end, length);
    PhaseExcess {
        dust_phase: T::lit(2.0) * T::PI() / wavelength * dust.index_excess_per_particle() * column,
        extinction: dust.cext * column,
    }
}

fn checked_heights<T: Real>(
    src: &PathPoint<T>,
    dst: &PathPoint<T>,
    geom: &ScenarioGeometry<T>,
) -> Result<(T, T)> {
    let (hs, hd) = endpoint_heights(src, dst, geom);
    if !(hs > T::zero() && hd > T::zero()) {
        return Err(Error::Terrain(format!(
            "ray from ({}, {}) to ({}, {}) reaches height {} m",
            src.x,
            src.y,
            dst.x,
            dst.y,
            hs.min(hd)
        )));
    }
    Ok((hs, hd))
}

/// Dust part of the phase between two points (closed form).
pub fn phase_excess<T: Real>(
    src: &PathPoint<T>,
    dst: &PathPoint<T>,
    geom: &ScenarioGeometry<T>,
    dust: Option<&DustModel<T>>,
    wavelength: T,
) -> Result<PhaseExcess<T>> {
    let (hs, hd) = checked_heights(src, dst, geom)?;
    Ok(match dust {
        Some(d) => segment_excess(d, hs, hd, separation(src, dst), wavelength),
        None => PhaseExcess::default(),
    })
}

/// Cumulative complex phase `Φ = ∫₀ᴿ 2π n(h(R')) / λ dR'` (closed form).
///
/// `dust = None` is free space.
pub fn cumulative_phase<T: Real>(
    src: &PathPoint<T>,
    dst: &PathPoint<T>,
    geom: &ScenarioGeometry<T>,
    dust: Option<&DustModel<T>>,
    wavelength: T,
) -> Result<ComplexPhase<T>> {
    let excess = phase_excess(src, dst, geom, dust, wavelength)?;
    Ok(ComplexPhase::from_excess(separation(src, dst), wavelength, excess))
}

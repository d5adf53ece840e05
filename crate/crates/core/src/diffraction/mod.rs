//! Generalized-diffraction propagation.
//!
//! Every aperture node radiates a spherical wavelet `E0 dA / (λR) · e^{-jΦ}`
//! with `Φ` the cumulative complex phase along the straight ray to the
//! destination. The field at a destination point is the sum over nodes.
//!
//! The vacuum phase `2πR/λ` is split as `k·z + k·(R − z)`; the common term
//! `k·z` is reduced modulo 2π once per destination and the excess path
//! `R − z = ρ²/(R + z)` is formed without cancellation.

mod export;
mod tensor;

pub use export::{write_map_csv, write_map_files, write_map_pgm, MapFiles};
pub use tensor::FACTORIZED_ERROR_BOUND;

use num_complex::Complex;

use crate::dust::DustModel;
use crate::error::{Error, Result};
use crate::geometry::{PathPoint, ScenarioGeometry};
use crate::phase::column_density;
use crate::quadrature::pairwise_sum_by;
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::source::{build_aperture_grid, ApertureGrid, LaserSource};

/// Smallest accepted irradiance-map resolution (samples per axis).
pub const MIN_MAP_RESOLUTION: usize = 32;

/// Aperture sampling that keeps the wavelet phase step between neighbouring
/// nodes below π/4: `k Δ ρ_max / R_min <= π/4`.
///
/// `rho_max` is the largest transverse source–destination offset and
/// `r_min` the shortest propagation distance. The result is even and at
/// least the minimum grid resolution.
pub fn sampling_resolution<T: Real>(source: &LaserSource<T>, rho_max: T, r_min: T) -> usize {
    let k = source.wavenumber();
    let spacing = T::FRAC_PI_4() * r_min / (k * rho_max);
    let n = (T::lit(2.0) * source.aperture_radius / spacing).ceil().to_usize().unwrap_or(usize::MAX / 2);
    let n = n.max(crate::source::MIN_APERTURE_RESOLUTION);
    n + n % 2
}

/// Builds an aperture grid at `resolution`, doubling until the discrete
/// power meets its tolerance.
pub(crate) fn build_grid_at_least<T: Real>(
    source: &LaserSource<T>,
    resolution: usize,
    ceiling: usize,
) -> Result<ApertureGrid<T>> {
    let mut n = resolution;
    loop {
        match build_aperture_grid(source, n) {
            Err(Error::Resolution(_)) if n * 2 <= ceiling => n *= 2,
            other => return other,
        }
    }
}

/// Precomputed propagation from one aperture grid to the panel plane.
#[derive(Debug)]
pub struct Propagator<'a, T> {
    grid: &'a ApertureGrid<T>,
    xs: Vec<T>,
    ys: Vec<T>,
    /// `E0 dA / λ` per node.
    coef: Vec<T>,
    /// Height above ground per node.
    heights: Vec<T>,
    geometry: ScenarioGeometry<T>,
    cos_tilt: T,
    dust: Option<DustModel<T>>,
    wavenumber: T,
    wavelength: T,
    /// `k (m_p − 1) V`: dust phase per unit column density.
    dust_phase_per_column: T,
}

impl<'a, T: Real> Propagator<'a, T> {
    pub fn new(
        grid: &'a ApertureGrid<T>,
        geometry: &ScenarioGeometry<T>,
        dust: Option<&DustModel<T>>,
        wavelength: T,
    ) -> Result<Self> {
        let cos_tilt = geometry.tilt().cos();
        let heights: Vec<T> = grid
            .nodes
            .iter()
            .map(|n| geometry.source_point_height(n.y, cos_tilt))
            .collect();
        if let Some(low) = heights.iter().copied().find(|h| !(*h > T::zero())) {
            return Err(Error::Terrain(format!("aperture node at height {low} m")));
        }
        let wavenumber = T::lit(2.0) * T::PI() / wavelength;
        Ok(Self {
            grid,
            xs: grid.nodes.iter().map(|n| n.x).collect(),
            ys: grid.nodes.iter().map(|n| n.y).collect(),
            coef: grid.nodes.iter().map(|n| n.amplitude * n.weight / wavelength).collect(),
            heights,
            geometry: *geometry,
            cos_tilt,
            dust: dust.copied(),
            wavenumber,
            wavelength,
            dust_phase_per_column: dust
                .map(|d| wavenumber * d.index_excess_per_particle())
                .unwrap_or(T::zero()),
        })
    }

    pub fn from_scenario(grid: &'a ApertureGrid<T>, scenario: &Scenario<T>) -> Result<Self> {
        Self::new(grid, &scenario.geometry, scenario.active_dust(), scenario.laser.wavelength)
    }

    pub fn grid(&self) -> &ApertureGrid<T> {
        self.grid
    }

    #[inline(always)]
    fn wavelet(&self, i: usize, x: T, y: T, z: T, h_dst: T) -> Complex<T> {
        let dx = x - self.xs[i];
        let dy = y - self.ys[i];
        let rho2 = dx * dx + dy * dy;
        let r = (z * z + rho2).sqrt();
        let mut phase = self.wavenumber * (rho2 / (r + z));
        let mut amp = self.coef[i] / r;
        if let Some(d) = &self.dust {
            let column = column_density(d, self.heights[i], h_dst, r);
            phase = phase + self.dust_phase_per_column * column;
            amp = amp * (-d.cext * column).exp();
        }
        let (s, c) = phase.sin_cos();
        Complex::new(amp * c, -amp * s)
    }

    /// Complex field at `(x, y)` in the plane `z` (normally the panel plane).
    pub fn field(&self, x: T, y: T, z: T) -> Result<Complex<T>> {
        let h_dst = self.geometry.panel_point_height(y, self.cos_tilt);
        if !(h_dst > T::zero()) {
            return Err(Error::Terrain(format!("destination ({x}, {y}) at height {h_dst} m")));
        }
        let pairs = self.grid.pair_count;
        let paired = pairwise_sum_by(pairs, &|p: usize| {
            self.wavelet(2 * p, x, y, z, h_dst) + self.wavelet(2 * p + 1, x, y, z, h_dst)
        });
        let singles = self.xs.len() - 2 * pairs;
        let single = pairwise_sum_by(singles, &|s: usize| self.wavelet(2 * pairs + s, x, y, z, h_dst));
        let sum = paired + single;
        // Common phase k·z, reduced to one cycle before it multiplies the sum.
        let cycles = z / self.wavelength;
        let common = T::lit(2.0) * T::PI() * (cycles - cycles.floor());
        let (s, c) = common.sin_cos();
        let e = sum * Complex::new(c, -s);
        if !(e.re.is_finite() && e.im.is_finite()) {
            return Err(Error::Numerical(format!("non-finite field at ({x}, {y}, {z})")));
        }
        Ok(e)
    }

    /// Irradiance [W/m²] at `(x, y)` on the panel plane.
    pub fn irradiance(&self, x: T, y: T, impedance: T) -> Result<T> {
        Ok(irradiance_at_point(self.field(x, y, self.geometry.distance)?, impedance))
    }
}

/// Field at `dst` radiated by `grid`.
pub fn field_at_point<T: Real>(
    grid: &ApertureGrid<T>,
    dst: &PathPoint<T>,
    geometry: &ScenarioGeometry<T>,
    dust: Option<&DustModel<T>>,
    wavelength: T,
) -> Result<Complex<T>> {
    Propagator::new(grid, geometry, dust, wavelength)?.field(dst.x, dst.y, dst.z)
}

/// `|E|² / (2η)`.
#[inline]
pub fn irradiance_at_point<T: Real>(field: Complex<T>, impedance: T) -> T {
    field.norm_sqr() / (T::lit(2.0) * impedance)
}

/// Free-space Gaussian irradiance of the untruncated beam.
pub fn free_space_gaussian_irradiance<T: Real>(source: &LaserSource<T>, x: T, y: T, z: T) -> T {
    let w = source.beam_radius(z);
    T::lit(2.0) * source.power / (T::PI() * w * w) * (-T::lit(2.0) * (x * x + y * y) / (w * w)).exp()
}

/// Fraction of an untruncated Gaussian beam's power inside a centred
/// `length × width` rectangle at distance `z`.
pub fn free_space_panel_fraction<T: Real>(source: &LaserSource<T>, z: T, length: T, width: T) -> T {
    let w = source.beam_radius(z).as_f64();
    let s2 = std::f64::consts::SQRT_2;
    let fx = libm::erf(s2 * length.as_f64() / 2.0 / w);
    let fy = libm::erf(s2 * width.as_f64() / 2.0 / w);
    T::lit(fx * fy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapMeta<T> {
    pub aperture_resolution: usize,
    pub distance: T,
    pub source_height: T,
    pub panel_height: T,
    pub dust_enabled: bool,
    pub diameter: T,
    pub cext: T,
    pub floor: T,
}

/// Irradiance sampled on a uniform grid of the panel plane.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceMap<T> {
    /// Ascending x coordinates [m].
    pub xs: Vec<T>,
    /// Ascending y coordinates [m].
    pub ys: Vec<T>,
    /// Row-major values, `values[iy * xs.len() + ix]` [W/m²].
    pub values: Vec<T>,
    /// Half-widths `(x, y)` of the mapped region [m].
    pub extent: (T, T),
    pub meta: MapMeta<T>,
}

impl<T: Real> IrradianceMap<T> {
    #[inline]
    pub fn value(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.xs.len() + ix]
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// `(ix, iy)` of the largest value (first in row-major order on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best % self.xs.len(), best / self.xs.len())
    }
}

/// Uniform coordinates `-half ..= half` with `n` samples.
fn axis<T: Real>(half: T, n: usize) -> Vec<T> {
    let step = T::lit(2.0) * half / T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| {
            // Mirror exactly about the centre.
            let j = i.min(n - 1 - i);
            let v = -half + T::from_usize_lossy(j) * step;
            if i == j { v } else { -v }
        })
        .map(|v| if v == T::zero() { T::zero() } else { v })
        .collect()
}

/// Irradiance over `[-ex, ex] × [-ey, ey]` at the panel distance with
/// `resolution` samples per axis.
pub fn compute_irradiance_map<T: Real>(
    scenario: &Scenario<T>,
    extent: (T, T),
    resolution: usize,
) -> Result<IrradianceMap<T>> {
    if resolution < MIN_MAP_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "map resolution {resolution} below {MIN_MAP_RESOLUTION}"
        )));
    }
    let g = &scenario.geometry;
    let two = T::lit(2.0);
    if extent.0 < g.panel_length / two || extent.1 < g.panel_width / two {
        return Err(Error::InvalidArgument("map extent must cover the panel".into()));
    }
    let rho = (extent.0 * extent.0 + extent.1 * extent.1).sqrt() + scenario.laser.aperture_radius;
    let rule = sampling_resolution(&scenario.laser, rho, g.distance);
    let n_ap = scenario.numerics.aperture_resolution.unwrap_or(0).max(rule);
    let grid = build_grid_at_least(&scenario.laser, n_ap, scenario.numerics.max_aperture_resolution.max(n_ap))?;
    let prop = Propagator::from_scenario(&grid, scenario)?;
    let xs = axis(extent.0, resolution);
    let ys = axis(extent.1, resolution);
    let values = prop.irradiance_grid(&xs, &ys, scenario.laser.impedance)?;
    let dust = scenario.active_dust();
    Ok(IrradianceMap {
        xs,
        ys,
        values,
        extent,
        meta: MapMeta {
            aperture_resolution: grid.resolution,
            distance: g.distance,
            source_height: g.source_height,
            panel_height: g.panel_height,
            dust_enabled: dust.is_some(),
            diameter: dust.map(|d| d.diameter).unwrap_or(T::zero()),
            cext: dust.map(|d| d.cext).unwrap_or(T::zero()),
            floor: scenario.dust.model.floor,
        },
    })
}

//! Truncated-Gaussian laser aperture and its discretization.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative tolerance on the discrete aperture power.
pub const APERTURE_POWER_TOLERANCE: f64 = 5e-3;
/// Smallest accepted aperture resolution (samples across the diameter).
pub const MIN_APERTURE_RESOLUTION: usize = 8;
/// Subdivision depth used to resolve the disk edge inside boundary cells.
const EDGE_DEPTH: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserSource<T> {
    /// Total emitted power `P0` [W].
    pub power: T,
    /// Gaussian waist radius at 1/e² intensity [m].
    pub waist: T,
    /// Aperture radius [m].
    pub aperture_radius: T,
    /// Wavelength [m].
    pub wavelength: T,
    /// Wave impedance [Ω].
    pub impedance: T,
}

impl<T: Real> LaserSource<T> {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("laser.power", self.power),
            ("laser.waist", self.waist),
            ("laser.aperture_radius", self.aperture_radius),
            ("laser.wavelength", self.wavelength),
            ("laser.impedance", self.impedance),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::validation(field, "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Truncation normalization `(1 − exp(−2 r_a²/w0²))^(−1/2)`, so that the
    /// power through the aperture is `P0`.
    pub fn zeta(&self) -> T {
        let ratio = self.aperture_radius / self.waist;
        let captured = -(-T::lit(2.0) * ratio * ratio).exp_m1();
        T::one() / captured.sqrt()
    }

    /// On-axis field amplitude [V/m].
    pub fn peak_amplitude(&self) -> T {
        self.zeta() * (T::lit(4.0) * self.power * self.impedance / (T::PI() * self.waist * self.waist)).sqrt()
    }

    /// Gaussian amplitude without the aperture window.
    #[inline]
    pub(crate) fn gaussian_amplitude(&self, x0: T, y0: T) -> T {
        self.peak_amplitude() * (-(x0 * x0 + y0 * y0) / (self.waist * self.waist)).exp()
    }

    /// Aperture field `E0(x0, y0)` [V/m]; zero outside the aperture.
    pub fn aperture_field(&self, x0: T, y0: T) -> T {
        if x0 * x0 + y0 * y0 < self.aperture_radius * self.aperture_radius {
            self.gaussian_amplitude(x0, y0)
        } else {
            T::zero()
        }
    }

    pub fn wavenumber(&self) -> T {
        T::lit(2.0) * T::PI() / self.wavelength
    }

    /// `z_R = π w0² / λ` [m].
    pub fn rayleigh_range(&self) -> T {
        T::PI() * self.waist * self.waist / self.wavelength
    }

    /// Free-space Gaussian beam radius `w(z) = w0 √(1 + (z/z_R)²)`.
    pub fn beam_radius(&self, z: T) -> T {
        let q = z / self.rayleigh_range();
        self.waist * (T::one() + q * q).sqrt()
    }
}

/// One quadrature node of the aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureNode<T> {
    pub x: T,
    pub y: T,
    /// Area element `dA` [m²].
    pub weight: T,
    /// Field amplitude `E0` at the node [V/m].
    pub amplitude: T,
}

/// Quadrature of the aperture disk.
///
/// Nodes come in mirror pairs: `nodes[2k]` has `x > 0` and `nodes[2k + 1]`
/// is its image at `-x`. Nodes on `x = 0` (odd resolutions) follow the pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureGrid<T> {
    pub nodes: Vec<ApertureNode<T>>,
    /// Number of mirror pairs at the start of `nodes`.
    pub pair_count: usize,
    /// Cells across the aperture diameter (0 for the single-node grid).
    pub resolution: usize,
}

impl<T: Real> ApertureGrid<T> {
    /// `Σ dA |E0|² / (2η)` [W].
    pub fn discrete_power(&self, impedance: T) -> T {
        let s: f64 = self
            .nodes
            .iter()
            .map(|n| (n.weight * n.amplitude * n.amplitude).as_f64())
            .sum();
        T::lit(s) / (T::lit(2.0) * impedance)
    }

    /// Degenerate grid with a single node at the aperture centre carrying the
    /// whole aperture area. Reduces diffraction to the centre ray.
    pub fn center_node(source: &LaserSource<T>) -> Self {
        let r = source.aperture_radius;
        Self {
            nodes: vec![ApertureNode {
                x: T::zero(),
                y: T::zero(),
                weight: T::PI() * r * r,
                amplitude: source.aperture_field(T::zero(), T::zero()),
            }],
            pair_count: 0,
            resolution: 0,
        }
    }
}

/// Overlap area and first moments of the square `[cx ± h] × [cy ± h]` with
/// the disk of radius `r`, resolved by recursive subdivision.
fn cell_overlap<T: Real>(cx: T, cy: T, h: T, r: T, depth: u32) -> (T, T, T) {
    let r2 = r * r;
    let (ax, ay) = (cx.abs(), cy.abs());
    let far = (ax + h) * (ax + h) + (ay + h) * (ay + h);
    let nx = (ax - h).max(T::zero());
    let ny = (ay - h).max(T::zero());
    let near = nx * nx + ny * ny;
    let area = T::lit(4.0) * h * h;
    if far <= r2 {
        return (area, area * cx, area * cy);
    }
    if near >= r2 {
        return (T::zero(), T::zero(), T::zero());
    }
    if depth == 0 {
        return if cx * cx + cy * cy < r2 {
            (area, area * cx, area * cy)
        } else {
            (T::zero(), T::zero(), T::zero())
        };
    }
    let q = h / T::lit(2.0);
    let mut acc = (T::zero(), T::zero(), T::zero());
    for (sx, sy) in [(-q, -q), (q, -q), (-q, q), (q, q)] {
        let (a, mx, my) = cell_overlap(cx + sx, cy + sy, q, r, depth - 1);
        acc = (acc.0 + a, acc.1 + mx, acc.2 + my);
    }
    acc
}

/// Tensor-product midpoint grid over the aperture disk with `resolution`
/// cells across the diameter. Cells cut by the edge are weighted by their
/// overlap area and sampled at the overlap centroid.
pub fn build_aperture_grid<T: Real>(source: &LaserSource<T>, resolution: usize) -> Result<ApertureGrid<T>> {
    source.validate()?;
    if resolution < MIN_APERTURE_RESOLUTION {
        return Err(Error::Resolution(format!(
            "aperture resolution {resolution} below minimum {MIN_APERTURE_RESOLUTION}"
        )));
    }
    let r = source.aperture_radius;
    let n = resolution;
    let cell = T::lit(2.0) * r / T::from_usize_lossy(n);
    let half = cell / T::lit(2.0);
    let offset = T::lit(n as f64 / 2.0 - 0.5);
    let center = |i: usize| (T::from_usize_lossy(i) - offset) * cell;

    let mut pairs = Vec::new();
    let mut singles = Vec::new();
    for j in 0..n {
        let cy = center(j);
        for i in n.div_ceil(2)..n {
            let cx = center(i);
            let (area, mx, my) = cell_overlap(cx, cy, half, r, EDGE_DEPTH);
            if area <= T::zero() {
                continue;
            }
            let (x, y) = (mx / area, my / area);
            let amplitude = source.gaussian_amplitude(x, y);
            pairs.push(ApertureNode { x, y, weight: area, amplitude });
            pairs.push(ApertureNode { x: -x, y, weight: area, amplitude });
        }
        if n % 2 == 1 {
            let (area, _, my) = cell_overlap(T::zero(), cy, half, r, EDGE_DEPTH);
            if area > T::zero() {
                let y = my / area;
                singles.push(ApertureNode {
                    x: T::zero(),
                    y,
                    weight: area,
                    amplitude: source.gaussian_amplitude(T::zero(), y),
                });
            }
        }
    }
    let pair_count = pairs.len() / 2;
    pairs.extend(singles);
    let grid = ApertureGrid {
        nodes: pairs,
        pair_count,
        resolution,
    };
    let p = grid.discrete_power(source.impedance);
    let err = ((p - source.power) / source.power).abs();
    if err > T::lit(APERTURE_POWER_TOLERANCE) {
        return Err(Error::Resolution(format!(
            "aperture resolution {resolution} gives discrete power {p} W for P0 = {} W \
             (relative error {:.3e} exceeds {APERTURE_POWER_TOLERANCE})",
            source.power,
            err.as_f64()
        )));
    }
    Ok(grid)
}

//! Factorized evaluation on tensor grids of destination points.
//!
//! With the path excess taken as `ρ²/(2z)` and the dust column as
//! `z · mean N`, every wavelet factorizes into an x part and a `(y0, y)`
//! part. The sum over nodes then becomes two small contractions: nodes of
//! one aperture row collapse onto the destination x axis, and rows
//! combine with their y factors. The neglected terms are bounded by
//! [`Propagator::paraxial_error_bound`]; callers fall back to the direct
//! sum when the bound is too loose.

use num_complex::Complex;
use rayon::prelude::*;

use super::Propagator;
use crate::error::{Error, Result};
use crate::phase::column_density;
use crate::quadrature::pairwise_sum_by;
use crate::scalar::Real;

/// Largest accepted relative per-wavelet error of the factorized path.
pub const FACTORIZED_ERROR_BOUND: f64 = 5e-5;

/// Aperture nodes grouped by their (exact) y coordinate.
struct Row<T> {
    y: T,
    height: T,
    /// Node indices; mirror pairs stay adjacent and come first.
    pairs: Vec<(usize, usize)>,
    singles: Vec<usize>,
}

impl<'a, T: Real> Propagator<'a, T> {
    /// Bound on `|wavelet − factorized wavelet| / |wavelet|` for
    /// destinations within `|x| <= dx`, `|y| <= dy` of the axis.
    pub fn paraxial_error_bound(&self, dx: T, dy: T) -> T {
        let sx = self.xs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let sy = self.ys.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let (ax, ay) = (dx + sx, dy + sy);
        let rho2 = ax * ax + ay * ay;
        let z = self.geometry.distance;
        let two = T::lit(2.0);
        let phase = self.wavenumber * rho2 * rho2 / (T::lit(8.0) * z * z * z);
        let amplitude = rho2 / (two * z * z);
        let column = match &self.dust {
            Some(d) => {
                let n_max = d.density_clamped(d.floor);
                (self.dust_phase_per_column.abs() + d.cext) * n_max * rho2 / (two * z)
            }
            None => T::zero(),
        };
        phase + amplitude + column
    }

    fn rows(&self) -> Vec<Row<T>> {
        let grid = self.grid;
        let mut keys: Vec<T> = self.ys.clone();
        keys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        keys.dedup();
        let mut rows: Vec<Row<T>> = keys
            .into_iter()
            .map(|y| Row {
                y,
                height: self.geometry.source_point_height(y, self.cos_tilt),
                pairs: Vec::new(),
                singles: Vec::new(),
            })
            .collect();
        let find = |y: T, rows: &[Row<T>]| rows.binary_search_by(|r| r.y.partial_cmp(&y).unwrap()).unwrap();
        for p in 0..grid.pair_count {
            let r = find(self.ys[2 * p], &rows);
            rows[r].pairs.push((2 * p, 2 * p + 1));
        }
        for i in 2 * grid.pair_count..self.xs.len() {
            let r = find(self.ys[i], &rows);
            rows[r].singles.push(i);
        }
        rows
    }

    /// Irradiance on the tensor grid `xs × ys` in the panel plane, row-major
    /// by y. Uses the factorized sum when its error bound is below
    /// [`FACTORIZED_ERROR_BOUND`], the direct sum otherwise.
    pub fn irradiance_grid(&self, xs: &[T], ys: &[T], impedance: T) -> Result<Vec<T>> {
        let dx = xs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let dy = ys.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if self.paraxial_error_bound(dx, dy) <= T::lit(FACTORIZED_ERROR_BOUND) {
            self.irradiance_grid_factorized(xs, ys, impedance)
        } else {
            self.irradiance_grid_direct(xs, ys, impedance)
        }
    }

    /// Direct element sum at every grid point.
    pub fn irradiance_grid_direct(&self, xs: &[T], ys: &[T], impedance: T) -> Result<Vec<T>> {
        let nx = xs.len();
        (0..nx * ys.len())
            .into_par_iter()
            .map(|k| self.irradiance(xs[k % nx], ys[k / nx], impedance))
            .collect()
    }

    /// Factorized sum at every grid point, regardless of the error bound.
    pub fn irradiance_grid_factorized(&self, xs: &[T], ys: &[T], impedance: T) -> Result<Vec<T>> {
        let z = self.geometry.distance;
        let k_half_z = self.wavenumber / (T::lit(2.0) * z);
        let heights: Vec<T> = ys
            .iter()
            .map(|&y| self.geometry.panel_point_height(y, self.cos_tilt))
            .collect();
        if let Some((i, h)) = heights.iter().enumerate().find(|(_, h)| !(**h > T::zero())) {
            return Err(Error::Terrain(format!("destination y = {} at height {h} m", ys[i])));
        }
        let rows = self.rows();
        let nx = xs.len();
        let ny = ys.len();
        let kernel_x = |x: T, xs0: T| {
            let d = x - xs0;
            let (s, c) = (k_half_z * d * d).sin_cos();
            Complex::new(c, -s)
        };
        // Row sums on the destination x axis: rows × nx.
        let row_x: Vec<Vec<Complex<T>>> = rows
            .par_iter()
            .map(|row| {
                xs.iter()
                    .map(|&x| {
                        let term = |i: usize| kernel_x(x, self.xs[i]) * self.coef[i];
                        let paired = pairwise_sum_by(row.pairs.len(), &|p: usize| {
                            let (a, b) = row.pairs[p];
                            term(a) + term(b)
                        });
                        paired + pairwise_sum_by(row.singles.len(), &|s: usize| term(row.singles[s]))
                    })
                    .collect()
            })
            .collect();
        // Row factors on the destination y axis: rows × ny.
        let row_y: Vec<Vec<Complex<T>>> = rows
            .par_iter()
            .map(|row| {
                ys.iter()
                    .zip(&heights)
                    .map(|(&y, &h)| {
                        let d = y - row.y;
                        let mut phase = k_half_z * d * d;
                        let mut amp = z.recip();
                        if let Some(dust) = &self.dust {
                            let column = column_density(dust, row.height, h, z);
                            phase = phase + self.dust_phase_per_column * column;
                            amp = amp * (-dust.cext * column).exp();
                        }
                        let (s, c) = phase.sin_cos();
                        Complex::new(amp * c, -amp * s)
                    })
                    .collect()
            })
            .collect();
        let cycles = z / self.wavelength;
        let common = T::lit(2.0) * T::PI() * (cycles - cycles.floor());
        let (s, c) = common.sin_cos();
        let global = Complex::new(c, -s);
        let two_eta = T::lit(2.0) * impedance;
        let values: Vec<T> = (0..nx * ny)
            .into_par_iter()
            .map(|k| {
                let (ix, iy) = (k % nx, k / nx);
                let e = pairwise_sum_by(rows.len(), &|r: usize| row_x[r][ix] * row_y[r][iy]) * global;
                e.norm_sqr() / two_eta
            })
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite irradiance in factorized sum".into()));
        }
        Ok(values)
    }
}

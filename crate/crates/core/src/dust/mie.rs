//! Mie extinction and scattering for homogeneous spheres.
//!
//! Coefficients `a_n`, `b_n` use the logarithmic derivative `D_n(mx)` from a
//! downward recurrence and Riccati–Bessel functions from upward recurrence.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieResult<T> {
    /// `x = π d / λ`.
    pub size_parameter: T,
    pub qext: T,
    pub qsca: T,
    /// Extinction cross-section [m²].
    pub cext: T,
    /// Scattering cross-section [m²].
    pub csca: T,
    /// Number of series terms summed.
    pub terms: usize,
}

/// Default series length `ceil(x + 4 x^{1/3} + 2)`.
pub fn default_terms<T: Real>(x: T) -> usize {
    (x + T::lit(4.0) * x.cbrt() + T::lit(2.0)).ceil().to_usize().unwrap_or(1).max(1)
}

/// Mie cross-sections for a sphere of diameter `diameter` and complex index
/// `index` (positive imaginary part means absorption). `terms` overrides the
/// default series length.
pub fn mie_scattering<T: Real>(
    diameter: T,
    wavelength: T,
    index: Complex<T>,
    terms: Option<usize>,
) -> Result<MieResult<T>> {
    if !(diameter > T::zero() && wavelength > T::zero()) {
        return Err(Error::Domain(format!(
            "Mie calculation needs positive diameter and wavelength (d={diameter}, λ={wavelength})"
        )));
    }
    let x = T::PI() * diameter / wavelength;
    let nstop = terms.unwrap_or_else(|| default_terms(x));
    let y = index * x;
    let nmx = nstop.max(y.norm().ceil().to_usize().unwrap_or(0)) + 15;

    let mut d = vec![Complex::<T>::new(T::zero(), T::zero()); nmx + 1];
    for n in (1..=nmx).rev() {
        let rn = Complex::from(T::from_usize_lossy(n)) / y;
        d[n - 1] = rn - Complex::<T>::from(T::one()) / (d[n] + rn);
    }
    if let Some(bad) = d.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical(format!(
            "logarithmic-derivative recurrence diverged at order {bad} (x={x}, m={index}, start order {nmx})"
        )));
    }

    let two = T::lit(2.0);
    let mut psi0 = x.cos();
    let mut psi1 = x.sin();
    let mut chi0 = -x.sin();
    let mut chi1 = x.cos();
    let mut xi1 = Complex::new(psi1, -chi1);
    let mut qsca = T::zero();
    let mut qext = T::zero();
    for n in 1..=nstop {
        let nf = T::from_usize_lossy(n);
        let f = two * nf - T::one();
        let psi = f * psi1 / x - psi0;
        let chi = f * chi1 / x - chi0;
        let xi = Complex::new(psi, -chi);
        let nx = Complex::from(nf / x);
        let da = d[n] / index + nx;
        let db = d[n] * index + nx;
        let an = (da * psi - psi1) / (da * xi - xi1);
        let bn = (db * psi - psi1) / (db * xi - xi1);
        let weight = two * nf + T::one();
        qsca = qsca + weight * (an.norm_sqr() + bn.norm_sqr());
        qext = qext + weight * (an + bn).re;
        psi0 = psi1;
        psi1 = psi;
        chi0 = chi1;
        chi1 = chi;
        xi1 = Complex::new(psi1, -chi1);
    }
    let scale = two / (x * x);
    let (qext, qsca) = (qext * scale, qsca * scale);
    if !qext.is_finite() || !qsca.is_finite() {
        return Err(Error::Numerical(format!("non-finite Mie efficiencies (x={x}, m={index})")));
    }
    let geometric = T::PI() * diameter * diameter / T::lit(4.0);
    Ok(MieResult {
        size_parameter: x,
        qext,
        qsca,
        cext: qext * geometric,
        csca: qsca * geometric,
        terms: nstop,
    })
}

/// Extinction cross-section `C_ext` [m²].
pub fn mie_extinction_cross_section<T: Real>(diameter: T, wavelength: T, index: Complex<T>) -> Result<T> {
    Ok(mie_scattering(diameter, wavelength, index, None)?.cext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dust::rayleigh_cross_section;

    const LAMBDA: f64 = 1064e-9;

    fn real(m: f64) -> Complex<f64> {
        Complex::new(m, 0.0)
    }

    #[test]
    fn agrees_with_rayleigh_for_small_spheres() {
        for x in [0.01, 0.05, 0.1, 0.2, 0.3] {
            let d = x * LAMBDA / std::f64::consts::PI;
            let mie = mie_extinction_cross_section(d, LAMBDA, real(1.733)).unwrap();
            let ray = rayleigh_cross_section(d, LAMBDA, 1.733).unwrap();
            assert!((mie / ray - 1.0).abs() < 0.10, "x={x}: mie {mie:e} rayleigh {ray:e}");
        }
    }

    #[test]
    fn index_matched_sphere_does_not_scatter() {
        let r = mie_scattering(175e-9, LAMBDA, real(1.0), None).unwrap();
        let geometric = std::f64::consts::PI * (175e-9f64).powi(2) / 4.0;
        assert!(r.cext.abs() < 1e-12 * geometric);
    }

    #[test]
    fn size_scaling_of_lunar_grains() {
        let c175 = mie_extinction_cross_section(175e-9, LAMBDA, real(1.733)).unwrap();
        let c250 = mie_extinction_cross_section(250e-9, LAMBDA, real(1.733)).unwrap();
        let ratio = c250 / c175;
        let rayleigh_ratio = (250.0f64 / 175.0).powi(6);
        assert!((ratio / rayleigh_ratio - 1.0).abs() < 0.25, "ratio {ratio}");
        assert!((c175 / 7.3e-16 - 1.0).abs() < 0.10, "{c175:e}");
    }

    #[test]
    fn lossless_sphere_extinction_equals_scattering() {
        for d in [50e-9, 175e-9, 250e-9, 1e-6, 5e-6] {
            let r = mie_scattering(d, LAMBDA, real(1.733), None).unwrap();
            assert!((r.qext / r.qsca - 1.0).abs() < 1e-9, "d={d}: {} vs {}", r.qext, r.qsca);
        }
    }

    #[test]
    fn absorbing_sphere_extinguishes_more_than_it_scatters() {
        let r = mie_scattering(500e-9, LAMBDA, Complex::new(1.733, 0.1), None).unwrap();
        assert!(r.qext > r.qsca);
    }

    #[test]
    fn series_is_converged() {
        for d in [20e-9, 175e-9, 250e-9, 2e-6, 10e-6] {
            let base = mie_scattering(d, LAMBDA, real(1.733), None).unwrap();
            let longer = mie_scattering(d, LAMBDA, real(1.733), Some(base.terms + 5)).unwrap();
            assert!((longer.cext / base.cext - 1.0).abs() < 1e-8, "d={d}");
        }
    }

    #[test]
    fn large_sphere_approaches_extinction_paradox() {
        // Q_ext → 2 for x ≫ 1.
        let r = mie_scattering(200e-6, LAMBDA, real(1.5), None).unwrap();
        assert!((r.qext - 2.0).abs() < 0.05, "{}", r.qext);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(matches!(mie_scattering(0.0, LAMBDA, real(1.5), None), Err(Error::Domain(_))));
        assert!(mie_scattering(1e-7, -1.0, real(1.5), None).is_err());
    }
}

//! One-point fit of the extinction cross-section against a reference power.

use crate::dust::rayleigh_cross_section;
use crate::error::{Error, Result};
use crate::receiver::{panel_power_fixed, resolve_numerics};
use crate::scalar::Real;
use crate::scenario::{CextSource, Scenario};

/// Relative width of the final `C_ext` bracket.
pub const CALIBRATION_REL_TOL: f64 = 1e-3;
const MAX_BRACKET_STEPS: usize = 60;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration<T> {
    /// Fitted cross-section [m²].
    pub cext: T,
    /// Panel power at the fitted cross-section [W].
    pub power: T,
    /// Final bracket `(lo, hi)` on `C_ext`.
    pub bracket: (T, T),
    /// Panel power evaluations spent.
    pub evaluations: usize,
    pub aperture_resolution: usize,
    pub panel_order: usize,
}

/// `C_ext` for which the panel power of `scenario` equals `reference_power`.
///
/// Numerics are settled once on the dust-free variant and held fixed, so
/// the bisected power is an exactly monotone function of `C_ext`.
pub fn calibrate_cext<T: Real>(scenario: &Scenario<T>, reference_power: T) -> Result<Calibration<T>> {
    if !(reference_power > T::zero() && reference_power < scenario.laser.power) {
        return Err(Error::InvalidArgument(format!(
            "reference power {reference_power} W must lie in (0, {}) W",
            scenario.laser.power
        )));
    }
    let mut base = scenario.clone();
    base.dust.enabled = true;
    base.dust.source = Some(CextSource::Explicit(T::zero()));
    base.dust.model.cext = T::zero();
    base.validate()?;
    if !(base.dust.model.diameter > T::zero()) {
        return Err(Error::InvalidArgument("calibration needs a positive particle diameter".into()));
    }
    let settled = resolve_numerics(&base)?;
    let (n, m) = (settled.aperture_resolution, settled.panel_order);
    let mut evaluations = 0;
    let mut power_at = |c: T| -> Result<T> {
        let mut s = base.clone();
        s.dust.model.cext = c;
        evaluations += 1;
        Ok(panel_power_fixed(&s, n, m)?.power)
    };
    let clear = power_at(T::zero())?;
    let done = |cext: T, power: T, bracket, evaluations| Calibration {
        cext,
        power,
        bracket,
        evaluations,
        aperture_resolution: n,
        panel_order: m,
    };
    if reference_power >= clear {
        if reference_power > clear * (T::one() + T::lit(CALIBRATION_REL_TOL)) {
            return Err(Error::Calibration {
                reference: reference_power.as_f64(),
                lo: 0.0,
                hi: 0.0,
                power_lo: clear.as_f64(),
                power_hi: clear.as_f64(),
            });
        }
        return Ok(done(T::zero(), clear, (T::zero(), T::zero()), 1));
    }
    let m_p = base.dust.model.particle_index;
    let start = rayleigh_cross_section(base.dust.model.diameter, base.laser.wavelength, m_p)?;
    let start = if start > T::zero() { start } else { T::lit(1e-16) };
    let four = T::lit(4.0);
    let (mut lo, mut hi) = (start, start);
    let mut p_lo = power_at(start)?;
    let mut p_hi = p_lo;
    let mut steps = 0;
    while p_hi > reference_power || p_lo < reference_power {
        steps += 1;
        if steps > MAX_BRACKET_STEPS {
            return Err(Error::Calibration {
                reference: reference_power.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                power_lo: p_lo.as_f64(),
                power_hi: p_hi.as_f64(),
            });
        }
        if p_hi > reference_power {
            lo = hi;
            p_lo = p_hi;
            hi = hi * four;
            p_hi = power_at(hi)?;
        } else {
            hi = lo;
            p_hi = p_lo;
            lo = lo / four;
            p_lo = power_at(lo)?;
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if hi / lo - T::one() < T::lit(CALIBRATION_REL_TOL) {
            break;
        }
        let mid = (lo * hi).sqrt();
        if power_at(mid)? > reference_power {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cext = (lo * hi).sqrt();
    let power = power_at(cext)?;
    Ok(done(cext, power, (lo, hi), evaluations))
}

/// Fits a pending calibrated source in place, applying the target's
/// geometry overrides for the fit only. Returns the fit when one ran.
pub fn calibrate_scenario<T: Real>(scenario: &mut Scenario<T>) -> Result<Option<Calibration<T>>> {
    if !scenario.needs_calibration() {
        return Ok(None);
    }
    let target = match scenario.dust.source {
        Some(CextSource::Calibrated { target, .. }) => target,
        _ => unreachable!("needs_calibration checked the source"),
    };
    let mut fit = scenario.clone();
    let g = &mut fit.geometry;
    g.distance = target.distance.unwrap_or(g.distance);
    g.source_height = target.source_height.unwrap_or(g.source_height);
    g.panel_height = target.panel_height.unwrap_or(g.panel_height);
    let cal = calibrate_cext(&fit, target.reference_power)?;
    scenario.dust.source = Some(CextSource::Calibrated {
        target,
        fitted: Some(cal.cext),
    });
    scenario.dust.model.cext = cal.cext;
    Ok(Some(cal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::CalibrationTarget;

    fn dusty() -> Scenario<f64> {
        let mut s = Scenario::<f64>::baseline();
        s.geometry.distance = 20_000.0;
        s.numerics.aperture_resolution = Some(32);
        s.numerics.panel_order = Some(24);
        s
    }

    #[test]
    fn recovers_a_known_cross_section() {
        let mut s = dusty();
        s.dust.enabled = true;
        s.dust.source = Some(CextSource::Explicit(8e-14));
        s.resolve_cext().unwrap();
        let target = panel_power_fixed(&s, 32, 24).unwrap().power;
        let cal = calibrate_cext(&dusty(), target).unwrap();
        assert!((cal.cext / 8e-14 - 1.0).abs() < 2e-3, "{}", cal.cext);
        assert!(cal.bracket.1 / cal.bracket.0 - 1.0 < CALIBRATION_REL_TOL);
    }

    #[test]
    fn larger_reference_gives_smaller_cext() {
        let a = calibrate_cext(&dusty(), 500.0).unwrap().cext;
        let b = calibrate_cext(&dusty(), 700.0).unwrap().cext;
        assert!(b < a);
    }

    #[test]
    fn clear_power_gives_zero() {
        let mut clear = dusty();
        clear.dust.enabled = true;
        clear.dust.source = Some(CextSource::Explicit(0.0));
        let p = panel_power_fixed(&clear, 32, 24).unwrap().power;
        assert_eq!(calibrate_cext(&dusty(), p).unwrap().cext, 0.0);
        assert!(matches!(calibrate_cext(&dusty(), p * 1.01), Err(Error::Calibration { .. })));
        assert!(matches!(calibrate_cext(&dusty(), 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn scenario_fit_uses_target_geometry() {
        let mut s = dusty();
        s.dust.enabled = true;
        s.dust.source = Some(CextSource::Calibrated {
            target: CalibrationTarget {
                reference_power: 900.0,
                distance: Some(5000.0),
                source_height: Some(12.0),
                panel_height: None,
            },
            fitted: None,
        });
        let cal = calibrate_scenario(&mut s).unwrap().unwrap();
        assert!(cal.cext > 0.0);
        assert_eq!(s.geometry.distance, 20_000.0);
        assert_eq!(s.dust.model.cext, cal.cext);
        assert!(!s.needs_calibration());
        assert!(calibrate_scenario(&mut s).unwrap().is_none());
    }
}

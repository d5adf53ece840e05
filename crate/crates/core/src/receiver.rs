//! Power collected by the rectangular receiver panel.
//!
//! The panel spans `x ∈ [-L/2, L/2]` (length, horizontal) and
//! `y ∈ [-W/2, W/2]` (width, in the tilted vertical plane) around the
//! nominal aim point. Irradiance is integrated with a tensor Gauss–Legendre
//! rule. The geometry is mirror symmetric in x, so only the non-negative
//! half of the x nodes is evaluated.

use crate::diffraction::{build_grid_at_least, sampling_resolution, IrradianceMap, Propagator};
use crate::error::{Error, RefinementStep, Result};
use crate::quadrature::{gauss_legendre_on, pairwise_sum, pairwise_sum_by};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::source::{build_aperture_grid, ApertureGrid};

/// Integrated panel quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelResult<T> {
    /// Received power [W].
    pub power: T,
    /// `power / P0`.
    pub efficiency: T,
    /// Irradiance-weighted mean y over the panel [m].
    pub shift_y: T,
    /// Location of the maximum of the x-integrated profile [m].
    pub peak_y: T,
    /// Last relative change of the refinement that produced this result.
    pub rel_change: Option<T>,
    pub aperture_resolution: usize,
    pub panel_order: usize,
}

impl<T: Real> PanelResult<T> {
    pub const CSV_HEADER: &'static str =
        "distance_m,source_height_m,panel_height_m,diameter_m,cext_m2,power_w,efficiency,shift_y_m,peak_y_m,rel_change";

    /// One CSV row matching [`Self::CSV_HEADER`].
    pub fn to_csv_row(&self, scenario: &Scenario<T>) -> String {
        let g = &scenario.geometry;
        let (d, c) = match scenario.active_dust() {
            Some(m) => (m.diameter, m.cext),
            None => (T::zero(), T::zero()),
        };
        let rel = self.rel_change.map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            g.distance,
            g.source_height,
            g.panel_height,
            d,
            c,
            self.power,
            self.efficiency,
            self.shift_y,
            self.peak_y,
            rel
        )
    }
}

/// Panel quadrature on a fixed aperture grid and GL order.
fn integrate_panel<T: Real>(scenario: &Scenario<T>, prop: &Propagator<'_, T>, order: usize) -> Result<PanelResult<T>> {
    let g = &scenario.geometry;
    let two = T::lit(2.0);
    let (xs, wx) = gauss_legendre_on(order, -g.panel_length / two, g.panel_length / two);
    let (ys, wy) = gauss_legendre_on(order, -g.panel_width / two, g.panel_width / two);
    let half = order / 2;
    // x nodes evaluated: indices half..order (ascending, x >= 0).
    let cols = order - half;
    let samples = prop.irradiance_grid(&xs[half..], &ys, scenario.laser.impedance)?;
    let at = |ix: usize, iy: usize| -> T {
        let c = if ix >= half { ix - half } else { order - 1 - ix - half };
        samples[iy * cols + c]
    };
    // x-integrated profile per y node.
    let profile: Vec<T> = (0..order)
        .map(|iy| pairwise_sum_by(order, &|ix: usize| wx[ix] * at(ix, iy)))
        .collect();
    let weighted: Vec<T> = (0..order).map(|iy| wy[iy] * profile[iy]).collect();
    let power = pairwise_sum(&weighted);
    let moment = pairwise_sum_by(order, &|iy: usize| weighted[iy] * ys[iy]);
    let shift_y = if power > T::zero() { moment / power } else { T::zero() };
    Ok(PanelResult {
        power,
        efficiency: scenario.efficiency(power),
        shift_y,
        peak_y: profile_peak(&ys, &profile),
        rel_change: None,
        aperture_resolution: prop.grid().resolution,
        panel_order: order,
    })
}

/// Maximum of sampled `(t, f)` refined by the parabola through its neighbours.
fn profile_peak<T: Real>(t: &[T], f: &[T]) -> T {
    let mut i = 0;
    for k in 1..f.len() {
        if f[k] > f[i] {
            i = k;
        }
    }
    if i == 0 || i + 1 == f.len() {
        return t[i];
    }
    let (x0, x1, x2) = (t[i - 1], t[i], t[i + 1]);
    let (y0, y1, y2) = (f[i - 1], f[i], f[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < T::zero()) {
        return x1;
    }
    let b = d01 - a * (x0 + x1);
    let v = -b / (two_t::<T>() * a);
    v.max(x0).min(x2)
}

fn two_t<T: Real>() -> T {
    T::lit(2.0)
}

fn rel_change<T: Real>(new: T, old: T) -> T {
    let scale = new.abs().max(old.abs());
    if scale > T::zero() {
        (new - old).abs() / scale
    } else {
        T::zero()
    }
}

/// One evaluation at aperture resolution `resolution` and GL order `order`.
/// Bit-reproducible for fixed inputs.
pub fn panel_power_fixed<T: Real>(scenario: &Scenario<T>, resolution: usize, order: usize) -> Result<PanelResult<T>> {
    scenario.validate()?;
    let grid = build_aperture_grid(&scenario.laser, resolution)?;
    let prop = Propagator::from_scenario(&grid, scenario)?;
    integrate_panel(scenario, &prop, order)
}

/// Doubles the GL order from `numerics.initial_panel_order` on a fixed grid
/// until the relative power change drops below `numerics.target_rel`.
pub fn panel_power_on_grid<T: Real>(scenario: &Scenario<T>, grid: &ApertureGrid<T>) -> Result<PanelResult<T>> {
    let num = &scenario.numerics;
    let prop = Propagator::from_scenario(grid, scenario)?;
    let mut order = num.initial_panel_order;
    let mut prev = integrate_panel(scenario, &prop, order)?;
    let mut history = vec![step(&prev, f64::NAN)];
    while order * 2 <= num.max_panel_order {
        order *= 2;
        let mut next = integrate_panel(scenario, &prop, order)?;
        let rel = rel_change(next.power, prev.power);
        history.push(step(&next, rel.as_f64()));
        next.rel_change = Some(rel);
        if rel < num.target_rel {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Convergence {
        message: format!("panel quadrature did not converge by order {}", num.max_panel_order),
        last: last_two(&history),
        history,
    })
}

fn step<T: Real>(r: &PanelResult<T>, rel: f64) -> RefinementStep {
    RefinementStep {
        aperture_resolution: r.aperture_resolution,
        panel_order: r.panel_order,
        power: r.power.as_f64(),
        rel_change: rel,
    }
}

fn last_two(h: &[RefinementStep]) -> Option<(f64, f64)> {
    match h {
        [.., a, b] => Some((a.power, b.power)),
        _ => None,
    }
}

/// Numerics selected by [`converge`] and the result they produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedNumerics<T> {
    pub aperture_resolution: usize,
    pub panel_order: usize,
    /// Relative change of the accepted step.
    pub delta: T,
    pub history: Vec<RefinementStep>,
    pub result: PanelResult<T>,
}

/// Aperture resolution required by the phase-step rule for the whole panel.
pub fn panel_sampling_resolution<T: Real>(scenario: &Scenario<T>) -> usize {
    let g = &scenario.geometry;
    let two = T::lit(2.0);
    let (hx, hy) = (g.panel_length / two, g.panel_width / two);
    let rho = (hx * hx + hy * hy).sqrt() + scenario.laser.aperture_radius;
    sampling_resolution(&scenario.laser, rho, g.distance)
}

/// Refines panel order, then aperture resolution, until successive powers
/// agree to `numerics.target_rel`.
///
/// The panel order is settled on the starting grid; the aperture grid is
/// then doubled at that order.
pub fn converge<T: Real>(scenario: &Scenario<T>) -> Result<ConvergedNumerics<T>> {
    scenario.validate()?;
    let num = &scenario.numerics;
    let max_n = num.max_aperture_resolution;
    let start = panel_sampling_resolution(scenario).max(num.aperture_resolution.unwrap_or(0));
    if start > max_n {
        return Err(Error::Resolution(format!(
            "sampling rule needs aperture resolution {start}, above the limit {max_n}"
        )));
    }
    let grid = build_grid_at_least(&scenario.laser, start, max_n)?;
    let mut history = Vec::new();
    let mut prev = panel_power_on_grid(scenario, &grid)?;
    let order = prev.panel_order;
    history.push(step(&prev, f64::NAN));
    let mut n = grid.resolution;
    while n * 2 <= max_n {
        n *= 2;
        let mut next = panel_power_fixed(scenario, n, order)?;
        let rel = rel_change(next.power, prev.power);
        history.push(step(&next, rel.as_f64()));
        next.rel_change = Some(rel);
        if rel < num.target_rel {
            return Ok(ConvergedNumerics {
                aperture_resolution: n,
                panel_order: order,
                delta: rel,
                history,
                result: next,
            });
        }
        prev = next;
    }
    Err(Error::Convergence {
        message: format!("aperture refinement did not converge by resolution {max_n}"),
        last: last_two(&history),
        history,
    })
}

/// Numerics chosen for a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settled<T> {
    pub aperture_resolution: usize,
    pub panel_order: usize,
    /// Relative change of the accepted refinement; `None` when fixed by
    /// configuration.
    pub delta: Option<T>,
}

/// Aperture resolution and panel order for `scenario`: the configured
/// values where both are fixed, otherwise settled on the dust-free variant.
pub fn resolve_numerics<T: Real>(scenario: &Scenario<T>) -> Result<Settled<T>> {
    let num = &scenario.numerics;
    let clear = scenario.without_dust();
    match (num.aperture_resolution, num.panel_order) {
        (Some(n), Some(m)) => Ok(Settled { aperture_resolution: n, panel_order: m, delta: None }),
        (Some(n), None) => {
            clear.validate()?;
            let grid = build_aperture_grid(&clear.laser, n)?;
            let r = panel_power_on_grid(&clear, &grid)?;
            Ok(Settled { aperture_resolution: n, panel_order: r.panel_order, delta: r.rel_change })
        }
        _ => converge(&clear).map(|c| Settled {
            aperture_resolution: c.aperture_resolution,
            panel_order: c.panel_order,
            delta: Some(c.delta),
        }),
    }
}

/// Received power with the numerics requested by the scenario: fixed when
/// both resolutions are set, panel refinement only when the aperture is
/// fixed, full convergence otherwise.
pub fn panel_power<T: Real>(scenario: &Scenario<T>) -> Result<PanelResult<T>> {
    let num = &scenario.numerics;
    match (num.aperture_resolution, num.panel_order) {
        (Some(n), Some(m)) => panel_power_fixed(scenario, n, m),
        (Some(n), None) => {
            scenario.validate()?;
            let grid = build_aperture_grid(&scenario.laser, n)?;
            panel_power_on_grid(scenario, &grid)
        }
        _ => converge(scenario).map(|c| c.result),
    }
}

/// Irradiance-weighted centroid `(x, y)` of the map inside the centred
/// window of half-widths `window`.
pub fn map_centroid<T: Real>(map: &IrradianceMap<T>, window: (T, T)) -> Result<(T, T)> {
    let mut total = T::zero();
    let mut mx = T::zero();
    let mut my = T::zero();
    for (iy, &y) in map.ys.iter().enumerate() {
        if y.abs() > window.1 {
            continue;
        }
        for (ix, &x) in map.xs.iter().enumerate() {
            if x.abs() > window.0 {
                continue;
            }
            let v = map.value(ix, iy);
            total = total + v;
            mx = mx + v * x;
            my = my + v * y;
        }
    }
    if !(total > T::zero()) {
        return Err(Error::DegenerateMap("no irradiance inside the centroid window".into()));
    }
    Ok((mx / total, my / total))
}

/// Vertical beam shift: centroid y of the map over its full extent.
pub fn beam_shift<T: Real>(map: &IrradianceMap<T>) -> Result<T> {
    map_centroid(map, map.extent).map(|c| c.1)
}

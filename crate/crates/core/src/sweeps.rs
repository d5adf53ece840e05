//! Experiment drivers: parameter grids over the panel-power model.
//!
//! A sweep is the Cartesian product of its axes applied to a base scenario.
//! Numerics are settled once per distance on the dust-free variant and
//! shared by every cell at that distance, so cells that differ only in
//! heights or particle size are evaluated on identical grids. Cells run on
//! a bounded worker pool and rows are reported in grid order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::calibrate::{calibrate_scenario, Calibration};
use crate::config::{config_hash, to_config_json};
use crate::diffraction::{compute_irradiance_map, write_map_files, IrradianceMap, MapFiles};
use crate::error::{Error, Result};
use crate::geometry::PathPoint;
use crate::phase::phase_excess;
use crate::receiver::{beam_shift, panel_power_fixed, resolve_numerics, PanelResult};
use crate::scenario::Scenario;

pub use crate::receiver::{converge, ConvergedNumerics};

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKind {
    Distance,
    HeightMap,
    PanelHeight,
    ParticleSize,
    IrradianceMaps,
    Fig4Comparison,
}

impl SweepKind {
    pub const ALL: [SweepKind; 6] = [
        SweepKind::Distance,
        SweepKind::HeightMap,
        SweepKind::PanelHeight,
        SweepKind::ParticleSize,
        SweepKind::IrradianceMaps,
        SweepKind::Fig4Comparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Distance => "distance",
            SweepKind::HeightMap => "height_map",
            SweepKind::PanelHeight => "panel_height",
            SweepKind::ParticleSize => "particle_size",
            SweepKind::IrradianceMaps => "irradiance_maps",
            SweepKind::Fig4Comparison => "fig4_comparison",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sweep kind {s:?}")))
    }

    fn needs_dust(self) -> bool {
        matches!(self, SweepKind::ParticleSize | SweepKind::Fig4Comparison)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Distance,
    SourceHeight,
    PanelHeight,
    Diameter,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Distance => "distance",
            Axis::SourceHeight => "source_height",
            Axis::PanelHeight => "panel_height",
            Axis::Diameter => "diameter",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Axis::Distance, Axis::SourceHeight, Axis::PanelHeight, Axis::Diameter]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sweep axis {s:?}")))
    }
}

/// Values taken by one swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisValues {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl AxisValues {
    pub fn list(axis: Axis, values: Vec<f64>) -> Self {
        Self { axis, values }
    }

    /// `start, start + step, …` up to `stop` inclusive. Values are formed
    /// as `start + i·step` so that grids do not accumulate rounding.
    pub fn range(axis: Axis, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bad range for {}: {start}..={stop} step {step}",
                axis.name()
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(Self {
            axis,
            values: (0..count).map(|i| start + i as f64 * step).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub axes: Vec<AxisValues>,
    pub base: Scenario<f64>,
}

fn km(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v * 1e3).collect()
}

impl SweepSpec {
    /// The default grid for `kind` over `base`.
    pub fn default_for(kind: SweepKind, base: Scenario<f64>) -> Self {
        let distance = || AxisValues::range(Axis::Distance, 1e3, 50e3, 1e3).unwrap();
        let mut base = base;
        let axes = match kind {
            SweepKind::Distance | SweepKind::Fig4Comparison => vec![distance()],
            SweepKind::HeightMap => vec![
                AxisValues::range(Axis::SourceHeight, 2.0, 12.0, 0.5).unwrap(),
                distance(),
            ],
            SweepKind::PanelHeight => {
                base.geometry.distance = 50e3;
                base.geometry.source_height = 10.0;
                vec![AxisValues::range(Axis::PanelHeight, 2.0, 12.0, 0.5).unwrap()]
            }
            SweepKind::ParticleSize => vec![
                AxisValues::range(Axis::Diameter, 0.0, 300e-9, 25e-9).unwrap(),
                AxisValues::list(Axis::Distance, km(&[5.0, 20.0, 50.0])),
            ],
            SweepKind::IrradianceMaps => {
                base.geometry.source_height = 2.0;
                base.geometry.panel_height = 2.0;
                vec![
                    AxisValues::list(Axis::Distance, km(&[5.0, 20.0, 50.0])),
                    AxisValues::list(Axis::Diameter, vec![175e-9, 250e-9]),
                ]
            }
        };
        Self { kind, axes, base }
    }

    /// Replaces (or adds) the values of one axis.
    pub fn with_axis(mut self, values: AxisValues) -> Self {
        match self.axes.iter_mut().find(|a| a.axis == values.axis) {
            Some(a) => *a = values,
            None => self.axes.push(values),
        }
        self
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.iter().any(|a| a.values.is_empty()) {
            return Err(Error::InvalidArgument("sweep axes must be non-empty".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|b| b.axis == a.axis) {
                return Err(Error::InvalidArgument(format!("axis {} given twice", a.axis.name())));
            }
        }
        if self.kind.needs_dust() && (!self.base.dust.enabled || self.base.dust.source.is_none()) {
            return Err(Error::validation(
                "dust.cext_source",
                format!(
                    "the {} sweep needs enabled dust with a C_ext source; one of \"mie\", \"calibrated\", \"explicit\"",
                    self.kind.name()
                ),
            ));
        }
        self.base.validate()?;
        for idx in 0..self.cell_count() {
            let params = self.params(idx);
            apply(&self.base, &self.axes, &params)?.validate()?;
        }
        Ok(())
    }

    /// Axis values of cell `idx`; the last axis varies fastest.
    pub fn params(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.values[rest % a.values.len()];
            rest /= a.values.len();
        }
        out
    }
}

fn apply(base: &Scenario<f64>, axes: &[AxisValues], params: &[f64]) -> Result<Scenario<f64>> {
    let mut s = base.clone();
    for (a, &v) in axes.iter().zip(params) {
        match a.axis {
            Axis::Distance => s.geometry.distance = v,
            Axis::SourceHeight => s.geometry.source_height = v,
            Axis::PanelHeight => s.geometry.panel_height = v,
            Axis::Diameter => s = s.with_diameter(v)?,
        }
    }
    Ok(s)
}

/// Power carried by the single centre ray: `P0 · exp(−2 Im Φ)`.
/// Pure extinction along the ray, no diffraction.
pub fn center_to_center_power(scenario: &Scenario<f64>) -> Result<f64> {
    scenario.validate()?;
    let g = &scenario.geometry;
    let src = PathPoint::on_aperture(0.0, 0.0);
    let dst = PathPoint::new(0.0, 0.0, g.distance);
    let excess = phase_excess(&src, &dst, g, scenario.active_dust(), scenario.laser.wavelength)?;
    Ok(scenario.laser.power * (-2.0 * excess.extinction).exp())
}

/// Quantities computed for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellData {
    pub result: PanelResult<f64>,
    pub cext: f64,
    /// Comparison baselines: centre ray and dust-free diffraction power [W].
    pub center_to_center: Option<f64>,
    pub no_dust_power: Option<f64>,
    /// Centroid shift of the irradiance map [m].
    pub map_shift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub params: Vec<f64>,
    pub scenario: Scenario<f64>,
    pub outcome: std::result::Result<CellData, String>,
}

/// Numerics shared by all cells at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupNumerics {
    pub distance: f64,
    pub aperture_resolution: usize,
    pub panel_order: usize,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub maps: Vec<(usize, IrradianceMap<f64>)>,
    pub numerics: Vec<GroupNumerics>,
    pub calibration: Option<Calibration<f64>>,
    pub config_hash: String,
    pub version: &'static str,
    pub workers: usize,
    pub wall_time: Duration,
}

fn eval_cell(
    kind: SweepKind,
    s: &Scenario<f64>,
    num: Option<GroupNumerics>,
) -> std::result::Result<(CellData, Option<IrradianceMap<f64>>), Error> {
    let num = num.ok_or_else(|| Error::Numerical("no converged numerics for this distance".into()))?;
    let (n, m) = (num.aperture_resolution, num.panel_order);
    let mut result = panel_power_fixed(s, n, m)?;
    result.rel_change = num.delta;
    let mut data = CellData {
        result,
        cext: s.active_dust().map(|d| d.cext).unwrap_or(0.0),
        center_to_center: None,
        no_dust_power: None,
        map_shift: None,
    };
    let mut map = None;
    match kind {
        SweepKind::Fig4Comparison => {
            data.center_to_center = Some(center_to_center_power(s)?);
            data.no_dust_power = Some(panel_power_fixed(&s.without_dust(), n, m)?.power);
        }
        SweepKind::IrradianceMaps => {
            let f = s.numerics.map_extent_factor;
            let extent = (f * s.geometry.panel_length / 2.0, f * s.geometry.panel_width / 2.0);
            let mut ms = s.clone();
            ms.numerics.aperture_resolution = Some(n);
            let mp = compute_irradiance_map(&ms, extent, s.numerics.map_resolution)?;
            data.map_shift = Some(beam_shift(&mp)?);
            map = Some(mp);
        }
        _ => {}
    }
    Ok((data, map))
}

fn with_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        b = b.num_threads(workers);
    }
    let pool = b
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every cell of `spec`. Fails only when the spec is invalid or every
/// cell fails; individual failures are kept in their rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let start = Instant::now();
    spec.validate()?;
    let workers = spec.base.numerics.workers;
    let mut base = spec.base.clone();
    let calibration = calibrate_scenario(&mut base)?;
    let cells: Vec<(Vec<f64>, Scenario<f64>)> = (0..spec.cell_count())
        .map(|i| {
            let p = spec.params(i);
            apply(&base, &spec.axes, &p).map(|s| (p, s))
        })
        .collect::<Result<_>>()?;

    with_pool(workers, || {
        // One representative cell per distance, in first-appearance order.
        let mut groups: BTreeMap<u64, usize> = BTreeMap::new();
        for (i, (_, s)) in cells.iter().enumerate() {
            groups.entry(s.geometry.distance.to_bits()).or_insert(i);
        }
        let reps: Vec<(u64, usize)> = groups.into_iter().collect();
        let settled: Vec<(u64, Result<GroupNumerics>)> = reps
            .par_iter()
            .map(|&(key, i)| {
                let s = &cells[i].1;
                let r = resolve_numerics(s).map(|c| GroupNumerics {
                    distance: s.geometry.distance,
                    aperture_resolution: c.aperture_resolution,
                    panel_order: c.panel_order,
                    delta: c.delta,
                });
                (key, r)
            })
            .collect();
        let mut lookup = BTreeMap::new();
        let mut numerics = Vec::new();
        let mut group_errors = BTreeMap::new();
        for (key, r) in settled {
            match r {
                Ok(g) => {
                    lookup.insert(key, g);
                    numerics.push(g);
                }
                Err(e) => {
                    group_errors.insert(key, e.to_string());
                }
            }
        }
        let evaluated: Vec<_> = cells
            .par_iter()
            .map(|(_, s)| {
                let key = s.geometry.distance.to_bits();
                match group_errors.get(&key) {
                    Some(msg) => Err(msg.clone()),
                    None => eval_cell(spec.kind, s, lookup.get(&key).copied()).map_err(|e| e.to_string()),
                }
            })
            .collect();
        let mut rows = Vec::with_capacity(cells.len());
        let mut maps = Vec::new();
        for (index, ((params, scenario), out)) in cells.iter().zip(evaluated).enumerate() {
            let outcome = out.map(|(data, map)| {
                if let Some(m) = map {
                    maps.push((index, m));
                }
                data
            });
            rows.push(SweepRow {
                index,
                params: params.clone(),
                scenario: scenario.clone(),
                outcome,
            });
        }
        (rows, maps, numerics)
    })
    .and_then(|(rows, maps, numerics)| {
        if rows.iter().all(|r| r.outcome.is_err()) {
            let first = rows.first().and_then(|r| r.outcome.clone().err()).unwrap_or_default();
            return Err(Error::Numerical(format!("every sweep cell failed; first: {first}")));
        }
        Ok(SweepResult {
            spec: spec.clone(),
            rows,
            maps,
            numerics,
            calibration,
            config_hash: config_hash(&base),
            version: VERSION,
            workers,
            wall_time: start.elapsed(),
        })
    })
}

fn csv_field(msg: &str) -> String {
    msg.replace([',', '\n', '\r'], ";")
}

impl SweepResult {
    pub fn csv_header(&self) -> String {
        let mut h = String::from("cell");
        for a in &self.spec.axes {
            write!(h, ",sweep_{}", a.axis.name()).unwrap();
        }
        write!(h, ",{}", PanelResult::<f64>::CSV_HEADER).unwrap();
        match self.spec.kind {
            SweepKind::Fig4Comparison => h.push_str(",center_to_center_w,no_dust_power_w"),
            SweepKind::IrradianceMaps => h.push_str(",map_shift_y_m"),
            _ => {}
        }
        h.push_str(",status");
        h
    }

    /// CSV document; depends only on the spec and the computed values.
    pub fn to_csv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str(&self.csv_header());
            out.push('\n');
        }
        let receiver_cols = PanelResult::<f64>::CSV_HEADER.split(',').count();
        let extra_cols = match self.spec.kind {
            SweepKind::Fig4Comparison => 2,
            SweepKind::IrradianceMaps => 1,
            _ => 0,
        };
        for row in &self.rows {
            write!(out, "{}", row.index).unwrap();
            for p in &row.params {
                write!(out, ",{p}").unwrap();
            }
            match &row.outcome {
                Ok(d) => {
                    write!(out, ",{}", d.result.to_csv_row(&row.scenario)).unwrap();
                    match self.spec.kind {
                        SweepKind::Fig4Comparison => write!(
                            out,
                            ",{},{}",
                            d.center_to_center.unwrap_or(f64::NAN),
                            d.no_dust_power.unwrap_or(f64::NAN)
                        )
                        .unwrap(),
                        SweepKind::IrradianceMaps => {
                            write!(out, ",{}", d.map_shift.unwrap_or(f64::NAN)).unwrap()
                        }
                        _ => {}
                    }
                    out.push_str(",ok\n");
                }
                Err(msg) => {
                    out.push_str(&",".repeat(receiver_cols + extra_cols));
                    writeln!(out, ",error: {}", csv_field(msg)).unwrap();
                }
            }
        }
        out
    }

    pub fn manifest(&self) -> String {
        let mut m = String::new();
        writeln!(m, "lunabeam {}", self.version).unwrap();
        writeln!(m, "sweep {}", self.spec.kind.name()).unwrap();
        writeln!(m, "cells {}", self.rows.len()).unwrap();
        writeln!(m, "failed_cells {}", self.rows.iter().filter(|r| r.outcome.is_err()).count()).unwrap();
        writeln!(m, "config_sha256 {}", self.config_hash).unwrap();
        writeln!(m, "workers {}", self.workers).unwrap();
        writeln!(m, "wall_time_s {:.3}", self.wall_time.as_secs_f64()).unwrap();
        if let Some(c) = &self.calibration {
            writeln!(m, "calibrated_cext_m2 {} (power {} W, {} evaluations)", c.cext, c.power, c.evaluations).unwrap();
        }
        for a in &self.spec.axes {
            let v: Vec<String> = a.values.iter().map(|x| x.to_string()).collect();
            writeln!(m, "axis {} {}", a.axis.name(), v.join(" ")).unwrap();
        }
        for g in &self.numerics {
            writeln!(
                m,
                "numerics distance {} aperture_resolution {} panel_order {} delta {}",
                g.distance,
                g.aperture_resolution,
                g.panel_order,
                g.delta.map(|d| d.to_string()).unwrap_or_else(|| "fixed".into())
            )
            .unwrap();
        }
        m.push_str("config\n");
        let mut base = self.spec.base.clone();
        if let Some(c) = &self.calibration {
            if let Some(crate::scenario::CextSource::Calibrated { fitted, .. }) = &mut base.dust.source {
                *fitted = Some(c.cext);
            }
        }
        m.push_str(&to_config_json(&base));
        m.push('\n');
        m
    }
}

/// Paths written by [`write_sweep`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepFiles {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub maps: Vec<MapFiles>,
}

/// Writes `<stem>.csv`, `<stem>.manifest.txt` and one map file set per
/// irradiance map into `dir`.
pub fn write_sweep(result: &SweepResult, dir: &Path, stem: &str, header: bool) -> Result<SweepFiles> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, result.to_csv(header))?;
    let manifest = dir.join(format!("{stem}.manifest.txt"));
    std::fs::write(&manifest, result.manifest())?;
    let mut maps = Vec::new();
    for (index, map) in &result.maps {
        let row = &result.rows[*index];
        let g = &row.scenario.geometry;
        let d_nm = row.scenario.dust.model.diameter * 1e9;
        let name = format!("{stem}_map_D{}m_d{}nm_h{}m", g.distance, d_nm.round(), g.source_height);
        maps.push(write_map_files(map, dir, &name)?);
    }
    Ok(SweepFiles { csv, manifest, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::CextSource;

    fn dusty() -> Scenario<f64> {
        let mut s = Scenario::<f64>::baseline();
        s.dust.enabled = true;
        s.dust.source = Some(CextSource::Explicit(5e-14));
        s.resolve_cext().unwrap();
        s
    }

    #[test]
    fn ranges_are_inclusive_and_exact() {
        let a = AxisValues::range(Axis::SourceHeight, 2.0, 12.0, 0.5).unwrap();
        assert_eq!(a.values.len(), 21);
        assert_eq!(a.values[20], 12.0);
        let d = AxisValues::range(Axis::Diameter, 0.0, 300e-9, 25e-9).unwrap();
        assert_eq!(d.values.len(), 13);
        assert!(AxisValues::range(Axis::Distance, 5.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn default_grids() {
        let b = Scenario::<f64>::baseline();
        assert_eq!(SweepSpec::default_for(SweepKind::Distance, b.clone()).cell_count(), 50);
        assert_eq!(SweepSpec::default_for(SweepKind::HeightMap, b.clone()).cell_count(), 21 * 50);
        assert_eq!(SweepSpec::default_for(SweepKind::PanelHeight, b.clone()).cell_count(), 21);
        assert_eq!(SweepSpec::default_for(SweepKind::ParticleSize, b.clone()).cell_count(), 39);
        assert_eq!(SweepSpec::default_for(SweepKind::IrradianceMaps, b).cell_count(), 6);
    }

    #[test]
    fn cell_params_last_axis_fastest() {
        let spec = SweepSpec::default_for(SweepKind::HeightMap, Scenario::baseline());
        assert_eq!(spec.params(0), vec![2.0, 1000.0]);
        assert_eq!(spec.params(1), vec![2.0, 2000.0]);
        assert_eq!(spec.params(50), vec![2.5, 1000.0]);
    }

    #[test]
    fn dust_sweeps_refuse_missing_source() {
        let spec = SweepSpec::default_for(SweepKind::Fig4Comparison, Scenario::baseline());
        let e = spec.validate().unwrap_err().to_string();
        assert!(e.contains("mie") && e.contains("calibrated") && e.contains("explicit"), "{e}");
    }

    #[test]
    fn center_to_center_examples() {
        let clear = Scenario::<f64>::baseline();
        assert_eq!(center_to_center_power(&clear).unwrap(), 1000.0);
        let mut s = dusty();
        s.geometry.distance = 20_000.0;
        let d = s.dust.model;
        let expected = 1000.0 * (-2.0 * d.cext * d.particle_density(2.0).unwrap() * 20_000.0).exp();
        let got = center_to_center_power(&s).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12, "{got} {expected}");
        s.geometry.distance = 1e-6;
        assert!((center_to_center_power(&s).unwrap() - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn small_sweep_runs_and_keeps_failed_cells() {
        let mut base = Scenario::<f64>::baseline();
        base.numerics.max_aperture_resolution = 128;
        let spec = SweepSpec::default_for(SweepKind::Distance, base)
            .with_axis(AxisValues::list(Axis::Distance, vec![2000.0, 20_000.0, 40_000.0]));
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 3);
        // 2 km needs a finer aperture grid than the ceiling allows.
        assert!(r.rows[0].outcome.is_err());
        let e1 = r.rows[1].outcome.as_ref().unwrap().result.efficiency;
        let e2 = r.rows[2].outcome.as_ref().unwrap().result.efficiency;
        assert!(e1 > e2);
        let csv = r.to_csv(true);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        let width = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == width));
        assert!(lines[1].contains("error"));
        assert!(r.manifest().contains(&r.config_hash));
    }

    #[test]
    fn sweep_fails_when_every_cell_fails() {
        let mut base = Scenario::<f64>::baseline();
        base.numerics.max_aperture_resolution = 64;
        let spec = SweepSpec::default_for(SweepKind::Distance, base)
            .with_axis(AxisValues::list(Axis::Distance, vec![1000.0, 2000.0]));
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn fig4_rows_carry_baselines() {
        let spec = SweepSpec::default_for(SweepKind::Fig4Comparison, dusty())
            .with_axis(AxisValues::list(Axis::Distance, vec![10_000.0]));
        let r = run_sweep(&spec).unwrap();
        let d = r.rows[0].outcome.as_ref().unwrap();
        assert!(d.result.power <= d.center_to_center.unwrap());
        assert!(d.result.power <= d.no_dust_power.unwrap());
    }
}

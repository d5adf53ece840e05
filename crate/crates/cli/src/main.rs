use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lunabeam_core::calibrate::{calibrate_cext, calibrate_scenario};
use lunabeam_core::config::parse_and_validate_with_overrides;
use lunabeam_core::diffraction::{compute_irradiance_map, write_map_files};
use lunabeam_core::dust::{mie_scattering, rayleigh_cross_section};
use lunabeam_core::receiver::{beam_shift, panel_power, PanelResult};
use lunabeam_core::scenario::OUTPUT_DIR_ENV;
use lunabeam_core::sweeps::{run_sweep, write_sweep, Axis, AxisValues, SweepKind, SweepSpec};
use lunabeam_core::validate::{run_validation, ValidationOptions};
use lunabeam_core::{Complex, Error, Result, ScenarioF64};
use serde_json::{Map, Value};

/// Lunar ground-to-ground laser power beaming simulator.
#[derive(Debug, Parser)]
#[command(name = "lunabeam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Received panel power for one scenario, as a CSV row.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Omit the CSV header line.
        #[arg(long)]
        no_header: bool,
    },
    /// Run a parameter sweep and write CSV, manifest and map files.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// distance | height_map | panel_height | particle_size | irradiance_maps | fig4_comparison
        #[arg(long)]
        kind: String,
        /// Replace an axis: `name=start:stop:step` or `name=v1,v2,...`
        /// (names: distance, source_height, panel_height, diameter).
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        /// File stem for outputs (defaults to the sweep kind).
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        no_header: bool,
    },
    /// Irradiance map over the panel plane (CSV + 16-bit PGM).
    Map {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Samples per axis.
        #[arg(long)]
        resolution: Option<usize>,
        /// Map half-width as a multiple of the panel half-width.
        #[arg(long)]
        extent_factor: Option<f64>,
        #[arg(long, default_value = "map")]
        name: String,
    },
    /// Mie extinction of a single sphere, as CSV.
    Mie {
        #[arg(long, default_value_t = 175e-9)]
        diameter: f64,
        #[arg(long, default_value_t = 1064e-9)]
        wavelength: f64,
        /// Real part of the particle index.
        #[arg(long, default_value_t = 1.733)]
        index: f64,
        /// Imaginary part of the particle index.
        #[arg(long, default_value_t = 0.0)]
        index_imag: f64,
        #[arg(long)]
        no_header: bool,
    },
    /// Fit C_ext so the scenario's panel power equals a reference.
    Calibrate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Target panel power [W].
        #[arg(long)]
        reference_power: Option<f64>,
        /// Target efficiency (alternative to --reference-power).
        #[arg(long, conflicts_with = "reference_power")]
        reference_efficiency: Option<f64>,
    },
    /// Run the oracle suite; exits non-zero when a check fails.
    Validate {
        #[arg(long, default_value_t = 1000)]
        rays: usize,
        #[arg(long, default_value_t = ValidationOptions::default().seed)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// JSON configuration file, or `default` for the built-in defaults.
    #[arg(long, default_value = "default")]
    config: String,
    /// Source–panel distance [m].
    #[arg(long)]
    distance: Option<f64>,
    /// Laser source height [m].
    #[arg(long)]
    source_height: Option<f64>,
    /// Panel centre height [m].
    #[arg(long)]
    panel_height: Option<f64>,
    /// Dust particle diameter [m].
    #[arg(long)]
    diameter: Option<f64>,
    /// Extinction cross-section [m²]; enables dust with an explicit source.
    #[arg(long)]
    cext: Option<f64>,
    /// mie | calibrated | explicit; enables dust.
    #[arg(long)]
    cext_source: Option<String>,
    /// Enable dust (needs a C_ext source from config or flags).
    #[arg(long, conflicts_with = "no_dust")]
    dust: bool,
    /// Propagate in free space.
    #[arg(long)]
    no_dust: bool,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Any configuration key: `key=value` with a JSON value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ScenarioArgs {
    fn overrides(&self) -> Result<Map<String, Value>> {
        let mut o = Map::new();
        let mut put = |k: &str, v: Value| {
            o.insert(k.to_string(), v);
        };
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got {item:?}")))?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            put(k, value);
        }
        if let Some(v) = self.distance {
            put("geometry.distance", v.into());
        }
        if let Some(v) = self.source_height {
            put("geometry.source_height", v.into());
        }
        if let Some(v) = self.panel_height {
            put("geometry.panel_height", v.into());
        }
        if let Some(v) = self.diameter {
            put("dust.diameter", v.into());
        }
        if let Some(v) = self.cext {
            put("dust.cext", v.into());
            if self.cext_source.is_none() {
                put("dust.cext_source", "explicit".into());
            }
            put("dust.enabled", true.into());
        }
        if let Some(v) = &self.cext_source {
            put("dust.cext_source", v.as_str().into());
            put("dust.enabled", true.into());
        }
        if self.dust {
            put("dust.enabled", true.into());
        }
        if self.no_dust {
            put("dust.enabled", false.into());
        }
        if let Some(v) = self.workers {
            put("numerics.workers", (v as u64).into());
        }
        if let Some(v) = &self.out {
            put("outputs.directory", v.to_string_lossy().into_owned().into());
        }
        Ok(o)
    }

    fn scenario(&self) -> Result<ScenarioF64> {
        let text = if self.config == "default" {
            String::new()
        } else {
            std::fs::read_to_string(&self.config)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", self.config))))?
        };
        let s = parse_and_validate_with_overrides(&text, self.overrides()?)?;
        set_workers(s.numerics.workers);
        Ok(s)
    }
}

fn set_workers(workers: usize) {
    if workers > 0 {
        // Only the first call can size the global pool; later calls are no-ops.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
}

fn parse_axis(spec: &str) -> Result<AxisValues> {
    let bad = || Error::InvalidArgument(format!("bad axis {spec:?}; use name=start:stop:step or name=v1,v2"));
    let (name, rest) = spec.split_once('=').ok_or_else(bad)?;
    let axis = Axis::parse(name)?;
    let nums = |s: &str| -> Result<Vec<f64>> {
        s.split([',', ':'])
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    };
    if rest.contains(':') {
        match nums(rest)?.as_slice() {
            [a, b, c] => AxisValues::range(axis, *a, *b, *c),
            _ => Err(bad()),
        }
    } else {
        Ok(AxisValues::list(axis, nums(rest)?))
    }
}

fn prepared(args: &ScenarioArgs) -> Result<ScenarioF64> {
    let mut s = args.scenario()?;
    if let Some(c) = calibrate_scenario(&mut s)? {
        eprintln!("calibrated C_ext = {} m² ({} evaluations)", c.cext, c.evaluations);
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate { scenario, no_header } => {
            let s = prepared(&scenario)?;
            let r = panel_power(&s)?;
            if !no_header {
                println!("{}", PanelResult::<f64>::CSV_HEADER);
            }
            println!("{}", r.to_csv_row(&s));
        }
        Command::Sweep { scenario, kind, axes, name, no_header } => {
            let base = scenario.scenario()?;
            let kind = SweepKind::parse(&kind)?;
            let mut spec = SweepSpec::default_for(kind, base);
            for a in &axes {
                spec = spec.with_axis(parse_axis(a)?);
            }
            let result = run_sweep(&spec)?;
            let dir = spec.base.outputs.directory.clone();
            let files = write_sweep(&result, &dir, name.as_deref().unwrap_or(kind.name()), !no_header)?;
            let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
            eprintln!("{} cells ({failed} failed) in {:.1} s", result.rows.len(), result.wall_time.as_secs_f64());
            println!("{}", files.csv.display());
            println!("{}", files.manifest.display());
            for m in &files.maps {
                println!("{}", m.pgm.display());
            }
        }
        Command::Map { scenario, resolution, extent_factor, name } => {
            let s = prepared(&scenario)?;
            let f = extent_factor.unwrap_or(s.numerics.map_extent_factor);
            let g = &s.geometry;
            let extent = (f * g.panel_length / 2.0, f * g.panel_width / 2.0);
            let map = compute_irradiance_map(&s, extent, resolution.unwrap_or(s.numerics.map_resolution))?;
            let files = write_map_files(&map, &s.outputs.directory, &name)?;
            eprintln!("centroid shift_y = {} m, peak = {} W/m²", beam_shift(&map)?, map.max());
            println!("{}", files.csv.display());
            println!("{}", files.pgm.display());
            println!("{}", files.scale.display());
        }
        Command::Mie { diameter, wavelength, index, index_imag, no_header } => {
            let r = mie_scattering(diameter, wavelength, Complex::new(index, index_imag), None)?;
            let rayleigh = rayleigh_cross_section(diameter, wavelength, index)?;
            if !no_header {
                println!("diameter_m,wavelength_m,size_parameter,cext_m2,csca_m2,qext,qsca,terms,rayleigh_m2");
            }
            println!(
                "{diameter},{wavelength},{},{},{},{},{},{},{rayleigh}",
                r.size_parameter, r.cext, r.csca, r.qext, r.qsca, r.terms
            );
        }
        Command::Calibrate { scenario, reference_power, reference_efficiency } => {
            let s = scenario.scenario()?;
            let reference = match (reference_power, reference_efficiency) {
                (Some(p), _) => p,
                (None, Some(e)) => e * s.laser.power,
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "calibrate needs --reference-power or --reference-efficiency".into(),
                    ))
                }
            };
            let c = calibrate_cext(&s, reference)?;
            println!("cext_m2,power_w,efficiency,evaluations,aperture_resolution,panel_order");
            println!(
                "{},{},{},{},{},{}",
                c.cext,
                c.power,
                s.efficiency(c.power),
                c.evaluations,
                c.aperture_resolution,
                c.panel_order
            );
        }
        Command::Validate { rays, seed } => {
            let report = run_validation(ValidationOptions { seed, rays })?;
            print!("{report}");
            if !report.passed() {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

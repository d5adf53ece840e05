//! JSON configuration with flat dotted keys.
//!
//! Nested objects are accepted and flattened, so `{"laser": {"power": 500}}`
//! and `{"laser.power": 500}` are equivalent. Omitted keys take the baseline
//! defaults of [`Scenario::baseline`]. All quantities are SI base units.

use std::path::PathBuf;

use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scenario::{CalibrationTarget, CextSource, Scenario};

/// Every accepted key, in canonical order.
pub const KEYS: &[&str] = &[
    "laser.power",
    "laser.wavelength",
    "laser.waist",
    "laser.aperture_radius",
    "laser.impedance",
    "geometry.distance",
    "geometry.source_height",
    "geometry.panel_height",
    "geometry.panel_length",
    "geometry.panel_width",
    "dust.enabled",
    "dust.diameter",
    "dust.particle_index",
    "dust.density_coefficient",
    "dust.ceiling",
    "dust.floor",
    "dust.cext_source",
    "dust.cext",
    "dust.calibration.reference_power",
    "dust.calibration.distance",
    "dust.calibration.source_height",
    "dust.calibration.panel_height",
    "numerics.target_rel",
    "numerics.aperture_resolution",
    "numerics.panel_order",
    "numerics.initial_panel_order",
    "numerics.max_aperture_resolution",
    "numerics.max_panel_order",
    "numerics.workers",
    "numerics.map_resolution",
    "numerics.map_extent_factor",
    "outputs.directory",
];

/// Keys that do not influence computed results.
const HASH_EXCLUDED: &[&str] = &["numerics.workers", "outputs.directory"];

fn flatten(prefix: &str, value: Value, out: &mut Map<String, Value>) -> Result<()> {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
                flatten(&key, v, out)?;
            }
            Ok(())
        }
        other if prefix.is_empty() => Err(Error::validation(
            "<root>",
            format!("configuration must be a JSON object, found {other}"),
        )),
        other => {
            if out.insert(prefix.to_string(), other).is_some() {
                return Err(Error::validation(prefix, "given more than once"));
            }
            Ok(())
        }
    }
}

/// Parses configuration text into a flat key map. Blank text is an empty map.
pub fn parse_flat(text: &str) -> Result<Map<String, Value>> {
    if text.trim().is_empty() {
        return Ok(Map::new());
    }
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut out = Map::new();
    flatten("", value, &mut out)?;
    if let Some(bad) = out.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::validation(bad.as_str(), "unknown configuration key"));
    }
    Ok(out)
}

struct Reader<'a> {
    map: &'a Map<String, Value>,
}

impl Reader<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        self.opt_f64(key).map(|v| v.unwrap_or(default))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| Error::validation(key, "expected a finite number")),
        }
    }

    fn opt_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .and_then(|x| usize::try_from(x).ok())
                .map(Some)
                .ok_or_else(|| Error::validation(key, "expected a non-negative integer")),
        }
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        self.opt_usize(key).map(|v| v.unwrap_or(default))
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| Error::validation(key, "expected true or false")),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| Error::validation(key, "expected a string")),
        }
    }
}

/// Builds a scenario from a flat key map without validating it.
pub fn scenario_from_flat(map: &Map<String, Value>) -> Result<Scenario<f64>> {
    let r = Reader { map };
    let mut s = Scenario::<f64>::baseline();
    let l = &mut s.laser;
    l.power = r.f64("laser.power", l.power)?;
    l.wavelength = r.f64("laser.wavelength", l.wavelength)?;
    l.waist = r.f64("laser.waist", l.waist)?;
    l.aperture_radius = r.f64("laser.aperture_radius", l.aperture_radius)?;
    l.impedance = r.f64("laser.impedance", l.impedance)?;
    let g = &mut s.geometry;
    g.distance = r.f64("geometry.distance", g.distance)?;
    g.source_height = r.f64("geometry.source_height", g.source_height)?;
    g.panel_height = r.f64("geometry.panel_height", g.panel_height)?;
    g.panel_length = r.f64("geometry.panel_length", g.panel_length)?;
    g.panel_width = r.f64("geometry.panel_width", g.panel_width)?;
    let d = &mut s.dust;
    d.enabled = r.bool("dust.enabled", d.enabled)?;
    let m = &mut d.model;
    m.diameter = r.f64("dust.diameter", m.diameter)?;
    m.particle_index = r.f64("dust.particle_index", m.particle_index)?;
    m.density_coefficient = r.f64("dust.density_coefficient", m.density_coefficient)?;
    m.ceiling = r.f64("dust.ceiling", m.ceiling)?;
    m.floor = r.f64("dust.floor", m.floor)?;
    let cext = r.opt_f64("dust.cext")?;
    d.source = match r.str("dust.cext_source")? {
        None | Some("none") => None,
        Some("explicit") => Some(CextSource::Explicit(
            cext.ok_or_else(|| Error::validation("dust.cext", "required when dust.cext_source is \"explicit\""))?,
        )),
        Some("mie") => Some(CextSource::Mie),
        Some("calibrated") => Some(CextSource::Calibrated {
            target: CalibrationTarget {
                reference_power: r.opt_f64("dust.calibration.reference_power")?.ok_or_else(|| {
                    Error::validation(
                        "dust.calibration.reference_power",
                        "required when dust.cext_source is \"calibrated\"",
                    )
                })?,
                distance: r.opt_f64("dust.calibration.distance")?,
                source_height: r.opt_f64("dust.calibration.source_height")?,
                panel_height: r.opt_f64("dust.calibration.panel_height")?,
            },
            fitted: cext,
        }),
        Some(other) => {
            return Err(Error::validation(
                "dust.cext_source",
                format!("unknown mode {other:?}; one of \"mie\", \"calibrated\", \"explicit\""),
            ))
        }
    };
    if let Some(CextSource::Calibrated { target, .. }) = &d.source {
        if !(target.reference_power > 0.0 && target.reference_power < s.laser.power) {
            return Err(Error::validation(
                "dust.calibration.reference_power",
                "must lie strictly between 0 and laser.power",
            ));
        }
    }
    let n = &mut s.numerics;
    n.target_rel = r.f64("numerics.target_rel", n.target_rel)?;
    n.aperture_resolution = r.opt_usize("numerics.aperture_resolution")?;
    n.panel_order = r.opt_usize("numerics.panel_order")?;
    n.initial_panel_order = r.usize("numerics.initial_panel_order", n.initial_panel_order)?;
    n.max_aperture_resolution = r.usize("numerics.max_aperture_resolution", n.max_aperture_resolution)?;
    n.max_panel_order = r.usize("numerics.max_panel_order", n.max_panel_order)?;
    n.workers = r.usize("numerics.workers", n.workers)?;
    n.map_resolution = r.usize("numerics.map_resolution", n.map_resolution)?;
    n.map_extent_factor = r.f64("numerics.map_extent_factor", n.map_extent_factor)?;
    if let Some(dir) = r.str("outputs.directory")? {
        s.outputs.directory = PathBuf::from(dir);
    }
    Ok(s)
}

/// Parses, applies defaults, validates and resolves explicit/Mie `C_ext`.
pub fn parse_and_validate(text: &str) -> Result<Scenario<f64>> {
    parse_and_validate_with_overrides(text, Map::new())
}

/// As [`parse_and_validate`], with flat-key `overrides` taking precedence
/// over the document.
pub fn parse_and_validate_with_overrides(text: &str, overrides: Map<String, Value>) -> Result<Scenario<f64>> {
    let mut map = parse_flat(text)?;
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::validation(k, "unknown configuration key"));
        }
        map.insert(k, v);
    }
    let mut s = scenario_from_flat(&map)?;
    s.validate()?;
    s.resolve_cext()?;
    Ok(s)
}

fn num(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

/// Flat key map describing `s` completely.
pub fn to_flat(s: &Scenario<f64>) -> Map<String, Value> {
    let mut m = Map::new();
    let mut put = |k: &str, v: Value| {
        m.insert(k.to_string(), v);
    };
    put("laser.power", num(s.laser.power));
    put("laser.wavelength", num(s.laser.wavelength));
    put("laser.waist", num(s.laser.waist));
    put("laser.aperture_radius", num(s.laser.aperture_radius));
    put("laser.impedance", num(s.laser.impedance));
    let g = &s.geometry;
    put("geometry.distance", num(g.distance));
    put("geometry.source_height", num(g.source_height));
    put("geometry.panel_height", num(g.panel_height));
    put("geometry.panel_length", num(g.panel_length));
    put("geometry.panel_width", num(g.panel_width));
    let d = &s.dust;
    put("dust.enabled", Value::Bool(d.enabled));
    put("dust.diameter", num(d.model.diameter));
    put("dust.particle_index", num(d.model.particle_index));
    put("dust.density_coefficient", num(d.model.density_coefficient));
    put("dust.ceiling", num(d.model.ceiling));
    put("dust.floor", num(d.model.floor));
    match &d.source {
        None => put("dust.cext_source", Value::String("none".into())),
        Some(CextSource::Explicit(c)) => {
            put("dust.cext_source", Value::String("explicit".into()));
            put("dust.cext", num(*c));
        }
        Some(CextSource::Mie) => put("dust.cext_source", Value::String("mie".into())),
        Some(CextSource::Calibrated { target, fitted }) => {
            put("dust.cext_source", Value::String("calibrated".into()));
            if let Some(c) = fitted {
                put("dust.cext", num(*c));
            }
            put("dust.calibration.reference_power", num(target.reference_power));
            let opt = |v: Option<f64>| v.map(num).unwrap_or(Value::Null);
            put("dust.calibration.distance", opt(target.distance));
            put("dust.calibration.source_height", opt(target.source_height));
            put("dust.calibration.panel_height", opt(target.panel_height));
        }
    }
    let n = &s.numerics;
    let opt = |v: Option<usize>| v.map(|x| Value::from(x as u64)).unwrap_or(Value::Null);
    put("numerics.target_rel", num(n.target_rel));
    put("numerics.aperture_resolution", opt(n.aperture_resolution));
    put("numerics.panel_order", opt(n.panel_order));
    put("numerics.initial_panel_order", Value::from(n.initial_panel_order as u64));
    put("numerics.max_aperture_resolution", Value::from(n.max_aperture_resolution as u64));
    put("numerics.max_panel_order", Value::from(n.max_panel_order as u64));
    put("numerics.workers", Value::from(n.workers as u64));
    put("numerics.map_resolution", Value::from(n.map_resolution as u64));
    put("numerics.map_extent_factor", num(n.map_extent_factor));
    put("outputs.directory", Value::String(s.outputs.directory.to_string_lossy().into_owned()));
    m
}

/// Pretty-printed flat JSON document for `s`; parses back to the same scenario.
pub fn to_config_json(s: &Scenario<f64>) -> String {
    serde_json::to_string_pretty(&Value::Object(to_flat(s))).expect("maps of plain values serialize")
}

/// SHA-256 (hex) of the canonical configuration, ignoring keys that do not
/// affect results (worker count, output directory).
pub fn config_hash(s: &Scenario<f64>) -> String {
    let mut flat = to_flat(s);
    for k in HASH_EXCLUDED {
        flat.remove(*k);
    }
    let text = serde_json::to_string(&Value::Object(flat)).expect("maps of plain values serialize");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_baseline() {
        let s = parse_and_validate("").unwrap();
        let t = Scenario::<f64>::baseline();
        assert_eq!(s.laser, t.laser);
        assert_eq!(s.geometry, t.geometry);
        assert_eq!(s.laser.aperture_radius * 2.0, 0.10);
        assert!(parse_and_validate("  \n ").is_ok());
    }

    #[test]
    fn nested_and_flat_keys_agree() {
        let a = parse_and_validate(r#"{"laser": {"power": 500}, "geometry": {"distance": 2e4}}"#).unwrap();
        let b = parse_and_validate(r#"{"laser.power": 500, "geometry.distance": 20000}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.laser.power, 500.0);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_and_validate("{\n  \"laser.power\": ,\n}") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_errors_name_the_field() {
        let e = parse_and_validate(r#"{"geometry.panel_height": 0}"#).unwrap_err();
        assert!(e.to_string().contains("panel below minimum height"), "{e}");
        let e = parse_and_validate(r#"{"laser.colour": 1}"#).unwrap_err();
        assert!(e.to_string().contains("laser.colour"), "{e}");
        let e = parse_and_validate(r#"{"dust.enabled": true}"#).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("mie") && msg.contains("calibrated") && msg.contains("explicit"));
        let e = parse_and_validate(r#"{"dust.diameter": 2e-5}"#).unwrap_err();
        assert!(e.to_string().contains("dust.diameter"));
        assert!(parse_and_validate(r#"{"laser.power": "high"}"#).is_err());
        assert!(parse_and_validate(r#"{"dust.cext_source": "explicit"}"#).is_err());
        assert!(parse_and_validate("[1, 2]").is_err());
        assert!(parse_and_validate(r#"{"laser.power": 1, "laser": {"power": 2}}"#).is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let texts = [
            "",
            r#"{"dust.enabled": true, "dust.cext_source": "mie", "numerics.aperture_resolution": 64}"#,
            r#"{"dust.enabled": true, "dust.cext_source": "explicit", "dust.cext": 5.24e-14, "geometry.source_height": 12.5}"#,
            r#"{"dust.enabled": true, "dust.cext_source": "calibrated", "dust.calibration.reference_power": 910, "dust.calibration.source_height": 12}"#,
        ];
        for t in texts {
            let s = parse_and_validate(t).unwrap();
            let again = parse_and_validate(&to_config_json(&s)).unwrap();
            assert_eq!(s, again, "{t}");
            assert_eq!(config_hash(&s), config_hash(&again));
        }
    }

    #[test]
    fn mie_mode_resolves_cross_section() {
        let s = parse_and_validate(r#"{"dust.enabled": true, "dust.cext_source": "mie"}"#).unwrap();
        assert!(s.dust.model.cext > 6e-16 && s.dust.model.cext < 9e-16);
        assert!(!to_config_json(&s).contains("\"dust.cext\""));
    }

    #[test]
    fn hash_ignores_workers_but_not_physics() {
        let a = parse_and_validate("").unwrap();
        let b = parse_and_validate(r#"{"numerics.workers": 4, "outputs.directory": "/tmp/x"}"#).unwrap();
        let c = parse_and_validate(r#"{"geometry.distance": 5001}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&c));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn overrides_win() {
        let mut o = Map::new();
        o.insert("geometry.distance".into(), Value::from(25000.0));
        let s = parse_and_validate_with_overrides(r#"{"geometry.distance": 1000}"#, o).unwrap();
        assert_eq!(s.geometry.distance, 25000.0);
    }
}

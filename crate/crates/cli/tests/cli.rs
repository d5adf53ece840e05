use std::path::Path;
use std::process::{Command, Output};

fn lunabeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lunabeam"))
        .args(args)
        .env_remove("LUNABEAM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> f64 {
    let mut lines = csv.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let row: Vec<_> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn simulate_free_space_at_25_km() {
    let o = lunabeam(&["simulate", "--config", "default", "--distance", "25000", "--no-dust"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let eff = column(&stdout(&o), "efficiency");
    assert!((0.894..=0.954).contains(&eff), "{eff}");
}

#[test]
fn simulate_without_header_prints_one_row() {
    let o = lunabeam(&["simulate", "--distance", "40000", "--no-header"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("40000,2,2,"));
}

#[test]
fn mie_agrees_with_rayleigh() {
    let o = lunabeam(&["mie", "--diameter", "175e-9", "--wavelength", "1064e-9", "--index", "1.733"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let cext = column(&out, "cext_m2");
    assert!((cext / 7.3e-16 - 1.0).abs() < 0.1, "{cext}");
    assert!((cext / column(&out, "rayleigh_m2") - 1.0).abs() < 0.1);
}

#[test]
fn validate_passes_on_clean_build() {
    let o = lunabeam(&["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().count() >= 8);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(lunabeam(&["simulate", "--panel-height", "0"]).status.code(), Some(1));
    assert_eq!(lunabeam(&["simulate", "--dust"]).status.code(), Some(1));
    assert_eq!(lunabeam(&["simulate", "--diameter", "2e-5"]).status.code(), Some(1));
    assert_eq!(lunabeam(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        lunabeam(&["simulate", "--config", "/definitely/not/here.json"]).status.code(),
        Some(3)
    );
    // Reference above the dust-free power cannot be reached.
    assert_eq!(
        lunabeam(&["calibrate", "--diameter", "175e-9", "--reference-power", "999"]).status.code(),
        Some(2)
    );
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"laser.power\": 1000,\n  oops\n}").unwrap();
    let o = lunabeam(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"geometry": {"distance": 50000}, "laser": {"power": 500}}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = lunabeam(&["simulate", "--config", p]);
    let out = stdout(&o);
    assert_eq!(column(&out, "distance_m"), 50000.0);
    let power = column(&out, "power_w");
    assert!((power / 500.0 - column(&out, "efficiency")).abs() < 1e-12);
    let o = lunabeam(&["simulate", "--config", p, "--distance", "10000"]);
    assert_eq!(column(&stdout(&o), "distance_m"), 10000.0);
}

#[test]
fn calibrate_prints_fitted_cross_section() {
    let o = lunabeam(&[
        "calibrate",
        "--source-height",
        "12",
        "--diameter",
        "175e-9",
        "--reference-efficiency",
        "0.91",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let cext = column(&out, "cext_m2");
    assert!(cext > 1e-14 && cext < 1e-12, "{cext}");
    assert!((column(&out, "efficiency") - 0.91).abs() < 1e-3);
}

fn sweep_csv(dir: &Path, workers: &str) -> Vec<u8> {
    let o = lunabeam(&[
        "sweep",
        "--kind",
        "height_map",
        "--cext",
        "5.24e-14",
        "--axis",
        "distance=5000:20000:5000",
        "--axis",
        "source_height=2,7,12",
        "--workers",
        workers,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(dir.join("height_map.csv")).unwrap()
}

#[test]
fn sweep_output_is_independent_of_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let one = sweep_csv(a.path(), "1");
    let four = sweep_csv(b.path(), "4");
    assert_eq!(one, four);
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 1 + 12);
    assert!(a.path().join("height_map.manifest.txt").exists());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lunabeam"))
        .args(["map", "--distance", "20000", "--resolution", "33", "--name", "m"])
        .env("LUNABEAM_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["m.csv", "m.pgm", "m.scale.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let pgm = std::fs::read(dir.path().join("m.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n33 33\n65535\n"));
}

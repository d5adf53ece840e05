//! Irradiance map writers: CSV grid and 16-bit greyscale PGM.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::IrradianceMap;
use crate::error::Result;
use crate::scalar::Real;

/// Paths written by [`write_map_files`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFiles {
    pub csv: PathBuf,
    pub pgm: PathBuf,
    pub scale: PathBuf,
}

/// CSV with a header row of x coordinates; each following row starts with y.
pub fn write_map_csv<T: Real>(map: &IrradianceMap<T>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "y\\x")?;
    for x in &map.xs {
        write!(w, ",{x}")?;
    }
    writeln!(w)?;
    for (iy, y) in map.ys.iter().enumerate() {
        write!(w, "{y}")?;
        for ix in 0..map.xs.len() {
            write!(w, ",{}", map.value(ix, iy))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Binary PGM (P5, maxval 65535) normalised to the map maximum.
/// The top image row is the largest y.
pub fn write_map_pgm<T: Real>(map: &IrradianceMap<T>, path: &Path) -> Result<()> {
    let nx = map.xs.len();
    let ny = map.ys.len();
    let max = map.max().as_f64();
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n65535\n")?;
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let v = if max > 0.0 { map.value(ix, iy).as_f64() / max } else { 0.0 };
            let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
            w.write_all(&q.to_be_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `<stem>.csv`, `<stem>.pgm` and `<stem>.scale.txt` (peak W/m²)
/// into `dir`.
pub fn write_map_files<T: Real>(map: &IrradianceMap<T>, dir: &Path, stem: &str) -> Result<MapFiles> {
    std::fs::create_dir_all(dir)?;
    let files = MapFiles {
        csv: dir.join(format!("{stem}.csv")),
        pgm: dir.join(format!("{stem}.pgm")),
        scale: dir.join(format!("{stem}.scale.txt")),
    };
    write_map_csv(map, &files.csv)?;
    write_map_pgm(map, &files.pgm)?;
    std::fs::write(&files.scale, format!("max_irradiance_w_m2 {}\n", map.max()))?;
    Ok(files)
}

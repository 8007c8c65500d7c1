use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use super::{FieldPair, Space};

/// Metadata written next to each binary snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSidecar {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub z: f64,
    pub space: Space,
    pub dtype: &'static str,
    pub layout: &'static str,
    pub units: &'static str,
    pub probe_re: String,
    pub probe_im: String,
    pub signal_re: String,
    pub signal_im: String,
    pub probe_pgm: String,
    pub signal_pgm: String,
}

/// Writes `<stem>_re.f64` and `<stem>_im.f64` as little-endian doubles.
pub fn write_field_binary(dir: &Path, stem: &str, data: &[Complex64]) -> io::Result<(String, String)> {
    let names = (format!("{stem}_re.f64"), format!("{stem}_im.f64"));
    for (name, part) in [(&names.0, 0), (&names.1, 1)] {
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        for v in data {
            let x = if part == 0 { v.re } else { v.im };
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()?;
    }
    Ok(names)
}

/// 8-bit binary PGM of |Ω|² scaled so that `max_intensity` maps to 255.
/// Uses the field's own maximum when `max_intensity` is `None`.
pub fn write_intensity_pgm(
    path: &Path,
    data: &[Complex64],
    nx: usize,
    ny: usize,
    max_intensity: Option<f64>,
) -> io::Result<()> {
    let peak = max_intensity.unwrap_or_else(|| data.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max));
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    let bytes: Vec<u8> = data
        .iter()
        .map(|v| if peak > 0.0 { (v.norm_sqr() / peak * 255.0).round().clamp(0.0, 255.0) as u8 } else { 0 })
        .collect();
    w.write_all(&bytes)?;
    w.flush()
}

/// Binary re/im arrays for both fields, PGM previews and a JSON sidecar.
pub fn write_snapshot(dir: &Path, stem: &str, fields: &FieldPair, z: f64) -> io::Result<SnapshotSidecar> {
    let g = &fields.grid;
    let (probe_re, probe_im) = write_field_binary(dir, &format!("{stem}_probe"), &fields.omega_p)?;
    let (signal_re, signal_im) = write_field_binary(dir, &format!("{stem}_signal"), &fields.omega_s)?;
    let probe_pgm = format!("{stem}_probe.pgm");
    let signal_pgm = format!("{stem}_signal.pgm");
    write_intensity_pgm(&dir.join(&probe_pgm), &fields.omega_p, g.nx, g.ny, None)?;
    write_intensity_pgm(&dir.join(&signal_pgm), &fields.omega_s, g.nx, g.ny, None)?;
    let sidecar = SnapshotSidecar {
        nx: g.nx,
        ny: g.ny,
        dx: g.dx,
        dy: g.dy,
        z,
        space: fields.space,
        dtype: "f64le",
        layout: "row-major, x fastest",
        units: "amplitude / input probe peak",
        probe_re,
        probe_im,
        signal_re,
        signal_im,
        probe_pgm,
        signal_pgm,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(io::Error::other)?;
    std::fs::write(dir.join(format!("{stem}.json")), json)?;
    Ok(sidecar)
}

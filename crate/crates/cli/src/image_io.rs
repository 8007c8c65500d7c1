//! Grayscale image ingestion and export.
//!
//! Image pixels are placed with pitch `width_scale` and centred on the grid
//! origin. Each grid sample takes the value of the pixel that contains it
//! (nearest neighbour); samples outside the image are zero.

use std::path::Path;

use fwm_vapor::beamprop::{FieldPair, TransverseGrid};
use image::{GrayImage, ImageReader, Luma};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unsupported or corrupt image {path}: {message}")]
    Format { path: String, message: String },
}

/// Loads a PGM or PNG as the probe amplitude (pixel/255, or {0, 1} with `threshold`).
pub fn load_image(
    path: &Path,
    grid: &TransverseGrid,
    threshold: Option<f64>,
    width_scale: f64,
) -> Result<FieldPair, ImageError> {
    let display = path.display().to_string();
    let reader = ImageReader::open(path)
        .map_err(|source| ImageError::Io { path: display.clone(), source })?
        .with_guessed_format()
        .map_err(|source| ImageError::Io { path: display.clone(), source })?;
    let img = reader
        .decode()
        .map_err(|e| ImageError::Format { path: display.clone(), message: e.to_string() })?
        .into_luma8();
    Ok(place_image(&img, grid, threshold, width_scale))
}

pub fn place_image(img: &GrayImage, grid: &TransverseGrid, threshold: Option<f64>, width_scale: f64) -> FieldPair {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let index = |coord: f64, n: i64| {
        let i = (coord / width_scale + n as f64 / 2.0 + 1e-9).floor() as i64;
        (0..n).contains(&i).then_some(i as u32)
    };
    let mut omega_p = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in 0..grid.ny {
        let Some(r) = index(grid.y(j), h) else { continue };
        for i in 0..grid.nx {
            let Some(c) = index(grid.x(i), w) else { continue };
            let v = img.get_pixel(c, r).0[0] as f64 / 255.0;
            let v = match threshold {
                Some(t) => {
                    if v >= t {
                        1.0
                    } else {
                        0.0
                    }
                }
                None => v,
            };
            omega_p[j * grid.nx + i] = Complex64::new(v, 0.0);
        }
    }
    FieldPair::probe_only(grid.clone(), omega_p)
}

/// Saves |Ω| / max |Ω| as an 8-bit image; the format follows the extension.
pub fn save_amplitude_image(path: &Path, field: &[Complex64], nx: usize, ny: usize) -> Result<(), ImageError> {
    let peak = field.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let img = GrayImage::from_fn(nx as u32, ny as u32, |x, y| {
        let a = field[y as usize * nx + x as usize].norm();
        Luma([if peak > 0.0 { (a / peak * 255.0).round() as u8 } else { 0 }])
    });
    img.save(path).map_err(|e| ImageError::Format { path: path.display().to_string(), message: e.to_string() })
}

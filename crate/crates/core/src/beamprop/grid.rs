use std::f64::consts::PI;

use serde::Serialize;

use super::BeamError;

/// Uniform transverse grid, row-major with x fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    /// FFT-ordered wavenumbers [1/m].
    #[serde(skip)]
    pub kx: Vec<f64>,
    #[serde(skip)]
    pub ky: Vec<f64>,
}

fn fft_axis(n: usize, d: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * d);
    (0..n)
        .map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk })
        .collect()
}

pub fn make_grid(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<TransverseGrid, BeamError> {
    for (name, n) in [("nx", nx), ("ny", ny)] {
        if n < 2 || !n.is_power_of_two() {
            return Err(BeamError::BadGrid(format!("{name} = {n} is not a power of two >= 2")));
        }
    }
    for (name, d) in [("dx", dx), ("dy", dy)] {
        if !(d.is_finite() && d > 0.0) {
            return Err(BeamError::BadGrid(format!("{name} = {d} must be positive")));
        }
    }
    Ok(TransverseGrid { nx, ny, dx, dy, kx: fft_axis(nx, dx), ky: fft_axis(ny, dy) })
}

impl TransverseGrid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Position of column `i`, with the origin on sample nx/2.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy
    }

    pub fn window(&self) -> (f64, f64) {
        (self.nx as f64 * self.dx, self.ny as f64 * self.dy)
    }

    pub fn nyquist(&self) -> (f64, f64) {
        (PI / self.dx, PI / self.dy)
    }

    /// Largest |k⊥| present on the grid.
    pub fn k_max(&self) -> f64 {
        let (a, b) = self.nyquist();
        a.hypot(b)
    }

    /// |k⊥| of mode (i, j), FFT ordering.
    pub fn k_perp(&self, i: usize, j: usize) -> f64 {
        self.kx[i].hypot(self.ky[j])
    }

    /// Window ≥ 8 w and spacing ≤ w/8.
    pub fn check_beam_sampling(&self, width: f64) -> Result<(), BeamError> {
        let (wx, wy) = self.window();
        if wx.min(wy) < 8.0 * width {
            return Err(BeamError::BadGrid(format!(
                "window {:.3e} m is smaller than 8 beam widths ({width:.3e} m)",
                wx.min(wy)
            )));
        }
        if self.dx.max(self.dy) > width / 8.0 {
            return Err(BeamError::BadGrid(format!(
                "spacing {:.3e} m exceeds width/8 for width {width:.3e} m",
                self.dx.max(self.dy)
            )));
        }
        Ok(())
    }

    /// Nyquist ≥ 4 k1 along both axes.
    pub fn check_bandwidth(&self, k1: f64) -> Result<(), BeamError> {
        let (a, b) = self.nyquist();
        if a.min(b) < 4.0 * k1 {
            return Err(BeamError::BadGrid(format!(
                "Nyquist {:.3e} 1/m below 4 k1 = {:.3e} 1/m",
                a.min(b),
                4.0 * k1
            )));
        }
        Ok(())
    }
}

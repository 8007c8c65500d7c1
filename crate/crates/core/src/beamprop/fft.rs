use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Unitary 2D DFT on row-major nx × ny data.
#[derive(Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("nx", &self.nx).field("ny", &self.ny).finish()
    }
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd_x, &self.fwd_y);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv_x, &self.inv_y);
    }

    fn run(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.nx * self.ny);
        data.par_chunks_mut(self.nx).for_each(|row| fx.process(row));
        let mut t = transpose(data, self.nx, self.ny);
        t.par_chunks_mut(self.ny).for_each(|col| fy.process(col));
        let back = transpose(&t, self.ny, self.nx);
        let scale = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        data.par_iter_mut().zip(back.par_iter()).for_each(|(d, b)| *d = b * scale);
    }
}

/// Row-major rows × cols (cols = `w`) to its transpose.
fn transpose(data: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); w * h];
    out.par_chunks_mut(h).enumerate().for_each(|(i, col)| {
        for (j, v) in col.iter_mut().enumerate() {
            *v = data[j * w + i];
        }
    });
    out
}

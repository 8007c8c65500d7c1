use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BeamError, Fft2, TransverseGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Position,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Position to momentum.
    Forward,
    /// Momentum to position.
    Inverse,
}

/// Probe and signal amplitudes on one grid, in units of the input peak Ωp0.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub grid: TransverseGrid,
    pub omega_p: Vec<Complex64>,
    pub omega_s: Vec<Complex64>,
    pub space: Space,
}

impl FieldPair {
    /// Position-space pair with a zero signal.
    pub fn probe_only(grid: TransverseGrid, omega_p: Vec<Complex64>) -> Self {
        assert_eq!(omega_p.len(), grid.len());
        let omega_s = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, omega_p, omega_s, space: Space::Position }
    }

    /// Σ|Ωp|² dx dy; identical in both spaces.
    pub fn power_p(&self) -> f64 {
        power(&self.omega_p, self.grid.cell_area())
    }

    pub fn power_s(&self) -> f64 {
        power(&self.omega_s, self.grid.cell_area())
    }

    pub fn transform_with(&self, fft: &Fft2, direction: Direction) -> Result<Self, BeamError> {
        let (from, to) = match direction {
            Direction::Forward => (Space::Position, Space::Momentum),
            Direction::Inverse => (Space::Momentum, Space::Position),
        };
        if self.space != from {
            return Err(BeamError::WrongSpace { expected: from, found: self.space });
        }
        let mut out = self.clone();
        for data in [&mut out.omega_p, &mut out.omega_s] {
            match direction {
                Direction::Forward => fft.forward(data),
                Direction::Inverse => fft.inverse(data),
            }
        }
        out.space = to;
        Ok(out)
    }

    /// Converts to `space`, transforming only if needed.
    pub fn into_space(self, fft: &Fft2, space: Space) -> Self {
        match (self.space, space) {
            (a, b) if a == b => self,
            (Space::Position, _) => self.transform_with(fft, Direction::Forward).expect("space checked"),
            _ => self.transform_with(fft, Direction::Inverse).expect("space checked"),
        }
    }
}

fn power(data: &[Complex64], area: f64) -> f64 {
    crate::reduce::sum(data.len(), |i| data[i].norm_sqr()) * area
}

/// Unitary 2D Fourier transform of both fields.
pub fn transform(fields: &FieldPair, direction: Direction) -> Result<FieldPair, BeamError> {
    fields.transform_with(&Fft2::new(fields.grid.nx, fields.grid.ny), direction)
}

/// Ωp = A exp(−r²/2w²) centred on the grid origin, Ωs = 0.
pub fn gaussian_input(grid: &TransverseGrid, w_p0: f64, amplitude: f64) -> Result<FieldPair, BeamError> {
    grid.check_beam_sampling(w_p0)?;
    let mut omega_p = vec![Complex64::new(0.0, 0.0); grid.len()];
    omega_p.par_chunks_mut(grid.nx).enumerate().for_each(|(j, row)| {
        let y = grid.y(j);
        for (i, v) in row.iter_mut().enumerate() {
            let x = grid.x(i);
            *v = Complex64::new(amplitude * (-(x * x + y * y) / (2.0 * w_p0 * w_p0)).exp(), 0.0);
        }
    });
    Ok(FieldPair::probe_only(grid.clone(), omega_p))
}

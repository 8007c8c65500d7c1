use num_complex::Complex64;
use rayon::prelude::*;

use super::{BeamError, TransverseGrid};
use crate::susceptibility::{Medium, SusceptibilitySet};

/// Default number of radial samples.
pub const TABLE_SAMPLES: usize = 1024;

/// χ(|k⊥|) on a uniform radial grid with cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityTable {
    k_max: f64,
    step: f64,
    values: Vec<[Complex64; 4]>,
    slopes: Vec<[Complex64; 4]>,
}

impl SusceptibilityTable {
    /// Samples `f(k) = (χ, dχ/dk)` at `samples` points spanning [0, k_max].
    pub fn from_fn<F>(k_max: f64, samples: usize, f: F) -> Self
    where
        F: Fn(f64) -> (SusceptibilitySet, SusceptibilitySet) + Sync,
    {
        assert!(samples >= 2 && k_max > 0.0);
        let step = k_max / (samples - 1) as f64;
        let (values, slopes): (Vec<_>, Vec<_>) = (0..samples)
            .into_par_iter()
            .map(|i| {
                let (v, d) = f(i as f64 * step);
                (v.to_array(), d.to_array())
            })
            .unzip();
        Self { k_max, step, values, slopes }
    }

    pub fn from_medium(medium: &Medium, k_max: f64, samples: usize) -> Self {
        Self::from_fn(k_max, samples, |k| medium.chi_with_slope(k))
    }

    /// Covers 1.5× the largest |k⊥| of `grid` with the default sample count.
    pub fn for_grid(medium: &Medium, grid: &TransverseGrid) -> Self {
        Self::from_medium(medium, 1.5 * grid.k_max(), TABLE_SAMPLES)
    }

    /// χ ≡ 0.
    pub fn zero(k_max: f64) -> Self {
        Self::from_fn(k_max, 2, |_| (SusceptibilitySet::ZERO, SusceptibilitySet::ZERO))
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn eval(&self, k: f64) -> Result<SusceptibilitySet, BeamError> {
        if !(0.0..=self.k_max).contains(&k) {
            return Err(BeamError::TableRange { k, max: self.k_max });
        }
        let pos = k / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let t = pos - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = (t3 - 2.0 * t2 + t) * self.step;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = (t3 - t2) * self.step;
        let (y0, y1, m0, m1) = (&self.values[i], &self.values[i + 1], &self.slopes[i], &self.slopes[i + 1]);
        Ok(SusceptibilitySet::from_array(std::array::from_fn(|c| {
            y0[c] * h00 + m0[c] * h10 + y1[c] * h01 + m1[c] * h11
        })))
    }
}

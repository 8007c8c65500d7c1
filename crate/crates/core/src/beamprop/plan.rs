use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{BeamError, SusceptibilityTable, TransverseGrid};
use crate::susceptibility::{propagation_matrix, OpticalTransitions, SusceptibilitySet};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this |s z| the transfer matrix switches to its Taylor series in (s z)².
const SERIES_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Vacuum,
    Medium,
}

/// Per-mode generators A(k⊥) and step transfers T = exp(i A dz), FFT-ordered.
#[derive(Debug, Clone)]
pub struct PropagationPlan {
    pub kind: PlanKind,
    pub dz: f64,
    pub grid: TransverseGrid,
    generators: Vec<Matrix2<Complex64>>,
    transfers: Vec<Matrix2<Complex64>>,
}

impl PropagationPlan {
    pub fn generators(&self) -> &[Matrix2<Complex64>] {
        &self.generators
    }

    pub fn transfers(&self) -> &[Matrix2<Complex64>] {
        &self.transfers
    }

    /// Transfers for an arbitrary distance `z`.
    pub fn transfers_for(&self, z: f64) -> Vec<Matrix2<Complex64>> {
        self.generators.par_iter().map(|a| transfer_matrix(a, z)).collect()
    }
}

/// exp(i A z) for a 2×2 complex A.
///
/// With τ = tr A / 2, M = A − τ I and s² = ((a11 − a22)/2)² + a12 a21,
/// exp(i A z) = e^{iτz} [cos(sz) I + i sin(sz)/s M].
pub fn transfer_matrix(a: &Matrix2<Complex64>, z: f64) -> Matrix2<Complex64> {
    let tau = (a[(0, 0)] + a[(1, 1)]) / 2.0;
    let half_diff = (a[(0, 0)] - a[(1, 1)]) / 2.0;
    let s2 = half_diff * half_diff + a[(0, 1)] * a[(1, 0)];
    let s = s2.sqrt();
    let m = a - Matrix2::identity() * tau;
    let (cos_part, sin_part) = if (s * z).norm() < SERIES_THRESHOLD {
        let u = s2 * z * z;
        let phase = (I * tau * z).exp();
        let cos = 1.0 - u / 2.0 + u * u / 24.0 - u * u * u / 720.0;
        let sinc = 1.0 - u / 6.0 + u * u / 120.0 - u * u * u / 5040.0;
        (phase * cos, phase * sinc * z)
    } else {
        let e1 = (I * (tau + s) * z).exp();
        let e2 = (I * (tau - s) * z).exp();
        ((e1 + e2) / 2.0, (e1 - e2) / (2.0 * I * s))
    };
    Matrix2::identity() * cos_part + m * (I * sin_part)
}

fn assemble<F>(grid: &TransverseGrid, dz: f64, kind: PlanKind, generator: F) -> Result<PropagationPlan, BeamError>
where
    F: Fn(f64) -> Result<Matrix2<Complex64>, BeamError> + Sync,
{
    let generators = (0..grid.len())
        .into_par_iter()
        .map(|idx| generator(grid.k_perp(idx % grid.nx, idx / grid.nx)))
        .collect::<Result<Vec<_>, _>>()?;
    let transfers = generators.par_iter().map(|a| transfer_matrix(a, dz)).collect();
    Ok(PropagationPlan { kind, dz, grid: grid.clone(), generators, transfers })
}

/// Plan through the medium described by `table`.
pub fn build_plan(
    grid: &TransverseGrid,
    table: &SusceptibilityTable,
    transitions: &OpticalTransitions,
    dz: f64,
) -> Result<PropagationPlan, BeamError> {
    assemble(grid, dz, PlanKind::Medium, |k| Ok(propagation_matrix(&table.eval(k)?, k, transitions)))
}

/// Plan through free space.
pub fn vacuum_plan(grid: &TransverseGrid, transitions: &OpticalTransitions, dz: f64) -> PropagationPlan {
    assemble(grid, dz, PlanKind::Vacuum, |k| Ok(propagation_matrix(&SusceptibilitySet::ZERO, k, transitions)))
        .expect("vacuum generator is total")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamprop::make_grid;
    use crate::presets;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_diagonal_phase() {
        let g = make_grid(32, 32, 10e-6, 10e-6).unwrap();
        let tr = presets::rb87_transitions();
        let plan = vacuum_plan(&g, &tr, 1e-2);
        for (idx, t) in plan.transfers().iter().enumerate() {
            let k = g.k_perp(idx % 32, idx / 32);
            assert_eq!(t[(0, 1)], c(0.0, 0.0));
            assert_eq!(t[(1, 0)], c(0.0, 0.0));
            assert!((t[(0, 0)].norm() - 1.0).abs() < 1e-14);
            let expect = (-I * k * k * 1e-2 / (2.0 * tr.k_p())).exp();
            assert!((t[(0, 0)] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn decoupled_channels_stay_diagonal() {
        let a = Matrix2::new(c(1.0, 0.2), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.1));
        let t = transfer_matrix(&a, 0.7);
        assert_eq!(t[(0, 1)], c(0.0, 0.0));
        assert!((t[(0, 0)] - (I * a[(0, 0)] * 0.7).exp()).norm() < 1e-15);
        assert!((t[(1, 1)] - (I * a[(1, 1)] * 0.7).exp()).norm() < 1e-15);
    }

    #[test]
    fn composes_over_distance() {
        let a = Matrix2::new(c(3.0, 0.4), c(1.5, -0.2), c(0.7, 0.1), c(2.0, 0.3));
        let t12 = transfer_matrix(&a, 0.5) * transfer_matrix(&a, 0.3);
        let t = transfer_matrix(&a, 0.8);
        assert!((t12 - t).norm() < 1e-12 * t.norm());
    }

    #[test]
    fn series_branch_is_continuous() {
        let base = Matrix2::new(c(1.0, 0.1), c(1e-3, 0.0), c(1e-3, 0.0), c(1.0, 0.1));
        let z = 0.999 * SERIES_THRESHOLD / 1e-3;
        let inside = transfer_matrix(&base, z);
        let outside = transfer_matrix(&base, SERIES_THRESHOLD / 1e-3 * 1.001);
        let back = outside * transfer_matrix(&base, z - SERIES_THRESHOLD / 1e-3 * 1.001);
        assert!((inside - back).norm() < 1e-12);
    }
}

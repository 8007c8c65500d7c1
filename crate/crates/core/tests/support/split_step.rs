//! Strang splitting of exact diffraction and RK4 medium coupling, mode by mode.

use fwm_vapor::beamprop::{SusceptibilityTable, TransverseGrid};
use fwm_vapor::susceptibility::OpticalTransitions;
use num_complex::Complex64;
use rayon::prelude::*;

/// Propagates momentum-space amplitudes over `z` in `steps` Strang steps.
pub fn split_step(
    grid: &TransverseGrid,
    table: &SusceptibilityTable,
    transitions: &OpticalTransitions,
    probe: &[Complex64],
    signal: &[Complex64],
    z: f64,
    steps: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let (kp, ks) = (transitions.k_p(), transitions.k_s());
    let h = z / steps as f64;
    let i = Complex64::i();
    let out: Vec<(Complex64, Complex64)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let kx = grid.kx[idx % grid.nx];
            let ky = grid.ky[idx / grid.nx];
            let k2 = kx * kx + ky * ky;
            let chi = table.eval(k2.sqrt()).expect("table covers grid");
            let half_p = (-i * k2 * h / (4.0 * kp)).exp();
            let half_s = (-i * k2 * h / (4.0 * ks)).exp();
            let c = [
                [i * chi.chi_p * (kp / 2.0), i * chi.chi_sp * (kp / 2.0)],
                [i * chi.chi_ps * (ks / 2.0), i * chi.chi_s * (ks / 2.0)],
            ];
            let f = |u: [Complex64; 2]| {
                [c[0][0] * u[0] + c[0][1] * u[1], c[1][0] * u[0] + c[1][1] * u[1]]
            };
            let mut u = [probe[idx], signal[idx]];
            for _ in 0..steps {
                u = [u[0] * half_p, u[1] * half_s];
                let k1 = f(u);
                let k2 = f([u[0] + k1[0] * (h / 2.0), u[1] + k1[1] * (h / 2.0)]);
                let k3 = f([u[0] + k2[0] * (h / 2.0), u[1] + k2[1] * (h / 2.0)]);
                let k4 = f([u[0] + k3[0] * h, u[1] + k3[1] * h]);
                for n in 0..2 {
                    u[n] += (k1[n] + k2[n] * 2.0 + k3[n] * 2.0 + k4[n]) * (h / 6.0);
                }
                u = [u[0] * half_p, u[1] * half_s];
            }
            (u[0], u[1])
        })
        .collect();
    out.into_iter().unzip()
}

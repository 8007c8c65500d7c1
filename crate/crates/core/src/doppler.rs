//! Velocity-averaged single-photon response.
//!
//! For a Maxwell–Boltzmann distribution F(v) ∝ exp(−v²/v_th²) the kernel
//!
//! ```text
//! G = ∫ F(v) / (Δ − k·v + iW) d³v
//! ```
//!
//! only depends on the velocity component along k and reduces to the
//! Faddeeva function: G = −i√π w(z)/(k v_th) with z = (Δ + iW)/(k v_th).
//! Since W > 0, Im G < 0 and iG lies in the right half plane.

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Doppler kernel for detuning `detuning` [rad/s], wavenumber `k` [1/m],
/// homogeneous half-width `total_width` [rad/s] and thermal velocity `v_th` [m/s].
pub fn doppler_kernel(detuning: f64, k: f64, total_width: f64, v_th: f64) -> Complex64 {
    debug_assert!(total_width > 0.0, "kernel needs a positive linewidth");
    let doppler = k.abs() * v_th;
    let pole = Complex64::new(detuning, total_width);
    if doppler == 0.0 {
        return pole.inv();
    }
    let z = pole / doppler;
    Complex64::new(0.0, -SQRT_PI) * z.w() / doppler
}

/// Strong-collision dressing K = iG/(1 − iγc G).
pub fn collision_dressed(g: Complex64, gamma_c: f64) -> Complex64 {
    let i = Complex64::i();
    i * g / (1.0 - i * gamma_c * g)
}

//! Reference parameter sets for the ⁸⁷Rb D1/D2 realization of the level scheme.
//!
//! Rates are in rad/s, lengths in m. Pump rates passed to these helpers are
//! given in units of Γ31, the reference rate of the scheme.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::atom::{DriveConfig, LevelScheme};
use crate::susceptibility::{OpticalTransitions, ThermalParameters};

/// D1 natural linewidth, 2π × 5.75 MHz.
pub const GAMMA_D1: f64 = 2.0 * PI * 5.75e6;
/// D2 natural linewidth, 2π × 6.07 MHz.
pub const GAMMA_D2: f64 = 2.0 * PI * 6.07e6;

pub const LAMBDA_P: f64 = 795e-9;
pub const LAMBDA_S: f64 = 780e-9;
pub const V_TH: f64 = 240.0;
pub const DELTA_K: f64 = 22.8;
pub const TEMPERATURE: f64 = 300.0;

/// Density and collision rate (in units of Δk·v_th) of the pumped set.
pub const PUMPED_N0: f64 = 1.32e18;
pub const PUMPED_COLLISIONS_PER_DOPPLER: f64 = 1600.0;
pub const PUMPED_P_OVER_GAMMA31: f64 = 0.7;

/// Density and collision rate (in units of Δk·v_th) of the unpumped set.
pub const UNPUMPED_N0: f64 = 6.2e17;
pub const UNPUMPED_COLLISIONS_PER_DOPPLER: f64 = 30000.0;

/// Probe beam waist of the Gaussian scenarios.
pub const W_P0: f64 = 100e-6;

pub fn rb87_scheme() -> LevelScheme {
    let gamma31 = GAMMA_D1 / 4.0;
    LevelScheme {
        gamma31,
        gamma32: GAMMA_D1 / 6.0,
        gamma41: GAMMA_D2 / 4.0,
        gamma42: GAMMA_D2 / 6.0,
        gamma51: GAMMA_D1 / 12.0,
        gamma52: GAMMA_D2 / 2.0,
        gamma21: 1e-3 * gamma31,
    }
}

/// Resonant controls Ωc1 = 1.55 Γ32, Ωc2 = 1.43 Γ42 and a pump `p` in units of Γ31.
pub fn rb87_drive(scheme: &LevelScheme, p_over_gamma31: f64) -> DriveConfig {
    DriveConfig {
        omega_c1: Complex64::new(1.55 * scheme.gamma32, 0.0),
        omega_c2: Complex64::new(1.43 * scheme.gamma42, 0.0),
        delta_c1: 0.0,
        delta_c2: 0.0,
        pump_p: p_over_gamma31 * scheme.gamma31,
    }
}

pub fn rb87_scheme_and_drive(p_over_gamma31: f64) -> (LevelScheme, DriveConfig) {
    let scheme = rb87_scheme();
    let drive = rb87_drive(&scheme, p_over_gamma31);
    (scheme, drive)
}

pub fn rb87_transitions() -> OpticalTransitions {
    OpticalTransitions { lambda_p: LAMBDA_P, lambda_s: LAMBDA_S }
}

fn thermal(collisions_per_doppler: f64, n0: f64) -> ThermalParameters {
    ThermalParameters {
        temperature: TEMPERATURE,
        v_th: V_TH,
        gamma_c: collisions_per_doppler * DELTA_K * V_TH,
        delta_k: DELTA_K,
        n0,
    }
}

/// Thermal parameters of the pumped set (γc = 1600 Δk·v_th, n0 = 1.32e18 m⁻³).
pub fn pumped_thermal() -> ThermalParameters {
    thermal(PUMPED_COLLISIONS_PER_DOPPLER, PUMPED_N0)
}

/// Thermal parameters of the unpumped set (γc = 30000 Δk·v_th, n0 = 6.2e17 m⁻³).
pub fn unpumped_thermal() -> ThermalParameters {
    thermal(UNPUMPED_COLLISIONS_PER_DOPPLER, UNPUMPED_N0)
}

/// Rayleigh length 2π w0²/λ.
pub fn rayleigh_length(w0: f64, lambda: f64) -> f64 {
    2.0 * PI * w0 * w0 / lambda
}

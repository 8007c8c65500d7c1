//! Explicit time integration of the zeroth-order master equation.

use fwm_vapor::atom::{DriveConfig, LevelScheme};
use fwm_vapor::presets;
use nalgebra::Matrix5;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type M5 = Matrix5<Complex64>;

pub fn ket_bra(i: usize, j: usize) -> M5 {
    let mut m = M5::zeros();
    m[(i - 1, j - 1)] = Complex64::new(1.0, 0.0);
    m
}

/// dρ/dτ written out in operator form, time in units of 1/Γ31.
pub struct MasterEquation {
    h: M5,
    jumps: Vec<(f64, M5)>,
    gamma21: f64,
}

impl MasterEquation {
    pub fn new(scheme: &LevelScheme, drive: &DriveConfig) -> Self {
        let u = scheme.gamma31;
        let (oc1, oc2) = (drive.omega_c1 / u, drive.omega_c2 / u);
        let h = -ket_bra(3, 3) * Complex64::from(drive.delta_c1 / u)
            - ket_bra(4, 4) * Complex64::from(drive.delta_c2 / u)
            - (ket_bra(3, 2) * oc1 + ket_bra(2, 3) * oc1.conj())
            - (ket_bra(4, 2) * oc2 + ket_bra(2, 4) * oc2.conj());
        let jumps = vec![
            (scheme.gamma31 / u, ket_bra(1, 3)),
            (scheme.gamma32 / u, ket_bra(2, 3)),
            (scheme.gamma41 / u, ket_bra(1, 4)),
            (scheme.gamma42 / u, ket_bra(2, 4)),
            (scheme.gamma51 / u, ket_bra(1, 5)),
            (scheme.gamma52 / u, ket_bra(2, 5)),
            (drive.pump_p / u, ket_bra(5, 1)),
            (drive.pump_p / u, ket_bra(1, 5)),
        ];
        Self { h, jumps, gamma21: scheme.gamma21 / u }
    }

    pub fn rhs(&self, rho: &M5) -> M5 {
        let i = Complex64::i();
        let mut d = (self.h * rho - rho * self.h) * (-i);
        for (rate, j) in &self.jumps {
            let jd = j.adjoint();
            let jdj = jd * j;
            d += (j * rho * jd - (jdj * rho + rho * jdj) * Complex64::from(0.5)) * Complex64::from(*rate);
        }
        d[(1, 0)] -= rho[(1, 0)] * self.gamma21;
        d[(0, 1)] -= rho[(0, 1)] * self.gamma21;
        d
    }
}

pub fn max_abs(m: &M5) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dormand–Prince 5(4) from the ground state until ‖dρ/dτ‖ < 1e-12.
pub fn integrate_to_equilibrium(eq: &MasterEquation) -> M5 {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let tol = 1e-13;
    let mut rho = ket_bra(1, 1);
    let mut h = 1e-3;
    let mut tau = 0.0;
    loop {
        let k0 = eq.rhs(&rho);
        if max_abs(&k0) < 1e-12 {
            return rho;
        }
        assert!(tau < 1e6, "no equilibrium reached");
        let mut k = [M5::zeros(); 7];
        k[0] = k0;
        for s in 1..7 {
            let mut y = rho;
            for (r, a) in A[s].iter().enumerate().take(s) {
                y += k[r] * Complex64::from(h * a);
            }
            k[s] = eq.rhs(&y);
        }
        let mut y5 = rho;
        let mut err = M5::zeros();
        for s in 0..7 {
            y5 += k[s] * Complex64::from(h * B5[s]);
            err += k[s] * Complex64::from(h * (B5[s] - B4[s]));
        }
        let e = max_abs(&err) / tol;
        if e <= 1.0 {
            rho = y5;
            tau += h;
        }
        h *= (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        h = h.min(1.0);
    }
}

/// Reference rates, drives and pump each scaled by an independent factor in [0.5, 1.5),
/// with control detunings up to ±Γ31/2.
pub fn perturbed_reference(rng: &mut ChaCha8Rng) -> (LevelScheme, DriveConfig) {
    let (s, d) = presets::rb87_scheme_and_drive(0.7);
    let mut f = |x: f64| x * rng.gen_range(0.5..1.5);
    let scheme = LevelScheme {
        gamma31: f(s.gamma31),
        gamma32: f(s.gamma32),
        gamma41: f(s.gamma41),
        gamma42: f(s.gamma42),
        gamma51: f(s.gamma51),
        gamma52: f(s.gamma52),
        gamma21: f(s.gamma21),
    };
    let omega_c1 = d.omega_c1 * f(1.0);
    let omega_c2 = d.omega_c2 * f(1.0);
    let pump_p = f(d.pump_p);
    let delta_c1 = scheme.gamma31 * rng.gen_range(-0.5..0.5);
    let delta_c2 = scheme.gamma31 * rng.gen_range(-0.5..0.5);
    (scheme, DriveConfig { omega_c1, omega_c2, delta_c1, delta_c2, pump_p })
}

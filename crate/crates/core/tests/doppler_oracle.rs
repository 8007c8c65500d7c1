//! Closed-form Doppler kernel against adaptive quadrature of the velocity integral.

mod support;

use fwm_vapor::doppler::{collision_dressed, doppler_kernel};
use fwm_vapor::presets;
use fwm_vapor::susceptibility::{k_factors, optimal_detuning, DetuningRule, KMode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::quadrature::doppler_reference;

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn lattice_of_detunings_and_widths() {
    let k = presets::rb87_transitions().k_p();
    let v = presets::V_TH;
    let doppler = k * v;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let detuning = doppler * (-3.0 + 6.0 * i as f64 / 9.0);
        for j in 0..10 {
            let width = doppler * 10f64.powf(-3.0 + 3.0 * j as f64 / 9.0);
            let err = relative(doppler_kernel(detuning, k, width, v), doppler_reference(detuning, k, width, v));
            worst = worst.max(err);
        }
    }
    assert!(worst < 1e-10, "worst relative deviation {worst:e}");
}

#[test]
fn reference_kernels_at_optimal_detuning() {
    let (scheme, drive) = presets::rb87_scheme_and_drive(0.7);
    let thermal = presets::pumped_thermal();
    let tr = presets::rb87_transitions();
    let delta = optimal_detuning(&scheme, &drive, &thermal, &tr, KMode::Complex, DetuningRule::Standard);
    let k = k_factors(&thermal, &tr, &scheme, &drive, delta, KMode::Complex);
    let p2 = drive.pump_p / 2.0;
    let w31 = p2 + scheme.gamma3() / 2.0 + thermal.gamma_c;
    let w41 = p2 + scheme.gamma4() / 2.0 + thermal.gamma_c;
    let g31 = doppler_reference(delta + drive.delta_c1, tr.k_p(), w31, thermal.v_th);
    let g41 = doppler_reference(delta + drive.delta_c2, tr.k_s(), w41, thermal.v_th);
    assert!(relative(k.g31, g31) < 1e-10);
    assert!(relative(k.g41, g41) < 1e-10);
    assert!(k.g31.im < 0.0 && k.g41.im < 0.0);
    assert!(k.k31.re > 0.0 && k.k41.re > 0.0);
}

#[test]
fn k_factor_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let k = presets::rb87_transitions().k_p();
    let v = presets::V_TH;
    let base_width = presets::rb87_scheme().gamma3() / 2.0;
    for _ in 0..200 {
        let detuning = rng.gen_range(-1.0..1.0) * base_width;
        let width = base_width * rng.gen_range(0.5..3.0);
        let gamma_c = rng.gen_range(0.0..2.0) * presets::PUMPED_COLLISIONS_PER_DOPPLER * presets::DELTA_K * v;
        let g = doppler_kernel(detuning, k, width, v);
        let kk = collision_dressed(g, gamma_c);
        let back = kk / (Complex64::i() * (1.0 + gamma_c * kk));
        assert!(relative(back, g) < 1e-12);
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature of complex integrands.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point panel: estimate, QUADPACK-scaled error and ∫|f|.
fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 15];
    values[7] = f(c);
    for j in 0..7 {
        values[j] = f(c - h * XGK[j]);
        values[14 - j] = f(c + h * XGK[j]);
    }
    let weight = |n: usize| WGK[if n < 8 { n } else { 14 - n }];
    let mut k = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (n, v) in values.iter().enumerate() {
        k += v * weight(n);
        abs += v.norm() * weight(n);
    }
    let mut g = values[7] * WG[3];
    for j in (1..7).step_by(2) {
        g += (values[j] + values[14 - j]) * WG[j / 2];
    }
    let mean = k * 0.5;
    let asc: f64 = values.iter().enumerate().map(|(n, v)| (v - mean).norm() * weight(n)).sum();
    let (k, abs, asc) = (k * h, abs * h.abs(), asc * h.abs());
    let mut err = ((k - g * h).norm()).abs();
    if asc > 0.0 && err > 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (k, err, abs)
}

fn adapt<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, density: f64, depth: usize) -> Complex64 {
    let (val, err, abs) = kronrod(f, a, b);
    if err <= density * (b - a) || err <= 50.0 * f64::EPSILON * abs {
        return val;
    }
    assert!(depth > 0, "quadrature did not converge on [{a}, {b}]");
    let m = 0.5 * (a + b);
    adapt(f, a, m, density, depth - 1) + adapt(f, m, b, density, depth - 1)
}

/// ∫_a^b f with absolute error of order `tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    adapt(&f, a, b, tol / (b - a), 60)
}

/// ∫ F(v)/(Δ − k v + iW) dv over |v| ≤ 8 v_th for a 1D Maxwell–Boltzmann F.
pub fn doppler_reference(detuning: f64, k: f64, width: f64, v_th: f64) -> Complex64 {
    let pole = Complex64::new(detuning, width);
    let f = |u: f64| {
        let weight = (-u * u).exp() / std::f64::consts::PI.sqrt();
        Complex64::from(weight) / (pole - k * v_th * u)
    };
    let scale = 1.0 / pole.norm().max(k * v_th);
    integrate(f, -8.0, 8.0, 1e-12 * scale)
}

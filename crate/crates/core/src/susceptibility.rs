//! Motion-induced momentum-space susceptibilities of the thermal vapor.
//!
//! Every channel has the same structure
//!
//! ```text
//! χ(k⊥) = i C [ a + N / (iΔ − Γ1 − D k⊥²) ],   D = v_th² / (γc1 − iΔ)
//! ```
//!
//! with a channel prefactor C = 3λ³ K n0 Γ / 8π², a k⊥-independent offset `a`
//! built from zeroth-order populations/coherences and a numerator `N` mixing
//! the control-field power broadenings with the ground-state coherences. The
//! probe and signal self-terms are χp, χs; χsp feeds the signal into the probe
//! equation and χps the probe into the signal equation.
//!
//! The diffusion coefficient D carries the atomic motion: collisions confine
//! the atoms (Dicke regime) so that Doppler broadening of the Raman transition
//! collapses into a k⊥² term that can cancel paraxial diffraction.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use roots::{find_root_brent, SimpleConvergency};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atom::{DensityMatrix, DriveConfig, LevelScheme};
use crate::doppler::{collision_dressed, doppler_kernel};

const I: Complex64 = Complex64::new(0.0, 1.0);
const BOLTZMANN: f64 = 1.380_649e-23;

/// Dicke ratios at or above this value are reported as a warning.
pub const DICKE_WARNING_RATIO: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SusceptibilityError {
    #[error("parameter `{name}` out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("no density root in [{lower:e}, {upper:e}] m^-3 (flatness {f_lower:.3e} .. {f_upper:.3e})")]
    NoRoot { lower: f64, upper: f64, f_lower: f64, f_upper: f64 },
}

/// Thermal and collisional parameters of the vapor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParameters {
    /// [K]
    pub temperature: f64,
    /// Most probable speed sqrt(2 kB T / m) [m/s].
    pub v_th: f64,
    /// Velocity-changing collision rate [rad/s].
    pub gamma_c: f64,
    /// Two-photon wavevector mismatch |kp − kc1| [1/m].
    pub delta_k: f64,
    /// Atomic number density [1/m³].
    pub n0: f64,
}

impl ThermalParameters {
    pub fn thermal_velocity(temperature: f64, mass_kg: f64) -> f64 {
        (2.0 * BOLTZMANN * temperature / mass_kg).sqrt()
    }

    /// Two-photon Doppler width over the ground-coherence damping, Δk·v_th / (γc + p/2).
    pub fn dicke_ratio(&self, pump_p: f64) -> f64 {
        self.delta_k * self.v_th / (self.gamma_c + pump_p / 2.0)
    }

    pub fn dicke_warning(&self, pump_p: f64) -> bool {
        self.dicke_ratio(pump_p) >= DICKE_WARNING_RATIO
    }

    pub fn validate(&self) -> Result<(), SusceptibilityError> {
        let positive = [("v_th", self.v_th), ("n0", self.n0)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(SusceptibilityError::InvalidParameter { name, value });
            }
        }
        let non_negative =
            [("gamma_c", self.gamma_c), ("delta_k", self.delta_k), ("temperature", self.temperature)];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SusceptibilityError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Probe and signal wavelengths; phase matching ks = kp − kc1 + kc2 is taken as exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalTransitions {
    pub lambda_p: f64,
    pub lambda_s: f64,
}

impl OpticalTransitions {
    pub fn k_p(&self) -> f64 {
        2.0 * PI / self.lambda_p
    }

    pub fn k_s(&self) -> f64 {
        2.0 * PI / self.lambda_s
    }

    /// Geometric mean of the two wavenumbers.
    pub fn k_mean(&self) -> f64 {
        (self.k_p() * self.k_s()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMode {
    #[default]
    Complex,
    /// Keep Re K only, as is customary close to one-photon resonance.
    RealPart,
}

/// Doppler kernels and their collision-dressed coupling factors [s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFactors {
    pub g31: Complex64,
    pub g41: Complex64,
    pub k31: Complex64,
    pub k41: Complex64,
    pub mode: KMode,
    /// |Im K|/|K| of the undressed complex value; reported in both modes.
    pub discarded31: f64,
    pub discarded41: f64,
}

/// Evaluates K31 (probe transition) and K41 (signal transition) at two-photon detuning `delta`.
///
/// The one-photon detunings follow from phase matching: Δp = Δ + Δc1 and
/// Δs = Δ + Δc2. Homogeneous half-widths are p/2 + Γi/2 + γc.
pub fn k_factors(
    thermal: &ThermalParameters,
    transitions: &OpticalTransitions,
    scheme: &LevelScheme,
    drive: &DriveConfig,
    delta: f64,
    mode: KMode,
) -> KFactors {
    let p2 = drive.pump_p / 2.0;
    let g31 = doppler_kernel(
        delta + drive.delta_c1,
        transitions.k_p(),
        p2 + scheme.gamma3() / 2.0 + thermal.gamma_c,
        thermal.v_th,
    );
    let g41 = doppler_kernel(
        delta + drive.delta_c2,
        transitions.k_s(),
        p2 + scheme.gamma4() / 2.0 + thermal.gamma_c,
        thermal.v_th,
    );
    let k31 = collision_dressed(g31, thermal.gamma_c);
    let k41 = collision_dressed(g41, thermal.gamma_c);
    let discarded = |k: Complex64| k.im.abs() / k.norm();
    let (d31, d41) = (discarded(k31), discarded(k41));
    let (k31, k41) = match mode {
        KMode::Complex => (k31, k41),
        KMode::RealPart => (Complex64::new(k31.re, 0.0), Complex64::new(k41.re, 0.0)),
    };
    KFactors { g31, g41, k31, k41, mode, discarded31: d31, discarded41: d41 }
}

/// Control-field broadenings and linewidths derived from the K factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRates {
    /// Γc1 = K31 |Ωc1|²
    pub power_c1: Complex64,
    /// Γc2 = K41 |Ωc2|²
    pub power_c2: Complex64,
    /// Γa = K31 Ωc1* Ωc2
    pub cross_a: Complex64,
    /// Γb = K41 Ωc1 Ωc2*
    pub cross_b: Complex64,
    /// Γ1 = p/2 + γ21 + Γc1 + Γc2
    pub gamma1: Complex64,
    /// Γ0 = γ21 + Γc1 + Γc2
    pub gamma0: Complex64,
    /// γc1 = γc + p/2 + γ21
    pub gamma_c1: f64,
}

impl EffectiveRates {
    pub fn new(
        scheme: &LevelScheme,
        drive: &DriveConfig,
        thermal: &ThermalParameters,
        k: &KFactors,
    ) -> Self {
        let (oc1, oc2) = (drive.omega_c1, drive.omega_c2);
        let power_c1 = k.k31 * oc1.norm_sqr();
        let power_c2 = k.k41 * oc2.norm_sqr();
        let gamma0 = power_c1 + power_c2 + scheme.gamma21;
        Self {
            power_c1,
            power_c2,
            cross_a: k.k31 * oc1.conj() * oc2,
            cross_b: k.k41 * oc1 * oc2.conj(),
            gamma1: gamma0 + drive.pump_p / 2.0,
            gamma0,
            gamma_c1: thermal.gamma_c + drive.pump_p / 2.0 + scheme.gamma21,
        }
    }

    /// α = sqrt(γc1 / (2Γ1 + γc1)), using Re Γ1.
    pub fn alpha(&self) -> f64 {
        (self.gamma_c1 / (2.0 * self.gamma1.re + self.gamma_c1)).sqrt()
    }
}

/// D = v_th² / (γ − iΔ).
pub fn diffusion_coefficient(v_th: f64, damping: f64, delta: f64) -> Complex64 {
    Complex64::new(v_th * v_th, 0.0) / Complex64::new(damping, -delta)
}

/// The four susceptibilities at one transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilitySet {
    pub chi_p: Complex64,
    pub chi_s: Complex64,
    pub chi_sp: Complex64,
    pub chi_ps: Complex64,
}

impl SusceptibilitySet {
    pub const ZERO: Self = Self {
        chi_p: Complex64::new(0.0, 0.0),
        chi_s: Complex64::new(0.0, 0.0),
        chi_sp: Complex64::new(0.0, 0.0),
        chi_ps: Complex64::new(0.0, 0.0),
    };

    pub fn from_array(v: [Complex64; 4]) -> Self {
        Self { chi_p: v[0], chi_s: v[1], chi_sp: v[2], chi_ps: v[3] }
    }

    /// Channels in the order p, s, sp, ps.
    pub fn to_array(&self) -> [Complex64; 4] {
        [self.chi_p, self.chi_s, self.chi_sp, self.chi_ps]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let [a, b, c, d] = self.to_array();
        Self::from_array([f(a), f(b), f(c), f(d)])
    }

    /// Largest channel-wise |a − b| / |b|.
    pub fn max_relative_difference(&self, reference: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(reference.to_array())
            .map(|(a, b)| if b == Complex64::new(0.0, 0.0) { a.norm() } else { (a - b).norm() / b.norm() })
            .fold(0.0, f64::max)
    }
}

/// Per-channel coefficients of χ = A (a + N / den(k⊥)).
#[derive(Debug, Clone, Copy, PartialEq)]
struct ChannelForm {
    amplitude: Complex64,
    offset: Complex64,
    numerator: Complex64,
}

impl ChannelForm {
    fn eval(&self, inv_den: Complex64) -> Complex64 {
        self.amplitude * (self.offset + self.numerator * inv_den)
    }
}

/// Channel prefactor without the leading i: 3λ³ K n0 Γ / 8π².
fn channel_prefactor(lambda: f64, k: Complex64, n0: f64, gamma: f64) -> Complex64 {
    k * (3.0 * lambda.powi(3) * n0 * gamma / (8.0 * PI * PI))
}

/// Fully specified medium at a fixed two-photon detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    transitions: OpticalTransitions,
    v_th: f64,
    n0: f64,
    delta: f64,
    k: KFactors,
    rates: EffectiveRates,
    diffusion: Complex64,
    forms: [ChannelForm; 4],
}

impl Medium {
    pub fn new(
        scheme: &LevelScheme,
        drive: &DriveConfig,
        thermal: &ThermalParameters,
        transitions: &OpticalTransitions,
        state: &DensityMatrix,
        delta: f64,
        mode: KMode,
    ) -> Self {
        let k = k_factors(thermal, transitions, scheme, drive, delta, mode);
        let rates = EffectiveRates::new(scheme, drive, thermal, &k);
        let r = |i, j| state.at(i, j);
        let (oc1, oc2) = (drive.omega_c1, drive.omega_c2);
        let cp = I * channel_prefactor(transitions.lambda_p, k.k31, thermal.n0, scheme.gamma31);
        let cs = I * channel_prefactor(transitions.lambda_s, k.k41, thermal.n0, scheme.gamma41);
        let d13 = r(1, 1) - r(3, 3);
        let d14 = r(1, 1) - r(4, 4);
        let forms = [
            ChannelForm {
                amplitude: cp,
                offset: d13,
                numerator: rates.power_c1 * d13 + I * oc1 * r(2, 3) - rates.cross_b * r(4, 3),
            },
            ChannelForm {
                amplitude: cs,
                offset: d14,
                numerator: rates.power_c2 * d14 + I * oc2 * r(2, 4) - rates.cross_a * r(3, 4),
            },
            ChannelForm {
                amplitude: cp,
                offset: -r(3, 4),
                numerator: rates.cross_b * d14 + I * oc1 * r(2, 4) - rates.power_c1 * r(3, 4),
            },
            ChannelForm {
                amplitude: cs,
                offset: -r(4, 3),
                numerator: rates.cross_a * d13 + I * oc2 * r(2, 3) - rates.power_c2 * r(4, 3),
            },
        ];
        Self {
            transitions: *transitions,
            v_th: thermal.v_th,
            n0: thermal.n0,
            delta,
            k,
            rates,
            diffusion: diffusion_coefficient(thermal.v_th, rates.gamma_c1, delta),
            forms,
        }
    }

    /// Same medium at a different atomic density; χ scales linearly with n0.
    pub fn with_density(&self, n0: f64) -> Self {
        let scale = n0 / self.n0;
        let mut out = self.clone();
        out.n0 = n0;
        for f in &mut out.forms {
            f.amplitude *= scale;
        }
        out
    }

    /// Frozen atoms: drops the motion-induced k⊥² dependence (D = 0).
    pub fn without_motion(&self) -> Self {
        let mut out = self.clone();
        out.diffusion = Complex64::new(0.0, 0.0);
        out
    }

    pub fn transitions(&self) -> &OpticalTransitions {
        &self.transitions
    }

    pub fn density(&self) -> f64 {
        self.n0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k_factors(&self) -> &KFactors {
        &self.k
    }

    pub fn rates(&self) -> &EffectiveRates {
        &self.rates
    }

    pub fn diffusion(&self) -> Complex64 {
        self.diffusion
    }

    /// The numerators N of the four channels (p, s, sp, ps).
    pub fn numerators(&self) -> [Complex64; 4] {
        self.forms.map(|f| f.numerator)
    }

    fn denominator(&self, k_perp: f64) -> Complex64 {
        I * self.delta - self.rates.gamma1 - self.diffusion * (k_perp * k_perp)
    }

    pub fn chi(&self, k_perp: f64) -> SusceptibilitySet {
        let inv = self.denominator(k_perp).inv();
        SusceptibilitySet::from_array(self.forms.map(|f| f.eval(inv)))
    }

    /// χ(k⊥) together with dχ/dk⊥.
    pub fn chi_with_slope(&self, k_perp: f64) -> (SusceptibilitySet, SusceptibilitySet) {
        let inv = self.denominator(k_perp).inv();
        let dden = self.diffusion * (2.0 * k_perp) * inv * inv;
        let chi = SusceptibilitySet::from_array(self.forms.map(|f| f.eval(inv)));
        let slope = SusceptibilitySet::from_array(self.forms.map(|f| f.amplitude * f.numerator * dden));
        (chi, slope)
    }

    /// Transverse bandwidth scale k1 = sqrt(Γ1 γc1) / v_th.
    pub fn k1(&self) -> f64 {
        (self.rates.gamma1.re * self.rates.gamma_c1).sqrt() / self.v_th
    }

    /// First-order expansion χ ≈ χ(0) + χ(1) k⊥²/k1² at this medium's detuning.
    pub fn dicke(&self, delta_opt: f64) -> DickeCoefficients {
        let k1 = self.k1();
        let inv = self.denominator(0.0).inv();
        let chi0 = SusceptibilitySet::from_array(self.forms.map(|f| f.eval(inv)));
        let d = self.diffusion * inv * inv * (k1 * k1);
        let chi1 = SusceptibilitySet::from_array(self.forms.map(|f| f.amplitude * f.numerator * d));
        DickeCoefficients { chi0, chi1, alpha: self.rates.alpha(), k1, delta_opt }
    }
}

/// First-order Dicke expansion of all four channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeCoefficients {
    pub chi0: SusceptibilitySet,
    /// Coefficient of k⊥²/k1².
    pub chi1: SusceptibilitySet,
    pub alpha: f64,
    /// [1/m]
    pub k1: f64,
    /// [rad/s]
    pub delta_opt: f64,
}

/// Full susceptibilities at `k_perp` with complex K factors.
#[allow(clippy::too_many_arguments)]
pub fn chi_full(
    k_perp: f64,
    state: &DensityMatrix,
    thermal: &ThermalParameters,
    transitions: &OpticalTransitions,
    scheme: &LevelScheme,
    drive: &DriveConfig,
    delta: f64,
) -> SusceptibilitySet {
    Medium::new(scheme, drive, thermal, transitions, state, delta, KMode::Complex).chi(k_perp)
}

/// Closed form for an unpumped medium where only ρ11 = 1 survives.
///
/// Uses Γ0 = γ21 + Γc1 + Γc2 and D0 = v_th² / (γc + γ21 − iΔ).
pub fn chi_unpumped(
    k_perp: f64,
    thermal: &ThermalParameters,
    transitions: &OpticalTransitions,
    scheme: &LevelScheme,
    drive: &DriveConfig,
    delta: f64,
    mode: KMode,
) -> SusceptibilitySet {
    let k = k_factors(thermal, transitions, scheme, drive, delta, mode);
    let gc1 = k.k31 * drive.omega_c1.norm_sqr();
    let gc2 = k.k41 * drive.omega_c2.norm_sqr();
    let ga = k.k31 * drive.omega_c1.conj() * drive.omega_c2;
    let gb = k.k41 * drive.omega_c1 * drive.omega_c2.conj();
    let gamma0 = gc1 + gc2 + scheme.gamma21;
    let d0 = diffusion_coefficient(thermal.v_th, thermal.gamma_c + scheme.gamma21, delta);
    let den = I * delta - gamma0 - d0 * (k_perp * k_perp);
    let cp = I * channel_prefactor(transitions.lambda_p, k.k31, thermal.n0, scheme.gamma31);
    let cs = I * channel_prefactor(transitions.lambda_s, k.k41, thermal.n0, scheme.gamma41);
    SusceptibilitySet {
        chi_p: cp * (1.0 + gc1 / den),
        chi_s: cs * (1.0 + gc2 / den),
        chi_sp: cp * gb / den,
        chi_ps: cs * ga / den,
    }
}

/// Which two-photon detuning prescription to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningRule {
    /// Δ = −Γ0 without pump, Δ = −αΓ1 otherwise.
    #[default]
    Standard,
    /// Δ = −αΓ1 regardless of the pump.
    AlphaGamma1,
}

/// Two-photon detuning that removes the k⊥² dependence of Im χ.
///
/// K depends weakly on Δ through the one-photon detunings, so the rule is
/// solved by fixed-point iteration starting from Δ = 0.
pub fn optimal_detuning(
    scheme: &LevelScheme,
    drive: &DriveConfig,
    thermal: &ThermalParameters,
    transitions: &OpticalTransitions,
    mode: KMode,
    rule: DetuningRule,
) -> f64 {
    let unpumped = drive.pump_p == 0.0 && rule == DetuningRule::Standard;
    let target = |delta: f64| {
        let k = k_factors(thermal, transitions, scheme, drive, delta, mode);
        let rates = EffectiveRates::new(scheme, drive, thermal, &k);
        if unpumped {
            -rates.gamma0.re
        } else {
            -rates.alpha() * rates.gamma1.re
        }
    };
    let mut delta = 0.0;
    for _ in 0..50 {
        let next = target(delta);
        let done = (next - delta).abs() <= 1e-14 * next.abs().max(1.0);
        delta = next;
        if done {
            break;
        }
    }
    delta
}

/// Dicke expansion evaluated at the optimal detuning.
pub fn chi_dicke(
    state: &DensityMatrix,
    thermal: &ThermalParameters,
    transitions: &OpticalTransitions,
    scheme: &LevelScheme,
    drive: &DriveConfig,
    mode: KMode,
) -> DickeCoefficients {
    let delta = optimal_detuning(scheme, drive, thermal, transitions, mode, DetuningRule::Standard);
    Medium::new(scheme, drive, thermal, transitions, state, delta, mode).dicke(delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthScales {
    /// sqrt(Γ0 / D_r0) with D_r0 = v_th²/γc [1/m]
    pub k0: f64,
    /// sqrt(Γ1 / D_r1) with D_r1 = v_th²/γc1 [1/m]
    pub k1: f64,
}

pub fn bandwidth_scales(
    scheme: &LevelScheme,
    drive: &DriveConfig,
    thermal: &ThermalParameters,
    k: &KFactors,
) -> BandwidthScales {
    let rates = EffectiveRates::new(scheme, drive, thermal, k);
    BandwidthScales {
        k0: (rates.gamma0.re * thermal.gamma_c).sqrt() / thermal.v_th,
        k1: (rates.gamma1.re * rates.gamma_c1).sqrt() / thermal.v_th,
    }
}

/// Coupled-mode generator A(k⊥) of dΩ/dz = i A Ω for (Ωp, Ωs).
pub fn propagation_matrix(
    chi: &SusceptibilitySet,
    k_perp: f64,
    transitions: &OpticalTransitions,
) -> Matrix2<Complex64> {
    let (kp, ks) = (transitions.k_p(), transitions.k_s());
    let k2 = k_perp * k_perp;
    Matrix2::new(
        chi.chi_p * (kp / 2.0) - k2 / (2.0 * kp),
        chi.chi_sp * (kp / 2.0),
        chi.chi_ps * (ks / 2.0),
        chi.chi_s * (ks / 2.0) - k2 / (2.0 * ks),
    )
}

/// Eigenvalues of a 2×2 matrix ordered (dominant, other).
///
/// The dominant eigenvalue has the smallest imaginary part, i.e. the weakest
/// attenuation (or strongest gain) under exp(i A z).
pub fn eigenvalues2(a: &Matrix2<Complex64>) -> (Complex64, Complex64) {
    let half_trace = (a[(0, 0)] + a[(1, 1)]) / 2.0;
    let half_diff = (a[(0, 0)] - a[(1, 1)]) / 2.0;
    let s = (half_diff * half_diff + a[(0, 1)] * a[(1, 0)]).sqrt();
    let (l1, l2) = (half_trace + s, half_trace - s);
    if l1.im <= l2.im {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// Dominant eigenvalue and a unit eigenvector.
pub fn dominant_mode(a: &Matrix2<Complex64>) -> (Complex64, Vector2<Complex64>) {
    let (lambda, _) = eigenvalues2(a);
    let c1 = Vector2::new(a[(0, 1)], lambda - a[(0, 0)]);
    let c2 = Vector2::new(lambda - a[(1, 1)], a[(1, 0)]);
    let v = if c1.norm() >= c2.norm() { c1 } else { c2 };
    let n = v.norm();
    if n == 0.0 {
        // already diagonal with equal entries; any vector works
        return (lambda, Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    (lambda, v.unscale(n))
}

/// Residual diffraction of the dominant mode at `k_perp`, in units of the vacuum phase k⊥²/2k̄.
///
/// −1 means no compensation at all, 0 means the medium cancels diffraction
/// to first order.
pub fn diffraction_flatness(medium: &Medium, k_perp: f64) -> f64 {
    let tr = medium.transitions();
    let a0 = propagation_matrix(&medium.chi(0.0), 0.0, tr);
    let ak = propagation_matrix(&medium.chi(k_perp), k_perp, tr);
    let (l0, _) = eigenvalues2(&a0);
    let (lk, _) = eigenvalues2(&ak);
    (lk.re - l0.re) / (k_perp * k_perp / (2.0 * tr.k_mean()))
}

/// Probe wavenumber used for calibration, as a fraction of k1.
pub const CALIBRATION_PROBE_FRACTION: f64 = 0.1;
/// Accepted residual flatness after calibration.
pub const CALIBRATION_TOLERANCE: f64 = 1e-3;

/// Atomic density at which the dominant mode's phase cancels vacuum diffraction.
///
/// Searches n0 in [guess/100, 100·guess] with Brent's method on ln n0.
pub fn calibrate_density(medium: &Medium, n0_guess: f64) -> Result<f64, SusceptibilityError> {
    if !(n0_guess.is_finite() && n0_guess > 0.0) {
        return Err(SusceptibilityError::InvalidParameter { name: "n0_guess", value: n0_guess });
    }
    let k = CALIBRATION_PROBE_FRACTION * medium.k1();
    let flatness = |ln_n0: f64| diffraction_flatness(&medium.with_density(ln_n0.exp()), k);
    let (lo, hi) = ((n0_guess / 100.0).ln(), (n0_guess * 100.0).ln());
    let (f_lo, f_hi) = (flatness(lo), flatness(hi));
    let no_root = SusceptibilityError::NoRoot {
        lower: lo.exp(),
        upper: hi.exp(),
        f_lower: f_lo,
        f_upper: f_hi,
    };
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo * f_hi > 0.0 {
        return Err(no_root);
    }
    let mut conv = SimpleConvergency { eps: 1e-13, max_iter: 200 };
    let ln_n0 = find_root_brent(lo, hi, flatness, &mut conv).map_err(|_| no_root.clone())?;
    if flatness(ln_n0).abs() > CALIBRATION_TOLERANCE {
        return Err(no_root);
    }
    Ok(ln_n0.exp())
}

/// Writes `k_perp` plus Re/Im of χp, χs, χsp, χps, 17 significant digits.
pub fn write_susceptibility_csv<W: Write>(
    mut out: W,
    rows: &[(f64, SusceptibilitySet)],
) -> io::Result<()> {
    writeln!(
        out,
        "k_perp,chi_p_re,chi_p_im,chi_s_re,chi_s_im,chi_sp_re,chi_sp_im,chi_ps_re,chi_ps_im"
    )?;
    for (k, chi) in rows {
        write!(out, "{k:.16e}")?;
        for c in chi.to_array() {
            write!(out, ",{:.16e},{:.16e}", c.re, c.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

//! Scenario configuration: strict JSON schema, validation and SI resolution.
//!
//! Rates under `atom` are given in the unit named by `atom.unit`. Rates under
//! `drive`, `thermal.gamma_c` and `run` are in units of Γ31 unless written as
//! `{"value": x, "of": "gamma42"}`, a multiple of one of the decay rates.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use fwm_vapor::atom::{DriveConfig, LevelScheme};
use fwm_vapor::susceptibility::{DetuningRule, KMode, OpticalTransitions, ThermalParameters};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// 1 atomic mass unit [kg].
const AMU: f64 = 1.660_539_066_60e-27;
/// Marker key of a run metadata file that embeds a config.
pub const RUN_META_KEY: &str = "run_meta_version";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    /// rad/s
    RadPerS,
    /// 2π × MHz
    Mhz2pi,
}

impl RateUnit {
    fn to_si(self, v: f64) -> f64 {
        match self {
            RateUnit::RadPerS => v,
            RateUnit::Mhz2pi => 2.0 * PI * 1e6 * v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateRef {
    Gamma31,
    Gamma32,
    Gamma41,
    Gamma42,
    Gamma51,
    Gamma52,
}

/// A rate as a bare number (section unit) or a multiple of a decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rate {
    Plain(f64),
    Scaled(ScaledRate),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledRate {
    pub value: f64,
    pub of: RateRef,
}

/// A complex Rabi frequency: a rate, or `[re, im]` in units of Γ31.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRate {
    Real(Rate),
    Pair([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub unit: RateUnit,
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    pub gamma51: f64,
    pub gamma52: f64,
    /// Ground-state dephasing; a bare number is in `unit`.
    pub gamma21: Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub omega_c1: ComplexRate,
    pub omega_c2: ComplexRate,
    #[serde(default = "zero_rate")]
    pub delta_c1: Rate,
    #[serde(default = "zero_rate")]
    pub delta_c2: Rate,
    pub pump_p: Rate,
}

fn zero_rate() -> Rate {
    Rate::Plain(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSpec {
    /// [K]
    pub temperature: f64,
    /// [m/s]; derived from `temperature` and `mass_amu` when absent.
    #[serde(default)]
    pub v_th: Option<f64>,
    #[serde(default)]
    pub mass_amu: Option<f64>,
    /// Collision rate in units of Γ31.
    #[serde(default)]
    pub gamma_c: Option<Rate>,
    /// Collision rate in units of Δk·v_th.
    #[serde(default)]
    pub gamma_c_per_doppler: Option<f64>,
    /// [1/m]
    pub delta_k: f64,
    /// [1/m³]; the initial guess when the density is calibrated.
    pub n0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsSpec {
    /// [m]
    pub lambda_p: f64,
    /// [m]
    pub lambda_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// [m]
    pub dx: f64,
    /// [m]
    pub dy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BeamSpec {
    Gaussian {
        /// 1/√e amplitude radius [m].
        w_p0: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Image {
        /// Relative to the config file.
        path: PathBuf,
        /// Binarize at this fraction of full scale.
        #[serde(default)]
        threshold: Option<f64>,
        /// Pixel pitch [m].
        width_scale: f64,
        /// Beam radius defining z_R [m].
        reference_width: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DetuningSpec {
    Optimal,
    /// Units of Γ31.
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySpec {
    Explicit,
    Calibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Pump range in units of Γ31.
    pub pump_min: f64,
    pub pump_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Propagation length in units of z_R.
    pub z_total: f64,
    /// Number of equal steps; metrics are recorded after each.
    pub snapshots: usize,
    /// Export full fields every this many steps (z = 0 and the end are always exported).
    #[serde(default)]
    pub export_every: Option<usize>,
    #[serde(default = "default_detuning")]
    pub detuning: DetuningSpec,
    #[serde(default)]
    pub detuning_rule: DetuningRule,
    #[serde(default = "default_density")]
    pub density: DensitySpec,
    #[serde(default)]
    pub vacuum: bool,
    #[serde(default)]
    pub k_mode: KMode,
    /// Rows in susceptibility.csv over k⊥ ∈ [0, 2 k1].
    #[serde(default = "default_chi_rows")]
    pub susceptibility_rows: usize,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_detuning() -> DetuningSpec {
    DetuningSpec::Optimal
}

fn default_density() -> DensitySpec {
    DensitySpec::Explicit
}

fn default_chi_rows() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub atom: AtomSpec,
    pub drive: DriveSpec,
    pub thermal: ThermalSpec,
    pub transitions: TransitionsSpec,
    pub grid: GridSpec,
    pub beam: BeamSpec,
    pub run: RunSpec,
    /// Default output directory when none is given on the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Parses a config, or the config embedded in a run metadata file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let to_parse = |e: serde_json::Error| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let value: Value = serde_json::from_str(text).map_err(to_parse)?;
    let config = match value.get(RUN_META_KEY) {
        Some(_) => {
            let embedded = value.get("config").cloned().ok_or_else(|| ConfigError::Parse {
                line: 1,
                column: 1,
                message: "run metadata without a `config` entry".into(),
            })?;
            serde_json::from_value(embedded).map_err(to_parse)?
        }
        None => serde_json::from_str(text).map_err(to_parse)?,
    };
    validate(&config)?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<(ScenarioConfig, String), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse {
        line: 0,
        column: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok((parse_config(&text)?, text))
}

fn validate(c: &ScenarioConfig) -> Result<(), ConfigError> {
    let mut errs = Vec::new();
    let mut positive = |name: &str, v: f64| {
        if !(v.is_finite() && v > 0.0) {
            errs.push(format!("{name} must be positive (got {v})"));
        }
    };
    positive("atom.gamma31", c.atom.gamma31);
    positive("transitions.lambda_p", c.transitions.lambda_p);
    positive("transitions.lambda_s", c.transitions.lambda_s);
    positive("thermal.n0", c.thermal.n0);
    positive("grid.dx", c.grid.dx);
    positive("grid.dy", c.grid.dy);
    if let Some(v) = c.thermal.v_th {
        positive("thermal.v_th", v);
    }
    if let Some(m) = c.thermal.mass_amu {
        positive("thermal.mass_amu", m);
    }
    match &c.beam {
        BeamSpec::Gaussian { w_p0, amplitude } => {
            positive("beam.gaussian.w_p0", *w_p0);
            positive("beam.gaussian.amplitude", *amplitude);
        }
        BeamSpec::Image { threshold, width_scale, reference_width, .. } => {
            positive("beam.image.width_scale", *width_scale);
            positive("beam.image.reference_width", *reference_width);
            if let Some(t) = threshold {
                if !(0.0..=1.0).contains(t) {
                    errs.push(format!("beam.image.threshold must lie in [0, 1] (got {t})"));
                }
            }
        }
    }

    let mut non_negative = |name: &str, v: f64| {
        if !(v.is_finite() && v >= 0.0) {
            errs.push(format!("{name} must be non-negative (got {v})"));
        }
    };
    for (name, v) in [
        ("atom.gamma32", c.atom.gamma32),
        ("atom.gamma41", c.atom.gamma41),
        ("atom.gamma42", c.atom.gamma42),
        ("atom.gamma51", c.atom.gamma51),
        ("atom.gamma52", c.atom.gamma52),
        ("atom.gamma21", rate_number(c.atom.gamma21)),
        ("drive.pump_p", rate_number(c.drive.pump_p)),
        ("thermal.temperature", c.thermal.temperature),
        ("thermal.delta_k", c.thermal.delta_k),
        ("run.z_total", c.run.z_total),
    ] {
        non_negative(name, v);
    }
    if let Some(g) = c.thermal.gamma_c {
        non_negative("thermal.gamma_c", rate_number(g));
    }
    if let Some(g) = c.thermal.gamma_c_per_doppler {
        non_negative("thermal.gamma_c_per_doppler", g);
    }

    if c.thermal.gamma_c.is_some() == c.thermal.gamma_c_per_doppler.is_some() {
        errs.push("thermal: give exactly one of gamma_c, gamma_c_per_doppler".into());
    }
    if c.thermal.v_th.is_none() && c.thermal.mass_amu.is_none() {
        errs.push("thermal: give v_th or mass_amu".into());
    }
    for (name, n) in [("grid.nx", c.grid.nx), ("grid.ny", c.grid.ny)] {
        if n < 2 || !n.is_power_of_two() {
            errs.push(format!("{name} must be a power of two >= 2 (got {n})"));
        }
    }
    if c.run.snapshots == 0 {
        errs.push("run.snapshots must be at least 1".into());
    }
    if c.run.export_every == Some(0) {
        errs.push("run.export_every must be at least 1".into());
    }
    if c.run.susceptibility_rows < 2 {
        errs.push(format!("run.susceptibility_rows must be at least 2 (got {})", c.run.susceptibility_rows));
    }
    if let DetuningSpec::Explicit(d) = c.run.detuning {
        if !d.is_finite() {
            errs.push(format!("run.detuning.explicit must be finite (got {d})"));
        }
    }
    if let Some(s) = &c.run.sweep {
        if !(s.pump_min.is_finite() && s.pump_min >= 0.0 && s.pump_max >= s.pump_min) {
            errs.push(format!("run.sweep needs 0 <= pump_min <= pump_max (got {} .. {})", s.pump_min, s.pump_max));
        }
        if s.points < 2 {
            errs.push(format!("run.sweep.points must be at least 2 (got {})", s.points));
        }
    }
    for (name, r) in [("drive.delta_c1", c.drive.delta_c1), ("drive.delta_c2", c.drive.delta_c2)] {
        if !rate_number(r).is_finite() {
            errs.push(format!("{name} must be finite"));
        }
    }
    for (name, r) in [("drive.omega_c1", c.drive.omega_c1), ("drive.omega_c2", c.drive.omega_c2)] {
        let finite = match r {
            ComplexRate::Real(r) => rate_number(r).is_finite(),
            ComplexRate::Pair([a, b]) => a.is_finite() && b.is_finite(),
        };
        if !finite {
            errs.push(format!("{name} must be finite"));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::Validation(errs))
    }
}

fn rate_number(r: Rate) -> f64 {
    match r {
        Rate::Plain(v) => v,
        Rate::Scaled(s) => s.value,
    }
}

/// Physical parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPhysics {
    pub scheme: LevelScheme,
    pub drive: DriveConfig,
    pub thermal: ThermalParameters,
    pub transitions: OpticalTransitions,
}

impl ScenarioConfig {
    pub fn resolve(&self) -> ResolvedPhysics {
        let a = &self.atom;
        let si = |v: f64| a.unit.to_si(v);
        let mut scheme = LevelScheme {
            gamma31: si(a.gamma31),
            gamma32: si(a.gamma32),
            gamma41: si(a.gamma41),
            gamma42: si(a.gamma42),
            gamma51: si(a.gamma51),
            gamma52: si(a.gamma52),
            gamma21: 0.0,
        };
        scheme.gamma21 = match a.gamma21 {
            Rate::Plain(v) => si(v),
            Rate::Scaled(s) => s.value * reference(&scheme, s.of),
        };
        let rate = |r: Rate| match r {
            Rate::Plain(v) => v * scheme.gamma31,
            Rate::Scaled(s) => s.value * reference(&scheme, s.of),
        };
        let complex = |r: ComplexRate| match r {
            ComplexRate::Real(r) => Complex64::new(rate(r), 0.0),
            ComplexRate::Pair([re, im]) => Complex64::new(re, im) * scheme.gamma31,
        };
        let drive = DriveConfig {
            omega_c1: complex(self.drive.omega_c1),
            omega_c2: complex(self.drive.omega_c2),
            delta_c1: rate(self.drive.delta_c1),
            delta_c2: rate(self.drive.delta_c2),
            pump_p: rate(self.drive.pump_p),
        };
        let t = &self.thermal;
        let v_th = t.v_th.unwrap_or_else(|| {
            ThermalParameters::thermal_velocity(t.temperature, t.mass_amu.unwrap_or(f64::NAN) * AMU)
        });
        let gamma_c = match (t.gamma_c, t.gamma_c_per_doppler) {
            (Some(g), _) => rate(g),
            (None, Some(m)) => m * t.delta_k * v_th,
            (None, None) => f64::NAN,
        };
        ResolvedPhysics {
            scheme,
            drive,
            thermal: ThermalParameters { temperature: t.temperature, v_th, gamma_c, delta_k: t.delta_k, n0: t.n0 },
            transitions: OpticalTransitions { lambda_p: self.transitions.lambda_p, lambda_s: self.transitions.lambda_s },
        }
    }

    /// Same scenario at a different pump rate (units of Γ31).
    pub fn with_pump(&self, p_over_gamma31: f64) -> Self {
        let mut c = self.clone();
        c.drive.pump_p = Rate::Plain(p_over_gamma31);
        c
    }

    /// Beam radius that sets z_R.
    pub fn reference_width(&self) -> f64 {
        match &self.beam {
            BeamSpec::Gaussian { w_p0, .. } => *w_p0,
            BeamSpec::Image { reference_width, .. } => *reference_width,
        }
    }
}

fn reference(s: &LevelScheme, r: RateRef) -> f64 {
    match r {
        RateRef::Gamma31 => s.gamma31,
        RateRef::Gamma32 => s.gamma32,
        RateRef::Gamma41 => s.gamma41,
        RateRef::Gamma42 => s.gamma42,
        RateRef::Gamma51 => s.gamma51,
        RateRef::Gamma52 => s.gamma52,
    }
}

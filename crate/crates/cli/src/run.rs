//! Scenario orchestration: atom → susceptibility → propagation → diagnostics → files.

use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use fwm_vapor::atom::{self, AtomError, DensityMatrix};
use fwm_vapor::beamprop::{
    build_plan, gaussian_input, make_grid, propagate_with, rayleigh_length, vacuum_plan, write_snapshot,
    BeamError, FieldPair, PropagationPlan, Space, SusceptibilityTable, TransverseGrid,
};
use fwm_vapor::diagnostics::{balance_point, beam_metrics, write_metrics_csv, MetricsRow};
use fwm_vapor::susceptibility::{
    bandwidth_scales, calibrate_density, diffraction_flatness, optimal_detuning, write_susceptibility_csv,
    Medium, SusceptibilityError, CALIBRATION_PROBE_FRACTION,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{BeamSpec, ConfigError, DensitySpec, DetuningSpec, ResolvedPhysics, ScenarioConfig, RUN_META_KEY};
use crate::image_io::{load_image, ImageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SteadyState,
    Susceptibility,
    Propagate,
    SweepPump,
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SteadyState => "steady-state",
            Command::Susceptibility => "susceptibility",
            Command::Propagate => "propagate",
            Command::SweepPump => "sweep-pump",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("atom: {0}")]
    Atom(#[from] AtomError),
    #[error("susceptibility: {0}")]
    Susceptibility(#[from] SusceptibilityError),
    #[error("propagation: {0}")]
    Beam(#[from] BeamError),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// 2 for configuration problems, 3 for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Image(_) => 2,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(ConfigError::Parse { .. }) => "parse",
            RunError::Config(ConfigError::Validation(_)) => "validation",
            RunError::Image(_) => "image",
            RunError::Atom(_) => "atom",
            RunError::Susceptibility(_) => "susceptibility",
            RunError::Beam(_) => "propagation",
            RunError::Numeric(_) => "numeric",
            RunError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> Value {
        let details = match self {
            RunError::Config(ConfigError::Validation(errs)) => json!(errs),
            RunError::Config(ConfigError::Parse { line, column, .. }) => json!({ "line": line, "column": column }),
            _ => Value::Null,
        };
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.to_string(), "details": details } })
    }
}

/// The medium resolved for one parameter set.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub physics: ResolvedPhysics,
    pub state: DensityMatrix,
    pub delta_opt: f64,
    pub medium: Medium,
    pub n0: f64,
    pub k0: f64,
    pub k1: f64,
}

pub fn prepare(config: &ScenarioConfig) -> Result<Prepared, RunError> {
    let mut physics = config.resolve();
    physics.scheme.validate()?;
    physics.drive.validate()?;
    physics.thermal.validate()?;
    let ResolvedPhysics { scheme, drive, thermal, transitions } = &physics;
    let state = atom::solve_zeroth_order(scheme, drive)?;
    let (mode, rule) = (config.run.k_mode, config.run.detuning_rule);
    let delta_opt = optimal_detuning(scheme, drive, thermal, transitions, mode, rule);
    let delta = match config.run.detuning {
        DetuningSpec::Optimal => delta_opt,
        DetuningSpec::Explicit(d) => d * scheme.gamma31,
    };
    let mut medium = Medium::new(scheme, drive, thermal, transitions, &state, delta, mode);
    let n0 = match config.run.density {
        DensitySpec::Explicit => thermal.n0,
        DensitySpec::Calibrated => calibrate_density(&medium, thermal.n0)?,
    };
    medium = medium.with_density(n0);
    physics.thermal.n0 = n0;
    let scales = bandwidth_scales(&physics.scheme, &physics.drive, &physics.thermal, medium.k_factors());
    Ok(Prepared { physics, state, delta_opt, medium, n0, k0: scales.k0, k1: scales.k1 })
}

fn c2(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn resolved_json(config: &ScenarioConfig, p: &Prepared) -> Value {
    let ResolvedPhysics { scheme, drive, thermal, transitions } = &p.physics;
    let k = p.medium.k_factors();
    let rates = p.medium.rates();
    json!({
        "scheme": scheme,
        "drive": {
            "omega_c1": c2(drive.omega_c1),
            "omega_c2": c2(drive.omega_c2),
            "delta_c1": drive.delta_c1,
            "delta_c2": drive.delta_c2,
            "pump_p": drive.pump_p,
        },
        "thermal": thermal,
        "transitions": transitions,
        "units": "SI: rad/s, m, 1/m, 1/m^3, s",
        "delta": p.medium.delta(),
        "delta_opt": p.delta_opt,
        "n0": p.n0,
        "n0_calibrated": config.run.density == DensitySpec::Calibrated,
        "k0": p.k0,
        "k1": p.k1,
        "alpha": rates.alpha(),
        "gamma1": c2(rates.gamma1),
        "gamma_c1": rates.gamma_c1,
        "k31": c2(k.k31),
        "k41": c2(k.k41),
        "k_mode": k.mode,
        "k31_imaginary_fraction": k.discarded31,
        "k41_imaginary_fraction": k.discarded41,
        "dicke_ratio": thermal.dicke_ratio(drive.pump_p),
        "dicke_warning": thermal.dicke_warning(drive.pump_p),
        "z_r": rayleigh_length(config.reference_width(), transitions.lambda_p),
    })
}

#[derive(Serialize)]
struct SteadyStateFile {
    rho: Vec<Vec<[f64; 2]>>,
    populations: Vec<f64>,
    trace: f64,
    hermiticity_defect: f64,
    min_eigenvalue: f64,
    residual: f64,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| RunError::Numeric(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn write_steady_state(out: &Path, p: &Prepared) -> Result<(), RunError> {
    let rho = &p.state;
    let l = atom::build_liouvillian(&p.physics.scheme, &p.physics.drive);
    let file = SteadyStateFile {
        rho: (1..=5).map(|i| (1..=5).map(|j| [rho.at(i, j).re, rho.at(i, j).im]).collect()).collect(),
        populations: (1..=5).map(|i| rho.population(i)).collect(),
        trace: rho.trace().re,
        hermiticity_defect: rho.hermiticity_defect(),
        min_eigenvalue: rho.eigenvalues()[0],
        residual: l.residual(rho),
    };
    write_json(&out.join("steady_state.json"), &file)
}

fn write_susceptibility(out: &Path, config: &ScenarioConfig, p: &Prepared) -> Result<(), RunError> {
    let n = config.run.susceptibility_rows;
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let k = 2.0 * p.k1 * i as f64 / (n - 1) as f64;
            (k, p.medium.chi(k))
        })
        .collect();
    write_susceptibility_csv(BufWriter::new(File::create(out.join("susceptibility.csv"))?), &rows)?;
    Ok(())
}

/// Resolves the image path against `base_dir` so the embedded config is location independent.
pub fn portable_config(config: &ScenarioConfig, base_dir: &Path) -> ScenarioConfig {
    let mut c = config.clone();
    if let BeamSpec::Image { path, .. } = &mut c.beam {
        let joined = base_dir.join(&*path);
        *path = joined.canonicalize().unwrap_or(joined);
    }
    c
}

fn write_meta(out: &Path, command: Command, config: &ScenarioConfig, resolved: Value, results: Value) -> Result<(), RunError> {
    let meta = json!({
        RUN_META_KEY: 1,
        "command": command.name(),
        "software": { "name": "fwm-vapor", "version": env!("CARGO_PKG_VERSION") },
        "config": config,
        "resolved": resolved,
        "results": results,
    });
    write_json(&out.join("run_meta.json"), &meta)
}

fn input_field(config: &ScenarioConfig, grid: &TransverseGrid) -> Result<FieldPair, RunError> {
    Ok(match &config.beam {
        BeamSpec::Gaussian { w_p0, amplitude } => gaussian_input(grid, *w_p0, *amplitude)
            .map_err(|e| RunError::Config(ConfigError::Validation(vec![format!("beam: {e}")])))?,
        BeamSpec::Image { path, threshold, width_scale, .. } => load_image(path, grid, *threshold, *width_scale)?,
    })
}

/// Result of a propagation run.
#[derive(Debug, Clone)]
pub struct PropagationSummary {
    pub prepared: Prepared,
    pub z_r: f64,
    pub rows: Vec<MetricsRow>,
    pub input: FieldPair,
    pub output: FieldPair,
    pub input_power: f64,
    pub balance_point: Option<f64>,
}

impl PropagationSummary {
    pub fn last(&self) -> &MetricsRow {
        self.rows.last().expect("at least one row")
    }
}

fn make_plan(config: &ScenarioConfig, p: &Prepared, grid: &TransverseGrid, dz: f64) -> Result<PropagationPlan, RunError> {
    let tr = &p.physics.transitions;
    if config.run.vacuum {
        return Ok(vacuum_plan(grid, tr, dz));
    }
    grid.check_bandwidth(p.k1)
        .map_err(|e| RunError::Config(ConfigError::Validation(vec![format!("grid: {e}")])))?;
    let table = SusceptibilityTable::for_grid(&p.medium, grid);
    Ok(build_plan(grid, &table, tr, dz)?)
}

/// Propagates the configured beam; exports snapshots into `snapshot_dir` when given.
pub fn run_propagation(config: &ScenarioConfig, snapshot_dir: Option<&Path>) -> Result<PropagationSummary, RunError> {
    let prepared = prepare(config)?;
    let g = &config.grid;
    let grid = make_grid(g.nx, g.ny, g.dx, g.dy)?;
    let input = input_field(config, &grid)?;
    let z_r = rayleigh_length(config.reference_width(), prepared.physics.transitions.lambda_p);
    let z_total = config.run.z_total * z_r;
    let steps = config.run.snapshots;
    let dz = if z_total > 0.0 { z_total / steps as f64 } else { z_r };
    let plan = make_plan(config, &prepared, &grid, dz)?;
    let input_power = input.power_p();
    let export_every = config.run.export_every;

    let mut rows = Vec::with_capacity(steps + 1);
    let mut last_frame = None;
    let mut io_error = None;
    let mut index = 0usize;
    propagate_with(&input, &plan, z_total, 1, Space::Position, |z, f| {
        rows.push(MetricsRow { z, probe: beam_metrics(&f.omega_p, &f.grid), signal: beam_metrics(&f.omega_s, &f.grid) });
        let is_last = (z - z_total).abs() <= 1e-12 * z_total.max(1e-300) || z_total == 0.0;
        let due = index == 0 || is_last || export_every.is_some_and(|e| index % e == 0);
        if let (Some(dir), true, None) = (snapshot_dir, due, &io_error) {
            if let Err(e) = write_snapshot(dir, &format!("step{index:05}"), f, z) {
                io_error = Some(e);
            }
        }
        if is_last {
            last_frame = Some(f.clone());
        }
        index += 1;
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let output = last_frame.ok_or_else(|| RunError::Numeric("propagation produced no final plane".into()))?;
    let z: Vec<f64> = rows.iter().map(|r| r.z).collect();
    let pp: Vec<f64> = rows.iter().map(|r| r.probe.power).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r.signal.power).collect();
    let balance = balance_point(&z, &pp, &ps, z_r).ok();
    Ok(PropagationSummary { prepared, z_r, rows, input, output, input_power, balance_point: balance })
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

fn results_json(s: &PropagationSummary, w_ref: f64) -> Value {
    let last = s.last();
    json!({
        "z_total": last.z,
        "probe_power": last.probe.power / s.input_power,
        "signal_power": last.signal.power / s.input_power,
        "probe_width_fit_ratio": opt(last.probe.width_fit.map(|w| w / w_ref)),
        "signal_width_fit_ratio": opt(last.signal.width_fit.map(|w| w / w_ref)),
        "probe_width_rms_ratio": last.probe.width_rms / w_ref,
        "signal_width_rms_ratio": last.signal.width_rms / w_ref,
        "probe_peak": last.probe.peak,
        "signal_peak": last.signal.peak,
        "balance_point_over_z_r": opt(s.balance_point.map(|z| z / s.z_r)),
    })
}

/// One row of a pump sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub p_over_gamma31: f64,
    pub n0: f64,
    pub delta: f64,
    pub k1: f64,
    pub metrics: MetricsRow,
}

/// Output at z_total for each pump rate of the sweep.
///
/// The density is resolved once at the configured pump rate (calibrated if
/// requested) and held fixed while p varies; Δ follows the detuning rule at
/// every point.
pub fn run_sweep(config: &ScenarioConfig) -> Result<(Vec<SweepRow>, f64), RunError> {
    let sweep = config
        .run
        .sweep
        .ok_or_else(|| RunError::Config(ConfigError::Validation(vec!["run.sweep is required for sweep-pump".into()])))?;
    let g = &config.grid;
    let grid = make_grid(g.nx, g.ny, g.dx, g.dy)?;
    let input = input_field(config, &grid)?;
    let input_power = input.power_p();
    let n0 = prepare(config)?.n0;
    let mut fixed = config.clone();
    fixed.thermal.n0 = n0;
    fixed.run.density = DensitySpec::Explicit;
    let mut rows = Vec::with_capacity(sweep.points);
    for i in 0..sweep.points {
        let p = sweep.pump_min + (sweep.pump_max - sweep.pump_min) * i as f64 / (sweep.points - 1) as f64;
        let c = fixed.with_pump(p);
        let prepared = prepare(&c)?;
        let z_r = rayleigh_length(c.reference_width(), prepared.physics.transitions.lambda_p);
        let z_total = c.run.z_total * z_r;
        let plan = make_plan(&c, &prepared, &grid, z_total.max(z_r * 1e-6))?;
        let mut last = None;
        propagate_with(&input, &plan, z_total, usize::MAX, Space::Position, |z, f| {
            last = Some(MetricsRow { z, probe: beam_metrics(&f.omega_p, &f.grid), signal: beam_metrics(&f.omega_s, &f.grid) });
        })?;
        rows.push(SweepRow {
            p_over_gamma31: p,
            n0: prepared.n0,
            delta: prepared.medium.delta(),
            k1: prepared.k1,
            metrics: last.expect("final plane"),
        });
    }
    Ok((rows, input_power))
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow], input_power: f64) -> io::Result<()> {
    use std::io::Write;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "p_over_gamma31,n0,delta,k1,P_p,P_s,w_p_fit,w_s_fit,w_p_rms,w_s_rms,peak_p,peak_s")?;
    for r in rows {
        let m = &r.metrics;
        let v = [
            r.p_over_gamma31,
            r.n0,
            r.delta,
            r.k1,
            m.probe.power / input_power,
            m.signal.power / input_power,
            m.probe.width_fit.unwrap_or(f64::NAN),
            m.signal.width_fit.unwrap_or(f64::NAN),
            m.probe.width_rms,
            m.signal.width_rms,
            m.probe.peak,
            m.signal.peak,
        ];
        let line: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

/// Runs `command` and writes its artifacts into `out`.
///
/// `base_dir` resolves relative image paths.
pub fn run_scenario(command: Command, config: &ScenarioConfig, base_dir: &Path, out: &Path) -> Result<Value, RunError> {
    let config = portable_config(config, base_dir);
    fs::create_dir_all(out)?;
    let w_ref = config.reference_width();
    match command {
        Command::SteadyState => {
            let p = prepare(&config)?;
            write_steady_state(out, &p)?;
            let resolved = resolved_json(&config, &p);
            write_meta(out, command, &config, resolved, Value::Null)?;
            Ok(json!({ "populations": (1..=5).map(|i| p.state.population(i)).collect::<Vec<_>>() }))
        }
        Command::Susceptibility => {
            let p = prepare(&config)?;
            write_steady_state(out, &p)?;
            write_susceptibility(out, &config, &p)?;
            let resolved = resolved_json(&config, &p);
            write_meta(out, command, &config, resolved, Value::Null)?;
            Ok(json!({ "k1": p.k1, "delta_opt": p.delta_opt }))
        }
        Command::Calibrate => {
            let mut explicit = config.clone();
            explicit.run.density = DensitySpec::Explicit;
            let p = prepare(&explicit)?;
            let n0 = calibrate_density(&p.medium, p.n0)?;
            let k = CALIBRATION_PROBE_FRACTION * p.k1;
            let calibrated = p.medium.with_density(n0);
            let results = json!({
                "n0": n0,
                "n0_guess": p.n0,
                "probe_k": k,
                "flatness_at_guess": diffraction_flatness(&p.medium, k),
                "flatness_at_root": diffraction_flatness(&calibrated, k),
                "delta": p.medium.delta(),
                "k1": p.k1,
            });
            write_json(&out.join("calibration.json"), &results)?;
            let resolved = resolved_json(&config, &p);
            write_meta(out, command, &config, resolved, results.clone())?;
            Ok(results)
        }
        Command::Propagate => {
            let snapshots = out.join("snapshots");
            fs::create_dir_all(&snapshots)?;
            let s = run_propagation(&config, Some(&snapshots))?;
            write_metrics_csv(BufWriter::new(File::create(out.join("metrics.csv"))?), &s.rows, s.input_power)?;
            write_steady_state(out, &s.prepared)?;
            write_susceptibility(out, &config, &s.prepared)?;
            let results = results_json(&s, w_ref);
            let resolved = resolved_json(&config, &s.prepared);
            write_meta(out, command, &config, resolved, results.clone())?;
            Ok(results)
        }
        Command::SweepPump => {
            let (rows, input_power) = run_sweep(&config)?;
            write_sweep_csv(&out.join("sweep.csv"), &rows, input_power)?;
            let p = prepare(&config)?;
            let resolved = resolved_json(&config, &p);
            let results = json!({ "points": rows.len() });
            write_meta(out, command, &config, resolved, results.clone())?;
            Ok(results)
        }
    }
}

/// Output directory from the command line, else the config, else `./out`.
pub fn output_dir(cli: Option<PathBuf>, config: &ScenarioConfig, base_dir: &Path) -> PathBuf {
    cli.or_else(|| config.output.as_ref().map(|o| base_dir.join(o))).unwrap_or_else(|| PathBuf::from("out"))
}

//! Beam observables: power, widths, probe/signal balance and image fidelity.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::beamprop::TransverseGrid;
use crate::reduce::{sum, sum_array};

/// Fits with a relative residual above this are rejected.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.2;
/// Minimum number of z samples for the balance detector.
pub const BALANCE_MIN_SAMPLES: usize = 50;
/// Threshold on |d(Ps/Pp)/dz| in units of 1/z_R.
pub const BALANCE_SLOPE: f64 = 0.05;
/// Samples after the candidate that must also satisfy the threshold.
pub const BALANCE_HOLD: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("Gaussian fit residual {residual:.3} exceeds {FIT_RESIDUAL_LIMIT}; rms width {width_rms:.6e} m")]
    FitFailed { residual: f64, width_rms: f64 },
    #[error("balance criterion never satisfied")]
    NotReached,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("image has zero variance")]
    DegenerateImage,
    #[error("length mismatch: {0} vs {1}")]
    ShapeMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamMetrics {
    /// Σ|Ω|² dx dy
    pub power: f64,
    /// 1/√e amplitude radius of the least-squares Gaussian fit [m].
    pub width_fit: Option<f64>,
    /// sqrt(⟨r²⟩) over |Ω|² about the centroid [m].
    pub width_rms: f64,
    /// max |Ω|
    pub peak: f64,
    /// ‖|Ω| − fit‖ / ‖Ω‖
    pub fit_residual: f64,
}

impl BeamMetrics {
    pub fn fitted_width(&self) -> Result<f64, DiagnosticsError> {
        self.width_fit.ok_or(DiagnosticsError::FitFailed {
            residual: self.fit_residual,
            width_rms: self.width_rms,
        })
    }
}

/// Power, rms and fitted widths and peak of a position-space field.
///
/// The fit model is A exp(−r²/2w²) about the intensity centroid, solved by
/// damped Gauss–Newton seeded with the rms width.
pub fn beam_metrics(field: &[Complex64], grid: &TransverseGrid) -> BeamMetrics {
    let nx = grid.nx;
    let samples: Vec<(f64, f64, f64)> = field
        .par_iter()
        .enumerate()
        .map(|(idx, v)| (grid.x(idx % nx), grid.y(idx / nx), v.norm()))
        .collect();
    let total = sum(samples.len(), |i| samples[i].2 * samples[i].2);
    let power = total * grid.cell_area();
    let peak = samples.par_iter().map(|s| s.2).reduce(|| 0.0, f64::max);
    if total == 0.0 {
        return BeamMetrics { power, width_fit: None, width_rms: 0.0, peak, fit_residual: f64::INFINITY };
    }
    let [mx, my] = sum_array(samples.len(), |i| {
        let (x, y, a) = samples[i];
        [x * a * a, y * a * a]
    });
    let (cx, cy) = (mx / total, my / total);
    let r2_amp: Vec<(f64, f64)> =
        samples.par_iter().map(|&(x, y, a)| ((x - cx).powi(2) + (y - cy).powi(2), a)).collect();
    let width_rms = (sum(r2_amp.len(), |i| r2_amp[i].0 * r2_amp[i].1 * r2_amp[i].1) / total).sqrt();

    let (width_fit, fit_residual) = fit_gaussian(&r2_amp, peak, width_rms, total);
    let width_fit = (fit_residual <= FIT_RESIDUAL_LIMIT).then_some(width_fit);
    BeamMetrics { power, width_fit, width_rms, peak, fit_residual }
}

fn sum_sq_residual(data: &[(f64, f64)], amp: f64, w: f64) -> f64 {
    let inv = 1.0 / (2.0 * w * w);
    sum(data.len(), |i| {
        let (r2, a) = data[i];
        (a - amp * (-r2 * inv).exp()).powi(2)
    })
}

fn fit_gaussian(data: &[(f64, f64)], amp0: f64, w0: f64, total: f64) -> (f64, f64) {
    let (mut amp, mut w) = (amp0, w0);
    let mut cost = sum_sq_residual(data, amp, w);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let inv = 1.0 / (2.0 * w * w);
        // normal equations for (A, w)
        let [jaa, jaw, jww, ga, gw] = sum_array(data.len(), |i| {
            let (r2, a) = data[i];
            let e = (-r2 * inv).exp();
            let dw = amp * e * r2 / (w * w * w);
            let res = a - amp * e;
            [e * e, e * dw, dw * dw, e * res, dw * res]
        });
        let mut accepted = false;
        while lambda < 1e12 {
            let (m00, m11) = (jaa * (1.0 + lambda), jww * (1.0 + lambda));
            let det = m00 * m11 - jaw * jaw;
            let step_a = (m11 * ga - jaw * gw) / det;
            let step_w = (m00 * gw - jaw * ga) / det;
            let (na, nw) = (amp + step_a, w + step_w);
            if nw > 0.0 && det.is_finite() && det != 0.0 {
                let c = sum_sq_residual(data, na, nw);
                if c <= cost {
                    let converged = (step_w / w).abs() < 1e-13 && (step_a / amp).abs() < 1e-13;
                    (amp, w, cost) = (na, nw, c);
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if converged {
                        return (w, (cost / total).sqrt());
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    (w, (cost / total).sqrt())
}

/// First z where |d(Ps/Pp)/dz| < 0.05/z_R holds there and for the next five samples.
pub fn balance_point(z: &[f64], power_p: &[f64], power_s: &[f64], z_r: f64) -> Result<f64, DiagnosticsError> {
    let n = z.len();
    if power_p.len() != n {
        return Err(DiagnosticsError::ShapeMismatch(n, power_p.len()));
    }
    if power_s.len() != n {
        return Err(DiagnosticsError::ShapeMismatch(n, power_s.len()));
    }
    if n < BALANCE_MIN_SAMPLES {
        return Err(DiagnosticsError::TooFewSamples { needed: BALANCE_MIN_SAMPLES, got: n });
    }
    if power_s.iter().all(|&p| p == 0.0) || power_p.iter().any(|&p| p <= 0.0) {
        return Err(DiagnosticsError::NotReached);
    }
    let ratio: Vec<f64> = power_s.iter().zip(power_p).map(|(s, p)| s / p).collect();
    let slope: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (ratio[b] - ratio[a]) / (z[b] - z[a])
        })
        .collect();
    let limit = BALANCE_SLOPE / z_r;
    (0..n.saturating_sub(BALANCE_HOLD))
        .find(|&i| slope[i..=i + BALANCE_HOLD].iter().all(|s| s.abs() < limit))
        .map(|i| z[i])
        .ok_or(DiagnosticsError::NotReached)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    /// Pearson correlation in [−1, 1].
    pub correlation: f64,
    /// ‖A − gB‖ / ‖A‖ with the least-squares gain g.
    pub nrmse: f64,
}

/// Compares two intensity images on the same grid.
pub fn image_fidelity(reference: &[f64], candidate: &[f64]) -> Result<FidelityReport, DiagnosticsError> {
    if reference.len() != candidate.len() {
        return Err(DiagnosticsError::ShapeMismatch(reference.len(), candidate.len()));
    }
    let n = reference.len() as f64;
    let ma = reference.iter().sum::<f64>() / n;
    let mb = candidate.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb, mut dot, mut bb, mut aa) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in reference.iter().zip(candidate) {
        sab += (a - ma) * (b - mb);
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
        dot += a * b;
        bb += b * b;
        aa += a * a;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(DiagnosticsError::DegenerateImage);
    }
    let gain = dot / bb;
    let err: f64 = reference.iter().zip(candidate).map(|(a, b)| (a - gain * b).powi(2)).sum();
    Ok(FidelityReport { correlation: (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0), nrmse: (err / aa).sqrt() })
}

/// One row of the per-snapshot metrics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRow {
    pub z: f64,
    pub probe: BeamMetrics,
    pub signal: BeamMetrics,
}

/// Writes z, normalized powers, fitted and rms widths [m] and peaks, 17 significant digits.
///
/// Powers are divided by `input_power`; unavailable fits are written as NaN.
pub fn write_metrics_csv<W: Write>(mut out: W, rows: &[MetricsRow], input_power: f64) -> io::Result<()> {
    writeln!(out, "z,P_p,P_s,w_p_fit,w_s_fit,w_p_rms,w_s_rms,peak_p,peak_s")?;
    for r in rows {
        let values = [
            r.z,
            r.probe.power / input_power,
            r.signal.power / input_power,
            r.probe.width_fit.unwrap_or(f64::NAN),
            r.signal.width_fit.unwrap_or(f64::NAN),
            r.probe.width_rms,
            r.signal.width_rms,
            r.probe.peak,
            r.signal.peak,
        ];
        let line: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

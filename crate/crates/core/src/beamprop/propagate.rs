use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{BeamError, Fft2, FieldPair, PropagationPlan, Space};

/// Snapshots along z, in the requested space.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub z: Vec<f64>,
    pub frames: Vec<FieldPair>,
}

fn apply(transfers: &[Matrix2<Complex64>], p: &mut [Complex64], s: &mut [Complex64]) {
    p.par_iter_mut().zip(s.par_iter_mut()).zip(transfers.par_iter()).for_each(|((p, s), t)| {
        let (a, b) = (*p, *s);
        *p = t[(0, 0)] * a + t[(0, 1)] * b;
        *s = t[(1, 0)] * a + t[(1, 1)] * b;
    });
}

/// Steps `fields` through `plan` up to `z_total`, calling `observer(z, fields)`
/// at z = 0, every `snapshot_stride` steps and at z_total.
///
/// A final partial step covers any remainder of z_total / dz. The observer
/// receives fields in `space`; the returned field is in momentum space.
pub fn propagate_with<F>(
    fields: &FieldPair,
    plan: &PropagationPlan,
    z_total: f64,
    snapshot_stride: usize,
    space: Space,
    mut observer: F,
) -> Result<FieldPair, BeamError>
where
    F: FnMut(f64, &FieldPair),
{
    let g = &plan.grid;
    if (g.nx, g.ny, g.dx, g.dy) != (fields.grid.nx, fields.grid.ny, fields.grid.dx, fields.grid.dy) {
        return Err(BeamError::GridMismatch);
    }
    if !(z_total.is_finite() && z_total >= 0.0) {
        return Err(BeamError::BadGrid(format!("z_total = {z_total} must be non-negative")));
    }
    let stride = snapshot_stride.max(1);
    let fft = Fft2::new(g.nx, g.ny);
    let mut state = fields.clone().into_space(&fft, Space::Momentum);
    let mut emit = |z: f64, state: &FieldPair| {
        if space == Space::Momentum {
            observer(z, state);
        } else {
            observer(z, &state.clone().into_space(&fft, space));
        }
    };

    let ratio = z_total / plan.dz;
    let mut steps = ratio.floor() as usize;
    if ratio - steps as f64 > 1.0 - 1e-9 {
        steps += 1;
    }
    let remainder = z_total - steps as f64 * plan.dz;
    let has_tail = remainder > 1e-9 * plan.dz;

    emit(0.0, &state);
    for n in 1..=steps {
        apply(plan.transfers(), &mut state.omega_p, &mut state.omega_s);
        let last = n == steps && !has_tail;
        if n % stride == 0 || last {
            let z = if last { z_total } else { n as f64 * plan.dz };
            emit(z, &state);
        }
    }
    if has_tail {
        let tail = plan.transfers_for(remainder);
        apply(&tail, &mut state.omega_p, &mut state.omega_s);
        emit(z_total, &state);
    }
    Ok(state)
}

/// Collects snapshots in position space.
pub fn propagate(
    fields: &FieldPair,
    plan: &PropagationPlan,
    z_total: f64,
    snapshot_stride: usize,
) -> Result<Trajectory, BeamError> {
    let mut traj = Trajectory { z: Vec::new(), frames: Vec::new() };
    propagate_with(fields, plan, z_total, snapshot_stride, Space::Position, |z, f| {
        traj.z.push(z);
        traj.frames.push(f.clone());
    })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamprop::{gaussian_input, make_grid, vacuum_plan};
    use crate::presets;

    #[test]
    fn zero_distance_is_identity() {
        let g = make_grid(64, 64, 12.5e-6, 12.5e-6).unwrap();
        let f = gaussian_input(&g, 100e-6, 1.0).unwrap();
        let plan = vacuum_plan(&g, &presets::rb87_transitions(), 1e-3);
        let t = propagate(&f, &plan, 0.0, 1).unwrap();
        assert_eq!(t.z, vec![0.0]);
        for (a, b) in t.frames[0].omega_p.iter().zip(&f.omega_p) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn snapshots_land_on_requested_planes() {
        let g = make_grid(64, 64, 6.25e-6, 6.25e-6).unwrap();
        let f = gaussian_input(&g, 50e-6, 1.0).unwrap();
        let plan = vacuum_plan(&g, &presets::rb87_transitions(), 1e-3);
        let t = propagate(&f, &plan, 10.5e-3, 4).unwrap();
        assert_eq!(t.z.len(), 4);
        assert!((t.z[1] - 4e-3).abs() < 1e-15 && (t.z[2] - 8e-3).abs() < 1e-15);
        assert_eq!(t.z[3], 10.5e-3);
    }
}

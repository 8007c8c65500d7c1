//! Momentum-space propagation of the coupled probe/signal pair.
//!
//! The medium is uniform along z and linear in the weak fields, so every
//! transverse mode evolves independently under dΩ/dz = i A(k⊥) Ω. The
//! propagator precomputes T = exp(i A Δz) per mode and applies it repeatedly.

mod export;
mod fft;
mod field;
mod grid;
mod plan;
mod propagate;
mod table;

use thiserror::Error;

pub use export::{write_field_binary, write_intensity_pgm, write_snapshot, SnapshotSidecar};
pub use fft::Fft2;
pub use field::{gaussian_input, transform, Direction, FieldPair, Space};
pub use grid::{make_grid, TransverseGrid};
pub use plan::{build_plan, transfer_matrix, vacuum_plan, PlanKind, PropagationPlan};
pub use propagate::{propagate, propagate_with, Trajectory};
pub use table::{SusceptibilityTable, TABLE_SAMPLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamError {
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("field is in {found:?} space, expected {expected:?}")]
    WrongSpace { expected: Space, found: Space },
    #[error("k = {k:.6e} 1/m exceeds susceptibility table range {max:.6e} 1/m")]
    TableRange { k: f64, max: f64 },
    #[error("grid mismatch between field and plan")]
    GridMismatch,
}

/// z_R = π w0² / λ · 2 = 2π w0² / λ for a Gaussian with amplitude exp(−r²/2w0²).
pub fn rayleigh_length(w0: f64, lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * w0 * w0 / lambda
}

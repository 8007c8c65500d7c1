//! Diffractionless propagation and frequency conversion of transverse images
//! through a thermal vapor driven in a double-Λ four-wave-mixing scheme.
//!
//! The pipeline is
//!
//! 1. [`atom`]: zeroth-order steady state of the five-level atom under two
//!    control fields and an incoherent pump,
//! 2. [`susceptibility`]: momentum-space susceptibilities of the moving atoms,
//! 3. [`beamprop`]: exact per-mode propagation of the probe/signal pair,
//! 4. [`diagnostics`]: powers, widths, balance point and image fidelity.
//!
//! ```
//! use fwm_vapor::{atom, presets, susceptibility as sus};
//!
//! let (scheme, drive) = presets::rb87_scheme_and_drive(0.7);
//! let rho = atom::solve_zeroth_order(&scheme, &drive).unwrap();
//! assert!((rho.trace().re - 1.0).abs() < 1e-12);
//!
//! let thermal = presets::pumped_thermal();
//! let tr = presets::rb87_transitions();
//! let dicke = sus::chi_dicke(&rho, &thermal, &tr, &scheme, &drive, sus::KMode::Complex);
//! assert!(dicke.delta_opt < 0.0 && dicke.k1 > 0.0);
//! ```

pub mod atom;
pub mod beamprop;
pub mod diagnostics;
pub mod doppler;
pub mod presets;
mod reduce;
pub mod susceptibility;

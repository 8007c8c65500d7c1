//! Zeroth-order state of the five-level atom.
//!
//! Levels are labelled 1..=5 as in the usual double-Λ notation: |1⟩ and |2⟩
//! are the ground states, |3⟩ and |4⟩ the excited states of the probe and
//! signal transitions, and |5⟩ the auxiliary state of the incoherent pump.
//! Control field c1 drives |2⟩↔|3⟩ and c2 drives |2⟩↔|4⟩. Probe and signal are
//! absent here; they only enter through first-order response functions.
//!
//! Density matrices are vectorized by column stacking, so the element
//! ρ_ij (1-based levels) sits at index `(j - 1) * 5 + (i - 1)`.

use nalgebra::{DMatrix, DVector, Matrix5, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of atomic levels.
pub const LEVELS: usize = 5;
const DIM: usize = LEVELS * LEVELS;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomError {
    #[error("rate `{name}` must be finite and non-negative, got {value}")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("steady state is not unique: numerical null space has dimension {dimension}")]
    DegenerateSteadyState { dimension: usize },
}

/// Spontaneous decay and ground-state dephasing rates [rad/s].
///
/// `gamma_ik` is the partial decay rate from |i⟩ into |k⟩. Total decay rates
/// are always derived from the partial ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    pub gamma51: f64,
    pub gamma52: f64,
    pub gamma21: f64,
}

impl LevelScheme {
    pub fn gamma3(&self) -> f64 {
        self.gamma31 + self.gamma32
    }

    pub fn gamma4(&self) -> f64 {
        self.gamma41 + self.gamma42
    }

    pub fn gamma5(&self) -> f64 {
        self.gamma51 + self.gamma52
    }

    pub fn validate(&self) -> Result<(), AtomError> {
        let named = [
            ("gamma31", self.gamma31),
            ("gamma32", self.gamma32),
            ("gamma41", self.gamma41),
            ("gamma42", self.gamma42),
            ("gamma51", self.gamma51),
            ("gamma52", self.gamma52),
            ("gamma21", self.gamma21),
        ];
        check_rates(&named)
    }
}

/// Control fields and incoherent pump, all in [rad/s].
///
/// Rabi frequencies follow the half-Rabi convention Ω = μ·E/2ħ and may carry
/// a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub omega_c1: Complex64,
    pub omega_c2: Complex64,
    pub delta_c1: f64,
    pub delta_c2: f64,
    pub pump_p: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<(), AtomError> {
        check_rates(&[("pump_p", self.pump_p)])?;
        for (name, v) in [
            ("omega_c1", self.omega_c1.norm()),
            ("omega_c2", self.omega_c2.norm()),
            ("delta_c1", self.delta_c1),
            ("delta_c2", self.delta_c2),
        ] {
            if !v.is_finite() {
                return Err(AtomError::InvalidRate { name, value: v });
            }
        }
        Ok(())
    }

    pub fn with_pump(mut self, pump_p: f64) -> Self {
        self.pump_p = pump_p;
        self
    }
}

fn check_rates(named: &[(&'static str, f64)]) -> Result<(), AtomError> {
    for &(name, value) in named {
        if !(value.is_finite() && value >= 0.0) {
            return Err(AtomError::InvalidRate { name, value });
        }
    }
    Ok(())
}

/// Zeroth-order density matrix ρ(0) of an atom at rest.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: Matrix5<Complex64>,
}

impl DensityMatrix {
    /// All population in |1⟩.
    pub fn ground() -> Self {
        let mut rho = Matrix5::zeros();
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { rho }
    }

    pub fn from_matrix(rho: Matrix5<Complex64>) -> Self {
        Self { rho }
    }

    /// Element ρ_ij with 1-based level labels.
    ///
    /// Panics when a label is outside 1..=5.
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        assert!((1..=LEVELS).contains(&i) && (1..=LEVELS).contains(&j), "level label out of range");
        self.rho[(i - 1, j - 1)]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.at(i, i).re
    }

    pub fn matrix(&self) -> &Matrix5<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// Largest entry of |ρ − ρ†|.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; LEVELS] {
        let herm = (self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut out = [0.0; LEVELS];
        out.copy_from_slice(eig.eigenvalues.as_slice());
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    pub fn vectorize(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.rho.as_slice())
    }
}

/// Lindblad generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    generator: DMatrix<Complex64>,
}

impl Liouvillian {
    pub fn from_generator(generator: DMatrix<Complex64>) -> Self {
        assert_eq!(generator.shape(), (DIM, DIM));
        Self { generator }
    }

    pub fn generator(&self) -> &DMatrix<Complex64> {
        &self.generator
    }

    /// dρ/dt for a given state.
    pub fn apply(&self, rho: &DensityMatrix) -> Matrix5<Complex64> {
        let v = &self.generator * rho.vectorize();
        Matrix5::from_column_slice(v.as_slice())
    }

    /// ‖trace ∘ L‖ relative to ‖L‖; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let scale = self.generator.norm();
        let mut worst: f64 = 0.0;
        for col in 0..DIM {
            let s: Complex64 = (0..LEVELS).map(|i| self.generator[(i * LEVELS + i, col)]).sum();
            worst = worst.max(s.norm());
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    /// ‖L·vec(ρ)‖ relative to ‖L‖.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        let scale = self.generator.norm();
        let r = (&self.generator * rho.vectorize()).norm();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }
}

fn projector(i: usize, j: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(LEVELS, LEVELS);
    m[(i - 1, j - 1)] = Complex64::new(1.0, 0.0);
    m
}

fn add_dissipator(l: &mut DMatrix<Complex64>, rate: f64, jump: &DMatrix<Complex64>) {
    if rate == 0.0 {
        return;
    }
    let id = DMatrix::<Complex64>::identity(LEVELS, LEVELS);
    let jdj = jump.adjoint() * jump;
    // vec(A X B) = (Bᵀ ⊗ A) vec(X)
    let term = jump.conjugate().kronecker(jump)
        - id.kronecker(&jdj) * Complex64::new(0.5, 0.0)
        - jdj.transpose().kronecker(&id) * Complex64::new(0.5, 0.0);
    *l += term * Complex64::new(rate, 0.0);
}

/// Builds the zeroth-order master-equation generator.
///
/// Contents: rotating-frame Hamiltonian with the two controls, one Lindblad
/// channel per partial decay rate, pure dephasing γ21 on ρ21/ρ12 only, and
/// the two-way pump as the jump pair |5⟩⟨1|, |1⟩⟨5| each at rate p.
pub fn build_liouvillian(scheme: &LevelScheme, drive: &DriveConfig) -> Liouvillian {
    let mut h = DMatrix::<Complex64>::zeros(LEVELS, LEVELS);
    h[(2, 2)] = Complex64::new(-drive.delta_c1, 0.0);
    h[(3, 3)] = Complex64::new(-drive.delta_c2, 0.0);
    h[(2, 1)] = -drive.omega_c1;
    h[(1, 2)] = -drive.omega_c1.conj();
    h[(3, 1)] = -drive.omega_c2;
    h[(1, 3)] = -drive.omega_c2.conj();

    let id = DMatrix::<Complex64>::identity(LEVELS, LEVELS);
    let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * (-I);

    let channels = [
        (scheme.gamma31, projector(1, 3)),
        (scheme.gamma32, projector(2, 3)),
        (scheme.gamma41, projector(1, 4)),
        (scheme.gamma42, projector(2, 4)),
        (scheme.gamma51, projector(1, 5)),
        (scheme.gamma52, projector(2, 5)),
        (drive.pump_p, projector(5, 1)),
        (drive.pump_p, projector(1, 5)),
    ];
    for (rate, jump) in &channels {
        add_dissipator(&mut l, *rate, jump);
    }

    // ρ21 at index 1, ρ12 at index 5
    for idx in [1, LEVELS] {
        l[(idx, idx)] -= Complex64::new(scheme.gamma21, 0.0);
    }
    Liouvillian { generator: l }
}

/// Singular values below this fraction of the largest one count as zero.
const NULL_TOLERANCE: f64 = 1e-11;

/// Unique steady state from the null space of the generator.
pub fn steady_state(liouvillian: &Liouvillian) -> Result<DensityMatrix, AtomError> {
    let svd = liouvillian.generator.clone().svd(false, true);
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let dimension = sigma.iter().filter(|&&s| s <= NULL_TOLERANCE * smax).count();
    if dimension != 1 {
        return Err(AtomError::DegenerateSteadyState { dimension });
    }
    let (imin, _) = sigma
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let null: Vec<Complex64> = v_t.row(imin).iter().map(|z| z.conj()).collect();

    let mut rho = Matrix5::from_column_slice(&null);
    let tr = rho.trace();
    rho /= tr;
    rho = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix { rho })
}

/// Convenience wrapper: generator plus null-space solve.
pub fn solve_zeroth_order(
    scheme: &LevelScheme,
    drive: &DriveConfig,
) -> Result<DensityMatrix, AtomError> {
    scheme.validate()?;
    drive.validate()?;
    steady_state(&build_liouvillian(scheme, drive))
}

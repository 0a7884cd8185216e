//! Dense and closed-form simulation of the GHZ states used by the quantum
//! sharing protocol.
//!
//! Qubit `0` is the leftmost position of a ket, so in a register of `m`
//! qubits qubit `q` corresponds to bit `m - 1 - q` of the amplitude index
//! (big-endian). `|100⟩` is amplitude index 4.

mod density;
mod measure;
mod state;

use num_complex::Complex64;
use thiserror::Error;

pub use density::{fidelity_with_ghz, fidelity_with_pure, partial_trace, DensityMatrix};
pub use measure::{equator_basis, measure, measure_mixed, MeasurementBasis};
pub use state::{apply_cnot, StateVector};

/// Tolerance for norms and traces.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Tolerance for entries that must vanish structurally.
pub const ZERO_TOLERANCE: f64 = 1e-12;
/// Largest register held as a dense statevector.
pub const MAX_DENSE_QUBITS: usize = 20;
/// Largest subsystem whose reduced density matrix is materialized densely
/// (a 1024 x 1024 complex matrix).
pub const MAX_DENSE_REDUCED_QUBITS: usize = 10;
/// Largest subsystem for which positivity is checked by eigendecomposition.
pub const MAX_EIGEN_CHECK_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("{requested} qubits exceed the dense limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("a register needs at least one qubit")]
    NoQubits,
    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("control and target are both qubit {0}")]
    ControlEqualsTarget(usize),
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,
    #[error("qubit {0} listed twice")]
    DuplicateQubit(usize),
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (deviation {0})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("matrix has negative eigenvalue {0}")]
    NotPositive(f64),
    #[error("positivity check limited to {limit} qubits, got {found}")]
    PsdCheckTooLarge { found: usize, limit: usize },
    #[error("angle {name} = {value} outside its range")]
    InvalidAngle { name: &'static str, value: f64 },
}

fn check_normalized(norm_sqr: f64) -> Result<(), QuantumError> {
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE || !norm_sqr.is_finite() {
        return Err(QuantumError::NotNormalized(norm_sqr));
    }
    Ok(())
}

/// The single-qubit secret `a|0⟩ + b|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecretQubit {
    a: Complex64,
    b: Complex64,
}

impl SecretQubit {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, QuantumError> {
        check_normalized(a.norm_sqr() + b.norm_sqr())?;
        Ok(Self { a, b })
    }

    pub(crate) fn new_unchecked(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// `cos(θ/2)|0⟩ + e^{iω} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: f64, omega: f64) -> Self {
        Self {
            a: Complex64::new((theta / 2.0).cos(), 0.0),
            b: Complex64::from_polar((theta / 2.0).sin(), omega),
        }
    }

    pub fn zero() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(1.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.a, self.b]
    }

    /// `|⟨self|other⟩|`, which is 1 exactly when the states agree up to a
    /// global phase.
    pub fn overlap(&self, other: &SecretQubit) -> f64 {
        (self.a.conj() * other.a + self.b.conj() * other.b).norm()
    }

    pub fn equals_up_to_phase(&self, other: &SecretQubit) -> bool {
        (1.0 - self.overlap(other)).abs() <= NORM_TOLERANCE
    }

    /// `|a|⁴ + |b|⁴`, the fidelity any proper subset of a GHZ sharing of this
    /// secret retains.
    pub fn leakage_fidelity(&self) -> f64 {
        self.a.norm_sqr().powi(2) + self.b.norm_sqr().powi(2)
    }
}

/// `a|0…0⟩ + b|1…1⟩` on `n` qubits, stored in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzForm {
    a: Complex64,
    b: Complex64,
    n: usize,
}

impl GhzForm {
    pub fn new(a: Complex64, b: Complex64, n: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::NoQubits);
        }
        check_normalized(a.norm_sqr() + b.norm_sqr())?;
        Ok(Self { a, b, n })
    }

    pub fn from_secret(secret: &SecretQubit, n: usize) -> Result<Self, QuantumError> {
        Self::new(secret.a, secret.b, n)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn secret(&self) -> SecretQubit {
        SecretQubit {
            a: self.a,
            b: self.b,
        }
    }

    /// Same branch amplitudes on `n` qubits.
    pub fn resized(&self, n: usize) -> Result<Self, QuantumError> {
        Self::new(self.a, self.b, n)
    }

    /// Dense statevector with `a` at index 0 and `b` at index `2^n - 1`.
    pub fn expand(&self) -> Result<StateVector, QuantumError> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(QuantumError::TooManyQubits {
                requested: self.n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        amps[0] += self.a;
        *amps.last_mut().expect("nonempty") += self.b;
        StateVector::new(amps)
    }

    /// Reduced state of any `k` of the `n` qubits, from the closed form:
    /// `|a|²|0…0⟩⟨0…0| + |b|²|1…1⟩⟨1…1|` for a proper subset, the pure
    /// `k`-qubit GHZ state when `k = n`.
    pub fn reduced(&self, k: usize) -> Result<DensityMatrix, QuantumError> {
        if k == 0 {
            return Err(QuantumError::EmptyKeepSet);
        }
        if k > self.n {
            return Err(QuantumError::IndexOutOfRange {
                index: k - 1,
                qubits: self.n,
            });
        }
        let coherence = if k == self.n {
            self.a * self.b.conj()
        } else {
            Complex64::new(0.0, 0.0)
        };
        Ok(DensityMatrix::from_corner_block(
            k,
            [
                Complex64::new(self.a.norm_sqr(), 0.0),
                coherence,
                coherence.conj(),
                Complex64::new(self.b.norm_sqr(), 0.0),
            ],
        ))
    }
}

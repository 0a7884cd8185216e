use num_complex::Complex64;

use super::{check_normalized, QuantumError, SecretQubit, MAX_DENSE_QUBITS};

/// Dense statevector over `qubit_count` qubits, big-endian indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    qubits: usize,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amps.len();
        if len < 2 {
            return Err(QuantumError::NoQubits);
        }
        if !len.is_power_of_two() {
            return Err(QuantumError::NotPowerOfTwo(len));
        }
        let qubits = len.trailing_zeros() as usize;
        if qubits > MAX_DENSE_QUBITS {
            return Err(QuantumError::TooManyQubits {
                requested: qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        check_normalized(amps.iter().map(Complex64::norm_sqr).sum())?;
        Ok(Self { amps, qubits })
    }

    fn check_size(qubits: usize) -> Result<(), QuantumError> {
        if qubits == 0 {
            return Err(QuantumError::NoQubits);
        }
        if qubits > MAX_DENSE_QUBITS {
            return Err(QuantumError::TooManyQubits {
                requested: qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        Ok(())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(qubits: usize, index: usize) -> Result<Self, QuantumError> {
        Self::check_size(qubits)?;
        if index >= 1 << qubits {
            return Err(QuantumError::IndexOutOfRange { index, qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, qubits })
    }

    /// `secret ⊗ |0⟩^(qubits - 1)`: the secret on qubit 0, ancillas after it.
    pub fn with_ancillas(secret: &SecretQubit, qubits: usize) -> Result<Self, QuantumError> {
        Self::check_size(qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = secret.a();
        amps[1 << (qubits - 1)] = secret.b();
        Ok(Self { amps, qubits })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// Bit mask of qubit `q` in an amplitude index.
    pub(crate) fn mask(&self, q: usize) -> usize {
        1 << (self.qubits - 1 - q)
    }

    pub(crate) fn check_index(&self, q: usize) -> Result<(), QuantumError> {
        if q >= self.qubits {
            return Err(QuantumError::IndexOutOfRange {
                index: q,
                qubits: self.qubits,
            });
        }
        Ok(())
    }

    /// CNOT in place: flips `target` on every branch where `control` is 1.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<(), QuantumError> {
        self.check_index(control)?;
        self.check_index(target)?;
        if control == target {
            return Err(QuantumError::ControlEqualsTarget(control));
        }
        let (c, t) = (self.mask(control), self.mask(target));
        for idx in 0..self.amps.len() {
            if idx & c != 0 && idx & t == 0 {
                self.amps.swap(idx, idx | t);
            }
        }
        Ok(())
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64, QuantumError> {
        if self.qubits != other.qubits {
            return Err(QuantumError::DimensionMismatch {
                expected: self.qubits,
                found: other.qubits,
            });
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum();
        Ok(inner.norm())
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64, QuantumError> {
        if self.qubits != other.qubits {
            return Err(QuantumError::DimensionMismatch {
                expected: self.qubits,
                found: other.qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }
}

/// Functional form of [`StateVector::apply_cnot`].
pub fn apply_cnot(
    state: &StateVector,
    control: usize,
    target: usize,
) -> Result<StateVector, QuantumError> {
    let mut out = state.clone();
    out.apply_cnot(control, target)?;
    Ok(out)
}

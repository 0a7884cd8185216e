use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::{DensityMatrix, QuantumError, SecretQubit, ZERO_TOLERANCE};

/// Orthonormal single-qubit basis fixed by a Bloch-sphere direction.
///
/// The first vector is `cos(θ/2)|0⟩ + e^{iω} sin(θ/2)|1⟩`; the second is
/// the antipodal point `sin(θ/2)|0⟩ - e^{iω} cos(θ/2)|1⟩`. On the equator
/// (`θ = π/2`) this pair is `(|0⟩ ± e^{iω}|1⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    theta: f64,
    omega: f64,
}

impl MeasurementBasis {
    /// `theta` must lie in `[0, π]`; `omega` is reduced into `[0, 2π)`.
    pub fn new(theta: f64, omega: f64) -> Result<Self, QuantumError> {
        if !(0.0..=PI).contains(&theta) {
            return Err(QuantumError::InvalidAngle {
                name: "theta",
                value: theta,
            });
        }
        if !omega.is_finite() {
            return Err(QuantumError::InvalidAngle {
                name: "omega",
                value: omega,
            });
        }
        Ok(Self {
            theta,
            omega: omega.rem_euclid(TAU),
        })
    }

    /// `{|0⟩, |1⟩}` up to phase.
    pub fn computational() -> Self {
        Self {
            theta: 0.0,
            omega: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn is_equatorial(&self) -> bool {
        self.theta == FRAC_PI_2
    }

    pub fn vectors(&self) -> [SecretQubit; 2] {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let phase = Complex64::from_polar(1.0, self.omega);
        [
            SecretQubit::new_unchecked(Complex64::new(c, 0.0), phase * s),
            SecretQubit::new_unchecked(Complex64::new(s, 0.0), -phase * c),
        ]
    }

    /// Born probabilities `|⟨b_k|q⟩|²` of the two outcomes.
    pub fn probabilities(&self, q: &SecretQubit) -> [f64; 2] {
        self.vectors().map(|v| {
            let inner = v.a().conj() * q.a() + v.b().conj() * q.b();
            inner.norm_sqr()
        })
    }

    /// Outcome probabilities `⟨b_k|ρ|b_k⟩` for a single-qubit mixed state.
    pub fn probabilities_mixed(&self, rho: &DensityMatrix) -> Result<[f64; 2], QuantumError> {
        if rho.qubit_count() != 1 {
            return Err(QuantumError::DimensionMismatch {
                expected: 1,
                found: rho.qubit_count(),
            });
        }
        let m = rho.corner_block();
        Ok(self.vectors().map(|v| {
            let (x, y) = (v.a(), v.b());
            let value = x.conj() * (m[0] * x + m[1] * y) + y.conj() * (m[2] * x + m[3] * y);
            value.re
        }))
    }

    /// Orthonormality residue `max(|⟨b_0|b_1⟩|, |1 - ⟨b_k|b_k⟩|)`.
    pub fn orthonormality_error(&self) -> f64 {
        let [u, v] = self.vectors();
        let cross = (u.a().conj() * v.a() + u.b().conj() * v.b()).norm();
        let norms = [u, v]
            .iter()
            .map(|w| (w.a().norm_sqr() + w.b().norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max);
        cross.max(norms)
    }
}

/// Basis on the Bloch-sphere equator at azimuth `omega`.
pub fn equator_basis(omega: f64) -> MeasurementBasis {
    MeasurementBasis {
        theta: FRAC_PI_2,
        omega: omega.rem_euclid(TAU),
    }
}

fn sample<R: rand::Rng + ?Sized>(probs: [f64; 2], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    usize::from(u >= probs[0])
}

/// Projective measurement of `q` in `basis`; returns the index of the basis
/// vector observed.
pub fn measure<R: rand::Rng + ?Sized>(
    q: &SecretQubit,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> usize {
    sample(basis.probabilities(q), rng)
}

/// Measurement of a single-qubit reduced state.
pub fn measure_mixed<R: rand::Rng + ?Sized>(
    rho: &DensityMatrix,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<usize, QuantumError> {
    let probs = basis.probabilities_mixed(rho)?;
    debug_assert!((probs[0] + probs[1] - 1.0).abs() < 1e-9 + ZERO_TOLERANCE);
    Ok(sample(probs, rng))
}

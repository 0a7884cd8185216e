use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{
    GhzForm, QuantumError, StateVector, MAX_DENSE_REDUCED_QUBITS, MAX_EIGEN_CHECK_QUBITS,
    NORM_TOLERANCE, ZERO_TOLERANCE,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Row-major `2^k x 2^k` entries.
    Dense(Vec<Complex64>),
    /// Only the corner entries `(0,0), (0,L), (L,0), (L,L)` with `L = 2^k - 1`
    /// are nonzero, which is the shape of every GHZ reduction. Lets the
    /// protocol analyze registers far beyond the dense limit.
    Corners([Complex64; 4]),
}

/// Density matrix of a `k`-qubit (sub)system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    repr: Repr,
}

impl DensityMatrix {
    /// Validated construction from row-major entries.
    pub fn from_entries(qubits: usize, entries: Vec<Complex64>) -> Result<Self, QuantumError> {
        if qubits == 0 {
            return Err(QuantumError::NoQubits);
        }
        if qubits > MAX_DENSE_REDUCED_QUBITS {
            return Err(QuantumError::TooManyQubits {
                requested: qubits,
                limit: MAX_DENSE_REDUCED_QUBITS,
            });
        }
        let dim = 1usize << qubits;
        if entries.len() != dim * dim {
            return Err(QuantumError::NotPowerOfTwo(entries.len()));
        }
        let rho = Self {
            qubits,
            repr: Repr::Dense(entries),
        };
        rho.check_invariants()?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Result<Self, QuantumError> {
        let qubits = state.qubit_count();
        if qubits > MAX_DENSE_REDUCED_QUBITS {
            return Err(QuantumError::TooManyQubits {
                requested: qubits,
                limit: MAX_DENSE_REDUCED_QUBITS,
            });
        }
        let amps = state.amplitudes();
        let entries = amps
            .iter()
            .flat_map(|x| amps.iter().map(move |y| x * y.conj()))
            .collect();
        Ok(Self {
            qubits,
            repr: Repr::Dense(entries),
        })
    }

    pub(crate) fn from_corner_block(qubits: usize, block: [Complex64; 4]) -> Self {
        Self {
            qubits,
            repr: Repr::Corners(block),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    /// Whether the entries are held densely (as opposed to the GHZ corner form).
    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// The `(0,0), (0,L), (L,0), (L,L)` entries, `L = 2^k - 1`.
    pub fn corner_block(&self) -> [Complex64; 4] {
        match &self.repr {
            Repr::Corners(block) => *block,
            Repr::Dense(entries) => {
                let dim = 1usize << self.qubits;
                let last = dim - 1;
                [
                    entries[0],
                    entries[last],
                    entries[last * dim],
                    entries[last * dim + last],
                ]
            }
        }
    }

    /// Entry `(row, col)`; `None` outside the matrix or when the index is not
    /// representable for a corner-form matrix.
    pub fn entry(&self, row: usize, col: usize) -> Option<Complex64> {
        if self.qubits >= usize::BITS as usize {
            return None;
        }
        let dim = 1usize << self.qubits;
        if row >= dim || col >= dim {
            return None;
        }
        Some(match &self.repr {
            Repr::Dense(entries) => entries[row * dim + col],
            Repr::Corners(block) => {
                let last = dim - 1;
                let side = |i| match i {
                    0 => Some(0),
                    i if i == last => Some(1),
                    _ => None,
                };
                match (side(row), side(col)) {
                    // for k = 1 the corners are the whole matrix
                    (Some(r), Some(c)) => block[2 * r + c],
                    _ => ZERO,
                }
            }
        })
    }

    /// Dense copy; corner-form matrices expand if small enough.
    pub fn to_dense(&self) -> Result<DensityMatrix, QuantumError> {
        match &self.repr {
            Repr::Dense(_) => Ok(self.clone()),
            Repr::Corners(block) => {
                if self.qubits > MAX_DENSE_REDUCED_QUBITS {
                    return Err(QuantumError::TooManyQubits {
                        requested: self.qubits,
                        limit: MAX_DENSE_REDUCED_QUBITS,
                    });
                }
                let dim = 1usize << self.qubits;
                let last = dim - 1;
                let mut entries = vec![ZERO; dim * dim];
                entries[0] += block[0];
                entries[last] += block[1];
                entries[last * dim] += block[2];
                entries[last * dim + last] += block[3];
                Ok(Self {
                    qubits: self.qubits,
                    repr: Repr::Dense(entries),
                })
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Dense(entries) => {
                let dim = 1usize << self.qubits;
                (0..dim).map(|i| entries[i * dim + i].re).sum()
            }
            Repr::Corners(block) => block[0].re + block[3].re,
        }
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Dense(entries) => {
                let dim = 1usize << self.qubits;
                let mut acc = ZERO;
                for i in 0..dim {
                    for j in 0..dim {
                        acc += entries[i * dim + j] * entries[j * dim + i];
                    }
                }
                acc.re
            }
            Repr::Corners(b) => {
                let acc = b[0] * b[0] + b[1] * b[2] + b[2] * b[1] + b[3] * b[3];
                acc.re
            }
        }
    }

    pub fn is_mixed(&self) -> bool {
        self.purity() < 1.0 - NORM_TOLERANCE
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64, QuantumError> {
        if self.qubits != other.qubits {
            return Err(QuantumError::DimensionMismatch {
                expected: self.qubits,
                found: other.qubits,
            });
        }
        let diff = match (&self.repr, &other.repr) {
            (Repr::Dense(x), Repr::Dense(y)) => x
                .iter()
                .zip(y)
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max),
            (Repr::Corners(_), Repr::Corners(_)) => {
                let (x, y) = (self.corner_block(), other.corner_block());
                x.iter()
                    .zip(&y)
                    .map(|(p, q)| (p - q).norm())
                    .fold(0.0, f64::max)
            }
            _ => self.to_dense()?.max_abs_diff(&other.to_dense()?)?,
        };
        Ok(diff)
    }

    /// Checks Hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (eigenvalues ≥ -1e-10).
    ///
    /// Positivity of a matrix with nonzero off-diagonal entries beyond the
    /// corners needs an eigendecomposition, which is limited to
    /// [`MAX_EIGEN_CHECK_QUBITS`] qubits.
    pub fn check_invariants(&self) -> Result<(), QuantumError> {
        let trace = self.trace();
        if (trace - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::BadTrace(trace));
        }
        match &self.repr {
            Repr::Corners(block) => check_block(block),
            Repr::Dense(entries) => {
                let dim = 1usize << self.qubits;
                let mut hermitian_dev: f64 = 0.0;
                let mut off_diagonal: f64 = 0.0;
                for i in 0..dim {
                    hermitian_dev = hermitian_dev.max(entries[i * dim + i].im.abs());
                    for j in (i + 1)..dim {
                        let (x, y) = (entries[i * dim + j], entries[j * dim + i]);
                        hermitian_dev = hermitian_dev.max((x - y.conj()).norm());
                        off_diagonal = off_diagonal.max(x.norm());
                    }
                }
                if hermitian_dev > ZERO_TOLERANCE {
                    return Err(QuantumError::NotHermitian(hermitian_dev));
                }
                if off_diagonal <= ZERO_TOLERANCE {
                    let min = (0..dim)
                        .map(|i| entries[i * dim + i].re)
                        .fold(f64::INFINITY, f64::min);
                    return check_eigenvalue(min);
                }
                if self.qubits > MAX_EIGEN_CHECK_QUBITS {
                    return Err(QuantumError::PsdCheckTooLarge {
                        found: self.qubits,
                        limit: MAX_EIGEN_CHECK_QUBITS,
                    });
                }
                let m = DMatrix::from_row_slice(dim, dim, entries);
                let eig = SymmetricEigen::new(m).eigenvalues;
                check_eigenvalue(eig.iter().copied().fold(f64::INFINITY, f64::min))
            }
        }
    }

    /// Row-major dump, one matrix row per line, entries as `re,im` pairs.
    pub fn dump(&self) -> Result<String, QuantumError> {
        let dense = self.to_dense()?;
        let Repr::Dense(entries) = &dense.repr else {
            unreachable!("to_dense returns a dense matrix");
        };
        let dim = 1usize << self.qubits;
        let mut out = String::new();
        for row in entries.chunks(dim) {
            let line: Vec<String> = row.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        Ok(out)
    }
}

fn check_eigenvalue(min: f64) -> Result<(), QuantumError> {
    if min < -NORM_TOLERANCE {
        return Err(QuantumError::NotPositive(min));
    }
    Ok(())
}

fn check_block(block: &[Complex64; 4]) -> Result<(), QuantumError> {
    let dev = block[0]
        .im
        .abs()
        .max(block[3].im.abs())
        .max((block[1] - block[2].conj()).norm());
    if dev > ZERO_TOLERANCE {
        return Err(QuantumError::NotHermitian(dev));
    }
    // 2x2 Hermitian block: eigenvalues (t ± sqrt(t² - 4 det)) / 2
    let t = block[0].re + block[3].re;
    let det = block[0].re * block[3].re - block[1].norm_sqr();
    let disc = (t * t - 4.0 * det).max(0.0).sqrt();
    check_eigenvalue((t - disc) / 2.0)
}

/// Reduced density matrix of the qubits in `keep`, in the order given:
/// `keep[0]` becomes the most significant qubit of the result.
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix, QuantumError> {
    if keep.is_empty() {
        return Err(QuantumError::EmptyKeepSet);
    }
    let m = state.qubit_count();
    let mut kept = vec![false; m];
    for &q in keep {
        state.check_index(q)?;
        if std::mem::replace(&mut kept[q], true) {
            return Err(QuantumError::DuplicateQubit(q));
        }
    }
    let k = keep.len();
    if k > MAX_DENSE_REDUCED_QUBITS {
        return Err(QuantumError::TooManyQubits {
            requested: k,
            limit: MAX_DENSE_REDUCED_QUBITS,
        });
    }
    let env: Vec<usize> = (0..m).filter(|&q| !kept[q]).collect();

    // amplitude-index offsets of every kept / environment bit pattern
    let offsets = |qubits: &[usize]| -> Vec<usize> {
        let n = qubits.len();
        (0..1usize << n)
            .map(|pattern| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pattern & (1 << (n - 1 - pos)) != 0)
                    .fold(0, |acc, (_, &q)| acc | state.mask(q))
            })
            .collect()
    };
    let keep_off = offsets(keep);
    let env_off = offsets(&env);

    let dim = 1usize << k;
    let amps = state.amplitudes();
    let mut entries = vec![ZERO; dim * dim];
    let mut column: Vec<(usize, Complex64)> = Vec::with_capacity(dim);
    for &e in &env_off {
        column.clear();
        column.extend(
            keep_off
                .iter()
                .enumerate()
                .map(|(r, &o)| (r, amps[o | e]))
                .filter(|(_, z)| *z != ZERO),
        );
        for &(r, x) in &column {
            for &(c, y) in &column {
                entries[r * dim + c] += x * y.conj();
            }
        }
    }
    Ok(DensityMatrix {
        qubits: k,
        repr: Repr::Dense(entries),
    })
}

/// `⟨σ|ρ|σ⟩` for a pure `σ` on the same number of qubits as `ρ`.
pub fn fidelity_with_pure(rho: &DensityMatrix, sigma: &StateVector) -> Result<f64, QuantumError> {
    if rho.qubits != sigma.qubit_count() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.qubits,
            found: sigma.qubit_count(),
        });
    }
    let s = sigma.amplitudes();
    let value = match &rho.repr {
        Repr::Dense(entries) => {
            let dim = s.len();
            let mut acc = ZERO;
            for i in 0..dim {
                if s[i] == ZERO {
                    continue;
                }
                let row: Complex64 = (0..dim).map(|j| entries[i * dim + j] * s[j]).sum();
                acc += s[i].conj() * row;
            }
            acc
        }
        Repr::Corners(b) => {
            let (x, y) = (s[0], s[s.len() - 1]);
            x.conj() * (b[0] * x + b[1] * y) + y.conj() * (b[2] * x + b[3] * y)
        }
    };
    debug_assert!(value.im.abs() <= ZERO_TOLERANCE.max(NORM_TOLERANCE * value.re.abs()));
    Ok(value.re)
}

/// `⟨g|ρ|g⟩` for the GHZ state `g`, using only the corner entries of `ρ`
/// (the only ones `g` touches). Works at any register size.
pub fn fidelity_with_ghz(rho: &DensityMatrix, ghz: &GhzForm) -> Result<f64, QuantumError> {
    if rho.qubits != ghz.qubit_count() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.qubits,
            found: ghz.qubit_count(),
        });
    }
    let b = rho.corner_block();
    let (x, y) = (ghz.a(), ghz.b());
    let value = x.conj() * (b[0] * x + b[1] * y) + y.conj() * (b[2] * x + b[3] * y);
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::super::SecretQubit;
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ghz3() -> (SecretQubit, StateVector) {
        let s = SecretQubit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        (s, GhzForm::from_secret(&s, 3).unwrap().expand().unwrap())
    }

    fn assert_diag(rho: &DensityMatrix, diag: &[f64]) {
        let dim = diag.len();
        for (i, &d) in diag.iter().enumerate() {
            for j in 0..dim {
                let want = if i == j { d } else { 0.0 };
                let got = rho.entry(i, j).unwrap();
                assert!((got - c(want, 0.0)).norm() < 1e-12, "({i},{j}) = {got}");
            }
        }
    }

    #[test]
    fn tracing_out_one_party() {
        let (_, s) = ghz3();
        let rho = partial_trace(&s, &[0, 1]).unwrap();
        assert_diag(&rho, &[0.36, 0.0, 0.0, 0.64]);
        rho.check_invariants().unwrap();
    }

    #[test]
    fn tracing_out_two_parties() {
        let (_, s) = ghz3();
        let rho = partial_trace(&s, &[2]).unwrap();
        assert_diag(&rho, &[0.36, 0.64]);
    }

    #[test]
    fn product_state_reduces_to_pure() {
        let s = StateVector::basis_state(2, 0).unwrap();
        let rho = partial_trace(&s, &[0]).unwrap();
        assert_diag(&rho, &[1.0, 0.0]);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn keep_order_sets_bit_order() {
        // |01⟩: qubit 1 is set
        let s = StateVector::basis_state(2, 0b01).unwrap();
        assert_diag(&partial_trace(&s, &[0, 1]).unwrap(), &[0.0, 1.0, 0.0, 0.0]);
        assert_diag(&partial_trace(&s, &[1, 0]).unwrap(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn partial_trace_errors() {
        let (_, s) = ghz3();
        assert_eq!(partial_trace(&s, &[]), Err(QuantumError::EmptyKeepSet));
        assert_eq!(
            partial_trace(&s, &[3]),
            Err(QuantumError::IndexOutOfRange {
                index: 3,
                qubits: 3
            })
        );
        assert_eq!(
            partial_trace(&s, &[1, 1]),
            Err(QuantumError::DuplicateQubit(1))
        );
    }

    #[test]
    fn purity_values() {
        let half = SecretQubit::new(c(0.5f64.sqrt(), 0.0), c(0.0, 0.5f64.sqrt())).unwrap();
        let s = GhzForm::from_secret(&half, 4).unwrap().expand().unwrap();
        for keep in [&[0][..], &[1, 2], &[0, 1, 3]] {
            assert!((partial_trace(&s, keep).unwrap().purity() - 0.5).abs() < 1e-12);
        }
        let pure = DensityMatrix::from_pure(&s).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        assert!(!pure.is_mixed());

        let skew = SecretQubit::new(c(0.3f64.sqrt(), 0.0), c(0.7f64.sqrt(), 0.0)).unwrap();
        let s = GhzForm::from_secret(&skew, 3).unwrap().expand().unwrap();
        let rho = partial_trace(&s, &[0, 2]).unwrap();
        assert!((rho.purity() - 0.58).abs() < 1e-12);
        assert!(rho.is_mixed());
    }

    #[test]
    fn fidelity_against_subset_ghz() {
        let (secret, s) = ghz3();
        let expected = secret.leakage_fidelity();
        let rho_c = partial_trace(&s, &[2]).unwrap();
        let secret_vec = GhzForm::from_secret(&secret, 1).unwrap().expand().unwrap();
        assert!((fidelity_with_pure(&rho_c, &secret_vec).unwrap() - expected).abs() < 1e-12);

        let rho_ab = partial_trace(&s, &[0, 1]).unwrap();
        let pair = GhzForm::from_secret(&secret, 2).unwrap();
        assert!(
            (fidelity_with_pure(&rho_ab, &pair.expand().unwrap()).unwrap() - expected).abs()
                < 1e-12
        );
        assert!((fidelity_with_ghz(&rho_ab, &pair).unwrap() - expected).abs() < 1e-12);

        let pure = DensityMatrix::from_pure(&s).unwrap();
        assert!((fidelity_with_pure(&pure, &s).unwrap() - 1.0).abs() < 1e-12);

        assert_eq!(
            fidelity_with_pure(&rho_ab, &secret_vec),
            Err(QuantumError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn corner_form_matches_dense_reduction() {
        let (secret, s) = ghz3();
        let g = GhzForm::from_secret(&secret, 3).unwrap();
        for k in 1..=3 {
            let keep: Vec<usize> = (0..k).collect();
            let dense = partial_trace(&s, &keep).unwrap();
            let closed = g.reduced(k).unwrap();
            assert!(!closed.is_dense());
            assert!(closed.max_abs_diff(&dense).unwrap() < 1e-12);
            assert!((closed.purity() - dense.purity()).abs() < 1e-12);
            closed.check_invariants().unwrap();
        }
    }

    #[test]
    fn invariant_checks_reject_bad_matrices() {
        let bad_trace = vec![c(0.5, 0.0), ZERO, ZERO, c(0.4, 0.0)];
        assert!(matches!(
            DensityMatrix::from_entries(1, bad_trace),
            Err(QuantumError::BadTrace(_))
        ));
        let not_herm = vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            DensityMatrix::from_entries(1, not_herm),
            Err(QuantumError::NotHermitian(_))
        ));
        let negative = vec![c(0.5, 0.0), c(0.9, 0.0), c(0.9, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            DensityMatrix::from_entries(1, negative),
            Err(QuantumError::NotPositive(_))
        ));
        let negative_diag = vec![c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)];
        assert!(matches!(
            DensityMatrix::from_entries(1, negative_diag),
            Err(QuantumError::NotPositive(_))
        ));
    }

    #[test]
    fn dump_is_row_major() {
        let rho = partial_trace(&StateVector::basis_state(1, 1).unwrap(), &[0]).unwrap();
        assert_eq!(rho.dump().unwrap(), "0,0 0,0\n0,0 1,0\n");
    }

    fn random_state(m: usize, raw: &[(f64, f64)]) -> Option<StateVector> {
        let amps: Vec<_> = raw.iter().take(1 << m).map(|&(r, i)| c(r, i)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (norm > 1e-3)
            .then(|| StateVector::new(amps.into_iter().map(|z| z / norm).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn reduced_states_are_valid(
            m in 1usize..7,
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
            mask in 1u32..64,
        ) {
            let Some(s) = random_state(m, &raw) else { return Ok(()); };
            let keep: Vec<usize> = (0..m).filter(|q| mask & (1 << q) != 0).collect();
            prop_assume!(!keep.is_empty());
            let rho = partial_trace(&s, &keep).unwrap();
            prop_assert!(rho.check_invariants().is_ok(), "{:?}", rho.check_invariants());
            prop_assert!(rho.purity() <= 1.0 + 1e-10);
        }

        #[test]
        fn full_trace_keeps_outer_product(
            m in 1usize..6,
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32),
        ) {
            let Some(s) = random_state(m, &raw) else { return Ok(()); };
            let all: Vec<usize> = (0..m).collect();
            let rho = partial_trace(&s, &all).unwrap();
            prop_assert!(rho.max_abs_diff(&DensityMatrix::from_pure(&s).unwrap()).unwrap() < 1e-12);
        }
    }
}

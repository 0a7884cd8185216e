//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use qtcss_core::classical::{deal, ClassicalShare};
use qtcss_core::field::{BivariatePoly, PrimeField};
use qtcss_core::quantum::SecretQubit;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Largest prime below 2^31.
pub const LARGE_PRIME: u64 = 2_147_483_647;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A seeded dealing over GF(2^31 - 1).
pub fn large_dealing(
    parties: usize,
    x_degree: usize,
    y_degree: usize,
) -> (BivariatePoly, Vec<ClassicalShare>) {
    let field = PrimeField::new(LARGE_PRIME).expect("prime");
    let mut rng = rng(1);
    let secret = field.random(&mut rng);
    deal(secret, parties, x_degree, y_degree, &mut rng).expect("valid parameters")
}

/// `0.6|0⟩ + 0.8i|1⟩`.
pub fn secret() -> SecretQubit {
    SecretQubit::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).expect("normalized")
}

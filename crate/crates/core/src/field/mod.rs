//! Prime-field arithmetic for the classical sharing engine.
//!
//! Elements carry their modulus so that values from different fields can be
//! detected at the API boundary. Moduli are limited to primes below 2^31 so
//! that every product fits in a `u64` before reduction.

mod linalg;
mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use linalg::{lagrange_at, solve_linear};
pub use poly::{BivariatePoly, UnivariatePoly};

/// Largest modulus accepted by [`PrimeField::new`] (exclusive).
pub const MODULUS_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported limit of 2^31")]
    ModulusTooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("field modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("duplicate abscissa {0} in interpolation points")]
    DuplicateAbscissa(u32),
    #[error("interpolation needs at least one point")]
    EmptyPointSet,
    #[error("linear system is singular modulo {0}")]
    SingularSystem(u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree grid has {found} coefficients, expected {expected}")]
    CoefficientCount { expected: usize, found: usize },
}

/// A prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u32,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if modulus >= MODULUS_LIMIT {
            return Err(FieldError::ModulusTooLarge(modulus));
        }
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(Self {
            modulus: modulus as u32,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Reduces `value` into the field.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: (value % self.modulus as u64) as u32,
            modulus: self.modulus,
        }
    }

    /// Maps a signed integer into the field, so `-1` becomes `p - 1`.
    pub fn element_signed(&self, value: i64) -> FieldElement {
        let m = self.modulus as i64;
        self.element(value.rem_euclid(m) as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    pub fn elements(&self, values: &[u64]) -> Vec<FieldElement> {
        values.iter().map(|&v| self.element(v)).collect()
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.element(rng.random_range(0..self.modulus) as u64)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)
    }
}

/// Deterministic trial division; moduli are below 2^31 so the loop stays short.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of GF(p), always reduced into `[0, p)`.
///
/// The arithmetic operators panic when the operands come from different
/// fields; the polynomial and solver entry points check moduli first and
/// return [`FieldError::ModulusMismatch`] instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        PrimeField {
            modulus: self.modulus,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut exp: u64) -> FieldElement {
        let mut base = self;
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    #[doc(alias = "mod_inv")]
    pub fn inv(self) -> Result<FieldElement, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.modulus as i64, self.value as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.field().element_signed(t0))
    }

    pub(crate) fn check_same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    fn assert_same_field(&self, other: &FieldElement) {
        assert_eq!(
            self.modulus, other.modulus,
            "arithmetic between GF({}) and GF({})",
            self.modulus, other.modulus
        );
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        let sum = self.value as u64 + rhs.value as u64;
        self.field().element(sum)
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        let diff = self.value as u64 + self.modulus as u64 - rhs.value as u64;
        self.field().element(diff)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.assert_same_field(&rhs);
        self.field().element(self.value as u64 * rhs.value as u64)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        self.field().zero() - self
    }
}

/// Free-function form of [`FieldElement::inv`].
pub fn mod_inv(x: FieldElement) -> Result<FieldElement, FieldError> {
    x.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf11() -> PrimeField {
        PrimeField::new(11).unwrap()
    }

    #[test]
    fn inverses_mod_11() {
        let f = gf11();
        assert_eq!(mod_inv(f.element(1)).unwrap(), f.element(1));
        assert_eq!(mod_inv(f.element(2)).unwrap(), f.element(6));
        assert_eq!(mod_inv(f.element(10)).unwrap(), f.element(10));
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(gf11().zero().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn rejects_composite_and_oversized_moduli() {
        assert_eq!(PrimeField::new(12), Err(FieldError::NotPrime(12)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(
            PrimeField::new(1 << 31),
            Err(FieldError::ModulusTooLarge(1 << 31))
        );
        // 2^31 - 1 is prime and still fits.
        assert!(PrimeField::new((1 << 31) - 1).is_ok());
    }

    #[test]
    fn signed_elements_wrap() {
        let f = gf11();
        assert_eq!(f.element_signed(-1), f.element(10));
        assert_eq!(f.element_signed(-23), f.element(10));
    }

    #[test]
    #[should_panic(expected = "arithmetic between")]
    fn mixing_fields_panics() {
        let _ = gf11().one() + PrimeField::new(13).unwrap().one();
    }

    #[test]
    fn pow_matches_fermat() {
        let f = gf11();
        for v in 1..11 {
            assert_eq!(f.element(v).pow(10), f.one());
        }
    }

    const PRIMES: [u64; 5] = [2, 5, 11, 65_521, 2_147_483_647];

    proptest! {
        #[test]
        fn field_axioms(pi in 0usize..PRIMES.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let f = PrimeField::new(PRIMES[pi]).unwrap();
            let (a, b, c) = (f.element(a), f.element(b), f.element(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, f.zero());
            prop_assert_eq!(a + (-a), f.zero());
            prop_assert!(a.value() < f.modulus());
            if !a.is_zero() {
                prop_assert_eq!(a.inv().unwrap() * a, f.one());
            }
        }
    }
}

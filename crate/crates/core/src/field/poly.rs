use std::fmt;

use super::{FieldElement, FieldError, PrimeField};

/// Dense univariate polynomial over GF(p), coefficients in ascending degree.
///
/// The coefficient list is kept trimmed, so two equal polynomials compare
/// equal regardless of how they were built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariatePoly {
    field: PrimeField,
    coeffs: Vec<FieldElement>,
}

impl UnivariatePoly {
    pub fn new(field: PrimeField, coeffs: Vec<FieldElement>) -> Result<Self, FieldError> {
        for c in &coeffs {
            c.check_same_field(&field.zero())?;
        }
        let mut poly = Self { field, coeffs };
        poly.trim();
        Ok(poly)
    }

    pub fn from_values(field: PrimeField, values: &[u64]) -> Self {
        let mut poly = Self {
            field,
            coeffs: field.elements(values),
        };
        poly.trim();
        poly
    }

    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(FieldElement::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `t^i`; zero past the degree.
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .copied()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Coefficients `0..=degree_bound`, zero-padded.
    pub fn padded_coefficients(&self, degree_bound: usize) -> Vec<FieldElement> {
        (0..=degree_bound).map(|i| self.coeff(i)).collect()
    }

    /// Keeps coefficients `0..=degree` and drops everything above.
    pub fn truncated(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(degree + 1);
        let mut poly = Self {
            field: self.field,
            coeffs,
        };
        poly.trim();
        poly
    }

    pub fn eval(&self, t: FieldElement) -> Result<FieldElement, FieldError> {
        t.check_same_field(&self.field.zero())?;
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, &c| acc * t + c))
    }
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(
            f,
            self.coeffs.iter().enumerate().map(|(j, c)| (*c, 0, j)),
            "t",
        )
    }
}

/// Bivariate polynomial `F(x, y) = Σ a_ij x^i y^j` over GF(p) with degree
/// bounds `x_degree` and `y_degree`. The constant term is the shared secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    field: PrimeField,
    x_degree: usize,
    y_degree: usize,
    // row-major: index i * (y_degree + 1) + j holds the x^i y^j coefficient
    coeffs: Vec<FieldElement>,
}

impl BivariatePoly {
    pub fn new(
        field: PrimeField,
        x_degree: usize,
        y_degree: usize,
        coeffs: Vec<FieldElement>,
    ) -> Result<Self, FieldError> {
        let expected = (x_degree + 1) * (y_degree + 1);
        if coeffs.len() != expected {
            return Err(FieldError::CoefficientCount {
                expected,
                found: coeffs.len(),
            });
        }
        for c in &coeffs {
            c.check_same_field(&field.zero())?;
        }
        Ok(Self {
            field,
            x_degree,
            y_degree,
            coeffs,
        })
    }

    /// Builds from rows indexed by x-power, each row listing y-powers ascending.
    pub fn from_grid(field: PrimeField, rows: &[&[u64]]) -> Result<Self, FieldError> {
        let y_len = rows.first().map_or(0, |r| r.len());
        if rows.is_empty() || y_len == 0 {
            return Err(FieldError::CoefficientCount {
                expected: 1,
                found: 0,
            });
        }
        let mut coeffs = Vec::with_capacity(rows.len() * y_len);
        for row in rows {
            if row.len() != y_len {
                return Err(FieldError::CoefficientCount {
                    expected: y_len,
                    found: row.len(),
                });
            }
            coeffs.extend(field.elements(row));
        }
        Self::new(field, rows.len() - 1, y_len - 1, coeffs)
    }

    /// Secret in the constant term, every other coefficient uniform.
    pub fn random<R: rand::Rng + ?Sized>(
        field: PrimeField,
        x_degree: usize,
        y_degree: usize,
        secret: FieldElement,
        rng: &mut R,
    ) -> Result<Self, FieldError> {
        secret.check_same_field(&field.zero())?;
        let count = (x_degree + 1) * (y_degree + 1);
        let coeffs = std::iter::once(secret)
            .chain((1..count).map(|_| field.random(rng)))
            .collect();
        Self::new(field, x_degree, y_degree, coeffs)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn x_degree(&self) -> usize {
        self.x_degree
    }

    pub fn y_degree(&self) -> usize {
        self.y_degree
    }

    /// Coefficient of `x^i y^j`; zero outside the degree grid.
    pub fn coeff(&self, i: usize, j: usize) -> FieldElement {
        if i > self.x_degree || j > self.y_degree {
            return self.field.zero();
        }
        self.coeffs[i * (self.y_degree + 1) + j]
    }

    pub fn secret(&self) -> FieldElement {
        self.coeff(0, 0)
    }

    #[doc(alias = "eval_bivariate")]
    pub fn eval(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement, FieldError> {
        let zero = self.field.zero();
        x.check_same_field(&zero)?;
        y.check_same_field(&zero)?;
        let mut acc = zero;
        let mut x_pow = self.field.one();
        for i in 0..=self.x_degree {
            let mut y_pow = self.field.one();
            for j in 0..=self.y_degree {
                acc = acc + self.coeff(i, j) * x_pow * y_pow;
                y_pow = y_pow * y;
            }
            x_pow = x_pow * x;
        }
        Ok(acc)
    }

    /// `F(x0, y)` as a polynomial in `y`.
    pub fn restrict_x(&self, x0: FieldElement) -> Result<UnivariatePoly, FieldError> {
        x0.check_same_field(&self.field.zero())?;
        let coeffs = (0..=self.y_degree)
            .map(|j| {
                (0..=self.x_degree)
                    .rev()
                    .fold(self.field.zero(), |acc, i| acc * x0 + self.coeff(i, j))
            })
            .collect();
        UnivariatePoly::new(self.field, coeffs)
    }

    /// `F(x, y0)` as a polynomial in `x`.
    pub fn restrict_y(&self, y0: FieldElement) -> Result<UnivariatePoly, FieldError> {
        y0.check_same_field(&self.field.zero())?;
        let coeffs = (0..=self.x_degree)
            .map(|i| {
                (0..=self.y_degree)
                    .rev()
                    .fold(self.field.zero(), |acc, j| acc * y0 + self.coeff(i, j))
            })
            .collect();
        UnivariatePoly::new(self.field, coeffs)
    }

    /// Drops every `y^j` term with `j > y_degree`.
    pub fn truncate_y(&self, y_degree: usize) -> Self {
        let y_degree = y_degree.min(self.y_degree);
        let coeffs = (0..=self.x_degree)
            .flat_map(|i| (0..=y_degree).map(move |j| (i, j)))
            .map(|(i, j)| self.coeff(i, j))
            .collect();
        Self {
            field: self.field,
            x_degree: self.x_degree,
            y_degree,
            coeffs,
        }
    }

    /// Coefficients in the unknown order used by the truncated-share solver:
    /// y-power outer, x-power inner, i.e. `1, x, y, xy, y², xy², …`.
    pub fn coefficients_y_major(&self) -> Vec<FieldElement> {
        (0..=self.y_degree)
            .flat_map(|j| (0..=self.x_degree).map(move |i| (i, j)))
            .map(|(i, j)| self.coeff(i, j))
            .collect()
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // print in the conventional order: by total y-power, then x-power
        let terms = (0..=self.y_degree)
            .flat_map(|j| (0..=self.x_degree).map(move |i| (i, j)))
            .map(|(i, j)| (self.coeff(i, j), i, j));
        fmt_terms(f, terms, "y")
    }
}

fn fmt_terms(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (FieldElement, usize, usize)>,
    var: &str,
) -> fmt::Result {
    let mut first = true;
    for (c, i, j) in terms {
        if c.is_zero() {
            continue;
        }
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        let mut mono = String::new();
        match i {
            0 => {}
            1 => mono.push('x'),
            _ => mono.push_str(&format!("x^{i}")),
        }
        match j {
            0 => {}
            1 => mono.push_str(var),
            _ => mono.push_str(&format!("{var}^{j}")),
        }
        if mono.is_empty() {
            write!(f, "{c}")?;
        } else if c.value() == 1 {
            f.write_str(&mono)?;
        } else {
            write!(f, "{c}{mono}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

use super::{FieldElement, FieldError};

/// Evaluates at `x0` the unique polynomial of degree `< points.len()` that
/// passes through `points`.
pub fn lagrange_at(
    points: &[(FieldElement, FieldElement)],
    x0: FieldElement,
) -> Result<FieldElement, FieldError> {
    let Some(&(first, _)) = points.first() else {
        return Err(FieldError::EmptyPointSet);
    };
    for (x, y) in points {
        first.check_same_field(x)?;
        first.check_same_field(y)?;
    }
    first.check_same_field(&x0)?;

    let field = first.field();
    let mut acc = field.zero();
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut num = field.one();
        let mut den = field.one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if xi == xj {
                return Err(FieldError::DuplicateAbscissa(xi.value()));
            }
            num = num * (x0 - xj);
            den = den * (xi - xj);
        }
        acc = acc + yi * num * den.inv()?;
    }
    Ok(acc)
}

/// Solves `matrix · v = rhs` over GF(p) by Gauss-Jordan elimination.
///
/// The pivot is the first nonzero entry at or below the diagonal, which
/// keeps the elimination order deterministic.
pub fn solve_linear(
    matrix: &[Vec<FieldElement>],
    rhs: &[FieldElement],
) -> Result<Vec<FieldElement>, FieldError> {
    let n = matrix.len();
    if rhs.len() != n {
        return Err(FieldError::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    let Some(&reference) = rhs.first() else {
        return Ok(Vec::new());
    };
    let field = reference.field();

    let mut aug: Vec<Vec<FieldElement>> = Vec::with_capacity(n);
    for (row, &b) in matrix.iter().zip(rhs) {
        if row.len() != n {
            return Err(FieldError::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        for v in row {
            reference.check_same_field(v)?;
        }
        reference.check_same_field(&b)?;
        let mut r = row.clone();
        r.push(b);
        aug.push(r);
    }

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or(FieldError::SingularSystem(field.modulus()))?;
        aug.swap(col, pivot);

        let scale = aug[col][col].inv()?;
        for v in aug[col].iter_mut() {
            *v = *v * scale;
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (v, &p) in row.iter_mut().zip(&pivot_row) {
                *v = *v - factor * p;
            }
        }
    }

    Ok(aug.into_iter().map(|row| row[n]).collect())
}

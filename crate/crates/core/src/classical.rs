//! Bivariate-polynomial threshold-changeable secret sharing.
//!
//! The dealer picks `F(x, y)` with x-degree `dx` and y-degree `dy` and hands
//! party `i` the pair `F(i, y)`, `F(x, i)`. Any `dx + 1` parties recover the
//! secret from `F(x, 0)`, any `dy + 1` from `F(0, y)`, and thresholds in
//! between are reached by every party truncating its row polynomial and the
//! group solving for the coefficients of the truncated `F'(x, y)`.
//!
//! Nothing stops a party from keeping an untruncated copy of its share, and
//! [`attack_with_old_shares`] shows that `dx + 1` such copies always recover
//! the secret whatever threshold the group has since agreed on.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{
    lagrange_at, solve_linear, BivariatePoly, FieldElement, FieldError, PrimeField, UnivariatePoly,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("party {0} appears more than once")]
    DuplicateParty(u32),
    #[error("need at least {needed} shares, got {found}")]
    InsufficientShares { needed: usize, found: usize },
    #[error("expected exactly {expected} truncated shares, got {found}")]
    WrongShareCount { expected: usize, found: usize },
    #[error("party {party} supplied {found} evaluation points, expected {expected}")]
    EvalPointCount {
        party: u32,
        expected: usize,
        found: usize,
    },
    #[error("shares come from incompatible dealings")]
    InconsistentShares,
    #[error("cannot truncate below y-degree {floor}")]
    TruncationFloor { floor: usize },
    #[error("invalid share record: {0}")]
    InvalidRecord(String),
}

/// `7 + 2x + 2y + 3xy + 3y² + 5xy² + 7y³ + 3xy³` over GF(11): secret 7,
/// x-degree 1, y-degree 3. The CLI and tests use it as the fixed dealing.
pub fn reference_polynomial() -> BivariatePoly {
    let field = PrimeField::new(11).expect("11 is prime");
    BivariatePoly::from_grid(field, &[&[7, 2, 3, 7], &[2, 3, 5, 3]]).expect("grid is well formed")
}

/// Party `i`'s share: `F(i, y)` and `F(x, i)`.
///
/// Shares are plain values and can be copied freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalShare {
    party_id: u32,
    x_degree: usize,
    y_degree: usize,
    f_row: UnivariatePoly,
    f_col: UnivariatePoly,
}

impl ClassicalShare {
    pub fn party_id(&self) -> u32 {
        self.party_id
    }

    pub fn field(&self) -> PrimeField {
        self.f_row.field()
    }

    pub fn x_degree(&self) -> usize {
        self.x_degree
    }

    pub fn y_degree(&self) -> usize {
        self.y_degree
    }

    /// `F(i, y)`, a polynomial in `y`.
    pub fn f_row(&self) -> &UnivariatePoly {
        &self.f_row
    }

    /// `F(x, i)`, a polynomial in `x`.
    pub fn f_col(&self) -> &UnivariatePoly {
        &self.f_col
    }

    fn abscissa(&self) -> FieldElement {
        self.field().element(self.party_id as u64)
    }

    /// Drops the top y-coefficient of the row polynomial.
    pub fn truncate(&self) -> TruncatedShare {
        TruncatedShare {
            party_id: self.party_id,
            x_degree: self.x_degree,
            y_degree: self.y_degree - 1,
            f_row_truncated: self.f_row.truncated(self.y_degree - 1),
        }
    }

    /// Truncates the row polynomial down to `y_degree`, which must lie in
    /// `[x_degree, self.y_degree]`.
    pub fn truncate_to(&self, y_degree: usize) -> Result<TruncatedShare, ClassicalError> {
        if y_degree < self.x_degree || y_degree > self.y_degree {
            return Err(ClassicalError::TruncationFloor {
                floor: self.x_degree,
            });
        }
        Ok(TruncatedShare {
            party_id: self.party_id,
            x_degree: self.x_degree,
            y_degree,
            f_row_truncated: self.f_row.truncated(y_degree),
        })
    }

    pub fn to_record(&self) -> ShareRecord {
        let values =
            |p: &UnivariatePoly, d| p.padded_coefficients(d).iter().map(|c| c.value()).collect();
        ShareRecord {
            party_id: self.party_id,
            modulus: self.field().modulus(),
            f_row: values(&self.f_row, self.y_degree),
            f_col: values(&self.f_col, self.x_degree),
        }
    }

    pub fn from_record(record: &ShareRecord) -> Result<Self, ClassicalError> {
        let field = PrimeField::new(record.modulus as u64)?;
        if record.party_id == 0 || record.party_id >= record.modulus {
            return Err(ClassicalError::InvalidRecord(format!(
                "party_id {} outside [1, {})",
                record.party_id, record.modulus
            )));
        }
        if record.f_row.len() < 2 || record.f_col.len() < 2 {
            return Err(ClassicalError::InvalidRecord(
                "row and column polynomials need at least two coefficients".into(),
            ));
        }
        if record.f_row.len() < record.f_col.len() {
            return Err(ClassicalError::InvalidRecord(
                "row degree below column degree".into(),
            ));
        }
        if let Some(v) = record
            .f_row
            .iter()
            .chain(&record.f_col)
            .find(|&&v| v >= record.modulus)
        {
            return Err(ClassicalError::InvalidRecord(format!(
                "coefficient {v} not reduced modulo {}",
                record.modulus
            )));
        }
        let poly = |vals: &[u32]| {
            let v: Vec<u64> = vals.iter().map(|&x| x as u64).collect();
            UnivariatePoly::from_values(field, &v)
        };
        Ok(Self {
            party_id: record.party_id,
            x_degree: record.f_col.len() - 1,
            y_degree: record.f_row.len() - 1,
            f_row: poly(&record.f_row),
            f_col: poly(&record.f_col),
        })
    }
}

/// Serialized form of a [`ClassicalShare`]. Coefficient lists are ascending
/// and padded to the dealing's degree bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareRecord {
    pub party_id: u32,
    pub modulus: u32,
    pub f_row: Vec<u32>,
    pub f_col: Vec<u32>,
}

impl ShareRecord {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("share record serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, ClassicalError> {
        serde_json::from_str(text).map_err(|e| ClassicalError::InvalidRecord(e.to_string()))
    }
}

/// A row share after truncation to `y_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedShare {
    party_id: u32,
    x_degree: usize,
    y_degree: usize,
    f_row_truncated: UnivariatePoly,
}

impl TruncatedShare {
    pub fn party_id(&self) -> u32 {
        self.party_id
    }

    pub fn y_degree(&self) -> usize {
        self.y_degree
    }

    pub fn f_row_truncated(&self) -> &UnivariatePoly {
        &self.f_row_truncated
    }

    /// Number of parties needed to solve at this truncation level.
    pub fn threshold(&self) -> usize {
        self.y_degree + 1
    }
}

fn validate_parameters(
    field: PrimeField,
    parties: usize,
    x_degree: usize,
    y_degree: usize,
) -> Result<(), ClassicalError> {
    if parties == 0 || parties as u64 >= field.modulus() as u64 {
        return Err(ClassicalError::BadParameters(format!(
            "party count {parties} must lie in [1, {})",
            field.modulus()
        )));
    }
    if x_degree < 1 {
        return Err(ClassicalError::BadParameters(
            "x-degree must be at least 1".into(),
        ));
    }
    if y_degree < x_degree {
        return Err(ClassicalError::BadParameters(format!(
            "y-degree {y_degree} is below x-degree {x_degree}"
        )));
    }
    Ok(())
}

/// Deals `secret` to parties `1..=parties` under a fresh random polynomial.
pub fn deal<R: rand::Rng + ?Sized>(
    secret: FieldElement,
    parties: usize,
    x_degree: usize,
    y_degree: usize,
    rng: &mut R,
) -> Result<(BivariatePoly, Vec<ClassicalShare>), ClassicalError> {
    let field = secret.field();
    validate_parameters(field, parties, x_degree, y_degree)?;
    let poly = BivariatePoly::random(field, x_degree, y_degree, secret, rng)?;
    let shares = deal_from_polynomial(&poly, parties)?;
    Ok((poly, shares))
}

/// Deals a caller-chosen polynomial, bypassing the random generator.
pub fn deal_from_polynomial(
    poly: &BivariatePoly,
    parties: usize,
) -> Result<Vec<ClassicalShare>, ClassicalError> {
    let field = poly.field();
    validate_parameters(field, parties, poly.x_degree(), poly.y_degree())?;
    (1..=parties as u64)
        .map(|i| {
            let at = field.element(i);
            Ok(ClassicalShare {
                party_id: i as u32,
                x_degree: poly.x_degree(),
                y_degree: poly.y_degree(),
                f_row: poly.restrict_x(at)?,
                f_col: poly.restrict_y(at)?,
            })
        })
        .collect()
}

fn check_distinct<I: IntoIterator<Item = u32>>(ids: I) -> Result<(), ClassicalError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ClassicalError::DuplicateParty(id));
        }
    }
    Ok(())
}

fn check_consistent(shares: &[ClassicalShare]) -> Result<(), ClassicalError> {
    if let Some(first) = shares.first() {
        let same = |s: &ClassicalShare| {
            s.field() == first.field()
                && s.x_degree == first.x_degree
                && s.y_degree == first.y_degree
        };
        if !shares.iter().all(same) {
            return Err(ClassicalError::InconsistentShares);
        }
    }
    check_distinct(shares.iter().map(|s| s.party_id))
}

/// Low-threshold reconstruction: interpolates `F(x, 0)` from each party's
/// `F(i, 0)`. Needs `x_degree + 1` shares.
#[doc(alias = "reconstruct_threshold2")]
pub fn reconstruct_from_rows(shares: &[ClassicalShare]) -> Result<FieldElement, ClassicalError> {
    check_consistent(shares)?;
    let needed = shares.first().map_or(2, |s| s.x_degree + 1);
    if shares.len() < needed {
        return Err(ClassicalError::InsufficientShares {
            needed,
            found: shares.len(),
        });
    }
    let field = shares[0].field();
    let points = shares
        .iter()
        .map(|s| Ok((s.abscissa(), s.f_row.eval(field.zero())?)))
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(lagrange_at(&points, field.zero())?)
}

/// High-threshold reconstruction: interpolates `F(0, y)` from each party's
/// `F(0, i)`. Needs `y_degree + 1` shares.
#[doc(alias = "reconstruct_threshold4")]
pub fn reconstruct_from_columns(shares: &[ClassicalShare]) -> Result<FieldElement, ClassicalError> {
    check_consistent(shares)?;
    let needed = shares.first().map_or(2, |s| s.y_degree + 1);
    if shares.len() < needed {
        return Err(ClassicalError::InsufficientShares {
            needed,
            found: shares.len(),
        });
    }
    let field = shares[0].field();
    let points = shares
        .iter()
        .map(|s| Ok((s.abscissa(), s.f_col.eval(field.zero())?)))
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(lagrange_at(&points, field.zero())?)
}

/// Evaluation points where party `i` uses `y = m(i-1)+1+shift, …, m·i+shift`
/// with `m = per_party`. With `m = 2` and no shift, parties 1, 2, 3 evaluate
/// at (1,1),(1,2),(2,3),(2,4),(3,5),(3,6).
pub fn default_eval_points(
    field: PrimeField,
    party_ids: &[u32],
    per_party: usize,
    shift: u64,
) -> Vec<Vec<FieldElement>> {
    party_ids
        .iter()
        .map(|&i| {
            let base = per_party as u64 * (i as u64 - 1) + 1 + shift;
            (0..per_party as u64)
                .map(|k| field.element(base + k))
                .collect()
        })
        .collect()
}

/// The square linear system whose unknowns are the coefficients of the
/// truncated polynomial, ordered `1, x, y, xy, y², xy², …` (y-power outer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSystem {
    /// (party, y) per row.
    pub points: Vec<(u32, FieldElement)>,
    pub matrix: Vec<Vec<FieldElement>>,
    pub rhs: Vec<FieldElement>,
}

impl TruncatedSystem {
    pub fn solve(&self) -> Result<Vec<FieldElement>, ClassicalError> {
        Ok(solve_linear(&self.matrix, &self.rhs)?)
    }
}

pub fn build_truncated_system(
    truncated: &[TruncatedShare],
    eval_points: &[Vec<FieldElement>],
) -> Result<TruncatedSystem, ClassicalError> {
    let Some(first) = truncated.first() else {
        return Err(ClassicalError::InsufficientShares {
            needed: 1,
            found: 0,
        });
    };
    let (dx, dy) = (first.x_degree, first.y_degree);
    let field = first.f_row_truncated.field();
    if truncated
        .iter()
        .any(|t| t.x_degree != dx || t.y_degree != dy || t.f_row_truncated.field() != field)
    {
        return Err(ClassicalError::InconsistentShares);
    }
    check_distinct(truncated.iter().map(|t| t.party_id))?;
    if truncated.len() != dy + 1 {
        return Err(ClassicalError::WrongShareCount {
            expected: dy + 1,
            found: truncated.len(),
        });
    }
    if eval_points.len() != truncated.len() {
        return Err(ClassicalError::WrongShareCount {
            expected: truncated.len(),
            found: eval_points.len(),
        });
    }

    let mut system = TruncatedSystem {
        points: Vec::new(),
        matrix: Vec::new(),
        rhs: Vec::new(),
    };
    for (share, ys) in truncated.iter().zip(eval_points) {
        if ys.len() != dx + 1 {
            return Err(ClassicalError::EvalPointCount {
                party: share.party_id,
                expected: dx + 1,
                found: ys.len(),
            });
        }
        let x = field.element(share.party_id as u64);
        for &y in ys {
            let row = (0..=dy)
                .flat_map(|j| (0..=dx).map(move |i| (i as u64, j as u64)))
                .map(|(i, j)| x.pow(i) * y.pow(j))
                .collect();
            system.points.push((share.party_id, y));
            system.matrix.push(row);
            system.rhs.push(share.f_row_truncated.eval(y)?);
        }
    }
    Ok(system)
}

/// Intermediate-threshold reconstruction from truncated row shares.
///
/// Each of the `y_degree + 1` parties evaluates its truncated row at
/// `x_degree + 1` points; the resulting square system is solved for all
/// coefficients and the constant term returned. A singular system surfaces
/// as [`FieldError::SingularSystem`] so the caller can pick other points.
#[doc(alias = "reconstruct_threshold3")]
pub fn reconstruct_truncated(
    truncated: &[TruncatedShare],
    eval_points: &[Vec<FieldElement>],
) -> Result<FieldElement, ClassicalError> {
    let system = build_truncated_system(truncated, eval_points)?;
    Ok(system.solve()?[0])
}

/// [`reconstruct_truncated`] over [`default_eval_points`], shifting the
/// schedule by one until the system is invertible. Returns the secret and
/// the shift used.
pub fn reconstruct_truncated_with_retry(
    truncated: &[TruncatedShare],
) -> Result<(FieldElement, u64), ClassicalError> {
    let Some(first) = truncated.first() else {
        return Err(ClassicalError::InsufficientShares {
            needed: 1,
            found: 0,
        });
    };
    let field = first.f_row_truncated.field();
    let ids: Vec<u32> = truncated.iter().map(|t| t.party_id).collect();
    let mut last = None;
    for shift in 0..field.modulus() as u64 {
        let points = default_eval_points(field, &ids, first.x_degree + 1, shift);
        match reconstruct_truncated(truncated, &points) {
            Ok(secret) => return Ok((secret, shift)),
            Err(e @ ClassicalError::Field(FieldError::SingularSystem(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(
        last.unwrap_or(ClassicalError::Field(FieldError::SingularSystem(
            field.modulus(),
        ))),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackMethod {
    /// Interpolate `F(x, 0)` from the old rows.
    ColumnPolyAtZero,
    /// Truncate the old rows to y-degree `x_degree` and solve.
    ReTruncation,
}

impl AttackMethod {
    pub fn label(&self) -> &'static str {
        match self {
            AttackMethod::ColumnPolyAtZero => "column-poly-at-zero",
            AttackMethod::ReTruncation => "re-truncation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackTranscript {
    pub colluding_party_ids: Vec<u32>,
    pub declared_threshold: usize,
    pub recovered_secret: FieldElement,
    pub method: AttackMethod,
    pub narrative: Vec<String>,
}

/// Recovers the secret from `x_degree + 1` retained, untruncated shares,
/// whatever threshold the remaining parties have agreed to.
pub fn attack_with_old_shares(
    old_shares: &[ClassicalShare],
    declared_threshold: usize,
    method: AttackMethod,
) -> Result<AttackTranscript, ClassicalError> {
    check_consistent(old_shares)?;
    let needed = old_shares.first().map_or(2, |s| s.x_degree + 1);
    if old_shares.len() < needed {
        return Err(ClassicalError::InsufficientShares {
            needed,
            found: old_shares.len(),
        });
    }
    let used = &old_shares[..needed];
    let ids: Vec<u32> = used.iter().map(|s| s.party_id).collect();
    let mut narrative = vec![format!(
        "declared threshold is {declared_threshold}; adversary holds untruncated shares of parties {ids:?}"
    )];

    let recovered_secret = match method {
        AttackMethod::ColumnPolyAtZero => {
            let field = used[0].field();
            for s in used {
                narrative.push(format!(
                    "party {} row F({}, y) = {} gives F({}, 0) = {}",
                    s.party_id,
                    s.party_id,
                    s.f_row,
                    s.party_id,
                    s.f_row.eval(field.zero())?
                ));
            }
            let secret = reconstruct_from_rows(used)?;
            narrative.push(format!(
                "Lagrange interpolation of F(x, 0) at x = 0 yields {secret}"
            ));
            secret
        }
        AttackMethod::ReTruncation => {
            let floor = used[0].x_degree;
            let truncated = used
                .iter()
                .map(|s| s.truncate_to(floor))
                .collect::<Result<Vec<_>, _>>()?;
            for t in &truncated {
                narrative.push(format!(
                    "party {} row truncated to y-degree {floor}: {}",
                    t.party_id, t.f_row_truncated
                ));
            }
            let (secret, shift) = reconstruct_truncated_with_retry(&truncated)?;
            narrative.push(format!(
                "solved the {n}x{n} system (schedule shift {shift}) for constant term {secret}",
                n = truncated.len() * (floor + 1)
            ));
            secret
        }
    };
    narrative.push(format!(
        "secret {recovered_secret} recovered by {} parties despite declared threshold {declared_threshold}",
        used.len()
    ));

    Ok(AttackTranscript {
        colluding_party_ids: ids,
        declared_threshold,
        recovered_secret,
        method,
        narrative,
    })
}

//! Exact coefficient rings (ℚ, GF(p), ℤ) and the linear-algebra kernels every
//! decision reduces to: span membership with coefficients, annihilating
//! functionals over fields, ℝ/ℤ characters over the integers, and
//! span elements supported on a prescribed coordinate set.

mod echelon;
mod scalar;
mod smith;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub use echelon::{Combination, Echelon, EchelonRow};
pub use scalar::{format_rational, frac, parse_rational, RingSpec, Scalar, MAX_MODULUS};
pub use smith::{smith_form, CharacterQZ, SmithForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("unknown ring `{0}` (expected Q, Z or GF(p))")]
    UnknownRing(String),
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("{value} has no image in {ring}")]
    NotRepresentable { value: String, ring: RingSpec },
    #[error("ring mismatch: {left} vs {right}")]
    Mismatch { left: RingSpec, right: RingSpec },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("target lies in the span; no separating certificate exists")]
    IsMember,
    #[error("{0} is not a field")]
    NotAField(RingSpec),
    #[error("characters are only produced over Z, not {0}")]
    NotIntegers(RingSpec),
    #[error("coordinate {index} out of range for length {len}")]
    CoordinateOutOfRange { index: usize, len: usize },
}

/// A dense matrix whose entries all live in one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    /// Builds a matrix from rows, checking that every row has `cols` entries
    /// and every entry lies in `ring`.
    pub fn from_rows(ring: RingSpec, cols: usize, rows: &[Vec<Scalar>]) -> Result<Self, RingError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(RingError::LengthMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for x in row {
                if x.ring() != ring {
                    return Err(RingError::Mismatch {
                        left: x.ring(),
                        right: ring,
                    });
                }
            }
            entries.extend(row.iter().cloned());
        }
        Ok(ExactMatrix {
            ring,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.ring, self.cols);
        for (i, row) in self.row_iter().enumerate() {
            e.insert(i, row.to_vec());
        }
        e
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanMembership {
    /// Coefficients `c_j` with `Σ c_j · gen_j = target`.
    Member(Vec<Scalar>),
    NonMember,
}

impl SpanMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, SpanMembership::Member(_))
    }
}

fn checked_inputs(
    target: &[Scalar],
    generators: &[Vec<Scalar>],
    ring: RingSpec,
) -> Result<ExactMatrix, RingError> {
    for x in target {
        if x.ring() != ring {
            return Err(RingError::Mismatch {
                left: x.ring(),
                right: ring,
            });
        }
    }
    ExactMatrix::from_rows(ring, target.len(), generators)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Option<Scalar> {
    let first = a.first()?;
    let mut acc = Scalar::zero(first.ring());
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    Some(acc)
}

/// Decides whether `target` lies in the `ring`-span of `generators`.
pub fn span_membership(
    target: &[Scalar],
    generators: &[Vec<Scalar>],
    ring: RingSpec,
) -> Result<SpanMembership, RingError> {
    let matrix = checked_inputs(target, generators, ring)?;
    let e = matrix.echelon();
    Ok(match e.solve(target) {
        Some(combo) => {
            let mut coeffs = vec![Scalar::zero(ring); generators.len()];
            for (k, c) in combo {
                coeffs[k] = c;
            }
            SpanMembership::Member(coeffs)
        }
        None => SpanMembership::NonMember,
    })
}

/// A functional `φ` with `φ·gen = 0` for every generator and `φ·target ≠ 0`.
///
/// Taken from the null-space basis of the reduced generator matrix: the
/// first free column whose basis vector does not kill the target.
pub fn dual_functional(
    target: &[Scalar],
    generators: &[Vec<Scalar>],
    ring: RingSpec,
) -> Result<Vec<Scalar>, RingError> {
    if !ring.is_field() {
        return Err(RingError::NotAField(ring));
    }
    let matrix = checked_inputs(target, generators, ring)?;
    let mut e = matrix.echelon();
    if e.contains(target) {
        return Err(RingError::IsMember);
    }
    e.reduce();
    let pivots: BTreeSet<usize> = e.rows().iter().map(|r| r.pivot).collect();
    for free in (0..target.len()).filter(|j| !pivots.contains(j)) {
        let mut phi = vec![Scalar::zero(ring); target.len()];
        phi[free] = Scalar::one(ring);
        for row in e.rows() {
            phi[row.pivot] = -&row.entries[free];
        }
        if dot(&phi, target).is_some_and(|v| !v.is_zero()) {
            return Ok(phi);
        }
    }
    unreachable!("a non-member is separated by some null-space basis vector")
}

fn to_ints(v: &[Scalar]) -> Result<Vec<BigInt>, RingError> {
    v.iter()
        .map(|x| {
            x.as_integer().cloned().ok_or(RingError::Mismatch {
                left: x.ring(),
                right: RingSpec::Integers,
            })
        })
        .collect()
}

/// A character `χ` of ℤⁿ with `χ(gen) ≡ 0` for every generator and
/// `χ(target) ≢ 0 (mod 1)`.
///
/// Preference order: a coordinate character `e_j / d` with `d` the smallest
/// available denominator (elementary divisors above 1, then 2 when the
/// lattice is not of full rank) and `j` the lowest coordinate; otherwise the
/// Smith-form witness with the smallest failing elementary divisor; otherwise
/// a free Smith direction.
pub fn dual_character(
    target: &[Scalar],
    generators: &[Vec<Scalar>],
) -> Result<CharacterQZ, RingError> {
    let ring = RingSpec::Integers;
    if let Some(x) = target.iter().chain(generators.iter().flatten()).next() {
        if x.ring() != ring {
            return Err(RingError::NotIntegers(x.ring()));
        }
    }
    let matrix = checked_inputs(target, generators, ring)?;
    let e = matrix.echelon();
    if e.contains(target) {
        return Err(RingError::IsMember);
    }
    let n = target.len();
    let t = to_ints(target)?;
    let basis: Vec<Vec<BigInt>> = e
        .rows()
        .iter()
        .map(|r| to_ints(&r.entries))
        .collect::<Result<_, _>>()?;
    let snf = smith_form(&basis, n);

    let mut denominators: Vec<BigInt> = snf
        .divisors
        .iter()
        .filter(|d| *d > &BigInt::from(1))
        .cloned()
        .collect();
    if snf.rank() < n {
        denominators.push(BigInt::from(2));
    }
    denominators.sort();
    denominators.dedup();
    for d in &denominators {
        for j in 0..n {
            if !t[j].is_multiple_of(d) && basis.iter().all(|b| b[j].is_multiple_of(d)) {
                let mut coeffs = vec![BigRational::zero(); n];
                coeffs[j] = BigRational::new(BigInt::from(1), d.clone());
                return Ok(CharacterQZ::new(coeffs));
            }
        }
    }

    // y = t V in Smith coordinates
    let y: Vec<BigInt> = (0..n)
        .map(|col| t.iter().zip(&snf.right).map(|(ti, vrow)| ti * &vrow[col]).sum())
        .collect();
    let column = |col: usize, scale: &BigRational| -> CharacterQZ {
        CharacterQZ::new(
            snf.right
                .iter()
                .map(|vrow| BigRational::from_integer(vrow[col].clone()) * scale)
                .collect(),
        )
    };
    let failing = snf
        .divisors
        .iter()
        .enumerate()
        .filter(|(i, d)| !y[*i].is_multiple_of(d))
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)));
    if let Some((i, d)) = failing {
        return Ok(column(i, &BigRational::new(BigInt::from(1), d.clone())));
    }
    let free = (snf.rank()..n)
        .find(|&i| !y[i].is_zero())
        .expect("a non-member has an obstruction in Smith coordinates");
    let scale = BigRational::new(BigInt::from(1), BigInt::from(2) * y[free].abs());
    Ok(column(free, &scale))
}

/// A nonzero element of the span vanishing outside `coords`, if one exists.
///
/// Columns are reordered so that the excluded coordinates come first; rows of
/// the echelon basis pivoting inside `coords` then span exactly the elements
/// supported on `coords`. The first such row is returned, scaled so its
/// leading entry is 1 (fields) or positive (integers).
pub fn span_intersect_coords(
    generators: &[Vec<Scalar>],
    coords: &BTreeSet<usize>,
    ring: RingSpec,
) -> Result<Option<Vec<Scalar>>, RingError> {
    let Some(len) = generators.first().map(Vec::len) else {
        return Ok(None);
    };
    ExactMatrix::from_rows(ring, len, generators)?;
    if let Some(&bad) = coords.iter().find(|&&c| c >= len) {
        return Err(RingError::CoordinateOutOfRange { index: bad, len });
    }
    let order: Vec<usize> = (0..len)
        .filter(|j| !coords.contains(j))
        .chain(coords.iter().copied())
        .collect();
    let boundary = len - coords.len();
    let mut e = Echelon::new(ring, len);
    for (i, g) in generators.iter().enumerate() {
        e.insert(i, order.iter().map(|&j| g[j].clone()).collect());
    }
    let Some(row) = e.rows().iter().find(|r| r.pivot >= boundary) else {
        return Ok(None);
    };
    let mut out = vec![Scalar::zero(ring); len];
    for (pos, &j) in order.iter().enumerate() {
        out[j] = row.entries[pos].clone();
    }
    let lead = out.iter().find(|x| !x.is_zero()).cloned().expect("nonzero row");
    let scale = if ring.is_field() {
        lead.inverse().expect("field")
    } else if lead.as_integer().is_some_and(|z| z.is_negative()) {
        Scalar::from_i64(ring, -1)
    } else {
        Scalar::one(ring)
    };
    Ok(Some(out.iter().map(|x| &scale * x).collect()))
}

//! Smith normal form with the column transform, and the ℝ/ℤ characters
//! read off from it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::frac;

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Nonzero diagonal entries `d_0 | d_1 | ...`, all positive.
    pub divisors: Vec<BigInt>,
    /// Unimodular `V` with `U A V = D`; columns index the diagonal.
    pub right: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// col_dst -= q * col_src
fn col_sub(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let delta = &row[src] * q;
        row[dst] -= delta;
    }
}

fn row_sub(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let src_row = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(&src_row) {
        *d -= s * q;
    }
}

/// Smallest nonzero entry (by absolute value) in the lower-right block
/// starting at `k`, ties broken by row then column.
fn smallest_entry(a: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(k) {
        for (j, x) in row.iter().enumerate().skip(k) {
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_form(matrix: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = a.len();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut divisors = Vec::new();

    for k in 0..rows.min(cols) {
        let Some((pi, pj)) = smallest_entry(&a, k) else {
            break;
        };
        a.swap(k, pi);
        swap_cols(&mut a, k, pj);
        swap_cols(&mut v, k, pj);

        loop {
            let mut dirty = false;
            for i in k + 1..rows {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = a[i][k].div_floor(&a[k][k]);
                row_sub(&mut a, i, k, &q);
                dirty |= !a[i][k].is_zero();
            }
            for j in k + 1..cols {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = a[k][j].div_floor(&a[k][k]);
                col_sub(&mut a, j, k, &q);
                col_sub(&mut v, j, k, &q);
                dirty |= !a[k][j].is_zero();
            }
            if dirty {
                // a smaller remainder sits in row k or column k; move it to the pivot
                let mut best = (k, k);
                for i in k + 1..rows {
                    if !a[i][k].is_zero() && a[i][k].abs() < a[best.0][best.1].abs() {
                        best = (i, k);
                    }
                }
                for j in k + 1..cols {
                    if !a[k][j].is_zero() && a[k][j].abs() < a[best.0][best.1].abs() {
                        best = (k, j);
                    }
                }
                a.swap(k, best.0);
                swap_cols(&mut a, k, best.1);
                swap_cols(&mut v, k, best.1);
                continue;
            }
            // divisibility: fold an offending row into row k and go again
            let pivot = a[k][k].clone();
            let offending = (k + 1..rows)
                .find(|&i| (k + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match offending {
                Some(i) => {
                    let neg_one = -BigInt::one();
                    row_sub(&mut a, k, i, &neg_one);
                }
                None => break,
            }
        }
        if a[k][k].is_negative() {
            for x in a[k].iter_mut() {
                *x = -&*x;
            }
        }
        divisors.push(a[k][k].clone());
    }

    SmithForm { divisors, right: v }
}

/// A homomorphism ℤⁿ → ℝ/ℤ given by rational coefficients taken mod 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterQZ {
    coefficients: Vec<BigRational>,
}

impl CharacterQZ {
    /// Reduces every coefficient into `[0, 1)`.
    pub fn new(coefficients: Vec<BigRational>) -> Self {
        CharacterQZ {
            coefficients: coefficients.iter().map(frac).collect(),
        }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// `χ(v)` as a representative in `[0, 1)`.
    pub fn evaluate(&self, v: &[BigInt]) -> BigRational {
        let sum: BigRational = self
            .coefficients
            .iter()
            .zip(v)
            .filter(|(c, x)| !c.is_zero() && !x.is_zero())
            .map(|(c, x)| c * BigRational::from_integer(x.clone()))
            .fold(BigRational::zero(), |acc, t| acc + t);
        frac(&sum)
    }

    pub fn vanishes_on(&self, v: &[BigInt]) -> bool {
        self.evaluate(v).is_zero()
    }
}

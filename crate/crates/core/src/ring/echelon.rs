//! Incremental row-echelon bases over a field or over the integers.
//!
//! Rows are kept sorted by pivot column. Over a field every pivot is 1; over
//! the integers pivots are positive and rows are merged with extended gcd
//! steps, so the rows always form a lattice basis of everything inserted.
//! Each row remembers how it was built from the inserted vectors, which is
//! what turns a membership test into a coefficient certificate.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::scalar::{RingSpec, Scalar};

/// Sparse combination of inserted vectors, keyed by insertion index.
pub type Combination = BTreeMap<usize, Scalar>;

#[derive(Clone, Debug)]
pub struct EchelonRow {
    pub pivot: usize,
    pub entries: Vec<Scalar>,
    pub combination: Combination,
}

#[derive(Clone, Debug)]
pub struct Echelon {
    ring: RingSpec,
    dim: usize,
    rows: Vec<EchelonRow>,
}

fn axpy(target: &mut [Scalar], factor: &Scalar, source: &[Scalar]) {
    // target += factor * source
    if factor.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t = &*t + &(factor * s);
        }
    }
}

fn combo_axpy(target: &mut Combination, factor: &Scalar, source: &Combination) {
    if factor.is_zero() {
        return;
    }
    for (&k, v) in source {
        let updated = match target.get(&k) {
            Some(existing) => existing + &(factor * v),
            None => factor * v,
        };
        if updated.is_zero() {
            target.remove(&k);
        } else {
            target.insert(k, updated);
        }
    }
}

fn combo_scale(combo: &Combination, factor: &Scalar) -> Combination {
    combo
        .iter()
        .filter_map(|(&k, v)| {
            let s = factor * v;
            (!s.is_zero()).then_some((k, s))
        })
        .collect()
}

fn int(s: &Scalar) -> &BigInt {
    s.as_integer().expect("integer scalar")
}

impl Echelon {
    pub fn new(ring: RingSpec, dim: usize) -> Self {
        Echelon {
            ring,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[EchelonRow] {
        &self.rows
    }

    /// Inserts `vector` under the label `index`. Returns `true` when the rank
    /// grew (over the integers the lattice may also grow without a rank
    /// change; that case returns `false`).
    pub fn insert(&mut self, index: usize, vector: Vec<Scalar>) -> bool {
        debug_assert_eq!(vector.len(), self.dim);
        let mut v = vector;
        let mut combo: Combination = BTreeMap::new();
        combo.insert(index, Scalar::one(self.ring));
        let mut merged = false;

        for row in self.rows.iter_mut() {
            // a leading entry left of this pivot is a new pivot; merging
            // here would push that entry into an existing row
            match v.iter().position(|x| !x.is_zero()) {
                None => {
                    if merged {
                        self.reduce();
                    }
                    return false;
                }
                Some(lead) if lead < row.pivot => break,
                Some(_) => {}
            }
            let c = v[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            if self.ring.is_field() {
                let neg = -&c;
                axpy(&mut v, &neg, &row.entries);
                combo_axpy(&mut combo, &neg, &row.combination);
            } else {
                let b = int(&row.entries[row.pivot]).clone();
                let a = int(&c).clone();
                let (q, r) = a.div_rem(&b);
                if r.is_zero() {
                    let neg = Scalar::Integer(-q);
                    axpy(&mut v, &neg, &row.entries);
                    combo_axpy(&mut combo, &neg, &row.combination);
                } else {
                    let ext = b.extended_gcd(&a);
                    let (g, s, t) = (ext.gcd, ext.x, ext.y);
                    // [s t; -a/g b/g] has determinant 1.
                    let s = Scalar::Integer(s);
                    let t = Scalar::Integer(t);
                    let bg = Scalar::Integer(&b / &g);
                    let ag = Scalar::Integer(-(&a / &g));

                    let mut new_row: Vec<Scalar> = row.entries.iter().map(|x| &s * x).collect();
                    axpy(&mut new_row, &t, &v);
                    let mut new_combo = combo_scale(&row.combination, &s);
                    combo_axpy(&mut new_combo, &t, &combo);

                    let mut new_v: Vec<Scalar> = v.iter().map(|x| &bg * x).collect();
                    axpy(&mut new_v, &ag, &row.entries);
                    let mut next_combo = combo_scale(&combo, &bg);
                    combo_axpy(&mut next_combo, &ag, &row.combination);

                    row.entries = new_row;
                    row.combination = new_combo;
                    v = new_v;
                    combo = next_combo;
                    merged = true;
                    debug_assert!(v[row.pivot].is_zero());
                }
            }
        }

        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            if merged {
                self.reduce();
            }
            return false;
        };
        let lead = v[pivot].clone();
        let normalizer = if self.ring.is_field() {
            lead.inverse().expect("nonzero field element")
        } else if int(&lead).is_negative() {
            Scalar::from_i64(self.ring, -1)
        } else {
            Scalar::one(self.ring)
        };
        if !normalizer.is_one() {
            v = v.iter().map(|x| &normalizer * x).collect();
            combo = combo_scale(&combo, &normalizer);
        }
        let at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(
            at,
            EchelonRow {
                pivot,
                entries: v,
                combination: combo,
            },
        );
        if !self.ring.is_field() {
            // keeps entries from growing without bound across insertions
            self.reduce();
        }
        true
    }

    /// Expresses `target` in terms of the inserted vectors, if it lies in
    /// their span (field) or lattice (integers).
    pub fn solve(&self, target: &[Scalar]) -> Option<Combination> {
        debug_assert_eq!(target.len(), self.dim);
        let mut t = target.to_vec();
        let mut coeffs: Combination = BTreeMap::new();
        for row in &self.rows {
            let c = t[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            let q = if self.ring.is_field() {
                c
            } else {
                let (q, r) = int(&c).div_rem(int(&row.entries[row.pivot]));
                if !r.is_zero() {
                    return None;
                }
                Scalar::Integer(q)
            };
            axpy(&mut t, &-&q, &row.entries);
            combo_axpy(&mut coeffs, &q, &row.combination);
        }
        t.iter().all(Scalar::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, target: &[Scalar]) -> bool {
        self.solve(target).is_some()
    }

    /// Fully reduces the basis: over a field, reduced row-echelon form; over
    /// the integers, Hermite normal form (entries above a pivot lie in
    /// `[0, pivot)`).
    pub fn reduce(&mut self) {
        // left to right within each row: reducing at a pivot only touches
        // columns from that pivot on
        for r in 0..self.rows.len() {
            for j in r + 1..self.rows.len() {
                let (upper, lower) = self.rows.split_at_mut(j);
                let (other, row) = (&mut upper[r], &lower[0]);
                let c = other.entries[row.pivot].clone();
                if c.is_zero() {
                    continue;
                }
                let q = if self.ring.is_field() {
                    c
                } else {
                    let q = int(&c).div_floor(int(&row.entries[row.pivot]));
                    if q.is_zero() {
                        continue;
                    }
                    Scalar::Integer(q)
                };
                let neg = -&q;
                axpy(&mut other.entries, &neg, &row.entries);
                combo_axpy(&mut other.combination, &neg, &row.combination);
            }
        }
    }

    /// Integer pivots of the basis rows, in pivot order.
    pub fn integer_pivots(&self) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|r| int(&r.entries[r.pivot]).clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zv(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_i64(RingSpec::Integers, x)).collect()
    }

    fn qv(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_i64(RingSpec::Rationals, x)).collect()
    }

    #[test]
    fn integer_gcd_merge_keeps_the_lattice() {
        let mut e = Echelon::new(RingSpec::Integers, 1);
        e.insert(0, zv(&[6]));
        e.insert(1, zv(&[4]));
        assert_eq!(e.rank(), 1);
        assert_eq!(e.integer_pivots(), vec![BigInt::from(2)]);
        let c = e.solve(&zv(&[2])).unwrap();
        let total: BigInt = c
            .iter()
            .map(|(&k, v)| int(v) * BigInt::from([6, 4][k]))
            .sum();
        assert_eq!(total, BigInt::from(2));
        assert!(e.solve(&zv(&[3])).is_none());
    }

    #[test]
    fn new_leading_column_becomes_its_own_row() {
        let mut e = Echelon::new(RingSpec::Integers, 2);
        e.insert(0, zv(&[0, 3]));
        e.insert(1, zv(&[1, 5]));
        assert_eq!(e.rows().iter().map(|r| r.pivot).collect::<Vec<_>>(), vec![0, 1]);
        assert!(e.contains(&zv(&[1, 2])));
        assert!(!e.contains(&zv(&[0, 1])));
        assert!(!e.contains(&zv(&[1, 0])));
    }

    #[test]
    fn field_echelon_rank() {
        let mut e = Echelon::new(RingSpec::Rationals, 3);
        assert!(e.insert(0, qv(&[1, -1, 0])));
        assert!(e.insert(1, qv(&[0, 1, -1])));
        assert!(!e.insert(2, qv(&[1, 0, -1])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&qv(&[2, 3, -5])));
        assert!(!e.contains(&qv(&[1, 0, 0])));
    }

    #[test]
    fn hermite_reduction_bounds_entries() {
        let mut e = Echelon::new(RingSpec::Integers, 2);
        e.insert(0, zv(&[1, 7]));
        e.insert(1, zv(&[0, 3]));
        e.reduce();
        let top = &e.rows()[0].entries;
        assert_eq!(top, &zv(&[1, 1]));
    }
}

//! Elements of the permutation module `R[ℚⁿ]`, the action of order
//! automorphisms on them, and the orbit-sum maps `Ω_S`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use thiserror::Error;

use crate::exec::Execution;
use crate::ring::{format_rational, RingError, RingSpec, Scalar};
use crate::structure::{ParamSet, PatternKey, Point, StructureOracle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PmodError {
    #[error("tuple of length {found} in a module of arity {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("map is not strictly increasing at {0}")]
    NotIncreasing(String),
    #[error("map is not injective at {0}")]
    NotInjective(String),
    #[error("map is undefined at support point {0}")]
    DomainTooSmall(String),
}

/// A finite formal sum `Σ α_w · w` over tuples `w ∈ ℚⁿ`. No zero
/// coefficients are stored and terms are ordered lexicographically by tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModVector {
    ring: RingSpec,
    arity: usize,
    terms: BTreeMap<Vec<Point>, Scalar>,
}

impl ModVector {
    pub fn zero(ring: RingSpec, arity: usize) -> Self {
        ModVector {
            ring,
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// `1 · tuple`.
    pub fn basis(ring: RingSpec, tuple: Vec<Point>) -> Self {
        let arity = tuple.len();
        let mut terms = BTreeMap::new();
        terms.insert(tuple, Scalar::one(ring));
        ModVector { ring, arity, terms }
    }

    /// Collects terms, summing repeated tuples and dropping zeros.
    pub fn from_terms<I>(ring: RingSpec, arity: usize, terms: I) -> Result<Self, PmodError>
    where
        I: IntoIterator<Item = (Vec<Point>, Scalar)>,
    {
        let mut v = ModVector::zero(ring, arity);
        for (tuple, coeff) in terms {
            if tuple.len() != arity {
                return Err(PmodError::ArityMismatch {
                    expected: arity,
                    found: tuple.len(),
                });
            }
            if coeff.ring() != ring {
                return Err(RingError::Mismatch {
                    left: coeff.ring(),
                    right: ring,
                }
                .into());
            }
            v.add_term(tuple, &coeff);
        }
        Ok(v)
    }

    /// Convenience for integer tuples and integer coefficients.
    pub fn from_int_terms(ring: RingSpec, terms: &[(i64, &[i64])]) -> Self {
        let arity = terms.first().map_or(1, |(_, t)| t.len());
        ModVector::from_terms(
            ring,
            arity,
            terms.iter().map(|(c, t)| {
                (
                    t.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
                    Scalar::from_i64(ring, *c),
                )
            }),
        )
        .expect("well-formed integer terms")
    }

    fn add_term(&mut self, tuple: Vec<Point>, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&tuple) {
            Some(existing) => {
                let sum = &*existing + coeff;
                if sum.is_zero() {
                    self.terms.remove(&tuple);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(tuple, coeff.clone());
            }
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Point>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, tuple: &[Point]) -> Scalar {
        self.terms
            .get(tuple)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ring))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += coeff · other`.
    pub fn add_scaled(&mut self, coeff: &Scalar, other: &ModVector) {
        debug_assert_eq!(self.ring, other.ring);
        debug_assert_eq!(self.arity, other.arity);
        for (tuple, c) in &other.terms {
            self.add_term(tuple.clone(), &(coeff * c));
        }
    }

    pub fn scale(&self, coeff: &Scalar) -> ModVector {
        let mut out = ModVector::zero(self.ring, self.arity);
        out.add_scaled(coeff, self);
        out
    }

    /// Re-reads every coefficient in another ring.
    pub fn with_ring(&self, ring: RingSpec) -> Result<ModVector, PmodError> {
        ModVector::from_terms(
            ring,
            self.arity,
            self.terms
                .iter()
                .map(|(t, c)| Ok((t.clone(), Scalar::from_rational(ring, &c.to_rational())?)))
                .collect::<Result<Vec<_>, RingError>>()?,
        )
    }

    /// Every rational occurring as a coordinate. Automorphisms fixing these
    /// points fix the vector.
    pub fn support_points(&self) -> ParamSet {
        ParamSet::from_set(self.terms.keys().flatten().cloned())
    }

    /// Applies a strictly increasing partial map defined on the support
    /// points; it extends to an automorphism of `(ℚ, <)`.
    pub fn act(&self, map: &BTreeMap<Point, Point>) -> Result<ModVector, PmodError> {
        let support = self.support_points();
        let mut previous: Option<&Point> = None;
        for p in support.points() {
            let image = map
                .get(p)
                .ok_or_else(|| PmodError::DomainTooSmall(format_rational(p)))?;
            if previous.is_some_and(|prev| prev >= image) {
                return Err(PmodError::NotIncreasing(format_rational(p)));
            }
            previous = Some(image);
        }
        Ok(self.apply(map))
    }

    /// Applies any injective map on the support points. Used for reducts,
    /// where the acting group is larger than the order automorphisms.
    pub fn relabel(&self, map: &BTreeMap<Point, Point>) -> Result<ModVector, PmodError> {
        let mut images = BTreeSet::new();
        for p in self.support_points().points() {
            let image = map
                .get(p)
                .ok_or_else(|| PmodError::DomainTooSmall(format_rational(p)))?;
            if !images.insert(image) {
                return Err(PmodError::NotInjective(format_rational(p)));
            }
        }
        Ok(self.apply(map))
    }

    fn apply(&self, map: &BTreeMap<Point, Point>) -> ModVector {
        let mut out = ModVector::zero(self.ring, self.arity);
        for (tuple, c) in &self.terms {
            out.add_term(tuple.iter().map(|p| map[p].clone()).collect(), c);
        }
        out
    }

    /// Representative of the orbit under order automorphisms: the support
    /// points are renamed `0, 1, …, m-1` in order. Two vectors lie in the same
    /// orbit iff their canonical forms agree.
    pub fn canonical_form(&self) -> ModVector {
        let map: BTreeMap<Point, Point> = self
            .support_points()
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), BigRational::from_integer((i as i64).into())))
            .collect();
        self.apply(&map)
    }

    pub fn same_orbit(&self, other: &ModVector) -> bool {
        self.ring == other.ring
            && self.arity == other.arity
            && self.canonical_form() == other.canonical_form()
    }
}

impl fmt::Display for ModVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (tuple, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let coords: Vec<String> = tuple.iter().map(format_rational).collect();
            write!(f, "{c}·({})", coords.join(","))?;
        }
        Ok(())
    }
}

impl Add for &ModVector {
    type Output = ModVector;

    fn add(self, rhs: &ModVector) -> ModVector {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(self.ring), rhs);
        out
    }
}

impl Sub for &ModVector {
    type Output = ModVector;

    fn sub(self, rhs: &ModVector) -> ModVector {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_i64(self.ring, -1), rhs);
        out
    }
}

impl Neg for &ModVector {
    type Output = ModVector;

    fn neg(self) -> ModVector {
        self.scale(&Scalar::from_i64(self.ring, -1))
    }
}

/// Sparse image `Ω_S(x)`: orbit label ↦ coefficient sum, zeros omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugVector {
    ring: RingSpec,
    entries: BTreeMap<PatternKey, Scalar>,
}

impl AugVector {
    pub fn zero(ring: RingSpec) -> Self {
        AugVector {
            ring,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(ring: RingSpec, entries: I) -> Self
    where
        I: IntoIterator<Item = (PatternKey, Scalar)>,
    {
        let mut out = AugVector::zero(ring);
        for (k, v) in entries {
            out.add_entry(k, &v);
        }
        out
    }

    fn add_entry(&mut self, key: PatternKey, value: &Scalar) {
        if value.is_zero() {
            return;
        }
        let sum = match self.entries.get(&key) {
            Some(existing) => existing + value,
            None => value.clone(),
        };
        if sum.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, sum);
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn entries(&self) -> &BTreeMap<PatternKey, Scalar> {
        &self.entries
    }

    pub fn get(&self, key: &PatternKey) -> Scalar {
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_scaled(&mut self, coeff: &Scalar, other: &AugVector) {
        for (k, v) in &other.entries {
            self.add_entry(k.clone(), &(coeff * v));
        }
    }

    /// `Σ_k self[k] · other[k]`.
    pub fn dot(&self, other: &AugVector) -> Scalar {
        let mut acc = Scalar::zero(self.ring);
        for (k, v) in &self.entries {
            if let Some(w) = other.entries.get(k) {
                acc = &acc + &(v * w);
            }
        }
        acc
    }
}

/// `Ω_S(x)`: for every orbit label over `params`, the sum of the coefficients
/// of the terms of `x` carrying that label. Linear in `x`.
pub fn omega<O: StructureOracle + ?Sized>(oracle: &O, x: &ModVector, params: &ParamSet) -> AugVector {
    AugVector::from_entries(
        x.ring,
        x.terms
            .iter()
            .map(|(tuple, c)| (oracle.pattern_of_tuple(tuple, params), c.clone())),
    )
}

/// The augmentation map over the empty parameter set.
pub fn omega_empty<O: StructureOracle + ?Sized>(oracle: &O, x: &ModVector) -> AugVector {
    omega(oracle, x, &ParamSet::empty())
}

/// Membership in `Aug⁰`, the kernel of [`omega_empty`].
pub fn is_aug_zero<O: StructureOracle + ?Sized>(oracle: &O, x: &ModVector) -> bool {
    omega_empty(oracle, x).is_zero()
}

/// One representative per orbit of the stabilizer of `params` on the orbit of
/// `v`, in placement order.
pub fn orbit_reps_over<O: StructureOracle + ?Sized>(
    oracle: &O,
    v: &ModVector,
    params: &ParamSet,
    exec: Execution,
) -> Vec<ModVector> {
    let support = v.support_points();
    let placements = oracle.enumerate_placements(support.points(), params);
    exec.map(&placements, |p| v.apply(&p.map()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_rational;
    use crate::structure::DenseOrder;

    const Q: RingSpec = RingSpec::Rationals;

    fn pt(s: &str) -> Point {
        parse_rational(s).unwrap()
    }

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<Point, Point> {
        pairs.iter().map(|(a, b)| (pt(a), pt(b))).collect()
    }

    fn key(s: &str) -> PatternKey {
        PatternKey::new(s)
    }

    #[test]
    fn support_points_examples() {
        let x = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[2])]);
        assert_eq!(x.support_points(), ParamSet::from_integers([0, 2]));
        assert!(ModVector::zero(Q, 1).support_points().is_empty());
        let y = ModVector::from_int_terms(Q, &[(1, &[3, 5]), (2, &[5, 3])]);
        assert_eq!(y.support_points(), ParamSet::from_integers([3, 5]));
    }

    #[test]
    fn omega_examples() {
        let s = ParamSet::from_integers([0, 2]);
        let x = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[2])]);
        let w = omega(&DenseOrder, &x, &s);
        assert_eq!(w.entries().len(), 2);
        assert_eq!(w.get(&key("p0=x0<p1")), Scalar::from_i64(Q, 1));
        assert_eq!(w.get(&key("p0<p1=x0")), Scalar::from_i64(Q, -1));

        let y = ModVector::from_terms(
            Q,
            1,
            [
                (vec![pt("1")], Scalar::from_i64(Q, 1)),
                (vec![pt("3/2")], Scalar::from_i64(Q, -1)),
            ],
        )
        .unwrap();
        assert!(omega(&DenseOrder, &y, &s).is_zero());
        assert!(omega(&DenseOrder, &ModVector::zero(Q, 1), &s).is_zero());
    }

    #[test]
    fn act_examples() {
        let x = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[1])]);
        assert_eq!(
            x.act(&map(&[("0", "5"), ("1", "7")])).unwrap(),
            ModVector::from_int_terms(Q, &[(1, &[5]), (-1, &[7])])
        );
        let y = ModVector::from_int_terms(Q, &[(1, &[0, 1])]);
        assert_eq!(y.act(&map(&[("0", "0"), ("1", "1")])).unwrap(), y);
        let z = ModVector::from_int_terms(Q, &[(1, &[0]), (1, &[1])]);
        let acted = z.act(&map(&[("0", "-1"), ("1", "1/3")])).unwrap();
        assert_eq!(acted.coefficient(&[pt("-1")]), Scalar::one(Q));
        assert_eq!(acted.coefficient(&[pt("1/3")]), Scalar::one(Q));
    }

    #[test]
    fn act_errors() {
        let x = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[1])]);
        assert!(matches!(
            x.act(&map(&[("0", "5"), ("1", "4")])),
            Err(PmodError::NotIncreasing(_))
        ));
        assert!(matches!(
            x.act(&map(&[("0", "5")])),
            Err(PmodError::DomainTooSmall(_))
        ));
        assert!(matches!(
            x.relabel(&map(&[("0", "5"), ("1", "5")])),
            Err(PmodError::NotInjective(_))
        ));
        assert!(x.relabel(&map(&[("0", "1"), ("1", "0")])).is_ok());
    }

    #[test]
    fn orbit_reps_two_chain_over_one_parameter() {
        let v = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[1])]);
        let s = ParamSet::from_integers([0]);
        let reps = orbit_reps_over(&DenseOrder, &v, &s, Execution::Sequential);
        assert_eq!(reps.len(), 5);
        let images: Vec<AugVector> = reps.iter().map(|r| omega(&DenseOrder, r, &s)).collect();
        let e = |pairs: &[(&str, i64)]| {
            AugVector::from_entries(Q, pairs.iter().map(|(k, c)| (key(k), Scalar::from_i64(Q, *c))))
        };
        let (g0, p0, g1) = ("x0<p0", "p0=x0", "p0<x0");
        assert_eq!(
            images,
            vec![
                e(&[]),
                e(&[(g0, 1), (p0, -1)]),
                e(&[(g0, 1), (g1, -1)]),
                e(&[(p0, 1), (g1, -1)]),
                e(&[]),
            ]
        );

        let single = ModVector::from_int_terms(Q, &[(1, &[0])]);
        let reps = orbit_reps_over(&DenseOrder, &single, &ParamSet::empty(), Execution::Sequential);
        assert_eq!(reps, vec![single]);

        let reps = orbit_reps_over(&DenseOrder, &v, &ParamSet::from_integers([0, 2]), Execution::Parallel);
        assert_eq!(reps.len(), 13);
    }

    #[test]
    fn augmentation_examples() {
        let x = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[2])]);
        assert!(is_aug_zero(&DenseOrder, &x));
        let y = ModVector::from_int_terms(Q, &[(1, &[0]), (1, &[1])]);
        assert_eq!(omega_empty(&DenseOrder, &y).get(&key("x0")), Scalar::from_i64(Q, 2));
        assert!(!is_aug_zero(&DenseOrder, &y));
        let gf2 = RingSpec::PrimeField(2);
        assert!(is_aug_zero(&DenseOrder, &y.with_ring(gf2).unwrap()));
    }

    #[test]
    fn canonical_form_detects_orbits() {
        let a = ModVector::from_int_terms(Q, &[(1, &[3, 5]), (-1, &[5, 3])]);
        let b = ModVector::from_int_terms(Q, &[(1, &[0, 1]), (-1, &[1, 0])]);
        let c = ModVector::from_int_terms(Q, &[(1, &[1, 0]), (-1, &[0, 1])]);
        assert!(a.same_orbit(&b));
        assert!(!a.same_orbit(&c));
    }
}

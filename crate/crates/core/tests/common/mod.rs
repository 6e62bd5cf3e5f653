#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use permod::{ModVector, ParamSet, Point, RingSpec, Scalar};
use proptest::prelude::*;

pub fn half(n: i64) -> Point {
    BigRational::new(BigInt::from(n), BigInt::from(2))
}

pub fn rings() -> impl Strategy<Value = RingSpec> {
    prop_oneof![
        Just(RingSpec::Rationals),
        Just(RingSpec::PrimeField(2)),
        Just(RingSpec::PrimeField(3)),
        Just(RingSpec::Integers),
    ]
}

pub fn fields() -> impl Strategy<Value = RingSpec> {
    prop_oneof![
        Just(RingSpec::Rationals),
        Just(RingSpec::PrimeField(2)),
        Just(RingSpec::PrimeField(3)),
    ]
}

/// Up to `max_terms` terms on half-integer coordinates in `[0, 4)`.
pub fn vector(ring: RingSpec, arity: usize, max_terms: usize) -> impl Strategy<Value = ModVector> {
    prop::collection::vec((prop::collection::vec(0i64..8, arity), -3i64..=3), 1..=max_terms).prop_map(move |terms| {
        ModVector::from_terms(
            ring,
            arity,
            terms
                .into_iter()
                .map(|(t, c)| (t.into_iter().map(half).collect(), Scalar::from_i64(ring, c))),
        )
        .unwrap()
    })
}

pub fn param_set() -> impl Strategy<Value = ParamSet> {
    prop::collection::btree_set(-4i64..12, 0..=3).prop_map(|s| ParamSet::from_set(s.into_iter().map(half)))
}

/// Strictly increasing affine map `p ↦ a·p + b` on the given points.
pub fn affine(points: &[Point], a: (i64, i64), b: i64) -> BTreeMap<Point, Point> {
    let a = BigRational::new(a.0.into(), a.1.into());
    let b = half(b);
    points.iter().map(|p| (p.clone(), &a * p + &b)).collect()
}

pub fn slopes() -> impl Strategy<Value = (i64, i64)> {
    (1i64..4, 1i64..4)
}

/// Strictly increasing piecewise-linear map fixing every point of `params`,
/// bent once inside every bounded gap at the fraction `bend`.
pub fn fixing(params: &ParamSet, bend: (i64, i64), stretch: (i64, i64)) -> impl Fn(&Point) -> Point {
    let ps: Vec<Point> = params.points().to_vec();
    let (p, q) = (
        BigRational::new(bend.0.into(), 10.into()),
        BigRational::new(bend.1.into(), 10.into()),
    );
    let lambda = BigRational::new(stretch.0.into(), stretch.1.into());
    let one = BigRational::from_integer(1.into());
    move |x: &Point| -> Point {
        if ps.is_empty() {
            return &lambda * x + &p;
        }
        if x <= &ps[0] {
            return &ps[0] - &lambda * (&ps[0] - x);
        }
        if x >= ps.last().unwrap() {
            let top = ps.last().unwrap();
            return top + &lambda * (x - top);
        }
        let i = ps.iter().rposition(|s| s <= x).unwrap();
        let (a, b) = (&ps[i], &ps[i + 1]);
        let t = (x - a) / (b - a);
        let f = if t <= p { &t * &q / &p } else { &q + (&t - &p) * (&one - &q) / (&one - &p) };
        a + (b - a) * f
    }
}

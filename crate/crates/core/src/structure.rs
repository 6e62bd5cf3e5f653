//! The structure oracle: orbit labels for tuples over a finite parameter set,
//! and enumeration of orbit representatives for configurations of points.
//!
//! The only backend is the dense linear order `(ℚ, <)`. Two tuples lie in the
//! same orbit of the pointwise stabilizer of `S` exactly when they realize the
//! same order relations among themselves and with the points of `S`, so the
//! orbit label is the merged weak order of coordinates and parameters.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::format_rational;

pub type Point = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("duplicate point {0} in parameter set")]
    DuplicatePoint(String),
}

/// A finite set of points, kept strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamSet(Vec<Point>);

impl ParamSet {
    pub fn empty() -> Self {
        ParamSet(Vec::new())
    }

    /// Sorts `points`; a repeated point is an error.
    pub fn new(mut points: Vec<Point>) -> Result<Self, StructureError> {
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(StructureError::DuplicatePoint(format_rational(&w[0])));
        }
        Ok(ParamSet(points))
    }

    pub fn from_set<I: IntoIterator<Item = Point>>(points: I) -> Self {
        let mut v: Vec<Point> = points.into_iter().collect();
        v.sort();
        v.dedup();
        ParamSet(v)
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(points: I) -> Self {
        ParamSet::from_set(points.into_iter().map(|x| BigRational::from_integer(x.into())))
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.0.binary_search(p).is_ok()
    }

    pub fn is_superset_of(&self, other: &ParamSet) -> bool {
        other.0.iter().all(|p| self.contains(p))
    }

    pub fn union(&self, other: &ParamSet) -> ParamSet {
        ParamSet::from_set(self.0.iter().chain(&other.0).cloned())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

/// Canonical label of an orbit of `G_(S)` on tuples: the merged weak order of
/// coordinates `x0, x1, …` and parameters `p0, p1, …`, e.g. `p0<x1<x0<p1` or
/// `p0=x0<p1`. Key equality is string equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternKey(String);

impl PatternKey {
    pub fn new(s: impl Into<String>) -> Self {
        PatternKey(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PatternKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Position of a point relative to a parameter set `p_0 < … < p_{s-1}`:
/// equal to a parameter, or inside one of the `s + 1` open gaps (gap `i` lies
/// between `p_{i-1}` and `p_i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Gap(usize),
    Param(usize),
}

impl Slot {
    /// Slots in increasing order are numbered `Gap(0)=0, Param(0)=1, Gap(1)=2, …`.
    pub fn code(self) -> usize {
        match self {
            Slot::Gap(i) => 2 * i,
            Slot::Param(i) => 2 * i + 1,
        }
    }

    pub fn from_code(code: usize) -> Slot {
        if code.is_multiple_of(2) {
            Slot::Gap(code / 2)
        } else {
            Slot::Param(code / 2)
        }
    }
}

/// An order-preserving placement of a finite chain relative to a parameter
/// set, with concrete rational images realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub source: Vec<Point>,
    pub slots: Vec<Slot>,
    pub images: Vec<Point>,
}

impl Placement {
    pub fn map(&self) -> BTreeMap<Point, Point> {
        self.source
            .iter()
            .cloned()
            .zip(self.images.iter().cloned())
            .collect()
    }
}

/// Which group acts: the automorphisms of `(ℚ, <)` or of its pure-set reduct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReductSpec {
    #[default]
    None,
    PureSet,
}

/// What a homogeneous-structure backend must provide. Everything exposed is
/// finitary: orbit labels, placements, orbit representatives.
pub trait StructureOracle: Send + Sync {
    /// Orbit label of `tuple` under the pointwise stabilizer of `params`.
    fn pattern_of_tuple(&self, tuple: &[Point], params: &ParamSet) -> PatternKey;

    /// One placement per orbit of the stabilizer of `params` on images of the
    /// chain `source` (strictly increasing) under the full group.
    fn enumerate_placements(&self, source: &[Point], params: &ParamSet) -> Vec<Placement>;

    /// One `n`-tuple per orbit of the full group on `n`-tuples.
    fn canonical_orbit_reps(&self, n: usize) -> Vec<Vec<Point>>;

    /// Re-orderings of `points` accounting for a reduct's larger group.
    fn reduct_expansions(&self, points: &[Point], reduct: ReductSpec) -> Vec<BTreeMap<Point, Point>>;
}

/// The dense linear order without endpoints, `(ℚ, <)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DenseOrder;

fn int_point(v: i64) -> Point {
    BigRational::from_integer(BigInt::from(v))
}

impl DenseOrder {
    /// Slot of every point of `points` relative to `params`.
    pub fn slots_of(&self, points: &[Point], params: &ParamSet) -> Vec<Slot> {
        points
            .iter()
            .map(|p| match params.points().binary_search(p) {
                Ok(i) => Slot::Param(i),
                Err(i) => Slot::Gap(i),
            })
            .collect()
    }

    fn realize(&self, source: &[Point], slots: &[Slot], params: &ParamSet) -> Vec<Point> {
        let ps = params.points();
        if ps.is_empty() {
            return source.to_vec();
        }
        let s = ps.len();
        let mut gap_sizes = vec![0usize; s + 1];
        for slot in slots {
            if let Slot::Gap(g) = slot {
                gap_sizes[*g] += 1;
            }
        }
        let mut seen = vec![0usize; s + 1];
        slots
            .iter()
            .map(|slot| match *slot {
                Slot::Param(i) => ps[i].clone(),
                Slot::Gap(g) => {
                    let k = gap_sizes[g] as i64;
                    let j = seen[g] as i64;
                    seen[g] += 1;
                    if g == 0 {
                        &ps[0] - int_point(k - j)
                    } else if g == s {
                        &ps[s - 1] + int_point(j + 1)
                    } else {
                        let (lo, hi) = (&ps[g - 1], &ps[g]);
                        lo + (hi - lo) * BigRational::new((j + 1).into(), (k + 1).into())
                    }
                }
            })
            .collect()
    }
}

fn push_slot_sequences(
    prefix: &mut Vec<usize>,
    remaining: usize,
    max_code: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(prefix.clone());
        return;
    }
    let start = match prefix.last() {
        // a parameter slot holds at most one point
        Some(&last) if last % 2 == 1 => last + 1,
        Some(&last) => last,
        None => 0,
    };
    for code in start..=max_code {
        prefix.push(code);
        push_slot_sequences(prefix, remaining - 1, max_code, out);
        prefix.pop();
    }
}

impl StructureOracle for DenseOrder {
    fn pattern_of_tuple(&self, tuple: &[Point], params: &ParamSet) -> PatternKey {
        // (value, 0 = parameter / 1 = coordinate, index)
        let mut labelled: Vec<(&Point, u8, usize)> = params
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p, 0u8, i))
            .chain(tuple.iter().enumerate().map(|(j, x)| (x, 1u8, j)))
            .collect();
        labelled.sort();
        let key = labelled
            .iter()
            .chunk_by(|(value, _, _)| *value)
            .into_iter()
            .map(|(_, class)| {
                class
                    .map(|(_, kind, idx)| match kind {
                        0 => format!("p{idx}"),
                        _ => format!("x{idx}"),
                    })
                    .join("=")
            })
            .join("<");
        PatternKey(key)
    }

    fn enumerate_placements(&self, source: &[Point], params: &ParamSet) -> Vec<Placement> {
        debug_assert!(source.windows(2).all(|w| w[0] < w[1]));
        let mut sequences = Vec::new();
        push_slot_sequences(&mut Vec::new(), source.len(), 2 * params.len(), &mut sequences);
        sequences
            .into_iter()
            .map(|codes| {
                let slots: Vec<Slot> = codes.into_iter().map(Slot::from_code).collect();
                let images = self.realize(source, &slots, params);
                Placement {
                    source: source.to_vec(),
                    slots,
                    images,
                }
            })
            .collect()
    }

    fn canonical_orbit_reps(&self, n: usize) -> Vec<Vec<Point>> {
        // weak orders on n letters, as rank vectors using exactly {1, …, k}
        (0..n)
            .map(|_| 1..=n as i64)
            .multi_cartesian_product()
            .filter(|t| {
                let k = *t.iter().max().unwrap_or(&0);
                (1..=k).all(|v| t.contains(&v))
            })
            .map(|t| t.into_iter().map(int_point).collect())
            .collect()
    }

    fn reduct_expansions(&self, points: &[Point], reduct: ReductSpec) -> Vec<BTreeMap<Point, Point>> {
        match reduct {
            ReductSpec::None => vec![points.iter().map(|p| (p.clone(), p.clone())).collect()],
            ReductSpec::PureSet => points
                .iter()
                .permutations(points.len())
                .map(|perm| {
                    points
                        .iter()
                        .cloned()
                        .zip(perm.into_iter().cloned())
                        .collect()
                })
                .collect(),
        }
    }
}

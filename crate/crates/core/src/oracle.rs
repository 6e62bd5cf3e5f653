//! Brute-force cross-validation independent of the orbit-sum reduction.
//!
//! The submodule is approximated from below by acting on the generators only
//! with monotone injections into a finite grid. Anything found this way is an
//! explicit witness; failure to find one proves nothing, since no bound on
//! witness supports is known.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::pmod::ModVector;
use crate::ring::{Echelon, RingSpec, Scalar};
use crate::structure::{ParamSet, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("grid of {grid} points cannot hold a support of {support} points")]
    GridTooSmall { grid: usize, support: usize },
    #[error("grid points must be strictly increasing")]
    NotIncreasing,
}

/// A finite strictly increasing set of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(Vec<Point>);

impl Grid {
    pub fn new(points: Vec<Point>) -> Result<Self, OracleError> {
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OracleError::NotIncreasing);
        }
        Ok(Grid(points))
    }

    /// `{1, …, n}`.
    pub fn integers(n: usize) -> Self {
        Grid((1..=n as i64).map(|x| BigRational::from_integer(x.into())).collect())
    }

    /// A grid of `size` points containing `support`. The extra points are
    /// dealt round-robin into the gaps of `support` (interior gaps first, then
    /// below, then above), so a larger grid always embeds a smaller one over
    /// the same support. Equivalent, up to an order isomorphism fixing the
    /// support, to normalizing the support into `{1, …, size}`.
    pub fn around(support: &ParamSet, size: usize) -> Self {
        let pts = support.points();
        let k = pts.len();
        if k == 0 {
            return Grid::integers(size);
        }
        let mut order: Vec<usize> = (1..k).collect();
        order.push(0);
        order.push(k);
        let mut counts = vec![0i64; k + 1];
        for t in 0..size.saturating_sub(k) {
            counts[order[t % order.len()]] += 1;
        }
        let one = |v: i64| BigRational::from_integer(BigInt::from(v));
        let mut out = Vec::with_capacity(size.max(k));
        for j in 0..counts[0] {
            out.push(&pts[0] - one(counts[0] - j));
        }
        for g in 0..k {
            out.push(pts[g].clone());
            let c = counts[g + 1];
            for j in 0..c {
                if g + 1 == k {
                    out.push(&pts[g] + one(j + 1));
                } else {
                    let (lo, hi) = (&pts[g], &pts[g + 1]);
                    out.push(lo + (hi - lo) * BigRational::new((j + 1).into(), (c + 1).into()));
                }
            }
        }
        Grid(out)
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
}

/// `coeff · image`, where `image` is the generator with index `generator`
/// moved by an order-preserving map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTerm {
    pub coeff: Scalar,
    pub generator: usize,
    pub image: ModVector,
}

/// Sum of the witness terms.
pub fn evaluate_witness(terms: &[WitnessTerm], ring: RingSpec, arity: usize) -> ModVector {
    let mut acc = ModVector::zero(ring, arity);
    for t in terms {
        acc.add_scaled(&t.coeff, &t.image);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Member { grid_size: usize, witness: Vec<WitnessTerm> },
    Inconclusive,
}

impl OracleVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, OracleVerdict::Member { .. })
    }
}

/// All images of the generators under monotone injections of their support
/// chains into `grid`. Generators whose support does not fit are skipped.
fn grid_images(generators: &[ModVector], grid: &Grid, exec: Execution) -> Vec<(usize, ModVector)> {
    let mut jobs = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let support = g.support_points();
        if g.is_zero() || support.len() > grid.len() {
            continue;
        }
        for chosen in grid.points().iter().combinations(support.len()) {
            jobs.push((i, support.points().iter().cloned().zip(chosen.into_iter().cloned()).collect::<BTreeMap<_, _>>()));
        }
    }
    exec.map(&jobs, |(i, map)| {
        (*i, generators[*i].act(map).expect("combinations are increasing"))
    })
}

struct TupleIndex {
    index: BTreeMap<Vec<Point>, usize>,
}

impl TupleIndex {
    fn build<'a>(vectors: impl Iterator<Item = &'a ModVector>) -> Self {
        let mut tuples: Vec<Vec<Point>> = vectors.flat_map(|v| v.terms().map(|(t, _)| t.clone())).collect();
        tuples.sort();
        tuples.dedup();
        TupleIndex {
            index: tuples.into_iter().enumerate().map(|(i, t)| (t, i)).collect(),
        }
    }

    fn dense(&self, v: &ModVector) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(v.ring()); self.index.len()];
        for (t, c) in v.terms() {
            out[self.index[t]] = c.clone();
        }
        out
    }

    fn sparse(&self, ring: RingSpec, arity: usize, dense: &[Scalar]) -> ModVector {
        ModVector::from_terms(
            ring,
            arity,
            self.index
                .iter()
                .filter(|(_, &i)| !dense[i].is_zero())
                .map(|(t, &i)| (t.clone(), dense[i].clone())),
        )
        .expect("consistent arity")
    }
}

/// A basis of the span (lattice, over ℤ) of all grid-placed generator images:
/// reduced row-echelon over a field, Hermite rows over ℤ.
pub fn grid_span(generators: &[ModVector], grid: &Grid, exec: Execution) -> Result<Vec<ModVector>, OracleError> {
    let Some(first) = generators.first() else {
        return Ok(Vec::new());
    };
    if let Some(g) = generators.iter().find(|g| g.support_points().len() > grid.len()) {
        return Err(OracleError::GridTooSmall {
            grid: grid.len(),
            support: g.support_points().len(),
        });
    }
    let (ring, arity) = (first.ring(), first.arity());
    let images = grid_images(generators, grid, exec);
    let index = TupleIndex::build(images.iter().map(|(_, v)| v));
    let mut e = Echelon::new(ring, index.index.len());
    for (k, (_, v)) in images.iter().enumerate() {
        e.insert(k, index.dense(v));
    }
    e.reduce();
    Ok(e.rows().iter().map(|r| index.sparse(ring, arity, &r.entries)).collect())
}

fn grid_witness(
    target: &ModVector,
    generators: &[ModVector],
    grid: &Grid,
    exec: Execution,
) -> Option<Vec<WitnessTerm>> {
    let images = grid_images(generators, grid, exec);
    let index = TupleIndex::build(images.iter().map(|(_, v)| v).chain(std::iter::once(target)));
    let mut e = Echelon::new(target.ring(), index.index.len());
    for (k, (_, v)) in images.iter().enumerate() {
        e.insert(k, index.dense(v));
    }
    let combo = e.solve(&index.dense(target))?;
    Some(
        combo
            .into_iter()
            .map(|(k, coeff)| WitnessTerm {
                coeff,
                generator: images[k].0,
                image: images[k].1.clone(),
            })
            .collect(),
    )
}

/// Grid sizes tried for a target with `k` support points: `k+2, k+4, …`,
/// always ending at `max_grid`.
pub fn grid_schedule(k: usize, max_grid: usize) -> Vec<usize> {
    if max_grid < k {
        return Vec::new();
    }
    let mut sizes: Vec<usize> = (k + 2..=max_grid).step_by(2).collect();
    if sizes.last() != Some(&max_grid) {
        sizes.push(max_grid);
    }
    sizes
}

/// Semi-decision for membership: an explicit witness from the smallest grid
/// in the schedule that has one, else inconclusive.
pub fn oracle_membership(
    target: &ModVector,
    generators: &[ModVector],
    max_grid: usize,
    exec: Execution,
) -> OracleVerdict {
    let support = target.support_points();
    let sizes = grid_schedule(support.len(), max_grid);
    let Some(&largest) = sizes.last() else {
        return OracleVerdict::Inconclusive;
    };
    // grids are nested up to order isomorphism, so the largest decides
    // whether any succeeds
    let Some(last_witness) = grid_witness(target, generators, &Grid::around(&support, largest), exec) else {
        return OracleVerdict::Inconclusive;
    };
    for &size in &sizes[..sizes.len() - 1] {
        if let Some(witness) = grid_witness(target, generators, &Grid::around(&support, size), exec) {
            return OracleVerdict::Member { grid_size: size, witness };
        }
    }
    OracleVerdict::Member {
        grid_size: largest,
        witness: last_witness,
    }
}

/// Shape of randomly generated instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceProfile {
    pub arity: usize,
    pub max_support: usize,
    pub coefficients: Vec<i64>,
    #[serde(with = "ring_string")]
    pub ring: RingSpec,
    pub max_generators: usize,
    pub max_terms: usize,
}

mod ring_string {
    use super::RingSpec;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ring: &RingSpec, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ring.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RingSpec, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl InstanceProfile {
    pub fn new(arity: usize, max_support: usize, ring: RingSpec) -> Self {
        InstanceProfile {
            arity,
            max_support,
            coefficients: vec![-2, -1, 1, 2, 3],
            ring,
            max_generators: 2,
            max_terms: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub seed: u64,
    pub profile: InstanceProfile,
    pub target: ModVector,
    pub generators: Vec<ModVector>,
    /// `true` when the target was built as a combination of generator images.
    pub planted: bool,
}

fn half(v: usize) -> Point {
    BigRational::new(BigInt::from(v), BigInt::from(2))
}

fn draw_coeff(rng: &mut ChaCha8Rng, profile: &InstanceProfile) -> Scalar {
    let nonzero: Vec<Scalar> = profile
        .coefficients
        .iter()
        .map(|&c| Scalar::from_i64(profile.ring, c))
        .filter(|c| !c.is_zero())
        .collect();
    if nonzero.is_empty() {
        return Scalar::one(profile.ring);
    }
    nonzero[rng.gen_range(0..nonzero.len())].clone()
}

fn draw_points(rng: &mut ChaCha8Rng, count: usize, range: usize) -> Vec<Point> {
    let mut idx: Vec<usize> = sample(rng, range, count).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(half).collect()
}

fn draw_generator(rng: &mut ChaCha8Rng, profile: &InstanceProfile) -> ModVector {
    loop {
        let m = rng.gen_range(1..=profile.max_support);
        let support = draw_points(rng, m, 4 * profile.max_support);
        let terms = rng.gen_range(1..=profile.max_terms.max(1));
        let v = ModVector::from_terms(
            profile.ring,
            profile.arity,
            (0..terms)
                .map(|_| {
                    let tuple = (0..profile.arity)
                        .map(|_| support[rng.gen_range(0..m)].clone())
                        .collect();
                    (tuple, draw_coeff(rng, profile))
                })
                .collect::<Vec<_>>(),
        )
        .expect("profile arity");
        if !v.is_zero() {
            return v;
        }
    }
}

/// A deterministic random instance. Half the time the target is planted as a
/// combination of generator images placed inside a pool of `max_support`
/// points; otherwise one coefficient of such a combination is perturbed.
pub fn random_instance(seed: u64, profile: &InstanceProfile) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=profile.max_generators.max(1));
    let generators: Vec<ModVector> = (0..count).map(|_| draw_generator(&mut rng, profile)).collect();
    let pool = draw_points(&mut rng, profile.max_support, 4 * profile.max_support);

    let mut target = ModVector::zero(profile.ring, profile.arity);
    for _ in 0..rng.gen_range(1..=2) {
        let g = &generators[rng.gen_range(0..generators.len())];
        let support = g.support_points();
        let mut chosen: Vec<usize> = sample(&mut rng, pool.len(), support.len()).into_vec();
        chosen.sort_unstable();
        let map: BTreeMap<Point, Point> = support
            .points()
            .iter()
            .cloned()
            .zip(chosen.into_iter().map(|i| pool[i].clone()))
            .collect();
        let coeff = draw_coeff(&mut rng, profile);
        target.add_scaled(&coeff, &g.act(&map).expect("monotone"));
    }

    let planted = rng.gen_bool(0.5);
    if !planted {
        let bump = draw_coeff(&mut rng, profile);
        let tuple: Vec<Point> = match target.terms().nth(rng.gen_range(0..target.len().max(1))) {
            Some((t, _)) => t.clone(),
            None => (0..profile.arity)
                .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                .collect(),
        };
        let single = ModVector::from_terms(profile.ring, profile.arity, [(tuple, bump)]).expect("arity");
        target = &target + &single;
    }

    Instance {
        seed,
        profile: profile.clone(),
        target,
        generators,
        planted,
    }
}

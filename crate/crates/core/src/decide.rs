//! Submodule membership with certificates, and the procedures built on it.
//!
//! Membership of `x` in the submodule generated by `v_1, …, v_r` is reduced
//! to a finite span problem: with `S` the support of `x`, enumerate one
//! representative per orbit of the stabilizer of `S` on every generator orbit,
//! and compare orbit sums `Ω_S`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exec::Execution;
use crate::oracle::{evaluate_witness, oracle_membership, OracleVerdict, WitnessTerm};
use crate::pmod::{omega, orbit_reps_over, AugVector, ModVector, PmodError};
use crate::ring::{dual_character, dual_functional, frac, span_intersect_coords, Echelon, RingError, RingSpec, Scalar};
use crate::structure::{DenseOrder, ParamSet, PatternKey, Point, ReductSpec, StructureOracle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("ring mismatch: expected {expected}, found {found} (vector {index})")]
    RingMismatch {
        expected: RingSpec,
        found: RingSpec,
        index: usize,
    },
    #[error("arity mismatch: expected {expected}, found {found} (vector {index})")]
    ArityMismatch {
        expected: usize,
        found: usize,
        index: usize,
    },
    #[error("parameter set does not contain the target support")]
    InvalidOverride,
    #[error("generator {0} does not lie in the augmentation kernel")]
    NotAugZero(usize),
    #[error("{0} is not a field")]
    NotAField(RingSpec),
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("verification failed: {what}")]
    VerificationFailed { what: String, decision: Box<Decision> },
    #[error(transparent)]
    Pmod(#[from] PmodError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MembershipOptions {
    /// Parameter set to use instead of the target support. Must contain it.
    pub param_set: Option<ParamSet>,
    /// Largest grid tried when searching for an explicit witness of a YES
    /// answer; 0 disables the search.
    pub witness_budget: usize,
}

/// `coeff · Ω_S(representative)`, where `representative` lies in the orbit of
/// generator number `generator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanTerm {
    pub coeff: Scalar,
    pub generator: usize,
    pub representative: ModVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Orbit sums of the terms add up to the orbit sum of the target. The
    /// optional witness writes the target itself as a combination of moved
    /// generators.
    Span {
        terms: Vec<SpanTerm>,
        witness: Option<Vec<WitnessTerm>>,
    },
    /// Over a field: `φ` kills the orbit sum of every representative but not
    /// that of the target.
    Functional(AugVector),
    /// Over ℤ: `χ` (values mod 1) vanishes on the orbit sum of every
    /// representative but not on that of the target.
    Character(BTreeMap<PatternKey, BigRational>),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Span { witness: Some(_), .. } => "explicit-witness",
            Certificate::Span { witness: None, .. } => "span-witness",
            Certificate::Functional(_) => "dual-functional",
            Certificate::Character(_) => "character",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub member: bool,
    pub certificate: Certificate,
    pub param_set: ParamSet,
    pub rep_count: usize,
    pub ring: RingSpec,
}

/// Result of testing every orbit of basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratesAll {
    pub generates: bool,
    pub checks: Vec<(ModVector, Decision)>,
}

/// A single generator of the submodule spanned by several, with the decisions
/// that confirm it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReport {
    pub generator: ModVector,
    /// The input generators moved into disjoint blocks; `generator` is their sum.
    pub placed: Vec<ModVector>,
    /// `v_i ∈ ⟨generator⟩` for each input generator.
    pub forward: Vec<Decision>,
    /// `generator ∈ ⟨v_1, …, v_k⟩`.
    pub backward: Decision,
}

/// Ordered coordinate set of pattern keys.
#[derive(Default)]
struct KeyIndex {
    keys: Vec<PatternKey>,
    index: HashMap<PatternKey, usize>,
}

impl KeyIndex {
    fn push(&mut self, key: &PatternKey) {
        if !self.index.contains_key(key) {
            self.index.insert(key.clone(), self.keys.len());
            self.keys.push(key.clone());
        }
    }

    fn dense(&self, a: &AugVector) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(a.ring()); self.keys.len()];
        for (k, v) in a.entries() {
            out[self.index[k]] = v.clone();
        }
        out
    }
}

fn check_compatible<'a>(
    ring: RingSpec,
    arity: usize,
    vectors: impl IntoIterator<Item = &'a ModVector>,
) -> Result<(), DecideError> {
    for (index, v) in vectors.into_iter().enumerate() {
        if v.ring() != ring {
            return Err(DecideError::RingMismatch {
                expected: ring,
                found: v.ring(),
                index,
            });
        }
        if v.arity() != arity {
            return Err(DecideError::ArityMismatch {
                expected: arity,
                found: v.arity(),
                index,
            });
        }
    }
    Ok(())
}

/// Re-orderings of every generator's support allowed by `reduct`, in
/// generator order. Certificates of [`Decider::reduct_membership`] index into
/// this list.
pub fn expand_generators<O: StructureOracle + ?Sized>(
    oracle: &O,
    generators: &[ModVector],
    reduct: ReductSpec,
) -> Result<Vec<ModVector>, DecideError> {
    let mut out = Vec::new();
    for g in generators {
        let support = g.support_points();
        for map in oracle.reduct_expansions(support.points(), reduct) {
            out.push(g.relabel(&map)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Decider<O = DenseOrder> {
    oracle: O,
    exec: Execution,
}

impl Default for Decider<DenseOrder> {
    fn default() -> Self {
        Decider::with_execution(Execution::default())
    }
}

impl Decider<DenseOrder> {
    pub fn with_execution(exec: Execution) -> Self {
        Decider { oracle: DenseOrder, exec }
    }
}

impl<O: StructureOracle> Decider<O> {
    pub fn new(oracle: O, exec: Execution) -> Self {
        Decider { oracle, exec }
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// Representatives over `params` of every generator orbit, tagged with
    /// the generator index. Zero generators and generators in the same orbit
    /// as an earlier one contribute nothing.
    fn representatives(&self, generators: &[ModVector], params: &ParamSet, dedup: bool) -> Vec<(usize, ModVector)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() || (dedup && !seen.insert(g.canonical_form())) {
                continue;
            }
            out.extend(orbit_reps_over(&self.oracle, g, params, self.exec).into_iter().map(|r| (i, r)));
        }
        out
    }

    fn omegas(&self, reps: &[(usize, ModVector)], params: &ParamSet) -> Vec<AugVector> {
        self.exec.map(reps, |(_, r)| omega(&self.oracle, r, params))
    }

    /// Decides whether `target` lies in the submodule generated by
    /// `generators`, with a certificate either way.
    pub fn membership(
        &self,
        target: &ModVector,
        generators: &[ModVector],
        options: &MembershipOptions,
    ) -> Result<Decision, DecideError> {
        let ring = target.ring();
        check_compatible(ring, target.arity(), generators)?;
        let support = target.support_points();
        let params = match &options.param_set {
            Some(s) if !s.is_superset_of(&support) => return Err(DecideError::InvalidOverride),
            Some(s) => s.clone(),
            None => support,
        };

        let reps = self.representatives(generators, &params, true);
        let rep_omegas = self.omegas(&reps, &params);
        let target_omega = omega(&self.oracle, target, &params);

        let mut index = KeyIndex::default();
        for (tuple, _) in target.terms() {
            let key = self.oracle.pattern_of_tuple(tuple, &params);
            if !target_omega.get(&key).is_zero() {
                index.push(&key);
            }
        }
        for ((_, rep), om) in reps.iter().zip(&rep_omegas) {
            for (tuple, _) in rep.terms() {
                let key = self.oracle.pattern_of_tuple(tuple, &params);
                if !om.get(&key).is_zero() {
                    index.push(&key);
                }
            }
        }
        let rows: Vec<Vec<Scalar>> = rep_omegas.iter().map(|om| index.dense(om)).collect();
        let t = index.dense(&target_omega);

        let mut echelon = Echelon::new(ring, index.keys.len());
        for (k, row) in rows.iter().enumerate() {
            echelon.insert(k, row.clone());
        }

        let (member, certificate) = match echelon.solve(&t) {
            Some(combination) => {
                let terms = combination
                    .into_iter()
                    .map(|(k, coeff)| SpanTerm {
                        coeff,
                        generator: reps[k].0,
                        representative: reps[k].1.clone(),
                    })
                    .collect();
                let witness = if options.witness_budget > 0 {
                    match oracle_membership(target, generators, options.witness_budget, self.exec) {
                        OracleVerdict::Member { witness, .. } => Some(witness),
                        OracleVerdict::Inconclusive => None,
                    }
                } else {
                    None
                };
                (true, Certificate::Span { terms, witness })
            }
            None if ring.is_field() => {
                let phi = dual_functional(&t, &rows, ring)?;
                let entries = index.keys.iter().cloned().zip(phi).filter(|(_, v)| !v.is_zero());
                (false, Certificate::Functional(AugVector::from_entries(ring, entries)))
            }
            None => {
                let chi = dual_character(&t, &rows)?;
                let entries = index
                    .keys
                    .iter()
                    .cloned()
                    .zip(chi.coefficients().iter().cloned())
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                (false, Certificate::Character(entries))
            }
        };
        Ok(Decision {
            member,
            certificate,
            param_set: params,
            rep_count: reps.len(),
            ring,
        })
    }

    /// Re-checks a decision from scratch. Never trusts anything computed by
    /// [`Decider::membership`] beyond the certificate itself.
    pub fn verify_certificate(&self, decision: &Decision, target: &ModVector, generators: &[ModVector]) -> bool {
        let ring = target.ring();
        if decision.ring != ring || check_compatible(ring, target.arity(), generators).is_err() {
            return false;
        }
        let params = &decision.param_set;
        if !params.is_superset_of(&target.support_points()) {
            return false;
        }
        let target_omega = omega(&self.oracle, target, params);
        match &decision.certificate {
            Certificate::Span { terms, witness } => {
                if !decision.member {
                    return false;
                }
                let mut sum = AugVector::zero(ring);
                for term in terms {
                    let Some(g) = generators.get(term.generator) else {
                        return false;
                    };
                    if term.coeff.ring() != ring || term.representative.ring() != ring || !term.representative.same_orbit(g) {
                        return false;
                    }
                    sum.add_scaled(&term.coeff, &omega(&self.oracle, &term.representative, params));
                }
                if sum != target_omega {
                    return false;
                }
                match witness {
                    None => true,
                    Some(w) => {
                        w.iter().all(|t| {
                            t.coeff.ring() == ring
                                && t.image.ring() == ring
                                && generators.get(t.generator).is_some_and(|g| t.image.same_orbit(g))
                        }) && evaluate_witness(w, ring, target.arity()) == *target
                    }
                }
            }
            Certificate::Functional(phi) => {
                if decision.member || !ring.is_field() || phi.ring() != ring {
                    return false;
                }
                let reps = self.representatives(generators, params, false);
                self.omegas(&reps, params).iter().all(|om| phi.dot(om).is_zero()) && !phi.dot(&target_omega).is_zero()
            }
            Certificate::Character(chi) => {
                if decision.member || ring != RingSpec::Integers {
                    return false;
                }
                let eval = |a: &AugVector| -> BigRational {
                    let sum = chi
                        .iter()
                        .map(|(k, c)| c * a.get(k).to_rational())
                        .fold(BigRational::zero(), |acc, x| acc + x);
                    frac(&sum)
                };
                let reps = self.representatives(generators, params, false);
                self.omegas(&reps, params).iter().all(|om| eval(om).is_zero()) && !eval(&target_omega).is_zero()
            }
        }
    }

    /// Whether the generators produce every basis vector: one membership test
    /// per orbit of `n`-tuples.
    pub fn generates_all(&self, ring: RingSpec, arity: usize, generators: &[ModVector]) -> Result<GeneratesAll, DecideError> {
        check_compatible(ring, arity, generators)?;
        let mut checks = Vec::new();
        for tuple in self.oracle.canonical_orbit_reps(arity) {
            let w = ModVector::basis(ring, tuple);
            let d = self.membership(&w, generators, &MembershipOptions::default())?;
            checks.push((w, d));
        }
        Ok(GeneratesAll {
            generates: checks.iter().all(|(_, d)| d.member),
            checks,
        })
    }

    /// A nonzero element of the submodule supported on at most `k` tuples, if
    /// one exists. Candidates are searched over the grid `{1, …, k·n}`, whose
    /// tuples cover every orbit of `k`-sets of tuples.
    pub fn min_support(&self, generators: &[ModVector], k: usize) -> Result<Option<ModVector>, DecideError> {
        let Some(first) = generators.first() else {
            return Ok(None);
        };
        let (ring, n) = (first.ring(), first.arity());
        check_compatible(ring, n, generators)?;
        if k == 0 {
            return Ok(None);
        }
        let grid = ParamSet::from_integers(1..=(k * n) as i64);
        let reps = self.representatives(generators, &grid, true);
        let rep_omegas = self.omegas(&reps, &grid);

        let tuples: Vec<Vec<Point>> = if n == 0 {
            vec![Vec::new()]
        } else {
            (0..n).map(|_| grid.points().iter().cloned()).multi_cartesian_product().collect()
        };
        let mut index = KeyIndex::default();
        for t in &tuples {
            index.push(&self.oracle.pattern_of_tuple(t, &grid));
        }
        let singletons = tuples.len();
        for om in &rep_omegas {
            for key in om.entries().keys() {
                index.push(key);
            }
        }

        // singleton coordinates last: rows pivoting there span the part of
        // the module supported on grid tuples
        let dim = index.keys.len();
        let mut echelon = Echelon::new(ring, dim);
        for (r, om) in rep_omegas.iter().enumerate() {
            let row = index.dense(om);
            let reordered: Vec<Scalar> = (singletons..dim).chain(0..singletons).map(|j| row[j].clone()).collect();
            echelon.insert(r, reordered);
        }
        let boundary = dim - singletons;
        let basis: Vec<Vec<Scalar>> = echelon
            .rows()
            .iter()
            .filter(|r| r.pivot >= boundary)
            .map(|r| r.entries[boundary..].to_vec())
            .collect();
        if basis.is_empty() {
            return Ok(None);
        }

        let mut subsets: Vec<Vec<usize>> = (1..=k.min(singletons))
            .flat_map(|size| (0..singletons).combinations(size))
            .collect();
        subsets.sort_by_cached_key(|s| s.iter().rev().copied().collect::<Vec<_>>());
        for subset in subsets {
            let coords: BTreeSet<usize> = subset.into_iter().collect();
            if let Some(u) = span_intersect_coords(&basis, &coords, ring)? {
                let terms = tuples
                    .iter()
                    .zip(u)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(t, c)| (t.clone(), c));
                return Ok(Some(ModVector::from_terms(ring, n, terms)?));
            }
        }
        Ok(None)
    }

    /// Membership for the group of a reduct: the generators are replaced by
    /// all their re-orderings (see [`expand_generators`]).
    pub fn reduct_membership(
        &self,
        target: &ModVector,
        generators: &[ModVector],
        reduct: ReductSpec,
        options: &MembershipOptions,
    ) -> Result<Decision, DecideError> {
        let expanded = expand_generators(&self.oracle, generators, reduct)?;
        self.membership(target, &expanded, options)
    }

    /// A single generator for the submodule generated by augmentation-zero
    /// vectors over a field: generator `i` (from 1) is moved into the block
    /// `(2i, 2i+1)` and the copies are summed. The result is checked by
    /// membership in both directions; a failed check is an error.
    pub fn cyclic_generator(&self, generators: &[ModVector]) -> Result<CyclicReport, DecideError> {
        let first = generators.first().ok_or(DecideError::NoGenerators)?;
        let (ring, n) = (first.ring(), first.arity());
        check_compatible(ring, n, generators)?;
        if !ring.is_field() {
            return Err(DecideError::NotAField(ring));
        }
        if let Some(i) = generators.iter().position(|g| !crate::pmod::is_aug_zero(&self.oracle, g)) {
            return Err(DecideError::NotAugZero(i));
        }
        let widest = generators.iter().map(|g| g.support_points().len()).max().unwrap_or(0);
        let step = BigRational::new(1.into(), ((widest + 1) as i64).into());
        let mut placed = Vec::with_capacity(generators.len());
        let mut x = ModVector::zero(ring, n);
        for (i, g) in generators.iter().enumerate() {
            let base = BigRational::from_integer((2 * (i as i64 + 1)).into());
            let map: BTreeMap<Point, Point> = g
                .support_points()
                .points()
                .iter()
                .enumerate()
                .map(|(j, p)| (p.clone(), &base + &step * BigRational::from_integer((j as i64 + 1).into())))
                .collect();
            let moved = g.act(&map)?;
            x = &x + &moved;
            placed.push(moved);
        }

        let options = MembershipOptions::default();
        let mut forward = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            let d = self.membership(g, std::slice::from_ref(&x), &options)?;
            if !d.member {
                return Err(DecideError::VerificationFailed {
                    what: format!("generator {i} is not in the cyclic submodule"),
                    decision: Box::new(d),
                });
            }
            forward.push(d);
        }
        let backward = self.membership(&x, generators, &options)?;
        if !backward.member {
            return Err(DecideError::VerificationFailed {
                what: "the cyclic generator is not in the generated submodule".into(),
                decision: Box::new(backward),
            });
        }
        Ok(CyclicReport {
            generator: x,
            placed,
            forward,
            backward,
        })
    }
}

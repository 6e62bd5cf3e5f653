//! Membership in finitely generated submodules of the permutation modules
//! `R[ℚⁿ]` under the automorphism group of `(ℚ, <)`, with independently
//! checkable certificates.
//!
//! A membership question `x ∈ ⟨v_1, …, v_r⟩` is reduced to finite linear
//! algebra: with `S` the points occurring in `x`, every vector is summarized
//! by its coefficient sums over the orbits of the pointwise stabilizer of `S`
//! ([`pmod::omega`]), and the generators are replaced by one representative
//! per stabilizer orbit ([`pmod::orbit_reps_over`]). Answers carry either the
//! span coefficients or a separating invariant functional / ℝ/ℤ character.
//!
//! * [`ring`]: exact scalars and linear-algebra kernels.
//! * [`structure`]: order patterns over parameter sets and placements.
//! * [`pmod`]: module elements, the group action, orbit-sum maps.
//! * [`decide`]: decision procedures and certificate checking.
//! * [`oracle`]: brute-force grid approximation for cross-validation.
//! * [`format`]: canonical JSON file formats.

pub mod decide;
pub mod exec;
pub mod format;
pub mod oracle;
pub mod pmod;
pub mod ring;
pub mod structure;

pub use decide::{Certificate, Decider, Decision, MembershipOptions};
pub use exec::Execution;
pub use pmod::{AugVector, ModVector};
pub use ring::{RingSpec, Scalar};
pub use structure::{DenseOrder, ParamSet, PatternKey, Point, ReductSpec, StructureOracle};

mod common;

use std::collections::BTreeSet;

use common::{fixing, param_set, rings, vector};
use permod::pmod::{omega, omega_empty, orbit_reps_over};
use permod::{AugVector, DenseOrder, Execution, ModVector, ParamSet, RingSpec, Scalar};
use proptest::prelude::*;

proptest! {
    #[test]
    fn omega_is_linear(
        (ring, x, y) in rings().prop_flat_map(|r| (Just(r), vector(r, 2, 3), vector(r, 2, 3))),
        s in param_set(),
        a in -3i64..=3,
        b in -3i64..=3,
    ) {
        let (a, b) = (Scalar::from_i64(ring, a), Scalar::from_i64(ring, b));
        let mut combo = x.scale(&a);
        combo.add_scaled(&b, &y);
        let mut expected = AugVector::zero(ring);
        expected.add_scaled(&a, &omega(&DenseOrder, &x, &s));
        expected.add_scaled(&b, &omega(&DenseOrder, &y, &s));
        prop_assert_eq!(omega(&DenseOrder, &combo, &s), expected);
    }

    #[test]
    fn omega_is_invariant_under_the_stabilizer(
        x in vector(RingSpec::Rationals, 2, 4),
        s in param_set(),
        bend in (1i64..10, 1i64..10),
        stretch in (1i64..5, 1i64..5),
    ) {
        let f = fixing(&s, bend, stretch);
        let map = x.support_points().points().iter().map(|p| (p.clone(), f(p))).collect();
        let moved = x.act(&map).unwrap();
        prop_assert_eq!(omega(&DenseOrder, &moved, &s), omega(&DenseOrder, &x, &s));
    }

    #[test]
    fn omega_is_injective_on_parameter_tuples(x in vector(RingSpec::Rationals, 2, 4), y in vector(RingSpec::Rationals, 2, 4)) {
        let s = x.support_points().union(&y.support_points());
        let same = omega(&DenseOrder, &x, &s) == omega(&DenseOrder, &y, &s);
        prop_assert_eq!(same, x == y);
    }

    #[test]
    fn orbit_representatives_are_distinct_and_in_the_orbit(v in vector(RingSpec::Rationals, 2, 3), s in param_set()) {
        let reps = orbit_reps_over(&DenseOrder, &v, &s, Execution::Sequential);
        let profile = omega_empty(&DenseOrder, &v);
        let mut slot_patterns = BTreeSet::new();
        for r in &reps {
            prop_assert_eq!(omega_empty(&DenseOrder, r), profile.clone());
            prop_assert!(r.same_orbit(&v));
            let slots = DenseOrder.slots_of(r.support_points().points(), &s);
            prop_assert!(slot_patterns.insert(slots));
        }
    }

    #[test]
    fn parallel_and_sequential_representatives_agree(v in vector(RingSpec::Rationals, 2, 3), s in param_set()) {
        prop_assert_eq!(
            orbit_reps_over(&DenseOrder, &v, &s, Execution::Sequential),
            orbit_reps_over(&DenseOrder, &v, &s, Execution::Parallel)
        );
    }
}

#[test]
fn zero_has_empty_orbit_sums() {
    let zero = ModVector::zero(RingSpec::Rationals, 2);
    assert!(omega(&DenseOrder, &zero, &ParamSet::from_integers([0, 1])).is_zero());
}

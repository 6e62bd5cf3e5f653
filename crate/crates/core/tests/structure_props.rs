mod common;

use std::cmp::Ordering;

use common::{fixing, half, param_set};
use permod::{DenseOrder, ParamSet, Point, StructureOracle};
use proptest::prelude::*;

fn relation_table(tuple: &[Point], params: &ParamSet) -> Vec<Ordering> {
    let mut table = Vec::new();
    for (i, x) in tuple.iter().enumerate() {
        for p in params.points() {
            table.push(x.cmp(p));
        }
        for y in &tuple[i + 1..] {
            table.push(x.cmp(y));
        }
    }
    table
}

fn tuple(n: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-4i64..12).prop_map(half), n)
}

fn chain(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set((-40i64..60).prop_map(|n| half(n) / half(5)), 1..=max).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn patterns_separate_order_types(n in 1usize..4, u in tuple(3), w in tuple(3), s in param_set()) {
        let (u, w) = (&u[..n], &w[..n]);
        let same = DenseOrder.pattern_of_tuple(u, &s) == DenseOrder.pattern_of_tuple(w, &s);
        prop_assert_eq!(same, relation_table(u, &s) == relation_table(w, &s));
    }

    #[test]
    fn patterns_are_invariant_under_maps_fixing_the_parameters(
        u in tuple(3),
        s in param_set(),
        bend in (1i64..10, 1i64..10),
        stretch in (1i64..5, 1i64..5),
    ) {
        let f = fixing(&s, bend, stretch);
        let moved: Vec<Point> = u.iter().map(&f).collect();
        for p in s.points() {
            prop_assert_eq!(&f(p), p);
        }
        prop_assert_eq!(DenseOrder.pattern_of_tuple(&u, &s), DenseOrder.pattern_of_tuple(&moved, &s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn every_chain_matches_exactly_one_placement(x in chain(4), s in (0usize..=3).prop_flat_map(|k| prop::collection::btree_set((-8i64..8).prop_map(half), k))) {
        let params = ParamSet::from_set(s);
        let source: Vec<Point> = (0..x.len() as i64).map(half).collect();
        let key = DenseOrder.pattern_of_tuple(&x, &params);
        let matches = DenseOrder
            .enumerate_placements(&source, &params)
            .iter()
            .filter(|p| DenseOrder.pattern_of_tuple(&p.images, &params) == key)
            .count();
        prop_assert_eq!(matches, 1);
    }
}

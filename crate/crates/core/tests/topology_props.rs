use proptest::prelude::*;
use std::sync::OnceLock;
use workbench_core::topology::{
    cofinality, enumerate_ideals, enumerate_topologies, is_a_cover, is_large_a_cover, replicate, FiniteSpace, PointSet,
};

fn spaces() -> &'static [FiniteSpace] {
    static ALL: OnceLock<Vec<FiniteSpace>> = OnceLock::new();
    ALL.get_or_init(|| (1..=4).flat_map(enumerate_topologies).collect())
}

fn pick_subfamily(items: &[PointSet], mask: u64) -> Vec<PointSet> {
    items.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, &s)| s).collect()
}

/// Maximal elements by direct pairwise comparison.
fn count_maximal(family: &[PointSet]) -> usize {
    let mut distinct = family.to_vec();
    distinct.sort();
    distinct.dedup();
    distinct.iter().filter(|a| !distinct.iter().any(|b| b != *a && a.0 & b.0 == a.0)).count()
}

#[test]
fn topology_counts() {
    let counts: Vec<usize> = (1..=4).map(|n| enumerate_topologies(n).len()).collect();
    assert_eq!(counts, vec![1, 4, 29, 355]);
}

proptest! {
    #[test]
    fn covers_and_large_covers(space_ix in any::<prop::sample::Index>(), ideal_ix in any::<prop::sample::Index>(),
                               mask in any::<u64>(), k in 1usize..=4) {
        let space = space_ix.get(spaces());
        let ideals = enumerate_ideals(space);
        prop_assume!(!ideals.is_empty());
        let ideal = ideal_ix.get(&ideals).members();
        let family = pick_subfamily(&space.proper_opens(), mask);
        let cover = is_a_cover(space, ideal, &family).unwrap();
        prop_assert_eq!(cover, is_large_a_cover(space, ideal, &family, 1).unwrap());
        if cover {
            prop_assert!(is_large_a_cover(space, ideal, &replicate(&family, k), k).unwrap());
        }
    }

    #[test]
    fn cofinality_bounds(space_ix in any::<prop::sample::Index>(), ideal_ix in any::<prop::sample::Index>(),
                         mask in any::<u64>()) {
        let space = space_ix.get(spaces());
        let ideals = enumerate_ideals(space);
        prop_assume!(!ideals.is_empty());
        let ideal = ideal_ix.get(&ideals).members();
        prop_assert_eq!(cofinality(ideal, ideal).unwrap(), count_maximal(ideal));
        let sub = pick_subfamily(ideal, mask);
        prop_assert!(cofinality(ideal, &sub).unwrap() <= ideal.len());
    }
}

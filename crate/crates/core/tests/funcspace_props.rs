mod common;

use common::{build, piecewise, rng, Kind, Values};
use proptest::prelude::*;
use rand::Rng;
use std::sync::OnceLock;
use workbench_core::funcspace::{FunctionGrid, Region, Subset};
use workbench_core::rational::{int, pow2_neg, rat};
use workbench_core::setvalued::{is_minimal_cusco, CompactSet, Verdict};
use workbench_core::topology::{FiniteSpace, PointSet};

fn lattice() -> &'static FunctionGrid {
    static GRID: OnceLock<FunctionGrid> = OnceLock::new();
    GRID.get_or_init(|| {
        let ideal = (1u32..7).map(|m| Region::Points(PointSet(m))).collect();
        let values = [int(-1), rat(-1, 2), rat(-1, 8), int(0), rat(1, 4), int(1)];
        FunctionGrid::lattice(FiniteSpace::discrete(3), &values, ideal).unwrap()
    })
}

fn interval_grid() -> &'static FunctionGrid {
    static GRID: OnceLock<FunctionGrid> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut r = rng(42);
        let mut named = Vec::new();
        while named.len() < 12 {
            let f = piecewise(&mut r, Values::Limits);
            // squeeze values toward zero so that small preimages are non-trivial
            let f = f.shifted(&(rat(r.gen_range(-2..=2), 4)));
            let phi = build(Kind::Hull, &f);
            if is_minimal_cusco(&phi).unwrap() == Verdict::Yes {
                named.push((format!("m{}", named.len()), phi));
            }
        }
        let ideal = vec![
            Region::Compact(CompactSet::interval(rat(1, 4), rat(1, 2)).unwrap()),
            Region::Compact(CompactSet::interval(rat(1, 4), rat(3, 4)).unwrap()),
            Region::Compact(CompactSet::interval(int(0), int(1)).unwrap()),
        ];
        FunctionGrid::maps(int(0), int(1), named, ideal).unwrap()
    })
}

fn subset_of(a: &Subset, b: &Subset) -> bool {
    match (a, b) {
        (Subset::Points(x), Subset::Points(y)) => x.is_subset(*y),
        (Subset::Reals(x), Subset::Reals(y)) => x.is_subset(y),
        _ => false,
    }
}

proptest! {
    #[test]
    fn lattice_neighborhoods_are_monotone(center in 0usize..216, a in 1u32..7, b in 1u32..7, i in 1u32..6, j in 1u32..6) {
        let grid = lattice();
        let (small, large) = (pow2_neg(i.max(j)), pow2_neg(i.min(j)));
        let members = |set: u32, eps| {
            grid.neighborhood_members(&grid.neighborhood(center, Region::Points(PointSet(set)), eps).unwrap()).unwrap()
        };
        let tight = members(a, small.clone());
        let loose = members(a, large);
        prop_assert!(tight.iter().all(|m| loose.contains(m)));
        if a & b == a {
            let wide = members(b, small);
            prop_assert!(wide.iter().all(|m| tight.contains(m)));
        }
    }

    #[test]
    fn small_preimages_nest(n in 0u32..5, which in any::<prop::sample::Index>(), interval in any::<bool>()) {
        let grid = if interval { interval_grid() } else { lattice() };
        let m = which.index(grid.len());
        prop_assert!(subset_of(&grid.small_preimage(m, n + 1).unwrap(), &grid.small_preimage(m, n).unwrap()));
        for a in grid.ideal() {
            if grid.in_ball(grid.zero(), m, a, &pow2_neg(n)).unwrap() {
                prop_assert!(grid.small_preimage(m, n).unwrap().contains_region(a));
            }
        }
    }
}

//! The concrete translations between cover games and function-space games,
//! instantiated on the discrete two-point space with the singletons as both ideals.

use super::{TranslationError, TranslationPair};
use crate::funcspace::{FunctionGrid, GridCondition, Member, Region};
use crate::game::{GameSpec, Item, WinCondition};
use crate::rational::{int, pow2_neg, rat, Rat};
use crate::topology::{is_a_cover, normality_witness, CoverClass, FiniteSpace, PointSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::ops::Not;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BuiltinName {
    Identity,
    /// Identity on moves, but every pick becomes the same fixed item.
    Corrupted,
    CoversToFanTightness,
    DenseToCovers,
    NbhdToClosedDiscrete,
    WGameTransfer,
}

impl BuiltinName {
    pub const ALL: [BuiltinName; 6] = [
        BuiltinName::Identity,
        BuiltinName::Corrupted,
        BuiltinName::CoversToFanTightness,
        BuiltinName::DenseToCovers,
        BuiltinName::NbhdToClosedDiscrete,
        BuiltinName::WGameTransfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinName::Identity => "IDENTITY",
            BuiltinName::Corrupted => "CORRUPTED",
            BuiltinName::CoversToFanTightness => "COVERS_TO_FAN_TIGHTNESS",
            BuiltinName::DenseToCovers => "DENSE_TO_COVERS",
            BuiltinName::NbhdToClosedDiscrete => "NBHD_TO_CLOSED_DISCRETE",
            BuiltinName::WGameTransfer => "W_GAME_TRANSFER",
        }
    }
}

impl FromStr for BuiltinName {
    type Err = TranslationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| TranslationError::UnregisteredUniverse(s.to_string()))
    }
}

/// A translation together with its source game `g` and target game `h`.
/// The win conditions of the games are the classes the translation is checked against.
#[derive(Debug, Clone)]
pub struct DeskInstance {
    pub name: BuiltinName,
    pub pair: TranslationPair,
    pub g: GameSpec,
    pub h: GameSpec,
    pub space: Arc<FiniteSpace>,
    pub grid: Option<Arc<FunctionGrid>>,
    /// Where the instance replaces an infinitary notion by a finite one.
    pub surrogates: Vec<String>,
}

const HORIZON: usize = 2;

fn singletons() -> Vec<PointSet> {
    vec![PointSet::singleton(0), PointSet::singleton(1)]
}

fn singleton_regions() -> Vec<Region> {
    singletons().into_iter().map(Region::Points).collect()
}

fn values(grid: &FunctionGrid, i: Item) -> &[Rat] {
    match &grid.members()[i as usize] {
        Member::Values(v) => v,
        Member::Map(_) => unreachable!("lattice grids hold values"),
    }
}

fn preimage(grid: &FunctionGrid, i: Item, n: usize) -> PointSet {
    grid.small_preimage(i as usize, n as u32).expect("member of the grid").as_points().expect("finite base")
}

fn bits(sets: &[PointSet]) -> Vec<Item> {
    sets.iter().map(|u| u.0).collect()
}

/// Distinct `t_one` images over every turn and H-move, in order of appearance.
fn image_pool(pair: &TranslationPair, h_pool: &[Vec<Item>]) -> Vec<Vec<Item>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 0..HORIZON {
        for b in h_pool {
            let image = (pair.t_one)(n, b);
            let mut key = image.clone();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(image);
            }
        }
    }
    out
}

pub fn desk_instance(name: BuiltinName) -> Result<DeskInstance, TranslationError> {
    let space = Arc::new(FiniteSpace::discrete(2));
    match name {
        BuiltinName::Identity | BuiltinName::Corrupted => {
            let g = GameSpec::new(HORIZON, vec![vec![0b01, 0b10]], WinCondition::class(&space, CoverClass::OpenCover))?;
            let pair = if name == BuiltinName::Identity {
                TranslationPair::identity()
            } else {
                TranslationPair::new("constant pick", |_, b| b.to_vec(), |_, _, _| Some(0b01))
            };
            Ok(DeskInstance { name, pair, h: g.clone(), g, space, grid: None, surrogates: vec![] })
        }
        BuiltinName::CoversToFanTightness => covers_to_fan_tightness(space),
        BuiltinName::DenseToCovers => dense_to_covers(space),
        BuiltinName::NbhdToClosedDiscrete => nbhd_to_closed_discrete(space),
        BuiltinName::WGameTransfer => w_game_transfer(space),
    }
}

/// Source: Two picks from covers and wins by covering. Target: One names finite
/// families of functions clustering at zero and Two must pick a family clustering at zero.
fn covers_to_fan_tightness(space: Arc<FiniteSpace>) -> Result<DeskInstance, TranslationError> {
    let grid_values = [int(-1), rat(-1, 4), int(0), rat(1, 2), int(1)];
    let grid =
        Arc::new(FunctionGrid::lattice((*space).clone(), &grid_values, singleton_regions()).expect("valid grid"));
    let full = space.full();

    // target moves: families of at most two members that cluster at zero against
    // every radius the source turns use
    let radii: Vec<Rat> = (0..HORIZON).map(|n| pow2_neg(n as u32)).collect();
    let tests = grid.zero_tests(&singleton_regions(), &radii).expect("regions are in the ideal");
    let clusters = |fam: &[usize]| grid.cluster_at_zero(fam, &tests).expect("valid members");
    let mut h_pool: Vec<Vec<Item>> = Vec::new();
    for i in 0..grid.len() {
        if clusters(&[i]) {
            h_pool.push(vec![i as Item]);
        }
    }
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            if clusters(&[i, j]) {
                h_pool.push(vec![i as Item, j as Item]);
            }
        }
    }

    let fixed_cover = bits(&singletons());
    let (g1, g2) = (Arc::clone(&grid), Arc::clone(&grid));
    let fixed = fixed_cover.clone();
    let t_one = move |n: usize, fam: &[Item]| -> Vec<Item> {
        let ws: Vec<PointSet> = fam.iter().map(|&f| preimage(&g1, f, n)).collect();
        if ws.contains(&full) {
            return fixed.clone();
        }
        let set: BTreeSet<Item> = ws.iter().filter(|w| !w.is_empty()).map(|w| w.0).collect();
        set.into_iter().collect()
    };
    let t_two = move |n: usize, u: Item, fam: &[Item]| -> Option<Item> {
        let ws: Vec<PointSet> = fam.iter().map(|&f| preimage(&g2, f, n)).collect();
        if let Some(k) = ws.iter().position(|&w| w == full) {
            return Some(fam[k]);
        }
        match ws.iter().position(|w| w.0 == u) {
            Some(k) => Some(fam[k]),
            None => Some(g2.zero() as Item),
        }
    };
    let pair = TranslationPair::new(BuiltinName::CoversToFanTightness.as_str(), t_one, t_two);
    let g_pool = image_pool(&pair, &h_pool);
    let threshold = 1;
    let g = GameSpec::new(
        HORIZON,
        g_pool,
        WinCondition::class(&space, CoverClass::LargeACover { ideal: singletons(), threshold }),
    )?;
    // a cover hit `threshold` times reaches turn threshold-1, so radii down to 2^-(threshold-1) are earned
    let earned: Vec<Rat> = (0..threshold).map(|m| pow2_neg(m as u32)).collect();
    let h = GameSpec::new(
        HORIZON,
        h_pool,
        WinCondition::Grid {
            grid: Arc::clone(&grid),
            condition: GridCondition::ClusterAtZero { regions: singleton_regions(), epsilons: earned },
        },
    )?;
    Ok(DeskInstance {
        name: BuiltinName::CoversToFanTightness,
        pair,
        g,
        h,
        space,
        grid: Some(grid),
        surrogates: vec![
            "large covers: each ideal member inside `threshold` picks".into(),
            "clustering at zero: tested on ideal members x finite radius menu".into(),
            "target moves: families of at most two grid members".into(),
        ],
    })
}

/// Source: One names dense sets of functions, Two must pick functions clustering at zero.
/// Target: the covers game.
fn dense_to_covers(space: Arc<FiniteSpace>) -> Result<DeskInstance, TranslationError> {
    let grid = Arc::new(
        FunctionGrid::lattice((*space).clone(), &[int(-1), int(0), int(1)], singleton_regions()).expect("valid grid"),
    );
    let opens = space.proper_opens();
    let mut h_pool = Vec::new();
    for mask in 1u32..1 << opens.len() {
        let fam: Vec<PointSet> = (0..opens.len()).filter(|i| mask >> i & 1 == 1).map(|i| opens[i]).collect();
        if is_a_cover(&space, &singletons(), &fam).unwrap_or(false) {
            h_pool.push(bits(&fam));
        }
    }
    let one = int(1);
    let n_points = space.point_count();
    let is_one_off = {
        let grid = Arc::clone(&grid);
        move |f: Item, u: Item| (0..n_points).filter(|x| u >> x & 1 == 0).all(|x| values(&grid, f)[x] == one)
    };
    let check = is_one_off.clone();
    let members = grid.len() as Item;
    let t_one = move |_n: usize, cover: &[Item]| -> Vec<Item> {
        (0..members).filter(|&f| cover.iter().any(|&u| check(f, u))).collect()
    };
    let fallback = opens[0].0;
    let t_two = move |_n: usize, f: Item, cover: &[Item]| -> Option<Item> {
        Some(cover.iter().copied().find(|&u| is_one_off(f, u)).unwrap_or(fallback))
    };
    let pair = TranslationPair::new(BuiltinName::DenseToCovers.as_str(), t_one, t_two);
    let g_pool = image_pool(&pair, &h_pool);
    let g = GameSpec::new(
        HORIZON,
        g_pool,
        WinCondition::Grid {
            grid: Arc::clone(&grid),
            condition: GridCondition::ClusterAtZero { regions: singleton_regions(), epsilons: vec![int(1)] },
        },
    )?;
    let h = GameSpec::new(
        HORIZON,
        h_pool,
        WinCondition::class(&space, CoverClass::LargeACover { ideal: singletons(), threshold: 1 }),
    )?;
    Ok(DeskInstance {
        name: BuiltinName::DenseToCovers,
        pair,
        g,
        h,
        space,
        grid: Some(grid),
        surrogates: vec![
            "dense families: the translated families themselves form the pool".into(),
            "clustering at zero: tested on ideal members at radius 1".into(),
        ],
    })
}

/// Source: One names neighborhood filters of an ideal member, Two picks opens and
/// wins when some ideal member escapes every pick. Target: One names open sets of
/// functions, Two must pick a closed discrete run.
fn nbhd_to_closed_discrete(space: Arc<FiniteSpace>) -> Result<DeskInstance, TranslationError> {
    let grid = Arc::new(
        FunctionGrid::lattice((*space).clone(), &[int(-1), int(0), int(1)], singleton_regions()).expect("valid grid"),
    );
    let a = PointSet::singleton(0);
    let radius = rat(1, 2);
    // open sets of functions generated by basic balls around each member; the
    // first generating center is the choice made for each open set
    let mut generated: Vec<(Vec<Item>, usize)> = Vec::new();
    for psi in 0..grid.len() {
        let nb = grid.neighborhood(psi, Region::Points(a), radius.clone()).expect("a is an ideal member");
        let ball: Vec<Item> =
            grid.neighborhood_members(&nb).expect("valid ball").into_iter().map(|i| i as Item).collect();
        if !generated.iter().any(|(b, _)| *b == ball) {
            generated.push((ball, psi));
        }
    }
    let h_pool: Vec<Vec<Item>> = generated.iter().map(|(b, _)| b.clone()).collect();
    let nbhds = bits(&space.neighborhoods_of(a));
    let t_one_nb = nbhds.clone();
    let t_one = move |_n: usize, _w: &[Item]| -> Vec<Item> { t_one_nb.clone() };
    let g2 = Arc::clone(&grid);
    let sp = Arc::clone(&space);
    let t_two = move |n: usize, u: Item, w: &[Item]| -> Option<Item> {
        let zero = g2.zero() as Item;
        let Some(&(_, psi)) = generated.iter().find(|(b, _)| b.as_slice() == w) else {
            return Some(zero);
        };
        if !nbhds.contains(&u) {
            return Some(zero);
        }
        let v = normality_witness(&sp, a, PointSet(u))?;
        let off = sp.closure(sp.full().minus(sp.closure(v)));
        let psi_values = values(&g2, psi as Item);
        let f: Vec<Rat> = (0..sp.point_count())
            .map(|x| if off.contains(x) { int(n as i64) } else { psi_values[x].clone() })
            .collect();
        g2.index_of_values(&f).map(|i| i as Item)
    };
    let pair = TranslationPair::new(BuiltinName::NbhdToClosedDiscrete.as_str(), t_one, t_two);
    let g_pool = image_pool(&pair, &h_pool);
    let ideal = singletons();
    let escapes = WinCondition::custom("some ideal member escapes every pick", move |picks: &[Item]| {
        ideal.iter().any(|b| picks.iter().all(|&u| !b.is_subset(PointSet(u))))
    });
    let g = GameSpec::new(HORIZON, g_pool, escapes)?;
    let h = GameSpec::new(
        HORIZON,
        h_pool,
        WinCondition::Grid {
            grid: Arc::clone(&grid),
            condition: GridCondition::ClosedDiscrete { regions: singleton_regions(), tail: 1 },
        },
    )?;
    Ok(DeskInstance {
        name: BuiltinName::NbhdToClosedDiscrete,
        pair,
        g,
        h,
        space,
        grid: Some(grid),
        surrogates: vec![
            "not a large cover: one ideal member escapes every pick".into(),
            "closed discrete: separation checked against grid members and zero only".into(),
            "open sets of functions: basic balls of radius 1/2 around the ideal member {0}".into(),
        ],
    })
}

/// Source: One names neighborhoods of zero in the function space, Two wins by
/// not converging to zero. Target: One names neighborhood filters of ideal
/// members, Two wins when the picks are not eventually around every ideal member.
fn w_game_transfer(space: Arc<FiniteSpace>) -> Result<DeskInstance, TranslationError> {
    let grid = Arc::new(
        FunctionGrid::lattice((*space).clone(), &[int(-1), int(0), int(1)], singleton_regions()).expect("valid grid"),
    );
    let filters: Vec<(Vec<Item>, PointSet)> =
        singletons().into_iter().map(|a| (bits(&space.neighborhoods_of(a)), a)).collect();
    let h_pool: Vec<Vec<Item>> = filters.iter().map(|(f, _)| f.clone()).collect();
    let lookup = {
        let filters = filters.clone();
        move |mv: &[Item]| filters.iter().find(|(f, _)| f.as_slice() == mv).map(|(_, a)| *a)
    };
    let lookup2 = lookup.clone();
    let g1 = Arc::clone(&grid);
    let t_one = move |n: usize, mv: &[Item]| -> Vec<Item> {
        let Some(a) = lookup(mv) else { return Vec::new() };
        let nb = g1.neighborhood(g1.zero(), Region::Points(a), pow2_neg(n as u32)).expect("a is an ideal member");
        g1.neighborhood_members(&nb).expect("valid ball").into_iter().map(|i| i as Item).collect()
    };
    let g2 = Arc::clone(&grid);
    let sp = Arc::clone(&space);
    let t_two = move |n: usize, f: Item, mv: &[Item]| -> Option<Item> {
        let w = preimage(&g2, f, n);
        if w == sp.full() {
            // the whole space is not a proper open: fall back to the first neighborhood of the ideal member
            let a = lookup2(mv)?;
            return sp.neighborhoods_of(a).first().map(|u| u.0);
        }
        Some(w.0)
    };
    let pair = TranslationPair::new(BuiltinName::WGameTransfer.as_str(), t_one, t_two);
    let g_pool = image_pool(&pair, &h_pool);
    let g3 = Arc::clone(&grid);
    let ideal = singleton_regions();
    let escapes = WinCondition::custom("some pick leaves its shrinking ball around zero", move |picks: &[Item]| {
        !ideal.iter().all(|b| {
            picks
                .iter()
                .enumerate()
                .all(|(n, &f)| g3.in_ball(g3.zero(), f as usize, b, &pow2_neg(n as u32)).expect("valid members"))
        })
    });
    let g = GameSpec::new(HORIZON, g_pool, escapes)?;
    let h = GameSpec::new(
        HORIZON,
        h_pool,
        WinCondition::class(&space, CoverClass::GammaACover { ideal: singletons(), tail: 0 }).not(),
    )?;
    Ok(DeskInstance {
        name: BuiltinName::WGameTransfer,
        pair,
        g,
        h,
        space,
        grid: Some(grid),
        surrogates: vec![
            "convergence: every pick from turn 0 on, at radius 2^-turn".into(),
            "gamma covers: every pick from turn 0 on contains each ideal member".into(),
            "a preimage equal to the whole space is replaced by the first proper neighborhood".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{solve, Player, SolveOptions};
    use crate::translation::{check_condition_i, check_condition_ii, verify_full_transfer, verify_markov_transfer};

    fn id(grid: &FunctionGrid, s: &str) -> Item {
        grid.index_of(s).unwrap_or_else(|| panic!("no member {s}")) as Item
    }

    #[test]
    fn names_round_trip() {
        for n in BuiltinName::ALL {
            assert_eq!(n.as_str().parse::<BuiltinName>().unwrap(), n);
        }
        assert!(matches!("NOPE".parse::<BuiltinName>(), Err(TranslationError::UnregisteredUniverse(_))));
    }

    #[test]
    fn fan_tightness_branches() {
        let inst = desk_instance(BuiltinName::CoversToFanTightness).unwrap();
        let grid = inst.grid.as_ref().unwrap();
        // no member vanishes everywhere near zero: the preimages form the cover
        let fam = [id(grid, "(-1/4,1)"), id(grid, "(1,-1/4)")];
        assert_eq!((inst.pair.t_one)(1, &fam), vec![0b01, 0b10]);
        assert_eq!((inst.pair.t_two)(1, 0b10, &fam), Some(fam[1]));
        assert_eq!((inst.pair.t_two)(1, 0b11, &fam), Some(grid.zero() as Item));
        // some member is small everywhere: the fixed cover, and that member is the answer
        let fam = [id(grid, "(1,-1)"), id(grid, "(-1/4,0)")];
        assert_eq!((inst.pair.t_one)(1, &fam), vec![0b01, 0b10]);
        assert_eq!((inst.pair.t_two)(1, 0b01, &fam), Some(fam[1]));
        assert_eq!(inst.g.pool(), &[vec![0b01, 0b10]]);
    }

    #[test]
    fn dense_translation_shape() {
        let inst = desk_instance(BuiltinName::DenseToCovers).unwrap();
        let grid = inst.grid.as_ref().unwrap();
        assert_eq!(inst.h.pool(), &[vec![0b01, 0b10]]);
        let image = (inst.pair.t_one)(0, &[0b01, 0b10]);
        let ids: Vec<&str> = image.iter().map(|&i| grid.id(i as usize)).collect();
        assert_eq!(ids, vec!["(-1,1)", "(0,1)", "(1,-1)", "(1,0)", "(1,1)"]);
        assert_eq!((inst.pair.t_two)(0, id(grid, "(1,0)"), &[0b01, 0b10]), Some(0b10));
        assert_eq!((inst.pair.t_two)(0, id(grid, "(1,1)"), &[0b01, 0b10]), Some(0b01));
    }

    #[test]
    fn w_game_translation_shape() {
        let inst = desk_instance(BuiltinName::WGameTransfer).unwrap();
        let grid = inst.grid.as_ref().unwrap();
        let image = (inst.pair.t_one)(1, &[0b01]);
        let ids: Vec<&str> = image.iter().map(|&i| grid.id(i as usize)).collect();
        assert_eq!(ids, vec!["(0,-1)", "(0,0)", "(0,1)"]);
        assert_eq!((inst.pair.t_two)(1, id(grid, "(0,1)"), &[0b01]), Some(0b01));
        assert_eq!((inst.pair.t_two)(1, id(grid, "(0,0)"), &[0b10]), Some(0b10));
    }

    #[test]
    fn every_instance_transfers() {
        for name in BuiltinName::ALL {
            let inst = desk_instance(name).unwrap();
            check_condition_i(&inst.pair, &inst.g, &inst.h).unwrap();
            let c2 = check_condition_ii(&inst.pair, inst.g.win(), inst.h.win(), &inst.g, &inst.h, 10_000_000).unwrap();
            assert_eq!(c2.holds, name != BuiltinName::Corrupted, "{name:?}: {:?}", c2.counterexample);
            let r = solve(&inst.g, &SolveOptions::default()).unwrap();
            assert_eq!(r.winner_full, Player::Two, "{name:?}");
            let tau = r.two_markov.expect("a Markov win in every source game");
            let m = verify_markov_transfer(&inst.pair, &inst.g, &inst.h, &tau).unwrap();
            let f = verify_full_transfer(&inst.pair, &inst.g, &inst.h, r.two_full.as_ref().unwrap()).unwrap();
            assert_eq!(m.sound(), name != BuiltinName::Corrupted, "{name:?}");
            assert_eq!(f.sound(), name != BuiltinName::Corrupted, "{name:?}");
        }
    }
}

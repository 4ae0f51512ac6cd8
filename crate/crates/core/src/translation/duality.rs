//! Dual pairs of selection games: what One can force in one game, Two can force
//! in the other. Checked empirically by solving both games.

use super::TranslationError;
use crate::game::{minimal_transversals, solve, GameSpec, Item, Player, SolveOptions, SolveReport, WinCondition};
use crate::topology::{CoverClass, FiniteSpace, PointSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::ops::Not;
use std::sync::Arc;

/// Which pair of move classes the two games draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `A`-covers against neighborhood filters of ideal members; items are open sets.
    Covers,
    /// Dense sets against non-empty open sets; items are points.
    DenseOpen,
    /// Sets clustering at a point against its neighborhoods; items are points.
    ClusterNeighborhood,
}

#[derive(Debug, Clone)]
pub struct DualityInstance {
    pub g: GameSpec,
    pub h: GameSpec,
    pub pairing: Pairing,
}

/// `r1`: every move of `g` meets every move of `h`.
/// `r2`: every minimal set meeting all moves of `h` contains a move of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub r1: bool,
    pub r2: bool,
}

impl Admissibility {
    pub fn holds(&self) -> bool {
        self.r1 && self.r2
    }
}

pub fn reflection_admissible(g: &GameSpec, h: &GameSpec) -> Admissibility {
    let meets = |a: &[Item], b: &[Item]| a.iter().any(|x| b.contains(x));
    let r1 = g.pool().iter().all(|a| h.pool().iter().all(|b| meets(a, b)));
    let r2 = minimal_transversals(h.pool()).iter().any(|t| t.is_empty())
        || minimal_transversals(h.pool()).iter().all(|t| g.pool().iter().any(|a| a.iter().all(|x| t.contains(x))));
    Admissibility { r1, r2 }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub pairing: Pairing,
    pub g_winner: Player,
    pub h_winner: Player,
    pub one_wins_g_iff_two_wins_h: bool,
    pub two_wins_g_iff_one_wins_h: bool,
    pub one_predetermined_g_iff_two_markov_h: bool,
    pub two_markov_g_iff_one_predetermined_h: bool,
    pub admissibility: Admissibility,
    /// The games are finite-horizon stand-ins for infinite ones.
    pub caveat: bool,
}

impl DualityReport {
    pub fn all_hold(&self) -> bool {
        self.one_wins_g_iff_two_wins_h
            && self.two_wins_g_iff_one_wins_h
            && self.one_predetermined_g_iff_two_markov_h
            && self.two_markov_g_iff_one_predetermined_h
    }

    pub fn from_reports(pairing: Pairing, admissibility: Admissibility, g: &SolveReport, h: &SolveReport) -> Self {
        DualityReport {
            pairing,
            g_winner: g.winner_full,
            h_winner: h.winner_full,
            one_wins_g_iff_two_wins_h: (g.winner_full == Player::One) == (h.winner_full == Player::Two),
            two_wins_g_iff_one_wins_h: (g.winner_full == Player::Two) == (h.winner_full == Player::One),
            one_predetermined_g_iff_two_markov_h: g.one_has_predetermined == h.two_has_markov,
            two_markov_g_iff_one_predetermined_h: g.two_has_markov == h.one_has_predetermined,
            admissibility,
            caveat: true,
        }
    }
}

pub fn verify_duality(inst: &DualityInstance, opts: &SolveOptions) -> Result<DualityReport, TranslationError> {
    let g = solve(&inst.g, opts)?;
    let h = solve(&inst.h, opts)?;
    Ok(DualityReport::from_reports(inst.pairing, reflection_admissible(&inst.g, &inst.h), &g, &h))
}

type MoveFilter = Box<dyn Fn(&[Item]) -> bool>;

/// The full move class of the `h` side, and the class the `g` moves must belong to.
struct Classes {
    h_moves: Vec<Vec<Item>>,
    g_member: MoveFilter,
    outcomes: Vec<CoverClass>,
}

fn points(s: PointSet) -> Vec<Item> {
    s.iter().map(|x| x as Item).collect()
}

fn classes(space: &FiniteSpace, pairing: Pairing, param: &[PointSet]) -> Classes {
    match pairing {
        Pairing::Covers => {
            let ideal = param.to_vec();
            let h_moves = ideal
                .iter()
                .map(|&a| space.neighborhoods_of(a).iter().map(|u| u.0).collect::<Vec<Item>>())
                .filter(|m| !m.is_empty())
                .collect();
            let (sp, id) = (space.clone(), ideal.clone());
            let outcomes = vec![CoverClass::OpenCover, CoverClass::ACover { ideal: ideal.clone() }];
            Classes {
                h_moves,
                g_member: Box::new(move |m| CoverClass::ACover { ideal: id.clone() }.holds(&sp, m)),
                outcomes,
            }
        }
        Pairing::DenseOpen => {
            let mut h_moves: Vec<Vec<Item>> =
                space.opens().iter().filter(|u| !u.is_empty()).map(|&u| points(u)).collect();
            h_moves.sort();
            let sp = space.clone();
            Classes {
                h_moves,
                g_member: Box::new(move |m| CoverClass::Dense.holds(&sp, m)),
                outcomes: vec![CoverClass::Dense, CoverClass::ClosedDiscrete, CoverClass::ClusterAt { point: 0 }],
            }
        }
        Pairing::ClusterNeighborhood => {
            let x = param[0].iter().next().expect("a point");
            let mut h_moves: Vec<Vec<Item>> =
                space.opens().iter().filter(|u| u.contains(x)).map(|&u| points(u)).collect();
            h_moves.sort();
            let sp = space.clone();
            Classes {
                h_moves,
                g_member: Box::new(move |m| CoverClass::ClusterAt { point: x }.holds(&sp, m)),
                outcomes: vec![
                    CoverClass::ClusterAt { point: x },
                    CoverClass::ConvergesTo { point: x, tail: 0 },
                    CoverClass::ClosedDiscrete,
                ],
            }
        }
    }
}

fn subsets_up_to<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for mask in 1u64..1 << items.len() {
        if (mask.count_ones() as usize) <= max {
            out.push((0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i].clone()).collect());
        }
    }
    out
}

/// Counts from [`duality_instances`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub admissible: usize,
    pub skipped: usize,
}

/// Every admissible instance of `pairing` on `space` with at most `max_pool`
/// moves per pool. The target pool ranges over sub-pools of its class; the
/// source pool ranges over sub-pools of its minimal hitting sets together with
/// one-item enlargements of them. Parameters: every ideal for
/// [`Pairing::Covers`], every point for [`Pairing::ClusterNeighborhood`].
pub fn duality_instances(
    space: &Arc<FiniteSpace>,
    ideals: &[Vec<PointSet>],
    pairing: Pairing,
    max_pool: usize,
    horizon: usize,
) -> (Vec<DualityInstance>, Enumeration) {
    let params: Vec<Vec<PointSet>> = match pairing {
        Pairing::Covers => ideals.to_vec(),
        Pairing::DenseOpen => vec![vec![]],
        Pairing::ClusterNeighborhood => (0..space.point_count()).map(|x| vec![PointSet::singleton(x)]).collect(),
    };
    let universe: Vec<Item> = match pairing {
        Pairing::Covers => space.proper_opens().iter().map(|u| u.0).collect(),
        _ => (0..space.point_count() as Item).collect(),
    };
    let mut out = Vec::new();
    let mut count = Enumeration::default();
    for param in &params {
        let cls = classes(space, pairing, param);
        for h_pool in subsets_up_to(&cls.h_moves, max_pool) {
            let minimal = minimal_transversals(&h_pool);
            let mut candidates: BTreeSet<Vec<Item>> = minimal.iter().cloned().collect();
            for t in &minimal {
                if let Some(&extra) = universe.iter().find(|x| !t.contains(x)) {
                    let mut bigger = t.clone();
                    bigger.push(extra);
                    bigger.sort_unstable();
                    candidates.insert(bigger);
                }
            }
            let candidates: Vec<Vec<Item>> = candidates.into_iter().filter(|m| !m.is_empty()).collect();
            if candidates.len() > 12 {
                count.skipped += 1;
                continue;
            }
            for g_pool in subsets_up_to(&candidates, max_pool) {
                for outcome in &cls.outcomes {
                    let win = WinCondition::class(space, outcome.clone());
                    let (Ok(g), Ok(h)) = (
                        GameSpec::new(horizon, g_pool.clone(), win.clone()),
                        GameSpec::new(horizon, h_pool.clone(), win.not()),
                    ) else {
                        count.skipped += 1;
                        continue;
                    };
                    if !g_pool.iter().all(|m| (cls.g_member)(m)) || !reflection_admissible(&g, &h).holds() {
                        count.skipped += 1;
                        continue;
                    }
                    count.admissible += 1;
                    out.push(DualityInstance { g, h, pairing });
                }
            }
        }
    }
    (out, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rothberger_point_open() -> DualityInstance {
        let space = Arc::new(FiniteSpace::discrete(2));
        let cover = WinCondition::class(&space, CoverClass::OpenCover);
        let g = GameSpec::new(2, vec![vec![0b01, 0b10]], cover.clone()).unwrap();
        let h = GameSpec::new(2, vec![vec![0b01], vec![0b10]], cover.not()).unwrap();
        DualityInstance { g, h, pairing: Pairing::Covers }
    }

    #[test]
    fn rothberger_and_point_open_are_dual() {
        let inst = rothberger_point_open();
        let r = verify_duality(&inst, &SolveOptions::default()).unwrap();
        assert!(r.admissibility.holds());
        assert!(r.all_hold());
        assert_eq!((r.g_winner, r.h_winner), (Player::Two, Player::One));
        assert!(r.caveat);
    }

    #[test]
    fn sierpinski_dense_open() {
        let space = Arc::new(FiniteSpace::sierpinski());
        let (insts, count) = duality_instances(&space, &[], Pairing::DenseOpen, 3, 2);
        assert!(count.admissible > 0);
        for inst in insts {
            let r = verify_duality(&inst, &SolveOptions::default()).unwrap();
            assert!(r.all_hold(), "{:?} / {:?}", inst.g, inst.h);
        }
    }

    #[test]
    fn degenerate_pools_hold_vacuously() {
        let g = GameSpec::new(1, vec![vec![0]], WinCondition::Always).unwrap();
        let h = GameSpec::new(1, vec![vec![0]], WinCondition::Always.not()).unwrap();
        let r =
            verify_duality(&DualityInstance { g, h, pairing: Pairing::DenseOpen }, &SolveOptions::default()).unwrap();
        assert!(r.all_hold());
    }

    #[test]
    fn admissibility_detects_missing_hitting_sets() {
        let inst = rothberger_point_open();
        let narrow = GameSpec::new(2, vec![vec![0b01]], inst.g.win().clone()).unwrap();
        assert_eq!(reflection_admissible(&narrow, &inst.h), Admissibility { r1: false, r2: true });
        let h_one = GameSpec::new(2, vec![vec![0b01]], inst.h.win().clone()).unwrap();
        assert_eq!(reflection_admissible(&inst.g, &h_one), Admissibility { r1: true, r2: false });
        let h_wide = GameSpec::new(2, vec![vec![0b01, 0b10]], inst.h.win().clone()).unwrap();
        assert_eq!(reflection_admissible(&narrow, &h_wide), Admissibility { r1: true, r2: false });
    }
}
